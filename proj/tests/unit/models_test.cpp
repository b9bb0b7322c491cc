#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dnapprox/errors.hpp"
#include "dnapprox/models/coloring.hpp"
#include "dnapprox/models/markov.hpp"
#include "dnapprox/models/max_points.hpp"
#include "dnapprox/models/rgg.hpp"

namespace dnapprox {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Moments table_moments(const PmfTable& t) {
  const int d = t.dim();
  Moments m{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
  for (const auto& [z, p] : t.entries())
    for (int i = 0; i < d; ++i) m.mu[i] += p * static_cast<double>(z[static_cast<std::size_t>(i)]);
  for (const auto& [z, p] : t.entries())
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        m.V(i, k) += p * (static_cast<double>(z[static_cast<std::size_t>(i)]) - m.mu[i]) *
                     (static_cast<double>(z[static_cast<std::size_t>(k)]) - m.mu[k]);
  return m;
}

// Brute-force moments of a colouring over all d^M colourings, written
// independently of the library's enumerator.
Moments brute_force_colouring(int M, const std::vector<std::pair<int, int>>& edges, const Eigen::VectorXd& pi) {
  const int d = static_cast<int>(pi.size());
  Moments m{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
  long total = 1;
  for (int v = 0; v < M; ++v) total *= d;
  std::vector<Eigen::VectorXd> ws;
  std::vector<double> ps;
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> col(static_cast<std::size_t>(M));
    double p = 1.0;
    for (int v = 0; v < M; ++v) {
      col[static_cast<std::size_t>(v)] = static_cast<int>(c % d);
      p *= pi[c % d];
      c /= d;
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    for (auto [a, b] : edges)
      if (col[static_cast<std::size_t>(a)] == col[static_cast<std::size_t>(b)]) w[col[static_cast<std::size_t>(a)]] += 1.0;
    m.mu += p * w;
    ws.push_back(w);
    ps.push_back(p);
  }
  for (std::size_t i = 0; i < ws.size(); ++i) m.V += ps[i] * (ws[i] - m.mu) * (ws[i] - m.mu).transpose();
  return m;
}

TEST(Coloring, Validation) {
  EXPECT_THROW(ColoringModel::create(3, {{0, 0}}, vec({1.0})), DomainError);
  EXPECT_THROW(ColoringModel::create(3, {{0, 1}, {1, 0}}, vec({1.0})), DomainError);
  EXPECT_THROW(ColoringModel::create(3, {{0, 1}}, vec({0.5, 0.4})), DomainError);
  EXPECT_THROW(ColoringModel::create(3, {{0, 3}}, vec({1.0})), DomainError);
  EXPECT_THROW(ColoringModel::create(3, {}, vec({1.0})), DomainError);
}

TEST(Coloring, SingleEdgeMoments) {
  const auto model = ColoringModel::create(2, {{0, 1}}, vec({0.5, 0.5}));
  EXPECT_EQ(gc_mean_neighbours(model), 0.0);
  const auto m = gc_moments(model);
  EXPECT_DOUBLE_EQ(m.mu[0], 0.25);
  EXPECT_DOUBLE_EQ(m.V(0, 0), 3.0 / 16.0);
  EXPECT_DOUBLE_EQ(m.V(0, 1), -1.0 / 16.0);
  const auto t = gc_exact_pmf(model);
  EXPECT_DOUBLE_EQ(t.at({1, 0}), 0.25);
  EXPECT_DOUBLE_EQ(t.at({0, 1}), 0.25);
  EXPECT_DOUBLE_EQ(t.at({0, 0}), 0.5);
  EXPECT_EQ(t.total_mass(), 1.0);
}

TEST(Coloring, DegenerateColour) {
  const auto model = ColoringModel::cycle(5, vec({0.0, 1.0}));
  const auto m = gc_moments(model);
  EXPECT_EQ(m.mu[1], 5.0);
  EXPECT_EQ(m.V.row(1).cwiseAbs().sum(), 0.0);
  RngStream rng(1, 0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(gc_sample(model, rng).w, (IntVec{0, 5}));
}

TEST(Coloring, CycleAdjudicatesNeighbourConvention) {
  const auto pi = vec({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  const auto model = ColoringModel::cycle(6, pi);
  const auto brute = brute_force_colouring(6, model.edges(), pi);
  const auto m = gc_moments(model);
  EXPECT_NEAR(m.mu[0], 6.0 / 9.0, 1e-14);
  EXPECT_LE((m.mu - brute.mu).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((m.V - brute.V).cwiseAbs().maxCoeff(), 1e-12);
  // D_j = deg l + deg l' (= 4 on a cycle) would not reproduce the variance.
  EXPECT_EQ(gc_mean_neighbours(model), 2.0);
  const double p = 1.0 / 3.0;
  const double v_alt = 6.0 * (p * p * (1 - p * p) + 4.0 * p * p * p * (1 - p));
  EXPECT_GT(std::abs(v_alt - brute.V(0, 0)), 0.1);
}

TEST(Coloring, ExactPmfMatchesMoments) {
  Eigen::VectorXd pi = vec({0.5, 0.3, 0.2});
  std::vector<ColoringModel::Edge> edges{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {3, 4}, {4, 5}, {5, 6}};
  for (std::optional<double> p : {std::optional<double>{}, std::optional<double>{0.35}}) {
    const auto model = ColoringModel::create(7, edges, pi, p);
    const auto t = gc_exact_pmf(model);
    EXPECT_NEAR(t.total_mass(), 1.0, 1e-14);
    const auto a = table_moments(t);
    const auto b = gc_moments(model);
    EXPECT_LE((a.mu - b.mu).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((a.V - b.V).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Coloring, EnumerationBudget) {
  EXPECT_THROW(gc_exact_pmf(ColoringModel::cycle(14, vec({0.25, 0.25, 0.25, 0.25}))), BudgetError);
  EXPECT_NO_THROW(gc_exact_pmf(ColoringModel::cycle(10, vec({0.25, 0.25, 0.25, 0.25}))));
}

TEST(Coloring, SampleMeanMatchesMoments) {
  const auto model = ColoringModel::cycle(6, vec({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}));
  const auto m = gc_moments(model);
  RngStream rng(2, 0);
  const int reps = 100000;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(3);
  for (int r = 0; r < reps; ++r) {
    const auto w = gc_sample(model, rng).w;
    for (int i = 0; i < 3; ++i) s[i] += static_cast<double>(w[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s[i] / reps, 2.0 / 3.0, 3.0 * std::sqrt(m.V(i, i) / reps));
}

TEST(Coloring, ThinningZeroGivesZero) {
  const auto model = ColoringModel::cycle(8, vec({0.5, 0.5}), 0.0);
  RngStream rng(3, 0);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(gc_sample(model, rng).w, (IntVec{0, 0}));
  EXPECT_EQ(gc_exact_pmf(model).at({0, 0}), 1.0);
}

TEST(Coloring, SummandsSumToCounts) {
  const auto model = ColoringModel::cycle(9, vec({0.2, 0.3, 0.5}), 0.7);
  RngStream rng(4, 0);
  const auto s = gc_sample(model, rng, true);
  ASSERT_EQ(s.summands.rows(), 9);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(std::llround(s.summands.col(i).sum()), s.w[static_cast<std::size_t>(i)]);
}

TEST(Coloring, MinekaEpsilon) {
  EXPECT_EQ(gc_mineka_epsilon(ColoringModel::cycle(40, vec({0.5, 0.5}))), 1.0);
  const auto big = ColoringModel::cycle(4000, vec({0.4, 0.35, 0.25}));
  const double eps = gc_mineka_epsilon(big);
  EXPECT_GT(eps, 0.0);
  EXPECT_LT(eps, 0.5);
  EXPECT_LT(gc_mineka_epsilon(ColoringModel::cycle(16000, vec({0.4, 0.35, 0.25}))), eps);
}

// O(M^3) classifier of every triple.
IntVec brute_force_triples(const std::vector<Point2>& pts, double side, double r) {
  IntVec w{0, 0};
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      for (std::size_t c = b + 1; c < pts.size(); ++c) {
        const int links = (torus_distance(pts[a], pts[b], side) <= r) + (torus_distance(pts[a], pts[c], side) <= r) +
                          (torus_distance(pts[b], pts[c], side) <= r);
        if (links == 3) ++w[0];
        if (links == 2) ++w[1];
      }
  return w;
}

TEST(Rgg, Validation) {
  EXPECT_THROW(RggModel::create(20, 5.0), DomainError);
  EXPECT_THROW(RggModel::create(20, 0.0), DomainError);
  EXPECT_NO_THROW(RggModel::create(20, 4.9));
}

TEST(Rgg, TorusDistanceWraps) {
  EXPECT_NEAR(torus_distance({0.5, 0.5}, {9.5, 9.5}, 10.0), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(torus_distance({1.0, 2.0}, {4.0, 6.0}, 10.0), 5.0, 1e-12);
}

TEST(Rgg, FixedTriangle) {
  const std::vector<Point2> pts{{1.0, 1.0}, {1.5, 1.0}, {1.2, 1.4}, {5.0, 5.0}};
  EXPECT_EQ(rgg_count(pts, 10.0, 1.0), (IntVec{1, 0}));
  const std::vector<Point2> path{{1.0, 1.0}, {1.9, 1.0}, {2.8, 1.0}};
  EXPECT_EQ(rgg_count(path, 10.0, 1.0), (IntVec{0, 1}));
  // across the wrap
  const std::vector<Point2> wrap{{0.1, 0.1}, {9.9, 9.9}, {0.1, 9.8}};
  EXPECT_EQ(rgg_count(wrap, 10.0, 1.0), (IntVec{1, 0}));
}

TEST(Rgg, TinyRadiusHasNoEdges) {
  RngStream rng(5, 0);
  const auto model = RggModel::create(20, 1e-9);
  EXPECT_EQ(rgg_sample(model, rng).w, (IntVec{0, 0}));
}

TEST(Rgg, GridCountsMatchBruteForce) {
  RngStream rng(6, 0);
  for (double r : {0.6, 1.0, 1.2}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto model = RggModel::create(5, r);
      const auto pts = rgg_points(model, rng);
      const auto w = rgg_count(pts, 5.0, r);
      EXPECT_EQ(w, brute_force_triples(pts, 5.0, r));
      EXPECT_GE(w[0], 0);
      EXPECT_LE(w[0] + w[1], 25 * 24 * 23 / 6);
    }
  }
  // small tori take the all-pairs path
  std::vector<Point2> pts;
  for (int i = 0; i < 12; ++i) pts.push_back({2.0 * rng.uniform(), 2.0 * rng.uniform()});
  EXPECT_EQ(rgg_count(pts, 2.0, 0.8), brute_force_triples(pts, 2.0, 0.8));
}

TEST(Rgg, PairProbabilities) {
  RngStream rng(7, 0);
  const auto exact = rgg_pair_probs_exact(1.0);
  const auto est = rgg_pair_probs_mc(1.0, 20.0, 2000000, rng);
  EXPECT_NEAR(est.p1, exact.p1, 4.0 * est.se1);
  EXPECT_NEAR(est.p2, exact.p2, 4.0 * est.se2);
  const double phat2 = std::pow(std::numbers::pi, 2);
  EXPECT_LE(exact.p1, phat2);
  EXPECT_GT(exact.p2, phat2);
  EXPECT_LE(exact.p2, 3.0 * phat2);
  // p1 + p2 / 3 = P[two given pairs close] n^4 = phat^2
  EXPECT_NEAR(exact.p1 + exact.p2 / 3.0, phat2, 1e-12);

  const auto all = rgg_pair_probs_mc(10.0, 10.0, 10000, rng);
  EXPECT_DOUBLE_EQ(all.p1, 1e4);

  const auto a = rgg_pair_probs_mc(1.0, 20.0, 200000, rng);
  const auto b = rgg_pair_probs_mc(1.0, 20.0, 800000, rng);
  EXPECT_NEAR(a.se1 / b.se1, 2.0, 0.4);
}

TEST(Rgg, ExpectedTriangles) {
  RngStream rng(8, 0);
  const auto model = RggModel::create(20, 1.0);
  const int reps = 2000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double w = static_cast<double>(rgg_sample(model, rng).w[0]);
    s += w;
    s2 += w * w;
  }
  const double mean = s / reps;
  const double se = std::sqrt((s2 / reps - mean * mean) / reps);
  const double M = 400.0;
  const double expected = M * (M - 1) * (M - 2) / 6.0 * rgg_pair_probs_exact(1.0).p1 / std::pow(20.0, 4);
  EXPECT_NEAR(mean, expected, 4.0 * se);
}

Eigen::MatrixXd chain(double a, double b) {
  Eigen::MatrixXd P(2, 2);
  P << 1 - a, a, b, 1 - b;
  return P;
}

TEST(Markov, Validation) {
  Eigen::MatrixXd periodic(2, 2);
  periodic << 0, 1, 1, 0;
  EXPECT_THROW(MarkovModel::create(periodic, 0, 10), DomainError);
  Eigen::MatrixXd reducible(2, 2);
  reducible << 1, 0, 0.5, 0.5;
  EXPECT_THROW(MarkovModel::create(reducible, 0, 10), DomainError);
  EXPECT_THROW(MarkovModel::create(chain(0.2, 0.3) * 1.01, 0, 10), DomainError);
  Eigen::MatrixXd cyc3(3, 3);
  cyc3 << 0, 1, 0, 0, 0, 1, 0.5, 0, 0.5;
  const auto m = MarkovModel::create(cyc3, 0, 10);
  EXPECT_FALSE(m.satisfies_a1());
  EXPECT_TRUE(MarkovModel::create(chain(0.1, 0.2), 0, 5).satisfies_a1());
}

TEST(Markov, IidChain) {
  const auto m = mc_stationary_and_cov(MarkovModel::create(chain(0.5, 0.5), 0, 10));
  EXPECT_NEAR(m.pi[0], 0.5, 1e-15);
  EXPECT_NEAR(m.V(0, 0), 0.25, 1e-14);
  EXPECT_NEAR(m.rho, 0.0, 1e-12);
}

TEST(Markov, AsymmetricChain) {
  const auto model = MarkovModel::create(chain(0.1, 0.2), 0, 10);
  const auto m = mc_stationary_and_cov(model);
  EXPECT_NEAR(m.pi_full[0], 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(m.pi[0], 1.0 / 3.0, 1e-14);
  // pi0 pi1 (2 - a - b) / (a + b)
  EXPECT_NEAR(m.V(0, 0), 2.0 / 9.0 * 1.7 / 0.3, 1e-11);
  EXPECT_NEAR(m.rho, 0.7, 1e-12);
  EXPECT_LE(m.series_error, 1e-10);
}

TEST(Markov, SeriesMatchesFundamentalMatrix) {
  Eigen::MatrixXd P(4, 4);
  P << 0.5, 0.2, 0.2, 0.1,
       0.1, 0.6, 0.1, 0.2,
       0.3, 0.1, 0.4, 0.2,
       0.2, 0.3, 0.1, 0.4;
  const auto m = mc_stationary_and_cov(MarkovModel::create(P, 2, 10));
  const Eigen::MatrixXd Pi = Eigen::VectorXd::Ones(4) * m.pi_full.transpose();
  const Eigen::MatrixXd Z = (Eigen::MatrixXd::Identity(4, 4) - P + Pi).inverse();
  const Eigen::MatrixXd S = Z - Eigen::MatrixXd::Identity(4, 4);
  for (int i = 1; i < 4; ++i) {
    for (int r = 1; r < 4; ++r) {
      const double v = m.pi_full[i] * S(i, r) + m.pi_full[r] * S(r, i) + (i == r ? m.pi_full[i] : 0.0) -
                       m.pi_full[i] * m.pi_full[r];
      EXPECT_NEAR(m.V(i - 1, r - 1), v, 1e-11);
    }
  }
  EXPECT_NEAR((m.pi_full.transpose() * P - m.pi_full.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Markov, ExactPmfBasics) {
  Eigen::MatrixXd P(3, 3);
  P << 0.2, 0.5, 0.3, 0.4, 0.4, 0.2, 0.1, 0.1, 0.8;
  const auto model = MarkovModel::create(P, 0, 1);
  const auto one = mc_occupation_exact_pmf(model, 1, 0);
  EXPECT_DOUBLE_EQ(one.at({0, 0}), 0.2);
  EXPECT_DOUBLE_EQ(one.at({1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(one.at({0, 1}), 0.3);

  const auto bin = mc_occupation_exact_pmf(MarkovModel::create(chain(0.5, 0.5), 0, 12), 12, 0);
  for (int k = 0; k <= 12; ++k) {
    const double c = std::exp(std::lgamma(13.0) - std::lgamma(k + 1.0) - std::lgamma(13.0 - k)) / 4096.0;
    EXPECT_NEAR(bin.at({k}), c, 1e-15);
  }
  const auto big = mc_occupation_exact_pmf(MarkovModel::create(chain(0.3, 0.4), 1, 500), 500, 1);
  EXPECT_NEAR(big.total_mass(), 1.0, 1e-12);
  EXPECT_THROW(mc_occupation_exact_pmf(model, 10000, 0), BudgetError);
}

TEST(Markov, DpMatchesPathEnumeration) {
  Eigen::MatrixXd P(3, 3);
  P << 0.2, 0.5, 0.3, 0.4, 0.4, 0.2, 0.1, 0.1, 0.8;
  const auto model = MarkovModel::create(P, 2, 8);
  for (long n = 1; n <= 8; ++n) {
    PmfTable ref(2);
    long paths = 1;
    for (long t = 0; t < n; ++t) paths *= 3;
    for (long code = 0; code < paths; ++code) {
      long c = code;
      int state = 2;
      double p = 1.0;
      IntVec w{0, 0};
      for (long t = 0; t < n; ++t) {
        const int next = static_cast<int>(c % 3);
        c /= 3;
        p *= P(state, next);
        state = next;
        if (state > 0) ++w[static_cast<std::size_t>(state - 1)];
      }
      ref.add(w, p);
    }
    const auto dp = mc_occupation_exact_pmf(model, n, 2);
    EXPECT_LT(tv_tables(dp, ref).value, 1e-15) << n;
  }
}

TEST(Markov, AsymptoticVarianceMatchesDp) {
  const auto model = MarkovModel::create(chain(0.1, 0.2), 0, 2000);
  const auto m = mc_stationary_and_cov(model);
  const auto t = mc_occupation_exact_pmf(model, 2000, 0);
  const auto tm = table_moments(t);
  EXPECT_NEAR(tm.V(0, 0) / 2000.0 / m.V(0, 0), 1.0, 0.02);
}

TEST(Markov, SamplerAgreesWithDp) {
  const auto model = MarkovModel::create(chain(0.3, 0.3), 0, 100);
  const auto exact = mc_occupation_exact_pmf(model, 100, 0);
  RngStream rng(9, 0);
  std::vector<IntVec> draws;
  const int reps = 1000000;
  draws.reserve(reps);
  double s = 0.0;
  for (int i = 0; i < reps; ++i) {
    draws.push_back(mc_sample(model, rng).w);
    s += static_cast<double>(draws.back()[0]);
  }
  EXPECT_LE(tv_tables(PmfTable::from_samples(draws), exact).value, 0.02);
  const double var = table_moments(exact).V(0, 0);
  EXPECT_NEAR(s / reps, table_moments(exact).mu[0], 3.0 * std::sqrt(var / reps));

  // first step follows row P_start
  Eigen::MatrixXd P(3, 3);
  P << 0.2, 0.5, 0.3, 0.4, 0.4, 0.2, 0.1, 0.1, 0.8;
  const auto one = MarkovModel::create(P, 1, 1);
  int hits[3] = {0, 0, 0};
  for (int i = 0; i < 100000; ++i) {
    const auto w = mc_sample(one, rng).w;
    hits[w[0] ? 1 : (w[1] ? 2 : 0)]++;
  }
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(hits[k] / 1e5, P(1, k), 4.0 * std::sqrt(0.25 / 1e5));
}

TEST(MaxPoints, Validation) {
  EXPECT_THROW(MaxPointsModel::create(100.0, {{1.0, 0.5}}), DomainError);
  EXPECT_THROW(MaxPointsModel::create(100.0, {{0.0, 1.0}, {0.5, 2.0}}), DomainError);
  EXPECT_THROW(MaxPointsModel::create(0.0, {{0.0, 1.0}}), DomainError);
  EXPECT_NO_THROW(MaxPointsModel::create(100.0, {{0.0, 1.0}, {1.0, 2.0}}));
  EXPECT_THROW(MaxPointsModel::create(100.0, {{1.0, 1.0}}), DomainError);
  EXPECT_NO_THROW(MaxPointsModel::create(100.0, {{1.0, 1.0}}, true));
}

TEST(MaxPoints, EmptyAndSinglePoint) {
  const auto model = MaxPointsModel::create(100.0, {{0.0, 1.0}, {1.0, 2.0}});
  EXPECT_EQ(mp_count(model, {}).w, (IntVec{0, 0}));
  RngStream rng(1, 0);
  const auto tiny = MaxPointsModel::create(1e-12, {{0.0, 1.0}, {1.0, 2.0}});
  EXPECT_EQ(mp_sample(tiny, rng).w, (IntVec{0, 0}));
  // depth 0.05 -> scaled depth 0.5: strip 1
  const std::vector<Point2> one{{0.5, 0.45}};
  EXPECT_EQ(extract_maximal_points(one), (std::vector<std::size_t>{0}));
  EXPECT_EQ(mp_count(model, one).w, (IntVec{1, 0}));
  const std::vector<Point2> deeper{{0.5, 0.35}};
  EXPECT_EQ(mp_count(model, deeper).w, (IntVec{0, 1}));
}

TEST(MaxPoints, StripBoundaries) {
  const Strip s{1.0, 2.0};
  const double lambda = 100.0;
  // depth exactly b / sqrt(lambda) is outside, exactly d / sqrt(lambda) inside
  EXPECT_FALSE(in_strip({0.25, 0.65}, s, lambda));
  EXPECT_TRUE(in_strip({0.25, 0.55}, s, lambda));
  EXPECT_TRUE(in_strip({0.25, 0.60}, s, lambda));
  EXPECT_FALSE(in_strip({0.25, 0.54}, s, lambda));
}

TEST(MaxPoints, ExtractionMatchesBruteForce) {
  RngStream rng(2, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto pts = mp_points(600.0, rng);
    ASSERT_LE(pts.size(), 500u);
    std::vector<std::size_t> brute;
    for (std::size_t a = 0; a < pts.size(); ++a) {
      bool dominated = false;
      for (std::size_t b = 0; b < pts.size() && !dominated; ++b)
        dominated = b != a && pts[b].x >= pts[a].x && pts[b].y >= pts[a].y;
      if (!dominated) brute.push_back(a);
    }
    EXPECT_EQ(extract_maximal_points(pts), brute);
  }
}

TEST(MaxPoints, BandSamplingAgreesWithFullTriangle) {
  const auto model = MaxPointsModel::create(2000.0, {{0.0, 1.0}, {1.0, 2.0}});
  RngStream a(3, 0), b(3, 1);
  const int reps = 4000;
  double sa[2] = {0, 0}, sb[2] = {0, 0}, va[2] = {0, 0};
  for (int r = 0; r < reps; ++r) {
    const auto full = mp_count(model, mp_points(model.lambda, a)).w;
    const auto band = mp_sample(model, b).w;
    for (int i = 0; i < 2; ++i) {
      sa[i] += static_cast<double>(full[static_cast<std::size_t>(i)]);
      va[i] += std::pow(static_cast<double>(full[static_cast<std::size_t>(i)]), 2);
      sb[i] += static_cast<double>(band[static_cast<std::size_t>(i)]);
    }
  }
  for (int i = 0; i < 2; ++i) {
    const double var = va[i] / reps - std::pow(sa[i] / reps, 2);
    EXPECT_NEAR(sa[i] / reps, sb[i] / reps, 4.0 * std::sqrt(2.0 * var / reps));
  }
}

TEST(MaxPoints, AsymptoticConstants) {
  const auto model = MaxPointsModel::create(1e4, {{0.0, 1.0}, {1.0, 2.0}});
  const auto a = mp_moments_asymptotic(model);
  // sqrt(2 pi) (Phi(1) - 1/2)
  EXPECT_NEAR(a.m_hat[0], 0.85562439189214880317, 1e-13);
  EXPECT_NEAR(a.mean[0], 85.562439189214880317, 1e-11);
  EXPECT_LE(a.quadrature_error, 1e-8);
  const auto empty = mp_moments_asymptotic(MaxPointsModel::create(1e4, {{1.0, 1.0}}, true));
  EXPECT_EQ(empty.m_hat[0], 0.0);
  EXPECT_NEAR(empty.sigma(0, 0), 0.0, 1e-15);
}

TEST(MaxPoints, AsymptoticConstantsAgainstQuadratureOracle) {
  // Values from an independent nested quadrature (scipy, integration order as
  // displayed): m2, sigma11, sigma22, sigma12 at strips (0,1), (1,2).
  const auto a = mp_moments_asymptotic(MaxPointsModel::create(1e4, {{0.0, 1.0}, {1.0, 2.0}}));
  EXPECT_NEAR(a.m_hat[1], 0.340663621, 1e-8);
  EXPECT_NEAR(a.sigma(0, 0), 0.637563313, 1e-8);
  EXPECT_NEAR(a.sigma(1, 1), 0.410015348, 1e-8);
  EXPECT_NEAR(a.sigma(0, 1), -0.246494422, 1e-8);
}

TEST(MaxPoints, CrossTermAgainstMonteCarloIntegration) {
  // 2 m2 int_{b1}^{d1} phi(z) int_0^z 1/phi(y) dy dz by uniform sampling of
  // (z, y) over [0, 1]^2 restricted to y < z.
  const auto a = mp_moments_asymptotic(MaxPointsModel::create(1e4, {{0.0, 1.0}, {1.0, 2.0}}));
  const double m1 = a.m_hat[0], m2 = a.m_hat[1];
  auto phi = [](double x) { return std::exp(-0.5 * x * x); };
  RngStream rng(4, 0);
  const int n = 2000000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.uniform();
    const double y = rng.uniform();
    const double f = y < z ? phi(z) / phi(y) : 0.0;
    s += f;
    s2 += f * f;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  const double tail = m1 * (phi(1.0) - phi(2.0)) + m2 * (phi(0.0) - phi(1.0));
  const double mc = 2.0 * m2 * mean - tail;
  EXPECT_NEAR(a.sigma(0, 1), mc, 3.0 * 2.0 * m2 * se);
}

TEST(MaxPoints, TouchingStripsAllowed) {
  const auto model = MaxPointsModel::create(1e4, {{0.0, 0.5}, {0.5, 1.5}});
  const auto a = mp_moments_asymptotic(model);
  EXPECT_LT(a.sigma(0, 1), 0.0);
  EXPECT_GT(a.sigma.determinant(), 0.0);
}

}  // namespace
}  // namespace dnapprox
