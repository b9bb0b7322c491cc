#include "dnapprox/stein_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "dnapprox/errors.hpp"

namespace dnapprox {

SteinContext context_from_moments(const Eigen::VectorXd& mu, const Eigen::MatrixXd& V, double gamma) {
  const auto d = mu.size();
  if (d < 1 || V.rows() != d || V.cols() != d) throw DomainError("context_from_moments: dimension mismatch");
  if (!(gamma >= 1.0)) throw DomainError("context_from_moments: gamma must be at least 1");
  const double scale = V.cwiseAbs().maxCoeff();
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("context_from_moments: V not symmetric");
  }
  const double trace = V.trace();
  if (!(trace > 0.0)) throw DomainError("context_from_moments: V must have positive trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmin < -1e-10 * lmax) throw DomainError("context_from_moments: V not positive semidefinite");

  SteinContext ctx;
  ctx.mu = mu;
  ctx.V = V;
  const double per_coord = trace / static_cast<double>(d);
  ctx.m = std::max(1L, static_cast<long>(std::ceil(per_coord * (1.0 - 1e-12))));
  ctx.c = mu / static_cast<double>(ctx.m);
  ctx.Sigma = V / static_cast<double>(ctx.m);
  ctx.cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  ctx.gamma = gamma;
  return ctx;
}

double apply_stein_operator(const SteinContext& ctx, const LatticeFunction& h, const IntVec& z) {
  const int d = ctx.dim();
  if (static_cast<int>(z.size()) != d) throw DomainError("apply_stein_operator: dimension mismatch");
  const double h0 = h(z);
  std::vector<double> h1(static_cast<std::size_t>(d));
  IntVec y = z;
  for (int i = 0; i < d; ++i) {
    ++y[static_cast<std::size_t>(i)];
    h1[static_cast<std::size_t>(i)] = h(y);
    --y[static_cast<std::size_t>(i)];
  }
  const double m = static_cast<double>(ctx.m);
  double second = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double s = ctx.Sigma(i, k);
      if (s == 0.0) continue;
      ++y[static_cast<std::size_t>(i)];
      ++y[static_cast<std::size_t>(k)];
      const double d2 = h(y) - h1[static_cast<std::size_t>(i)] - h1[static_cast<std::size_t>(k)] + h0;
      --y[static_cast<std::size_t>(i)];
      --y[static_cast<std::size_t>(k)];
      second += s * d2;
    }
  }
  double drift = 0.0;
  for (int i = 0; i < d; ++i) {
    const double centred = static_cast<double>(z[static_cast<std::size_t>(i)]) - m * ctx.c[i];
    drift += centred * (h1[static_cast<std::size_t>(i)] - h0);
  }
  return m * second - drift;
}

FunctionalModel::FunctionalModel(IntersectionGraph graph, Eigen::MatrixXd means, Sampler sampler)
    : graph_(std::move(graph)), means_(std::move(means)), sampler_(std::move(sampler)) {
  if (means_.rows() != graph_.size() || means_.cols() < 1) {
    throw DomainError("FunctionalModel: one mean row per summand required");
  }
}

namespace {

constexpr int kBatches = 10;

struct PairIndex {
  // Flattened (j, k) pairs with k in {j} ∪ N_j, and for each pair the summands
  // making up Z^(j,k).
  std::vector<int> offset;
  std::vector<int> k;
  std::vector<std::vector<int>> zjk;
};

PairIndex pair_index(const IntersectionGraph& g) {
  PairIndex p;
  const int n = g.size();
  std::vector<char> near(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    p.offset.push_back(static_cast<int>(p.k.size()));
    near[static_cast<std::size_t>(j)] = 1;
    for (int l : g.neighbors(j)) near[static_cast<std::size_t>(l)] = 1;
    p.k.push_back(j);
    p.zjk.emplace_back();
    for (int k : g.neighbors(j)) {
      p.k.push_back(k);
      std::vector<int> z;
      for (int l : g.neighbors(k)) {
        if (!near[static_cast<std::size_t>(l)]) z.push_back(l);
      }
      p.zjk.push_back(std::move(z));
    }
    near[static_cast<std::size_t>(j)] = 0;
    for (int l : g.neighbors(j)) near[static_cast<std::size_t>(l)] = 0;
  }
  p.offset.push_back(static_cast<int>(p.k.size()));
  return p;
}

// Per-batch running sums of every expectation the H's need.
struct Accumulator {
  std::vector<double> x_norm;       // |X^(j)|
  std::vector<double> z_norm;       // |Z^(j)|
  std::vector<double> z_norm2;      // |Z^(j)|^2
  std::vector<double> az2;          // a_j |Z^(j)|^2
  std::vector<double> ax;           // a_j |X^(k)|
  std::vector<double> axz;          // a_j |X^(k)| |Z^(j,k)|
  std::vector<double> zjk_norm;     // |Z^(j,k)|
  std::vector<double> zjk_norm2;    // |Z^(j,k)|^2
  int count = 0;

  Accumulator(std::size_t n, std::size_t pairs)
      : x_norm(n), z_norm(n), z_norm2(n), az2(n), ax(pairs), axz(pairs), zjk_norm(pairs), zjk_norm2(pairs) {}
};

struct HValues {
  double h0, h1, h21, h22, h23, h24;
};

HValues h_values(const Accumulator& a, const PairIndex& p, int d, long m) {
  const double c = static_cast<double>(a.count);
  const double dm = static_cast<double>(m);
  const double d12 = std::sqrt(static_cast<double>(d));
  HValues h{0, 0, 0, 0, 0, 0};
  const std::size_t n = a.x_norm.size();
  for (std::size_t j = 0; j < n; ++j) {
    h.h0 += a.x_norm[j] / c;
    h.h21 += a.az2[j] / c;
    const double ez = a.z_norm[j] / c;
    for (int q = p.offset[j]; q < p.offset[j + 1]; ++q) {
      const auto u = static_cast<std::size_t>(q);
      const double eax = a.ax[u] / c;
      h.h1 += eax;
      h.h22 += a.axz[u] / c;
      h.h23 += eax * a.zjk_norm[u] / c;
      h.h24 += eax * ez;
    }
  }
  const double d32 = d12 * d12 * d12;
  h.h0 /= d12 * dm;
  h.h1 /= static_cast<double>(d) * dm;
  h.h21 /= d32 * dm;
  h.h22 /= d32 * dm;
  h.h23 /= d32 * dm;
  h.h24 /= d32 * dm;
  return h;
}

double batch_se(const std::vector<double>& v) {
  const double b = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x / b;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (b * (b - 1.0)));
}

}  // namespace

MomentSums moment_sums_mc(const DecomposableModel& model, long m, int reps, const RngStream& rng) {
  if (reps < 100) throw DomainError("moment_sums_mc: at least 100 replicates required");
  if (m < 1) throw DomainError("moment_sums_mc: m must be positive");
  const auto& g = model.dependency_graph();
  const int d = model.dim();
  const int n = g.size();
  const Eigen::MatrixXd means = model.summand_means();
  if (means.rows() != n || means.cols() != d) throw DomainError("moment_sums_mc: model without decompositions");
  const PairIndex p = pair_index(g);
  const std::size_t pairs = p.k.size();
  std::vector<double> mu_norm(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) mu_norm[static_cast<std::size_t>(j)] = means.row(j).norm();

  std::vector<Accumulator> batches(kBatches, Accumulator(static_cast<std::size_t>(n), pairs));
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd z(d);
  std::vector<double> xn(static_cast<std::size_t>(n));
  for (int r = 0; r < reps; ++r) {
    RngStream stream = rng.split(static_cast<std::uint64_t>(r));
    x.setZero();
    model.sample_summands(stream, x);
    auto& acc = batches[static_cast<std::size_t>(r % kBatches)];
    ++acc.count;
    for (int j = 0; j < n; ++j) xn[static_cast<std::size_t>(j)] = x.row(j).norm();
    for (int j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double a = xn[uj] + mu_norm[uj];
      z = x.row(j).transpose();
      for (int l : g.neighbors(j)) z += x.row(l).transpose();
      const double z2 = z.squaredNorm();
      acc.x_norm[uj] += xn[uj];
      acc.z_norm[uj] += std::sqrt(z2);
      acc.z_norm2[uj] += z2;
      acc.az2[uj] += a * z2;
      for (int q = p.offset[uj]; q < p.offset[uj + 1]; ++q) {
        const auto u = static_cast<std::size_t>(q);
        const double axk = a * xn[static_cast<std::size_t>(p.k[u])];
        z.setZero();
        for (int l : p.zjk[u]) z += x.row(l).transpose();
        const double w2 = z.squaredNorm();
        const double w = std::sqrt(w2);
        acc.ax[u] += axk;
        acc.axz[u] += axk * w;
        acc.zjk_norm[u] += w;
        acc.zjk_norm2[u] += w2;
      }
    }
  }

  Accumulator total(static_cast<std::size_t>(n), pairs);
  for (const auto& b : batches) {
    total.count += b.count;
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
      total.x_norm[j] += b.x_norm[j];
      total.z_norm[j] += b.z_norm[j];
      total.z_norm2[j] += b.z_norm2[j];
      total.az2[j] += b.az2[j];
    }
    for (std::size_t u = 0; u < pairs; ++u) {
      total.ax[u] += b.ax[u];
      total.axz[u] += b.axz[u];
      total.zjk_norm[u] += b.zjk_norm[u];
      total.zjk_norm2[u] += b.zjk_norm2[u];
    }
  }

  MomentSums out;
  out.reps = reps;
  const HValues h = h_values(total, p, d, m);
  out.H0 = h.h0;
  out.H1 = h.h1;
  out.H21 = h.h21;
  out.H22 = h.h22;
  out.H23 = h.h23;
  out.H24 = h.h24;
  out.H2 = std::max({h.h21, h.h22, h.h23, h.h24});

  std::vector<double> b0, b1, b21, b22, b23, b24, b2;
  for (const auto& b : batches) {
    const HValues hb = h_values(b, p, d, m);
    b0.push_back(hb.h0);
    b1.push_back(hb.h1);
    b21.push_back(hb.h21);
    b22.push_back(hb.h22);
    b23.push_back(hb.h23);
    b24.push_back(hb.h24);
    b2.push_back(std::max({hb.h21, hb.h22, hb.h23, hb.h24}));
  }
  out.se_H0 = batch_se(b0);
  out.se_H1 = batch_se(b1);
  out.se_H21 = batch_se(b21);
  out.se_H22 = batch_se(b22);
  out.se_H23 = batch_se(b23);
  out.se_H24 = batch_se(b24);
  out.se_H2 = batch_se(b2);

  const double dm = static_cast<double>(d) * static_cast<double>(m);
  const double c = static_cast<double>(total.count);
  auto check = [&](double second_moment) {
    const double ratio = second_moment / c / dm;
    out.max_zhat_ratio = std::max(out.max_zhat_ratio, ratio);
    if (ratio > 1.0) ++out.zhat_violations;
  };
  for (double v : total.z_norm2) check(v);
  for (std::size_t u = 0; u < pairs; ++u) {
    if (!p.zjk[u].empty()) check(total.zjk_norm2[u]);
  }
  return out;
}

double third_moment_gamma_mc(const DecomposableModel& model, int reps, const RngStream& rng) {
  if (reps < 1) throw DomainError("third_moment_gamma_mc: reps must be positive");
  const int n = model.dependency_graph().size();
  const int d = model.dim();
  std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
  Eigen::MatrixXd x(n, d);
  for (int r = 0; r < reps; ++r) {
    RngStream stream = rng.split(static_cast<std::uint64_t>(r));
    x.setZero();
    model.sample_summands(stream, x);
    for (int j = 0; j < n; ++j) sums[static_cast<std::size_t>(j)] += std::pow(x.row(j).norm(), 3);
  }
  const double best = *std::max_element(sums.begin(), sums.end());
  return best / reps / std::pow(static_cast<double>(d), 1.5);
}

double mineka_smoothness_bound(double T, double eta) {
  if (!(T > 0.0)) throw DomainError("mineka_smoothness_bound: T must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("mineka_smoothness_bound: eta must be a probability");
  return std::clamp(std::sqrt(2.0 / (std::numbers::pi * T)) + eta, 0.0, 1.0);
}

namespace {

struct IntVecHash {
  std::size_t operator()(const IntVec& z) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : z) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

TvEstimate empirical_shift_tv(const std::function<IntVec(RngStream&)>& sampler, int direction, std::size_t reps,
                              const RngStream& rng, int bootstrap_resamples) {
  if (reps < kMinEmpiricalSamples) throw DomainError("empirical_shift_tv: too few samples");
  RngStream draws = rng.split(0);
  std::unordered_map<IntVec, std::size_t, IntVecHash> counts;
  int dim = -1;
  for (std::size_t i = 0; i < reps; ++i) {
    IntVec z = sampler(draws);
    if (dim < 0) dim = static_cast<int>(z.size());
    if (static_cast<int>(z.size()) != dim) throw DomainError("empirical_shift_tv: inconsistent dimension");
    ++counts[std::move(z)];
  }
  if (direction < 0 || direction >= dim) throw DomainError("empirical_shift_tv: direction out of range");
  PmfTable table(dim);
  for (const auto& [z, c] : counts) table.add(z, static_cast<double>(c) / static_cast<double>(reps));
  TvEstimate est;
  est.value = tv_unit_shift(table, direction);
  if (bootstrap_resamples > 0) {
    est.mc_std_error = bootstrap_std_error(table, reps, bootstrap_resamples, rng.split(1),
                                           [direction](const PmfTable& t) { return tv_unit_shift(t, direction); });
  }
  return est;
}

BoundBreakdown corollary_bound(int d, double m, double dbar2, double gamma, double eps_w) {
  if (d < 1) throw DomainError("corollary_bound: d must be positive");
  if (!(m >= 2.0)) throw DomainError("corollary_bound: m must be at least 2");
  if (!(eps_w >= 0.0 && eps_w <= 1.0)) throw DomainError("corollary_bound: eps_w must lie in [0, 1]");
  if (!(dbar2 >= 0.0) || !(gamma >= 0.0)) throw DomainError("corollary_bound: negative input");
  BoundBreakdown b;
  b.d = d;
  b.m = m;
  b.dbar2 = dbar2;
  b.gamma = gamma;
  b.eps_w = eps_w;
  const double dd = static_cast<double>(d);
  const double lead = dd * dd * dd * std::log(m);
  const double bracket = dd + 3.0 * gamma * dbar2;
  b.eps_w_term = lead * eps_w * bracket;
  b.msqrt_term = lead * bracket / std::sqrt(m);
  b.combined = lead * (1.0 / std::sqrt(m) + eps_w) * bracket;
  return b;
}

BoundBreakdown corollary_bound(const SteinContext& ctx, const NeighborhoodStats& stats, double eps_w) {
  return corollary_bound(ctx.dim(), static_cast<double>(ctx.m), stats.dbar2, ctx.gamma, eps_w);
}

std::vector<int> smoothness_exclusion_set(const IntersectionGraph& graph, int j, int k) {
  if (j == k || !graph.adjacent(j, k)) throw DomainError("smoothness_exclusion_set: need j != k with j ~ k");
  std::vector<int> out;
  for (int src : {j, k}) {
    for (int jp : graph.neighbors(src)) {
      const auto& s = graph.subset(jp);
      out.insert(out.end(), s.begin(), s.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> greedy_disjoint_family(const IntersectionGraph& graph, const std::vector<int>& excluded) {
  std::vector<char> skip(static_cast<std::size_t>(graph.universe()), 0);
  for (int l : excluded) {
    if (l < 0 || l >= graph.universe()) throw DomainError("greedy_disjoint_family: excluded index out of range");
    skip[static_cast<std::size_t>(l)] = 1;
  }
  std::vector<char> used(static_cast<std::size_t>(graph.size()), 0);
  std::vector<int> out;
  for (int l = 0; l < graph.universe(); ++l) {
    if (skip[static_cast<std::size_t>(l)]) continue;
    const auto& L = graph.summands_containing(l);
    if (std::any_of(L.begin(), L.end(), [&](int j) { return used[static_cast<std::size_t>(j)] != 0; })) continue;
    for (int j : L) used[static_cast<std::size_t>(j)] = 1;
    out.push_back(l);
  }
  return out;
}

double delta0(double cond) {
  if (!(cond >= 1.0)) throw DomainError("delta0: condition number must be at least 1");
  return std::pow(cond, -1.5) / 72.0;
}

std::vector<TestFunction> stein_test_battery(const SteinContext& ctx) {
  std::vector<TestFunction> out;
  const int d = ctx.dim();
  for (int i = 0; i < d; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const auto centre = static_cast<std::int64_t>(std::llround(ctx.mu[i]));
    const double clip = std::ceil(std::sqrt(std::max(ctx.V(i, i), 1.0)));
    const std::string idx = std::to_string(i);
    out.push_back({"coord" + idx, [u](const IntVec& z) { return static_cast<double>(z[u]); }});
    out.push_back({"square" + idx, [u, centre](const IntVec& z) {
                     const double v = static_cast<double>(z[u] - centre);
                     return v * v;
                   }});
    out.push_back({"clipped" + idx, [u, centre, clip](const IntVec& z) {
                     return std::clamp(static_cast<double>(z[u] - centre), -clip, clip);
                   }});
    out.push_back({"below" + idx, [u, centre](const IntVec& z) { return z[u] <= centre ? 1.0 : 0.0; }});
  }
  for (int i = 0; i + 1 < d; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const auto c0 = static_cast<std::int64_t>(std::llround(ctx.mu[i]));
    const auto c1 = static_cast<std::int64_t>(std::llround(ctx.mu[i + 1]));
    out.push_back({"cross" + std::to_string(i), [u, c0, c1](const IntVec& z) {
                     return static_cast<double>(z[u] - c0) * static_cast<double>(z[u + 1] - c1);
                   }});
  }
  return out;
}

}  // namespace dnapprox
