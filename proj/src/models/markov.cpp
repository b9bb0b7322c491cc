#include "dnapprox/models/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <Eigen/Eigenvalues>

#include "dnapprox/errors.hpp"

namespace dnapprox {

namespace {

// Period of an irreducible chain: gcd of level differences along edges of a
// BFS tree.
int period(const Eigen::MatrixXd& P) {
  const auto s = static_cast<int>(P.rows());
  std::vector<int> level(static_cast<std::size_t>(s), -1);
  std::queue<int> q;
  level[0] = 0;
  q.push(0);
  int g = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v = 0; v < s; ++v) {
      if (P(u, v) <= 0.0) continue;
      if (level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      } else {
        g = std::gcd(g, std::abs(level[static_cast<std::size_t>(u)] + 1 - level[static_cast<std::size_t>(v)]));
      }
    }
  }
  return g;
}

bool reaches_all(const Eigen::MatrixXd& P, bool transpose) {
  const auto s = static_cast<int>(P.rows());
  std::vector<char> seen(static_cast<std::size_t>(s), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < s; ++v) {
      const double p = transpose ? P(v, u) : P(u, v);
      if (p > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace

MarkovModel MarkovModel::create(Eigen::MatrixXd P, int start, long n) {
  if (P.rows() < 2 || P.rows() != P.cols()) throw DomainError("MarkovModel: P must be square with at least 2 states");
  if ((P.array() < 0.0).any()) throw DomainError("MarkovModel: negative transition probability");
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if (std::abs(P.row(i).sum() - 1.0) > 1e-12) throw DomainError("MarkovModel: rows must sum to 1");
  }
  if (start < 0 || start >= P.rows()) throw DomainError("MarkovModel: start state out of range");
  if (n < 1) throw DomainError("MarkovModel: horizon must be positive");
  if (!reaches_all(P, false) || !reaches_all(P, true)) throw DomainError("MarkovModel: chain is reducible");
  if (period(P) != 1) throw DomainError("MarkovModel: chain is periodic");
  return MarkovModel(std::move(P), start, n);
}

bool MarkovModel::satisfies_a1() const { return (P_.diagonal().array() > 0.0).all(); }

MarkovMoments mc_stationary_and_cov(const MarkovModel& model, double tol) {
  const Eigen::MatrixXd& P = model.P();
  const auto s = P.rows();
  const int d = model.dim();
  MarkovMoments out;

  // pi (P - I) = 0 with one equation replaced by sum(pi) = 1.
  Eigen::MatrixXd A = (P - Eigen::MatrixXd::Identity(s, s)).transpose();
  A.row(s - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s);
  rhs[s - 1] = 1.0;
  out.pi_full = A.fullPivLu().solve(rhs);
  out.pi = out.pi_full.tail(d);

  Eigen::EigenSolver<Eigen::MatrixXd> eig(P, false);
  std::vector<double> mods;
  for (Eigen::Index i = 0; i < s; ++i) mods.push_back(std::abs(eig.eigenvalues()[i]));
  std::sort(mods.begin(), mods.end(), std::greater<>());
  out.rho = mods.size() > 1 ? mods[1] : 0.0;

  const Eigen::MatrixXd Pi = Eigen::VectorXd::Ones(s) * out.pi_full.transpose();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(s, s);
  Eigen::MatrixXd Pk = P;
  const double stop = tol * (1.0 - out.rho);
  const long max_terms = 1000000;
  double C = 0.0;
  for (long k = 1;; ++k) {
    const Eigen::MatrixXd dev = Pk - Pi;
    const double dmax = dev.cwiseAbs().maxCoeff();
    if (out.rho > 0.0 && dmax > 0.0) C = std::max(C, dmax / std::pow(out.rho, static_cast<double>(k)));
    S += dev;
    out.terms = k;
    if (dmax < stop) {
      out.series_error = out.rho > 0.0 ? C * std::pow(out.rho, static_cast<double>(k)) / (1.0 - out.rho) : 0.0;
      break;
    }
    if (k == max_terms) throw AccuracyError("mc_stationary_and_cov: series did not converge", 0.0, dmax);
    Pk = Pk * P;
  }
  out.C = out.rho > 0.0 ? C : 0.0;

  out.V.resize(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const auto i = a + 1;
      const auto r = b + 1;
      out.V(a, b) = out.pi_full[i] * S(i, r) + out.pi_full[r] * S(r, i) + (a == b ? out.pi_full[i] : 0.0) -
                    out.pi_full[i] * out.pi_full[r];
    }
  }
  out.V = 0.5 * (out.V + out.V.transpose());
  return out;
}

PmfTable mc_occupation_exact_pmf(const MarkovModel& model, long n, int start, double budget) {
  const int d = model.dim();
  const auto states = static_cast<int>(model.P().rows());
  if (n < 0) throw DomainError("mc_occupation_exact_pmf: negative horizon");
  if (start < 0 || start >= states) throw DomainError("mc_occupation_exact_pmf: start state out of range");
  const double cells = std::pow(static_cast<double>(n + 1), d) * states;
  if (cells > budget) throw BudgetError("mc_occupation_exact_pmf: table exceeds the DP budget");

  const auto side = static_cast<std::size_t>(n + 1);
  std::size_t occ = 1;
  std::vector<std::size_t> stride(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] = occ;
    occ *= side;
  }
  // prob[state * occ + flat occupation]
  std::vector<double> cur(static_cast<std::size_t>(states) * occ, 0.0);
  std::vector<double> next(cur.size(), 0.0);
  cur[static_cast<std::size_t>(start) * occ] = 1.0;
  const Eigen::MatrixXd& P = model.P();
  // Occupation vectors after t steps have coordinate sum <= t; flat index
  // ranges are scanned fully but skipped when zero.
  for (long t = 0; t < n; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int u = 0; u < states; ++u) {
      const double* src = cur.data() + static_cast<std::size_t>(u) * occ;
      for (std::size_t idx = 0; idx < occ; ++idx) {
        const double p = src[idx];
        if (p == 0.0) continue;
        for (int v = 0; v < states; ++v) {
          const double q = P(u, v);
          if (q == 0.0) continue;
          const std::size_t to = v == 0 ? idx : idx + stride[static_cast<std::size_t>(v - 1)];
          next[static_cast<std::size_t>(v) * occ + to] += p * q;
        }
      }
    }
    std::swap(cur, next);
  }

  PmfTable out(d);
  IntVec z(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < occ; ++idx) {
    double p = 0.0;
    for (int u = 0; u < states; ++u) p += cur[static_cast<std::size_t>(u) * occ + idx];
    if (p == 0.0) continue;
    std::size_t rem = idx;
    for (int i = 0; i < d; ++i) {
      z[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rem / stride[static_cast<std::size_t>(i)]);
      rem %= stride[static_cast<std::size_t>(i)];
    }
    out.add(z, p);
  }
  return out;
}

ModelSample mc_sample(const MarkovModel& model, RngStream& rng) {
  const Eigen::MatrixXd& P = model.P();
  const auto states = static_cast<int>(P.rows());
  ModelSample s;
  s.w.assign(static_cast<std::size_t>(model.dim()), 0);
  int state = model.start();
  for (long t = 0; t < model.n(); ++t) {
    double u = rng.uniform();
    int v = 0;
    while (v + 1 < states && u >= P(state, v)) u -= P(state, v++);
    state = v;
    if (state > 0) ++s.w[static_cast<std::size_t>(state - 1)];
  }
  return s;
}

}  // namespace dnapprox
