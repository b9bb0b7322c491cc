#include "dnapprox/models/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "dnapprox/errors.hpp"

namespace dnapprox {

ColoringModel::ColoringModel(int vertices, std::vector<Edge> edges, Eigen::VectorXd pi, std::optional<double> p,
                             IntersectionGraph graph)
    : vertices_(vertices),
      edges_(std::move(edges)),
      pi_(std::move(pi)),
      thinning_p_(p),
      graph_(std::move(graph)) {}

ColoringModel ColoringModel::create(int vertices, std::vector<Edge> edges, Eigen::VectorXd pi,
                                    std::optional<double> thinning_p) {
  if (vertices < 2) throw DomainError("ColoringModel: need at least two vertices");
  if (edges.empty()) throw DomainError("ColoringModel: graph has no edges");
  if (pi.size() < 1) throw DomainError("ColoringModel: no colours");
  if ((pi.array() < 0.0).any() || std::abs(pi.sum() - 1.0) > 1e-12) {
    throw DomainError("ColoringModel: pi must be a probability vector");
  }
  if (thinning_p && !(*thinning_p >= 0.0 && *thinning_p <= 1.0)) {
    throw DomainError("ColoringModel: thinning probability outside [0, 1]");
  }
  std::set<Edge> seen;
  std::vector<std::vector<int>> subsets;
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertices || b >= vertices) throw DomainError("ColoringModel: vertex out of range");
    if (a == b) throw DomainError("ColoringModel: loops are not allowed");
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
      throw DomainError("ColoringModel: repeated edge");
    }
    subsets.push_back({a, b});
  }
  auto graph = IntersectionGraph::build(std::move(subsets), vertices);
  return ColoringModel(vertices, std::move(edges), std::move(pi), thinning_p, std::move(graph));
}

ColoringModel ColoringModel::cycle(int vertices, Eigen::VectorXd pi, std::optional<double> thinning_p) {
  if (vertices < 3) throw DomainError("ColoringModel::cycle: need at least three vertices");
  std::vector<Edge> edges;
  for (int v = 0; v < vertices; ++v) edges.emplace_back(v, (v + 1) % vertices);
  return create(vertices, std::move(edges), std::move(pi), thinning_p);
}

int ColoringModel::max_degree() const {
  std::vector<int> deg(static_cast<std::size_t>(vertices_), 0);
  for (const auto& [a, b] : edges_) {
    ++deg[static_cast<std::size_t>(a)];
    ++deg[static_cast<std::size_t>(b)];
  }
  return *std::max_element(deg.begin(), deg.end());
}

Eigen::MatrixXd ColoringModel::summand_means() const {
  const double p = thinning_p_.value_or(1.0);
  const Eigen::RowVectorXd row = p * pi_.array().square().matrix().transpose();
  return row.replicate(edge_count(), 1);
}

namespace {

std::vector<int> draw_colours(const ColoringModel& model, RngStream& rng) {
  const auto& pi = model.pi();
  std::vector<int> colour(static_cast<std::size_t>(model.vertices()));
  for (auto& c : colour) {
    double u = rng.uniform();
    int i = 0;
    while (i + 1 < pi.size() && u >= pi[i]) u -= pi[i++];
    c = i;
  }
  return colour;
}

}  // namespace

void ColoringModel::sample_summands(RngStream& rng, Eigen::MatrixXd& x) const {
  x.setZero(edge_count(), dim());
  const auto colour = draw_colours(*this, rng);
  for (int j = 0; j < edge_count(); ++j) {
    const auto [a, b] = edges_[static_cast<std::size_t>(j)];
    const int ca = colour[static_cast<std::size_t>(a)];
    if (ca != colour[static_cast<std::size_t>(b)]) continue;
    if (thinning_p_ && !(rng.uniform() < *thinning_p_)) continue;
    x(j, ca) = 1.0;
  }
}

double gc_mean_neighbours(const ColoringModel& model) {
  long long total = 0;
  const auto& g = model.dependency_graph();
  for (int j = 0; j < g.size(); ++j) total += static_cast<long long>(g.neighbors(j).size());
  return static_cast<double>(total) / model.edge_count();
}

Moments gc_moments(const ColoringModel& model) {
  const int d = model.dim();
  const double n = model.edge_count();
  const double dt = gc_mean_neighbours(model);
  const double p = model.thinning_p().value_or(1.0);
  const auto& pi = model.pi();
  Moments out;
  out.mu = n * p * pi.array().square().matrix();
  out.V.resize(d, d);
  for (int i = 0; i < d; ++i) {
    const double p2 = pi[i] * pi[i];
    for (int k = 0; k < d; ++k) {
      if (i == k) {
        out.V(i, i) = n * (p * p2 * (1.0 - p * p2) + dt * p * p * p2 * pi[i] * (1.0 - pi[i]));
      } else {
        out.V(i, k) = -n * p * p * p2 * pi[k] * pi[k] * (1.0 + dt);
      }
    }
  }
  return out;
}

ModelSample gc_sample(const ColoringModel& model, RngStream& rng, bool with_summands) {
  Eigen::MatrixXd x;
  model.sample_summands(rng, x);
  ModelSample s;
  s.w.assign(static_cast<std::size_t>(model.dim()), 0);
  for (int i = 0; i < model.dim(); ++i) s.w[static_cast<std::size_t>(i)] = std::llround(x.col(i).sum());
  if (with_summands) s.summands = std::move(x);
  return s;
}

namespace {

struct IntVecHash {
  std::size_t operator()(const IntVec& z) const noexcept {
    std::size_t h = 0;
    for (auto v : z) h = h * 1000003u + static_cast<std::size_t>(v);
    return h;
  }
};

}  // namespace

PmfTable gc_exact_pmf(const ColoringModel& model) {
  const int d = model.dim();
  const int M = model.vertices();
  if (static_cast<double>(M) * std::log(static_cast<double>(d)) > std::log(kColoringEnumerationBudget)) {
    throw BudgetError("gc_exact_pmf: d^M exceeds the enumeration budget");
  }
  const auto& pi = model.pi();
  std::unordered_map<IntVec, double, IntVecHash> acc;
  std::vector<int> colour(static_cast<std::size_t>(M), 0);
  IntVec w(static_cast<std::size_t>(d));
  while (true) {
    double weight = 1.0;
    for (int c : colour) weight *= pi[c];
    if (weight > 0.0) {
      std::fill(w.begin(), w.end(), 0);
      for (const auto& [a, b] : model.edges()) {
        const int ca = colour[static_cast<std::size_t>(a)];
        if (ca == colour[static_cast<std::size_t>(b)]) ++w[static_cast<std::size_t>(ca)];
      }
      acc[w] += weight;
    }
    int v = M - 1;
    while (v >= 0 && colour[static_cast<std::size_t>(v)] == d - 1) colour[static_cast<std::size_t>(v--)] = 0;
    if (v < 0) break;
    ++colour[static_cast<std::size_t>(v)];
  }

  PmfTable out(d);
  if (!model.thinning_p()) {
    for (const auto& [z, p] : acc) out.add(z, p);
    return out;
  }
  // Conditionally on the colouring, the kept counts are independent
  // Binomial(W_i, p).
  const double p = *model.thinning_p();
  for (const auto& [z, weight] : acc) {
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const auto n = z[static_cast<std::size_t>(i)];
      auto& m = marg[static_cast<std::size_t>(i)];
      m.assign(static_cast<std::size_t>(n + 1), 0.0);
      for (std::int64_t k = 0; k <= n; ++k) {
        m[static_cast<std::size_t>(k)] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                                  std::lgamma(static_cast<double>(n - k) + 1.0)) *
                                         std::pow(p, static_cast<double>(k)) *
                                         std::pow(1.0 - p, static_cast<double>(n - k));
      }
    }
    IntVec k(static_cast<std::size_t>(d), 0);
    while (true) {
      double q = weight;
      for (int i = 0; i < d; ++i) q *= marg[static_cast<std::size_t>(i)][static_cast<std::size_t>(k[static_cast<std::size_t>(i)])];
      if (q > 0.0) out.add(k, q);
      int i = d - 1;
      while (i >= 0 && k[static_cast<std::size_t>(i)] == z[static_cast<std::size_t>(i)]) k[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
      ++k[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

double gc_mineka_epsilon(const ColoringModel& model) {
  if (model.thinning_p()) throw DomainError("gc_mineka_epsilon: the vertex recipe covers the unthinned model only");
  const int d = model.dim();
  const int dstar = model.max_degree();
  const int s = model.vertices() / (dstar + 1) - 3;
  if (d < 3 || s <= 0) return 1.0;
  const auto& pi = model.pi();
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    double best = 1.0;
    for (int ip = 0; ip < d; ++ip) {
      if (ip == i) continue;
      double hmin = std::numeric_limits<double>::infinity();
      for (int t = 1; t <= dstar; ++t) {
        hmin = std::min(hmin, t * pi[i] * std::pow(1.0 - pi[i] - pi[ip], t - 1));
      }
      if (!(hmin > 0.0)) continue;
      const double T = 0.5 * s * std::min(pi[i], pi[ip]) * hmin;
      const double eta = std::min(1.0, 4.0 * dstar * dstar / (s * hmin));
      best = std::min(best, mineka_smoothness_bound(T, eta));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace dnapprox
