#include "dnapprox/lattice_gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "dnapprox/errors.hpp"
#include "dnapprox/numerics.hpp"

namespace dnapprox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gauss-Legendre half-rules (negative abscissae) with 6, 12 and 20 points.
constexpr std::array<double, 3> kW6{0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr std::array<double, 3> kX6{-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
constexpr std::array<double, 6> kW12{0.4717533638651177e-01, 0.1069393259953183, 0.1600783285433464,
                                     0.2031674267230659,     0.2334925365383547, 0.2491470458134029};
constexpr std::array<double, 6> kX12{-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                                     -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
constexpr std::array<double, 10> kW20{0.1761400713915212e-01, 0.4060142980038694e-01, 0.6267204833410906e-01,
                                      0.8327674157670475e-01, 0.1019301198172404,     0.1181945319615184,
                                      0.1316886384491766,     0.1420961093183821,     0.1491729864726037,
                                      0.1527533871307259};
constexpr std::array<double, 10> kX20{-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                                      -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                                      -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
                                      -0.7652652113349733e-01};

// First primes for the Richtmyer lattice generator.
constexpr std::array<int, 24> kPrimes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                      41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

void check_dims(const DnParams& params, const LatticeBox& box) {
  if (box.lower.size() != params.dim() || box.upper.size() != params.dim()) {
    throw DomainError("box dimension does not match distribution dimension");
  }
}

// Conditional-interval step of the separation-of-variables transform: returns
// the mass of (lo, hi) and the point Φ^{-1}(Φ(lo) + w * mass).
struct StepResult {
  double mass;
  double point;
};

StepResult sov_step(double lo, double hi, double w) {
  const double mass = normal_interval(lo, hi);
  if (mass <= 0.0) {
    const double anchor = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    return {0.0, anchor};
  }
  double y;
  if (lo > 0.0) {
    double q = normal_sf(lo) - w * mass;
    q = std::clamp(q, std::numeric_limits<double>::min(), 1.0);
    y = -std_normal_quantile(q);
  } else {
    double p = normal_cdf(lo) + w * mass;
    p = std::clamp(p, std::numeric_limits<double>::min(), 1.0 - std::numeric_limits<double>::epsilon());
    y = std_normal_quantile(p);
  }
  if (std::isfinite(lo)) y = std::max(y, lo);
  if (std::isfinite(hi)) y = std::min(y, hi);
  return {mass, y};
}

// One evaluation of the Genz integrand at w in [0,1]^(d-1).
double sov_integrand(const Eigen::MatrixXd& chol, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                     const double* w, double* y) {
  const int d = static_cast<int>(lo.size());
  double f = 1.0;
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < i; ++j) s += chol(i, j) * y[j];
    const double lii = chol(i, i);
    const double a = (lo[i] - s) / lii;
    const double b = (hi[i] - s) / lii;
    if (i + 1 < d) {
      const StepResult step = sov_step(a, b, w[i]);
      f *= step.mass;
      if (f == 0.0) return 0.0;
      y[i] = step.point;
    } else {
      f *= normal_interval(a, b);
    }
  }
  return f;
}

struct Lattice {
  std::vector<double> generator;
  std::vector<std::vector<double>> shifts;
};

Lattice make_lattice(int dims, int randomizations, RngStream& rng) {
  Lattice lat;
  lat.generator.resize(dims);
  for (int j = 0; j < dims; ++j) {
    const double root = std::sqrt(static_cast<double>(kPrimes[static_cast<std::size_t>(j) % kPrimes.size()]));
    lat.generator[j] = root - std::floor(root);
  }
  lat.shifts.assign(randomizations, std::vector<double>(dims));
  for (auto& shift : lat.shifts) {
    for (double& s : shift) s = rng.uniform();
  }
  return lat;
}

// Mean of the integrand over N shifted lattice points, with the baker's
// (tent) periodizing transform.
double lattice_average(const Eigen::MatrixXd& chol, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       const Lattice& lat, std::size_t shift_index, std::size_t first, std::size_t count) {
  const int dims = static_cast<int>(lat.generator.size());
  std::vector<double> w(std::max(dims, 1));
  std::vector<double> y(lo.size());
  double sum = 0.0;
  for (std::size_t k = first; k < first + count; ++k) {
    for (int j = 0; j < dims; ++j) {
      double x = static_cast<double>(k) * lat.generator[j] + lat.shifts[shift_index][j];
      x -= std::floor(x);
      w[j] = std::abs(2.0 * x - 1.0);
    }
    sum += sov_integrand(chol, lo, hi, w.data(), y.data());
  }
  return sum;
}

double sanitize_bound(double v) {
  if (std::isnan(v)) throw DomainError("box bound is NaN");
  return v;
}

}  // namespace

DnParams DnParams::create(Eigen::VectorXd mu, Eigen::MatrixXd sigma) {
  const auto d = mu.size();
  if (d < 1) throw DomainError("DnParams: dimension must be at least 1");
  if (sigma.rows() != d || sigma.cols() != d) throw DomainError("DnParams: covariance shape mismatch");
  if (!mu.allFinite() || !sigma.allFinite()) throw DomainError("DnParams: non-finite parameters");
  const double scale = sigma.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw DomainError("DnParams: covariance is zero");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("DnParams: covariance is not symmetric");
  }
  Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > 1e-10 * lmax)) {
    throw DomainError("DnParams: covariance is singular or not positive definite");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) throw DomainError("DnParams: Cholesky factorization failed");

  DnParams p;
  p.mu_ = std::move(mu);
  p.sigma_ = std::move(sym);
  p.chol_ = llt.matrixL();
  p.lambda_min_ = lmin;
  p.lambda_max_ = lmax;
  return p;
}

LatticeBox LatticeBox::make(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) throw DomainError("LatticeBox: bound dimensions differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    sanitize_bound(lower[i]);
    sanitize_bound(upper[i]);
    if (!(lower[i] < upper[i])) throw DomainError("LatticeBox: requires lower < upper");
  }
  return LatticeBox{std::move(lower), std::move(upper)};
}

LatticeBox LatticeBox::cell(const IntVec& z) {
  Eigen::VectorXd lo(static_cast<Eigen::Index>(z.size()));
  Eigen::VectorXd hi(static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) {
    lo[static_cast<Eigen::Index>(i)] = static_cast<double>(z[i]) - 0.5;
    hi[static_cast<Eigen::Index>(i)] = static_cast<double>(z[i]) + 0.5;
  }
  return LatticeBox{std::move(lo), std::move(hi)};
}

double bivariate_upper(double h, double k, double r) {
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : normal_sf(k);
  if (k == -kInf) return normal_sf(h);

  const double* w;
  const double* x;
  int lg;
  if (std::abs(r) < 0.3) {
    w = kW6.data(), x = kX6.data(), lg = 3;
  } else if (std::abs(r) < 0.75) {
    w = kW12.data(), x = kX12.data(), lg = 6;
  } else {
    w = kW20.data(), x = kX20.data(), lg = 10;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    for (int i = 0; i < lg; ++i) {
      double sn = std::sin(asr * (x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * kTwoPi) + normal_sf(h) * normal_sf(k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double dd = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - dd * bs / 5.0) / 3.0 + c * dd * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - dd * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < lg; ++i) {
      double xs = (a * (x[i] + 1.0)) * (a * (x[i] + 1.0));
      double rs = std::sqrt(1.0 - xs);
      bvn += a * w[i] *
             (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
              std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + dd * xs)));
      xs = as * (-x[i] + 1.0) * (-x[i] + 1.0) / 4.0;
      rs = std::sqrt(1.0 - xs);
      bvn += a * w[i] * std::exp(-(bs / xs + hk) / 2.0) *
             (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + dd * xs)));
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0.0) bvn += normal_sf(std::max(h, k));
  if (r < 0.0) bvn = -bvn + std::max(0.0, normal_sf(h) - normal_sf(k));
  return std::clamp(bvn, 0.0, 1.0);
}

namespace {

double bivariate_rectangle(const DnParams& params, const LatticeBox& box) {
  const Eigen::MatrixXd& s = params.sigma();
  double sd[2] = {std::sqrt(s(0, 0)), std::sqrt(s(1, 1))};
  double r = s(0, 1) / (sd[0] * sd[1]);
  double lo[2];
  double hi[2];
  for (int i = 0; i < 2; ++i) {
    lo[i] = (box.lower[i] - params.mu()[i]) / sd[i];
    hi[i] = (box.upper[i] - params.mu()[i]) / sd[i];
  }
  // Reflect coordinates so the box lies on the upper side of the mean; the
  // inclusion-exclusion below then subtracts small numbers.
  for (int i = 0; i < 2; ++i) {
    const double mid_lo = std::isfinite(lo[i]) ? lo[i] : -1.0;
    const double mid_hi = std::isfinite(hi[i]) ? hi[i] : 1.0;
    if (mid_lo + mid_hi < 0.0) {
      const double t = lo[i];
      lo[i] = -hi[i];
      hi[i] = -t;
      r = -r;
    }
  }
  const double p = bivariate_upper(lo[0], lo[1], r) - bivariate_upper(hi[0], lo[1], r) -
                   bivariate_upper(lo[0], hi[1], r) + bivariate_upper(hi[0], hi[1], r);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

BoxProbability qmc_box_probability(const DnParams& params, const LatticeBox& box, double tol, RngStream& rng,
                                   const QmcOptions& opts) {
  check_dims(params, box);
  if (!(tol > 0.0)) throw DomainError("box_probability: tol must be positive");
  if (opts.randomizations < 2) throw DomainError("box_probability: need at least two randomizations");
  const int d = params.dim();
  const Eigen::VectorXd lo = box.lower - params.mu();
  const Eigen::VectorXd hi = box.upper - params.mu();
  const Lattice lat = make_lattice(std::max(d - 1, 1), opts.randomizations, rng);
  const auto nr = static_cast<std::size_t>(opts.randomizations);

  std::vector<double> sums(nr, 0.0);
  std::size_t n = 0;
  std::size_t next = std::max<std::size_t>(opts.min_points, 1);
  double mean = 0.0;
  double se = 0.0;
  while (true) {
    // Extend every randomization from n to `next` points (lattice prefixes
    // are reused; Richtmyer points form an extensible sequence).
    for (std::size_t s = 0; s < nr; ++s) {
      sums[s] += lattice_average(params.cholesky(), lo, hi, lat, s, n, next - n);
    }
    n = next;
    double m1 = 0.0;
    for (double v : sums) m1 += v / static_cast<double>(n);
    m1 /= static_cast<double>(nr);
    double ss = 0.0;
    for (double v : sums) {
      const double e = v / static_cast<double>(n) - m1;
      ss += e * e;
    }
    mean = m1;
    se = std::sqrt(ss / static_cast<double>(nr * (nr - 1)));
    if (3.0 * se <= tol || d == 1) break;
    if (2 * n > opts.max_points) {
      throw AccuracyError("box_probability: QMC did not reach tolerance", mean, se);
    }
    next = 2 * n;
  }
  return {std::clamp(mean, 0.0, 1.0), se};
}

BoxProbability box_probability(const DnParams& params, const LatticeBox& box, double tol, RngStream& rng,
                               const QmcOptions& opts) {
  check_dims(params, box);
  if (!(tol > 0.0)) throw DomainError("box_probability: tol must be positive");
  switch (params.dim()) {
    case 1: {
      const double sd = std::sqrt(params.sigma()(0, 0));
      const double a = (box.lower[0] - params.mu()[0]) / sd;
      const double b = (box.upper[0] - params.mu()[0]) / sd;
      return {normal_interval(a, b), 0.0};
    }
    case 2:
      return {bivariate_rectangle(params, box), 0.0};
    default:
      return qmc_box_probability(params, box, tol, rng, opts);
  }
}

BoxProbability box_probability(const DnParams& params, const LatticeBox& box, double tol) {
  RngStream rng(0x5eedULL, 0);
  return box_probability(params, box, tol, rng);
}

double dn_pmf(const DnParams& params, const IntVec& z, double tol) {
  if (static_cast<int>(z.size()) != params.dim()) throw DomainError("dn_pmf: dimension mismatch");
  return box_probability(params, LatticeBox::cell(z), tol).value;
}

IntVec dn_sample(const DnParams& params, RngStream& rng) {
  const int d = params.dim();
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) g[i] = rng.normal();
  const Eigen::VectorXd x = params.mu() + params.cholesky() * g;
  IntVec z(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(x[i] + 0.5));
  return z;
}

double support_radius(const DnParams& params, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("support_radius: epsilon must be positive");
  if (epsilon >= 1.0) return 0.0;
  // |X - mu|^2 <= lambda_max * chi^2_d.
  const boost::math::chi_squared_distribution<double> chi2(params.dim());
  return std::sqrt(params.max_eigenvalue() * boost::math::quantile(boost::math::complement(chi2, epsilon)));
}

std::vector<IntVec> lattice_ball(const DnParams& params, double radius) {
  if (!(radius >= 0.0)) throw DomainError("lattice_ball: negative radius");
  const int d = params.dim();
  const double reach = radius + 0.5 * std::sqrt(static_cast<double>(d));
  IntVec lo(static_cast<std::size_t>(d));
  IntVec hi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    lo[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::ceil(params.mu()[i] - reach));
    hi[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(params.mu()[i] + reach));
  }
  std::vector<IntVec> out;
  IntVec z = lo;
  // Cells meeting the ball: the nearest point of the cell is within radius.
  while (true) {
    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = static_cast<double>(z[static_cast<std::size_t>(i)]);
      const double m = params.mu()[i];
      const double nearest = std::clamp(m, c - 0.5, c + 0.5);
      dist2 += (nearest - m) * (nearest - m);
    }
    if (dist2 <= radius * radius) out.push_back(z);
    int i = d - 1;
    while (i >= 0 && z[static_cast<std::size_t>(i)] == hi[static_cast<std::size_t>(i)]) {
      z[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) break;
    ++z[static_cast<std::size_t>(i)];
  }
  return out;
}

CellMasses dn_cell_masses(const DnParams& params, std::span<const IntVec> cells, RngStream& rng,
                          const CellMassOptions& opts) {
  const int d = params.dim();
  CellMasses out;
  out.mass.resize(cells.size());
  for (const auto& z : cells) {
    if (static_cast<int>(z.size()) != d) throw DomainError("dn_cell_masses: dimension mismatch");
  }
  if (d <= 2) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out.mass[c] = box_probability(params, LatticeBox::cell(cells[c]), 1e-12, rng).value;
    }
    return out;
  }
  if (opts.randomizations < 2 || opts.points < 1) throw DomainError("dn_cell_masses: invalid QMC options");
  const Lattice lat = make_lattice(d - 1, opts.randomizations, rng);
  const auto nr = static_cast<std::size_t>(opts.randomizations);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const LatticeBox cell = LatticeBox::cell(cells[c]);
    const Eigen::VectorXd lo = cell.lower - params.mu();
    const Eigen::VectorXd hi = cell.upper - params.mu();
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < nr; ++s) {
      const double v = lattice_average(params.cholesky(), lo, hi, lat, s, 0, opts.points) /
                       static_cast<double>(opts.points);
      m1 += v;
      m2 += v * v;
    }
    m1 /= static_cast<double>(nr);
    const double var = std::max(0.0, m2 / static_cast<double>(nr) - m1 * m1) * static_cast<double>(nr) /
                       static_cast<double>(nr - 1);
    out.mass[c] = m1;
    out.max_std_error = std::max(out.max_std_error, std::sqrt(var / static_cast<double>(nr)));
  }
  return out;
}

}  // namespace dnapprox
