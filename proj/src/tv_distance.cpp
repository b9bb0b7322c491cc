#include "dnapprox/tv_distance.hpp"

#include <cmath>
#include <set>

#include "dnapprox/errors.hpp"

namespace dnapprox {

PmfTable::PmfTable(int dim) : dim_(dim) {
  if (dim < 1) throw DomainError("PmfTable: dimension must be at least 1");
}

PmfTable PmfTable::point_mass(const IntVec& z) {
  PmfTable t(static_cast<int>(z.size()));
  t.add(z, 1.0);
  return t;
}

PmfTable PmfTable::from_samples(std::span<const IntVec> samples) {
  if (samples.empty()) throw DomainError("PmfTable::from_samples: no samples");
  PmfTable t(static_cast<int>(samples.front().size()));
  std::map<IntVec, std::size_t> counts;
  for (const auto& z : samples) {
    if (static_cast<int>(z.size()) != t.dim_) throw DomainError("PmfTable::from_samples: mixed dimensions");
    ++counts[z];
  }
  const double n = static_cast<double>(samples.size());
  for (const auto& [z, c] : counts) t.entries_.emplace(z, static_cast<double>(c) / n);
  return t;
}

void PmfTable::add(const IntVec& z, double p) {
  if (static_cast<int>(z.size()) != dim_) throw DomainError("PmfTable::add: dimension mismatch");
  if (!(p >= 0.0)) throw DomainError("PmfTable::add: negative or NaN probability");
  if (p == 0.0) return;
  entries_[z] += p;
}

double PmfTable::at(const IntVec& z) const {
  auto it = entries_.find(z);
  return it == entries_.end() ? 0.0 : it->second;
}

double PmfTable::total_mass() const {
  // Neumaier summation: tables can hold 1e5+ small entries.
  double sum = 0.0;
  double comp = 0.0;
  for (const auto& [z, p] : entries_) {
    const double t = sum + p;
    comp += std::abs(sum) >= std::abs(p) ? (sum - t) + p : (p - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double PmfTable::tail_mass() const { return std::max(0.0, 1.0 - total_mass()); }

void PmfTable::validate() const {
  if (total_mass() > 1.0 + 1e-12) throw DomainError("PmfTable: total mass exceeds one");
}

TvTablesResult tv_tables(const PmfTable& p, const PmfTable& q) {
  if (p.dim() != q.dim()) throw DomainError("tv_tables: dimension mismatch");
  double sum = 0.0;
  auto ip = p.entries().begin();
  auto iq = q.entries().begin();
  // Merge walk over the two ordered supports.
  while (ip != p.entries().end() || iq != q.entries().end()) {
    if (iq == q.entries().end() || (ip != p.entries().end() && ip->first < iq->first)) {
      sum += ip->second;
      ++ip;
    } else if (ip == p.entries().end() || iq->first < ip->first) {
      sum += iq->second;
      ++iq;
    } else {
      sum += std::abs(ip->second - iq->second);
      ++ip;
      ++iq;
    }
  }
  TvTablesResult r;
  r.value = 0.5 * sum;
  r.upper_bound = r.value + 0.5 * (p.tail_mass() + q.tail_mass());
  return r;
}

namespace {

// DN table over the support of `p` united with the epsilon-ball.
PmfTable dn_table_for(const PmfTable& p, const DnParams& params, double epsilon_tail, RngStream& rng,
                      const CellMassOptions& qmc, bool enumerate_ball) {
  if (p.dim() != params.dim()) throw DomainError("TV: table and DN dimensions differ");
  if (!(epsilon_tail > 0.0 && epsilon_tail <= 1.0)) throw DomainError("TV: epsilon_tail must be in (0, 1]");
  std::set<IntVec> cells;
  for (const auto& [z, mass] : p.entries()) cells.insert(z);
  if (enumerate_ball)
    for (auto& z : lattice_ball(params, support_radius(params, epsilon_tail))) cells.insert(std::move(z));
  std::vector<IntVec> list(cells.begin(), cells.end());
  RngStream qmc_rng = rng.split(0x716d63ULL);
  const CellMasses masses = dn_cell_masses(params, list, qmc_rng, qmc);
  PmfTable q(params.dim());
  for (std::size_t i = 0; i < list.size(); ++i) q.add(list[i], masses.mass[i]);
  return q;
}

// Full TV when q's deficit is mass located off p's support.
double tv_with_dn_tail(const PmfTable& p, const PmfTable& q) {
  return tv_tables(p, q).value + 0.5 * q.tail_mass();
}

}  // namespace

double bootstrap_std_error(const PmfTable& empirical, std::size_t n, int resamples, const RngStream& rng,
                           const std::function<double(const PmfTable&)>& statistic) {
  if (resamples < 2) return 0.0;
  std::vector<std::pair<IntVec, double>> cells(empirical.entries().begin(), empirical.entries().end());
  double total = 0.0;
  for (const auto& cell : cells) total += cell.second;
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    RngStream stream = rng.split(static_cast<std::uint64_t>(r));
    PmfTable boot(empirical.dim());
    // Multinomial(n, p) by sequential conditional binomials.
    std::int64_t left = static_cast<std::int64_t>(n);
    double mass_left = total;
    for (std::size_t c = 0; c < cells.size() && left > 0; ++c) {
      const double p = c + 1 == cells.size() ? 1.0 : std::min(1.0, cells[c].second / mass_left);
      const std::int64_t k = stream.binomial(left, p);
      if (k > 0) boot.add(cells[c].first, static_cast<double>(k) / static_cast<double>(n));
      left -= k;
      mass_left -= cells[c].second;
    }
    stats[static_cast<std::size_t>(r)] = statistic(boot);
  }
  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= static_cast<double>(resamples);
  double ss = 0.0;
  for (double s : stats) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / static_cast<double>(resamples - 1));
}

TvEstimate tv_empirical_vs_dn(std::span<const IntVec> samples, const DnParams& params, double epsilon_tail,
                              RngStream& rng, const TvOptions& opts) {
  if (samples.size() < kMinEmpiricalSamples) throw DomainError("tv_empirical_vs_dn: too few samples");
  const PmfTable emp = PmfTable::from_samples(samples);
  const PmfTable q = dn_table_for(emp, params, epsilon_tail, rng, opts.qmc, opts.enumerate_ball);
  TvEstimate est;
  est.value = tv_with_dn_tail(emp, q);
  est.tail_bound = opts.enumerate_ball ? epsilon_tail : 0.0;
  est.mc_std_error = bootstrap_std_error(emp, samples.size(), opts.bootstrap_resamples, rng.split(0x626f6f74ULL),
                                         [&q](const PmfTable& boot) { return tv_with_dn_tail(boot, q); });
  return est;
}

TvEstimate tv_exact_vs_dn(const PmfTable& p, const DnParams& params, double epsilon_tail, RngStream& rng,
                          const TvOptions& opts) {
  if (p.tail_mass() >= 1e-12 || p.total_mass() > 1.0 + 1e-12) {
    throw DomainError("tv_exact_vs_dn: table is not an exact probability law");
  }
  const PmfTable q = dn_table_for(p, params, epsilon_tail, rng, opts.qmc, opts.enumerate_ball);
  TvEstimate est;
  est.value = tv_with_dn_tail(p, q);
  est.tail_bound = opts.enumerate_ball ? epsilon_tail : 0.0;
  return est;
}

TvEstimate tv_exact_vs_dn(const PmfTable& p, const DnParams& params, double epsilon_tail) {
  RngStream rng(0x5eedULL, 1);
  return tv_exact_vs_dn(p, params, epsilon_tail, rng);
}

double tv_unit_shift(const PmfTable& p, int direction) {
  if (direction < 0 || direction >= p.dim()) throw DomainError("tv_unit_shift: direction out of range");
  PmfTable shifted(p.dim());
  for (const auto& [z, mass] : p.entries()) {
    IntVec y = z;
    ++y[static_cast<std::size_t>(direction)];
    shifted.add(y, mass);
  }
  return tv_tables(p, shifted).value;
}

}  // namespace dnapprox
