#pragma once

#include <functional>
#include <map>
#include <span>

#include "dnapprox/lattice_gaussian.hpp"
#include "dnapprox/rng.hpp"

namespace dnapprox {

/// A (sub-)probability mass function on Z^d keyed by exact integer vectors.
/// Any deficit 1 - total is the table's tail mass, mass known to exist but not
/// located.
class PmfTable {
 public:
  explicit PmfTable(int dim);

  static PmfTable point_mass(const IntVec& z);
  /// Empirical law of the samples (all of one dimension).
  static PmfTable from_samples(std::span<const IntVec> samples);

  int dim() const { return dim_; }
  /// Accumulates p at z. Throws DomainError on a dimension mismatch or p < 0.
  void add(const IntVec& z, double p);
  double at(const IntVec& z) const;
  const std::map<IntVec, double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double total_mass() const;
  double tail_mass() const;
  /// Throws DomainError if the total exceeds 1 + 1e-12.
  void validate() const;

 private:
  int dim_;
  std::map<IntVec, double> entries_;
};

struct TvTablesResult {
  /// (1/2) sum |p - q| over the union of supports.
  double value = 0.0;
  /// value plus half of both recorded tail masses.
  double upper_bound = 0.0;
};

TvTablesResult tv_tables(const PmfTable& p, const PmfTable& q);

struct TvEstimate {
  double value = 0.0;
  double mc_std_error = 0.0;
  double tail_bound = 0.0;
};

struct TvOptions {
  int bootstrap_resamples = 200;
  CellMassOptions qmc;
  /// When false only the cells of the law's own support are evaluated. The
  /// value is unchanged (all DN mass off that support is charged in full)
  /// and tail_bound is 0.
  bool enumerate_ball = true;
};

inline constexpr std::size_t kMinEmpiricalSamples = 1000;

/// Plug-in TV between the empirical law of the samples and DN_d. DN masses
/// are evaluated on the empirical support plus the lattice ball of radius
/// support_radius(epsilon_tail); unenumerated DN mass is charged in full.
/// The standard error comes from a nonparametric bootstrap.
TvEstimate tv_empirical_vs_dn(std::span<const IntVec> samples, const DnParams& params, double epsilon_tail,
                              RngStream& rng, const TvOptions& opts = {});

/// TV between an exact table (mass deficit < 1e-12) and DN_d.
TvEstimate tv_exact_vs_dn(const PmfTable& p, const DnParams& params, double epsilon_tail, RngStream& rng,
                          const TvOptions& opts = {});
TvEstimate tv_exact_vs_dn(const PmfTable& p, const DnParams& params, double epsilon_tail);

/// TV between the law in `p` and its translate by e^(direction).
double tv_unit_shift(const PmfTable& p, int direction);

/// Bootstrap standard deviation of a table statistic: resamples the counts
/// behind an empirical table (n draws) multinomially. Resample r uses
/// rng.split(r), so results do not depend on evaluation order.
double bootstrap_std_error(const PmfTable& empirical, std::size_t n, int resamples, const RngStream& rng,
                           const std::function<double(const PmfTable&)>& statistic);

}  // namespace dnapprox
