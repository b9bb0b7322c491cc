#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "dnapprox/lattice_gaussian.hpp"
#include "dnapprox/models/coloring.hpp"
#include "dnapprox/models/markov.hpp"
#include "dnapprox/models/max_points.hpp"
#include "dnapprox/models/model_sample.hpp"
#include "dnapprox/models/rgg.hpp"
#include "dnapprox/rng.hpp"

namespace dnapprox {

enum class ModelKind { Markov, Coloring, Rgg, MaxPoints, Constant };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

/// Model parameters that do not vary along the size ladder. What the size
/// means depends on the kind (see docs/configuration.md); the constant model
/// ignores it.
struct ModelSpec {
  ModelKind kind = ModelKind::Markov;
  // markov
  Eigen::MatrixXd transition;
  int start = 0;
  // coloring
  Eigen::VectorXd colour_probs;
  std::optional<double> thinning_p;
  /// Optional fixed graph; when set the size ladder is ignored for the graph.
  std::optional<std::vector<ColoringModel::Edge>> edges;
  int vertices = 0;
  // rgg
  double radius = 1.0;
  // max_points
  std::vector<Strip> strips;
  // constant: W is identically `value`, compared with DN(value + shift, variance I)
  IntVec value;
  double shift = 0.0;
  double variance = 1.0;

  int dim() const;
};

enum class TvMode { Auto, Exact, Empirical };
enum class ReportFormat { Csv, Json };

/// Source of eps_W in the bound breakdown. Kind::Empirical takes the largest
/// unit-shift TV of W over coordinates.
struct EpsWSetting {
  enum class Kind { Value, Mineka, Empirical } kind = Kind::Mineka;
  double value = 1.0;
};

struct ExperimentConfig {
  ModelSpec model;
  std::vector<double> sizes;
  long replicates = 100000;
  std::uint64_t seed = 1;
  double epsilon_tail = 1e-9;
  TvMode tv_mode = TvMode::Auto;
  EpsWSetting eps_w;
  /// Replicates for gamma and the empirical eps_W.
  long bound_replicates = 2000;
  int bootstrap_resamples = 50;
  int threads = 1;
  std::optional<std::filesystem::path> output;
  ReportFormat format = ReportFormat::Json;

  /// Throws DomainError on invalid settings.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
ModelSpec model_spec_from_json(const nlohmann::json& j);

struct BoundRow {
  double dbar2 = 0.0;
  double gamma = 0.0;
  double eps_w = 0.0;
  double eps_w_term = 0.0;
  double msqrt_term = 0.0;
  double combined = 0.0;
};

struct ReportRow {
  double size = 0.0;
  long m = 0;
  double tv_estimate = 0.0;
  double mc_std_error = 0.0;
  double tail_bound = 0.0;
  bool exact = false;
  /// Target moments came from closed forms rather than the samples.
  bool closed_form_moments = false;
  /// size^reference_slope; log factors are not included.
  double rate_reference = 0.0;
  /// Present for models with an intersection-graph decomposition.
  std::optional<BoundRow> bound;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  bool weighted = false;
};

struct ConvergenceReport {
  std::string model;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  SlopeFit fit;
  double reference_slope = 0.0;
  std::string note;
};

/// Least squares fit of log(tv) on log(size). With every row carrying a
/// positive standard error the fit weights by the inverse delta-method
/// variance of log(tv); otherwise it is unweighted with a residual-based
/// standard error. Needs >= 3 rows with positive tv.
SlopeFit fit_log_log_slope(const std::vector<ReportRow>& rows);

/// Polynomial exponent of the model's known TV rate, log factors dropped.
double reference_slope(ModelKind kind);

/// Exact or empirical target moments for one size.
Moments model_moments(const ModelSpec& spec, double size, long reps, const RngStream& rng, int threads = 1);

/// Independent draws of W: replicate r uses rng.split(r).
std::vector<IntVec> model_samples(const ModelSpec& spec, double size, long reps, const RngStream& rng,
                                  int threads = 1);

/// Runs the size ladder. Size index i draws from make_rng(seed, 0).split(i).
/// Errors are rethrown with the offending size in the message.
ConvergenceReport run_convergence_experiment(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "size,m,tv_estimate,mc_std_error,tail_bound,exact,closed_form_moments,rate_reference,"
    "bound_dbar2,bound_gamma,bound_eps_w,bound_eps_w_term,bound_msqrt_term,bound_combined";

nlohmann::json report_to_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(const nlohmann::json& j);
std::string report_to_csv(const ConvergenceReport& report);
/// Writes the report; I/O failures raise std::runtime_error naming the path.
void emit_report(const ConvergenceReport& report, ReportFormat format, const std::filesystem::path& path);

/// Formats with 17 significant digits.
std::string format_double(double x);

}  // namespace dnapprox
