#include "dnapprox/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dnapprox/dependency.hpp"
#include "dnapprox/errors.hpp"
#include "dnapprox/stein_bounds.hpp"
#include "dnapprox/tv_distance.hpp"

namespace dnapprox {
namespace {

using nlohmann::json;

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("config: matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw DomainError("config: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

ColoringModel coloring_at(const ModelSpec& spec, double size) {
  if (spec.edges) return ColoringModel::create(spec.vertices, *spec.edges, spec.colour_probs, spec.thinning_p);
  return ColoringModel::cycle(static_cast<int>(std::lround(size)), spec.colour_probs, spec.thinning_p);
}

MarkovModel markov_at(const ModelSpec& spec, double size) {
  return MarkovModel::create(spec.transition, spec.start, std::lround(size));
}

MaxPointsModel max_points_at(const ModelSpec& spec, double size) { return MaxPointsModel::create(size, spec.strips); }

RggModel rgg_at(const ModelSpec& spec, double size) {
  return RggModel::create(static_cast<int>(std::lround(size)), spec.radius);
}

std::function<IntVec(RngStream&)> sampler_at(const ModelSpec& spec, double size) {
  switch (spec.kind) {
    case ModelKind::Markov: {
      auto model = markov_at(spec, size);
      return [model](RngStream& rng) { return mc_sample(model, rng).w; };
    }
    case ModelKind::Coloring: {
      auto model = coloring_at(spec, size);
      return [model](RngStream& rng) { return gc_sample(model, rng).w; };
    }
    case ModelKind::Rgg: {
      auto model = rgg_at(spec, size);
      return [model](RngStream& rng) { return rgg_sample(model, rng).w; };
    }
    case ModelKind::MaxPoints: {
      auto model = max_points_at(spec, size);
      return [model](RngStream& rng) { return mp_sample(model, rng).w; };
    }
    case ModelKind::Constant:
      return [value = spec.value](RngStream&) { return value; };
  }
  throw DomainError("unknown model kind");
}

Moments empirical_moments(const std::vector<IntVec>& samples) {
  const auto d = static_cast<Eigen::Index>(samples.front().size());
  const double n = static_cast<double>(samples.size());
  Moments m{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
  Eigen::VectorXd x(d);
  for (const auto& z : samples)
    for (Eigen::Index i = 0; i < d; ++i) m.mu[i] += static_cast<double>(z[static_cast<std::size_t>(i)]);
  m.mu /= n;
  for (const auto& z : samples) {
    for (Eigen::Index i = 0; i < d; ++i) x[i] = static_cast<double>(z[static_cast<std::size_t>(i)]) - m.mu[i];
    m.V.noalias() += x * x.transpose();
  }
  m.V /= n - 1.0;
  return m;
}

std::optional<PmfTable> exact_table(const ModelSpec& spec, double size, TvMode mode) {
  if (mode == TvMode::Empirical) return std::nullopt;
  try {
    switch (spec.kind) {
      case ModelKind::Markov: {
        const auto model = markov_at(spec, size);
        return mc_occupation_exact_pmf(model, model.n(), model.start());
      }
      case ModelKind::Coloring:
        return gc_exact_pmf(coloring_at(spec, size));
      case ModelKind::Constant:
        return PmfTable::point_mass(spec.value);
      case ModelKind::Rgg:
      case ModelKind::MaxPoints:
        if (mode == TvMode::Exact) throw DomainError("no exact law available for " + to_string(spec.kind));
        return std::nullopt;
    }
  } catch (const BudgetError&) {
    if (mode == TvMode::Exact) throw;
  }
  return std::nullopt;
}

BoundRow bound_row(const ExperimentConfig& cfg, double size, const Moments& mom, const RngStream& rng) {
  const auto model = coloring_at(cfg.model, size);
  const double gamma = std::max(1.0, third_moment_gamma_mc(model, static_cast<int>(cfg.bound_replicates), rng.split(0)));
  const auto ctx = context_from_moments(mom.mu, mom.V, gamma);
  const auto stats = neighborhood_stats(model.dependency_graph(), static_cast<int>(ctx.m));
  double eps_w = cfg.eps_w.value;
  if (cfg.eps_w.kind == EpsWSetting::Kind::Mineka) {
    eps_w = gc_mineka_epsilon(model);
  } else if (cfg.eps_w.kind == EpsWSetting::Kind::Empirical) {
    eps_w = 0.0;
    auto sampler = [&model](RngStream& r) { return gc_sample(model, r).w; };
    for (int i = 0; i < ctx.dim(); ++i) {
      const auto est = empirical_shift_tv(sampler, i, static_cast<std::size_t>(cfg.bound_replicates),
                                          rng.split(1 + static_cast<std::uint64_t>(i)), 0);
      eps_w = std::max(eps_w, std::min(1.0, est.value));
    }
  }
  const auto b = corollary_bound(ctx, stats, eps_w);
  return BoundRow{b.dbar2, b.gamma, b.eps_w, b.eps_w_term, b.msqrt_term, b.combined};
}

double json_number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json json_number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Markov: return "markov";
    case ModelKind::Coloring: return "coloring";
    case ModelKind::Rgg: return "rgg";
    case ModelKind::MaxPoints: return "max_points";
    case ModelKind::Constant: return "constant";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "markov") return ModelKind::Markov;
  if (s == "coloring") return ModelKind::Coloring;
  if (s == "rgg") return ModelKind::Rgg;
  if (s == "max_points") return ModelKind::MaxPoints;
  if (s == "constant") return ModelKind::Constant;
  throw DomainError("unknown model kind '" + s + "'");
}

int ModelSpec::dim() const {
  switch (kind) {
    case ModelKind::Markov: return static_cast<int>(transition.rows()) - 1;
    case ModelKind::Coloring: return static_cast<int>(colour_probs.size());
    case ModelKind::Rgg: return 2;
    case ModelKind::MaxPoints: return static_cast<int>(strips.size());
    case ModelKind::Constant: return static_cast<int>(value.size());
  }
  return 0;
}

void ExperimentConfig::validate() const {
  if (sizes.size() < 3) throw DomainError("config: size ladder needs at least 3 entries");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !std::isfinite(sizes[i])) throw DomainError("config: sizes must be positive");
    if (i > 0 && !(sizes[i] > sizes[i - 1])) throw DomainError("config: size ladder must be strictly increasing");
  }
  if (replicates < 1000) throw DomainError("config: replicates must be at least 1000");
  if (!(epsilon_tail > 0.0 && epsilon_tail < 1.0)) throw DomainError("config: epsilon_tail must lie in (0, 1)");
  if (threads < 1) throw DomainError("config: threads must be positive");
  if (bound_replicates < static_cast<long>(kMinEmpiricalSamples))
    throw DomainError("config: bound_replicates must be at least 1000");
  if (eps_w.kind == EpsWSetting::Kind::Value && !(eps_w.value >= 0.0 && eps_w.value <= 1.0))
    throw DomainError("config: eps_w must lie in [0, 1]");
  if (model.dim() < 1) throw DomainError("config: model has no coordinates");
  // Builds the first size to surface parameter errors early.
  (void)sampler_at(model, sizes.front());
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec s;
  s.kind = model_kind_from_string(j.at("kind").get<std::string>());
  switch (s.kind) {
    case ModelKind::Markov:
      s.transition = matrix_from_json(j.at("transition"));
      s.start = j.value("start", 0);
      break;
    case ModelKind::Coloring:
      s.colour_probs = vector_from_json(j.at("pi"));
      if (j.contains("thinning_p")) s.thinning_p = j.at("thinning_p").get<double>();
      if (j.contains("edges")) {
        std::vector<ColoringModel::Edge> edges;
        for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        s.edges = std::move(edges);
        s.vertices = j.at("vertices").get<int>();
      }
      break;
    case ModelKind::Rgg:
      s.radius = j.at("r").get<double>();
      break;
    case ModelKind::MaxPoints:
      for (const auto& st : j.at("strips")) s.strips.push_back(Strip{st.at(0).get<double>(), st.at(1).get<double>()});
      break;
    case ModelKind::Constant:
      s.value = j.at("value").get<IntVec>();
      s.shift = j.value("shift", 0.0);
      s.variance = j.value("variance", 1.0);
      if (!(s.variance > 0.0)) throw DomainError("config: constant model needs variance > 0");
      break;
  }
  return s;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.model = model_spec_from_json(j.at("model"));
    c.sizes = j.at("sizes").get<std::vector<double>>();
    c.replicates = j.value("replicates", c.replicates);
    c.seed = j.value("seed", c.seed);
    c.epsilon_tail = j.value("epsilon_tail", c.epsilon_tail);
    const std::string tv = j.value("tv", std::string("auto"));
    if (tv == "auto") c.tv_mode = TvMode::Auto;
    else if (tv == "exact") c.tv_mode = TvMode::Exact;
    else if (tv == "empirical") c.tv_mode = TvMode::Empirical;
    else throw DomainError("config: tv must be auto, exact or empirical");
    if (j.contains("eps_w")) {
      const auto& e = j.at("eps_w");
      if (e.is_number()) c.eps_w = {EpsWSetting::Kind::Value, e.get<double>()};
      else if (e == "mineka") c.eps_w.kind = EpsWSetting::Kind::Mineka;
      else if (e == "empirical") c.eps_w.kind = EpsWSetting::Kind::Empirical;
      else throw DomainError("config: eps_w must be a number, \"mineka\" or \"empirical\"");
    }
    c.bound_replicates = j.value("bound_replicates", c.bound_replicates);
    c.bootstrap_resamples = j.value("bootstrap_resamples", c.bootstrap_resamples);
    c.threads = j.value("threads", c.threads);
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    const std::string fmt = j.value("format", std::string("json"));
    if (fmt == "json") c.format = ReportFormat::Json;
    else if (fmt == "csv") c.format = ReportFormat::Csv;
    else throw DomainError("config: format must be csv or json");
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

double reference_slope(ModelKind kind) {
  switch (kind) {
    case ModelKind::Markov:
    case ModelKind::Coloring: return -0.5;
    case ModelKind::Rgg: return -1.0;
    case ModelKind::MaxPoints: return -0.25;
    case ModelKind::Constant: return 0.0;
  }
  return 0.0;
}

SlopeFit fit_log_log_slope(const std::vector<ReportRow>& rows) {
  std::vector<double> x, y, w;
  bool weighted = true;
  for (const auto& r : rows) {
    if (!(r.tv_estimate > 0.0) || !(r.size > 0.0)) continue;
    x.push_back(std::log(r.size));
    y.push_back(std::log(r.tv_estimate));
    const double se = r.mc_std_error / r.tv_estimate;
    if (!(se > 0.0)) weighted = false;
    w.push_back(se > 0.0 ? 1.0 / (se * se) : 1.0);
  }
  if (x.size() < 3) throw DomainError("fit_log_log_slope: needs at least 3 rows with positive tv");
  if (!weighted) std::fill(w.begin(), w.end(), 1.0);
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.weighted = weighted;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (weighted) {
    fit.std_error = std::sqrt(1.0 / sxx);
  } else {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - fit.intercept - fit.slope * x[i], 2);
    fit.std_error = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  }
  return fit;
}

std::vector<IntVec> model_samples(const ModelSpec& spec, double size, long reps, const RngStream& rng, int threads) {
  if (reps < 1) throw DomainError("model_samples: reps must be positive");
  const auto sampler = sampler_at(spec, size);
  std::vector<IntVec> out(static_cast<std::size_t>(reps));
  auto work = [&](long lo, long hi) {
    for (long r = lo; r < hi; ++r) {
      auto s = rng.split(static_cast<std::uint64_t>(r));
      out[static_cast<std::size_t>(r)] = sampler(s);
    }
  };
  const long t = std::clamp<long>(threads, 1, reps);
  if (t == 1) {
    work(0, reps);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  for (long k = 0; k < t; ++k) {
    pool.emplace_back([&, k] {
      try {
        work(reps * k / t, reps * (k + 1) / t);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Moments model_moments(const ModelSpec& spec, double size, long reps, const RngStream& rng, int threads) {
  switch (spec.kind) {
    case ModelKind::Markov: {
      const auto model = markov_at(spec, size);
      const auto m = mc_stationary_and_cov(model);
      const double n = static_cast<double>(model.n());
      return {n * m.pi, n * m.V};
    }
    case ModelKind::Coloring:
      return gc_moments(coloring_at(spec, size));
    case ModelKind::Constant: {
      const auto d = static_cast<Eigen::Index>(spec.value.size());
      Eigen::VectorXd mu(d);
      for (Eigen::Index i = 0; i < d; ++i) mu[i] = static_cast<double>(spec.value[static_cast<std::size_t>(i)]) + spec.shift;
      return {mu, spec.variance * Eigen::MatrixXd::Identity(d, d)};
    }
    case ModelKind::Rgg:
    case ModelKind::MaxPoints:
      if (reps < 2) throw DomainError("model_moments: empirical moments need at least 2 replicates");
      return empirical_moments(model_samples(spec, size, reps, rng, threads));
  }
  throw DomainError("unknown model kind");
}

ConvergenceReport run_convergence_experiment(const ExperimentConfig& config) {
  config.validate();
  ConvergenceReport report;
  report.model = to_string(config.model.kind);
  report.seed = config.seed;
  report.reference_slope = reference_slope(config.model.kind);
  report.note = "reference slope is the polynomial exponent; log factors in the rate bias small-size slopes upward";
  const RngStream root = make_rng(config.seed, 0);
  for (std::size_t i = 0; i < config.sizes.size(); ++i) {
    const double size = config.sizes[i];
    try {
      const RngStream srng = root.split(i);
      ReportRow row;
      row.size = size;
      row.rate_reference = std::pow(size, report.reference_slope);
      const auto table = exact_table(config.model, size, config.tv_mode);
      std::vector<IntVec> samples;
      const bool closed = config.model.kind != ModelKind::Rgg && config.model.kind != ModelKind::MaxPoints;
      if (!table) samples = model_samples(config.model, size, config.replicates, srng.split(0), config.threads);
      const Moments mom = closed ? model_moments(config.model, size, 0, srng, config.threads) : empirical_moments(samples);
      row.closed_form_moments = closed;
      const auto params = DnParams::create(mom.mu, mom.V);
      row.m = context_from_moments(mom.mu, mom.V).m;
      TvEstimate tv;
      TvOptions opts;
      opts.bootstrap_resamples = config.bootstrap_resamples;
      opts.enumerate_ball = params.dim() <= 2;
      auto brng = srng.split(1);
      if (table) {
        tv = tv_exact_vs_dn(*table, params, config.epsilon_tail, brng, opts);
        row.exact = true;
      } else {
        tv = tv_empirical_vs_dn(samples, params, config.epsilon_tail, brng, opts);
      }
      row.tv_estimate = tv.value;
      row.mc_std_error = tv.mc_std_error;
      row.tail_bound = tv.tail_bound;
      if (config.model.kind == ModelKind::Coloring && row.m >= 2) row.bound = bound_row(config, size, mom, srng.split(2));
      report.rows.push_back(std::move(row));
    } catch (const BudgetError& e) {
      throw BudgetError("size " + format_double(size) + ": " + e.what());
    } catch (const AccuracyError& e) {
      throw AccuracyError("size " + format_double(size) + ": " + e.what(), e.estimate(), e.error());
    } catch (const DomainError& e) {
      throw DomainError("size " + format_double(size) + ": " + e.what());
    }
  }
  report.fit = fit_log_log_slope(report.rows);
  return report;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json report_to_json(const ConvergenceReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"size", r.size},
             {"m", r.m},
             {"tv_estimate", r.tv_estimate},
             {"mc_std_error", r.mc_std_error},
             {"tail_bound", r.tail_bound},
             {"exact", r.exact},
             {"closed_form_moments", r.closed_form_moments},
             {"rate_reference", r.rate_reference},
             {"bound", nullptr}};
    if (r.bound) {
      row["bound"] = json{{"dbar2", r.bound->dbar2},         {"gamma", r.bound->gamma},
                          {"eps_w", r.bound->eps_w},         {"eps_w_term", json_number_or_null(r.bound->eps_w_term)},
                          {"msqrt_term", r.bound->msqrt_term}, {"combined", json_number_or_null(r.bound->combined)}};
    }
    rows.push_back(std::move(row));
  }
  return json{{"model", report.model},
              {"seed", report.seed},
              {"rows", rows},
              {"fit",
               {{"slope", report.fit.slope},
                {"intercept", report.fit.intercept},
                {"std_error", report.fit.std_error},
                {"weighted", report.fit.weighted}}},
              {"reference_slope", report.reference_slope},
              {"note", report.note}};
}

ConvergenceReport report_from_json(const json& j) {
  ConvergenceReport r;
  r.model = j.at("model").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& row : j.at("rows")) {
    ReportRow x;
    x.size = row.at("size").get<double>();
    x.m = row.at("m").get<long>();
    x.tv_estimate = row.at("tv_estimate").get<double>();
    x.mc_std_error = row.at("mc_std_error").get<double>();
    x.tail_bound = row.at("tail_bound").get<double>();
    x.exact = row.at("exact").get<bool>();
    x.closed_form_moments = row.at("closed_form_moments").get<bool>();
    x.rate_reference = row.at("rate_reference").get<double>();
    if (!row.at("bound").is_null()) {
      const auto& b = row.at("bound");
      x.bound = BoundRow{b.at("dbar2").get<double>(),     b.at("gamma").get<double>(),
                         b.at("eps_w").get<double>(),     json_number(b.at("eps_w_term")),
                         b.at("msqrt_term").get<double>(), json_number(b.at("combined"))};
    }
    r.rows.push_back(x);
  }
  const auto& f = j.at("fit");
  r.fit = SlopeFit{f.at("slope").get<double>(), f.at("intercept").get<double>(), f.at("std_error").get<double>(),
                   f.at("weighted").get<bool>()};
  r.reference_slope = j.at("reference_slope").get<double>();
  r.note = j.at("note").get<std::string>();
  return r;
}

std::string report_to_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : report.rows) {
    out << format_double(r.size) << ',' << r.m << ',' << format_double(r.tv_estimate) << ','
        << format_double(r.mc_std_error) << ',' << format_double(r.tail_bound) << ',' << (r.exact ? 1 : 0) << ','
        << (r.closed_form_moments ? 1 : 0) << ',' << format_double(r.rate_reference);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const BoundRow b = r.bound.value_or(BoundRow{nan, nan, nan, nan, nan, nan});
    for (double v : {b.dbar2, b.gamma, b.eps_w, b.eps_w_term, b.msqrt_term, b.combined}) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

void emit_report(const ConvergenceReport& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (format == ReportFormat::Csv) out << report_to_csv(report);
  else out << report_to_json(report).dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace dnapprox
