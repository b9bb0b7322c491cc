// Command-line front end: discrete normal masses and samples, TV distances,
// bound breakdowns, model moments and samples, convergence experiments.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dnapprox/errors.hpp"
#include "dnapprox/harness.hpp"
#include "dnapprox/lattice_gaussian.hpp"
#include "dnapprox/rng.hpp"
#include "dnapprox/stein_bounds.hpp"
#include "dnapprox/tv_distance.hpp"

using namespace dnapprox;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string config;
  std::string out;
  std::string format = "csv";
  int threads = 1;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (item.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw DomainError("cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) throw DomainError("empty list '" + s + "'");
  return out;
}

Eigen::VectorXd parse_vector(const std::string& s) {
  const auto v = parse_list(s);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Rows separated by ';', entries by ','.
Eigen::MatrixXd parse_matrix(const std::string& s) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_list(row));
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n)
      throw DomainError("covariance must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

IntVec parse_point(const std::string& s) {
  IntVec z;
  for (double x : parse_list(s)) {
    if (x != std::floor(x)) throw DomainError("lattice point must be integral: " + s);
    z.push_back(static_cast<std::int64_t>(x));
  }
  return z;
}

std::string join(const IntVec& z) {
  std::string s;
  for (std::size_t i = 0; i < z.size(); ++i) s += (i ? "," : "") + std::to_string(z[i]);
  return s;
}

// Whitespace- or comma-separated integer vectors, one per line; '#' starts a comment.
// With `with_mass` the last column is a probability.
std::vector<std::pair<IntVec, double>> read_points(std::istream& in, bool with_mass) {
  std::vector<std::pair<IntVec, double>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    double p = 1.0;
    if (with_mass) {
      p = std::stod(tok.back());
      tok.pop_back();
    }
    IntVec z;
    for (const auto& t : tok) {
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(t, &pos);
      } catch (const std::logic_error&) {
        pos = 0;
      }
      if (pos != t.size()) throw DomainError("line " + std::to_string(lineno) + ": bad integer '" + t + "'");
      z.push_back(v);
    }
    if (!out.empty() && z.size() != out.front().first.size())
      throw DomainError("line " + std::to_string(lineno) + ": dimension mismatch");
    out.emplace_back(std::move(z), p);
  }
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

json load_json(const std::string& path) {
  if (path.empty()) throw DomainError("--config is required");
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("config " + path + ": " + e.what());
  }
}

ModelSpec load_model(const std::string& path) {
  const auto j = load_json(path);
  try {
    return model_spec_from_json(j.contains("model") ? j.at("model") : j);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

void check_format(const std::string& f) {
  if (f != "csv" && f != "json") throw DomainError("--format must be csv or json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete multivariate normal approximation toolkit"};
  app.require_subcommand(1);
  // global flags may follow the subcommand
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "csv or json")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (speed only)")->capture_default_str();

  std::string mu_s, cov_s, point_s;
  double epsilon = 1e-9;
  long count = 1000;
  double size = 0.0;

  auto* dn = app.add_subcommand("dn", "discrete normal DN_d(mu, V)");
  dn->require_subcommand(1);
  auto* dn_pmf_cmd = dn->add_subcommand("pmf", "cell masses at a point or over the epsilon ball");
  auto* dn_sample_cmd = dn->add_subcommand("sample", "draw lattice samples");
  for (auto* c : {dn_pmf_cmd, dn_sample_cmd}) {
    c->add_option("--mu", mu_s, "mean, comma separated")->required();
    c->add_option("--cov", cov_s, "covariance rows separated by ';'")->required();
  }
  dn_pmf_cmd->add_option("--z", point_s, "lattice point; omit to list the ball");
  dn_pmf_cmd->add_option("--epsilon", epsilon, "tail mass outside the listed ball")->capture_default_str();
  dn_sample_cmd->add_option("-n,--count", count, "number of samples")->capture_default_str();

  std::string input;
  bool exact_input = false;
  auto* tv = app.add_subcommand("tv", "TV distance between samples (or an exact table) and DN_d");
  tv->add_option("--mu", mu_s)->required();
  tv->add_option("--cov", cov_s)->required();
  tv->add_option("--input", input, "file of integer vectors, '-' for stdin")->required();
  tv->add_flag("--exact", exact_input, "input lines carry a probability in the last column");
  tv->add_option("--epsilon", epsilon, "tail mass")->capture_default_str();
  int bootstrap = 200;
  tv->add_option("--bootstrap", bootstrap, "bootstrap resamples")->capture_default_str();

  int bd = 1;
  double bm = 2.0, dbar2 = 0.0, gamma = 1.0, eps_w = 0.0;
  auto* bound = app.add_subcommand("bound", "bound breakdown d^3 log m (m^-1/2 + eps_W)(d + 3 gamma Dbar^2)");
  bound->add_option("--d", bd)->required();
  bound->add_option("--m", bm)->required();
  bound->add_option("--dbar2", dbar2)->required();
  bound->add_option("--gamma", gamma)->capture_default_str();
  bound->add_option("--eps-w", eps_w)->required();

  auto* model = app.add_subcommand("model", "model moments and samples (model from --config)");
  model->require_subcommand(1);
  auto* model_moments_cmd = model->add_subcommand("moments", "target mean and covariance at a size");
  auto* model_sample_cmd = model->add_subcommand("sample", "draw W at a size");
  for (auto* c : {model_moments_cmd, model_sample_cmd}) c->add_option("--size", size, "model size")->required();
  model_moments_cmd->add_option("--reps", count, "replicates for empirical moments")->capture_default_str();
  model_sample_cmd->add_option("-n,--count", count, "number of samples")->capture_default_str();

  auto* experiment = app.add_subcommand("experiment", "convergence experiments");
  experiment->require_subcommand(1);
  auto* experiment_run = experiment->add_subcommand("run", "run the size ladder from --config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    check_format(g.format);
    if (g.threads < 1) throw DomainError("--threads must be positive");
    RngStream rng = make_rng(g.seed, 0);

    if (*dn_pmf_cmd || *dn_sample_cmd) {
      const auto params = DnParams::create(parse_vector(mu_s), parse_matrix(cov_s));
      Output out(g.out);
      if (*dn_sample_cmd) {
        if (count < 1) throw DomainError("--count must be positive");
        for (long i = 0; i < count; ++i) out.stream() << join(dn_sample(params, rng)) << '\n';
      } else if (!point_s.empty()) {
        const auto z = parse_point(point_s);
        if (static_cast<int>(z.size()) != params.dim()) throw DomainError("--z has the wrong dimension");
        out.stream() << format_double(dn_pmf(params, z)) << '\n';
      } else {
        const auto cells = lattice_ball(params, support_radius(params, epsilon));
        const auto masses = dn_cell_masses(params, cells, rng);
        if (g.format == "json") {
          json j = json::array();
          for (std::size_t i = 0; i < cells.size(); ++i) j.push_back({{"z", cells[i]}, {"mass", masses.mass[i]}});
          out.stream() << j.dump(2) << '\n';
        } else {
          for (std::size_t i = 0; i < cells.size(); ++i)
            out.stream() << join(cells[i]) << ',' << format_double(masses.mass[i]) << '\n';
        }
      }
      return 0;
    }

    if (*tv) {
      const auto params = DnParams::create(parse_vector(mu_s), parse_matrix(cov_s));
      std::vector<std::pair<IntVec, double>> pts;
      if (input == "-") {
        pts = read_points(std::cin, exact_input);
      } else {
        std::ifstream in(input);
        if (!in) throw DomainError("cannot open " + input);
        pts = read_points(in, exact_input);
      }
      TvEstimate est;
      TvOptions opts;
      opts.bootstrap_resamples = bootstrap;
      if (exact_input) {
        PmfTable t(params.dim());
        for (const auto& [z, p] : pts) t.add(z, p);
        est = tv_exact_vs_dn(t, params, epsilon, rng, opts);
      } else {
        std::vector<IntVec> samples;
        for (auto& [z, p] : pts) samples.push_back(std::move(z));
        est = tv_empirical_vs_dn(samples, params, epsilon, rng, opts);
      }
      Output out(g.out);
      if (g.format == "json") {
        out.stream() << json{{"value", est.value}, {"mc_std_error", est.mc_std_error}, {"tail_bound", est.tail_bound}}
                            .dump(2)
                     << '\n';
      } else {
        out.stream() << "value,mc_std_error,tail_bound\n"
                     << format_double(est.value) << ',' << format_double(est.mc_std_error) << ','
                     << format_double(est.tail_bound) << '\n';
      }
      return 0;
    }

    if (*bound) {
      const auto b = corollary_bound(bd, bm, dbar2, gamma, eps_w);
      Output out(g.out);
      if (g.format == "json") {
        out.stream() << json{{"d", b.d},           {"m", b.m},
                             {"dbar2", b.dbar2},   {"gamma", b.gamma},
                             {"eps_w", b.eps_w},   {"eps_w_term", b.eps_w_term},
                             {"msqrt_term", b.msqrt_term}, {"combined", b.combined}}
                            .dump(2)
                     << '\n';
      } else {
        out.stream() << "d,m,dbar2,gamma,eps_w,eps_w_term,msqrt_term,combined\n"
                     << b.d << ',' << format_double(b.m) << ',' << format_double(b.dbar2) << ','
                     << format_double(b.gamma) << ',' << format_double(b.eps_w) << ',' << format_double(b.eps_w_term)
                     << ',' << format_double(b.msqrt_term) << ',' << format_double(b.combined) << '\n';
      }
      return 0;
    }

    if (*model_moments_cmd || *model_sample_cmd) {
      const auto spec = load_model(g.config);
      Output out(g.out);
      if (*model_sample_cmd) {
        if (count < 1) throw DomainError("--count must be positive");
        for (const auto& w : model_samples(spec, size, count, rng, g.threads)) out.stream() << join(w) << '\n';
        return 0;
      }
      const auto m = model_moments(spec, size, count, rng, g.threads);
      if (g.format == "json") {
        out.stream() << json{{"model", to_string(spec.kind)}, {"size", size}, {"mu", vec_json(m.mu)}, {"V", mat_json(m.V)}}
                            .dump(2)
                     << '\n';
      } else {
        out.stream() << "i,mu";
        for (Eigen::Index k = 0; k < m.V.cols(); ++k) out.stream() << ",V" << k;
        out.stream() << '\n';
        for (Eigen::Index i = 0; i < m.mu.size(); ++i) {
          out.stream() << i << ',' << format_double(m.mu[i]);
          for (Eigen::Index k = 0; k < m.V.cols(); ++k) out.stream() << ',' << format_double(m.V(i, k));
          out.stream() << '\n';
        }
      }
      return 0;
    }

    if (*experiment_run) {
      auto j = load_json(g.config);
      // command-line flags override the file
      if (app.count("--seed")) j["seed"] = g.seed;
      if (app.count("--threads")) j["threads"] = g.threads;
      if (app.count("--format")) j["format"] = g.format;
      if (app.count("--out")) j["output"] = g.out;
      const auto cfg = config_from_json(j);
      const auto report = run_convergence_experiment(cfg);
      if (cfg.output) {
        emit_report(report, cfg.format, *cfg.output);
      } else if (cfg.format == ReportFormat::Json) {
        std::cout << report_to_json(report).dump(2) << '\n';
      } else {
        std::cout << report_to_csv(report);
      }
      return 0;
    }
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << '\n';
    return 3;
  } catch (const AccuracyError& e) {
    std::cerr << "accuracy error: " << e.what() << " (estimate " << format_double(e.estimate()) << ", error "
              << format_double(e.error()) << ")\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
