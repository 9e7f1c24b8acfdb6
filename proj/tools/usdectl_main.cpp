// usdectl: run disturbance-rejection simulations, compare the four motion
// controllers, and certify super-twisting gains.
//
// Exit codes: 0 success, 1 certification failure, 2 configuration or file
// error, 3 diverged simulation.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "usde/analysis.hpp"
#include "usde/scenario.hpp"

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("USDE_CTL_LOG");
  if (env == nullptr) return LogLevel::Info;
  const std::string v = env;
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[usdectl] " << msg << "\n";
}

void debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) {
    std::cerr << "[usdectl:debug] " << msg << "\n";
  }
}

constexpr int kExitOk = 0;
constexpr int kExitCertFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

std::vector<usde::ControllerVariant> parse_variants(const std::string& name) {
  using usde::ControllerVariant;
  if (name == "all") {
    return {ControllerVariant::Ctc, ControllerVariant::Fg,
            ControllerVariant::Ag, ControllerVariant::St};
  }
  const auto v = usde::variant_from_string(name);
  if (!v) {
    throw usde::ScenarioError("unknown controller '" + name +
                              "' (valid: ctc, fg, ag, st, all)");
  }
  return {*v};
}

bool parse_window(const std::string& s, double& t0, double& t1) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return false;
  try {
    t0 = std::stod(s.substr(0, comma));
    t1 = std::stod(s.substr(comma + 1));
  } catch (...) {
    return false;
  }
  return t1 > t0;
}

struct CommonOpts {
  std::string scenario_path;
  std::string controller = "";
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  std::string window;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_window) {
  cmd->add_option("--scenario", o.scenario_path, "Scenario file (TOML)")
      ->required();
  cmd->add_option("--controller", o.controller,
                  "Controller variant: ctc|fg|ag|st|all");
  cmd->add_option("-o,--out", o.out_dir, "Output directory");
  cmd->add_option("--seed", o.seed, "Override the scenario seed")
      ->each([&o](const std::string&) { o.seed_set = true; });
  cmd->add_option("--jobs", o.jobs, "Parallel simulation workers")
      ->check(CLI::PositiveNumber);
  if (with_window) {
    cmd->add_option("--window", o.window,
                    "Metrics window 't0,t1' (default: full run)");
  }
}

int cmd_run(const CommonOpts& o) {
  const usde::ScenarioFile sf = usde::load_scenario_file(o.scenario_path);
  usde::Scenario sc = sf.scenario;
  if (o.seed_set) sc.seed = o.seed;

  const auto variants = o.controller.empty()
                            ? std::vector{sf.default_variant}
                            : parse_variants(o.controller);

  std::filesystem::create_directories(o.out_dir);
  bool any_diverged = false;
  for (const auto v : variants) {
    debug(std::string("running variant ") + usde::to_string(v));
    const usde::Trace trace = usde::run_scenario(sc, v, sf.control);
    const std::string path =
        o.out_dir + "/" + usde::to_string(v) + "_trace.csv";
    usde::write_trace_csv(path, trace);
    info(std::string(usde::to_string(v)) + ": " +
         std::to_string(trace.records.size()) + " steps -> " + path +
         (trace.diverged ? "  [DIVERGED]" : ""));
    any_diverged = any_diverged || trace.diverged;
  }
  if (any_diverged) {
    std::cerr << "error: at least one run diverged (non-finite state)\n";
    return kExitDiverged;
  }
  return kExitOk;
}

int cmd_compare(const CommonOpts& o, int long_stride) {
  const usde::ScenarioFile sf = usde::load_scenario_file(o.scenario_path);
  usde::Scenario sc = sf.scenario;
  if (o.seed_set) sc.seed = o.seed;

  const auto variants =
      parse_variants(o.controller.empty() ? "all" : o.controller);

  double t0 = 0.0, t1 = sc.duration;
  if (!o.window.empty() && !parse_window(o.window, t0, t1)) {
    throw usde::ScenarioError("--window: expected 't0,t1' with t1 > t0");
  }

  std::filesystem::create_directories(o.out_dir);
  const usde::ComparisonReport rep =
      usde::compare_controllers(sc, sf.control, variants, t0, t1, o.jobs);

  usde::write_metrics_csv(o.out_dir + "/metrics.csv", rep);
  usde::write_report_markdown(o.out_dir + "/report.md", rep);
  bool any_diverged = false;
  for (const auto& r : rep.results) {
    usde::write_trace_csv(
        o.out_dir + "/" + usde::to_string(r.variant) + "_trace.csv", r.trace);
    usde::write_long_csv(
        o.out_dir + "/" + usde::to_string(r.variant) + "_long.csv", r.trace,
        long_stride);
    if (r.diverged) {
      any_diverged = true;
      info(std::string(r.variant == usde::ControllerVariant::Ctc
                           ? "ctc"
                           : usde::to_string(r.variant)) +
           " diverged; excluded from rankings");
    }
  }
  info("metrics -> " + o.out_dir + "/metrics.csv, report -> " + o.out_dir +
       "/report.md");
  return any_diverged ? kExitDiverged : kExitOk;
}

struct CertifyOpts {
  std::vector<double> t1, t2, delta1, delta2;
  double v3_initial = 1.0;
  double theta0 = 0.5;
  double filter_k = 0.08;
};

int cmd_certify(const CertifyOpts& o) {
  if (o.t1.empty() || o.t1.size() != o.t2.size()) {
    std::cerr << "error: --t1 and --t2 need the same nonzero length\n";
    return kExitConfig;
  }
  auto broadcast = [&](std::vector<double> v, const char* name) {
    if (v.empty()) v.assign(o.t1.size(), 0.0);
    if (v.size() == 1) v.assign(o.t1.size(), v[0]);
    if (v.size() != o.t1.size()) {
      throw std::invalid_argument(std::string(name) +
                                  ": expected 1 or as many entries as --t1");
    }
    return v;
  };

  try {
    const auto d1 = broadcast(o.delta1, "--delta1");
    const auto d2 = broadcast(o.delta2, "--delta2");
    if (!(o.theta0 > 0.0 && o.theta0 < 1.0)) {
      throw std::invalid_argument("--theta0: must be in (0, 1)");
    }

    std::vector<usde::STGainCertificate> certs;
    bool all_ok = true;
    for (size_t i = 0; i < o.t1.size(); ++i) {
      certs.push_back(
          usde::st_gain_certificate(o.t1[i], o.t2[i], d1[i], d2[i]));
      const auto& c = certs.back();
      std::cout << "joint " << i + 1 << ": pd_ok=" << (c.pd_ok ? "yes" : "no")
                << " gamma=" << c.gamma << "\n";
      all_ok = all_ok && c.pd_ok;
    }
    if (!all_ok) {
      std::cout << "certificate FAILED for joints:";
      for (size_t i = 0; i < certs.size(); ++i) {
        if (!certs[i].pd_ok) std::cout << ' ' << i + 1;
      }
      std::cout << "\n";
      return kExitCertFail;
    }
    const double alpha3 = usde::alpha3_from(certs, o.filter_k);
    const double tf =
        usde::finite_time_bound(o.v3_initial, alpha3, o.theta0);
    std::cout << "alpha3=" << alpha3 << " t_f=" << tf
              << " (V3(0)=" << o.v3_initial << ", theta0=" << o.theta0
              << ")\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "usdectl: disturbance-estimator based motion control simulations"};
  app.require_subcommand(1);

  CommonOpts run_opts, cmp_opts;
  int long_stride = 10;
  CertifyOpts cert_opts;

  CLI::App* run = app.add_subcommand(
      "run", "Run one scenario and write per-variant trace CSVs");
  add_common(run, run_opts, false);

  CLI::App* cmp = app.add_subcommand(
      "compare", "Run several controllers on one scenario and write the "
                 "metrics/report files");
  add_common(cmp, cmp_opts, true);
  cmp->add_option("--long-stride", long_stride,
                  "Row decimation for the long-format plot CSV (1 = full)")
      ->check(CLI::PositiveNumber);

  CLI::App* cert = app.add_subcommand(
      "certify", "Check the super-twisting gain certificate per joint");
  cert->add_option("--t1", cert_opts.t1, "T1 diagonal entries")->required();
  cert->add_option("--t2", cert_opts.t2, "T2 diagonal entries")->required();
  cert->add_option("--delta1", cert_opts.delta1,
                   "Perturbation bounds delta1 (scalar broadcast allowed)");
  cert->add_option("--delta2", cert_opts.delta2,
                   "Perturbation bounds delta2 (scalar broadcast allowed)");
  cert->add_option("--v3-initial", cert_opts.v3_initial, "V3(0) for t_f");
  cert->add_option("--theta0", cert_opts.theta0, "theta0 in (0,1)");
  cert->add_option("--filter-k", cert_opts.filter_k, "estimator filter k");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (cmp->parsed()) return cmd_compare(cmp_opts, long_stride);
    if (cert->parsed()) return cmd_certify(cert_opts);
  } catch (const usde::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
