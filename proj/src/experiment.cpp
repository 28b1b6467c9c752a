#include "declab/experiment.hpp"

#include "declab/born.hpp"
#include "declab/checks.hpp"
#include "declab/cutoff.hpp"
#include "declab/kernels.hpp"
#include "declab/numerics.hpp"
#include "declab/theta.hpp"
#include "declab/wave.hpp"
#include "declab/weights.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace declab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string scenario_name(Scenario s) {
  switch (s) {
  case Scenario::ThetaCheck: return "theta-check";
  case Scenario::Cutoff: return "cutoff";
  case Scenario::KernelVerify: return "kernel-verify";
  case Scenario::ResolventSweep: return "resolvent-sweep";
  case Scenario::BornSeries: return "born-series";
  case Scenario::LapCheck: return "lap-check";
  case Scenario::WaveDecay: return "wave-decay";
  }
  return "?";
}

Scenario scenario_from_name(const std::string &name) {
  for (Scenario s : {Scenario::ThetaCheck, Scenario::Cutoff,
                     Scenario::KernelVerify, Scenario::ResolventSweep,
                     Scenario::BornSeries, Scenario::LapCheck,
                     Scenario::WaveDecay})
    if (scenario_name(s) == name)
      return s;
  throw std::invalid_argument("unknown scenario: " + name);
}

namespace {

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

} // namespace

ExperimentConfig ExperimentConfig::parse(const std::string &text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: malformed line '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  if (!kv.count("schema_version"))
    throw std::invalid_argument("config: missing schema_version");
  if (!kv.count("scenario"))
    throw std::invalid_argument("config: missing scenario");
  ExperimentConfig cfg;
  cfg.schema_version = std::stoi(kv["schema_version"]);
  if (cfg.schema_version != 1)
    throw std::invalid_argument("config: unsupported schema_version");
  cfg.scenario = scenario_from_name(kv["scenario"]);
  kv.erase("schema_version");
  kv.erase("scenario");
  if (kv.count("out")) {
    cfg.out_dir = kv["out"];
    kv.erase("out");
  }
  if (kv.count("seed")) {
    cfg.seed = std::stoul(kv["seed"]);
    kv.erase("seed");
  }
  cfg.params = std::move(kv);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

std::string ExperimentConfig::serialize() const {
  // std::map keeps the keys sorted, so this form is canonical
  std::ostringstream out;
  out << "schema_version=" << schema_version << "\n";
  out << "scenario=" << scenario_name(scenario) << "\n";
  out << "out=" << out_dir << "\n";
  out << "seed=" << seed << "\n";
  for (const auto &[k, v] : params)
    out << k << "=" << v << "\n";
  return out.str();
}

std::string content_digest(const std::string &bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

std::string ExperimentConfig::content_hash() const {
  return content_digest(serialize());
}

double ExperimentConfig::num(const std::string &key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : std::stod(it->second);
}

std::string ExperimentConfig::str(const std::string &key,
                                  const std::string &fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

bool RunManifest::all_pass() const {
  for (const auto &c : checks)
    if (!c.pass)
      return false;
  return true;
}

std::string RunManifest::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["wall_time_s"] = wall_time_s;
  j["checks"] = json::array();
  for (const auto &c : checks)
    j["checks"].push_back(
        {{"name", c.name}, {"pass", c.pass}, {"value", c.value},
         {"note", c.note}});
  j["artifacts"] = json::array();
  for (const auto &[path, sum] : artifacts)
    j["artifacts"].push_back({{"path", path}, {"checksum", sum}});
  return j.dump(2);
}

namespace {

struct Runner {
  const ExperimentConfig &cfg;
  fs::path dir;
  RunManifest man;

  void artifact(const std::string &name, const std::string &content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    man.artifacts.emplace_back(name, content_digest(content));
  }
  void check(const std::string &name, bool pass, double value,
             const std::string &note = "") {
    man.checks.push_back({name, pass, value, note});
  }

  ThetaProfile make_profile() const {
    const double s = cfg.num("s", 0.5);
    const std::string kind = cfg.str("profile", "exp_power");
    if (kind == "exp_power")
      return ThetaProfile::exp_power(s);
    if (kind == "exp_power_log")
      return ThetaProfile::exp_power_log(s, cfg.num("beta", 1.0));
    throw std::invalid_argument("config: unknown profile kind " + kind);
  }

  Grid make_grid(Geometry geo, int n_def, double R_def) const {
    Grid grid;
    grid.geometry = geo;
    grid.n = int(cfg.num("n", n_def));
    grid.R = cfg.num("R", R_def);
    grid.d = int(cfg.num("d", 3));
    grid.a = cfg.num("a", 0.0);
    grid.validate();
    return grid;
  }

  PotentialSpec make_potential(const Grid &grid,
                               const ThetaProfile &prof) const {
    const double aV = cfg.num("amp_V", 0.3);
    const double ab = cfg.num("amp_b", 0.2);
    const bool case_a = cfg.str("case", "a") == "a";
    auto th = [&prof](double x) {
      return std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
    };
    return PotentialSpec::build(
        grid, [=](double x) { return aV * th(x); },
        case_a ? std::function<double(double)>(
                     [=](double x) { return ab * th(x); })
               : nullptr,
        prof, case_a ? PotCase::A : PotCase::B, cfg.num("C", 1.0),
        cfg.num("c", 1.0));
  }

  void theta_check() {
    const auto prof = make_profile();
    std::vector<double> r_grid;
    for (double r = 0.0; r <= 40.0; r += 0.25)
      r_grid.push_back(r);
    std::vector<std::pair<double, double>> pairs;
    for (double r = 0.5; r <= 20.0; r *= 2.0)
      for (double q = 0.5; q <= 20.0; q *= 2.0)
        pairs.emplace_back(r, q);
    const auto rep = check_theta_conditions(prof, r_grid, pairs);
    check("theta-conditions", !rep.violation, rep.Ctilde);
    json j;
    j["profile"] = json::parse(prof.serialize());
    j["Ctilde"] = rep.Ctilde;
    j["violation"] = rep.violation;
    artifact("theta.json", j.dump(2));
  }

  void cutoff() {
    const double s = cfg.num("s", 0.5);
    try {
      const auto cut = build_cutoff(s);
      const double mass =
          adaptive_simpson([&](double x) { return cut.zeta(x); }, 0.5, 2.0,
                           1e-13);
      check("unit-mass", std::abs(mass - 1.0) < 1e-10, mass);
      check("support", cut.zeta(0.4) == 0.0 && cut.zeta(2.1) == 0.0, 0.0);
      std::ostringstream csv;
      csv << "sigma,zeta\n";
      for (int i = 0; i <= 300; ++i) {
        const double sig = 0.25 + 2.0 * i / 300.0;
        char line[64];
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", sig,
                      cut.zeta(sig));
        csv << line;
      }
      artifact("zeta.csv", csv.str());
      artifact("cutoff.json", cut.serialize());
    } catch (const std::domain_error &e) {
      check("admissible", false, s, e.what());
    }
  }

  void kernel_verify() {
    const int d = int(cfg.num("d", 3));
    const std::complex<double> lambda(cfg.num("lambda", 2.0), 0.0);
    std::vector<double> r_grid;
    for (double r = 0.25; r <= 20.0; r += 0.25)
      r_grid.push_back(r);
    if (d % 2 == 1) {
      double worst = 0.0;
      if (d == 3)
        for (double r : r_grid)
          worst = std::max(worst,
                           std::abs(std::abs(free_kernel_odd(3, lambda, r)) *
                                        4.0 * M_PI * r -
                                    1.0));
      check("kernel-modulus", worst < 1e-12, worst);
      const double hres =
          huygens_residual(d, cfg.num("t", 1.5), int(cfg.num("n", 2048)));
      check("huygens", hres < 1e-3, hres);
      artifact("kernel.csv", kernel_profile_csv(d, lambda, r_grid));
    } else {
      const auto prof = calibrate_Cd(d, int(cfg.num("n", 1024)));
      check("cosine-shape", prof.residual < 1e-2, prof.residual);
      artifact("cosine.json", prof.manifest());
    }
  }

  void resolvent_sweep() {
    const auto prof = make_profile();
    const auto grid = make_grid(Geometry::Radial, 200, 20.0);
    const auto pot = make_potential(grid, prof);
    const auto op = build_operator(grid, pot);
    const auto mu = mu_vector(grid, prof, cfg.num("c", 1.0));
    std::vector<double> lambdas;
    {
      std::istringstream in(cfg.str("lambdas", "1,2,4"));
      std::string tok;
      while (std::getline(in, tok, ','))
        lambdas.push_back(std::stod(tok));
    }
    const int k_max = int(cfg.num("k_max", 3));
    const bool case_a = cfg.str("case", "a") == "a";
    std::vector<SweepRow> rows;
    bool finite = true;
    for (double lam : lambdas)
      for (int ell = 0; ell <= 1; ++ell)
        for (int k = 0; k <= k_max; ++k) {
          const double nrm = weighted_deriv_norm_bc(op, lam, ell, k, mu);
          finite = finite && std::isfinite(nrm) && nrm > 0.0;
          rows.push_back({lam, 0.0, ell, k, std::log(nrm), "radiation",
                          case_a ? "a" : "b"});
        }
    check("finite-norms", finite, double(rows.size()));
    artifact("sweep.csv", sweep_csv(rows));
  }

  void born_series() {
    const auto prof = make_profile();
    const bool case_a = cfg.str("case", "a") == "a";
    const auto grid = case_a
                          ? make_grid(Geometry::Radial, 300, 40.0)
                          : make_grid(Geometry::ExteriorRadial, 599, 42.0);
    const auto pot = make_potential(grid, prof);
    const double z = cfg.num("z", 2.0);
    const double lambda = cfg.num("lambda", case_a ? 2.2 : 2.005);
    const auto rep = born_series_assemble(grid, pot, z, lambda);
    check("assembly-match", rep.rel_error < 1e-7, rep.rel_error);
    if (case_a)
      check("gradient-match", rep.rel_error_grad < 1e-7, rep.rel_error_grad);
    json j;
    j["z"] = z;
    j["lambda"] = lambda;
    j["rel_error"] = rep.rel_error;
    j["rel_error_grad"] = rep.rel_error_grad;
    j["T3_norm"] = rep.T3_norm;
    j["F2_norm"] = rep.F2_norm;
    j["K_norm"] = rep.K_norm;
    artifact("born.json", j.dump(2));
  }

  void lap_check() {
    const auto prof = make_profile();
    const auto grid = make_grid(Geometry::Radial, 400, 40.0);
    const auto pot = make_potential(grid, prof);
    const auto op = build_operator(grid, pot);
    const auto mu = mu_vector(grid, prof, cfg.num("c", 1.0));
    const double lambda = cfg.num("lambda", 2.0);
    const std::vector<double> eps_seq{1e-1, 1e-2, 1e-3, 1e-4};
    const auto rep = lap_continuity_check(op, lambda, cfg.num("w_s", 1.0),
                                          eps_seq);
    check("holder-exponent", rep.pass, rep.theta);
    const auto low = lowfreq_check(op, {0.05, 0.1, 0.2}, 1e-3, mu);
    check("lowfreq-bounded", low.bounded, low.sup);
    json j;
    j["lambda"] = lambda;
    j["holder_theta"] = rep.theta;
    j["holder_C"] = rep.C;
    j["cauchy"] = rep.cauchy;
    j["lowfreq_sup"] = low.sup;
    j["lowfreq_bounded"] = low.bounded;
    artifact("lap.json", j.dump(2));
  }

  void wave_decay() {
    const auto prof = make_profile();
    const auto grid = make_grid(Geometry::Radial, 600, 60.0);
    const auto pot = make_potential(grid, prof);
    const auto op = build_operator(grid, pot);
    const auto dec = decompose(op);
    const auto mu = mu_vector(grid, prof, cfg.num("c", 1.0));
    const double amp = cfg.num("amp_data", 1.0);
    const double r0 = cfg.num("data_center", 2.0);
    Eigen::VectorXcd f1(grid.n),
        f2 = Eigen::VectorXcd::Zero(grid.n);
    for (int i = 0; i < grid.n; ++i) {
      const double r = grid.node(i);
      f1(i) = amp * r *
              (std::exp(-(r - r0) * (r - r0)) + std::exp(-(r + r0) * (r + r0)));
    }
    const double T = cfg.num("T", 60.0);
    const int nt = int(cfg.num("nt", 120));
    std::vector<double> times;
    for (int i = 0; i <= nt; ++i)
      times.push_back(T * i / nt);
    const double delta = cfg.num("delta", 0.5);
    const auto cut = build_cutoff(cfg.num("cutoff_s", 0.5));
    const auto trace =
        compute_trace(dec, grid, pot, mu, f1, f2, times, delta, &cut);
    artifact("trace.csv", trace.to_csv());
    if (f1.norm() == 0.0 && f2.norm() == 0.0) {
      check("fit", true, 0.0, "skipped: zero initial data");
      return;
    }
    const auto seq = WeightSequence::factorial_power(prof.s());
    const auto fit = fit_decay(trace, seq, prof);
    check("envelope", fit.residual <= 10.0, fit.residual);
    check("s-hat", fit.s_hat >= 0.8 * prof.s(), fit.s_hat);
    artifact("fit.json", fit.to_json());
  }
};

int report_command(const std::string &dir_arg) {
  const fs::path dir(dir_arg);
  if (!fs::is_directory(dir)) {
    std::fprintf(stderr, "report: %s is not a directory\n", dir_arg.c_str());
    return 2;
  }
  std::vector<fs::path> manifests;
  for (const auto &entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "manifest.json")
      manifests.push_back(entry.path());
  std::sort(manifests.begin(), manifests.end());
  std::ostringstream csv;
  csv << "scenario,config_hash,pass,wall_time_s,checks\n";
  bool all_ok = true;
  for (const auto &path : manifests) {
    std::ifstream in(path);
    json j = json::parse(in);
    bool ok = true;
    for (const auto &c : j["checks"])
      ok = ok && c["pass"].get<bool>();
    all_ok = all_ok && ok;
    csv << j["scenario"].get<std::string>() << ','
        << j["config_hash"].get<std::string>() << ',' << (ok ? 1 : 0) << ','
        << j["wall_time_s"].get<double>() << ',' << j["checks"].size()
        << '\n';
    std::printf("%-16s %s %s (%zu checks)\n",
                j["scenario"].get<std::string>().c_str(),
                j["config_hash"].get<std::string>().c_str(),
                ok ? "PASS" : "FAIL", j["checks"].size());
  }
  std::ofstream out(dir / "summary.csv", std::ios::binary);
  out << csv.str();
  std::printf("%zu run(s), %s\n", manifests.size(),
              all_ok ? "all passing" : "failures present");
  return all_ok ? 0 : 1;
}

void usage() {
  std::fprintf(
      stderr,
      "usage: declab <subcommand> [--config PATH] [--out DIR] [--seed N]\n"
      "              [--threads N] [--s VALUE]\n"
      "subcommands: check-theta build-cutoff kernel-verify resolvent-sweep\n"
      "             born-series lap-check wave-decay report [--dir DIR]\n");
}

} // namespace

RunManifest run_experiment(const ExperimentConfig &config) {
  const auto start = std::chrono::steady_clock::now();
  Runner run{config, fs::path(), RunManifest{}};
  const char *env = std::getenv("DECAYLAB_OUT");
  run.dir = fs::path(env && *env ? env : config.out_dir.c_str());
  fs::create_directories(run.dir);
  run.man.scenario = scenario_name(config.scenario);
  run.man.config_hash = config.content_hash();

  switch (config.scenario) {
  case Scenario::ThetaCheck: run.theta_check(); break;
  case Scenario::Cutoff: run.cutoff(); break;
  case Scenario::KernelVerify: run.kernel_verify(); break;
  case Scenario::ResolventSweep: run.resolvent_sweep(); break;
  case Scenario::BornSeries: run.born_series(); break;
  case Scenario::LapCheck: run.lap_check(); break;
  case Scenario::WaveDecay: run.wave_decay(); break;
  }

  run.man.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::ofstream out(run.dir / "manifest.json", std::ios::binary);
  out << run.man.to_json() << "\n";
  return run.man;
}

int cli(int argc, const char *const *argv) {
  if (argc < 2) {
    usage();
    return 2;
  }
  const std::string sub = argv[1];
  static const std::map<std::string, Scenario> subs{
      {"check-theta", Scenario::ThetaCheck},
      {"build-cutoff", Scenario::Cutoff},
      {"kernel-verify", Scenario::KernelVerify},
      {"resolvent-sweep", Scenario::ResolventSweep},
      {"born-series", Scenario::BornSeries},
      {"lap-check", Scenario::LapCheck},
      {"wave-decay", Scenario::WaveDecay}};

  std::map<std::string, std::string> flags;
  for (int i = 2; i < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag.rfind("--", 0) != 0 || i + 1 >= argc) {
      usage();
      return 2;
    }
    flags[flag.substr(2)] = argv[i + 1];
  }

  try {
    if (sub == "report")
      return report_command(flags.count("dir") ? flags["dir"] : ".");
    const auto it = subs.find(sub);
    if (it == subs.end()) {
      usage();
      return 2;
    }
    ExperimentConfig cfg;
    if (flags.count("config"))
      cfg = ExperimentConfig::load(flags["config"]);
    cfg.scenario = it->second;
    if (flags.count("out"))
      cfg.out_dir = flags["out"];
    if (flags.count("seed"))
      cfg.seed = std::stoul(flags["seed"]);
    if (flags.count("threads"))
      cfg.params["threads"] = flags["threads"];
    if (flags.count("s"))
      cfg.params["s"] = flags["s"];

    const auto man = run_experiment(cfg);
    for (const auto &c : man.checks)
      std::printf("%-20s %s  %.6g %s\n", c.name.c_str(),
                  c.pass ? "PASS" : "FAIL", c.value, c.note.c_str());
    return man.all_pass() ? 0 : 1;
  } catch (const std::invalid_argument &e) {
    std::fprintf(stderr, "%s: %s\n", sub.c_str(), e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "%s: %s\n", sub.c_str(), e.what());
    return 1;
  }
}

} // namespace declab
