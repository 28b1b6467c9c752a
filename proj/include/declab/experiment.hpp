#pragma once

// Config-driven experiment runner: plain-text key=value configs with a
// versioned schema, deterministic scenario pipelines over the other modules,
// checksummed artifact manifests, and the command-line binding.

#include <map>
#include <string>
#include <vector>

namespace declab {

enum class Scenario {
  ThetaCheck,
  Cutoff,
  KernelVerify,
  ResolventSweep,
  BornSeries,
  LapCheck,
  WaveDecay,
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string &name); // throws on unknown

struct ExperimentConfig {
  int schema_version = 1;
  Scenario scenario = Scenario::ThetaCheck;
  std::string out_dir = "runs/out";
  unsigned long seed = 0;
  std::map<std::string, std::string> params; // scenario-specific settings

  // key=value lines; '#' starts a comment. Unknown scenario or missing
  // schema_version/scenario keys throw std::invalid_argument.
  static ExperimentConfig parse(const std::string &text);
  static ExperimentConfig load(const std::string &path); // throws on missing

  // canonical form: sorted keys, one per line; parse(serialize()) is the
  // identity and the content hash ignores the original key order
  std::string serialize() const;
  std::string content_hash() const;

  double num(const std::string &key, double fallback) const;
  std::string str(const std::string &key, const std::string &fallback) const;
};

struct ManifestCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string note;
};

struct RunManifest {
  std::string scenario;
  std::string config_hash;
  std::string version = "declab-1.0";
  double wall_time_s = 0.0;
  std::vector<ManifestCheck> checks;
  std::vector<std::pair<std::string, std::string>> artifacts; // path, checksum

  bool all_pass() const;
  std::string to_json() const;
};

// FNV-1a digest of a byte string, as used for artifact checksums.
std::string content_digest(const std::string &bytes);

// Executes the scenario pipeline, writes artifacts plus manifest.json under
// the output directory (DECAYLAB_OUT overrides it), and returns the manifest.
RunManifest run_experiment(const ExperimentConfig &config);

// Subcommands: check-theta, build-cutoff, kernel-verify, resolvent-sweep,
// born-series, lap-check, wave-decay, report. Exit code 0 when every check
// passes, 1 when a check fails, 2 on usage or config errors.
int cli(int argc, const char *const *argv);

} // namespace declab
