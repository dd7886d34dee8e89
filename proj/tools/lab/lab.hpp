#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace loglaw::lab {

using nlohmann::json;

// Experiment kinds understood by `run`.
inline const std::vector<std::string> kExperimentKinds{
    "loglaw", "dimension", "converge", "lossmem", "meanfield-fixed-point",
    "meanfield-loglaw", "borel-cantelli", "verify-assumptions"};

enum class Status { complete, pass, fail, inconclusive };
std::string to_string(Status s);
// 0 for pass/complete, 2 for inconclusive, 1 otherwise.
int exit_code(Status s);

// Command-line overrides of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

struct DataFile {
  std::string name;  // relative to data/
  std::string text;
};

struct Outcome {
  Status status = Status::complete;
  json summary;
  std::string report;
  std::vector<DataFile> data;
};

// Reads a JSON file; parse errors become ConfigError.
json load_config(const std::filesystem::path& path);

// Every violated key of `config`, one message per line; empty when valid.
// Builds the families too, so admissibility errors show up here.
std::vector<std::string> validate(const json& config, const Overrides& overrides = {});

// Validates, then runs. Throws ConfigError listing all violations.
Outcome run(const json& config, const Overrides& overrides = {});

// Writes summary.json, report.txt and data/*.csv into `out` through a
// sibling "<out>.partial" directory that is renamed at the end; nothing is
// left behind when writing fails. With `timestamp`, CSVs and the report
// start with a "# generated ..." line.
void write_outcome(const Outcome& outcome, const std::filesystem::path& out, bool timestamp);

struct Bundled {
  std::string name;
  std::string experiment;
  std::string description;
  std::filesystem::path path;
};

// Bundled configs, sorted by name. The directory is LOGLAW_CONFIG_DIR from
// the environment when set, else the one baked in at build time.
std::filesystem::path config_dir();
std::vector<Bundled> bundled_configs();

// A path to a file, or the name of a bundled config.
std::filesystem::path resolve_config(const std::string& name_or_path);

}  // namespace loglaw::lab
