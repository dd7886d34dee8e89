#include "lab.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "fields.hpp"
#include "loglaw/errors.hpp"

#ifndef LOGLAW_CONFIG_DIR
#define LOGLAW_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;

namespace loglaw::lab {

std::string to_string(Status s) {
  switch (s) {
    case Status::complete:
      return "complete";
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::inconclusive:
      return "inconclusive";
  }
  return "fail";
}

int exit_code(Status s) {
  switch (s) {
    case Status::complete:
    case Status::pass:
      return 0;
    case Status::inconclusive:
      return 2;
    case Status::fail:
      return 1;
  }
  return 1;
}

json load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {

Job parse(const json& config, const Overrides& overrides, std::vector<std::string>& errors) {
  Fields top(&config, "", errors);
  Common common;
  common.experiment = top.text("experiment", std::nullopt, kExperimentKinds);
  common.description = top.text("description", "");
  common.seed = overrides.seed.value_or(top.integer("seed", 0));
  auto threads = top.integer("threads", 1, 1);
  if (threads > 1024) top.error("threads", "must be at most 1024");
  common.threads = overrides.threads.value_or(static_cast<unsigned>(std::min<std::uint64_t>(threads, 1024)));
  if (common.threads == 0) errors.push_back("--threads: must be at least 1");

  Job job;
  const auto& kind = common.experiment;
  if (kind == "loglaw" || kind == "meanfield-loglaw") {
    job = parse_loglaw(top, common);
  } else if (kind == "dimension") {
    job = parse_dimension(top, common);
  } else if (kind == "converge") {
    job = parse_converge(top, common);
  } else if (kind == "lossmem") {
    job = parse_lossmem(top, common);
  } else if (kind == "meanfield-fixed-point") {
    job = parse_fixed_point(top, common);
  } else if (kind == "borel-cantelli") {
    job = parse_borel_cantelli(top, common);
  } else if (kind == "verify-assumptions") {
    job = parse_verify(top, common);
  }
  // Unknown keys are only meaningful once the kind is known.
  if (!kind.empty()) top.finish();
  return job;
}

std::string joined(const std::vector<std::string>& errors) {
  std::string out = "invalid config:";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& stamp, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << stamp << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::vector<std::string> validate(const json& config, const Overrides& overrides) {
  std::vector<std::string> errors;
  parse(config, overrides, errors);
  return errors;
}

Outcome run(const json& config, const Overrides& overrides) {
  std::vector<std::string> errors;
  Job job = parse(config, overrides, errors);
  if (!errors.empty() || !job) {
    if (errors.empty()) errors.push_back("config: incomplete");
    throw ConfigError(joined(errors));
  }
  return job();
}

void write_outcome(const Outcome& outcome, const fs::path& out, bool timestamp) {
  fs::path partial = out;
  partial += ".partial";
  fs::remove_all(partial);
  try {
    fs::create_directories(partial / "data");
    std::string stamp = timestamp ? "# generated " + utc_now() + "\n" : "";
    for (const auto& d : outcome.data) write_file(partial / "data" / d.name, stamp, d.text);
    write_file(partial / "report.txt", stamp, outcome.report);
    json summary = outcome.summary;
    if (timestamp) summary["generated"] = stamp.substr(12, stamp.size() - 13);
    write_file(partial / "summary.json", "", summary.dump(2) + "\n");
    fs::remove_all(out);
    fs::rename(partial, out);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(partial, ec);
    throw;
  }
}

fs::path config_dir() {
  if (const char* env = std::getenv("LOGLAW_CONFIG_DIR"); env && *env) return env;
  return LOGLAW_CONFIG_DIR;
}

std::vector<Bundled> bundled_configs() {
  std::vector<Bundled> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(config_dir(), ec)) {
    if (entry.path().extension() != ".json") continue;
    Bundled b;
    b.name = entry.path().stem().string();
    b.path = entry.path();
    try {
      auto j = load_config(entry.path());
      b.experiment = j.value("experiment", "");
      b.description = j.value("description", "");
    } catch (const std::exception&) {
      b.description = "(unreadable)";
    }
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(), [](const Bundled& a, const Bundled& b) { return a.name < b.name; });
  return out;
}

fs::path resolve_config(const std::string& name_or_path) {
  fs::path p(name_or_path);
  if (fs::exists(p)) return p;
  fs::path bundled = config_dir() / (name_or_path + ".json");
  if (p.extension().empty() && fs::exists(bundled)) return bundled;
  throw ConfigError("no such config: " + name_or_path);
}

}  // namespace loglaw::lab
