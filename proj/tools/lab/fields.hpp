#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lab.hpp"
#include "loglaw/meanfield.hpp"
#include "loglaw/stats.hpp"
#include "loglaw/systems.hpp"

namespace loglaw::lab {

// Typed access to one JSON object. Problems are appended to a shared error
// list instead of thrown, so one pass reports every bad key. `finish` flags
// the keys nobody asked for.
class Fields {
 public:
  Fields(const json* node, std::string path, std::vector<std::string>& errors);

  bool present() const noexcept { return node_ != nullptr; }
  bool has(const std::string& key);
  const std::string& path() const noexcept { return path_; }
  std::string key_path(const std::string& key) const;
  void error(const std::string& key, const std::string& message);

  double number(const std::string& key, std::optional<double> fallback = std::nullopt);
  std::uint64_t integer(const std::string& key, std::optional<std::uint64_t> fallback,
                        std::uint64_t min = 0);
  std::string text(const std::string& key, std::optional<std::string> fallback,
                   const std::vector<std::string>& allowed = {});
  bool flag(const std::string& key, bool fallback);
  // [lo, hi] with lo <= hi.
  std::optional<std::pair<double, double>> range(const std::string& key);
  std::vector<double> numbers(const std::string& key);
  // A nested object; absent objects give a Fields with present() == false
  // unless `required`.
  Fields object(const std::string& key, bool required = false);
  std::vector<Fields> objects(const std::string& key);

  void finish();

 private:
  const json* find(const std::string& key);

  const json* node_;
  std::string path_;
  std::vector<std::string>* errors_;
  std::set<std::string> seen_;
};

// A family described in a config. `make` is deferred because the induced
// mean-field family does real work at construction.
struct FamilySpec {
  std::string kind;
  PhaseSpace space = PhaseSpace::circle;
  bool has_limit = false;
  std::function<FamilyPtr()> make;
  // Mean-field only.
  std::shared_ptr<const MeanFieldSystem> system;
  std::optional<GridDensity> initial;
  std::function<MeanFieldConfig(double delta)> with_delta;
};

std::optional<FamilySpec> parse_family(Fields f, std::uint64_t seed);

// Sampler of initial conditions: the initial density of a mean-field family,
// Lebesgue otherwise.
Sampler initial_sampler(const FamilySpec& spec);

using Job = std::function<Outcome()>;

struct Common {
  std::string experiment;
  std::string description;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Per-kind parsers. Each reads its keys from `top`, records violations, and
// returns a job that runs the experiment.
Job parse_loglaw(Fields& top, const Common& common);
Job parse_dimension(Fields& top, const Common& common);
Job parse_converge(Fields& top, const Common& common);
Job parse_lossmem(Fields& top, const Common& common);
Job parse_fixed_point(Fields& top, const Common& common);
Job parse_borel_cantelli(Fields& top, const Common& common);
Job parse_verify(Fields& top, const Common& common);

// Tally of expectation checks for summary.json and report.txt.
class Checks {
 public:
  void add(const std::string& name, bool pass, json measured, json bound);
  bool any() const noexcept { return !list_.empty(); }
  bool ok() const noexcept { return ok_; }
  const json& list() const noexcept { return list_; }
  std::string lines() const;

 private:
  json list_ = json::array();
  bool ok_ = true;
};

}  // namespace loglaw::lab
