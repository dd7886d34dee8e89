#include "fields.hpp"

#include <cmath>
#include <sstream>

#include "loglaw/errors.hpp"

namespace loglaw::lab {

Fields::Fields(const json* node, std::string path, std::vector<std::string>& errors)
    : node_(node), path_(std::move(path)), errors_(&errors) {
  if (node_ && !node_->is_object()) {
    errors_->push_back((path_.empty() ? std::string("config") : path_) + ": must be an object");
    node_ = nullptr;
  }
}

std::string Fields::key_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

void Fields::error(const std::string& key, const std::string& message) {
  errors_->push_back(key_path(key) + ": " + message);
}

const json* Fields::find(const std::string& key) {
  seen_.insert(key);
  if (!node_) return nullptr;
  auto it = node_->find(key);
  return it == node_->end() ? nullptr : &*it;
}

bool Fields::has(const std::string& key) {
  seen_.insert(key);
  return node_ && node_->contains(key);
}

double Fields::number(const std::string& key, std::optional<double> fallback) {
  const json* v = find(key);
  if (!v) {
    if (!fallback) error(key, "required number is missing");
    return fallback.value_or(0.0);
  }
  if (!v->is_number() || !std::isfinite(v->get<double>())) {
    error(key, "must be a finite number");
    return fallback.value_or(0.0);
  }
  return v->get<double>();
}

std::uint64_t Fields::integer(const std::string& key, std::optional<std::uint64_t> fallback,
                              std::uint64_t min) {
  const json* v = find(key);
  if (!v) {
    if (!fallback) error(key, "required integer is missing");
    return fallback.value_or(min);
  }
  // 1e6 style literals are accepted when they are whole numbers.
  if (v->is_number_float()) {
    double d = v->get<double>();
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) {
      auto n = static_cast<std::uint64_t>(d);
      if (n >= min) return n;
    }
  } else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
    auto n = v->get<std::uint64_t>();
    if (n >= min) return n;
  }
  error(key, "must be an integer >= " + std::to_string(min));
  return fallback.value_or(min);
}

std::string Fields::text(const std::string& key, std::optional<std::string> fallback,
                         const std::vector<std::string>& allowed) {
  const json* v = find(key);
  if (!v) {
    if (!fallback) error(key, "required string is missing");
    return fallback.value_or("");
  }
  if (!v->is_string()) {
    error(key, "must be a string");
    return fallback.value_or("");
  }
  auto s = v->get<std::string>();
  if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    error(key, "'" + s + "' is not one of " + list);
    return fallback.value_or("");
  }
  return s;
}

bool Fields::flag(const std::string& key, bool fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_boolean()) {
    error(key, "must be true or false");
    return fallback;
  }
  return v->get<bool>();
}

std::optional<std::pair<double, double>> Fields::range(const std::string& key) {
  const json* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number() ||
      (*v)[0].get<double>() > (*v)[1].get<double>()) {
    error(key, "must be [lo, hi] with lo <= hi");
    return std::nullopt;
  }
  return std::pair{(*v)[0].get<double>(), (*v)[1].get<double>()};
}

std::vector<double> Fields::numbers(const std::string& key) {
  const json* v = find(key);
  std::vector<double> out;
  if (!v) return out;
  if (!v->is_array() || v->empty()) {
    error(key, "must be a non-empty array of numbers");
    return out;
  }
  for (const auto& x : *v) {
    if (!x.is_number()) {
      error(key, "must be a non-empty array of numbers");
      return {};
    }
    out.push_back(x.get<double>());
  }
  return out;
}

Fields Fields::object(const std::string& key, bool required) {
  const json* v = find(key);
  if (!v && required) error(key, "required object is missing");
  return Fields(v, key_path(key), *errors_);
}

std::vector<Fields> Fields::objects(const std::string& key) {
  const json* v = find(key);
  std::vector<Fields> out;
  if (!v) {
    error(key, "required array is missing");
    return out;
  }
  if (!v->is_array() || v->empty()) {
    error(key, "must be a non-empty array of objects");
    return out;
  }
  for (std::size_t i = 0; i < v->size(); ++i) {
    out.emplace_back(&(*v)[i], key_path(key) + "[" + std::to_string(i) + "]", *errors_);
  }
  return out;
}

void Fields::finish() {
  if (!node_) return;
  for (const auto& [key, value] : node_->items()) {
    if (!seen_.count(key)) errors_->push_back(key_path(key) + ": unknown key");
  }
}

namespace {

template <class Make>
auto attempt(Fields& f, const std::string& key, Make make) -> std::optional<decltype(make())> {
  try {
    return make();
  } catch (const ConfigError& e) {
    f.error(key, e.what());
  } catch (const InvalidInput& e) {
    f.error(key, e.what());
  }
  return std::nullopt;
}

int degree(Fields& f) {
  auto q = f.integer("q", 2, 2);
  if (q > 64) f.error("q", "must be at most 64");
  return static_cast<int>(std::min<std::uint64_t>(q, 64));
}

}  // namespace

std::optional<FamilySpec> parse_family(Fields f, std::uint64_t seed) {
  if (!f.present()) return std::nullopt;
  auto kind = f.text("family", std::nullopt, {"expanding", "cyclic", "solenoid", "slow", "meanfield"});
  FamilySpec spec;
  spec.kind = kind;
  std::optional<FamilySpec> out;

  if (kind == "expanding") {
    int q = degree(f);
    double eps = f.number("epsilon", 0.0);
    if (auto map = attempt(f, "epsilon", [&] { return ExpandingCircleMap(q, eps); })) {
      spec.make = [map = *map] { return std::make_shared<AutonomousCircleFamily>(map); };
      out = spec;
    }
  } else if (kind == "cyclic") {
    std::vector<CircleMap> maps;
    bool ok = true;
    for (auto& m : f.objects("maps")) {
      int q = degree(m);
      double eps = m.number("epsilon", 0.0);
      auto map = attempt(m, "epsilon", [&] { return ExpandingCircleMap(q, eps); });
      m.finish();
      if (map) {
        maps.push_back(map->as_circle_map());
      } else {
        ok = false;
      }
    }
    if (ok && !maps.empty()) {
      spec.make = [maps] { return std::make_shared<CyclicCircleFamily>(maps); };
      out = spec;
    }
  } else if (kind == "solenoid") {
    SolenoidParams p;
    p.degree = degree(f);
    p.lambda = f.number("lambda", p.lambda);
    p.gamma = f.number("gamma", p.gamma);
    p.c = f.number("c", p.c);
    p.decay = f.number("decay", p.decay);
    if (auto fam = attempt(f, "family", [&] { return std::make_shared<SolenoidFamily>(p); })) {
      spec.space = PhaseSpace::solenoid;
      spec.has_limit = true;
      spec.make = [fam = *fam] { return fam; };
      out = spec;
    }
  } else if (kind == "slow") {
    bool limit = f.flag("limit", false);
    spec.space = PhaseSpace::solenoid;
    spec.has_limit = !limit;
    spec.make = [limit] { return std::make_shared<SlowFamily>(limit); };
    out = spec;
  } else if (kind == "meanfield") {
    auto base = f.object("base");
    int q = degree(base);
    double eps = base.number("epsilon", 0.0);
    base.finish();
    f.text("coupling", "sin", {"sin"});
    double delta = f.number("delta", 0.05);
    auto rep = f.text("representation", "density", {"density", "particles"});
    auto n_cells = f.integer("n_cells", 4096, 16);
    auto n_particles = f.integer("n_particles", 100000, 100);
    if (rep == "density" && f.has("n_particles")) f.error("n_particles", "only for particles");
    if (rep == "particles" && f.has("n_cells")) f.error("n_cells", "only for densities");
    auto init = f.object("initial");
    double amplitude = init.number("amplitude", 0.3);
    if (!(amplitude >= 0.0 && amplitude <= 1.0)) init.error("amplitude", "must be in [0, 1]");
    init.finish();

    Representation representation = DensityRepresentation{n_cells};
    if (rep == "particles") representation = ParticleRepresentation{n_particles};
    auto map = attempt(base, "epsilon", [&] { return ExpandingCircleMap(q, eps); });
    std::optional<MeanFieldConfig> config;
    if (map) {
      config = attempt(f, "delta", [&] {
        return MeanFieldConfig(*map, Coupling::sine(), delta, representation);
      });
    }
    if (config) {
      auto system = std::make_shared<const MeanFieldSystem>(*config);
      // The initial density lives on the density grid, or on a 4096-cell grid
      // that particles are drawn from.
      std::size_t grid = rep == "density" ? n_cells : 4096;
      auto initial = GridDensity::from_function(
          grid, [amplitude](double x) { return 1.0 + amplitude * std::cos(kTwoPi * x); });
      spec.system = system;
      spec.initial = initial;
      spec.with_delta = [map = *map, representation](double d) {
        return MeanFieldConfig(map, Coupling::sine(), d, representation);
      };
      spec.make = [system, initial, rep, n_particles, seed]() -> FamilyPtr {
        if (rep == "density") return induced_family(system, GlobalState{initial, 0});
        auto draw = density_sampler(initial);
        std::vector<PhasePoint> pts(n_particles);
        SplitMix64 rng(stream_seed(seed, 4));
        for (auto& p : pts) p = draw(rng);
        return induced_family(system,
                              GlobalState{EmpiricalMeasure::uniform(PhaseSpace::circle, pts), 0});
      };
      out = spec;
    }
  }
  f.finish();
  return out;
}

Sampler initial_sampler(const FamilySpec& spec) {
  if (spec.initial) return density_sampler(*spec.initial);
  return lebesgue_sampler(spec.space);
}

void Checks::add(const std::string& name, bool pass, json measured, json bound) {
  list_.push_back({{"name", name}, {"pass", pass}, {"measured", measured}, {"bound", bound}});
  ok_ = ok_ && pass;
}

std::string Checks::lines() const {
  std::ostringstream out;
  for (const auto& c : list_) {
    out << (c["pass"].get<bool>() ? "  ok    " : "  FAIL  ") << c["name"].get<std::string>()
        << ": " << c["measured"].dump() << " vs " << c["bound"].dump() << '\n';
  }
  return out.str();
}

}  // namespace loglaw::lab
