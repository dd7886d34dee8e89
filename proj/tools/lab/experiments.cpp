#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "fields.hpp"
#include "loglaw/errors.hpp"
#include "loglaw/io.hpp"
#include "loglaw/transfer.hpp"

namespace loglaw::lab {

namespace {

template <class Writer>
std::string csv(Writer write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

json parsed(const std::string& text) { return json::parse(text); }

json point_json(const PhasePoint& p, PhaseSpace space) {
  if (space == PhaseSpace::circle) return json::array({p.base.value()});
  return json::array({p.base.value(), p.fiber.u, p.fiber.v});
}

json fit_json(const ScalingFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r_squared}};
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

std::optional<PhasePoint> parse_point(Fields t, PhaseSpace space) {
  if (!t.present()) return std::nullopt;
  double x = t.number("x");
  PhasePoint p = circle_point(x);
  if (space == PhaseSpace::solenoid) {
    p.fiber = {t.number("u", 0.0), t.number("v", 0.0)};
    if (norm(p.fiber) > 1.0) t.error("u", "fiber point must lie in the unit disc");
  }
  t.finish();
  return p;
}

std::optional<RadiiSchedule> parse_schedule(Fields s) {
  if (!s.present()) return std::nullopt;
  double r0 = s.number("r0");
  double ratio = s.number("ratio", 0.5);
  auto count = s.integer("count", std::nullopt, 1);
  s.finish();
  try {
    return RadiiSchedule(r0, ratio, count);
  } catch (const InvalidInput& e) {
    s.error("r0", e.what());
  }
  return std::nullopt;
}

struct CloudSpec {
  bool present = false;
  std::size_t points = 0;
  std::size_t burn_in = 0;
  bool limit = false;
};

CloudSpec parse_cloud(Fields c, const std::optional<FamilySpec>& family) {
  CloudSpec spec;
  if (!c.present()) return spec;
  spec.present = true;
  spec.points = c.integer("points", 1000000, kMinCloudSize);
  spec.burn_in = c.integer("burn_in", 50, 1);
  spec.limit = c.flag("limit", false);
  if (spec.limit && family && !family->has_limit) c.error("limit", "family has no limit map");
  c.finish();
  return spec;
}

EmpiricalMeasure build_cloud(const CloudSpec& spec, const FamilyPtr& family, const Common& common) {
  FamilyPtr source = spec.limit ? family->limit_family() : family;
  return equilibrium_cloud(*source, spec.points, spec.burn_in, stream_seed(common.seed, 3),
                           common.threads);
}

// Either one "target" or "targets": {"from_cloud": k}.
struct TargetSpec {
  std::vector<PhasePoint> fixed;
  std::size_t from_cloud = 0;
};

TargetSpec parse_targets(Fields& top, PhaseSpace space, const CloudSpec& cloud) {
  TargetSpec spec;
  bool one = top.has("target");
  bool many = top.has("targets");
  if (one == many) {
    top.error("target", "give exactly one of target and targets");
    return spec;
  }
  if (one) {
    if (auto p = parse_point(top.object("target"), space)) spec.fixed.push_back(*p);
    return spec;
  }
  auto t = top.object("targets");
  spec.from_cloud = t.integer("from_cloud", std::nullopt, 1);
  t.finish();
  if (!cloud.present) top.error("targets", "from_cloud needs a cloud block");
  return spec;
}

std::vector<PhasePoint> pick_targets(const TargetSpec& spec, const EmpiricalMeasure* cloud,
                                     const Common& common) {
  if (spec.from_cloud == 0) return spec.fixed;
  SplitMix64 rng(stream_seed(common.seed, 2));
  std::vector<PhasePoint> out;
  for (std::size_t i = 0; i < spec.from_cloud; ++i) {
    out.push_back(cloud->points()[rng() % cloud->size()]);
  }
  return out;
}

std::string targets_csv(const std::vector<PhasePoint>& targets, PhaseSpace space) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << (space == PhaseSpace::solenoid ? "index,x,u,v\n" : "index,x\n");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out << i << ',' << targets[i].base.value();
    if (space == PhaseSpace::solenoid) out << ',' << targets[i].fiber.u << ',' << targets[i].fiber.v;
    out << '\n';
  }
  return out.str();
}

json header(const Common& common, const FamilySpec* family) {
  json s;
  s["experiment"] = common.experiment;
  s["description"] = common.description;
  s["seed"] = common.seed;
  s["threads"] = common.threads;
  if (family) s["family"] = family->kind;
  return s;
}

// Folds expectations and an optional comparison verdict into a status.
Status settle(const Checks& checks, std::optional<Verdict> comparison, bool expect_verdict) {
  if (comparison && *comparison == Verdict::inconclusive && (expect_verdict || !checks.any())) {
    return checks.ok() ? Status::inconclusive : Status::fail;
  }
  if (checks.any()) return checks.ok() ? Status::pass : Status::fail;
  if (comparison) return *comparison == Verdict::pass ? Status::pass : Status::fail;
  return Status::complete;
}

void finish_outcome(Outcome& out, const Checks& checks, const std::string& body) {
  out.summary["status"] = to_string(out.status);
  out.summary["expectations"] = checks.list();
  std::ostringstream report;
  report << out.summary["experiment"].get<std::string>();
  if (!out.summary["description"].get<std::string>().empty()) {
    report << ": " << out.summary["description"].get<std::string>();
  }
  report << "\nseed " << out.summary["seed"].dump() << '\n' << body;
  if (checks.any()) report << "expectations:\n" << checks.lines();
  report << "status: " << to_string(out.status) << '\n';
  out.report = report.str();
}

}  // namespace

Job parse_loglaw(Fields& top, const Common& common) {
  auto family = parse_family(top.object("family", true), common.seed);
  if (common.experiment == "meanfield-loglaw" && family && family->kind != "meanfield") {
    top.error("family", "meanfield-loglaw needs a meanfield family");
  }
  PhaseSpace space = family ? family->space : PhaseSpace::circle;
  auto cloud = parse_cloud(top.object("cloud"), family);
  auto targets = parse_targets(top, space, cloud);
  auto schedule = parse_schedule(top.object("schedule", true));
  LoglawOptions options;
  options.n_samples = top.integer("samples", 200, 30);
  options.n_max = top.integer("horizon", 1000000, 1);
  options.min_uncensored = top.number("min_uncensored", 0.95);
  options.threads = common.threads;
  if (!(options.min_uncensored > 0.0 && options.min_uncensored <= 1.0)) {
    top.error("min_uncensored", "must be in (0, 1]");
  }
  std::optional<double> tolerance;
  if (auto c = top.object("compare"); c.present()) {
    tolerance = c.number("tolerance", 0.25);
    if (*tolerance < 0.0) c.error("tolerance", "must be >= 0");
    if (!cloud.present) c.error("tolerance", "comparison needs a cloud block");
    c.finish();
  }
  auto e = top.object("expect");
  auto slope = e.range("slope");
  auto r2_min = e.has("r2_min") ? std::optional(e.number("r2_min")) : std::nullopt;
  std::optional<std::string> verdict;
  if (e.has("verdict")) {
    verdict = e.text("verdict", std::nullopt, {"pass", "fail", "inconclusive"});
    if (!tolerance) e.error("verdict", "needs a compare block");
  }
  e.finish();
  if (!family || !schedule) return {};

  return [=]() {
    Outcome out;
    out.summary = header(common, &*family);
    FamilyPtr fam = family->make();
    std::optional<EmpiricalMeasure> points;
    if (cloud.present) points = build_cloud(cloud, fam, common);
    auto ys = pick_targets(targets, points ? &*points : nullptr, common);
    auto sampler = initial_sampler(*family);
    out.data.push_back({"targets.csv", targets_csv(ys, space)});

    Checks checks;
    std::ostringstream body;
    json results = json::array();
    std::optional<Verdict> overall;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      auto opts = options;
      opts.seed = stream_seed(common.seed, 100 + i);
      auto fit = loglaw_exponent(*fam, ys[i], sampler, *schedule, opts);
      std::string tag = std::to_string(i);
      out.data.push_back({"scaling_" + tag + ".csv", csv([&](auto& o) { write_scaling_csv(o, fit); })});
      json r{{"target", point_json(ys[i], space)}, {"loglaw", fit_json(fit)}};
      body << "target " << tag << " " << point_json(ys[i], space).dump() << ": loglaw slope "
           << fmt(fit.slope) << " (r2 " << fmt(fit.r_squared) << ")\n";
      if (slope) {
        checks.add("target " + tag + " loglaw slope", fit.slope >= slope->first && fit.slope <= slope->second,
                   fit.slope, json::array({slope->first, slope->second}));
      }
      if (r2_min) checks.add("target " + tag + " loglaw r2", fit.r_squared >= *r2_min, fit.r_squared, *r2_min);
      if (tolerance) {
        Comparison cmp;
        try {
          auto dim = local_dimension(*points, ys[i], *schedule);
          out.data.push_back({"dimension_" + tag + ".csv", csv([&](auto& o) { write_scaling_csv(o, dim); })});
          cmp = compare(fit, dim, *tolerance);
          r["dimension"] = fit_json(dim);
        } catch (const InsufficientData& ex) {
          cmp.verdict = Verdict::inconclusive;
          cmp.tolerance = *tolerance;
          cmp.report = ex.what();
          r["dimension"] = nullptr;
        }
        r["verdict"] = to_string(cmp.verdict);
        r["difference"] = cmp.difference;
        body << "  " << cmp.report << '\n';
        if (!overall || cmp.verdict == Verdict::fail ||
            (cmp.verdict == Verdict::inconclusive && *overall == Verdict::pass)) {
          overall = cmp.verdict;
        }
      }
      results.push_back(r);
    }
    out.summary["results"] = results;
    if (overall) {
      out.summary["verdict"] = to_string(*overall);
      body << "comparison verdict: " << to_string(*overall) << '\n';
      if (verdict && *overall != Verdict::inconclusive) {
        checks.add("comparison verdict", to_string(*overall) == *verdict, to_string(*overall), *verdict);
      }
    }
    out.status = settle(checks, overall, verdict.has_value());
    finish_outcome(out, checks, body.str());
    return out;
  };
}

Job parse_dimension(Fields& top, const Common& common) {
  auto family = parse_family(top.object("family", true), common.seed);
  PhaseSpace space = family ? family->space : PhaseSpace::circle;
  auto cloud = parse_cloud(top.object("cloud", true), family);
  auto targets = parse_targets(top, space, cloud);
  auto schedule = parse_schedule(top.object("schedule", true));
  auto e = top.object("expect");
  auto slope = e.range("slope");
  auto r2_min = e.has("r2_min") ? std::optional(e.number("r2_min")) : std::nullopt;
  e.finish();
  if (!family || !schedule || !cloud.present) return {};

  return [=]() {
    Outcome out;
    out.summary = header(common, &*family);
    FamilyPtr fam = family->make();
    auto points = build_cloud(cloud, fam, common);
    auto ys = pick_targets(targets, &points, common);
    out.data.push_back({"targets.csv", targets_csv(ys, space)});
    Checks checks;
    std::ostringstream body;
    json results = json::array();
    for (std::size_t i = 0; i < ys.size(); ++i) {
      auto dim = local_dimension(points, ys[i], *schedule);
      std::string tag = std::to_string(i);
      out.data.push_back({"dimension_" + tag + ".csv", csv([&](auto& o) { write_scaling_csv(o, dim); })});
      results.push_back({{"target", point_json(ys[i], space)}, {"dimension", fit_json(dim)}});
      body << "target " << tag << " " << point_json(ys[i], space).dump() << ": dimension "
           << fmt(dim.slope) << " (r2 " << fmt(dim.r_squared) << ")\n";
      if (slope) {
        checks.add("target " + tag + " dimension", dim.slope >= slope->first && dim.slope <= slope->second,
                   dim.slope, json::array({slope->first, slope->second}));
      }
      if (r2_min) checks.add("target " + tag + " r2", dim.r_squared >= *r2_min, dim.r_squared, *r2_min);
    }
    out.summary["results"] = results;
    out.status = settle(checks, std::nullopt, false);
    finish_outcome(out, checks, body.str());
    return out;
  };
}

namespace {

struct GridSpec {
  std::size_t n_cells = 4096;
  std::size_t steps = 30;
};

GridSpec parse_grid(Fields& top, std::size_t default_steps) {
  GridSpec g;
  g.n_cells = top.integer("n_cells", 4096, 16);
  g.steps = top.integer("steps", default_steps, 1);
  return g;
}

std::string describe_curve(const ConvergenceCurve& curve) {
  std::ostringstream body;
  body << "curve (" << (curve.norm == CurveNorm::w ? "W distance" : "W11 norm") << "):";
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (i % 8 == 0) body << "\n ";
    body << ' ' << fmt(curve.values[i]);
  }
  body << '\n';
  if (curve.fit) {
    body << "tail fit: rate " << fmt(curve.fit->rate()) << ", ratio " << fmt(curve.fit->ratio()) << ", r2 "
         << fmt(curve.fit->r_squared) << " over " << curve.fit->n_points << " steps from "
         << curve.fit->first_step << '\n';
  } else {
    body << "tail fit: none (too few values above the resolution floor)\n";
  }
  if (curve.floor_reached_at) body << "resolution floor reached at step " << *curve.floor_reached_at << '\n';
  return body.str();
}

}  // namespace

Job parse_converge(Fields& top, const Common& common) {
  auto family = parse_family(top.object("family", true), common.seed);
  auto grid = parse_grid(top, 30);
  auto init = top.object("initial");
  double amplitude = init.number("amplitude", 1.0);
  if (!(amplitude >= 0.0 && amplitude <= 1.0)) init.error("amplitude", "must be in [0, 1]");
  init.finish();
  auto w_nodes = top.integer("w_nodes", kDefaultWNodes, 2);
  auto e = top.object("expect");
  auto ratio_max = e.has("ratio_max") ? std::optional(e.number("ratio_max")) : std::nullopt;
  auto r2_min = e.has("r2_min") ? std::optional(e.number("r2_min")) : std::nullopt;
  bool decreasing = e.flag("decreasing_tail", false);
  e.finish();
  if (!family) return {};

  return [=]() {
    Outcome out;
    out.summary = header(common, &*family);
    TransferSequence ops(family->make(), grid.n_cells);
    auto f0 = GridDensity::from_function(
        grid.n_cells, [amplitude](double x) { return 1.0 + amplitude * std::cos(kTwoPi * x); });
    auto curve = convergence_curve(ops, f0, grid.steps, nullptr, w_nodes);
    out.data.push_back({"curve.csv", csv([&](auto& o) { write_curve_csv(o, curve); })});
    out.summary["curve"] = parsed(curve_json(curve));
    Checks checks;
    if (ratio_max) {
      bool ok = curve.fit && curve.fit->ratio() <= *ratio_max;
      checks.add("tail ratio", ok, curve.fit ? json(curve.fit->ratio()) : json(nullptr), *ratio_max);
    }
    if (r2_min) {
      bool ok = curve.fit && curve.fit->r_squared >= *r2_min;
      checks.add("tail r2", ok, curve.fit ? json(curve.fit->r_squared) : json(nullptr), *r2_min);
    }
    if (decreasing) {
      bool ok = true;
      for (std::size_t i = curve.values.size() / 2 + 1; i < curve.values.size(); ++i) {
        ok = ok && curve.values[i] < curve.values[i - 1];
      }
      checks.add("strictly decreasing tail", ok, ok, true);
    }
    out.status = settle(checks, std::nullopt, false);
    finish_outcome(out, checks, describe_curve(curve));
    return out;
  };
}

Job parse_lossmem(Fields& top, const Common& common) {
  auto family = parse_family(top.object("family", true), common.seed);
  auto grid = parse_grid(top, 30);
  auto mode = top.integer("mode", 1, 1);
  auto e = top.object("expect");
  auto rate_min = e.has("rate_min") ? std::optional(e.number("rate_min")) : std::nullopt;
  auto r2_min = e.has("r2_min") ? std::optional(e.number("r2_min")) : std::nullopt;
  e.finish();
  if (!family) return {};

  return [=]() {
    Outcome out;
    out.summary = header(common, &*family);
    TransferSequence ops(family->make(), grid.n_cells);
    auto k = static_cast<double>(mode);
    auto g = GridDensity::from_function(grid.n_cells, [k](double x) { return std::cos(kTwoPi * k * x); });
    auto curve = loss_of_memory(ops, g, grid.steps);
    out.data.push_back({"curve.csv", csv([&](auto& o) { write_curve_csv(o, curve); })});
    out.summary["curve"] = parsed(curve_json(curve));
    Checks checks;
    if (rate_min) {
      bool ok = curve.fit && curve.fit->rate() >= *rate_min;
      checks.add("rate", ok, curve.fit ? json(curve.fit->rate()) : json(nullptr), *rate_min);
    }
    if (r2_min) {
      bool ok = curve.fit && curve.fit->r_squared >= *r2_min;
      checks.add("tail r2", ok, curve.fit ? json(curve.fit->r_squared) : json(nullptr), *r2_min);
    }
    out.status = settle(checks, std::nullopt, false);
    finish_outcome(out, checks, describe_curve(curve));
    return out;
  };
}

Job parse_fixed_point(Fields& top, const Common& common) {
  auto family = parse_family(top.object("family", true), common.seed);
  if (family && family->kind != "meanfield") top.error("family", "needs a meanfield family");
  bool particles = family && family->kind == "meanfield" &&
                   std::holds_alternative<ParticleRepresentation>(family->system->config().representation());
  if (particles) top.error("family", "fixed points are computed on the density grid");
  auto deltas = top.numbers("deltas");
  double tol = top.number("tol", 1e-8);
  if (!(tol > 0.0)) top.error("tol", "must be positive");
  auto max_iterations = top.integer("max_iterations", 200, 1);
  if (family && family->with_delta && !particles) {
    for (double d : deltas) {
      try {
        family->with_delta(d);
      } catch (const ConfigError& ex) {
        top.error("deltas", ex.what());
      }
    }
  }
  auto e = top.object("expect");
  auto residual_max = e.has("residual_max") ? std::optional(e.number("residual_max")) : std::nullopt;
  auto iterations_max = e.has("iterations_max") ? std::optional(e.integer("iterations_max", 0)) : std::nullopt;
  auto tail_r2 = e.has("tail_r2_min") ? std::optional(e.number("tail_r2_min")) : std::nullopt;
  e.finish();
  if (!family || family->kind != "meanfield" || particles) return {};

  return [=]() {
    Outcome out;
    out.summary = header(common, &*family);
    auto list = deltas.empty() ? std::vector<double>{family->system->config().delta()} : deltas;
    Checks checks;
    std::ostringstream body;
    json results = json::array();
    for (std::size_t i = 0; i < list.size(); ++i) {
      MeanFieldSystem system(family->with_delta(list[i]));
      std::string tag = "delta " + fmt(list[i]);
      json r{{"delta", list[i]}};
      std::vector<double> residuals;
      try {
        auto fp = fixed_point(system, tol, max_iterations);
        residuals = fp.residuals;
        double spread = 0.0;
        for (double v : fp.density.values()) spread = std::max(spread, std::fabs(v - 1.0));
        r["converged"] = true;
        r["residual"] = fp.residual;
        r["iterations"] = fp.iterations;
        r["max_deviation_from_uniform"] = spread;
        out.data.push_back({"density_" + std::to_string(i) + ".csv",
                            csv([&](auto& o) { write_csv(o, fp.density); })});
        body << tag << ": residual " << fmt(fp.residual) << " after " << fp.iterations
             << " iterations, max |f - 1| " << fmt(spread) << '\n';
      } catch (const ConvergenceError& ex) {
        r["converged"] = false;
        r["residual"] = ex.residual();
        r["iterations"] = ex.iterations();
        body << tag << ": no convergence, residual " << fmt(ex.residual()) << '\n';
      }
      std::ostringstream hist;
      hist << std::setprecision(17) << "iteration,residual\n";
      for (std::size_t k = 0; k < residuals.size(); ++k) hist << k + 1 << ',' << residuals[k] << '\n';
      out.data.push_back({"residuals_" + std::to_string(i) + ".csv", hist.str()});

      std::vector<std::size_t> steps(residuals.size());
      for (std::size_t k = 0; k < steps.size(); ++k) steps[k] = k + 1;
      std::optional<RateFit> tail;
      if (!residuals.empty()) tail = fit_exponential_tail(steps, residuals);
      r["tail_fit"] = tail ? json{{"slope", tail->slope}, {"r2", tail->r_squared}} : json(nullptr);
      if (tail) body << "  residual tail: slope " << fmt(tail->slope) << ", r2 " << fmt(tail->r_squared) << '\n';

      bool converged = r["converged"].get<bool>();
      if (residual_max) {
        checks.add(tag + " residual", converged && r["residual"].get<double>() < *residual_max,
                   r["residual"], *residual_max);
      }
      if (iterations_max) {
        checks.add(tag + " iterations", converged && r["iterations"].get<std::size_t>() <= *iterations_max,
                   r["iterations"], *iterations_max);
      }
      // Convergence in one step leaves nothing to fit; that is still decay.
      if (tail_r2 && residuals.size() >= 2 * kMinTailPoints) {
        bool ok = tail && tail->slope < 0.0 && tail->r_squared >= *tail_r2;
        checks.add(tag + " tail r2", ok, tail ? json(tail->r_squared) : json(nullptr), *tail_r2);
      }
      results.push_back(r);
    }
    out.summary["results"] = results;
    out.status = settle(checks, std::nullopt, false);
    finish_outcome(out, checks, body.str());
    return out;
  };
}

Job parse_borel_cantelli(Fields& top, const Common& common) {
  auto family = parse_family(top.object("family", true), common.seed);
  PhaseSpace space = family ? family->space : PhaseSpace::circle;
  std::optional<PhasePoint> target = parse_point(top.object("target", true), space);
  BorelCantelliOptions options;
  options.n_samples = top.integer("samples", 200, 1);
  options.n_steps = top.integer("steps", 20000, 1);
  options.n_held_out = top.integer("held_out", 50, 1);
  options.threads = common.threads;
  std::optional<RadiusRule> rule;
  bool power = top.has("radii");
  bool listed = top.has("schedule");
  if (power == listed) {
    top.error("radii", "give exactly one of radii and schedule");
  } else if (power) {
    auto r = top.object("radii");
    double beta = r.number("beta", 0.5);
    if (!(beta > 0.0)) r.error("beta", "must be positive");
    r.finish();
    rule = PowerRadii{beta};
  } else if (auto s = parse_schedule(top.object("schedule"))) {
    if (s->count() < options.n_steps) top.error("schedule", "count must cover every step");
    rule = *s;
  }
  auto band = top.range("band").value_or(std::pair{0.5, 1.5});
  auto e = top.object("expect");
  auto fraction_min = e.has("fraction_min") ? std::optional(e.number("fraction_min")) : std::nullopt;
  e.finish();
  if (!family || !target || !rule) return {};

  return [=]() {
    Outcome out;
    out.summary = header(common, &*family);
    auto opts = options;
    opts.seed = common.seed;
    auto res = borel_cantelli_ratio(*family->make(), *target, *rule, initial_sampler(*family), opts);
    std::ostringstream expected;
    expected << std::setprecision(17) << "n,expected\n";
    for (std::size_t j = 0; j < res.expected.size(); ++j) expected << j + 1 << ',' << res.expected[j] << '\n';
    out.data.push_back({"expected.csv", expected.str()});
    std::ostringstream finals;
    finals << std::setprecision(17) << "orbit,ratio\n";
    std::size_t inside = 0;
    std::vector<double> last;
    for (std::size_t o = 0; o < res.ratios.size(); ++o) {
      double r = res.ratios[o].back();
      last.push_back(r);
      finals << o << ',' << r << '\n';
      if (r >= band.first && r <= band.second) ++inside;
    }
    out.data.push_back({"final_ratios.csv", finals.str()});
    std::sort(last.begin(), last.end());
    double fraction = static_cast<double>(inside) / static_cast<double>(last.size());
    out.summary["expected_final"] = res.expected.back();
    out.summary["fraction_in_band"] = fraction;
    out.summary["band"] = json::array({band.first, band.second});
    out.summary["median_ratio"] = last[last.size() / 2];
    std::ostringstream body;
    body << "E(Z_n) at n = " << res.expected.size() << ": " << fmt(res.expected.back()) << '\n'
         << inside << " of " << last.size() << " held-out ratios in [" << band.first << ", " << band.second
         << "], median " << fmt(last[last.size() / 2]) << '\n';
    Checks checks;
    if (fraction_min) checks.add("fraction in band", fraction >= *fraction_min, fraction, *fraction_min);
    out.status = settle(checks, std::nullopt, false);
    finish_outcome(out, checks, body.str());
    return out;
  };
}

Job parse_verify(Fields& top, const Common& common) {
  auto family = parse_family(top.object("family", true), common.seed);
  if (family && family->kind != "solenoid") top.error("family", "needs a solenoid family");
  auto samples = top.integer("samples", 100000, 100);
  auto max_index = top.integer("max_index", 30, 1);
  if (!family || family->kind != "solenoid") return {};

  return [=]() {
    Outcome out;
    out.summary = header(common, &*family);
    auto fam = std::dynamic_pointer_cast<const SolenoidFamily>(family->make());
    auto report = verify_assumptions(*fam, samples, common.seed, max_index);
    Checks checks;
    for (const auto* c : {&report.contraction, &report.x_derivative, &report.decay}) {
      checks.add(c->name, c->pass, c->measured, c->bound);
    }
    std::ostringstream decay;
    decay << std::setprecision(17) << "index,measured,bound\n";
    for (const auto& d : report.decay_samples) decay << d.index << ',' << d.measured << ',' << d.bound << '\n';
    out.data.push_back({"decay.csv", decay.str()});
    out.summary["all_pass"] = report.all_pass();
    out.status = report.all_pass() ? Status::pass : Status::fail;
    finish_outcome(out, checks, fam->descriptor() + "\n");
    return out;
  };
}

}  // namespace loglaw::lab
