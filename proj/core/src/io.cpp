#include "loglaw/io.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "loglaw/errors.hpp"

namespace loglaw {

namespace {

using nlohmann::json;

struct Precise {
  explicit Precise(std::ostream& out) : out_(out), saved_(out.precision()) {
    out_ << std::setprecision(17);
  }
  ~Precise() { out_.precision(saved_); }
  Precise(const Precise&) = delete;
  Precise& operator=(const Precise&) = delete;

  std::ostream& out_;
  std::streamsize saved_;
};

std::vector<double> parse_row(const std::string& line, std::size_t expected, std::size_t line_no) {
  std::vector<double> row;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p <= end) {
    const char* comma = std::find(p, end, ',');
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(p, comma, v);
    if (ec != std::errc() || ptr != comma) {
      throw InvalidInput("csv: bad number on line " + std::to_string(line_no));
    }
    row.push_back(v);
    if (comma == end) break;
    p = comma + 1;
  }
  if (row.size() != expected) {
    throw InvalidInput("csv: wrong column count on line " + std::to_string(line_no));
  }
  return row;
}

PhaseSpace parse_space(const std::string& name) {
  if (name == "circle") return PhaseSpace::circle;
  if (name == "solenoid") return PhaseSpace::solenoid;
  throw InvalidInput("unknown phase space '" + name + "'");
}

}  // namespace

void write_csv(std::ostream& out, const Measure& mu) {
  Precise precise(out);
  if (const auto* f = std::get_if<GridDensity>(&mu)) {
    out << "index,value\n";
    for (std::size_t i = 0; i < f->n_cells(); ++i) out << i << ',' << (*f)[i] << '\n';
    return;
  }
  const auto& cloud = std::get<EmpiricalMeasure>(mu);
  bool solenoid = cloud.space() == PhaseSpace::solenoid;
  out << (solenoid ? "x,u,v,weight\n" : "x,weight\n");
  auto points = cloud.points();
  auto weights = cloud.weights();
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << points[i].base.value() << ',';
    if (solenoid) out << points[i].fiber.u << ',' << points[i].fiber.v << ',';
    out << weights[i] << '\n';
  }
}

Measure read_measure_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InvalidInput("csv: empty input");
  std::size_t columns = 0;
  if (header == "index,value") {
    columns = 2;
  } else if (header == "x,weight") {
    columns = 2;
  } else if (header == "x,u,v,weight") {
    columns = 4;
  } else {
    throw InvalidInput("csv: unrecognized header '" + header + "'");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    rows.push_back(parse_row(line, columns, line_no));
  }
  if (header == "index,value") {
    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i][0] != static_cast<double>(i)) throw InvalidInput("csv: cell indices out of order");
      values[i] = rows[i][1];
    }
    return GridDensity(std::move(values));
  }
  PhaseSpace space = columns == 4 ? PhaseSpace::solenoid : PhaseSpace::circle;
  std::vector<PhasePoint> points;
  std::vector<double> weights;
  for (const auto& r : rows) {
    PhasePoint p{CirclePoint(r[0]), {}};
    if (columns == 4) p.fiber = {r[1], r[2]};
    points.push_back(p);
    weights.push_back(r.back());
  }
  return EmpiricalMeasure(space, std::move(points), std::move(weights));
}

std::string to_json(const Measure& mu) {
  json j;
  j["space"] = std::string(to_string(space_of(mu)));
  if (const auto* f = std::get_if<GridDensity>(&mu)) {
    j["n_cells"] = f->n_cells();
    j["data"] = std::vector<double>(f->values().begin(), f->values().end());
    return j.dump();
  }
  const auto& cloud = std::get<EmpiricalMeasure>(mu);
  j["n_points"] = cloud.size();
  json data = json::array();
  auto points = cloud.points();
  auto weights = cloud.weights();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (cloud.space() == PhaseSpace::solenoid) {
      data.push_back({points[i].base.value(), points[i].fiber.u, points[i].fiber.v, weights[i]});
    } else {
      data.push_back({points[i].base.value(), weights[i]});
    }
  }
  j["data"] = std::move(data);
  return j.dump();
}

Measure measure_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    PhaseSpace space = parse_space(j.at("space").get<std::string>());
    if (j.contains("n_cells")) {
      auto values = j.at("data").get<std::vector<double>>();
      if (values.size() != j.at("n_cells").get<std::size_t>()) {
        throw InvalidInput("measure json: n_cells does not match data");
      }
      return GridDensity(std::move(values));
    }
    auto rows = j.at("data").get<std::vector<std::vector<double>>>();
    if (rows.size() != j.at("n_points").get<std::size_t>()) {
      throw InvalidInput("measure json: n_points does not match data");
    }
    std::size_t columns = space == PhaseSpace::solenoid ? 4 : 2;
    std::vector<PhasePoint> points;
    std::vector<double> weights;
    for (const auto& r : rows) {
      if (r.size() != columns) throw InvalidInput("measure json: wrong row length");
      PhasePoint p{CirclePoint(r[0]), {}};
      if (columns == 4) p.fiber = {r[1], r[2]};
      points.push_back(p);
      weights.push_back(r.back());
    }
    return EmpiricalMeasure(space, std::move(points), std::move(weights));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("measure json: ") + e.what());
  }
}

void write_orbit_csv(std::ostream& out, PhaseSpace space, std::span<const PhasePoint> points) {
  Precise precise(out);
  bool solenoid = space == PhaseSpace::solenoid;
  out << (solenoid ? "step,x,u,v\n" : "step,x\n");
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << i << ',' << points[i].base.value();
    if (solenoid) out << ',' << points[i].fiber.u << ',' << points[i].fiber.v;
    out << '\n';
  }
}

void write_ulam_csv(std::ostream& out, const UlamMatrix& P) {
  Precise precise(out);
  out << "i,j,p\n";
  for (std::size_t i = 0; i < P.n_cells(); ++i) {
    for (const auto& e : P.row(i)) out << i << ',' << e.col << ',' << e.p << '\n';
  }
}

void write_curve_csv(std::ostream& out, const ConvergenceCurve& curve) {
  Precise precise(out);
  out << (curve.norm == CurveNorm::w ? "k,distance\n" : "k,w11_norm\n");
  for (std::size_t i = 0; i < curve.steps.size(); ++i) {
    out << curve.steps[i] << ',' << curve.values[i] << '\n';
  }
}

std::string curve_json(const ConvergenceCurve& curve) {
  json j;
  j["norm"] = curve.norm == CurveNorm::w ? "w" : "w11";
  if (curve.fit) {
    j["fit"] = {{"rate", curve.fit->rate()},
                {"ratio", curve.fit->ratio()},
                {"r2", curve.fit->r_squared},
                {"first_step", curve.fit->first_step},
                {"n_points", curve.fit->n_points}};
  } else {
    j["fit"] = nullptr;
  }
  if (curve.floor_reached_at) {
    j["floor_reached_at"] = *curve.floor_reached_at;
  } else {
    j["floor_reached_at"] = nullptr;
  }
  return j.dump();
}

void write_scaling_csv(std::ostream& out, const ScalingFit& fit) {
  Precise precise(out);
  out << "radius,log_x,log_y,n,censored,used\n";
  for (const auto& p : fit.points) {
    out << p.radius << ',' << p.x << ',' << p.y << ',' << p.samples << ',' << p.censored << ','
        << (p.used ? 1 : 0) << '\n';
  }
}

std::string scaling_json(const ScalingFit& fit) {
  json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r_squared;
  return j.dump();
}

}  // namespace loglaw
