#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "loglaw/measures.hpp"
#include "loglaw/stats.hpp"
#include "loglaw/transfer.hpp"

namespace loglaw {

// CSV writers print doubles with 17 significant digits, so reading them back
// is exact and equal inputs give byte-identical files.

/// Grid density: "index,value". Cloud: "x,weight" or "x,u,v,weight".
void write_csv(std::ostream& out, const Measure& mu);
/// Inverse of write_csv; the header decides the kind of measure.
Measure read_measure_csv(std::istream& in);

/// {"space": ..., "n_cells" | "n_points": ..., "data": [...]}. Density data are
/// the cell values; cloud data are [x, weight] or [x, u, v, weight] rows.
std::string to_json(const Measure& mu);
Measure measure_from_json(const std::string& text);

/// "step,x" or "step,x,u,v".
void write_orbit_csv(std::ostream& out, PhaseSpace space, std::span<const PhasePoint> points);

/// Sparse triplets "i,j,p".
void write_ulam_csv(std::ostream& out, const UlamMatrix& P);

/// "k,distance" or "k,w11_norm".
void write_curve_csv(std::ostream& out, const ConvergenceCurve& curve);
/// {"norm", "fit": {"rate", "ratio", "r2", "first_step", "n_points"} | null, "floor_reached_at"}.
std::string curve_json(const ConvergenceCurve& curve);

/// "radius,log_x,log_y,n,censored,used".
void write_scaling_csv(std::ostream& out, const ScalingFit& fit);
/// {"slope", "intercept", "r2"}.
std::string scaling_json(const ScalingFit& fit);

}  // namespace loglaw
