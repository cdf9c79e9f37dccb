#pragma once

// Trace serialization: CSV with one row per record, and JSON.

#include "genproj/solvers.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace genproj {

/// Shortest round-trip decimal text; empty for NaN.
std::string format_number(double v);

/// Columns: iter,step,displacement,v2_to_ref,residual_fixed_point,residual_vi,residual_wh.
/// Missing values are written as empty fields.
void write_trace_csv(std::ostream &os, const Trace &trace);

nlohmann::json vector_to_json(const Vec &v);
nlohmann::json trace_to_json(const Trace &trace);
/// Terminal state of a run, without the per-iteration records.
nlohmann::json trace_summary_json(const Trace &trace);

} // namespace genproj
