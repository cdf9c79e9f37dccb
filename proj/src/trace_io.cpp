#include "genproj/trace_io.hpp"

#include <charconv>
#include <cmath>

namespace genproj {

std::string format_number(double v) {
    if (std::isnan(v))
        return "";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream &os, const Trace &trace) {
    os << "iter,step,displacement,v2_to_ref,residual_fixed_point,residual_vi,residual_wh\n";
    for (const auto &r : trace.records) {
        os << r.iter << ',' << format_number(r.step) << ',' << format_number(r.displacement) << ','
           << format_number(r.v2_to_ref) << ',' << format_number(r.residual_fixed_point) << ','
           << format_number(r.residual_vi) << ',' << format_number(r.residual_wh) << '\n';
    }
}

nlohmann::json vector_to_json(const Vec &v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

namespace {

nlohmann::json number(double v) {
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

} // namespace

nlohmann::json trace_summary_json(const Trace &t) {
    nlohmann::json j;
    j["method"] = t.method;
    j["mode"] = to_string(t.mode);
    j["iterations"] = t.records.empty() ? 0 : t.records.back().iter;
    j["converged"] = t.converged;
    j["diverged"] = t.diverged;
    j["inner_failures"] = t.inner_failures;
    j["degenerate_steps"] = t.degenerate_steps;
    j["solution"] = vector_to_json(t.solution.coords());
    if (t.dual_solution)
        j["dual_solution"] = vector_to_json(t.dual_solution->coords());
    j["final_fixed_point_residual"] = number(t.final_fixed_point_residual);
    j["final_vi_residual"] = number(t.final_vi_residual);
    j["final_wh_residual"] = number(t.final_wh_residual);
    j["final_max_set_distance"] = number(t.final_max_set_distance);
    j["wh_reconstruction_z"] = number(t.wh_reconstruction_z);
    j["wh_reconstruction_x"] = number(t.wh_reconstruction_x);
    return j;
}

nlohmann::json trace_to_json(const Trace &t) {
    nlohmann::json j = trace_summary_json(t);
    nlohmann::json recs = nlohmann::json::array();
    for (const auto &r : t.records) {
        recs.push_back({{"iter", r.iter},
                        {"step", number(r.step)},
                        {"displacement", number(r.displacement)},
                        {"v2_to_ref", number(r.v2_to_ref)},
                        {"residual_fixed_point", number(r.residual_fixed_point)},
                        {"residual_vi", number(r.residual_vi)},
                        {"residual_wh", number(r.residual_wh)},
                        {"x", vector_to_json(r.x.coords())}});
    }
    j["records"] = std::move(recs);
    if (!t.sub_iterates.empty()) {
        nlohmann::json subs = nlohmann::json::array();
        for (const auto &x : t.sub_iterates)
            subs.push_back(vector_to_json(x.coords()));
        j["sub_iterates"] = std::move(subs);
    }
    return j;
}

} // namespace genproj
