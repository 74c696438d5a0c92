#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cnslab/diagnostics.hpp"
#include "cnslab/norms.hpp"
#include "cnslab/path_norms.hpp"
#include "cnslab/solver.hpp"

namespace cnslab {

using Json = nlohmann::ordered_json;

namespace detail {

// NaN prints as an empty cell.
inline std::string csv_number(double x)
{
    if (std::isnan(x))
        return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::ofstream open_for_write(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    return os;
}

} // namespace detail

/// Columns of equal length; missing trailing entries are left blank.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns)
{
    auto os = detail::open_for_write(path);
    for (std::size_t j = 0; j < header.size(); ++j)
        os << (j ? "," : "") << header[j];
    os << '\n';
    std::size_t rows = 0;
    for (const auto& c : columns)
        rows = std::max(rows, c.size());
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j)
                os << ',';
            if (i < columns[j].size())
                os << detail::csv_number(columns[j][i]);
        }
        os << '\n';
    }
}

inline void write_json(const std::filesystem::path& path, const Json& j)
{
    auto os = detail::open_for_write(path);
    os << j.dump(2) << '\n';
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    auto os = detail::open_for_write(path);
    os << text;
}

inline void write_trace_csv(const std::filesystem::path& path, const PicardTrace& t)
{
    std::vector<double> iter, ratio(t.diffs.size(), std::nan(""));
    for (std::size_t m = 0; m < t.diffs.size(); ++m)
        iter.push_back(static_cast<double>(m + 1));
    for (std::size_t m = 0; m < t.ratios.size(); ++m)
        ratio[m + 1] = t.ratios[m];
    write_csv(path, {"iter", "diff", "ratio"}, {iter, t.diffs, ratio});
}

inline void write_conservation_csv(const std::filesystem::path& path, const ConservationSeries& s)
{
    write_csv(path, {"t", "mass_n", "l1_n", "min_n", "max_n", "min_c", "max_c"},
              {s.times, s.mass, s.l1_n, s.min_n, s.max_n, s.min_c, s.max_c});
}

inline void write_decay_csv(const std::filesystem::path& path, const DecaySeries& d)
{
    write_csv(path, {"t", "n_weight", "u_weight", "grad_c_weight"}, {d.times, d.n_weight, d.u_weight, d.grad_c_weight});
}

inline Json to_json(const NormValue& v)
{
    return Json{{"value", v.value},
                {"argmax_center", v.argmax_center},
                {"argmax_radius", v.argmax_radius},
                {"argmax_at_cap", v.argmax_at_cap},
                {"argmax_time", v.argmax_time}};
}

inline Json to_json(const PathNorm& p)
{
    return Json{{"total", p.total},
                {"sup_term", p.sup_term},
                {"weighted_term", p.weighted_term},
                {"integral_term", p.integral_term},
                {"integral_argmax", to_json(p.integral_argmax)}};
}

inline Json to_json(const NormReport& r)
{
    Json values = Json::object();
    for (const auto& [id, v] : r.values)
        values[id] = to_json(v);
    Json params = Json::object();
    for (const auto& [k, v] : r.params)
        params[k] = v;
    return Json{{"values", values}, {"params", params}, {"center_stride", r.center_stride}, {"radii", r.radii}};
}

/// One "id = value" line per entry.
inline std::string norm_report_text(const NormReport& r)
{
    std::string out;
    for (const auto& [id, v] : r.values)
        out += id + " = " + detail::csv_number(v.value) + "\n";
    return out;
}

inline Json to_json(const PicardTrace& t)
{
    return Json{{"iterations", t.iterations()}, {"converged", t.converged}, {"note", t.note},
                {"diffs", t.diffs}, {"ratios", t.ratios}};
}

inline Json to_json(const SmallnessReport& s)
{
    return Json{{"c0_sup", s.c0_sup},           {"n0_term", s.n0_term},
                {"n0_mean_excluded", s.n0_mean_excluded}, {"n0_mean", s.n0_mean},
                {"u0_term", s.u0_term},         {"v0_term", s.v0_term},
                {"forcing_term", s.forcing_term}, {"total", s.total},
                {"epsilon", s.epsilon},         {"below_epsilon", s.below_epsilon}};
}

inline Json to_json(const ScalingReport& r)
{
    return Json{{"delta", r.delta},
                {"discrepancy_c", r.discrepancy_c},
                {"discrepancy_n", r.discrepancy_n},
                {"discrepancy_u", r.discrepancy_u},
                {"discrepancy_v", r.discrepancy_v},
                {"max_discrepancy", r.max_discrepancy},
                {"base_converged", r.base_converged},
                {"rescaled_converged", r.rescaled_converged}};
}

inline Json to_json(const UniquenessReport& r)
{
    Json j{{"trace_a", to_json(r.trace_a)}, {"trace_b", to_json(r.trace_b)}, {"both_converged", r.both_converged}};
    j["distance"] = r.distance ? Json(*r.distance) : Json(nullptr);
    j["short_horizons"] = r.short_horizons;
    j["short_norms"] = r.short_norms;
    j["short_norms_decreasing"] = r.short_norms_decreasing;
    return j;
}

inline Json to_json(const EmbeddingReport& r)
{
    Json samples = Json::array();
    for (const auto& s : r.samples)
        samples.push_back(Json{{"carleson_n", s.carleson_n},
                               {"besov_morrey_2", s.besov_morrey_2},
                               {"besov_m2", s.besov_m2},
                               {"bmo_minus_one", s.bmo_minus_one},
                               {"besov_morrey_4", s.besov_morrey_4},
                               {"ratio_chain_lower", s.ratio_chain_lower},
                               {"ratio_chain_upper", s.ratio_chain_upper},
                               {"ratio_bmo", s.ratio_bmo}});
    return Json{{"points_per_axis", r.points_per_axis},
                {"max_ratio_chain_lower", r.max_ratio_chain_lower},
                {"max_ratio_chain_upper", r.max_ratio_chain_upper},
                {"max_ratio_bmo", r.max_ratio_bmo},
                {"all_finite", r.all_finite},
                {"samples", samples}};
}

} // namespace cnslab
