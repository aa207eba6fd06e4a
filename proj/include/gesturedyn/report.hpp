#pragma once

// Report bundle: per-token table, corpus summary (JSON) and plot-data tables.
// Every number is written with 9 significant digits.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gesturedyn/csv.hpp"
#include "gesturedyn/param_report.hpp"
#include "gesturedyn/pipeline.hpp"
#include "gesturedyn/stats.hpp"

namespace gesturedyn {

inline constexpr int summary_schema_version = 1;

using ordered_json = nlohmann::ordered_json;

struct NumericColumn {
    std::string name;
    std::function<double&(TokenRecord&)> ref;
};

/// Numeric columns of tokens.csv in table order. The table starts with the
/// text columns id, status, exclusion, flags, meta.
inline const std::vector<NumericColumn>& numeric_columns() {
    static const std::vector<NumericColumn> cols = [] {
        std::vector<NumericColumn> c;
        auto add = [&](std::string n, double TokenRecord::*m) {
            c.push_back({std::move(n), [m](TokenRecord& r) -> double& { return r.*m; }});
        };
        auto add_kin = [&](const std::string& prefix, KinematicColumns TokenRecord::*k) {
            auto one = [&](std::string n, double KinematicColumns::*m) {
                c.push_back({prefix + n, [k, m](TokenRecord& r) -> double& { return (r.*k).*m; }});
            };
            one("duration_ms", &KinematicColumns::duration_ms);
            one("max_displacement_mm", &KinematicColumns::max_displacement_mm);
            one("peak_velocity_mm_s", &KinematicColumns::peak_velocity_mm_s);
            one("time_to_peak_ms", &KinematicColumns::time_to_peak_ms);
            one("rel_time_to_peak", &KinematicColumns::rel_time_to_peak);
            one("kinematic_stiffness", &KinematicColumns::kinematic_stiffness);
        };
        add("n_samples", &TokenRecord::n_samples);
        add("dt", &TokenRecord::dt);
        add("onset", &TokenRecord::onset);
        add("offset", &TokenRecord::offset);
        add("t_obs", &TokenRecord::t_obs);
        add("x0", &TokenRecord::x0);
        add("v0", &TokenRecord::v0);
        add("lambda0", &TokenRecord::lambda0);
        add("ln_lambda_slope", &TokenRecord::ln_lambda_slope);
        add("ln_lambda_intercept", &TokenRecord::ln_lambda_intercept);
        add("ln_lambda_r2", &TokenRecord::ln_lambda_r2);
        add("eq5_target", &TokenRecord::eq5_target);
        add("eq5_rapidity", &TokenRecord::eq5_rapidity);
        add("eq5_r2", &TokenRecord::eq5_r2);
        add("eq5_iterations", &TokenRecord::eq5_iterations);
        add("eq5_converged", &TokenRecord::eq5_converged);
        add("msd_stiffness", &TokenRecord::msd_stiffness);
        add("msd_damping", &TokenRecord::msd_damping);
        add("msd_r2", &TokenRecord::msd_r2);
        add("sim_samples", &TokenRecord::sim_samples);
        add("sim_r2_state", &TokenRecord::sim_r2_state);
        add("sim_r2_velocity", &TokenRecord::sim_r2_velocity);
        add("sim_r2_accel", &TokenRecord::sim_r2_accel);
        add_kin("obs_", &TokenRecord::observed);
        add_kin("sim_", &TokenRecord::simulated);
        return c;
    }();
    return cols;
}

inline std::vector<std::string> token_table_header() {
    std::vector<std::string> h{"id", "status", "exclusion", "flags", "meta"};
    for (const auto& c : numeric_columns()) h.push_back(c.name);
    return h;
}

namespace detail {

inline std::string encode_flags(const TokenRecord& r) {
    std::string s;
    if (r.non_monotonic) s += "non_monotonic";
    if (r.multi_peak_velocity) s += std::string(s.empty() ? "" : ";") + "multi_peak_velocity";
    return s;
}

inline std::string encode_meta(const Metadata& m) {
    std::string s;
    for (const auto& [k, v] : m) s += (s.empty() ? "" : ";") + k + "=" + v;
    return s;
}

inline Metadata decode_meta(const std::string& s) {
    Metadata m;
    if (s.empty()) return m;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(';', start);
        const auto item = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        const auto eq = item.find('=');
        if (eq == std::string::npos) fail("malformed meta entry '" + item + "'");
        m[item.substr(0, eq)] = item.substr(eq + 1);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return m;
}

inline ordered_json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return csv::round9(v);
}

inline ordered_json summary_json(const Summary& s) {
    ordered_json j;
    j["n"] = s.n;
    j["mean"] = number(s.mean);
    j["sd"] = s.sd_defined ? number(s.sd) : ordered_json(nullptr);
    j["median"] = number(s.median);
    j["min"] = number(s.min);
    j["max"] = number(s.max);
    return j;
}

inline ordered_json correlation_json(const std::vector<double>& x, const std::vector<double>& y) {
    ordered_json j;
    j["n"] = x.size();
    try {
        const Correlation c = spearman(x, y);
        j["rho"] = number(c.rho);
        j["p_value"] = number(c.p_value);
        j["p_value_permutation"] = x.size() <= 10 ? number(spearman_permutation_p(x, y)) : ordered_json(nullptr);
    } catch (const error& e) {
        j["rho"] = nullptr;
        j["p_value"] = nullptr;
        j["p_value_permutation"] = nullptr;
        j["note"] = e.what();
    }
    return j;
}

}  // namespace detail

/// A named scalar taken from analyzed tokens.
struct Metric {
    std::string name;
    std::function<double(const TokenRecord&)> get;
};

inline std::vector<Metric> distribution_metrics() {
    std::vector<Metric> m;
    for (const auto& c : numeric_columns()) {
        static const std::vector<std::string> skip{"n_samples", "dt", "onset", "offset", "eq5_converged",
                                                   "eq5_iterations", "sim_samples"};
        if (std::find(skip.begin(), skip.end(), c.name) != skip.end()) continue;
        auto ref = c.ref;
        m.push_back({c.name, [ref](const TokenRecord& r) { return ref(const_cast<TokenRecord&>(r)); }});
    }
    // positive when the fitted target lies beyond the observed final state
    m.push_back({"target_undershoot_mm", [](const TokenRecord& r) {
                     const double dir = r.t_obs < r.x0 ? -1.0 : 1.0;
                     return dir * (r.eq5_target - r.t_obs);
                 }});
    return m;
}

struct ScatterSpec {
    std::string name;
    std::string x, y;  // metric names
};

inline std::vector<ScatterSpec> scatter_specs() {
    std::vector<ScatterSpec> s{
        {"ln_lambda_slope_vs_duration", "ln_lambda_slope", "obs_duration_ms"},
        {"ln_lambda_slope_vs_stiffness", "ln_lambda_slope", "obs_kinematic_stiffness"},
        {"rapidity_vs_ln_lambda_slope", "eq5_rapidity", "ln_lambda_slope"},
        {"target_vs_observed_target", "eq5_target", "t_obs"},
        {"observed_displacement_vs_peak_velocity", "obs_max_displacement_mm", "obs_peak_velocity_mm_s"},
        {"simulated_displacement_vs_peak_velocity", "sim_max_displacement_mm", "sim_peak_velocity_mm_s"},
        {"rapidity_vs_target", "eq5_rapidity", "eq5_target"},
    };
    for (const char* k : {"duration_ms", "max_displacement_mm", "peak_velocity_mm_s", "time_to_peak_ms",
                          "rel_time_to_peak", "kinematic_stiffness"})
        s.push_back({std::string("simulated_vs_observed_") + k, std::string("sim_") + k, std::string("obs_") + k});
    return s;
}

struct ReportBundle {
    std::vector<TokenRecord> tokens;
    std::vector<std::string> group_by{"language", "vowel"};
    double lambda_plot_cap = 150.0;
    ordered_json config = ordered_json::object();  // echoed into the summary
};

namespace detail {

inline std::map<std::string, std::function<double(const TokenRecord&)>> metric_index() {
    std::map<std::string, std::function<double(const TokenRecord&)>> idx;
    for (auto& m : distribution_metrics()) idx[m.name] = m.get;
    return idx;
}

inline void pair_values(const std::vector<TokenRecord>& toks, const ScatterSpec& s, std::vector<std::string>* ids,
                        std::vector<double>& xs, std::vector<double>& ys) {
    const auto idx = metric_index();
    const auto& fx = idx.at(s.x);
    const auto& fy = idx.at(s.y);
    for (const auto& t : toks) {
        if (!t.analyzed()) continue;
        const double x = fx(t), y = fy(t);
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        xs.push_back(x);
        ys.push_back(y);
        if (ids) ids->push_back(t.id);
    }
}

}  // namespace detail

/// Corpus-level aggregates.
inline ordered_json build_summary(const ReportBundle& b) {
    ordered_json j;
    j["schema_version"] = summary_schema_version;
    j["config"] = b.config;

    std::map<std::string, std::size_t> reasons;
    std::size_t analyzed = 0, multi_peak = 0, poor_fit = 0, poor_fit_multi_peak = 0;
    for (const auto& t : b.tokens) {
        if (t.analyzed()) {
            ++analyzed;
            if (t.multi_peak_velocity) ++multi_peak;
            if (t.eq5_r2 < 0.6) {
                ++poor_fit;
                if (t.multi_peak_velocity) ++poor_fit_multi_peak;
            }
        } else {
            ++reasons[t.exclusion];
        }
    }
    ordered_json counts;
    counts["ingested"] = b.tokens.size();
    counts["analyzed"] = analyzed;
    ordered_json ex = ordered_json::object();
    std::size_t excluded = 0;
    for (const auto& [r, n] : reasons) {
        ex[r] = n;
        excluded += n;
    }
    counts["excluded_total"] = excluded;
    counts["excluded"] = ex;
    counts["flagged_multi_peak_velocity"] = multi_peak;
    counts["eq5_r2_below_0_6"] = poor_fit;
    counts["eq5_r2_below_0_6_multi_peak"] = poor_fit_multi_peak;
    j["counts"] = counts;

    ordered_json dist = ordered_json::object();
    for (const auto& m : distribution_metrics()) {
        std::vector<double> v;
        for (const auto& t : b.tokens)
            if (t.analyzed() && std::isfinite(m.get(t))) v.push_back(m.get(t));
        dist[m.name] = v.empty() ? ordered_json{{"n", 0}} : detail::summary_json(describe(v));
    }
    j["distributions"] = dist;

    ordered_json corr = ordered_json::object();
    for (const auto& s : scatter_specs()) {
        std::vector<double> xs, ys;
        detail::pair_values(b.tokens, s, nullptr, xs, ys);
        corr[s.name] = detail::correlation_json(xs, ys);
    }
    j["correlations"] = corr;

    std::size_t both = 0, eq5_better = 0;
    for (const auto& t : b.tokens) {
        if (!t.analyzed() || !std::isfinite(t.eq5_r2) || !std::isfinite(t.msd_r2)) continue;
        ++both;
        if (t.eq5_r2 > t.msd_r2) ++eq5_better;
    }
    j["eq5_vs_msd"] = {{"n", both},
                       {"eq5_better", eq5_better},
                       {"fraction_eq5_better", both ? detail::number(double(eq5_better) / double(both))
                                                    : ordered_json(nullptr)}};

    std::vector<GroupedFit> fits;
    for (const auto& t : b.tokens)
        if (t.analyzed()) fits.push_back({{t.eq5_target, t.eq5_rapidity}, t.meta});
    const auto groups = param_correlation_report(fits, b.group_by);
    ordered_json g = ordered_json::object();
    for (const auto& [label, c] : groups.groups)
        g[label] = {{"n", c.n}, {"rho", detail::number(c.rho)}, {"p_value", detail::number(c.p_value)}};
    j["rapidity_target_by_group"] = {{"group_by", b.group_by}, {"groups", g}, {"warnings", groups.warnings}};
    return j;
}

inline std::vector<std::string> token_row(const TokenRecord& r) {
    std::vector<std::string> row{r.id, r.status, r.exclusion, detail::encode_flags(r), detail::encode_meta(r.meta)};
    auto& mr = const_cast<TokenRecord&>(r);
    for (const auto& c : numeric_columns()) row.push_back(csv::fmt(c.ref(mr)));
    return row;
}

/// Reads a tokens.csv written by emit(); grid series are not restored.
inline std::vector<TokenRecord> read_token_table(const std::string& path) {
    const csv::Table t = csv::read_table(path);
    if (t.header != token_table_header()) detail::fail(path + ":1: not a per-token table (header mismatch)");
    std::vector<TokenRecord> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        TokenRecord r;
        r.id = row[0];
        r.status = row[1];
        r.exclusion = row[2];
        r.non_monotonic = row[3].find("non_monotonic") != std::string::npos;
        r.multi_peak_velocity = row[3].find("multi_peak_velocity") != std::string::npos;
        r.meta = detail::decode_meta(row[4]);
        const auto& cols = numeric_columns();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto& f = row[5 + c];
            if (f.empty()) continue;
            const auto v = csv::parse_double(f);
            if (!v) detail::fail(path + ":" + std::to_string(t.line_numbers[i]) + ": bad number in " + cols[c].name);
            cols[c].ref(r) = *v;
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace detail {

inline void write_band(const std::string& path, const std::vector<const std::vector<double>*>& series) {
    std::vector<std::vector<std::string>> rows;
    if (!series.empty()) {
        for (std::size_t i = 0; i < comparison_grid; ++i) {
            std::vector<double> v;
            for (const auto* s : series) v.push_back((*s)[i]);
            const Summary s = describe(v);
            rows.push_back({std::to_string(i), csv::fmt(static_cast<double>(i) / (comparison_grid - 1)), csv::fmt(s.mean),
                            csv::fmt(s.sd_defined ? s.sd : 0.0), std::to_string(s.n)});
        }
    }
    csv::write_table(path, {"index", "normalized_time", "mean", "sd", "n"}, rows);
}

inline void write_histogram(const std::string& path, const std::vector<double>& v, std::size_t bins = 20) {
    std::vector<std::vector<std::string>> rows;
    if (!v.empty()) {
        const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        const double lo = *lo_it, hi = *hi_it;
        if (lo == hi) bins = 1;
        std::vector<std::size_t> count(bins, 0);
        const double width = (hi - lo) / static_cast<double>(bins);
        for (double x : v) {
            std::size_t k = width > 0.0 ? static_cast<std::size_t>((x - lo) / width) : 0;
            count[std::min(k, bins - 1)]++;
        }
        for (std::size_t k = 0; k < bins; ++k)
            rows.push_back({csv::fmt(lo + width * k), csv::fmt(k + 1 == bins ? hi : lo + width * (k + 1)),
                            std::to_string(count[k])});
    }
    csv::write_table(path, {"bin_lo", "bin_hi", "count"}, rows);
}

// Like dump(2), except floats are printed with 9 significant digits.
inline void dump_json(std::ostream& out, const ordered_json& j, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    if (j.is_object() || j.is_array()) {
        const bool obj = j.is_object();
        if (j.empty()) {
            out << (obj ? "{}" : "[]");
            return;
        }
        out << (obj ? "{\n" : "[\n");
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out << ",\n";
            first = false;
            out << pad;
            if (obj) out << ordered_json(it.key()).dump() << ": ";
            dump_json(out, *it, depth + 1);
        }
        out << '\n' << close << (obj ? '}' : ']');
    } else if (j.is_number_float()) {
        std::string s = csv::fmt(j.get<double>());
        if (s.find_first_of(".eE") == std::string::npos) s += ".0";
        out << s;
    } else {
        out << j.dump();
    }
}

inline void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write " + path);
    dump_json(out, j, 0);
    out << '\n';
}

}  // namespace detail

/// Writes tokens.csv, summary.json and plots/*.csv under `dir`.
inline void emit(const ReportBundle& b, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "plots", ec);
    if (ec) detail::fail("cannot create output directory " + dir + ": " + ec.message());

    std::vector<std::vector<std::string>> rows;
    for (const auto& t : b.tokens) rows.push_back(token_row(t));
    csv::write_table((fs::path(dir) / "tokens.csv").string(), token_table_header(), rows);
    detail::write_json((fs::path(dir) / "summary.json").string(), build_summary(b));

    const fs::path plots = fs::path(dir) / "plots";
    using Series = std::vector<double> TokenRecord::*;
    const std::vector<std::pair<std::string, Series>> bands{
        {"observed_state", &TokenRecord::obs_state},   {"observed_velocity", &TokenRecord::obs_velocity},
        {"observed_accel", &TokenRecord::obs_accel},   {"simulated_state", &TokenRecord::sim_state},
        {"simulated_velocity", &TokenRecord::sim_velocity}, {"simulated_accel", &TokenRecord::sim_accel},
        {"lambda", &TokenRecord::lambda},              {"ln_lambda", &TokenRecord::ln_lambda},
    };
    for (const auto& [name, member] : bands) {
        std::vector<const std::vector<double>*> series;
        const bool capped = name == "lambda" || name == "ln_lambda";
        for (const auto& t : b.tokens) {
            if (!t.analyzed() || (t.*member).size() != comparison_grid) continue;
            if (capped && t.lambda0 > b.lambda_plot_cap) continue;
            series.push_back(&(t.*member));
        }
        detail::write_band((plots / ("band_" + name + ".csv")).string(), series);
    }
    for (const auto& m : distribution_metrics()) {
        std::vector<double> v;
        for (const auto& t : b.tokens)
            if (t.analyzed() && std::isfinite(m.get(t))) v.push_back(m.get(t));
        detail::write_histogram((plots / ("hist_" + m.name + ".csv")).string(), v);
    }
    for (const auto& s : scatter_specs()) {
        std::vector<std::string> ids;
        std::vector<double> xs, ys;
        detail::pair_values(b.tokens, s, &ids, xs, ys);
        std::vector<std::vector<std::string>> srows;
        const bool grouped = s.name == "rapidity_vs_target";
        std::map<std::string, const TokenRecord*> by_id;
        for (const auto& t : b.tokens) by_id[t.id] = &t;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::vector<std::string> r{ids[i], csv::fmt(xs[i]), csv::fmt(ys[i])};
            if (grouped) r.push_back(group_label(by_id[ids[i]]->meta, b.group_by));
            srows.push_back(std::move(r));
        }
        std::vector<std::string> header{"id", s.x, s.y};
        if (grouped) header.push_back("group");
        csv::write_table((plots / ("scatter_" + s.name + ".csv")).string(), header, srows);
    }
}

}  // namespace gesturedyn
