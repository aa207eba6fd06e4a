#pragma once

// Recording ingest: aperture files (t,la), sensor files
// (t,ul_x,ul_y,ul_z,ll_x,ll_y,ll_z) and an optional metadata sidecar keyed by
// recording id.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gesturedyn/csv.hpp"
#include "gesturedyn/error.hpp"
#include "gesturedyn/segment.hpp"
#include "gesturedyn/signal.hpp"

namespace gesturedyn {

enum class InputFormat { automatic, aperture, sensor };

inline InputFormat parse_format(const std::string& s) {
    if (s == "auto") return InputFormat::automatic;
    if (s == "aperture") return InputFormat::aperture;
    if (s == "sensor") return InputFormat::sensor;
    detail::fail("unknown input format '" + s + "' (expected auto, aperture or sensor)");
}

struct Recording {
    std::string id;
    SampledSeries aperture;
    Metadata meta;
    std::optional<IndexRange> window;
    std::string exclusion;  // non-empty: excluded by metadata, with this reason
};

inline constexpr double dt_tolerance = 1e-6;

namespace detail {

inline const std::vector<std::string> aperture_header{"t", "la"};
inline const std::vector<std::string> sensor_header{"t", "ul_x", "ul_y", "ul_z", "ll_x", "ll_y", "ll_z"};

inline double field(const csv::Table& t, std::size_t row, std::size_t col, const std::string& path) {
    const auto v = csv::parse_double(t.rows[row][col]);
    if (!v || !std::isfinite(*v))
        fail(path + ":" + std::to_string(t.line_numbers[row]) + ": non-finite or malformed field '" +
             t.header[col] + "'");
    return *v;
}

}  // namespace detail

/// Reads one recording file. Times must be strictly increasing and uniformly
/// spaced within 1e-6 s unless `fs_override` fixes the sampling rate.
inline Recording ingest(const std::string& path, InputFormat format = InputFormat::automatic,
                        std::optional<double> fs_override = {}) {
    const csv::Table t = csv::read_table(path);
    if (format == InputFormat::automatic) {
        if (t.header == detail::aperture_header) format = InputFormat::aperture;
        else if (t.header == detail::sensor_header) format = InputFormat::sensor;
        else detail::fail(path + ":1: unrecognized header");
    }
    const auto& expected = format == InputFormat::aperture ? detail::aperture_header : detail::sensor_header;
    if (t.header != expected) detail::fail(path + ":1: malformed header for the declared format");
    if (t.rows.size() < 2) detail::fail(path + ": need at least 2 rows");

    std::vector<double> times(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) times[i] = detail::field(t, i, 0, path);
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            detail::fail(path + ":" + std::to_string(t.line_numbers[i]) + ": time is not strictly increasing");
    double dt = times[1] - times[0];
    if (fs_override) {
        if (!(*fs_override > 0.0)) detail::fail("sampling rate override must be positive");
        dt = 1.0 / *fs_override;
    } else {
        for (std::size_t i = 1; i < times.size(); ++i)
            if (std::abs((times[i] - times[i - 1]) - dt) > dt_tolerance)
                detail::fail(path + ":" + std::to_string(t.line_numbers[i]) + ": non-uniform sampling interval");
    }

    Recording rec{std::filesystem::path(path).stem().string(), SampledSeries({0.0}, 1.0), {}, {}, {}};
    if (format == InputFormat::aperture) {
        std::vector<double> la(t.rows.size());
        for (std::size_t i = 0; i < la.size(); ++i) la[i] = detail::field(t, i, 1, path);
        rec.aperture = SampledSeries(std::move(la), dt, "mm");
    } else {
        PointSeries ul{{}, dt}, ll{{}, dt};
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            ul.points.push_back({detail::field(t, i, 1, path), detail::field(t, i, 2, path), detail::field(t, i, 3, path)});
            ll.points.push_back({detail::field(t, i, 4, path), detail::field(t, i, 5, path), detail::field(t, i, 6, path)});
        }
        rec.aperture = lip_aperture(ul, ll);
    }
    return rec;
}

/// Sidecar rows keyed by `id`. Columns `exclude`, `window_start` and
/// `window_end` are interpreted; everything else is free-form metadata.
struct SidecarRow {
    Metadata meta;
    std::string exclusion;
    std::optional<IndexRange> window;
};

inline std::map<std::string, SidecarRow> read_sidecar(const std::string& path) {
    const csv::Table t = csv::read_table(path);
    const auto id_col = t.column("id");
    if (!id_col) detail::fail(path + ":1: metadata table needs an 'id' column");
    std::map<std::string, SidecarRow> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        SidecarRow row;
        std::optional<double> ws, we;
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            const auto& name = t.header[c];
            const auto& value = t.rows[r][c];
            if (c == *id_col) continue;
            if (name == "exclude") {
                row.exclusion = value;
            } else if (name == "window_start" || name == "window_end") {
                if (value.empty()) continue;
                const auto v = csv::parse_double(value);
                if (!v || *v < 0 || *v != std::floor(*v))
                    detail::fail(path + ":" + std::to_string(t.line_numbers[r]) + ": bad " + name);
                (name == "window_start" ? ws : we) = *v;
            } else {
                row.meta[name] = value;
            }
        }
        if (ws && we) row.window = IndexRange{static_cast<std::size_t>(*ws), static_cast<std::size_t>(*we)};
        else if (ws || we) detail::fail(path + ":" + std::to_string(t.line_numbers[r]) + ": window needs both ends");
        const auto& id = t.rows[r][*id_col];
        if (!out.emplace(id, std::move(row)).second)
            detail::fail(path + ":" + std::to_string(t.line_numbers[r]) + ": duplicate id '" + id + "'");
    }
    return out;
}

inline bool is_reserved_table(const std::filesystem::path& p) {
    const auto name = p.filename().string();
    return name == "metadata.csv" || name == "truth.csv";
}

/// Expands files and directories (non-recursive, *.csv, sorted) into
/// recordings sorted by id. A directory's metadata.csv is picked up as the
/// sidecar unless one is given explicitly.
inline std::vector<Recording> ingest_all(const std::vector<std::string>& inputs, InputFormat format,
                                         std::optional<double> fs_override = {},
                                         std::optional<std::string> sidecar = {}) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(in)) {
                if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
                if (is_reserved_table(e.path())) {
                    if (!sidecar && e.path().filename() == "metadata.csv") sidecar = e.path().string();
                    continue;
                }
                found.push_back(e.path().string());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(in)) {
            files.push_back(in);
        } else {
            detail::fail("input path does not exist: " + in);
        }
    }
    std::map<std::string, SidecarRow> side;
    if (sidecar) side = read_sidecar(*sidecar);

    std::vector<Recording> recs;
    for (const auto& f : files) {
        Recording r = ingest(f, format, fs_override);
        if (auto it = side.find(r.id); it != side.end()) {
            r.meta = it->second.meta;
            r.exclusion = it->second.exclusion;
            r.window = it->second.window;
        }
        recs.push_back(std::move(r));
    }
    std::sort(recs.begin(), recs.end(), [](const Recording& a, const Recording& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < recs.size(); ++i)
        if (recs[i].id == recs[i - 1].id) detail::fail("duplicate recording id '" + recs[i].id + "'");
    return recs;
}

/// Writes an aperture-format file.
inline void write_aperture(const std::string& path, const SampledSeries& la) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < la.size(); ++i)
        rows.push_back({csv::fmt(static_cast<double>(i) * la.dt()), csv::fmt(la[i])});
    csv::write_table(path, detail::aperture_header, rows);
}

}  // namespace gesturedyn
