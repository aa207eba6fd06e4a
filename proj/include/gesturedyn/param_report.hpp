#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gesturedyn/dynamics.hpp"
#include "gesturedyn/segment.hpp"
#include "gesturedyn/stats.hpp"

namespace gesturedyn {

struct GroupedFit {
    GestureParams params;
    Metadata meta;
};

struct GroupCorrelations {
    std::map<std::string, Correlation> groups;  // label -> rho/p of r vs T
    std::vector<std::string> warnings;
};

/// "key=value,key=value" over `keys`; missing keys read as NA.
inline std::string group_label(const Metadata& meta, const std::vector<std::string>& keys) {
    std::string label;
    for (const auto& k : keys) {
        if (!label.empty()) label += ',';
        const auto it = meta.find(k);
        label += k + "=" + (it == meta.end() || it->second.empty() ? std::string("NA") : it->second);
    }
    return label.empty() ? "all" : label;
}

/// Spearman correlation of fitted rapidity against fitted target within each
/// metadata group. Groups with fewer than 3 fits, or with a constant
/// parameter, are skipped with a warning.
inline GroupCorrelations param_correlation_report(const std::vector<GroupedFit>& fits,
                                                  const std::vector<std::string>& group_by) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> buckets;
    for (const auto& f : fits) {
        auto& b = buckets[group_label(f.meta, group_by)];
        b.first.push_back(f.params.rapidity);
        b.second.push_back(f.params.target);
    }
    GroupCorrelations out;
    for (const auto& [label, b] : buckets) {
        if (b.first.size() < 3) {
            out.warnings.push_back("group '" + label + "' has " + std::to_string(b.first.size()) +
                                   " fits (< 3); skipped");
            continue;
        }
        try {
            out.groups[label] = spearman(b.first, b.second);
        } catch (const error& e) {
            out.warnings.push_back("group '" + label + "': " + e.what());
        }
    }
    return out;
}

}  // namespace gesturedyn
