#include "hrsv/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace hrsv {

namespace {

double quantile_type7(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Summary quartiles(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("quartiles: empty input");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Summary s;
    s.q[0] = sorted.front();
    s.q[1] = quantile_type7(sorted, 0.25);
    s.q[2] = quantile_type7(sorted, 0.5);
    s.q[3] = quantile_type7(sorted, 0.75);
    s.q[4] = sorted.back();
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    return s;
}

CohortReport bucket(std::span<const PersonResult> results) {
    CohortReport report;
    std::map<std::pair<int, int>, std::vector<double>> groups;
    for (const auto& r : results) {
        if (!r.meta.known()) {
            report.unknown_ids.push_back(r.meta.id);
            continue;
        }
        const int sex_key = *r.meta.sex == Sex::female ? 0 : 1;
        const int decade = (*r.meta.age / 10) * 10;
        groups[{sex_key, decade}].push_back(r.weighted);
    }
    for (const auto& [key, values] : groups) {
        CohortStats stats;
        stats.sex = key.first == 0 ? Sex::female : Sex::male;
        stats.decade = key.second;
        stats.count = values.size();
        stats.summary = quartiles(values);
        report.groups.push_back(stats);
    }
    return report;
}

std::vector<PersonBits> trim_to_min(std::vector<PersonBits> persons) {
    if (persons.empty()) return persons;
    const auto shortest =
        std::min_element(persons.begin(), persons.end(), [](const auto& a, const auto& b) {
            return a.bits.size() < b.bits.size();
        })->bits.size();
    for (auto& p : persons) p.bits = p.bits.prefix(shortest);
    return persons;
}

MergedSequence merge_persons(std::span<const PersonBits> persons) {
    MergedSequence merged;
    std::size_t total = 0;
    for (const auto& p : persons) total += p.bits.size();
    merged.bits.reserve(total);
    for (const auto& p : persons) {
        merged.segments.push_back({p.meta.id, merged.bits.size(), p.bits.size()});
        merged.bits.append(p.bits);
    }
    return merged;
}

}  // namespace hrsv
