#include "hrsv/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace hrsv {

namespace {

void require_length(std::span<const double> intervals, std::size_t min, const char* who) {
    if (intervals.size() < min) {
        throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(min) +
                                    " intervals, got " + std::to_string(intervals.size()));
    }
}

}  // namespace

BitSequence discretize_accel(std::span<const double> d, double offset) {
    require_length(d, 2, "discretize_accel");
    BitSequence out;
    out.reserve(d.size() - 1);
    for (std::size_t i = 1; i < d.size(); ++i) out.push_back(d[i] >= d[i - 1] + offset ? 0 : 1);
    return out;
}

BitSequence discretize_accel(const RRSeries& series, double offset) {
    return discretize_accel(series.intervals(), offset);
}

BitSequence discretize_rapid(std::span<const double> d, double threshold) {
    require_length(d, 2, "discretize_rapid");
    if (!(threshold >= 0.0)) throw std::invalid_argument("discretize_rapid: threshold must be >= 0");
    BitSequence out;
    out.reserve(d.size() - 1);
    for (std::size_t i = 1; i < d.size(); ++i) {
        out.push_back(std::abs(d[i] - d[i - 1]) >= threshold ? 0 : 1);
    }
    return out;
}

BitSequence discretize_rapid(const RRSeries& series, double threshold) {
    return discretize_rapid(series.intervals(), threshold);
}

BitSequence discretize_mono(std::span<const double> d) {
    require_length(d, 3, "discretize_mono");
    BitSequence out;
    out.reserve(d.size() - 2);
    for (std::size_t i = 2; i < d.size(); ++i) {
        const bool rising = d[i] >= d[i - 1] && d[i - 1] >= d[i - 2];
        const bool falling = d[i] <= d[i - 1] && d[i - 1] <= d[i - 2];
        out.push_back(rising || falling ? 0 : 1);
    }
    return out;
}

BitSequence discretize_mono(const RRSeries& series) { return discretize_mono(series.intervals()); }

void TrendCutPattern::validate() const {
    if (accel == 0 || decel == 0) {
        throw std::invalid_argument("trend cut pattern " + to_string() +
                                    ": run lengths must be >= 1");
    }
}

std::string TrendCutPattern::to_string() const {
    return "(" + std::to_string(accel) + "," + std::to_string(decel) + ")";
}

TrendCutResult cut_trends_detailed(const BitSequence& s, const TrendCutPattern& pattern) {
    pattern.validate();
    TrendCutResult result;
    std::vector<std::uint8_t> removed(s.size(), 0);

    std::uint8_t target = 1;
    std::size_t want = pattern.accel;
    std::size_t run = 0;
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
        if (s[pos] != target) {
            run = 0;
            continue;
        }
        if (++run < want) continue;
        for (std::size_t k = pos + 1 - want; k <= pos; ++k) removed[k] = 1;
        run = 0;
        if (target == 1) {
            result.trailing_accel = true;
            target = 0;
            want = pattern.decel;
        } else {
            result.trailing_accel = false;
            ++result.cycles;
            target = 1;
            want = pattern.accel;
        }
    }

    result.bits.reserve(s.size());
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
        if (!removed[pos]) result.bits.push_back(s[pos]);
    }
    return result;
}

BitSequence cut_trends(const BitSequence& s, const TrendCutPattern& pattern) {
    return cut_trends_detailed(s, pattern).bits;
}

}  // namespace hrsv
