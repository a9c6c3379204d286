#include "hrsv/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hrsv {

BitSequence biased_coin(std::size_t n, double bias, std::uint64_t seed) {
    if (!(bias >= 0.0 && bias <= 0.5)) {
        throw std::invalid_argument("biased_coin: bias must be in [0, 1/2], got " +
                                    std::to_string(bias));
    }
    SourceRng rng(seed);
    const double p_zero = 0.5 + bias;
    BitSequence out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(rng.uniform() < p_zero ? 0 : 1);
    return out;
}

void SyntheticRRSpec::validate() const {
    if (!(amplitude >= 0.0) || !(noise >= 0.0)) {
        throw std::invalid_argument("synthetic_rr: amplitude and noise must be >= 0");
    }
    if (!(period > 0.0)) throw std::invalid_argument("synthetic_rr: period must be > 0");
    if (!(baseline > amplitude + noise)) {
        throw std::invalid_argument("synthetic_rr: baseline must exceed amplitude + noise");
    }
}

RRSeries synthetic_rr(const SyntheticRRSpec& spec) {
    spec.validate();
    SourceRng rng(spec.seed);
    RRSeries series;
    series.header = std::string(kSyntheticHeader);
    series.records.reserve(spec.n);
    double elapsed = 0.0;
    for (std::size_t i = 1; i <= spec.n; ++i) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / spec.period;
        double d = spec.baseline + spec.amplitude * std::sin(phase);
        if (spec.noise > 0.0) d += spec.noise * (2.0 * rng.uniform() - 1.0);
        // microsecond resolution keeps the text form short
        d = std::round(d * 1e6) / 1e6;
        elapsed += d;
        RRRecord r;
        r.index = i;
        r.time = spec.start_time + Millis(std::llround(elapsed * 1000.0));
        r.interval = d;
        r.annotation = 'N';
        series.records.push_back(r);
    }
    return series;
}

}  // namespace hrsv
