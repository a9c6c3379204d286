#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "hrsv/bitseq.hpp"
#include "hrsv/ingest.hpp"

namespace hrsv {

/// Seeded generator behind every synthetic source. std::mt19937_64 has a
/// fully specified output sequence, and uniforms are built from its raw
/// output rather than std::uniform_real_distribution, so streams are
/// identical across standard libraries.
class SourceRng {
public:
    explicit SourceRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// I.i.d. bits with P(0) = 1/2 + bias and P(1) = 1/2 - bias. Throws
/// std::invalid_argument unless 0 <= bias <= 1/2.
BitSequence biased_coin(std::size_t n, double bias, std::uint64_t seed);

/// Periodic heart-rate stand-in: d_i = baseline + amplitude sin(2 pi i / period)
/// + uniform noise in [-noise, noise], rounded to microseconds. All records
/// are normal; times are the running sum of intervals, rounded to
/// milliseconds, offset by start_time.
struct SyntheticRRSpec {
    std::size_t n = 20000;
    std::uint64_t seed = 1;
    double baseline = 0.8;
    double amplitude = 0.05;
    double period = 20.0;
    double noise = 0.01;
    Millis start_time{0};

    /// Throws std::invalid_argument unless baseline > amplitude + noise,
    /// amplitude >= 0, noise >= 0 and period > 0.
    void validate() const;
};

inline constexpr std::string_view kSyntheticHeader = "# synthetic RR series: index time interval annotation";

RRSeries synthetic_rr(const SyntheticRRSpec& spec);

}  // namespace hrsv
