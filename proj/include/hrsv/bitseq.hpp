#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hrsv {

/// Finite ordered sequence of binary symbols.
///
/// Every stored element is 0 or 1; construction from text rejects any other
/// character.
class BitSequence {
public:
    using value_type = std::uint8_t;

    BitSequence() = default;
    explicit BitSequence(std::vector<std::uint8_t> bits);

    /// Parses a string of '0'/'1' characters.
    static BitSequence from_string(std::string_view text);

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] bool empty() const noexcept { return bits_.empty(); }
    [[nodiscard]] std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }

    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    [[nodiscard]] auto begin() const noexcept { return bits_.begin(); }
    [[nodiscard]] auto end() const noexcept { return bits_.end(); }

    void push_back(std::uint8_t bit);
    void append(const BitSequence& other);
    void reserve(std::size_t n) { bits_.reserve(n); }

    /// First `n` bits (the whole sequence if shorter).
    [[nodiscard]] BitSequence prefix(std::size_t n) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const BitSequence&, const BitSequence&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// A binary pattern keyed by (length, value). The first bit of the pattern is
/// the most significant of `value`, so "0" and "00" stay distinct.
struct Pattern {
    unsigned length = 0;
    std::uint64_t value = 0;

    static Pattern from_string(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

enum class CountMode { linear, cyclic };

[[nodiscard]] std::string_view to_string(CountMode mode);

/// Longest pattern a CountTable may hold. A table of bound L stores
/// 2^(L+1) - 2 counters.
inline constexpr unsigned kMaxPatternLength = 26;

/// Occurrence counts of every binary pattern of length 1..max_len.
///
/// Occurrences overlap: in "0000" the pattern "00" occurs three times. In
/// linear mode the end of the sequence does not wrap; in cyclic mode the last
/// position is followed by the first, and patterns longer than the sequence
/// never occur.
class CountTable {
public:
    CountTable(unsigned max_len, CountMode mode, std::size_t source_len);

    [[nodiscard]] unsigned max_len() const noexcept { return max_len_; }
    [[nodiscard]] CountMode mode() const noexcept { return mode_; }
    [[nodiscard]] std::size_t source_len() const noexcept { return source_len_; }

    /// Throws std::out_of_range for patterns longer than max_len, the empty
    /// pattern, or values that do not fit the pattern length.
    [[nodiscard]] std::uint64_t count(Pattern p) const;
    [[nodiscard]] std::uint64_t count(std::string_view pattern) const;

    /// All 2^h counters for patterns of length h, indexed by pattern value.
    [[nodiscard]] std::span<const std::uint64_t> level(unsigned h) const;

    /// Whether the counted sequence begins (ends) with `p`. Only patterns up
    /// to max_len can be answered.
    [[nodiscard]] bool starts_with(Pattern p) const;
    [[nodiscard]] bool ends_with(Pattern p) const;

    friend bool operator==(const CountTable&, const CountTable&) = default;

private:
    friend CountTable count_substrings(const BitSequence&, unsigned, CountMode);
    friend CountTable count_substrings_fast(const BitSequence&, unsigned);

    std::span<std::uint64_t> level_mut(unsigned h);
    void record_edges(const BitSequence& s);
    void check_pattern(Pattern p) const;

    unsigned max_len_;
    CountMode mode_;
    std::size_t source_len_;
    // levels_[h - 1] holds the 2^h counters of length-h patterns
    std::vector<std::vector<std::uint64_t>> levels_;
    Pattern head_;
    Pattern tail_;
};

/// Reference counter: reads every window position by position.
CountTable count_substrings(const BitSequence& s, unsigned max_len, CountMode mode);

/// Single-pass linear counter. Windows are kept in a shift register; only
/// patterns with a leading 0 are incremented during the scan and the
/// leading-1 counters are recovered afterwards from
///   count(1w) = count(w) - count(0w) - [s starts with w].
CountTable count_substrings_fast(const BitSequence& s, unsigned max_len);

inline constexpr unsigned kMaxDebruijnOrder = 28;

/// Lexicographically least binary De Bruijn sequence of order k (length 2^k),
/// built by concatenating Lyndon words whose length divides k.
/// Throws std::invalid_argument for k == 0 and std::length_error when k
/// exceeds `max_order`.
BitSequence debruijn(unsigned k, unsigned max_order = kMaxDebruijnOrder);

}  // namespace hrsv
