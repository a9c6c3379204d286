#include "hrsv/bitseq.hpp"

#include <algorithm>
#include <stdexcept>

namespace hrsv {

namespace {

constexpr std::uint64_t low_mask(unsigned len) {
    return len >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << len) - 1;
}

}  // namespace

BitSequence::BitSequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
        throw std::invalid_argument("BitSequence: elements must be 0 or 1");
    }
}

BitSequence BitSequence::from_string(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '0' && c != '1') {
            throw std::invalid_argument("BitSequence: invalid character '" + std::string(1, c) +
                                        "' at offset " + std::to_string(i));
        }
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    BitSequence s;
    s.bits_ = std::move(bits);
    return s;
}

void BitSequence::push_back(std::uint8_t bit) {
    if (bit > 1) throw std::invalid_argument("BitSequence: elements must be 0 or 1");
    bits_.push_back(bit);
}

void BitSequence::append(const BitSequence& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

BitSequence BitSequence::prefix(std::size_t n) const {
    BitSequence out;
    const auto len = std::min(n, bits_.size());
    out.bits_.assign(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(len));
    return out;
}

std::string BitSequence::to_string() const {
    std::string out(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out[i] = '1';
    }
    return out;
}

Pattern Pattern::from_string(std::string_view text) {
    if (text.size() > 64) throw std::invalid_argument("Pattern: longer than 64 bits");
    Pattern p{static_cast<unsigned>(text.size()), 0};
    for (char c : text) {
        if (c != '0' && c != '1') throw std::invalid_argument("Pattern: invalid character");
        p.value = (p.value << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return p;
}

std::string Pattern::to_string() const {
    std::string out(length, '0');
    for (unsigned i = 0; i < length; ++i) {
        if ((value >> (length - 1 - i)) & 1U) out[i] = '1';
    }
    return out;
}

std::string_view to_string(CountMode mode) {
    return mode == CountMode::linear ? "linear" : "cyclic";
}

CountTable::CountTable(unsigned max_len, CountMode mode, std::size_t source_len)
    : max_len_(max_len), mode_(mode), source_len_(source_len) {
    if (max_len == 0) throw std::invalid_argument("CountTable: max_len must be >= 1");
    if (max_len > kMaxPatternLength) {
        throw std::length_error("CountTable: max_len " + std::to_string(max_len) +
                                " exceeds the memory budget (" +
                                std::to_string(kMaxPatternLength) + ")");
    }
    levels_.reserve(max_len);
    for (unsigned h = 1; h <= max_len; ++h) {
        levels_.emplace_back(std::size_t{1} << h, 0);
    }
}

void CountTable::check_pattern(Pattern p) const {
    if (p.length == 0 || p.length > max_len_) {
        throw std::out_of_range("CountTable: pattern length " + std::to_string(p.length) +
                                " outside 1.." + std::to_string(max_len_));
    }
    if (p.value > low_mask(p.length)) {
        throw std::out_of_range("CountTable: pattern value does not fit its length");
    }
}

std::uint64_t CountTable::count(Pattern p) const {
    check_pattern(p);
    return levels_[p.length - 1][p.value];
}

std::uint64_t CountTable::count(std::string_view pattern) const {
    return count(Pattern::from_string(pattern));
}

std::span<const std::uint64_t> CountTable::level(unsigned h) const {
    if (h == 0 || h > max_len_) throw std::out_of_range("CountTable: level out of range");
    return levels_[h - 1];
}

std::span<std::uint64_t> CountTable::level_mut(unsigned h) { return levels_[h - 1]; }

bool CountTable::starts_with(Pattern p) const {
    if (p.length == 0) return true;
    check_pattern(p);
    if (p.length > head_.length) return false;
    return (head_.value >> (head_.length - p.length)) == p.value;
}

bool CountTable::ends_with(Pattern p) const {
    if (p.length == 0) return true;
    check_pattern(p);
    if (p.length > tail_.length) return false;
    return (tail_.value & low_mask(p.length)) == p.value;
}

void CountTable::record_edges(const BitSequence& s) {
    const auto edge = static_cast<unsigned>(std::min<std::size_t>(max_len_, s.size()));
    head_ = Pattern{edge, 0};
    tail_ = Pattern{edge, 0};
    for (unsigned i = 0; i < edge; ++i) {
        head_.value = (head_.value << 1) | s[i];
        tail_.value = (tail_.value << 1) | s[s.size() - edge + i];
    }
}

CountTable count_substrings(const BitSequence& s, unsigned max_len, CountMode mode) {
    CountTable table(max_len, mode, s.size());
    table.record_edges(s);
    const std::size_t n = s.size();
    for (std::size_t start = 0; start < n; ++start) {
        std::uint64_t value = 0;
        for (unsigned h = 1; h <= max_len; ++h) {
            std::size_t pos = start + h - 1;
            if (mode == CountMode::linear) {
                if (pos >= n) break;
            } else {
                if (h > n) break;
                pos %= n;
            }
            value = (value << 1) | s[pos];
            ++table.level_mut(h)[value];
        }
    }
    return table;
}

CountTable count_substrings_fast(const BitSequence& s, unsigned max_len) {
    CountTable table(max_len, CountMode::linear, s.size());
    table.record_edges(s);
    const std::size_t n = s.size();
    const auto bits = s.bits();

    std::vector<std::uint64_t*> levels(max_len + 1, nullptr);
    for (unsigned h = 1; h <= max_len; ++h) levels[h] = table.level_mut(h).data();

    // register holds the last max_len bits; the length-h window ending at pos
    // is its low h bits and starts with bits[pos - h + 1]
    std::uint64_t reg = 0;
    const std::uint64_t mask = low_mask(max_len);
    for (std::size_t pos = 0; pos < n; ++pos) {
        reg = ((reg << 1) | bits[pos]) & mask;
        const auto reach = static_cast<unsigned>(std::min<std::size_t>(max_len, pos + 1));
        for (unsigned h = 1; h <= reach; ++h) {
            if (bits[pos + 1 - h] == 0) ++levels[h][reg & low_mask(h)];
        }
    }

    levels[1][1] = n - levels[1][0];
    for (unsigned h = 2; h <= max_len; ++h) {
        const std::uint64_t shorter = std::uint64_t{1} << (h - 1);
        for (std::uint64_t w = 0; w < shorter; ++w) {
            const auto lead = table.starts_with(Pattern{h - 1, w}) ? 1U : 0U;
            levels[h][shorter | w] = levels[h - 1][w] - levels[h][w] - lead;
        }
    }
    return table;
}

BitSequence debruijn(unsigned k, unsigned max_order) {
    if (k == 0) throw std::invalid_argument("debruijn: order must be >= 1");
    if (k > max_order) {
        throw std::length_error("debruijn: order " + std::to_string(k) +
                                " exceeds the memory budget (max " + std::to_string(max_order) +
                                ")");
    }
    // Fredricksen-Kessler-Maiorana: Lyndon words in lexicographic order
    std::vector<std::uint8_t> out;
    out.reserve(std::size_t{1} << k);
    std::vector<std::uint8_t> word(k + 1, 0);
    std::size_t i = 1;
    while (true) {
        if (k % i == 0) {
            out.insert(out.end(), word.begin() + 1, word.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        }
        for (std::size_t t = i + 1; t <= k; ++t) word[t] = word[t - i];
        i = k;
        while (i > 0 && word[i] == 1) --i;
        if (i == 0) break;
        word[i] = 1;
    }
    return BitSequence(std::move(out));
}

}  // namespace hrsv
