#include "hrsv/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <regex>
#include <stdexcept>

#include "hrsv/error.hpp"

namespace hrsv {

namespace {

constexpr Millis kDay = std::chrono::hours(24);

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        tokens.push_back({line.substr(start, i - start), start + 1});
    }
    return tokens;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const auto* end = text.data() + text.size();
    const auto result = std::from_chars(text.data(), end, out);
    return result.ec == std::errc{} && result.ptr == end;
}

bool all_digits(std::string_view text) {
    return !text.empty() &&
           std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// HH:MM:SS[.fff] -> milliseconds since midnight.
std::optional<Millis> parse_clock(std::string_view text) {
    const auto colon1 = text.find(':');
    const auto colon2 = text.find(':', colon1 + 1);
    if (colon1 == std::string_view::npos || colon2 == std::string_view::npos) return std::nullopt;
    const auto hh = text.substr(0, colon1);
    const auto mm = text.substr(colon1 + 1, colon2 - colon1 - 1);
    auto ss = text.substr(colon2 + 1);
    std::string_view frac;
    if (const auto dot = ss.find('.'); dot != std::string_view::npos) {
        frac = ss.substr(dot + 1);
        ss = ss.substr(0, dot);
        if (!all_digits(frac)) return std::nullopt;
    }
    if (!all_digits(hh) || !all_digits(mm) || !all_digits(ss)) return std::nullopt;
    int h = 0, m = 0, s = 0;
    if (!parse_number(hh, h) || !parse_number(mm, m) || !parse_number(ss, s)) return std::nullopt;
    if (h > 23 || m > 59 || s > 59 || mm.size() != 2 || ss.size() != 2) return std::nullopt;
    long long ms = 0;
    if (!frac.empty()) {
        double f = 0.0;
        const std::string fraction = "0." + std::string(frac);
        if (!parse_number(std::string_view(fraction), f)) return std::nullopt;
        ms = std::llround(f * 1000.0);
    }
    return Millis((h * 3600LL + m * 60LL + s) * 1000LL + ms);
}

std::optional<Millis> parse_seconds(std::string_view text) {
    double seconds = 0.0;
    if (!parse_number(text, seconds) || !std::isfinite(seconds) || seconds < 0.0) {
        return std::nullopt;
    }
    return Millis(std::llround(seconds * 1000.0));
}

std::string regex_escape(std::string_view literal) {
    static const std::string special = R"(\^$.|?*+()[]{})";
    std::string out;
    for (char c : literal) {
        if (special.find(c) != std::string::npos) out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string format_interval(double seconds) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, seconds);
    return std::string(buf, result.ptr);
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

std::vector<double> RRSeries::intervals() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.interval);
    return out;
}

Millis RRSeries::span() const {
    if (records.empty()) return Millis{0};
    return records.back().time - records.front().time;
}

bool known_annotation(char code) {
    // normal, supraventricular, ventricular, fusion, artifact, paced, unknown beat
    static constexpr std::string_view codes = "NSVFAPQXU";
    return codes.find(code) != std::string_view::npos;
}

std::string_view to_string(Sex sex) { return sex == Sex::female ? "F" : "M"; }

std::optional<PersonMeta> parse_file_name(std::string_view file_name, std::string_view pattern) {
    enum class Field { sex, age, start, id };
    std::string expr;
    std::vector<Field> fields;
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] != '<') {
            const auto next = pattern.find('<', i);
            const auto end = next == std::string_view::npos ? pattern.size() : next;
            expr += regex_escape(pattern.substr(i, end - i));
            i = end;
            continue;
        }
        const auto close = pattern.find('>', i);
        if (close == std::string_view::npos) {
            throw std::invalid_argument("meta pattern: unterminated field in '" +
                                        std::string(pattern) + "'");
        }
        const auto name = pattern.substr(i + 1, close - i - 1);
        std::optional<Field> field;
        if (name == "sex") {
            field = Field::sex;
            expr += "([FfMm])";
        } else if (name == "age") {
            field = Field::age;
            expr += "([0-9]{1,3})";
        } else if (name == "HHMMSS") {
            field = Field::start;
            expr += "([0-9]{6})";
        } else if (name == "id") {
            field = Field::id;
            expr += "(.+?)";
        } else if (name == "*") {
            expr += ".*?";
        } else {
            throw std::invalid_argument("meta pattern: unknown field <" + std::string(name) + ">");
        }
        if (field) {
            if (std::find(fields.begin(), fields.end(), *field) != fields.end()) {
                throw std::invalid_argument("meta pattern: field <" + std::string(name) +
                                            "> repeated");
            }
            fields.push_back(*field);
        }
        i = close + 1;
    }

    const std::regex re(expr);
    std::match_results<std::string_view::const_iterator> match;
    if (!std::regex_match(file_name.begin(), file_name.end(), match, re)) return std::nullopt;

    PersonMeta meta;
    meta.id = std::string(file_name);
    for (std::size_t f = 0; f < fields.size(); ++f) {
        const std::string value = match[f + 1].str();
        switch (fields[f]) {
            case Field::sex:
                meta.sex = (value == "F" || value == "f") ? Sex::female : Sex::male;
                break;
            case Field::age:
                meta.age = std::stoi(value);
                break;
            case Field::start: {
                const int h = std::stoi(value.substr(0, 2));
                const int m = std::stoi(value.substr(2, 2));
                const int s = std::stoi(value.substr(4, 2));
                if (h > 23 || m > 59 || s > 59) return std::nullopt;
                meta.start_time = Millis((h * 3600LL + m * 60LL + s) * 1000LL);
                break;
            }
            case Field::id:
                meta.id = value;
                break;
        }
    }
    return meta;
}

HolterFile parse_holter(const std::filesystem::path& path, std::string_view meta_pattern) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return parse_holter(in, path.filename().string(), meta_pattern);
}

HolterFile parse_holter(std::istream& in, std::string_view name, std::string_view meta_pattern) {
    HolterFile file;
    const std::string stem = std::filesystem::path(name).stem().string();
    if (auto meta = parse_file_name(stem, meta_pattern)) {
        file.meta = std::move(*meta);
    } else {
        file.meta.id = stem;
        file.warnings.push_back("file name '" + std::string(name) +
                                "' does not match metadata pattern '" + std::string(meta_pattern) +
                                "'; sex, age and start time unknown");
    }

    std::string line;
    if (!std::getline(in, line)) throw InputError("'" + std::string(name) + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    file.series.header = line;

    std::map<char, std::size_t> unknown_codes;
    std::optional<bool> clock_format;
    Millis day_offset{0};
    Millis previous_raw{0};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens.size() < 4) {
            throw InputError("expected 4 columns (index, time, interval, annotation), found " +
                                 std::to_string(tokens.size()),
                             line_no, line.size() + 1);
        }
        if (tokens.size() > 4) {
            throw InputError("unexpected extra column '" + std::string(tokens[4].text) + "'",
                             line_no, tokens[4].column);
        }

        RRRecord record;
        if (!parse_number(tokens[0].text, record.index) || record.index == 0) {
            throw InputError("invalid observation number '" + std::string(tokens[0].text) + "'",
                             line_no, tokens[0].column);
        }

        const bool is_clock = tokens[1].text.find(':') != std::string_view::npos;
        if (clock_format && *clock_format != is_clock) {
            throw InputError("time format changes within the file", line_no, tokens[1].column);
        }
        clock_format = is_clock;
        const auto raw = is_clock ? parse_clock(tokens[1].text) : parse_seconds(tokens[1].text);
        if (!raw) {
            throw InputError("invalid time '" + std::string(tokens[1].text) + "'", line_no,
                             tokens[1].column);
        }
        if (!file.series.records.empty() && *raw < previous_raw) {
            if (!is_clock) {
                throw InputError("time decreases", line_no, tokens[1].column);
            }
            day_offset += kDay;
        }
        previous_raw = *raw;
        record.time = *raw + day_offset;

        if (!parse_number(tokens[2].text, record.interval) || !std::isfinite(record.interval) ||
            record.interval <= 0.0) {
            throw InputError("invalid RR interval '" + std::string(tokens[2].text) + "'", line_no,
                             tokens[2].column);
        }
        if (tokens[3].text.size() != 1) {
            throw InputError("annotation must be a single character, got '" +
                                 std::string(tokens[3].text) + "'",
                             line_no, tokens[3].column);
        }
        record.annotation = tokens[3].text.front();
        if (!known_annotation(record.annotation)) ++unknown_codes[record.annotation];
        file.series.records.push_back(record);
    }

    if (file.series.records.empty()) throw InputError("'" + std::string(name) + "': no records");
    for (const auto& [code, count] : unknown_codes) {
        file.warnings.push_back("unknown annotation '" + std::string(1, code) + "' on " +
                                std::to_string(count) + " records, treated as non-normal");
    }
    return file;
}

std::string format_time_of_day(Millis time) {
    auto ms = time.count() % kDay.count();
    if (ms < 0) ms += kDay.count();
    const auto h = ms / 3'600'000;
    const auto m = (ms / 60'000) % 60;
    const auto s = (ms / 1000) % 60;
    const auto f = ms % 1000;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld.%03lld", static_cast<long long>(h),
                  static_cast<long long>(m), static_cast<long long>(s), static_cast<long long>(f));
    return buf;
}

void write_holter(std::ostream& out, const RRSeries& series) {
    out << series.header << '\n';
    for (const auto& r : series.records) {
        out << r.index << '\t' << format_time_of_day(r.time) << '\t' << format_interval(r.interval)
            << '\t' << r.annotation << '\n';
    }
}

RRSeries filter_normal(const RRSeries& series) {
    RRSeries out;
    out.header = series.header;
    std::copy_if(series.records.begin(), series.records.end(), std::back_inserter(out.records),
                 [](const RRRecord& r) { return r.normal(); });
    return out;
}

__extension__ using Wide = __int128;

NocturnalWindow find_nocturnal_window(const RRSeries& series, Millis duration) {
    if (series.empty() || series.span() < duration) {
        throw InputError("series spans " + std::to_string(series.span().count()) +
                         " ms, shorter than the " + std::to_string(duration.count()) +
                         " ms nocturnal window");
    }
    const auto& recs = series.records;
    const std::size_t n = recs.size();
    // Sums in integer nanoseconds: exact for 1/128 s and microsecond data, so
    // windows with equal means tie exactly and the earliest one wins.
    std::vector<std::int64_t> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + static_cast<std::int64_t>(std::llround(recs[i].interval * 1e9));
    }

    const Millis last_time = recs.back().time;
    std::optional<NocturnalWindow> best;
    Wide best_sum = 0;
    Wide best_count = 1;
    std::size_t end = 0;
    for (std::size_t start = 0; start < n && recs[start].time + duration <= last_time; ++start) {
        end = std::max(end, start);
        while (end + 1 < n && recs[end + 1].time <= recs[start].time + duration) ++end;
        const Wide sum = prefix[end + 1] - prefix[start];
        const Wide count = static_cast<Wide>(end - start + 1);
        if (!best || sum * best_count > best_sum * count) {
            best_sum = sum;
            best_count = count;
            best = NocturnalWindow{start, end,
                                   static_cast<double>(sum) / 1e9 / static_cast<double>(count)};
        }
    }
    return *best;
}

RRSeries extract_nocturnal(const RRSeries& series, Millis duration) {
    const auto window = find_nocturnal_window(series, duration);
    RRSeries out;
    out.header = series.header;
    out.records.assign(series.records.begin() + static_cast<std::ptrdiff_t>(window.first),
                       series.records.begin() + static_cast<std::ptrdiff_t>(window.last) + 1);
    return out;
}

RRSeries edit_perturbations(const RRSeries& series) {
    RRSeries out;
    out.header = series.header;
    out.records.reserve(series.size());
    std::deque<double> recent;
    const auto remember = [&recent](double interval) {
        recent.push_back(interval);
        if (recent.size() > kMedianWindow) recent.pop_front();
    };

    const auto& recs = series.records;
    std::size_t i = 0;
    while (i < recs.size()) {
        if (recs[i].normal()) {
            out.records.push_back(recs[i]);
            remember(recs[i].interval);
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < recs.size() && !recs[run_end].normal()) ++run_end;
        if (run_end - i <= kMaxReplacedRun && !recent.empty()) {
            for (std::size_t k = i; k < run_end; ++k) {
                RRRecord edited = recs[k];
                edited.interval = median(std::vector<double>(recent.begin(), recent.end()));
                edited.annotation = 'N';
                edited.edited = true;
                out.records.push_back(edited);
                remember(edited.interval);
            }
        }
        i = run_end;
    }
    return out;
}

}  // namespace hrsv
