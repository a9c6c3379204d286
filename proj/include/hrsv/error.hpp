#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hrsv {

/// Unreadable or malformed input data. `line` and `column` are 1-based and
/// zero when not applicable.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        std::string where = "line " + std::to_string(line);
        if (column != 0) where += ", column " + std::to_string(column);
        return where + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

/// A computed result broke an invariant that should hold for every input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace hrsv
