#pragma once

#include <stdexcept>
#include <string>

namespace fqcommon {

/// Invalid arguments or violated preconditions (caller mistake).
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mathematically undefined request (inverting zero, even characteristic
/// where odd is required, q <= 3 in the closed form, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed input file. Carries the 1-based line (and column when known).
class parse_error : public std::runtime_error {
public:
    parse_error(std::string msg, int line, int column = 0)
        : std::runtime_error(format(msg, line, column)), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& msg, int line, int column) {
        std::string s = "parse error at line " + std::to_string(line);
        if (column > 0) s += ", column " + std::to_string(column);
        return s + ": " + msg;
    }
    int line_ = 0;
    int column_ = 0;
};

/// An enumeration would exceed the configured budget. Names the required count.
class budget_error : public std::runtime_error {
public:
    budget_error(const std::string& context, const std::string& required,
                 const std::string& allowed)
        : std::runtime_error(context + ": requires " + required + " evaluations, budget is " +
                             allowed),
          required_(required) {}

    const std::string& required() const { return required_; }

private:
    std::string required_;
};

}  // namespace fqcommon
