#pragma once

#include <stdexcept>
#include <string>

namespace removal_lab {

// Violated operation precondition or malformed parameter (CLI exit 1).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Input text that does not match a documented format (CLI exit 1).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Exhaustive/exact mode asked to exceed its configured budget (CLI exit 2).
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace removal_lab
