#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lll {

// Enumeration guard: an operation would have to enumerate more weighted
// assignments than the configured budget allows. Never silently truncated.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(uint64_t requested, uint64_t budget)
      : std::runtime_error("enumeration budget exceeded: needs " +
                           std::to_string(requested) + " assignments, budget " +
                           std::to_string(budget)),
        requested_(requested),
        budget_(budget) {}
  uint64_t requested() const { return requested_; }
  uint64_t budget() const { return budget_; }

 private:
  uint64_t requested_;
  uint64_t budget_;
};

// A documented precondition or internal invariant failed. The message names
// the violated contract.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& what)
      : std::runtime_error(what) {}
};

// Malformed instance or graph file. Carries the offending location.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& origin, int line, const std::string& what)
      : std::runtime_error(origin + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace lll
