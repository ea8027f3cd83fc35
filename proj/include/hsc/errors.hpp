#pragma once

#include <stdexcept>
#include <string>

namespace hsc {

// Bad parameters or mismatched shapes.
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Probability mass pushed past the Fock cutoff exceeds the tolerance.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double tail)
      : std::runtime_error(what + " (tail mass " + std::to_string(tail) + ")"), tail_(tail) {}
  double tail() const noexcept { return tail_; }

 private:
  double tail_;
};

// e.g. the odd cat at alpha = 0, which is the zero vector
class degenerate_state : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested mean photon number below what the squeezing alone gives.
class infeasible_target : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hsc
