#pragma once

#include <stdexcept>
#include <string>

namespace erasure {

// Root finder got a bracket without a sign change.
class bracketing_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Iteration budget exhausted; carries the best iterate seen so far.
class convergence_error : public std::runtime_error {
  public:
    convergence_error(const std::string& what, double best_iterate)
        : std::runtime_error(what), best_iterate_(best_iterate) {}
    double best_iterate() const noexcept { return best_iterate_; }

  private:
    double best_iterate_;
};

// An implicit equation has no root in its admissible bracket.
class no_solution_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// An internal cross-check failed (e.g. bound ordering violated beyond slack).
class consistency_error : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace erasure
