#pragma once

#include <stdexcept>
#include <string>

namespace qcf {

/// What kind of input was rejected. Mapped to exit code 3 by the CLI.
enum class errc {
    nonpositive_discriminant,  // delta <= 0: no real irrational root
    square_discriminant,       // delta a perfect square: rational root
    zero_denominator,
    perfect_square_input,      // expand_sqrt / t0 of a square
    invalid_discriminant,      // delta == 2 or 3 (mod 4), impossible for p^2+4rq
    step_budget_exhausted,
    bad_constraint,            // duplicate position / nonpositive index in a cylinder
    tolerance_budget,          // certified enclosure not reachable within node budget
    bad_argument,
};

class domain_error : public std::runtime_error {
public:
    domain_error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    errc kind() const noexcept { return kind_; }

private:
    errc kind_;
};

/// A broken internal invariant (non-divisible state, overflow, failed exact
/// verification). Must never fire on valid inputs; mapped to exit code 4.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace qcf
