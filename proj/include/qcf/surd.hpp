#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qcf/error.hpp"
#include "qcf/int_util.hpp"

namespace qcf {

using bigint = boost::multiprecision::cpp_int;

/// Exact quadratic irrational (shift + sqrt(radicand)) / denom, kept in the
/// canonical form where denom divides radicand - shift^2. That divisibility is
/// what keeps every state of the expansion recurrence an exact integer.
struct QuadraticSurd {
    std::int64_t shift = 0;     // P
    std::int64_t radicand = 0;  // D, positive and non-square
    std::int64_t denom = 1;     // Q, nonzero

    friend bool operator==(const QuadraticSurd&, const QuadraticSurd&) = default;
};

namespace detail {

inline void check_radicand(std::int64_t d) {
    if (d <= 0)
        throw domain_error(errc::nonpositive_discriminant, "radicand must be positive");
    if (is_square(d))
        throw domain_error(errc::square_discriminant,
                           "radicand is a perfect square: value is rational");
}

inline std::int64_t mul_fits(std::int64_t a, std::int64_t b) {
    __int128 r = static_cast<__int128>(a) * b;
    if (r > INT64_MAX || r < INT64_MIN)
        throw domain_error(errc::bad_argument, "surd components too large");
    return static_cast<std::int64_t>(r);
}

}  // namespace detail

/// Canonical constructor. Rescales (P,D,Q) -> (tP, t^2 D, tQ) with the minimal
/// t = |Q| / gcd(Q, D - P^2) so that Q | D - P^2, then strips common factors
/// d | gcd(P,Q) with d^2 | D while the divisibility invariant survives.
inline QuadraticSurd canonical_surd(std::int64_t shift, std::int64_t radicand,
                                    std::int64_t denom) {
    if (denom == 0) throw domain_error(errc::zero_denominator, "zero denominator");
    detail::check_radicand(radicand);

    std::int64_t rem = checked_sub(radicand, detail::mul_fits(shift, shift));
    if (rem % denom != 0) {
        std::int64_t g = std::gcd(denom, rem);
        std::int64_t t = (denom < 0 ? -denom : denom) / g;
        shift = detail::mul_fits(shift, t);
        radicand = detail::mul_fits(detail::mul_fits(radicand, t), t);
        denom = detail::mul_fits(denom, t);
        rem = checked_sub(radicand, detail::mul_fits(shift, shift));
    }

    for (;;) {
        std::int64_t g = std::gcd(shift, denom);
        std::vector<std::int64_t> divs;
        for (std::int64_t d = 1; d * d <= g; ++d) {
            if (g % d != 0) continue;
            divs.push_back(d);
            if (d != g / d) divs.push_back(g / d);
        }
        std::sort(divs.rbegin(), divs.rend());
        std::int64_t best = 1;
        for (std::int64_t c : divs) {
            if (c == 1) break;
            std::int64_t c2 = c * c;
            if (radicand % c2 != 0) continue;
            if ((rem / c2) % (denom / c) != 0) continue;
            best = c;
            break;
        }
        if (best == 1) break;
        shift /= best;
        denom /= best;
        radicand /= best * best;
        rem = radicand - shift * shift;
    }
    return QuadraticSurd{shift, radicand, denom};
}

/// The "+" root of r x^2 + p x = q, i.e. (-p + sqrt(p^2 + 4rq)) / (2r).
/// Rejects nonpositive and square discriminants with distinct error kinds.
inline QuadraticSurd make_surd(std::int64_t r, std::int64_t p, std::int64_t q) {
    if (r <= 0) throw domain_error(errc::bad_argument, "leading coefficient must be positive");
    std::int64_t delta =
        checked_add(detail::mul_fits(p, p), detail::mul_fits(4, detail::mul_fits(r, q)));
    if (delta <= 0)
        throw domain_error(errc::nonpositive_discriminant, "discriminant not positive");
    if (is_square(delta))
        throw domain_error(errc::square_discriminant, "square discriminant: rational root");
    return canonical_surd(-p, delta, 2 * r);
}

inline std::int64_t discriminant_of(std::int64_t r, std::int64_t p, std::int64_t q) {
    return checked_add(detail::mul_fits(p, p), detail::mul_fits(4, detail::mul_fits(r, q)));
}

/// Exact floor, using only isqrt. For an irrational sqrt(D),
/// floor((P + sqrt(D))/Q) = floor((P + isqrt(D))/Q) when Q > 0, and the
/// numerator floor flips to -P - isqrt(D) - 1 when Q < 0.
inline std::int64_t floor_surd(const QuadraticSurd& s) {
    std::int64_t r = isqrt(s.radicand);
    if (s.denom > 0) return floor_div(s.shift + r, s.denom);
    return floor_div(-s.shift - r - 1, -s.denom);
}

/// The algebraic conjugate (shift - sqrt(D))/denom, as (-shift + sqrt(D))/(-denom).
inline QuadraticSurd conjugate(const QuadraticSurd& s) {
    return QuadraticSurd{-s.shift, s.radicand, -s.denom};
}

/// Sign of s - num/den, exact (den != 0). Never returns 0: s is irrational.
inline int cmp_rational(const QuadraticSurd& s, const bigint& num, const bigint& den) {
    if (den == 0) throw domain_error(errc::bad_argument, "zero denominator in comparison");
    bigint n = num, d = den;
    if (d < 0) { d = -d; n = -n; }
    // s - n/d has the sign of (P*d - n*Q) + d*sqrt(D), times sign(Q).
    bigint lin = bigint(s.shift) * d - n * s.denom;
    int x_sign;
    if (lin >= 0) {
        x_sign = 1;
    } else {
        bigint rad_part = d * d * s.radicand - lin * lin;
        x_sign = rad_part > 0 ? 1 : -1;
    }
    return s.denom > 0 ? x_sign : -x_sign;
}

inline double approx_value(const QuadraticSurd& s) {
    return (static_cast<double>(s.shift) + std::sqrt(static_cast<double>(s.radicand))) /
           static_cast<double>(s.denom);
}

inline std::string to_string(const QuadraticSurd& s) {
    return "(" + std::to_string(s.shift) + "+sqrt(" + std::to_string(s.radicand) + "))/" +
           std::to_string(s.denom);
}

}  // namespace qcf
