#pragma once

#include <bit>
#include <cstdint>
#include <numeric>

#include "qcf/error.hpp"

namespace qcf {

/// Exact integer square root: the r with r*r <= n < (r+1)*(r+1).
/// Pure integer Newton iteration, no floating point anywhere.
inline std::int64_t isqrt(std::int64_t n) {
    if (n < 0) throw domain_error(errc::bad_argument, "isqrt: negative argument");
    if (n < 2) return n;
    auto un = static_cast<std::uint64_t>(n);
    // Initial guess: 2^ceil(bits/2) >= sqrt(n), then Newton descends monotonically.
    std::uint64_t x = std::uint64_t{1} << ((std::bit_width(un) + 1) / 2);
    for (;;) {
        std::uint64_t y = (x + un / x) / 2;
        if (y >= x) break;
        x = y;
    }
    return static_cast<std::int64_t>(x);
}

inline bool is_square(std::int64_t n) {
    if (n < 0) return false;
    std::int64_t r = isqrt(n);
    return r * r == n;
}

/// floor(a/b) for b != 0 (C++ division truncates toward zero).
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw internal_error("int64 overflow in add");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw internal_error("int64 overflow in sub");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw internal_error("int64 overflow in mul");
    return r;
}

}  // namespace qcf
