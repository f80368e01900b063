#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "qcf/surd.hpp"

namespace qcf {

/// Eventually periodic continued fraction [a_0; ... a_m, [a_{m+1} ... a_{m+T}]].
/// The preperiod always contains a_0 (so it is never empty) and the period is
/// the primitive cycle of the tail. m() and period_length() follow the usual
/// conventions: m = 0 means "no preperiod" beyond a_0 itself.
struct CFExpansion {
    std::vector<std::int64_t> preperiod;
    std::vector<std::int64_t> period;

    std::int64_t m() const { return static_cast<std::int64_t>(preperiod.size()) - 1; }
    std::int64_t period_length() const { return static_cast<std::int64_t>(period.size()); }

    /// a_i for any i >= 0, unrolling the period.
    std::int64_t quotient_at(std::size_t i) const {
        if (i < preperiod.size()) return preperiod[i];
        return period[(i - preperiod.size()) % period.size()];
    }

    friend bool operator==(const CFExpansion&, const CFExpansion&) = default;
};

/// Smallest d dividing cycle.size() such that the cycle is d-periodic.
inline std::size_t primitive_cycle_length(std::span<const std::int64_t> cycle) {
    std::size_t n = cycle.size();
    for (std::size_t d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        bool ok = true;
        for (std::size_t i = d; i < n && ok; ++i) ok = cycle[i] == cycle[i - d];
        if (ok) return d;
    }
    return n;
}

namespace detail {

struct PQKey {
    std::int64_t p, q;
    friend bool operator==(const PQKey&, const PQKey&) = default;
};

struct PQKeyHash {
    std::size_t operator()(const PQKey& k) const {
        std::uint64_t x = static_cast<std::uint64_t>(k.p) * 0x9e3779b97f4a7c15ULL;
        x ^= static_cast<std::uint64_t>(k.q) + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
        x ^= x >> 31;
        return static_cast<std::size_t>(x * 0xbf58476d1ce4e5b9ULL);
    }
};

}  // namespace detail

/// Classical (P,Q)-state expansion:
///   a = floor((P + sqrt(D))/Q),  P' = aQ - P,  Q' = (D - P'^2)/Q.
/// Every state is an exact integer pair; the period is detected as the first
/// repetition of a (P,Q) state, which already yields the primitive cycle. When
/// the starting state itself repeats (purely periodic value), a_0 still goes to
/// the preperiod and the reported period is the corresponding rotation.
///
/// max_steps == 0 picks a budget that Lagrange periodicity can never exhaust.
inline CFExpansion expand(const QuadraticSurd& s, std::uint64_t max_steps = 0) {
    const std::int64_t d = s.radicand;
    const std::int64_t sq = isqrt(d);
    if (max_steps == 0) max_steps = 64 + 4 * static_cast<std::uint64_t>(d);

    std::int64_t p = s.shift;
    std::int64_t q = s.denom;
    std::vector<std::int64_t> quots;
    std::unordered_map<detail::PQKey, std::uint32_t, detail::PQKeyHash> seen;

    for (std::uint64_t step = 0;; ++step) {
        auto [it, fresh] = seen.try_emplace({p, q}, static_cast<std::uint32_t>(step));
        if (!fresh) {
            std::uint32_t j = it->second;
            CFExpansion out;
            if (j == 0) {
                out.preperiod.assign(quots.begin(), quots.begin() + 1);
                out.period.assign(quots.begin() + 1, quots.end());
                out.period.push_back(quots.front());
            } else {
                out.preperiod.assign(quots.begin(), quots.begin() + j);
                out.period.assign(quots.begin() + j, quots.end());
            }
            if (primitive_cycle_length(out.period) != out.period.size())
                throw internal_error("state-detected period is not primitive");
            if (out.preperiod.size() >= 2 && out.preperiod.back() == out.period.back())
                throw internal_error("preperiod not minimal");
            return out;
        }
        if (step >= max_steps)
            throw domain_error(errc::step_budget_exhausted, "expansion step budget exhausted");

        std::int64_t a = q > 0 ? floor_div(p + sq, q) : floor_div(-p - sq - 1, -q);
        quots.push_back(a);
        std::int64_t p2 = checked_sub(checked_mul(a, q), p);
        std::int64_t num = checked_sub(d, checked_mul(p2, p2));
        if (num % q != 0) throw internal_error("non-divisible expansion state");
        p = p2;
        q = num / q;
        if (q == 0) throw internal_error("zero denominator state: square radicand slipped through");
    }
}

/// Expansion of sqrt(q); exposes T0(q) as period_length().
inline CFExpansion expand_sqrt(std::int64_t q, std::uint64_t max_steps = 0) {
    if (q < 1) throw domain_error(errc::bad_argument, "expand_sqrt needs q >= 1");
    if (is_square(q))
        throw domain_error(errc::perfect_square_input, "perfect square has no expansion");
    return expand(QuadraticSurd{0, q, 1}, max_steps);
}

/// Period length of sqrt(q) by the classical termination rule: within the
/// period of sqrt(q) every quotient is < 2*a_0 except the last, which equals
/// 2*a_0. Much cheaper than state hashing for bulk sweeps; cross-checked
/// against expand_sqrt in the test suite.
inline std::int64_t sqrt_period_length(std::int64_t q) {
    if (q < 1) throw domain_error(errc::bad_argument, "sqrt_period_length needs q >= 1");
    const std::int64_t a0 = isqrt(q);
    if (a0 * a0 == q)
        throw domain_error(errc::perfect_square_input, "perfect square has no period");
    std::int64_t p = a0;
    std::int64_t den = q - a0 * a0;
    const std::int64_t cap = 64 + 4 * q;
    for (std::int64_t k = 1; k <= cap; ++k) {
        std::int64_t a = (p + a0) / den;
        if (a == 2 * a0) return k;
        p = a * den - p;
        den = (q - p * p) / den;
    }
    throw internal_error("sqrt period termination rule failed");
}

/// Convergent p_k/q_k in lowest terms (unbounded integers).
struct ConvergentPair {
    bigint num;
    bigint den;

    friend bool operator==(const ConvergentPair&, const ConvergentPair&) = default;
};

/// p_0/q_0 .. p_k/q_k of the given quotient list via
/// p_k = a_k p_{k-1} + p_{k-2}, q_k likewise.
inline std::vector<ConvergentPair> convergents(std::span<const std::int64_t> quotients) {
    std::vector<ConvergentPair> out;
    out.reserve(quotients.size());
    bigint pm2 = 0, pm1 = 1;  // p_{-2}, p_{-1}
    bigint qm2 = 1, qm1 = 0;
    for (std::int64_t a : quotients) {
        bigint pk = a * pm1 + pm2;
        bigint qk = a * qm1 + qm2;
        out.push_back({pk, qk});
        pm2 = std::move(pm1); pm1 = std::move(pk);
        qm2 = std::move(qm1); qm1 = std::move(qk);
    }
    return out;
}

/// First k+1 convergents of an expansion, unrolled through the period.
inline std::vector<ConvergentPair> convergents(const CFExpansion& cf, std::size_t k) {
    std::vector<std::int64_t> quots(k + 1);
    for (std::size_t i = 0; i <= k; ++i) quots[i] = cf.quotient_at(i);
    return convergents(quots);
}

}  // namespace qcf
