#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qcf/cf.hpp"
#include "qcf/number_theory.hpp"
#include "qcf/surd.hpp"

namespace qcf {

/// Side of the line v = x*u on which a newly created region value lies:
/// above <=> the value is positive (north-west of the polyline).
enum class Side : std::uint8_t { above, below };

/// Superbasis value triple along the river of r v^2 + p v u - q u^2.
/// a sits north-west of the polyline, b south-east, h is the common
/// difference of the arithmetic progression d, a+b, c across the current
/// edge. On the river a > 0 > b and h^2 - 4ab = Delta throughout.
struct RiverState {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t h = 0;
    std::uint64_t n = 0;  // step counter of the gradual algorithm

    friend bool operator==(const RiverState& x, const RiverState& y) {
        return x.a == y.a && x.b == y.b && x.h == y.h;  // n is bookkeeping
    }
};

inline std::int64_t river_discriminant(const RiverState& s) {
    return checked_sub(checked_mul(s.h, s.h), checked_mul(4, checked_mul(s.a, s.b)));
}

struct RiverStepResult {
    RiverState state;
    Side side;
};

/// One move along the river. The next region value is c = a + b + h; a
/// positive c becomes the new north-west value (side above), a negative c the
/// new south-east value. c = 0 would mean a square discriminant.
inline RiverStepResult river_step_full(const RiverState& s) {
    std::int64_t c = checked_add(checked_add(s.a, s.b), s.h);
    if (c == 0) throw internal_error("river: region value 0, square discriminant slipped through");
    if (c > 0)
        return {RiverState{c, s.b, checked_add(s.h, 2 * s.b), s.n + 1}, Side::above};
    return {RiverState{s.a, c, checked_add(s.h, 2 * s.a), s.n + 1}, Side::below};
}

inline RiverState river_step(const RiverState& s) { return river_step_full(s).state; }

/// Walk history. states[0] is the initial triple (step 0); states[k] is the
/// triple after step k; sides[k-1] records which side step k landed on.
/// first_quotient_index is the index of the partial quotient the first
/// post-n0 run of equal sides belongs to (the segment numbering already
/// includes the shift for a_0 = 0).
struct RiverTrace {
    std::vector<RiverState> states;
    std::vector<Side> sides;
    std::uint64_t n0 = 0;
    std::uint64_t l0 = 0;               // quotient index of the segment holding step n0+1
    std::uint64_t first_quotient_index = 0;
    std::int64_t translation = 0;       // integer shift applied to make the root positive
    std::int64_t delta = 0;
};

struct RiverInit {
    RiverState state;  // the triple at step n0, on the river
    RiverTrace trace;
};

namespace detail {

struct TripleKey {
    std::int64_t a, b, h;
    friend bool operator==(const TripleKey&, const TripleKey&) = default;
};

struct TripleHash {
    std::size_t operator()(const TripleKey& k) const {
        std::uint64_t x = static_cast<std::uint64_t>(k.a) * 0x9e3779b97f4a7c15ULL;
        x ^= static_cast<std::uint64_t>(k.b) + (x << 7) + (x >> 3);
        x = (x ^ (x >> 31)) * 0xbf58476d1ce4e5b9ULL;
        x ^= static_cast<std::uint64_t>(k.h) + (x << 5) + (x >> 2);
        return static_cast<std::size_t>(x ^ (x >> 29));
    }
};

/// Exact test: is v/u (u > 0) above the "+" root of r x^2 + p x = q?
inline bool above_plus_root(const bigint& u, const bigint& v, std::int64_t r, std::int64_t p,
                            std::int64_t delta) {
    bigint lhs = 2 * r * v + p * u;  // v/u > x_+  <=>  lhs > u*sqrt(delta)
    if (lhs <= 0) return false;
    return lhs * lhs > u * u * delta;
}

inline std::int64_t to_i64(const bigint& v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN) throw internal_error(std::string("overflow: ") + what);
    return static_cast<std::int64_t>(v);
}

}  // namespace detail

/// Start a walk for the form of r x^2 + p x = q. The initial superbasis
/// {(0,1),(1,0),(1,1)} carries the triple (r, -q, p). With one positive root
/// (rq > 0) that edge is already on the river and n0 = l0 = 0. Otherwise the
/// walk approximates x_+ by mediants (exact lattice vectors, unbounded
/// integers) until the straddling pair separates x_+ from x_-; a negative x_+
/// is first translated by -floor(x_+), which preserves the discriminant and
/// every quotient past a_0.
inline RiverInit init_river(std::int64_t r, std::int64_t p, std::int64_t q,
                            std::uint64_t max_steps = 1u << 20) {
    if (r <= 0) throw domain_error(errc::bad_argument, "r must be positive");
    std::int64_t delta = discriminant_of(r, p, q);
    if (delta <= 0) throw domain_error(errc::nonpositive_discriminant, "discriminant not positive");
    if (is_square(delta)) throw domain_error(errc::square_discriminant, "square discriminant");

    RiverTrace trace;
    trace.delta = delta;
    std::int64_t a0 = floor_surd(make_surd(r, p, q));
    if (a0 < 0) {
        trace.translation = a0;
        q = checked_sub(q, checked_add(checked_mul(checked_mul(r, a0), a0), checked_mul(p, a0)));
        p = checked_add(p, checked_mul(2, checked_mul(r, a0)));
        a0 = 0;
    }

    RiverState init{r, -q, p, 0};
    if (river_discriminant(init) != delta) throw internal_error("initial triple invariant");
    trace.states.push_back(init);

    if (q > 0) {  // one positive root: river from the start
        trace.n0 = 0;
        trace.l0 = 0;
        trace.first_quotient_index = a0 >= 1 ? 0 : 1;
        return {init, trace};
    }

    // Two roots on the same side of zero (x_+ > 0 after translation):
    // mediant walk with exact coordinates until f(lo) turns negative.
    bigint ulo = 1, vlo = 0;  // fraction 0/1
    bigint uhi = 0, vhi = 1;  // fraction 1/0
    auto form = [&](const bigint& u, const bigint& v) -> bigint {
        return r * v * v + p * v * u - q * u * u;
    };
    std::uint64_t changes = 0;
    for (std::uint64_t n = 1; n <= max_steps; ++n) {
        bigint um = ulo + uhi, vm = vlo + vhi;
        Side side = detail::above_plus_root(um, vm, r, p, delta) ? Side::above : Side::below;
        if (side == Side::above) { uhi = um; vhi = vm; }
        else { ulo = um; vlo = vm; }
        if (!trace.sides.empty() && trace.sides.back() != side) ++changes;
        trace.sides.push_back(side);

        bigint fa = form(uhi, vhi), fb = form(ulo, vlo);
        bigint fm = form(ulo + uhi, vlo + vhi);
        RiverState st{detail::to_i64(fa, "river a"), detail::to_i64(fb, "river b"),
                      detail::to_i64(fm - fa - fb, "river h"), n};
        if (river_discriminant(st) != delta) throw internal_error("pre-river invariant");
        trace.states.push_back(st);

        if (fb < 0) {
            trace.n0 = n;
            trace.l0 = changes + (a0 == 0 ? 1 : 0);
            trace.first_quotient_index = trace.l0;
            return {st, trace};
        }
    }
    throw domain_error(errc::step_budget_exhausted, "pre-river phase exceeded step budget");
}

/// Append `steps` more moves to a trace (CLI trace dumps).
inline void extend_trace(RiverTrace& trace, std::uint64_t steps) {
    for (std::uint64_t i = 0; i < steps; ++i) {
        auto [st, side] = river_step_full(trace.states.back());
        trace.states.push_back(st);
        trace.sides.push_back(side);
    }
}

/// Maximal runs of equal side marks, in trace order. The trailing run is cut
/// off by the end of the trace and is in general a partial quotient.
inline std::vector<std::int64_t> quotients_from_trace(const RiverTrace& trace) {
    if (trace.states.empty()) throw domain_error(errc::bad_argument, "empty trace");
    std::vector<std::int64_t> runs;
    for (std::size_t i = 0; i < trace.sides.size(); ++i) {
        if (i == 0 || trace.sides[i] != trace.sides[i - 1]) runs.push_back(1);
        else ++runs.back();
    }
    return runs;
}

/// Period detection along the river, plus the quotient cycle it generates.
struct PeriodReport {
    std::uint64_t n0 = 0;
    std::uint64_t n1 = 0;
    std::uint64_t period_sum = 0;            // n1 - n0
    std::vector<std::int64_t> quotients;     // cyclic run decomposition, l1 - l0 entries
    std::vector<std::int64_t> minimal_period;
    bool doubled = false;                    // cycle holds two copies (odd minimal period)
    std::uint64_t l0 = 0;
    std::int64_t delta = 0;
    std::int64_t translation = 0;
};

/// Walks from the post-l0 state keeping a triple -> step index map; the first
/// repeated triple closes the cycle. The step budget is f(Delta/4) + 1: by the
/// period-sum bound the cycle must close within it, so running out is a
/// theorem violation, not an input error.
inline PeriodReport detect_period(std::int64_t r, std::int64_t p, std::int64_t q,
                                  const DivisorTable* table = nullptr) {
    RiverInit init = init_river(r, p, q);
    const std::int64_t delta = init.trace.delta;
    std::int64_t budget = (table && table->limit() >= static_cast<std::uint64_t>(delta / 4))
                              ? f_bound(delta, *table)
                              : f_bound(delta);
    ++budget;

    std::unordered_map<detail::TripleKey, std::uint64_t, detail::TripleHash> first_seen;
    first_seen.reserve(static_cast<std::size_t>(budget) + 4);

    PeriodReport rep;
    rep.n0 = init.trace.n0;
    rep.l0 = init.trace.l0;
    rep.delta = delta;
    rep.translation = init.trace.translation;

    RiverState cur = init.state;
    std::vector<Side> sides;
    first_seen.emplace(detail::TripleKey{cur.a, cur.b, cur.h}, cur.n);
    for (std::int64_t step = 0; step <= budget; ++step) {
        auto [next, side] = river_step_full(cur);
        if (river_discriminant(next) != delta) throw internal_error("river invariant broken");
        sides.push_back(side);
        auto [it, fresh] = first_seen.try_emplace(detail::TripleKey{next.a, next.b, next.h}, next.n);
        if (!fresh) {
            if (it->second != rep.n0)
                throw internal_error("river cycle did not close at the entry state");
            rep.n1 = next.n;
            rep.period_sum = rep.n1 - rep.n0;

            // Runs of the cycle's side word, read cyclically: the wrap-around
            // boundary can split a quotient, so start at the first side change.
            std::size_t len = sides.size();
            std::size_t start = 0;
            while (start < len && sides[start] == sides[(start + len - 1) % len]) ++start;
            if (start == len) throw internal_error("river cycle never changes side");
            for (std::size_t i = 0; i < len; ++i) {
                Side s = sides[(start + i) % len];
                if (i == 0 || s != sides[(start + i - 1) % len]) rep.quotients.push_back(1);
                else ++rep.quotients.back();
            }
            if (rep.quotients.size() % 2 != 0)
                throw internal_error("river cycle quotient count is odd");

            std::size_t d = primitive_cycle_length(rep.quotients);
            rep.minimal_period.assign(rep.quotients.begin(), rep.quotients.begin() + d);
            rep.doubled = rep.quotients.size() == 2 * d;
            if (d % 2 == 1 && !rep.doubled)
                throw internal_error("odd minimal period without doubled cycle");
            if (d % 2 == 0 && rep.quotients.size() != d)
                throw internal_error("even minimal period with non-primitive cycle");
            return rep;
        }
        cur = next;
    }
    throw internal_error("river step budget f(delta/4)+1 exceeded: period-sum bound violated");
}

/// Period-sum bound record for one equation.
struct Theorem2Record {
    std::int64_t r = 0, p = 0, q = 0;
    std::int64_t delta = 0;
    std::int64_t period_length = 0;
    std::int64_t period_sum = 0;    // over one true period from the expansion
    std::int64_t bound = 0;         // f(delta/4)
    bool odd_period = false;
    std::int64_t effective_bound = 0;  // bound, halved for odd periods
    bool ok = false;
};

inline Theorem2Record check_theorem2(std::int64_t r, std::int64_t p, std::int64_t q,
                                     const DivisorTable* table = nullptr) {
    Theorem2Record rec;
    rec.r = r; rec.p = p; rec.q = q;
    rec.delta = discriminant_of(r, p, q);
    CFExpansion cf = expand(make_surd(r, p, q));
    rec.period_length = cf.period_length();
    rec.period_sum = 0;
    for (std::int64_t a : cf.period) rec.period_sum += a;
    rec.bound = (table && table->limit() >= static_cast<std::uint64_t>(rec.delta / 4))
                    ? f_bound(rec.delta, *table)
                    : f_bound(rec.delta);
    rec.odd_period = rec.period_length % 2 == 1;
    rec.effective_bound = rec.odd_period ? rec.bound / 2 : rec.bound;
    rec.ok = rec.period_sum <= rec.effective_bound;
    return rec;
}

/// Palindromic structure of a period.
///
/// Reversal symmetry (the reversed cycle is a rotation of the cycle) is the
/// property the river's reflection argument actually gives for p = 0 or
/// r = 1; a literally palindromic rotation need not exist (period [1,2] of
/// sqrt(3) has none). The drop-last form is the classic sqrt(q) shape:
/// [a_1 .. a_{T-1}] is a palindrome and a_T = 2 a_0.
struct PalindromeReport {
    bool rotation_palindrome = false;
    std::size_t rotation_offset = 0;       // valid when rotation_palindrome
    bool reversal_symmetric = false;
    bool drop_last_palindrome = false;
    bool remark_scope = false;             // p == 0 or r == 1
    bool ok = true;                        // remark_scope implies reversal_symmetric
};

namespace detail {

inline bool is_palindrome(std::span<const std::int64_t> w) {
    for (std::size_t i = 0, j = w.size(); i + 1 < j; ++i, --j)
        if (w[i] != w[j - 1]) return false;
    return true;
}

}  // namespace detail

/// Diagnostic: the period of the conjugate root against the period of x_+.
/// The river's uniqueness argument predicts the former is a reversed rotation
/// of the latter; this is reported, not asserted, so sweeps can flag
/// exceptions loudly without aborting.
struct ConjugatePeriodReport {
    std::vector<std::int64_t> plus_period;
    std::vector<std::int64_t> minus_period;
    bool reversed_rotation = false;
};

namespace detail {

inline bool is_rotation(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    if (a.size() != b.size() || a.empty()) return a.size() == b.size();
    std::vector<std::int64_t> doubled(a);
    doubled.insert(doubled.end(), a.begin(), a.end());
    return std::search(doubled.begin(), doubled.end(), b.begin(), b.end()) != doubled.end();
}

}  // namespace detail

inline ConjugatePeriodReport conjugate_period_check(std::int64_t r, std::int64_t p,
                                                    std::int64_t q) {
    ConjugatePeriodReport rep;
    QuadraticSurd plus = make_surd(r, p, q);
    rep.plus_period = expand(plus).period;
    rep.minus_period = expand(conjugate(plus)).period;
    std::vector<std::int64_t> rev(rep.plus_period.rbegin(), rep.plus_period.rend());
    rep.reversed_rotation = detail::is_rotation(rep.minus_period, rev);
    return rep;
}

inline PalindromeReport palindrome_check(const CFExpansion& cf, std::int64_t r, std::int64_t p) {
    PalindromeReport rep;
    rep.remark_scope = (p == 0 || r == 1);
    const auto& w = cf.period;
    std::size_t n = w.size();

    std::vector<std::int64_t> rot(w.begin(), w.end());
    for (std::size_t off = 0; off < n; ++off) {
        if (detail::is_palindrome(rot)) {
            rep.rotation_palindrome = true;
            rep.rotation_offset = off;
            break;
        }
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    }

    std::vector<std::int64_t> rev(w.rbegin(), w.rend());
    std::vector<std::int64_t> doubled(w.begin(), w.end());
    doubled.insert(doubled.end(), w.begin(), w.end());
    rep.reversal_symmetric =
        std::search(doubled.begin(), doubled.end(), rev.begin(), rev.end()) != doubled.end();

    rep.drop_last_palindrome =
        detail::is_palindrome(std::span<const std::int64_t>(w.data(), n - 1));

    rep.ok = !rep.remark_scope || rep.reversal_symmetric;
    return rep;
}

}  // namespace qcf
