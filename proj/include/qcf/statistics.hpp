#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "qcf/cf.hpp"
#include "qcf/number_theory.hpp"
#include "qcf/parallel.hpp"

namespace qcf {

using bigrat = boost::rational<bigint>;

/// Cylinder constraint a_{s_1} = A_1, ..., a_{s_k} = A_k with distinct
/// positive positions (a_0 is never constrained: the sets live on the
/// fractional part).
struct CylinderConstraint {
    std::vector<std::pair<std::uint32_t, std::int64_t>> pairs;

    explicit CylinderConstraint(std::vector<std::pair<std::uint32_t, std::int64_t>> ps)
        : pairs(std::move(ps)) {
        if (pairs.empty()) throw domain_error(errc::bad_constraint, "empty cylinder constraint");
        std::set<std::uint32_t> seen;
        for (auto& [s, a] : pairs) {
            if (s < 1) throw domain_error(errc::bad_constraint, "positions start at 1");
            if (a < 1) throw domain_error(errc::bad_constraint, "values start at 1");
            if (!seen.insert(s).second)
                throw domain_error(errc::bad_constraint, "duplicate position");
        }
        std::sort(pairs.begin(), pairs.end());
    }

    std::uint32_t max_position() const { return pairs.back().first; }

    /// True when the positions are exactly 1..k: the cylinder is one interval.
    bool is_prefix() const {
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (pairs[i].first != i + 1) return false;
        return true;
    }
};

inline bool indicator(const CFExpansion& cf, const CylinderConstraint& c) {
    for (auto [s, a] : c.pairs)
        if (cf.quotient_at(s) != a) return false;
    return true;
}

/// Gauss-Kuz'min limit frequency of the partial quotient A:
/// ln(1 + 1/(A(A+2))) / ln 2.
inline double gk_limit(std::int64_t a) {
    if (a < 1) throw domain_error(errc::bad_argument, "gk_limit needs A >= 1");
    return std::log1p(1.0 / (static_cast<double>(a) * (static_cast<double>(a) + 2))) /
           std::log(2.0);
}

namespace detail {

/// Measure of the prefix cylinder [0; a_1..a_k]: 1/(q_k (q_k + q_{k-1})).
/// int64 continuants; the subdivision never grows them past ~1e12.
inline double prefix_measure(std::int64_t qk, std::int64_t qk1) {
    return 1.0 / (static_cast<double>(qk) * (static_cast<double>(qk) + static_cast<double>(qk1)));
}

}  // namespace detail

/// Enclosure of the Lebesgue measure of a cylinder set.
struct MeasureEnclosure {
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
    bigrat exact_value{0};  // set when exact (consecutive prefix constraints)

    double mid() const { return (lower + upper) / 2; }
    double width() const { return upper - lower; }
};

/// mu of the cylinder. A consecutive prefix gives the exact rational
/// 1/(q_k(q_k+q_{k-1})); scattered positions are enclosed by recursive
/// subdivision over prefix cylinders, expanding each unconstrained level until
/// the unresolved tail fits the tolerance. Throws when the node budget runs
/// out before the enclosure narrows.
inline MeasureEnclosure cylinder_measure(const CylinderConstraint& c, double tol = 1e-6,
                                         std::uint64_t node_budget = 8'000'000) {
    if (c.is_prefix()) {
        std::vector<std::int64_t> quots{0};
        for (auto [s, a] : c.pairs) quots.push_back(a);
        auto conv = convergents(quots);
        const bigint& qk = conv[conv.size() - 1].den;   // conv has >= 2 entries:
        const bigint& qk1 = conv[conv.size() - 2].den;  // the leading 0 plus A_1..
        MeasureEnclosure out;
        out.exact = true;
        out.exact_value = bigrat(bigint(1), qk * (qk + qk1));
        out.lower = out.upper = boost::rational_cast<double>(out.exact_value);
        return out;
    }

    const std::uint32_t depth = c.max_position();
    std::vector<std::int64_t> constrained(depth + 1, 0);
    for (auto [s, a] : c.pairs) constrained[s] = a;
    std::uint32_t free_levels = depth - static_cast<std::uint32_t>(c.pairs.size());
    tol /= std::max<std::uint32_t>(1, free_levels);  // each free level may leave a tail

    std::uint64_t nodes = 0;
    double lower = 0.0, upper_slack = 0.0;

    // (qk, qk1) are the continuant pair of the current prefix; its cylinder
    // measure is 1/(qk(qk+qk1)). Children a=1.. refine it; the unexpanded tail
    // after N children is the parent measure minus the children's, which goes
    // to the upper bound only.
    auto recurse = [&](auto&& self, std::uint32_t level, std::int64_t qk, std::int64_t qk1,
                       double share) -> void {
        if (++nodes > node_budget)
            throw domain_error(errc::tolerance_budget, "cylinder subdivision budget exhausted");
        if (level > depth) {
            lower += detail::prefix_measure(qk, qk1);
            return;
        }
        if (constrained[level] != 0) {
            self(self, level + 1, constrained[level] * qk + qk1, qk, share);
            return;
        }
        double parent = detail::prefix_measure(qk, qk1);
        double expanded = 0.0;
        for (std::int64_t a = 1;; ++a) {
            if (qk > (std::int64_t{1} << 58) / a)
                throw domain_error(errc::tolerance_budget, "cylinder continuants too large");
            std::int64_t qnext = a * qk + qk1;
            double child = detail::prefix_measure(qnext, qk);
            double tail = parent - expanded - child;
            self(self, level + 1, qnext, qk, share * child / parent);
            expanded += child;
            if (tail <= share * tol) {
                upper_slack += tail;
                return;
            }
        }
    };
    recurse(recurse, 1, 1, 0, 1.0);

    MeasureEnclosure out;
    // Rounding slack: every node adds O(1) ulp-scale error; nodes * 1e-15
    // over-covers it comfortably at these magnitudes.
    double fp_slack = 1e-12 + static_cast<double>(nodes) * 1e-15;
    out.lower = std::max(0.0, lower - fp_slack);
    out.upper = lower + upper_slack + fp_slack;
    out.exact = false;
    return out;
}

/// First depth+1 partial quotients of x_+(q) for r x^2 + p x = q, by the raw
/// integer recurrence (the canonical-form detour is not needed: 2r always
/// divides delta - p^2).
inline void quotient_prefix(std::int64_t r, std::int64_t p, std::int64_t delta,
                            std::uint32_t depth, std::int64_t* out) {
    const std::int64_t sq = isqrt(delta);
    std::int64_t pp = -p;
    std::int64_t qq = 2 * r;
    for (std::uint32_t i = 0; i <= depth; ++i) {
        std::int64_t a = qq > 0 ? floor_div(pp + sq, qq) : floor_div(-pp - sq - 1, -qq);
        out[i] = a;
        std::int64_t p2 = a * qq - pp;
        pp = p2;
        qq = (delta - p2 * p2) / qq;
    }
}

/// One empirical frequency: full enumeration over q = 1..R.
struct EmpiricalResult {
    std::uint64_t count = 0;     // q with x_+(q) in the cylinder
    std::uint64_t total = 0;     // q with a genuine quadratic irrational root
    std::uint64_t excluded = 0;  // q with square or nonpositive discriminant
    double value() const { return total ? static_cast<double>(count) / total : 0.0; }
};

inline EmpiricalResult empirical_P(std::int64_t r, std::int64_t p, std::uint64_t R,
                                   const CylinderConstraint& c) {
    if (r < 1 || R < 1) throw domain_error(errc::bad_argument, "empirical_P needs r,R >= 1");
    EmpiricalResult res;
    const std::uint32_t depth = c.max_position();
    std::vector<std::int64_t> quots(depth + 1);
    for (std::uint64_t q = 1; q <= R; ++q) {
        std::int64_t delta = discriminant_of(r, p, static_cast<std::int64_t>(q));
        if (delta <= 0 || is_square(delta)) {
            ++res.excluded;
            continue;
        }
        ++res.total;
        quotient_prefix(r, p, delta, depth, quots.data());
        bool hit = true;
        for (auto [s, a] : c.pairs)
            if (quots[s] != a) { hit = false; break; }
        if (hit) ++res.count;
    }
    if (res.total + res.excluded != R) throw internal_error("exclusion accounting mismatch");
    return res;
}

/// Bulk Gauss-Kuz'min sweep: one pass over q filling every (s, A) cell.
struct GKRow {
    std::uint32_t s = 0;
    std::int64_t a = 0;
    std::uint64_t count = 0;
    std::uint64_t total = 0;
    double empirical = 0.0;
    double gk = 0.0;
    double abs_err = 0.0;
};

struct GKReport {
    std::int64_t r = 0, p = 0;
    std::uint64_t R = 0;
    std::vector<std::uint32_t> positions;
    std::int64_t a_max = 0;
    std::uint64_t total = 0;
    std::uint64_t excluded = 0;
    std::uint64_t sampled = 0;  // 0 = full enumeration
    std::uint64_t seed = 0;     // recorded when sampled
    std::vector<GKRow> rows;    // positions-major, A-minor

    /// Extra per-period diagnostic: frequency of A inside one period of each
    /// x_+(q), each period weighted by its length (Remark-2 style column).
    std::vector<GKRow> period_rows;
};

inline GKReport gk_sweep(std::int64_t r, std::int64_t p, std::uint64_t R,
                         std::vector<std::uint32_t> positions, std::int64_t a_max,
                         unsigned threads = 0, bool period_freq = false,
                         std::uint64_t sample = 0, std::uint64_t seed = 0) {
    if (r < 1 || R < 1) throw domain_error(errc::bad_argument, "gk sweep needs r,R >= 1");
    if (positions.empty() || a_max < 1)
        throw domain_error(errc::bad_argument, "need positions and A range");
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
    if (positions.front() < 1) throw domain_error(errc::bad_argument, "positions start at 1");

    const std::uint32_t depth = positions.back();
    const std::size_t na = static_cast<std::size_t>(a_max);

    struct Acc {
        std::vector<std::uint64_t> cells;       // [pos_index][A-1]
        std::vector<std::uint64_t> period_cells;
        std::uint64_t period_total = 0;
        std::uint64_t total = 0;
        std::uint64_t excluded = 0;
    };

    auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {  // q in [lo, hi)
        Acc acc;
        acc.cells.assign(positions.size() * na, 0);
        acc.period_cells.assign(na, 0);
        std::vector<std::int64_t> quots(depth + 1);
        for (std::uint64_t q = lo; q < hi; ++q) {
            std::int64_t delta = discriminant_of(r, p, static_cast<std::int64_t>(q));
            if (delta <= 0 || is_square(delta)) {
                ++acc.excluded;
                continue;
            }
            ++acc.total;
            quotient_prefix(r, p, delta, depth, quots.data());
            for (std::size_t i = 0; i < positions.size(); ++i) {
                std::int64_t a = quots[positions[i]];
                if (a >= 1 && a <= a_max) ++acc.cells[i * na + static_cast<std::size_t>(a) - 1];
            }
            if (period_freq) {
                CFExpansion cf = expand(make_surd(r, p, static_cast<std::int64_t>(q)));
                acc.period_total += cf.period.size();
                for (std::int64_t a : cf.period)
                    if (a >= 1 && a <= a_max) ++acc.period_cells[static_cast<std::size_t>(a) - 1];
            }
        }
        return acc;
    };

    Acc merged;
    merged.cells.assign(positions.size() * na, 0);
    merged.period_cells.assign(na, 0);
    auto fold = [&](const Acc& a) {
        for (std::size_t i = 0; i < merged.cells.size(); ++i) merged.cells[i] += a.cells[i];
        for (std::size_t i = 0; i < na; ++i) merged.period_cells[i] += a.period_cells[i];
        merged.period_total += a.period_total;
        merged.total += a.total;
        merged.excluded += a.excluded;
    };

    if (sample > 0) {
        // Seeded sampling mode for huge R; deterministic regardless of threads.
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::uint64_t> dist(1, R);
        for (std::uint64_t i = 0; i < sample; ++i) {
            std::uint64_t q = dist(rng);
            fold(run_range(q, q + 1));
        }
    } else {
        auto chunks = parallel_map_chunks<Acc>(1, R + 1, threads, run_range);
        for (const Acc& a : chunks) fold(a);
    }

    GKReport rep;
    rep.r = r; rep.p = p; rep.R = R;
    rep.positions = positions;
    rep.a_max = a_max;
    rep.total = merged.total;
    rep.excluded = merged.excluded;
    rep.sampled = sample;
    rep.seed = seed;
    if (sample == 0 && rep.total + rep.excluded != R)
        throw internal_error("exclusion accounting mismatch");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::int64_t a = 1; a <= a_max; ++a) {
            GKRow row;
            row.s = positions[i];
            row.a = a;
            row.count = merged.cells[i * na + static_cast<std::size_t>(a) - 1];
            row.total = merged.total;
            row.empirical = row.total ? static_cast<double>(row.count) / row.total : 0.0;
            row.gk = gk_limit(a);
            row.abs_err = std::abs(row.empirical - row.gk);
            rep.rows.push_back(row);
        }
    }
    if (period_freq) {
        for (std::int64_t a = 1; a <= a_max; ++a) {
            GKRow row;
            row.s = 0;  // marker: period-uniform diagnostic, not a position
            row.a = a;
            row.count = merged.period_cells[static_cast<std::size_t>(a) - 1];
            row.total = merged.period_total;
            row.empirical = row.total ? static_cast<double>(row.count) / row.total : 0.0;
            row.gk = gk_limit(a);
            row.abs_err = std::abs(row.empirical - row.gk);
            rep.period_rows.push_back(row);
        }
    }
    return rep;
}

/// Lemma-1 block frequency: q drawn from {n^2+1, ..., n^2+2n}.
struct Lemma1Result {
    std::uint64_t count = 0;
    std::uint64_t total = 0;  // always 2n
    double value() const { return static_cast<double>(count) / total; }
};

inline Lemma1Result lemma1_P(std::uint64_t n, const CylinderConstraint& c) {
    if (n < 1) throw domain_error(errc::bad_argument, "lemma1_P needs n >= 1");
    Lemma1Result res;
    res.total = 2 * n;
    const std::uint32_t depth = c.max_position();
    std::vector<std::int64_t> quots(depth + 1);
    for (std::uint64_t i = 1; i <= 2 * n; ++i) {
        std::int64_t q = static_cast<std::int64_t>(n * n + i);
        quotient_prefix(1, 0, 4 * q, depth, quots.data());
        bool hit = true;
        for (auto [s, a] : c.pairs)
            if (quots[s] != a) { hit = false; break; }
        if (hit) ++res.count;
    }
    return res;
}

/// Exact check of (i-1)/(2n) < sqrt(n^2+i) - n < i/(2n) for i = 1..2n,
/// by cross-multiplied squared inequalities in integers.
inline bool riemann_partition_check(std::uint64_t n) {
    if (n < 1) throw domain_error(errc::bad_argument, "riemann check needs n >= 1");
    using i128 = __int128;
    const i128 two_n2 = 2 * static_cast<i128>(n) * static_cast<i128>(n);
    const i128 four_n2 = 4 * static_cast<i128>(n) * static_cast<i128>(n);
    for (std::uint64_t i = 1; i <= 2 * n; ++i) {
        i128 lhs = static_cast<i128>(i) - 1 + two_n2;   // (i-1) + 2n^2
        i128 rhs = static_cast<i128>(i) + two_n2;       // i + 2n^2
        i128 mid = four_n2 * (static_cast<i128>(n) * static_cast<i128>(n) + i);
        if (!(lhs * lhs < mid && mid < rhs * rhs)) return false;
    }
    return true;
}

/// Aggregate period statistics of sqrt(q), q <= Q_max; squares contribute 0
/// so the average is normalized by Q_max itself.
struct PeriodStatsRow {
    std::uint64_t q = 0;
    std::uint64_t t0_sum = 0;
    double avg = 0.0;        // T-hat'(q)
    std::uint64_t max_t0 = 0;
    double fit_const = 0.0;  // avg / sqrt(q)
};

struct PeriodStats {
    std::vector<PeriodStatsRow> rows;  // checkpoints, ascending; last = Q_max
    std::uint64_t argmax = 0;
};

inline PeriodStats period_stats(std::uint64_t q_max, std::vector<std::uint64_t> checkpoints = {},
                                unsigned threads = 0,
                                const std::vector<std::pair<std::int64_t, std::int64_t>>*
                                    cached = nullptr) {
    if (q_max < 2) throw domain_error(errc::bad_argument, "period stats need Q >= 2");
    if (checkpoints.empty() || checkpoints.back() != q_max) checkpoints.push_back(q_max);

    std::vector<std::int64_t> t0(q_max + 1, 0);
    if (cached) {
        for (auto [q, t] : *cached)
            if (q >= 2 && static_cast<std::uint64_t>(q) <= q_max) t0[q] = t;
    }
    auto fill = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t q = lo; q < hi; ++q) {
            if (t0[q] != 0 || is_square(static_cast<std::int64_t>(q))) continue;
            t0[q] = sqrt_period_length(static_cast<std::int64_t>(q));
        }
        return 0;
    };
    parallel_map_chunks<int>(2, q_max + 1, threads, fill);

    PeriodStats stats;
    std::uint64_t sum = 0, maxv = 0;
    std::size_t next_cp = 0;
    for (std::uint64_t q = 2; q <= q_max; ++q) {
        sum += static_cast<std::uint64_t>(t0[q]);
        if (static_cast<std::uint64_t>(t0[q]) > maxv) {
            maxv = static_cast<std::uint64_t>(t0[q]);
            stats.argmax = q;
        }
        if (next_cp < checkpoints.size() && q == checkpoints[next_cp]) {
            PeriodStatsRow row;
            row.q = q;
            row.t0_sum = sum;
            row.avg = static_cast<double>(sum) / static_cast<double>(q);
            row.max_t0 = maxv;
            row.fit_const = row.avg / std::sqrt(static_cast<double>(q));
            stats.rows.push_back(row);
            ++next_cp;
        }
    }
    return stats;
}

/// Per-equation mean partial quotient over one period, against ln(Delta).
/// Exploratory output only; nothing is asserted about the growth alternative.
struct QuotientMeanRow {
    std::int64_t r = 0, p = 0, q = 0;
    std::int64_t delta = 0;
    std::int64_t period_length = 0;
    std::int64_t period_sum = 0;
    double mean = 0.0;
};

struct QuotientMeanReport {
    std::vector<QuotientMeanRow> rows;
    double slope = 0.0;      // least-squares fit of mean against ln(delta)
    double intercept = 0.0;
};

inline QuotientMeanReport period_element_average(std::int64_t r_max, std::int64_t p_max,
                                                 std::int64_t q_max) {
    if (r_max < 1 || q_max < 1)
        throw domain_error(errc::bad_argument, "period_element_average: empty range");
    QuotientMeanReport rep;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::int64_t r = 1; r <= r_max; ++r)
        for (std::int64_t p = -p_max; p <= p_max; ++p)
            for (std::int64_t q = 1; q <= q_max; ++q) {
                std::int64_t delta = discriminant_of(r, p, q);
                if (delta <= 0 || is_square(delta)) continue;
                CFExpansion cf = expand(make_surd(r, p, q));
                QuotientMeanRow row;
                row.r = r; row.p = p; row.q = q;
                row.delta = delta;
                row.period_length = cf.period_length();
                for (std::int64_t a : cf.period) row.period_sum += a;
                row.mean = static_cast<double>(row.period_sum) /
                           static_cast<double>(row.period_length);
                double x = std::log(static_cast<double>(delta));
                sx += x; sy += row.mean; sxx += x * x; sxy += x * row.mean;
                rep.rows.push_back(row);
            }
    double m = static_cast<double>(rep.rows.size());
    double denom = m * sxx - sx * sx;
    if (denom != 0) {
        rep.slope = (m * sxy - sx * sy) / denom;
        rep.intercept = (sy - rep.slope * sx) / m;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// CSV emission. All reals are printed with 12 significant digits.

inline std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_gk_csv(std::ostream& out, const GKReport& rep) {
    if (rep.sampled > 0)
        out << "# sampled=" << rep.sampled << " seed=" << rep.seed << "\n";
    out << "s,A,count,total,empirical,gk_limit,abs_err\n";
    for (const GKRow& row : rep.rows)
        out << row.s << ',' << row.a << ',' << row.count << ',' << row.total << ','
            << fmt_real(row.empirical) << ',' << fmt_real(row.gk) << ','
            << fmt_real(row.abs_err) << '\n';
}

inline void write_period_freq_csv(std::ostream& out, const GKReport& rep) {
    out << "A,count,total,frequency,gk_limit,abs_err\n";
    for (const GKRow& row : rep.period_rows)
        out << row.a << ',' << row.count << ',' << row.total << ','
            << fmt_real(row.empirical) << ',' << fmt_real(row.gk) << ','
            << fmt_real(row.abs_err) << '\n';
}

inline void write_period_stats_csv(std::ostream& out, const PeriodStats& stats) {
    out << "Q,t0_sum,avg,max_t0,fit_const\n";
    for (const PeriodStatsRow& row : stats.rows)
        out << row.q << ',' << row.t0_sum << ',' << fmt_real(row.avg) << ',' << row.max_t0
            << ',' << fmt_real(row.fit_const) << '\n';
}

}  // namespace qcf
