#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcf/cf.hpp"
#include "qcf/parallel.hpp"

namespace qcf {

/// Sieved table of tau(n) = number of divisors, 1 <= n <= limit.
class DivisorTable {
public:
    explicit DivisorTable(std::uint32_t limit) : limit_(limit), counts_(limit + 1, 0) {
        for (std::uint32_t d = 1; d <= limit; ++d)
            for (std::uint32_t m = d; m <= limit; m += d) ++counts_[m];
    }

    std::uint32_t limit() const { return limit_; }

    std::uint32_t tau_at(std::int64_t n) const {
        if (n < 1 || static_cast<std::uint64_t>(n) > limit_)
            throw domain_error(errc::bad_argument, "tau_at: out of table range");
        return counts_[static_cast<std::size_t>(n)];
    }

private:
    std::uint32_t limit_;
    std::vector<std::uint32_t> counts_;
};

/// tau(n) by trial division; the sieve-free route for single queries.
inline std::int64_t tau(std::int64_t n) {
    if (n < 1) throw domain_error(errc::bad_argument, "tau needs n >= 1");
    std::int64_t count = 0;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        count += (d * d == n) ? 1 : 2;
    }
    return count;
}

/// D(Q) = sum over u = 1..floor(sqrt(Q)) of tau(Q - u^2). Terms with
/// Q - u^2 = 0 (square Q, outside every theorem-driven call) are skipped.
inline std::int64_t big_d(std::int64_t q, const DivisorTable& table) {
    if (q < 2) throw domain_error(errc::bad_argument, "big_d needs Q >= 2");
    std::int64_t sum = 0;
    for (std::int64_t u = 1; u * u <= q; ++u) {
        std::int64_t n = q - u * u;
        if (n > 0) sum += table.tau_at(n);
    }
    return sum;
}

inline std::int64_t big_d(std::int64_t q) {
    if (q < 2) throw domain_error(errc::bad_argument, "big_d needs Q >= 2");
    std::int64_t sum = 0;
    for (std::int64_t u = 1; u * u <= q; ++u) {
        std::int64_t n = q - u * u;
        if (n > 0) sum += tau(n);
    }
    return sum;
}

namespace detail {

template <typename TauFn>
std::int64_t f_bound_impl(std::int64_t delta, TauFn&& tau_of) {
    if (delta < 2 || is_square(delta))
        throw domain_error(errc::bad_argument, "f_bound needs a non-square delta >= 2");
    switch (delta % 4) {
        case 0: {
            std::int64_t q = delta / 4;
            std::int64_t sum = 0;
            for (std::int64_t u = 1; u * u <= q; ++u) {
                std::int64_t n = q - u * u;
                if (n > 0) sum += tau_of(n);
            }
            return 2 * sum + tau_of(q);
        }
        case 1: {
            // delta odd: sum over odd i with i^2 < delta of tau((delta - i^2)/4),
            // doubled. delta = p^2 + 4rq with p odd makes every argument integral;
            // anything else would be a finding, hence the hard check.
            std::int64_t sum = 0;
            for (std::int64_t i = 1; i * i < delta; i += 2) {
                std::int64_t n4 = delta - i * i;
                if (n4 % 4 != 0) throw internal_error("f_bound: non-integral tau argument");
                sum += tau_of(n4 / 4);
            }
            return 2 * sum;
        }
        default:
            throw domain_error(errc::invalid_discriminant,
                               "delta = 2 or 3 (mod 4) cannot arise from p^2 + 4rq");
    }
}

}  // namespace detail

/// Period-sum bound f(delta/4): 2 D(Q) + tau(Q) for integral Q = delta/4,
/// else the odd-i divisor sum.
inline std::int64_t f_bound(std::int64_t delta, const DivisorTable& table) {
    return detail::f_bound_impl(delta, [&](std::int64_t n) { return table.tau_at(n); });
}

inline std::int64_t f_bound(std::int64_t delta) {
    return detail::f_bound_impl(delta, [](std::int64_t n) { return tau(n); });
}

struct HickersonRecord {
    std::int64_t q = 0;
    std::int64_t t0 = 0;
    std::int64_t d = 0;
    bool ok = false;  // T0(Q) <= D(Q); a false value is a build-breaking finding
};

inline HickersonRecord hickerson_check(std::int64_t q, const DivisorTable& table) {
    HickersonRecord rec;
    rec.q = q;
    rec.t0 = sqrt_period_length(q);
    rec.d = big_d(q, table);
    rec.ok = rec.t0 <= rec.d;
    return rec;
}

inline HickersonRecord hickerson_check(std::int64_t q) {
    HickersonRecord rec;
    rec.q = q;
    rec.t0 = sqrt_period_length(q);
    rec.d = big_d(q);
    rec.ok = rec.t0 <= rec.d;
    return rec;
}

struct PellSolution {
    bigint x;
    bigint y;
};

/// Fundamental solution of x^2 - Q y^2 = -1 when T0(Q) is odd, from the
/// convergent p_{T-1}/q_{T-1} of sqrt(Q); absent when T0 is even. The identity
/// is re-verified exactly in unbounded integers either way.
inline std::optional<PellSolution> negative_pell(std::int64_t q) {
    CFExpansion cf = expand_sqrt(q);
    std::size_t t = cf.period.size();
    auto convs = convergents(cf, t - 1);
    const ConvergentPair& c = convs.back();
    bigint norm = c.num * c.num - bigint(q) * c.den * c.den;
    bool odd = t % 2 == 1;
    if (norm != (odd ? -1 : 1))
        throw internal_error("pell convergent identity failed");
    if (!odd) return std::nullopt;
    return PellSolution{c.num, c.den};
}

/// Classical two-squares criterion: every prime = 3 (mod 4) divides n to an
/// even power. Zero is allowed as one of the squares (so every perfect square
/// is representable).
inline bool is_sum_two_squares(std::int64_t n) {
    if (n < 1) throw domain_error(errc::bad_argument, "is_sum_two_squares needs n >= 1");
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        if (p % 4 == 3 && e % 2 == 1) return false;
    }
    if (n > 1 && n % 4 == 3) return false;
    return true;
}

/// Per-Q record of the red-number classification.
struct RedClassification {
    std::int64_t q = 0;
    std::int64_t t0 = 0;                // 0 for perfect squares (no period)
    bool in_k = false;                  // T0 odd
    bool in_m = false;                  // sum of two squares, zero allowed
    std::optional<PellSolution> pell;   // present iff in_k
};

inline RedClassification classify_red(std::int64_t q) {
    RedClassification rec;
    rec.q = q;
    rec.in_m = is_sum_two_squares(q);
    if (!is_square(q)) {
        rec.t0 = sqrt_period_length(q);
        rec.in_k = rec.t0 % 2 == 1;
        if (rec.in_k) rec.pell = negative_pell(q);
    }
    return rec;
}

/// Census counts at a single n. Squares never belong to K (T0 undefined); M is
/// counted under both square conventions: m_incl allows u^2 + 0^2, m_pos
/// requires two positive squares.
struct RedCensus {
    std::uint64_t n = 0;
    std::uint64_t k_count = 0;
    std::uint64_t m_incl = 0;
    std::uint64_t m_pos = 0;
    double ratio_incl = 0.0;
    double ratio_pos = 0.0;
};

struct RedCensusScan {
    std::vector<RedCensus> rows;          // one per requested checkpoint, ascending
    long double product = 0.0;            // the Euler product used in the inequality
    std::uint64_t first_n_incl = 0;       // smallest n with K_m < M_m * product for all m >= n
    std::uint64_t first_n_pos = 0;
};

namespace detail {

/// Smallest-prime-factor sieve; factorization-driven bulk classification.
inline std::vector<std::uint32_t> spf_sieve(std::uint64_t n) {
    std::vector<std::uint32_t> spf(n + 1, 0);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (spf[i] != 0) continue;
        for (std::uint64_t j = i; j <= n; j += i)
            if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
    return spf;
}

inline bool in_m_from_spf(std::uint64_t q, const std::vector<std::uint32_t>& spf) {
    while (q > 1) {
        std::uint32_t p = spf[q];
        int e = 0;
        while (q % p == 0) { q /= p; ++e; }
        if (p % 4 == 3 && e % 2 == 1) return false;
    }
    return true;
}

/// Positive representation n = u^2 + v^2 with u,v >= 1, by direct search.
inline bool has_positive_two_square_rep(std::uint64_t n) {
    for (std::uint64_t u = 1; 2 * u * u <= n; ++u) {
        std::int64_t r = static_cast<std::int64_t>(n - u * u);
        std::int64_t t = isqrt(r);
        if (t >= 1 && t * t == r) return true;
    }
    return false;
}

}  // namespace detail

inline RedCensusScan red_census_scan(std::uint64_t n_max, long double product,
                                     std::vector<std::uint64_t> checkpoints,
                                     unsigned threads = 0) {
    if (n_max < 2) throw domain_error(errc::bad_argument, "census needs n >= 2");
    if (checkpoints.empty() || checkpoints.back() != n_max) checkpoints.push_back(n_max);
    auto spf = detail::spf_sieve(n_max);

    // per-q membership flags in parallel (pure; spf is read-only by now),
    // then one sequential scan for the cumulative counts and checkpoints
    std::vector<std::uint8_t> flags(n_max + 1, 0);
    parallel_map_chunks<int>(1, n_max + 1, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t q = lo; q < hi; ++q) {
            std::uint8_t f = 0;
            if (!is_square(static_cast<std::int64_t>(q)) &&
                sqrt_period_length(static_cast<std::int64_t>(q)) % 2 == 1)
                f |= 1;
            if (detail::in_m_from_spf(q, spf)) {
                f |= 2;
                if (detail::has_positive_two_square_rep(q)) f |= 4;
            }
            flags[q] = f;
        }
        return 0;
    });

    RedCensusScan scan;
    scan.product = product;
    std::uint64_t k = 0, mi = 0, mp = 0;
    std::uint64_t last_viol_incl = 0, last_viol_pos = 0;
    std::size_t next_cp = 0;
    for (std::uint64_t q = 1; q <= n_max; ++q) {
        k += flags[q] & 1;
        mi += (flags[q] >> 1) & 1;
        mp += (flags[q] >> 2) & 1;
        if (mi > 0 && static_cast<long double>(k) >= static_cast<long double>(mi) * product)
            last_viol_incl = q;
        if (mp > 0 && static_cast<long double>(k) >= static_cast<long double>(mp) * product)
            last_viol_pos = q;
        if (next_cp < checkpoints.size() && q == checkpoints[next_cp]) {
            RedCensus row{q, k, mi, mp, 0.0, 0.0};
            row.ratio_incl = mi ? static_cast<double>(k) / static_cast<double>(mi) : 0.0;
            row.ratio_pos = mp ? static_cast<double>(k) / static_cast<double>(mp) : 0.0;
            scan.rows.push_back(row);
            ++next_cp;
        }
    }
    scan.first_n_incl = last_viol_incl + 1;
    scan.first_n_pos = last_viol_pos + 1;
    return scan;
}

inline RedCensus red_census(std::uint64_t n) {
    return red_census_scan(n, 1.0L, {n}).rows.back();
}

/// Partial Euler product over primes p <= limit with p mod 4 != 1, with a
/// rigorous enclosure of the infinite product: the tail satisfies
/// 1 >= prod_{p > L} (1 - 1/p^2) >= 1 - sum_{n > L} 1/n^2 > 1 - 1/(L-1)... here
/// sum_{n>L} 1/n^2 < 1/L is used.
struct EulerProduct {
    long double value = 0.0;        // partial product at the limit
    long double lower = 0.0;        // certified lower bound for the infinite product
    long double upper = 0.0;        // certified upper bound (the partial product itself)
    std::uint64_t prime_limit = 0;
    std::uint64_t factors = 0;
};

inline EulerProduct theorem3_product(std::uint64_t prime_limit) {
    if (prime_limit < 2) throw domain_error(errc::bad_argument, "prime limit must be >= 2");
    std::vector<bool> composite(prime_limit + 1, false);
    long double prod = 1.0L;
    std::uint64_t factors = 0;
    for (std::uint64_t p = 2; p <= prime_limit; ++p) {
        if (composite[p]) continue;
        for (std::uint64_t j = p * p; j <= prime_limit; j += p) composite[j] = true;
        if (p % 4 != 1) {
            prod *= 1.0L - 1.0L / (static_cast<long double>(p) * static_cast<long double>(p));
            ++factors;
        }
    }
    EulerProduct out;
    out.value = prod;
    out.upper = prod;
    out.lower = prod * (1.0L - 1.0L / static_cast<long double>(prime_limit));
    out.prime_limit = prime_limit;
    out.factors = factors;
    return out;
}

struct Theorem34Report {
    std::uint64_t primes_checked = 0;
    std::vector<std::int64_t> failures;
    bool ok = true;
};

/// For every prime Q <= limit: (T0(Q) odd) <=> (Q mod 4 != 3) <=> Q in M.
inline Theorem34Report theorem34_check(std::uint64_t prime_limit) {
    Theorem34Report rep;
    std::vector<bool> composite(prime_limit + 1, false);
    for (std::uint64_t p = 2; p <= prime_limit; ++p) {
        if (composite[p]) continue;
        for (std::uint64_t j = p * p; j <= prime_limit; j += p) composite[j] = true;
        bool expect = p % 4 != 3;
        bool in_k = sqrt_period_length(static_cast<std::int64_t>(p)) % 2 == 1;
        bool in_m = is_sum_two_squares(static_cast<std::int64_t>(p));
        ++rep.primes_checked;
        if (in_k != expect || in_m != expect) {
            rep.failures.push_back(static_cast<std::int64_t>(p));
            rep.ok = false;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// (q, T0) cache: CSV with header `q,t0`, ascending q.

inline void write_t0_cache(const std::string& path,
                           const std::vector<std::pair<std::int64_t, std::int64_t>>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw domain_error(errc::bad_argument, "cannot open cache for writing: " + path);
    out << "q,t0\n";
    for (const auto& [q, t0] : rows) out << q << ',' << t0 << '\n';
}

inline std::vector<std::pair<std::int64_t, std::int64_t>> read_t0_cache(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error(errc::bad_argument, "cannot open cache: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "q,t0")
        throw domain_error(errc::bad_argument, "bad cache header in " + path);
    std::vector<std::pair<std::int64_t, std::int64_t>> rows;
    std::int64_t prev = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::int64_t q, t0;
        char comma;
        if (!(ls >> q >> comma >> t0) || comma != ',')
            throw domain_error(errc::bad_argument, "bad cache row: " + line);
        if (q <= prev) throw domain_error(errc::bad_argument, "cache rows not ascending");
        prev = q;
        rows.emplace_back(q, t0);
    }
    return rows;
}

}  // namespace qcf
