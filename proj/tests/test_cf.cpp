#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "qcf/cf.hpp"
#include "qcf/number_theory.hpp"

using namespace qcf;

namespace {

std::vector<std::int64_t> quots(const CFExpansion& cf, std::size_t n) {
    std::vector<std::int64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = cf.quotient_at(i);
    return out;
}

}  // namespace

TEST_CASE("expand: frozen expansions") {
    CFExpansion r2 = expand(make_surd(1, 0, 2));
    CHECK(r2.preperiod == std::vector<std::int64_t>{1});
    CHECK(r2.period == std::vector<std::int64_t>{2});
    CHECK(r2.m() == 0);
    CHECK(r2.period_length() == 1);

    CFExpansion golden = expand(make_surd(1, 1, 1));
    CHECK(golden.preperiod == std::vector<std::int64_t>{0});
    CHECK(golden.period == std::vector<std::int64_t>{1});

    CFExpansion r13 = expand_sqrt(13);
    CHECK(r13.preperiod == std::vector<std::int64_t>{3});
    CHECK(r13.period == std::vector<std::int64_t>{1, 1, 1, 1, 6});
    CHECK(r13.period_length() == 5);
}

TEST_CASE("expand: purely periodic value keeps a_0 in the preperiod") {
    // 1 + sqrt(2) = [2; 2, 2, ...]: the starting state itself repeats
    CFExpansion cf = expand(make_surd(1, -2, 1));
    CHECK(cf.preperiod == std::vector<std::int64_t>{2});
    CHECK(cf.period == std::vector<std::int64_t>{2});
    CHECK(cf.m() == 0);
}

TEST_CASE("expand_sqrt: period lengths and input validation") {
    CHECK(expand_sqrt(2).period_length() == 1);
    CHECK(expand_sqrt(3).period_length() == 2);
    CHECK(expand_sqrt(3).period == std::vector<std::int64_t>{1, 2});
    CHECK(expand_sqrt(13).period_length() == 5);
    try {
        expand_sqrt(9);
        FAIL("expected perfect_square_input");
    } catch (const domain_error& e) {
        CHECK(e.kind() == errc::perfect_square_input);
    }
    CHECK_THROWS_AS(expand_sqrt(0), domain_error);
}

TEST_CASE("expand: step budget error") {
    try {
        expand(make_surd(1, 0, 2), 1);
        FAIL("expected step_budget_exhausted");
    } catch (const domain_error& e) {
        CHECK(e.kind() == errc::step_budget_exhausted);
    }
}

TEST_CASE("expand: f(delta/4) + 3 steps always suffice when rq > 0") {
    // the period-sum bound caps T and the preperiod holds at most a_0 plus
    // two more terms, so this budget can never be exhausted
    std::mt19937_64 rng(314);
    std::uniform_int_distribution<std::int64_t> dr(1, 5), dp(-7, 7), dq(1, 4000);
    int done = 0;
    while (done < 300) {
        std::int64_t r = dr(rng), p = dp(rng), q = dq(rng);
        std::int64_t delta = p * p + 4 * r * q;
        if (is_square(delta)) continue;
        ++done;
        std::uint64_t budget = static_cast<std::uint64_t>(f_bound(delta)) + 3;
        REQUIRE_NOTHROW(expand(make_surd(r, p, q), budget));
    }
}

TEST_CASE("expand matches the unbounded-integer oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::int64_t> dr(1, 6), dp(-8, 8), dq(-20, 10000);
    int done = 0;
    while (done < 400) {
        std::int64_t r = dr(rng), p = dp(rng), q = dq(rng);
        std::int64_t delta = p * p + 4 * r * q;
        if (delta <= 0 || is_square(delta)) continue;
        ++done;
        CFExpansion got = expand(make_surd(r, p, q));
        oracle::NaiveExpansion want = oracle::naive_expand_root(r, p, q);
        REQUIRE(got.preperiod == want.preperiod);
        REQUIRE(got.period == want.period);
    }
}

TEST_CASE("dual route: sqrt_period_length equals the generic expansion") {
    for (std::int64_t q = 2; q <= 3000; ++q) {
        if (is_square(q)) continue;
        REQUIRE(sqrt_period_length(q) == expand_sqrt(q).period_length());
    }
}

TEST_CASE("preperiod trichotomy for rq > 0") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::int64_t> dr(1, 20), dp(-20, 20), dq(1, 20000);
    std::uniform_int_distribution<std::int64_t> dq_small(1, 25);  // roots in (0,1), m = 1
    int done = 0, m1 = 0;
    while (done < 1200) {
        std::int64_t r = dr(rng), p = dp(rng);
        std::int64_t q = (done % 2 == 0) ? dq(rng) : dq_small(rng);
        std::int64_t delta = p * p + 4 * r * q;
        if (is_square(delta)) continue;
        ++done;
        CFExpansion cf = expand(make_surd(r, p, q));
        std::int64_t m = cf.m();
        REQUIRE(cf.preperiod[0] >= 0);
        REQUIRE((m == 0 || m == 1 || m == 2));
        if (m == 2) REQUIRE(cf.preperiod[0] == 0);
        if (m >= 1) {
            REQUIRE(cf.preperiod.back() < cf.period.back());
            REQUIRE(cf.preperiod[0] == 0);  // nonzero a_0 always lands reduced in one step
            ++m1;
        }
    }
    CHECK(m1 > 20);  // the small-q draws must actually exercise the m = 1 shape
}

TEST_CASE("reported period is primitive") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> dq(2, 30000);
    for (int i = 0; i < 300; ++i) {
        std::int64_t q = dq(rng);
        if (is_square(q)) continue;
        CFExpansion cf = expand_sqrt(q);
        REQUIRE(primitive_cycle_length(cf.period) == cf.period.size());
    }
}

TEST_CASE("sqrt period ends with 2*a_0") {
    for (std::int64_t q : {2, 3, 7, 13, 19, 31, 46, 94, 124, 1000, 9949}) {
        if (is_square(q)) continue;
        CFExpansion cf = expand_sqrt(q);
        CHECK(cf.period.back() == 2 * cf.preperiod[0]);
    }
}

TEST_CASE("convergents: known prefixes") {
    CFExpansion r2 = expand_sqrt(2);
    auto conv = convergents(r2, 2);
    REQUIRE(conv.size() == 3);
    CHECK(conv[0] == ConvergentPair{1, 1});
    CHECK(conv[1] == ConvergentPair{3, 2});
    CHECK(conv[2] == ConvergentPair{7, 5});

    CFExpansion golden = expand(make_surd(1, 1, 1));  // [0; 1, 1, 1, ...]
    auto fib = convergents(golden, 3);
    CHECK(fib[0] == ConvergentPair{0, 1});
    CHECK(fib[1] == ConvergentPair{1, 1});
    CHECK(fib[2] == ConvergentPair{1, 2});
    CHECK(fib[3] == ConvergentPair{2, 3});

    auto base = convergents(r2, 0);
    REQUIRE(base.size() == 1);
    CHECK(base[0] == ConvergentPair{1, 1});  // a_0 / 1
}

TEST_CASE("convergents: determinant and monotonicity invariants") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<std::int64_t> dr(1, 5), dp(-6, 6), dq(1, 5000);
    int done = 0;
    while (done < 200) {
        std::int64_t r = dr(rng), p = dp(rng), q = dq(rng);
        std::int64_t delta = p * p + 4 * r * q;
        if (is_square(delta)) continue;
        ++done;
        auto conv = convergents(expand(make_surd(r, p, q)), 12);
        for (std::size_t k = 1; k < conv.size(); ++k) {
            bigint det = conv[k].num * conv[k - 1].den - conv[k - 1].num * conv[k].den;
            REQUIRE((det == 1 || det == -1));
            if (k >= 2) REQUIRE(conv[k].den > conv[k - 1].den);
            REQUIRE(conv[k].den >= conv[k - 1].den);
            REQUIRE(boost::multiprecision::gcd(conv[k].num, conv[k].den) == 1);
        }
    }
}

TEST_CASE("value reconstruction: |x - p_k/q_k| < 1/q_{k-1}^2") {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<std::int64_t> dr(1, 5), dp(-6, 6), dq(1, 4000);
    int done = 0;
    while (done < 150) {
        std::int64_t r = dr(rng), p = dp(rng), q = dq(rng);
        std::int64_t delta = p * p + 4 * r * q;
        if (is_square(delta)) continue;
        ++done;
        QuadraticSurd x = make_surd(r, p, q);
        auto conv = convergents(expand(x), 9);
        for (std::size_t k = 3; k <= 9; ++k) {
            const bigint& num = conv[k].num;
            const bigint& den = conv[k].den;
            bigint qprev2 = conv[k - 1].den * conv[k - 1].den;
            // x within (p/q - 1/qprev^2, p/q + 1/qprev^2), compared exactly
            REQUIRE(cmp_rational(x, num * qprev2 - den, den * qprev2) > 0);
            REQUIRE(cmp_rational(x, num * qprev2 + den, den * qprev2) < 0);
        }
    }
}
