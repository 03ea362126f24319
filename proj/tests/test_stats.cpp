/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * This file is part of leakscope.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "leakscope/errors.hpp"
#include "leakscope/stats.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace leakscope;

namespace {

// Independent oracles. These avoid the library's own algorithms: moments
// use two-pass summation in long double, the Welch formulas are evaluated
// directly, and t-distribution tail mass comes from Simpson quadrature of
// the density instead of the incomplete beta function.

struct OracleMoments {
    long double mean;
    long double variance;
};

OracleMoments oracle_moments(const std::vector<double> &xs) {
    long double sum = 0.0L;
    for (double x : xs)
        sum += x;
    const long double mean = sum / static_cast<long double>(xs.size());
    long double ss = 0.0L;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    const long double variance =
        xs.size() > 1 ? ss / static_cast<long double>(xs.size() - 1) : 0.0L;
    return {mean, variance};
}

struct OracleWelch {
    long double t;
    long double df;
};

OracleWelch oracle_welch(const std::vector<double> &a,
                         const std::vector<double> &b) {
    const OracleMoments ma = oracle_moments(a);
    const OracleMoments mb = oracle_moments(b);
    const long double na = static_cast<long double>(a.size());
    const long double nb = static_cast<long double>(b.size());
    const long double qa = ma.variance / na;
    const long double qb = mb.variance / nb;
    const long double t = (ma.mean - mb.mean) / std::sqrt(qa + qb);
    const long double df = (qa + qb) * (qa + qb) /
                           (qa * qa / (na - 1) + qb * qb / (nb - 1));
    return {t, df};
}

double t_density(double x, double df) {
    const double log_c = std::lgamma((df + 1.0) / 2.0) -
                         std::lgamma(df / 2.0) -
                         0.5 * std::log(df * std::acos(-1.0));
    return std::exp(log_c - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

// Simpson's rule over [lo, hi] with a fixed even interval count.
double simpson(double lo, double hi, int intervals,
               double df) {
    const double h = (hi - lo) / intervals;
    double acc = t_density(lo, df) + t_density(hi, df);
    for (int i = 1; i < intervals; ++i)
        acc += t_density(lo + i * h, df) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Two-tailed p as 1 - 2 * integral of the density over [0, |t|].
double oracle_p_two_tailed(double t, double df) {
    const double at = std::fabs(t);
    if (at == 0.0)
        return 1.0;
    return 1.0 - 2.0 * simpson(0.0, at, 40000, df);
}

double rel_err(double got, long double want) {
    const long double denom =
        std::max<long double>(std::fabs(static_cast<double>(want)), 1e-30L);
    return static_cast<double>(std::fabs(got - static_cast<double>(want)) /
                               denom);
}

} // namespace

TEST_CASE("summarize matches the textbook example") {
    const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
    const SummaryStats s = summarize(std::span<const double>(xs));
    CHECK(s.n == 8);
    CHECK(s.mean == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(s.variance == doctest::Approx(32.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("summarize handles single-element and empty samples") {
    const std::vector<double> one{41.5};
    const SummaryStats s = summarize(std::span<const double>(one));
    CHECK(s.n == 1);
    CHECK(s.mean == doctest::Approx(41.5));
    CHECK(s.variance == 0.0);

    const std::vector<double> none;
    CHECK_THROWS_AS(summarize(std::span<const double>(none)), Error);
    try {
        summarize(std::span<const double>(none));
    } catch (const Error &e) {
        CHECK(e.code() == Errc::EmptySample);
    }
}

TEST_CASE("summarize is stable under a large common offset") {
    // Welford must not lose the variance to cancellation when counts sit
    // on top of a huge mean, which is exactly the HPC regime.
    std::mt19937_64 rng(7);
    std::vector<double> base, shifted;
    for (int i = 0; i < 500; ++i) {
        const double x = static_cast<double>(rng() % 1000);
        base.push_back(x);
        shifted.push_back(x + 1e12);
    }
    const SummaryStats a = summarize(std::span<const double>(base));
    const SummaryStats b = summarize(std::span<const double>(shifted));
    CHECK(rel_err(b.variance, a.variance) < 1e-6);
}

TEST_CASE("summarize agrees with a two-pass oracle on random samples") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 64;
        std::vector<double> xs;
        for (std::size_t i = 0; i < n; ++i)
            xs.push_back(50000.0 + static_cast<double>(rng() % 100000) * 0.01);
        const SummaryStats s = summarize(std::span<const double>(xs));
        const OracleMoments m = oracle_moments(xs);
        CHECK(rel_err(s.mean, m.mean) < 1e-12);
        CHECK(rel_err(s.variance, m.variance) < 1e-9);
    }
}

TEST_CASE("welch_t matches the frozen reference pair") {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{4, 5, 6};
    const WelchStatistic w = welch_t(summarize(std::span<const double>(a)),
                                     summarize(std::span<const double>(b)));
    CHECK(w.t == doctest::Approx(-3.6742346141747673).epsilon(1e-12));
    CHECK(w.df == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("welch_t agrees with the definitional formulas") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t na = 2 + rng() % 49;
        const std::size_t nb = 2 + rng() % 49;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < na; ++i)
            a.push_back(700.0 + 25.0 * unit(rng));
        for (std::size_t i = 0; i < nb; ++i)
            b.push_back(705.0 + 40.0 * unit(rng));
        const WelchStatistic w =
            welch_t(summarize(std::span<const double>(a)),
                    summarize(std::span<const double>(b)));
        const OracleWelch o = oracle_welch(a, b);
        CHECK(rel_err(w.t, o.t) < 1e-9);
        CHECK(rel_err(w.df, o.df) < 1e-9);
    }
}

TEST_CASE("welch_t rejects undersized and doubly constant input") {
    SummaryStats tiny{1, 5.0, 0.0};
    SummaryStats fine{10, 5.0, 2.0};
    CHECK_THROWS_AS(welch_t(tiny, fine), Error);

    SummaryStats ca{4, 5.0, 0.0};
    SummaryStats cb{4, 6.0, 0.0};
    try {
        welch_t(ca, cb);
        FAIL("expected DegenerateVariance");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::DegenerateVariance);
    }
}

TEST_CASE("welch_t tolerates one constant side") {
    SummaryStats ca{5, 10.0, 0.0};
    SummaryStats cb{8, 12.0, 4.0};
    const WelchStatistic w = welch_t(ca, cb);
    // va = 0 collapses df to nb - 1.
    CHECK(w.df == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(w.t == doctest::Approx(-2.0 / std::sqrt(4.0 / 8.0)).epsilon(1e-12));
}

TEST_CASE("p_two_tailed agrees with quadrature of the t density") {
    const double ts[] = {0.0,  0.25, 0.4303, 1.0,    1.6565,
                         2.0,  2.5435, 3.5,  5.0,    8.0};
    const double dfs[] = {1.5, 2.0, 3.0, 7.5, 30.0, 120.0, 2000.0};
    for (double t : ts) {
        for (double df : dfs) {
            const double got = p_two_tailed(t, df);
            const double want = oracle_p_two_tailed(t, df);
            CAPTURE(t);
            CAPTURE(df);
            CHECK(std::fabs(got - want) < 1e-8);
        }
    }
}

TEST_CASE("p_two_tailed basic shape") {
    CHECK(p_two_tailed(0.0, 10.0) == 1.0);
    CHECK(p_two_tailed(2.5, 10.0) ==
          doctest::Approx(p_two_tailed(-2.5, 10.0)).epsilon(1e-15));
    CHECK(p_two_tailed(std::numeric_limits<double>::infinity(), 10.0) == 0.0);
    CHECK(p_two_tailed(-std::numeric_limits<double>::infinity(), 3.0) == 0.0);

    // Strictly decreasing in |t|.
    double prev = 1.1;
    for (double t = 0.0; t <= 12.0; t += 0.25) {
        const double p = p_two_tailed(t, 25.0);
        CHECK(p <= prev);
        prev = p;
    }

    CHECK_THROWS_AS(p_two_tailed(1.0, 0.0), Error);
    CHECK_THROWS_AS(p_two_tailed(1.0, -3.0), Error);
    CHECK_THROWS_AS(p_two_tailed(std::numeric_limits<double>::quiet_NaN(), 5.0),
                    Error);
}

TEST_CASE("regularized incomplete beta against quadrature and symmetry") {
    // Quadrature oracle for I_x(a, b). The substitution u = s^2 turns
    // the integrand into 2 s^(2a-1) (1-s^2)^(b-1), removing the u = 0
    // singularity for every a >= 1/2, so plain Simpson converges.
    auto oracle_beta = [](double a, double b, double x) {
        const int n = 200000;
        const double hi = std::sqrt(x);
        const double h = hi / n;
        auto f = [&](double s) {
            if (s >= 1.0)
                return 0.0;
            if (s <= 0.0)
                return a == 0.5 ? 2.0 : 0.0;
            return 2.0 * std::exp((2.0 * a - 1.0) * std::log(s) +
                                  (b - 1.0) * std::log1p(-s * s));
        };
        double acc = f(0.0) + f(hi);
        for (int i = 1; i < n; ++i)
            acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
        const double integral = acc * h / 3.0;
        const double log_beta =
            std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
        return integral / std::exp(log_beta);
    };

    const double cases[][3] = {
        {0.5, 0.5, 0.3}, {2.0, 3.0, 0.4}, {1000.0, 0.5, 0.995},
        {5.0, 5.0, 0.5}, {0.5, 9.0, 0.1},
    };
    for (const auto &c : cases) {
        const double got = regularized_incomplete_beta(c[0], c[1], c[2]);
        const double want = oracle_beta(c[0], c[1], c[2]);
        CAPTURE(c[0]);
        CAPTURE(c[1]);
        CAPTURE(c[2]);
        CHECK(std::fabs(got - want) < 1e-6);
    }

    // I_x(a,b) + I_{1-x}(b,a) == 1.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = 0.5 + 20.0 * unit(rng);
        const double b = 0.5 + 20.0 * unit(rng);
        const double x = unit(rng);
        const double s = regularized_incomplete_beta(a, b, x) +
                         regularized_incomplete_beta(b, a, 1.0 - x);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    }

    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("t_test end-to-end on the frozen pair") {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{4, 5, 6};
    const TTestResult r =
        t_test(std::span<const double>(a), std::span<const double>(b), 0.05);
    CHECK(r.t == doctest::Approx(-3.6742346141747673).epsilon(1e-12));
    REQUIRE(r.df.has_value());
    CHECK(*r.df == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(0.021311641128756727).epsilon(1e-9));
    CHECK(r.reject);
}

TEST_CASE("t_test degenerate conventions") {
    const std::vector<double> c5{5, 5, 5};
    const std::vector<double> c5b{5, 5, 5, 5};
    const std::vector<double> c9{9, 9, 9};

    SUBCASE("both constant, equal means") {
        const TTestResult r = t_test(std::span<const double>(c5),
                                     std::span<const double>(c5b), 0.05);
        CHECK(r.t == 0.0);
        CHECK(r.p == 1.0);
        CHECK_FALSE(r.reject);
        CHECK_FALSE(r.df.has_value());
    }

    SUBCASE("both constant, different means") {
        const TTestResult r = t_test(std::span<const double>(c5),
                                     std::span<const double>(c9), 0.05);
        CHECK(std::isinf(r.t));
        CHECK(r.t < 0.0);
        CHECK(r.p == 0.0);
        CHECK(r.reject);
        CHECK_FALSE(r.df.has_value());

        const TTestResult rev = t_test(std::span<const double>(c9),
                                       std::span<const double>(c5), 0.05);
        CHECK(std::isinf(rev.t));
        CHECK(rev.t > 0.0);
    }
}

TEST_CASE("t_test validates its inputs") {
    const std::vector<double> one{1.0};
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(t_test(std::span<const double>(one),
                           std::span<const double>(two)),
                    Error);
    CHECK_THROWS_AS(t_test(std::span<const double>(two),
                           std::span<const double>(two), 0.0),
                    Error);
    CHECK_THROWS_AS(t_test(std::span<const double>(two),
                           std::span<const double>(two), 1.0),
                    Error);
}

TEST_CASE("t_test uint64 overload matches the double path") {
    const std::vector<std::uint64_t> a{70012, 69800, 70110, 70090, 69950};
    const std::vector<std::uint64_t> b{76010, 75988, 76100, 75904, 76091};
    std::vector<double> ad(a.begin(), a.end());
    std::vector<double> bd(b.begin(), b.end());
    const TTestResult ri = t_test(std::span<const std::uint64_t>(a),
                                  std::span<const std::uint64_t>(b));
    const TTestResult rd = t_test(std::span<const double>(ad),
                                  std::span<const double>(bd));
    CHECK(ri.t == rd.t);
    CHECK(ri.p == rd.p);
    CHECK(ri.reject == rd.reject);
}
