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

#include "leakscope/stats.hpp"
#include "leakscope/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace leakscope {

SummaryStats summarize(std::span<const double> values) {
    if (values.empty())
        throw Error(Errc::EmptySample, "cannot summarize an empty sample");

    // Welford's online update; numerically stable for the large counts
    // hardware counters produce.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double x : values) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    SummaryStats stats;
    stats.n = n;
    stats.mean = mean;
    stats.variance = n >= 2 ? m2 / static_cast<double>(n - 1) : 0.0;
    if (!std::isfinite(stats.mean) || !std::isfinite(stats.variance))
        throw Error(Errc::InvalidArgument, "sample moments are not finite");
    return stats;
}

SummaryStats summarize(std::span<const std::uint64_t> counts) {
    std::vector<double> values(counts.begin(), counts.end());
    return summarize(std::span<const double>(values));
}

WelchStatistic welch_t(const SummaryStats &a, const SummaryStats &b) {
    if (a.n < 2 || b.n < 2)
        throw Error(Errc::InsufficientSamples,
                    "Welch's test needs at least 2 samples per side (got " +
                        std::to_string(a.n) + " and " + std::to_string(b.n) +
                        ")");
    if (a.variance == 0.0 && b.variance == 0.0)
        throw Error(Errc::DegenerateVariance,
                    "both samples have zero variance");

    const double sa = a.variance / static_cast<double>(a.n);
    const double sb = b.variance / static_cast<double>(b.n);
    const double se2 = sa + sb;

    WelchStatistic result;
    result.t = (a.mean - b.mean) / std::sqrt(se2);
    result.df = se2 * se2 /
                (sa * sa / static_cast<double>(a.n - 1) +
                 sb * sb / static_cast<double>(b.n - 1));
    return result;
}

namespace {

// Lentz's algorithm for the incomplete beta continued fraction
// (Numerical Recipes form). Converges in a few dozen terms for the
// argument range reached from p_two_tailed.
double beta_continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    constexpr int kMaxIterations = 2000;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h;
    }
    throw Error(Errc::InvalidArgument,
                "incomplete beta continued fraction did not converge");
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw Error(Errc::InvalidArgument,
                    "incomplete beta parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw Error(Errc::InvalidArgument,
                    "incomplete beta argument must lie in [0, 1]");
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;

    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    // The continued fraction converges fast only for x below the mean of
    // the distribution; use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    // otherwise.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double p_two_tailed(double t, double df) {
    if (!(df > 0.0))
        throw Error(Errc::InvalidArgument,
                    "degrees of freedom must be positive");
    if (std::isnan(t))
        throw Error(Errc::InvalidArgument, "t-statistic is NaN");
    if (std::isinf(t))
        return 0.0;
    if (t == 0.0)
        return 1.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

bool reject_null(double p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(Errc::InvalidArgument,
                    "alpha must lie strictly between 0 and 1");
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(Errc::InvalidArgument, "p-value must lie in [0, 1]");
    return p < alpha;
}

TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(Errc::InvalidArgument,
                    "alpha must lie strictly between 0 and 1");
    if (a.size() < 2 || b.size() < 2)
        throw Error(Errc::InsufficientSamples,
                    "t-test needs at least 2 samples per side (got " +
                        std::to_string(a.size()) + " and " +
                        std::to_string(b.size()) + ")");

    const SummaryStats sa = summarize(a);
    const SummaryStats sb = summarize(b);

    TTestResult result;
    result.alpha = alpha;

    if (sa.variance == 0.0 && sb.variance == 0.0) {
        // Constant footprints: identical means carry no information,
        // different means are perfectly distinguishable.
        if (sa.mean == sb.mean) {
            result.t = 0.0;
            result.df.reset();
            result.p = 1.0;
            result.reject = false;
        } else {
            result.t = sa.mean > sb.mean
                           ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
            result.df.reset();
            result.p = 0.0;
            result.reject = true;
        }
        return result;
    }

    const WelchStatistic welch = welch_t(sa, sb);
    result.t = welch.t;
    result.df = welch.df;
    result.p = p_two_tailed(welch.t, welch.df);
    result.reject = reject_null(result.p, alpha);
    return result;
}

TTestResult t_test(std::span<const std::uint64_t> a,
                   std::span<const std::uint64_t> b, double alpha) {
    const std::vector<double> va(a.begin(), a.end());
    const std::vector<double> vb(b.begin(), b.end());
    return t_test(std::span<const double>(va), std::span<const double>(vb),
                  alpha);
}

} // namespace leakscope
