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

#ifndef LEAKSCOPE_STATS_HPP
#define LEAKSCOPE_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace leakscope {

/// Moments of one per-category count distribution.
struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    /// Unbiased sample variance (divisor n-1); 0 by convention when n == 1.
    double variance = 0.0;
};

/// Outcome of a two-sample test on one (event, category-pair).
struct TTestResult {
    /// Welch t-statistic. +/-infinity in the degenerate case where both
    /// samples are constant but their means differ.
    double t = 0.0;
    /// Welch-Satterthwaite degrees of freedom; absent when t is infinite.
    std::optional<double> df;
    /// Two-tailed p-value in [0, 1].
    double p = 1.0;
    /// Significance level the decision was taken at.
    double alpha = 0.05;
    /// reject == (p < alpha): the null "both categories share a mean" fails.
    bool reject = false;
};

/// n, mean and unbiased variance of the sample. Throws Errc::EmptySample.
SummaryStats summarize(std::span<const double> values);
SummaryStats summarize(std::span<const std::uint64_t> counts);

/// Welch's unequal-variance t-statistic and Welch-Satterthwaite degrees of
/// freedom:
///
///   t  = (ma - mb) / sqrt(va/na + vb/nb)
///   df = (va/na + vb/nb)^2 / [ (va/na)^2/(na-1) + (vb/nb)^2/(nb-1) ]
///
/// Requires n >= 2 on both sides (Errc::InsufficientSamples) and at least
/// one nonzero variance (Errc::DegenerateVariance).
struct WelchStatistic {
    double t;
    double df;
};
WelchStatistic welch_t(const SummaryStats &a, const SummaryStats &b);

/// Two-tailed p-value of Student's t distribution: p = I_x(df/2, 1/2) with
/// x = df/(df + t^2). Requires df > 0; t = +/-infinity yields 0.
double p_two_tailed(double t, double df);

/// Regularized incomplete beta function I_x(a, b), evaluated by Lentz's
/// continued fraction. Absolute accuracy well below 1e-10 over the
/// parameter range used here.
double regularized_incomplete_beta(double a, double b, double x);

/// The decision rule every test path shares: reject the null iff p < alpha.
/// Throws Errc::InvalidArgument unless alpha lies in (0, 1) and p in [0, 1].
bool reject_null(double p, double alpha);

/// Full two-sample Welch test with the degenerate zero-variance convention:
/// both samples constant and equal means -> t = 0, p = 1, no rejection;
/// both constant with different means -> t = +/-inf, p = 0, rejection.
/// Throws Errc::InsufficientSamples (either side n < 2) or
/// Errc::InvalidArgument (alpha outside (0, 1)).
TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   double alpha = 0.05);
TTestResult t_test(std::span<const std::uint64_t> a,
                   std::span<const std::uint64_t> b, double alpha = 0.05);

} // namespace leakscope

#endif // LEAKSCOPE_STATS_HPP
