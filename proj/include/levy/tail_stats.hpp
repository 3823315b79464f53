#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "levy/sampler.hpp"

namespace levy {

struct TailFit
{
    double estimated_index = 0;
    std::size_t k_order_statistics = 0;
    std::size_t sample_size = 0;
    double standard_error = 0;  //!< estimated_index / sqrt(k)
};

/// Default number of order statistics, round(N^0.7), kept below N.
std::size_t default_hill_k(std::size_t sample_size);

/*!
 * Hill estimator of the tail index applied to the shifted values 1 + l.
 *
 * With y_(1) >= ... >= y_(N) the sorted values of 1 + l,
 *   1/index = (1/k) sum_{i<=k} ln(y_(i) / y_(k+1)).
 * The shifted step law is exactly Pareto, so the estimate is unbiased for any
 * threshold.
 */
TailFit hill_estimate(std::span<double const> samples, std::size_t k);
TailFit hill_estimate(std::span<double const> samples);

/// Kolmogorov-Smirnov distance between the empirical CDF and the step law.
double ks_distance(std::span<double const> samples, StepDistribution const& dist);

struct MomentRow
{
    std::size_t count = 0;
    double mean = 0;
    double variance = 0;  //!< unbiased; 0 for a single sample
};

/// Prefix mean and variance at each checkpoint (streaming Welford update).
std::vector<MomentRow> running_moments(std::span<double const> samples,
                                       std::span<std::size_t const> checkpoints);

}  // namespace levy
