#include "levy/tail_stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace levy {

std::size_t default_hill_k(std::size_t sample_size)
{
    if (sample_size < 2)
        throw std::invalid_argument("Hill estimator needs at least two samples");
    auto const k = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(sample_size), 0.7)));
    return std::clamp<std::size_t>(k, 1, sample_size - 1);
}

TailFit hill_estimate(std::span<double const> samples, std::size_t k)
{
    if (k < 1 || k >= samples.size())
        throw std::invalid_argument("Hill estimator needs 1 <= k < number of samples");

    std::vector<double> shifted;
    shifted.reserve(samples.size());
    for (double l : samples)
    {
        if (!(l > 0) || !std::isfinite(l))
            throw std::invalid_argument("Hill estimator needs positive finite samples");
        shifted.push_back(1.0 + l);
    }
    std::nth_element(shifted.begin(), shifted.begin() + static_cast<std::ptrdiff_t>(k),
                     shifted.end(), std::greater<>{});
    double const threshold = shifted[k];
    double const log_threshold = std::log(threshold);

    double sum = 0;
    for (std::size_t i = 0; i < k; ++i)
        sum += std::log(shifted[i]) - log_threshold;
    if (!(sum > 0))
        throw std::invalid_argument("Hill estimator is undefined: top order statistics are tied");

    TailFit fit;
    fit.k_order_statistics = k;
    fit.sample_size = samples.size();
    fit.estimated_index = static_cast<double>(k) / sum;
    fit.standard_error = fit.estimated_index / std::sqrt(static_cast<double>(k));
    return fit;
}

TailFit hill_estimate(std::span<double const> samples)
{
    return hill_estimate(samples, default_hill_k(samples.size()));
}

double ks_distance(std::span<double const> samples, StepDistribution const& dist)
{
    if (samples.empty())
        throw std::invalid_argument("KS distance needs at least one sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    double const n = static_cast<double>(sorted.size());
    double d = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
    {
        double const f = dist.cdf(sorted[i]);
        double const below = static_cast<double>(i) / n;
        double const above = static_cast<double>(i + 1) / n;
        d = std::max({d, above - f, f - below});
    }
    return d;
}

std::vector<MomentRow> running_moments(std::span<double const> samples,
                                       std::span<std::size_t const> checkpoints)
{
    if (checkpoints.empty())
        throw std::invalid_argument("running moments need at least one checkpoint");
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
    {
        if (checkpoints[i] < 1 || checkpoints[i] > samples.size()
            || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
            throw std::invalid_argument(
                "checkpoints must be increasing and within the sample count");
    }

    std::vector<MomentRow> out;
    out.reserve(checkpoints.size());
    double mean = 0;
    double m2 = 0;
    std::size_t n = 0;
    for (std::size_t cp : checkpoints)
    {
        for (; n < cp; ++n)
        {
            double const delta = samples[n] - mean;
            mean += delta / static_cast<double>(n + 1);
            m2 += delta * (samples[n] - mean);
        }
        out.push_back({n, mean, n > 1 ? m2 / static_cast<double>(n - 1) : 0.0});
    }
    return out;
}

}  // namespace levy
