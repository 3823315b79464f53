#include "levy/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace levy {

LevyIndex::LevyIndex(double beta) : beta_(beta)
{
    if (!(beta > 0) || !std::isfinite(beta))
        throw std::domain_error("Levy index must be a positive finite number, got "
                                + std::to_string(beta));
}

UniformSource::UniformSource(std::uint64_t seed) : engine_(seed), seed_(seed) {}

double UniformSource::next()
{
    ++draws_;
    std::uint64_t const k = engine_() >> 11;
    return static_cast<double>(k + 1) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

StepDistribution::StepDistribution(LevyIndex index) : index_(index) {}

double StepDistribution::pdf(double l) const
{
    if (!(l >= 0))
        throw std::domain_error("step length must be nonnegative");
    return beta() * std::pow(1.0 + l, -1.0 - beta());
}

double StepDistribution::cdf(double l) const
{
    if (!(l >= 0))
        throw std::domain_error("step length must be nonnegative");
    // 1 - (1+l)^-beta without cancellation for small l
    return -std::expm1(-beta() * std::log1p(l));
}

double StepDistribution::inverse_cdf(double xi) const
{
    if (!(xi > 0 && xi <= 1))
        throw std::domain_error("inverse_cdf argument must lie in ]0, 1]");
    return 1.0 / std::pow(xi, 1.0 / beta()) - 1.0;
}

}  // namespace levy
