#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <span>

namespace levy {

/// Tail index of the step-length law, P(l) ~ l^(-1-beta).
///
/// Any positive finite value is accepted. Values of beta >= 2 are legal for
/// sampling, although the resulting walk is no longer Levy-like.
class LevyIndex
{
  public:
    explicit LevyIndex(double beta);

    double value() const noexcept { return beta_; }

    friend bool operator==(LevyIndex, LevyIndex) = default;

  private:
    double beta_;
};

/// Anything that hands out uniform reals on ]0, 1].
template<class S>
concept UnitIntervalSource = requires(S& s) {
    { s.next() } -> std::convertible_to<double>;
};

/*!
 * Seeded uniform source on the half-open interval ]0, 1].
 *
 * Backed by std::mt19937_64 (period 2^19937 - 1; its output sequence is fixed
 * by the C++ standard, so streams are identical across toolchains). Each draw
 * consumes one 64-bit word and keeps its top 53 bits k, returning
 * (k + 1) * 2^-53. Zero is therefore never produced and 1 is reachable.
 */
class UniformSource
{
  public:
    explicit UniformSource(std::uint64_t seed);

    double next();

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t draws() const noexcept { return draws_; }

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
};

/// Seed for an independent sub-stream (walker, repeat, ...) of a base seed.
/// SplitMix64 finalizer applied to the base seed and the stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/*!
 * Power-law step length distribution
 *
 *   P(l) = beta / (1 + l)^(1 + beta),  l >= 0
 *
 * The normalization constant equals beta. Sampling inverts the CDF with
 * l = 1 / xi^(1/beta) - 1 for xi uniform on ]0, 1], which is finite for
 * every admissible xi. For very small beta the largest steps overflow to
 * +inf.
 */
class StepDistribution
{
  public:
    explicit StepDistribution(LevyIndex index);

    LevyIndex index() const noexcept { return index_; }
    double beta() const noexcept { return index_.value(); }
    double normalization() const noexcept { return index_.value(); }

    double pdf(double l) const;
    double cdf(double l) const;
    double inverse_cdf(double xi) const;

    /// Exactly one draw from the source per call.
    template<UnitIntervalSource S>
    double sample_step(S& source) const
    {
        return inverse_cdf(source.next());
    }

  private:
    LevyIndex index_;
};

/// Standard normal deviate (Box-Muller, cosine branch; two draws).
template<UnitIntervalSource S>
double standard_normal(S& source)
{
    constexpr double two_pi = 6.283185307179586476925286766559;
    double const radius = std::sqrt(-2.0 * std::log(source.next()));
    return radius * std::cos(two_pi * source.next());
}

/*!
 * Fill `out` with a direction uniformly distributed on the unit sphere.
 *
 * One dimension: a random sign (one draw). Two dimensions: an angle
 * 2*pi*xi (one draw). Higher dimensions: a normalized standard-normal
 * vector, redrawn in the measure-zero case of a null vector.
 */
template<UnitIntervalSource S>
void unit_direction(S& source, std::span<double> out)
{
    constexpr double two_pi = 6.283185307179586476925286766559;
    if (out.size() == 1)
    {
        out[0] = source.next() <= 0.5 ? -1.0 : 1.0;
        return;
    }
    if (out.size() == 2)
    {
        double const angle = two_pi * source.next();
        out[0] = std::cos(angle);
        out[1] = std::sin(angle);
        return;
    }
    double norm2 = 0;
    while (norm2 == 0)
    {
        norm2 = 0;
        for (double& c : out)
        {
            c = standard_normal(source);
            norm2 += c * c;
        }
    }
    double const inv = 1.0 / std::sqrt(norm2);
    for (double& c : out)
        c *= inv;
}

}  // namespace levy
