#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "levy/sampler.hpp"

namespace levy {

enum class DensityMethod
{
    automatic,
    quadrature,
    series,
    closed_form,
};

std::string_view to_string(DensityMethod method);
DensityMethod parse_density_method(std::string_view name);

/// Quadrature did not reach its accuracy target.
class NumericalFailure : public std::runtime_error
{
  public:
    NumericalFailure(std::string const& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error)
    {
    }

    double achieved_error() const noexcept { return achieved_error_; }

  private:
    double achieved_error_;
};

/// The requested evaluation method does not cover these parameters.
class UnsupportedCase : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters of the symmetric stable density, 0 < beta <= 2 and gamma > 0.
class StableDensitySpec
{
  public:
    explicit StableDensitySpec(LevyIndex index,
                               double gamma = 1.0,
                               DensityMethod method = DensityMethod::automatic);

    LevyIndex index() const noexcept { return index_; }
    double beta() const noexcept { return index_.value(); }
    double gamma() const noexcept { return gamma_; }
    DensityMethod method() const noexcept { return method_; }

  private:
    LevyIndex index_;
    double gamma_;
    DensityMethod method_;
};

/// Number of retained terms in the large-|x| expansion.
class SeriesTruncation
{
  public:
    explicit SeriesTruncation(int terms);

    int terms() const noexcept { return terms_; }

    /// Order of the remainder, R_m(x) = O(x^e).
    double remainder_order_exponent(double beta) const noexcept
    {
        return -beta * (terms_ + 1) - 1;
    }

  private:
    int terms_;
};

struct DensityValue
{
    double value = 0;           //!< clamped at zero
    double raw = 0;             //!< before clamping
    double error_estimate = 0;  //!< absolute
    DensityMethod method = DensityMethod::quadrature;
    int series_terms = 0;       //!< series only
};

struct SeriesValue
{
    double value = 0;
    int effective_terms = 0;
    bool capped = false;  //!< fewer terms than requested (term overflow)
};

struct QuadratureOptions
{
    double abs_tol = 1e-10;
    // Half-periods of cos(qx) summed one by one before switching to the
    // accelerated alternating sum.
    std::size_t max_direct_pieces = 2000;
    std::size_t acceleration_window = 32;
    std::size_t max_subintervals = 200;
};

/*!
 * L(x) = (1/pi) * integral_0^inf exp(-gamma q^beta) cos(q x) dq.
 *
 * The integral is split at the zeros of cos(q|x|). Each half period is
 * integrated with adaptive Gauss-Kronrod. When the exp(-gamma q^beta)
 * envelope needs more than `max_direct_pieces` half periods to fall below the
 * tolerance, the remaining alternating series is summed by repeated averaging
 * of partial sums. Near x = 0 the integral is done directly on [0, Q] with Q
 * taken from an incomplete-gamma bound on the envelope tail.
 *
 * Throws NumericalFailure when the combined error estimate exceeds
 * `abs_tol`.
 */
DensityValue density_quadrature(StableDensitySpec const& spec,
                                double x,
                                QuadratureOptions const& options = {});

/// Cauchy (beta = 1) and Gaussian (beta = 2) densities for gamma = 1.
double density_closed_form(StableDensitySpec const& spec, double x);

/*!
 * Large-|x| expansion of the density, gamma = 1, beta < 2:
 *
 *   L(x) ~ -(1/pi) sum_k (-1)^k / k! * Gamma(beta k + 1) / |x|^(beta k + 1)
 *                    * sin(k pi beta / 2)
 *
 * Terms are formed through log-gamma. If a term would overflow, the sum
 * stops early and `capped` is set.
 */
SeriesValue density_series(StableDensitySpec const& spec,
                           double x,
                           SeriesTruncation truncation);

/// Smallest |x| from which the optimally truncated series is trusted at the
/// 1e-10 level, or +inf if the series is never used for this beta.
double series_crossover(double beta);

/// Method that `density` uses for automatic dispatch.
DensityMethod select_method(StableDensitySpec const& spec, double x);

/// Evaluate with the method stored in `spec` (automatic dispatch if unset).
DensityValue density(StableDensitySpec const& spec, double x);

}  // namespace levy
