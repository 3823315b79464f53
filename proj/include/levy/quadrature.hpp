#pragma once

#include <cstddef>
#include <functional>

namespace levy::quad {

struct Estimate
{
    double value = 0;
    double error = 0;
    std::size_t evaluations = 0;
    bool converged = true;
};

/// Single 15-point Kronrod rule on [a, b] with the embedded 7-point Gauss
/// rule; error is |K15 - G7|.
Estimate kronrod15(std::function<double(double)> const& f, double a, double b);

/*!
 * Globally adaptive Gauss-Kronrod integration on [a, b].
 *
 * Repeatedly bisects the subinterval with the largest error until the summed
 * error falls below `abs_tol` or `max_intervals` subintervals exist. The
 * result is flagged non-converged in the latter case.
 */
Estimate integrate(std::function<double(double)> const& f,
                   double a,
                   double b,
                   double abs_tol,
                   std::size_t max_intervals = 2000);

}  // namespace levy::quad
