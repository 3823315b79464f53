#include "levy/stable_density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "levy/quadrature.hpp"

namespace levy {
namespace {

constexpr double pi = 3.141592653589793238462643383279502884;
constexpr double inv_pi = 0.318309886183790671537767526745028724;
constexpr double inf = std::numeric_limits<double>::infinity();

// sin(pi r), exactly zero at integers
double sin_pi(double r)
{
    if (r == std::floor(r))
        return 0.0;
    double const reduced = std::fmod(r, 2.0);
    return std::sin(pi * reduced);
}

// Upper bound on integral_Q^inf exp(-gamma q^beta) dq, through
// (1/beta) gamma^(-1/beta) Gamma(1/beta, gamma Q^beta).
double log_envelope_tail_bound(double beta, double gamma, double u)
{
    double const s = 1.0 / beta;
    double log_bound = -std::log(beta) - s * std::log(gamma) + (s - 1) * std::log(u) - u;
    if (s > 1)
    {
        if (u <= 2 * (s - 1))
            return inf;
        log_bound += std::log(u / (u - (s - 1)));
    }
    return log_bound;
}

double envelope_cutoff(double beta, double gamma, double tail_tol)
{
    double const log_tol = std::log(tail_tol);
    double u = 1.0;
    while (log_envelope_tail_bound(beta, gamma, u) > log_tol)
        u *= 1.0625;
    return std::pow(u / gamma, 1.0 / beta);
}

// Adaptive integration on [a, b] with extra breakpoints at powers of two so
// that long ranges of a slowly decaying envelope are resolved.
quad::Estimate integrate_range(std::function<double(double)> const& f,
                               double a,
                               double b,
                               double tol,
                               std::size_t max_subintervals)
{
    std::vector<double> cuts{a};
    for (double p = 1.0; p < b; p *= 2)
    {
        if (p > a)
            cuts.push_back(p);
    }
    cuts.push_back(b);

    quad::Estimate total;
    double const share = tol / static_cast<double>(cuts.size() - 1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
        auto const part = quad::integrate(f, cuts[i], cuts[i + 1], share, max_subintervals);
        total.value += part.value;
        total.error += part.error;
        total.evaluations += part.evaluations;
        total.converged = total.converged && part.converged;
    }
    return total;
}

struct SeriesSum
{
    double value = 0;
    double next_term = 0;
    int terms = 0;
    bool capped = false;
};

constexpr double log_term_overflow = 700.0;

struct SeriesTerm
{
    double log_envelope;  //!< log of Gamma(beta k + 1) / (pi k! x^(beta k + 1))
    double value;
};

SeriesTerm series_term(double beta, double log_ax, int k)
{
    double const log_envelope = std::lgamma(beta * k + 1) - std::lgamma(k + 1.0)
                                - (beta * k + 1) * log_ax + std::log(inv_pi);
    double const s = sin_pi(0.5 * k * beta);
    if (s == 0 || log_envelope > log_term_overflow)
        return {log_envelope, 0.0};
    // -(-1)^k sin(...)
    double const sign = (k % 2 == 0) ? -1.0 : 1.0;
    return {log_envelope, sign * s * std::exp(log_envelope)};
}

SeriesSum sum_series(double beta, double ax, int max_terms, bool stop_at_smallest)
{
    SeriesSum out;
    double const log_ax = std::log(ax);
    double previous_envelope = inf;
    for (int k = 1; k <= max_terms + 1; ++k)
    {
        auto const term = series_term(beta, log_ax, k);
        if (term.log_envelope > log_term_overflow)
        {
            out.capped = true;
            break;
        }
        if (k == max_terms + 1)
        {
            out.next_term = std::exp(term.log_envelope);
            break;
        }
        // Asymptotic series: stop where the term envelope starts to grow.
        // The oscillating sine factor is left out so a small sine does not
        // end the sum early.
        if (stop_at_smallest && term.log_envelope > previous_envelope)
        {
            out.next_term = std::exp(term.log_envelope);
            break;
        }
        previous_envelope = term.log_envelope;
        out.value += term.value;
        out.terms = k;
        if (stop_at_smallest && std::exp(term.log_envelope) < 1e-18 * std::abs(out.value))
        {
            out.next_term = 0;
            break;
        }
    }
    return out;
}

// Crossover |x| from which the optimally truncated series agrees with
// quadrature to 1e-10, indexed by beta = 0.05, 0.10, ..., 1.95. Calibrated by
// scanning |x| down from 1e5 in steps of 3% until the two disagree by more
// than 2e-11, then doubled and rounded up to a multiple of 0.5 (at least 1).
constexpr double crossover_step = 0.05;
constexpr std::array<double, 39> crossover_table = {
    1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,
    1.0,  1.0,  1.0,  1.5,  1.5,  1.5,  2.0,  2.0,  2.5,  3.0,
    3.5,  4.0,  5.0,  5.5,  6.5,  7.5,  8.0,  9.0,  9.5,  10.5,
    11.5, 12.0, 13.5, 13.5, 14.5, 16.0, 17.0, 17.5, 18.0,
};

}  // namespace

std::string_view to_string(DensityMethod method)
{
    switch (method)
    {
        case DensityMethod::automatic:
            return "auto";
        case DensityMethod::quadrature:
            return "quadrature";
        case DensityMethod::series:
            return "series";
        case DensityMethod::closed_form:
            return "closed_form";
    }
    return "unknown";
}

DensityMethod parse_density_method(std::string_view name)
{
    for (auto m : {DensityMethod::automatic,
                   DensityMethod::quadrature,
                   DensityMethod::series,
                   DensityMethod::closed_form})
    {
        if (to_string(m) == name)
            return m;
    }
    throw std::invalid_argument("unknown density method '" + std::string(name) + "'");
}

StableDensitySpec::StableDensitySpec(LevyIndex index, double gamma, DensityMethod method)
    : index_(index), gamma_(gamma), method_(method)
{
    if (index.value() > 2)
        throw std::domain_error("stable density index must lie in ]0, 2]");
    if (!(gamma > 0) || !std::isfinite(gamma))
        throw std::domain_error("stable density scale gamma must be positive");
}

SeriesTruncation::SeriesTruncation(int terms) : terms_(terms)
{
    if (terms < 1)
        throw std::invalid_argument("series truncation needs at least one term");
}

DensityValue density_quadrature(StableDensitySpec const& spec,
                                double x,
                                QuadratureOptions const& options)
{
    if (!std::isfinite(x))
        throw std::domain_error("density argument must be finite");

    double const beta = spec.beta();
    double const gamma = spec.gamma();
    double const ax = std::abs(x);
    // Work in units of the bare integral; the 1/pi factor comes last.
    double const tol = pi * options.abs_tol;

    auto integrand = [beta, gamma, ax](double q) {
        return std::exp(-gamma * std::pow(q, beta)) * std::cos(q * ax);
    };

    double const cutoff = envelope_cutoff(beta, gamma, 0.01 * tol);
    double const half_period = ax > 0 ? pi / ax : inf;
    double const first_zero = 0.5 * half_period;

    double integral = 0;
    double error = 0;

    if (!(first_zero < cutoff))
    {
        auto const est = integrate_range(integrand, 0.0, cutoff, 0.5 * tol, options.max_subintervals);
        integral = est.value;
        error = est.error + 0.01 * tol;
    }
    else
    {
        double const pieces_to_cutoff = std::ceil((cutoff - first_zero) / half_period) + 1;
        bool const direct = pieces_to_cutoff <= static_cast<double>(options.max_direct_pieces);
        std::size_t const n_direct = direct ? static_cast<std::size_t>(pieces_to_cutoff)
                                            : options.max_direct_pieces;
        std::size_t const n_total = n_direct + (direct ? 0 : options.acceleration_window);
        double const piece_tol = 0.5 * tol / static_cast<double>(n_total);

        auto boundary = [&](std::size_t k) {
            return k == 0 ? 0.0 : first_zero + static_cast<double>(k - 1) * half_period;
        };
        auto piece = [&](std::size_t k) {
            return integrate_range(integrand, boundary(k), boundary(k + 1), piece_tol, options.max_subintervals);
        };

        for (std::size_t k = 0; k < n_direct; ++k)
        {
            auto const est = piece(k);
            integral += est.value;
            error += est.error;
        }

        if (direct)
        {
            double const u = gamma * std::pow(boundary(n_direct), beta);
            error += std::exp(log_envelope_tail_bound(beta, gamma, u));
        }
        else
        {
            // Repeated averaging of the alternating partial sums.
            std::vector<double> level(options.acceleration_window + 1);
            level[0] = integral;
            for (std::size_t j = 1; j < level.size(); ++j)
            {
                auto const est = piece(n_direct + j - 1);
                level[j] = level[j - 1] + est.value;
                error += est.error;
            }
            std::vector<double> previous;
            while (level.size() > 1)
            {
                previous = level;
                for (std::size_t j = 0; j + 1 < level.size(); ++j)
                    level[j] = 0.5 * (level[j] + level[j + 1]);
                level.pop_back();
            }
            integral = level[0];
            error += 0.5 * std::abs(previous[0] - previous[1]);
        }
    }

    DensityValue out;
    out.raw = inv_pi * integral;
    out.value = std::max(out.raw, 0.0);
    out.error_estimate = inv_pi * error;
    out.method = DensityMethod::quadrature;
    if (!(out.error_estimate <= options.abs_tol))
    {
        throw NumericalFailure("stable density quadrature missed its tolerance at x = "
                                   + std::to_string(x) + " (error estimate "
                                   + std::to_string(out.error_estimate) + ")",
                               out.error_estimate);
    }
    return out;
}

double density_closed_form(StableDensitySpec const& spec, double x)
{
    if (spec.gamma() != 1.0)
        throw UnsupportedCase("closed form density requires gamma = 1");
    if (spec.beta() == 1.0)
        return inv_pi / (1.0 + x * x);
    if (spec.beta() == 2.0)
        return 0.5 / std::sqrt(pi) * std::exp(-0.25 * x * x);
    throw UnsupportedCase("closed form density exists only for beta = 1 and beta = 2");
}

SeriesValue density_series(StableDensitySpec const& spec, double x, SeriesTruncation truncation)
{
    if (spec.gamma() != 1.0)
        throw UnsupportedCase("series density requires gamma = 1");
    if (x == 0 || !std::isfinite(x))
        throw std::domain_error("series density needs a finite nonzero argument");

    auto const sum = sum_series(spec.beta(), std::abs(x), truncation.terms(), false);
    SeriesValue out;
    out.value = sum.value;
    out.effective_terms = sum.capped ? sum.terms : truncation.terms();
    out.capped = sum.capped;
    return out;
}

double series_crossover(double beta)
{
    if (!(beta > 0) || beta >= 2)
        return inf;
    // Conservative: largest threshold of the bracketing grid points.
    double const position = beta / crossover_step - 1.0;
    if (position < 0)
        return inf;
    auto const lo = static_cast<std::size_t>(std::floor(position));
    auto const hi = std::min<std::size_t>(static_cast<std::size_t>(std::ceil(position)),
                                          crossover_table.size() - 1);
    if (lo >= crossover_table.size())
        return inf;
    return std::max(crossover_table[lo], crossover_table[hi]);
}

DensityMethod select_method(StableDensitySpec const& spec, double x)
{
    double const beta = spec.beta();
    if (spec.gamma() == 1.0 && (beta == 1.0 || beta == 2.0))
        return DensityMethod::closed_form;
    if (spec.gamma() == 1.0 && beta < 2.0 && std::abs(x) >= series_crossover(beta))
        return DensityMethod::series;
    return DensityMethod::quadrature;
}

DensityValue density(StableDensitySpec const& spec, double x)
{
    DensityMethod method = spec.method();
    if (method == DensityMethod::automatic)
        method = select_method(spec, x);

    switch (method)
    {
        case DensityMethod::closed_form: {
            DensityValue out;
            out.value = out.raw = density_closed_form(spec, x);
            out.method = method;
            return out;
        }
        case DensityMethod::series: {
            if (spec.gamma() != 1.0)
                throw UnsupportedCase("series density requires gamma = 1");
            if (x == 0 || !std::isfinite(x))
                throw std::domain_error("series density needs a finite nonzero argument");
            auto const sum = sum_series(spec.beta(), std::abs(x), 80, true);
            DensityValue out;
            out.raw = sum.value;
            out.value = std::max(sum.value, 0.0);
            out.error_estimate = std::abs(sum.next_term);
            out.method = method;
            out.series_terms = sum.terms;
            return out;
        }
        case DensityMethod::quadrature:
        case DensityMethod::automatic:
            break;
    }
    return density_quadrature(spec, x);
}

}  // namespace levy
