#include "levy/optimizer.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "levy/flight_sim.hpp"

namespace levy {
namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

void check_positive(double value, char const* what)
{
    if (!(value > 0) || !std::isfinite(value))
        throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

bool Box::contains(std::span<double const> x) const
{
    if (x.size() != lower.size())
        return false;
    for (std::size_t c = 0; c < x.size(); ++c)
    {
        if (!(x[c] >= lower[c] && x[c] <= upper[c]))
            return false;
    }
    return true;
}

void reflect_into_box(std::span<double> x, Box const& box)
{
    for (std::size_t c = 0; c < x.size(); ++c)
    {
        double const lo = box.lower[c];
        double const width = box.upper[c] - lo;
        if (!std::isfinite(x[c]))
        {
            x[c] = lo + 0.5 * width;
            continue;
        }
        if (x[c] >= lo && x[c] <= box.upper[c])
            continue;
        // Unfold onto a period of length 2 * width, then mirror.
        double offset = std::fmod(x[c] - lo, 2 * width);
        if (offset < 0)
            offset += 2 * width;
        x[c] = lo + (offset <= width ? offset : 2 * width - offset);
    }
}

ObjectiveFunction quadratic_bowl(std::size_t dimension, std::optional<Box> bounds)
{
    ObjectiveFunction f;
    f.name = "bowl";
    f.dimension = dimension;
    f.evaluate = [](std::span<double const> x) {
        double s = 0;
        for (double v : x)
            s += v * v;
        return s;
    };
    f.bounds = std::move(bounds);
    f.known_optimum = KnownOptimum{std::vector<double>(dimension, 0.0), 0.0};
    return f;
}

ObjectiveFunction rastrigin(std::size_t dimension)
{
    ObjectiveFunction f;
    f.name = "rastrigin";
    f.dimension = dimension;
    f.evaluate = [](std::span<double const> x) {
        double s = 10.0 * static_cast<double>(x.size());
        for (double v : x)
            s += v * v - 10.0 * std::cos(two_pi * v);
        return s;
    };
    f.bounds = Box{std::vector<double>(dimension, -5.12), std::vector<double>(dimension, 5.12)};
    f.known_optimum = KnownOptimum{std::vector<double>(dimension, 0.0), 0.0};
    return f;
}

ObjectiveFunction double_well(double basin_width)
{
    check_positive(basin_width, "basin width");
    double const h = 0.5 * basin_width;
    ObjectiveFunction f;
    f.name = "double-well";
    f.dimension = 1;
    f.evaluate = [h](std::span<double const> x) {
        double const r = std::abs(x[0]);
        if (r < h)
            return (r / h) * (r / h);
        double const u = (r - 2 * h) / h;
        return u * u - 2.0;
    };
    f.known_optimum = KnownOptimum{{2 * h}, -2.0};
    return f;
}

StepPolicy StepPolicy::levy(double beta)
{
    return StepPolicy{Levy{StepDistribution{LevyIndex{beta}}}};
}

StepPolicy StepPolicy::uniform(double l_max)
{
    check_positive(l_max, "uniform step bound l_max");
    return StepPolicy{Uniform{l_max}};
}

StepPolicy StepPolicy::gaussian(double sigma)
{
    check_positive(sigma, "gaussian step sigma");
    return StepPolicy{Gaussian{sigma}};
}

std::string StepPolicy::describe() const
{
    if (auto const* p = std::get_if<Levy>(&kind_))
        return "levy(" + format_double(p->distribution.beta()) + ")";
    if (auto const* p = std::get_if<Uniform>(&kind_))
        return "uniform(" + format_double(p->l_max) + ")";
    return "gaussian(" + format_double(std::get<Gaussian>(kind_).sigma) + ")";
}

RunResult run(ObjectiveFunction const& objective,
              StepPolicy const& policy,
              std::size_t n_walkers,
              std::size_t n_iterations,
              std::uint64_t seed,
              RunOptions const& options)
{
    if (n_walkers < 1)
        throw std::invalid_argument("optimizer needs at least one walker");
    if (n_iterations < 1)
        throw std::invalid_argument("optimizer needs at least one iteration");
    if (objective.dimension < 1 || !objective.evaluate)
        throw std::invalid_argument("objective needs a dimension and an evaluate function");
    if (objective.bounds && (objective.bounds->lower.size() != objective.dimension
                             || objective.bounds->upper.size() != objective.dimension))
        throw std::invalid_argument("objective bounds do not match its dimension");
    if (!options.start.empty() && options.start.size() != objective.dimension)
        throw std::invalid_argument("start point does not match the objective dimension");

    RunResult result{OptimizerState{{}, {}, {}, 0, 0, policy, options.goal}, {}};
    OptimizerState& state = result.state;
    std::size_t const dim = objective.dimension;

    state.walkers.reserve(n_walkers);
    state.streams.reserve(n_walkers);
    for (std::size_t w = 0; w < n_walkers; ++w)
    {
        UniformSource& source = state.streams.emplace_back(derive_seed(seed, w));
        Walker walker;
        walker.position.resize(dim);
        for (std::size_t c = 0; c < dim; ++c)
        {
            if (objective.bounds)
            {
                double const lo = objective.bounds->lower[c];
                walker.position[c] = lo + (objective.bounds->upper[c] - lo) * source.next();
            }
            else
            {
                double const center = options.start.empty() ? 0.0 : options.start[c];
                walker.position[c] = center + standard_normal(source);
            }
        }
        walker.value = objective.evaluate(walker.position);
        ++state.evaluations;
        if (!std::isfinite(walker.value))
        {
            walker.quarantined = true;
            walker.diagnostic = "objective returned a non-finite value at the initial point";
        }
        state.walkers.push_back(std::move(walker));
    }

    auto update_best = [&state](std::size_t iteration, bool first) {
        for (auto const& w : state.walkers)
        {
            if (w.quarantined)
                continue;
            if (first || is_better(w.value, state.best.value, state.goal))
            {
                state.best = BestRecord{w.position, w.value, iteration};
                first = false;
            }
        }
        if (first)
            throw std::runtime_error("every walker was quarantined at initialization");
    };
    auto log_best = [&result, &state](std::size_t iteration) {
        result.log.push_back({iteration, state.best.value, state.best.position});
    };

    update_best(0, true);
    log_best(0);

    for (std::size_t it = 1; it <= n_iterations; ++it)
    {
        for (std::size_t w = 0; w < n_walkers; ++w)
        {
            step_walker(state.walkers[w], policy, objective, state.streams[w], state.goal,
                        &state.evaluations);
        }
        state.iteration = it;
        update_best(it, false);
        log_best(it);
    }
    return result;
}

void write_iteration_log_csv(std::vector<IterationRecord> const& log, std::ostream& out)
{
    std::size_t const dim = log.empty() ? 0 : log.front().best_position.size();
    out << "iteration,best_value";
    for (std::size_t c = 0; c < dim; ++c)
        out << ",best_x_" << c;
    out << '\n';
    for (auto const& rec : log)
    {
        out << rec.iteration << ',' << format_double(rec.best_value);
        for (double x : rec.best_position)
            out << ',' << format_double(x);
        out << '\n';
    }
}

EscapeResult escape_experiment(double l_max,
                               double basin_width,
                               LevyIndex beta,
                               std::size_t budget,
                               std::size_t n_repeats,
                               std::uint64_t seed)
{
    check_positive(l_max, "l_max");
    check_positive(basin_width, "basin width");
    if (!(basin_width > 2 * l_max))
        throw std::invalid_argument("escape experiment requires basin_width > 2 l_max");
    if (n_repeats < 1)
        throw std::invalid_argument("escape experiment needs at least one repeat");

    auto const objective = double_well(basin_width);
    double const rim = 0.5 * basin_width;
    StepPolicy const policies[] = {StepPolicy::uniform(l_max), StepPolicy::levy(beta.value())};
    double frequencies[2] = {0, 0};

    for (std::size_t p = 0; p < 2; ++p)
    {
        std::size_t escapes = 0;
        for (std::size_t r = 0; r < n_repeats; ++r)
        {
            UniformSource source(derive_seed(derive_seed(seed, p), r));
            Walker walker{{0.0}, objective.evaluate(std::vector<double>{0.0}), false, {}};
            for (std::size_t step = 0; step < budget; ++step)
            {
                step_walker(walker, policies[p], objective, source);
                if (std::abs(walker.position[0]) >= rim)
                {
                    ++escapes;
                    break;
                }
            }
        }
        frequencies[p] = static_cast<double>(escapes) / static_cast<double>(n_repeats);
    }
    return {frequencies[0], frequencies[1], n_repeats, budget};
}

double TrackingResult::late_window_mean(double fraction) const
{
    if (errors.empty() || !(fraction > 0 && fraction <= 1))
        throw std::invalid_argument("late window needs a nonempty trace and 0 < fraction <= 1");
    auto const n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(errors.size()))));
    double sum = 0;
    for (std::size_t i = errors.size() - n; i < errors.size(); ++i)
        sum += errors[i];
    return sum / static_cast<double>(n);
}

TrackingResult tracking_experiment(double drift_rate,
                                   StepPolicy const& policy,
                                   std::size_t budget,
                                   std::uint64_t seed,
                                   std::size_t dimension)
{
    if (!(drift_rate >= 0) || !std::isfinite(drift_rate))
        throw std::invalid_argument("drift rate must be nonnegative");
    if (budget < 1)
        throw std::invalid_argument("tracking experiment needs at least one iteration");
    if (dimension < 1)
        throw std::invalid_argument("tracking dimension must be at least 1");

    std::vector<double> center(dimension, 0.0);
    ObjectiveFunction moving;
    moving.name = "moving-bowl";
    moving.dimension = dimension;
    moving.evaluate = [&center](std::span<double const> x) {
        double s = 0;
        for (std::size_t c = 0; c < x.size(); ++c)
            s += (x[c] - center[c]) * (x[c] - center[c]);
        return s;
    };

    UniformSource source(seed);
    Walker walker{center, 0.0, false, {}};
    TrackingResult out;
    out.errors.reserve(budget);
    for (std::size_t it = 1; it <= budget; ++it)
    {
        center[0] = drift_rate * static_cast<double>(it);
        walker.value = moving.evaluate(walker.position);
        step_walker(walker, policy, moving, source);
        out.errors.push_back(std::sqrt(moving.evaluate(walker.position)));
    }
    return out;
}

}  // namespace levy
