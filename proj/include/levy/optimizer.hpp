#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "levy/sampler.hpp"

namespace levy {

/// Axis-aligned search box.
struct Box
{
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dimension() const noexcept { return lower.size(); }
    bool contains(std::span<double const> x) const;
};

/// Fold every coordinate back into the box by mirror reflection at the faces.
void reflect_into_box(std::span<double> x, Box const& box);

struct KnownOptimum
{
    std::vector<double> position;
    double value = 0;
};

struct ObjectiveFunction
{
    std::string name;
    std::size_t dimension = 1;
    std::function<double(std::span<double const>)> evaluate;
    std::optional<Box> bounds;
    std::optional<KnownOptimum> known_optimum;
};

/// f(x) = |x - center|^2, optionally restricted to a box.
ObjectiveFunction quadratic_bowl(std::size_t dimension, std::optional<Box> bounds = {});

/// 10 d + sum (x_i^2 - 10 cos(2 pi x_i)) on [-5.12, 5.12]^d; minimum 0 at 0.
ObjectiveFunction rastrigin(std::size_t dimension);

/*!
 * One-dimensional trap for the escape experiment.
 *
 * With h = basin_width / 2:
 *   f(x) = (x / h)^2                   for |x| < h   (local well, f(0) = 0)
 *   f(x) = ((|x| - 2h) / h)^2 - 2      for |x| >= h  (global wells at +-2h)
 * Every point closer than h to the origin is worse than the origin, and every
 * point with f < 0 lies at |x| >= h.
 */
ObjectiveFunction double_well(double basin_width);

enum class Goal
{
    minimize,
    maximize,
};

/// Step-length law of the trial moves. Directions are always isotropic.
class StepPolicy
{
  public:
    struct Levy
    {
        StepDistribution distribution;
    };
    struct Uniform
    {
        double l_max;
    };
    struct Gaussian
    {
        double sigma;
    };

    static StepPolicy levy(double beta);
    static StepPolicy uniform(double l_max);
    static StepPolicy gaussian(double sigma);

    std::variant<Levy, Uniform, Gaussian> const& kind() const noexcept { return kind_; }
    std::string describe() const;

    /// Levy: power-law step; uniform: l_max * xi; gaussian: |sigma * N(0,1)|.
    template<UnitIntervalSource S>
    double draw_length(S& source) const
    {
        if (auto const* p = std::get_if<Levy>(&kind_))
            return p->distribution.sample_step(source);
        if (auto const* p = std::get_if<Uniform>(&kind_))
            return p->l_max * source.next();
        return std::abs(std::get<Gaussian>(kind_).sigma * standard_normal(source));
    }

  private:
    explicit StepPolicy(std::variant<Levy, Uniform, Gaussian> kind) : kind_(std::move(kind)) {}

    std::variant<Levy, Uniform, Gaussian> kind_;
};

/// position + l u with l from the policy, then u isotropic; reflected into
/// `bounds` when given.
template<UnitIntervalSource S>
std::vector<double> propose_step(std::span<double const> position,
                                 StepPolicy const& policy,
                                 S& source,
                                 Box const* bounds = nullptr)
{
    double const length = policy.draw_length(source);
    std::vector<double> out(position.begin(), position.end());
    std::vector<double> direction(position.size());
    unit_direction(source, direction);
    for (std::size_t c = 0; c < out.size(); ++c)
        out[c] += length * direction[c];
    if (bounds)
        reflect_into_box(out, *bounds);
    return out;
}

struct Walker
{
    std::vector<double> position;
    double value = 0;
    bool quarantined = false;
    std::string diagnostic;
};

inline bool is_better(double candidate, double current, Goal goal)
{
    return goal == Goal::minimize ? candidate < current : candidate > current;
}

/*!
 * One greedy move: propose, evaluate once, accept only a strict improvement.
 *
 * A non-finite objective value quarantines the walker at its current position.
 * Quarantined walkers are not moved again. Returns whether the move was
 * accepted.
 */
template<UnitIntervalSource S>
bool step_walker(Walker& walker,
                 StepPolicy const& policy,
                 ObjectiveFunction const& objective,
                 S& source,
                 Goal goal = Goal::minimize,
                 std::size_t* evaluations = nullptr)
{
    if (walker.quarantined)
        return false;
    auto proposal = propose_step(walker.position, policy, source,
                                 objective.bounds ? &*objective.bounds : nullptr);
    double const value = objective.evaluate(proposal);
    if (evaluations)
        ++*evaluations;
    if (!std::isfinite(value))
    {
        walker.quarantined = true;
        walker.diagnostic = "objective returned a non-finite value";
        return false;
    }
    if (!is_better(value, walker.value, goal))
        return false;
    walker.position = std::move(proposal);
    walker.value = value;
    return true;
}

struct BestRecord
{
    std::vector<double> position;
    double value = 0;
    std::size_t iteration = 0;
};

struct OptimizerState
{
    std::vector<Walker> walkers;
    std::vector<UniformSource> streams;  //!< one per walker
    BestRecord best;
    std::size_t iteration = 0;
    std::size_t evaluations = 0;
    StepPolicy policy = StepPolicy::levy(1.0);
    Goal goal = Goal::minimize;
};

struct IterationRecord
{
    std::size_t iteration = 0;
    double best_value = 0;
    std::vector<double> best_position;
};

struct RunOptions
{
    Goal goal = Goal::minimize;
    /// Center of the unit-normal initial cloud on unbounded problems
    /// (origin when empty).
    std::vector<double> start;
};

struct RunResult
{
    OptimizerState state;
    std::vector<IterationRecord> log;  //!< entry 0 is the initial population
};

/*!
 * Independent greedy walkers driven by the step policy.
 *
 * Walker w draws from UniformSource(derive_seed(seed, w)), first for its
 * starting point (uniform in the box, or unit-normal around the start point
 * when unbounded) and then for its moves. The best-so-far record is updated
 * after each iteration by scanning walkers in index order.
 */
RunResult run(ObjectiveFunction const& objective,
              StepPolicy const& policy,
              std::size_t n_walkers,
              std::size_t n_iterations,
              std::uint64_t seed,
              RunOptions const& options = {});

/// `iteration,best_value,best_x_0,...` CSV with header.
void write_iteration_log_csv(std::vector<IterationRecord> const& log, std::ostream& out);

struct EscapeResult
{
    double uniform_frequency = 0;
    double levy_frequency = 0;
    std::size_t repeats = 0;
    std::size_t budget = 0;
};

/*!
 * Single greedy walkers started at the bottom of the local well of
 * double_well(basin_width), once with uniform(l_max) steps and once with Levy
 * steps, for `budget` moves each. Returns the fraction of repeats in which
 * the walker reached the global well.
 *
 * Requires basin_width > 2 l_max.
 */
EscapeResult escape_experiment(double l_max,
                               double basin_width,
                               LevyIndex beta,
                               std::size_t budget,
                               std::size_t n_repeats,
                               std::uint64_t seed);

struct TrackingResult
{
    /// Distance from the walker to the optimum after each iteration.
    std::vector<double> errors;

    /// Mean error over the last `fraction` of the iterations.
    double late_window_mean(double fraction = 0.5) const;
};

/*!
 * A single greedy walker follows the minimum of |x - c(t)|^2, where c(t)
 * moves by `drift_rate` per iteration along the first axis. The walker starts
 * on the optimum. Each iteration re-evaluates the walker under the moved
 * objective and then makes one greedy move.
 */
TrackingResult tracking_experiment(double drift_rate,
                                   StepPolicy const& policy,
                                   std::size_t budget,
                                   std::uint64_t seed,
                                   std::size_t dimension = 2);

}  // namespace levy
