#include "levy/flight_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace levy {
namespace {

// Walkers are reduced in fixed-size blocks so the summation order does not
// depend on the number of threads.
constexpr std::size_t walker_block = 64;

void accumulate_walker(StepDistribution const& dist,
                       TimeAccounting accounting,
                       std::vector<double> const& grid,
                       std::size_t dimension,
                       std::uint64_t seed,
                       std::vector<double>& r2_sum)
{
    UniformSource source(seed);
    std::vector<double> position(dimension, 0.0);
    std::vector<double> direction(dimension);

    double t0 = 0;
    std::size_t g = 0;
    while (g < grid.size())
    {
        double const length = dist.sample_step(source);
        unit_direction(source, direction);
        double const dt = accounting.duration(length);
        double const t1 = t0 + dt;

        for (; g < grid.size() && grid[g] <= t1; ++g)
        {
            double const along = dt > 0 ? length * ((grid[g] - t0) / dt) : length;
            double r2 = 0;
            for (std::size_t c = 0; c < dimension; ++c)
            {
                double const xc = position[c] + along * direction[c];
                r2 += xc * xc;
            }
            r2_sum[g] += r2;
        }
        for (std::size_t c = 0; c < dimension; ++c)
            position[c] += length * direction[c];
        t0 = t1;
    }
}

}  // namespace

TimeAccounting TimeAccounting::walk(double speed)
{
    if (!(speed > 0) || !std::isfinite(speed))
        throw std::invalid_argument("walk speed must be positive");
    return TimeAccounting{TimeMode::walk, speed};
}

TimeMode parse_time_mode(std::string_view name)
{
    if (name == "flight")
        return TimeMode::flight;
    if (name == "walk")
        return TimeMode::walk;
    throw std::invalid_argument("unknown time mode '" + std::string(name)
                                + "' (expected flight or walk)");
}

std::vector<double> Trajectory::elapsed_times() const
{
    std::vector<double> out(segment_times.size() + 1, 0.0);
    for (std::size_t i = 0; i < segment_times.size(); ++i)
        out[i + 1] = out[i] + segment_times[i];
    return out;
}

Trajectory simulate_trajectory(LevyIndex beta,
                               std::size_t n_steps,
                               std::size_t dimension,
                               TimeAccounting accounting,
                               std::uint64_t seed)
{
    if (n_steps < 1)
        throw std::invalid_argument("trajectory needs at least one step");
    if (dimension < 1)
        throw std::invalid_argument("trajectory dimension must be at least 1");

    StepDistribution const dist(beta);
    UniformSource source(seed);

    Trajectory out;
    out.dimension = dimension;
    out.seed = seed;
    out.coordinates.assign(dimension, 0.0);
    out.coordinates.reserve((n_steps + 1) * dimension);
    out.segment_lengths.reserve(n_steps);
    out.segment_times.reserve(n_steps);

    std::vector<double> direction(dimension);
    double clock = 0;
    for (std::size_t step = 0; step < n_steps; ++step)
    {
        double const length = dist.sample_step(source);
        unit_direction(source, direction);

        std::size_t const last = out.coordinates.size() - dimension;
        for (std::size_t c = 0; c < dimension; ++c)
            out.coordinates.push_back(out.coordinates[last + c] + length * direction[c]);

        // Store the clock increment as it is actually realized, so the elapsed
        // times written to file difference back to the same values.
        double const next_clock = clock + accounting.duration(length);
        out.segment_lengths.push_back(length);
        out.segment_times.push_back(next_clock - clock);
        clock = next_clock;
    }
    return out;
}

double bounding_box_diagonal(Trajectory const& trajectory)
{
    double diag2 = 0;
    for (std::size_t c = 0; c < trajectory.dimension; ++c)
    {
        double lo = 0;
        double hi = 0;
        for (std::size_t i = 0; i < trajectory.num_points(); ++i)
        {
            lo = std::min(lo, trajectory.point(i)[c]);
            hi = std::max(hi, trajectory.point(i)[c]);
        }
        diag2 += (hi - lo) * (hi - lo);
    }
    return std::sqrt(diag2);
}

std::string_view to_string(DiffusionRegime regime)
{
    switch (regime)
    {
        case DiffusionRegime::ballistic_tunneling:
            return "ballistic_tunneling";
        case DiffusionRegime::marginal_beta_1:
            return "marginal_beta_1";
        case DiffusionRegime::superdiffusion:
            return "superdiffusion";
        case DiffusionRegime::marginal_beta_2:
            return "marginal_beta_2";
        case DiffusionRegime::normal_diffusion:
            return "normal_diffusion";
    }
    return "unknown";
}

RegimeClass classify_regime(LevyIndex beta)
{
    double const b = beta.value();
    if (b < 1)
        return {DiffusionRegime::ballistic_tunneling, "t^2", "no finite moments",
                "quantum tunneling", 2.0, false};
    if (b == 1)
        return {DiffusionRegime::marginal_beta_1, "t^2/ln t", "no finite moments",
                "quantum tunneling", 2.0, true};
    if (b < 2)
        return {DiffusionRegime::superdiffusion, "t^(3-beta)", "finite mean only",
                "superdiffusion", 3.0 - b, false};
    if (b == 2)
        return {DiffusionRegime::marginal_beta_2, "t ln t",
                "finite mean, logarithmically divergent variance (gaussian limit)",
                "diffusion (Brownian motion)", 1.0, true};
    return {DiffusionRegime::normal_diffusion, "t", "finite variance", "normal diffusion",
            1.0, false};
}

std::vector<double> log_time_grid(double t_min, double t_max, std::size_t count)
{
    if (!(t_min > 0) || !(t_max > t_min) || count < 2)
        throw std::invalid_argument("time grid needs 0 < t_min < t_max and at least two points");
    std::vector<double> out(count);
    double const ratio = std::log(t_max / t_min) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = t_min * std::exp(ratio * static_cast<double>(i));
    out.back() = t_max;
    return out;
}

MsdEstimate ensemble_msd(LevyIndex beta,
                         std::size_t n_walkers,
                         TimeAccounting accounting,
                         std::vector<double> const& time_grid,
                         std::uint64_t seed,
                         MsdOptions const& options)
{
    if (n_walkers < 100)
        throw std::invalid_argument("MSD ensemble needs at least 100 walkers");
    if (time_grid.size() < 2)
        throw std::invalid_argument("MSD time grid needs at least two points");
    if (!(time_grid.front() > 0))
        throw std::invalid_argument("MSD time grid must be positive");
    for (std::size_t i = 1; i < time_grid.size(); ++i)
    {
        if (!(time_grid[i] > time_grid[i - 1]) || !std::isfinite(time_grid[i]))
            throw std::invalid_argument("MSD time grid must be strictly increasing");
    }
    if (options.dimension < 1)
        throw std::invalid_argument("MSD dimension must be at least 1");

    StepDistribution const dist(beta);
    std::size_t const n_blocks = (n_walkers + walker_block - 1) / walker_block;
    std::vector<std::vector<double>> block_sums(n_blocks,
                                                std::vector<double>(time_grid.size(), 0.0));

    auto run_blocks = [&](std::size_t first, std::size_t stride) {
        for (std::size_t b = first; b < n_blocks; b += stride)
        {
            std::size_t const end = std::min(n_walkers, (b + 1) * walker_block);
            for (std::size_t w = b * walker_block; w < end; ++w)
            {
                accumulate_walker(dist, accounting, time_grid, options.dimension,
                                  derive_seed(seed, w), block_sums[b]);
            }
        }
    };

    std::size_t threads = options.threads;
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n_blocks);
    if (threads <= 1)
    {
        run_blocks(0, 1);
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(run_blocks, t, threads);
    }

    MsdEstimate out;
    out.time_grid = time_grid;
    out.ensemble_size = n_walkers;
    out.regime = classify_regime(beta).regime;
    out.msd_values.assign(time_grid.size(), 0.0);
    for (auto const& block : block_sums)
    {
        for (std::size_t g = 0; g < time_grid.size(); ++g)
            out.msd_values[g] += block[g];
    }
    for (double& v : out.msd_values)
        v /= static_cast<double>(n_walkers);

    // Least squares on the log-log data past the first decade.
    out.fit_window_start = 10.0 * time_grid.front();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t g = 0; g < time_grid.size(); ++g)
    {
        if (time_grid[g] < out.fit_window_start || !(out.msd_values[g] > 0))
            continue;
        double const lx = std::log(time_grid[g]);
        double const ly = std::log(out.msd_values[g]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2)
        throw std::invalid_argument("MSD time grid must span more than one decade");
    double const dn = static_cast<double>(n);
    out.fitted_exponent = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    out.fitted_log_prefactor = (sy - out.fitted_exponent * sx) / dn;
    return out;
}

void write_msd_csv(MsdEstimate const& estimate, std::ostream& out)
{
    out << "t,msd\n";
    for (std::size_t g = 0; g < estimate.time_grid.size(); ++g)
        out << format_double(estimate.time_grid[g]) << ',' << format_double(estimate.msd_values[g])
            << '\n';
}

}  // namespace levy
