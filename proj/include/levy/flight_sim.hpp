#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "levy/sampler.hpp"

namespace levy {

enum class TimeMode
{
    flight,  //!< every jump lasts one time unit
    walk,    //!< jumps are traversed at constant speed
};

class TimeAccounting
{
  public:
    static TimeAccounting flight() { return TimeAccounting{TimeMode::flight, 1.0}; }
    static TimeAccounting walk(double speed);

    TimeMode mode() const noexcept { return mode_; }
    double speed() const noexcept { return speed_; }

    double duration(double length) const noexcept
    {
        return mode_ == TimeMode::flight ? 1.0 : length / speed_;
    }

  private:
    TimeAccounting(TimeMode mode, double speed) : mode_(mode), speed_(speed) {}

    TimeMode mode_;
    double speed_;
};

TimeMode parse_time_mode(std::string_view name);

/*!
 * Piecewise-linear path starting at the origin.
 *
 * Coordinates are stored row-major, one row of `dimension` values per point.
 * There is one more point than segments.
 */
struct Trajectory
{
    std::size_t dimension = 0;
    std::vector<double> coordinates;
    std::vector<double> segment_lengths;
    std::vector<double> segment_times;
    std::uint64_t seed = 0;

    std::size_t num_points() const noexcept
    {
        return dimension == 0 ? 0 : coordinates.size() / dimension;
    }
    std::size_t num_segments() const noexcept { return segment_lengths.size(); }

    std::span<double const> point(std::size_t i) const
    {
        return {coordinates.data() + i * dimension, dimension};
    }

    /// Clock reading at each point, accumulated left to right.
    std::vector<double> elapsed_times() const;

    friend bool operator==(Trajectory const&, Trajectory const&) = default;
};

/*!
 * Levy flight or walk with `n_steps` straight sections.
 *
 * Each step draws its length from the power-law step distribution and then
 * its direction (see unit_direction), both from one UniformSource seeded
 * with `seed`. The same seed therefore replays the same uniform sequence for
 * every beta.
 */
Trajectory simulate_trajectory(LevyIndex beta,
                               std::size_t n_steps,
                               std::size_t dimension,
                               TimeAccounting accounting,
                               std::uint64_t seed);

/// Length of the diagonal of the axis-aligned bounding box.
double bounding_box_diagonal(Trajectory const& trajectory);

//---------------------------------------------------------------------------//
// Mean squared displacement
//---------------------------------------------------------------------------//

enum class DiffusionRegime
{
    ballistic_tunneling,  //!< 0 < beta < 1, <R^2> ~ t^2
    marginal_beta_1,      //!< beta = 1, <R^2> ~ t^2 / ln t
    superdiffusion,       //!< 1 < beta < 2, <R^2> ~ t^(3 - beta)
    marginal_beta_2,      //!< beta = 2, <R^2> ~ t ln t
    normal_diffusion,     //!< beta > 2, <R^2> ~ t
};

std::string_view to_string(DiffusionRegime regime);

struct RegimeClass
{
    DiffusionRegime regime;
    std::string msd_law;          //!< e.g. "t^(3-beta)"
    std::string moments;          //!< which moments of the step law exist
    std::string physical_effect;  //!< label of the moment/effect table row
    double asymptotic_exponent;   //!< power of t, ignoring log corrections
    bool logarithmic_correction;
};

/// Regime of a walk with power-law steps of index beta.
RegimeClass classify_regime(LevyIndex beta);

struct MsdEstimate
{
    std::vector<double> time_grid;
    std::vector<double> msd_values;
    double fitted_exponent = 0;
    double fitted_log_prefactor = 0;  //!< ln D in <R^2> = D t^nu
    double fit_window_start = 0;
    std::size_t ensemble_size = 0;
    DiffusionRegime regime = DiffusionRegime::normal_diffusion;
};

struct MsdOptions
{
    std::size_t dimension = 2;
    /// Worker threads; 0 picks the hardware concurrency. Output does not
    /// depend on this.
    std::size_t threads = 0;
};

/// `count` logarithmically spaced times from t_min to t_max inclusive.
std::vector<double> log_time_grid(double t_min, double t_max, std::size_t count);

/*!
 * Ensemble average of R^2(t) over independent walkers.
 *
 * Walker i uses the seed derive_seed(seed, i). A walker that is mid-jump at a
 * grid time is placed on the straight segment by linear interpolation. The
 * exponent is a least-squares fit of ln<R^2> against ln t over grid times of
 * at least ten times the first grid time.
 */
MsdEstimate ensemble_msd(LevyIndex beta,
                         std::size_t n_walkers,
                         TimeAccounting accounting,
                         std::vector<double> const& time_grid,
                         std::uint64_t seed,
                         MsdOptions const& options = {});

/// `t,msd` CSV with header.
void write_msd_csv(MsdEstimate const& estimate, std::ostream& out);

//---------------------------------------------------------------------------//
// Trajectory files
//---------------------------------------------------------------------------//

enum class TrajectoryFormat
{
    csv,
    json,
};

TrajectoryFormat parse_trajectory_format(std::string_view name);

/*!
 * CSV: header `step,time,x_0,...,x_{d-1},segment_length`, one row per point.
 * `time` is the elapsed time and `segment_length` belongs to the segment that
 * ends at the row's point (0 on the first row). The seed is not part of the
 * CSV form. JSON carries every field of Trajectory.
 *
 * Numbers are written in shortest round-trip form.
 */
void write_trajectory(Trajectory const& trajectory, TrajectoryFormat format, std::ostream& out);
std::string export_trajectory(Trajectory const& trajectory, TrajectoryFormat format);
Trajectory parse_trajectory(std::string_view text, TrajectoryFormat format);

/// Shortest decimal string that reads back as the same double.
std::string format_double(double value);

}  // namespace levy
