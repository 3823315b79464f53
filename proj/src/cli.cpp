#include "levy/cli.hpp"

#include <fstream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "levy/flight_sim.hpp"
#include "levy/optimizer.hpp"
#include "levy/sampler.hpp"
#include "levy/stable_density.hpp"
#include "levy/tail_stats.hpp"

namespace levy::cli {
namespace {

/// Parameter problem detected after flag parsing.
class UsageError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

constexpr char const* large_beta_caveat =
    "note: beta >= 2 is accepted, but the steps are not expected to be normally distributed";

void require_positive_beta(double beta)
{
    if (!(beta > 0))
        throw UsageError("--beta must be positive");
}

/// Destination of the data stream: `-` is the caller's stream.
class Sink
{
  public:
    Sink(std::string const& path, std::ostream& fallback) : path_(path)
    {
        if (path.empty() || path == "-")
        {
            stream_ = &fallback;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*file_)
            throw std::runtime_error("cannot open output file '" + path + "'");
        stream_ = file_.get();
    }

    std::ostream& stream() { return *stream_; }

    void finish()
    {
        stream_->flush();
        if (!*stream_)
            throw std::runtime_error("failed writing output '" + path_ + "'");
    }

  private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

std::vector<double> parse_x_grid(std::string const& text)
{
    std::vector<double> out;
    auto number = [&text](std::string const& field) {
        std::size_t used = 0;
        double v = 0;
        try
        {
            v = std::stod(field, &used);
        }
        catch (std::exception const&)
        {
            used = 0;
        }
        if (used == 0 || used != field.size())
            throw UsageError("malformed --x-grid '" + text + "'");
        return v;
    };

    if (text.find(':') != std::string::npos)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.size() != 3)
            throw UsageError("--x-grid range must look like start:stop:count");
        double const lo = number(parts[0]);
        double const hi = number(parts[1]);
        double const count = number(parts[2]);
        if (count < 1 || count != std::floor(count))
            throw UsageError("--x-grid count must be a positive integer");
        auto const n = static_cast<std::size_t>(count);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');)
        out.push_back(number(p));
    if (out.empty())
        throw UsageError("--x-grid is empty");
    return out;
}

//---------------------------------------------------------------------------//

struct SampleArgs
{
    double beta = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string out = "-";
};

void do_sample(SampleArgs const& a, std::ostream& out, std::ostream& err)
{
    require_positive_beta(a.beta);
    StepDistribution const dist{LevyIndex{a.beta}};
    if (a.beta >= 2)
        err << large_beta_caveat << '\n';

    UniformSource source(a.seed);
    Sink sink(a.out, out);
    auto& os = sink.stream();
    if (a.format == "json")
    {
        std::vector<double> steps(a.n);
        for (double& s : steps)
            s = dist.sample_step(source);
        os << nlohmann::json(steps).dump() << '\n';
    }
    else
    {
        os << "step_length\n";
        for (std::size_t i = 0; i < a.n; ++i)
            os << format_double(dist.sample_step(source)) << '\n';
    }
    sink.finish();
}

struct DensityArgs
{
    double beta = 0;
    double gamma = 1.0;
    std::string x_grid = "0:10:11";
    std::string method = "auto";
    std::string out = "-";
};

void do_density(DensityArgs const& a, std::ostream& out)
{
    if (!(a.beta > 0 && a.beta <= 2))
        throw UsageError("--beta must lie in ]0, 2] for the stable density; for beta >= 2 the "
                         "ordinary central limit theorem holds");
    if (!(a.gamma > 0))
        throw UsageError("--gamma must be positive");
    DensityMethod method{};
    try
    {
        method = parse_density_method(a.method);
    }
    catch (std::invalid_argument const& e)
    {
        throw UsageError(e.what());
    }
    auto const grid = parse_x_grid(a.x_grid);
    StableDensitySpec const spec{LevyIndex{a.beta}, a.gamma, method};

    std::vector<DensityValue> values;
    values.reserve(grid.size());
    for (double x : grid)
        values.push_back(density(spec, x));

    Sink sink(a.out, out);
    auto& os = sink.stream();
    os << "x,density,method_used\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << format_double(grid[i]) << ',' << format_double(values[i].value) << ','
           << to_string(values[i].method) << '\n';
    sink.finish();
}

struct WalkArgs
{
    double beta = 0;
    std::size_t steps = 0;
    std::size_t dim = 2;
    std::string mode = "flight";
    double speed = 1.0;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string out = "-";
};

TimeAccounting make_accounting(std::string const& mode, double speed)
{
    if (!(speed > 0))
        throw UsageError("--speed must be positive");
    return parse_time_mode(mode) == TimeMode::flight ? TimeAccounting::flight()
                                                     : TimeAccounting::walk(speed);
}

void do_walk(WalkArgs const& a, std::ostream& out, std::ostream& err)
{
    require_positive_beta(a.beta);
    if (a.steps < 1)
        throw UsageError("--steps must be at least 1");
    if (a.dim < 1)
        throw UsageError("--dim must be at least 1");
    if (a.beta >= 2)
        err << large_beta_caveat << '\n';
    auto const accounting = make_accounting(a.mode, a.speed);
    auto const trajectory = simulate_trajectory(LevyIndex{a.beta}, a.steps, a.dim, accounting, a.seed);

    Sink sink(a.out, out);
    write_trajectory(trajectory, parse_trajectory_format(a.format), sink.stream());
    sink.finish();
}

struct MsdArgs
{
    double beta = 0;
    std::size_t walkers = 0;
    std::string mode = "walk";
    double speed = 1.0;
    std::uint64_t seed = 0;
    std::size_t dim = 2;
    double t_min = 1.0;
    double t_max = 1000.0;
    std::size_t points = 31;
    std::size_t threads = 0;
    std::string out = "-";
};

void do_msd(MsdArgs const& a, std::ostream& out, std::ostream& err)
{
    require_positive_beta(a.beta);
    if (a.walkers < 100)
        throw UsageError("--walkers must be at least 100");
    if (a.dim < 1)
        throw UsageError("--dim must be at least 1");
    if (!(a.t_min > 0) || !(a.t_max >= 10 * a.t_min * 1.0000001) || a.points < 2)
        throw UsageError("--t-min/--t-max/--points must give a grid spanning more than a decade");

    auto const accounting = make_accounting(a.mode, a.speed);
    auto const grid = log_time_grid(a.t_min, a.t_max, a.points);
    MsdOptions options;
    options.dimension = a.dim;
    options.threads = a.threads;
    auto const estimate = ensemble_msd(LevyIndex{a.beta}, a.walkers, accounting, grid, a.seed, options);
    auto const regime = classify_regime(LevyIndex{a.beta});

    Sink sink(a.out, out);
    write_msd_csv(estimate, sink.stream());
    sink.finish();

    err << "fitted_exponent=" << format_double(estimate.fitted_exponent)
        << " regime=" << to_string(regime.regime) << " law=" << regime.msd_law
        << " asymptotic_exponent=" << format_double(regime.asymptotic_exponent)
        << " fit_from_t=" << format_double(estimate.fit_window_start) << '\n';
}

struct FitTailArgs
{
    double beta = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t k = 0;
    std::string out = "-";
};

void do_fit_tail(FitTailArgs const& a, std::ostream& out)
{
    require_positive_beta(a.beta);
    if (a.n < 2)
        throw UsageError("--n must be at least 2");
    StepDistribution const dist{LevyIndex{a.beta}};
    UniformSource source(a.seed);
    std::vector<double> samples(a.n);
    for (double& s : samples)
        s = dist.sample_step(source);

    std::size_t const k = a.k == 0 ? default_hill_k(a.n) : a.k;
    if (k >= a.n)
        throw UsageError("--k must be smaller than --n");
    auto const fit = hill_estimate(samples, k);

    Sink sink(a.out, out);
    sink.stream() << "beta,estimated_index,k,sample_size,standard_error\n"
                  << format_double(a.beta) << ',' << format_double(fit.estimated_index) << ','
                  << fit.k_order_statistics << ',' << fit.sample_size << ','
                  << format_double(fit.standard_error) << '\n';
    sink.finish();
}

struct OptimizeArgs
{
    std::string config;
    std::string out = "-";
};

struct RunConfig
{
    std::string objective = "rastrigin";
    std::size_t dimension = 2;
    double basin_width = 3.0;
    std::string policy = "levy";
    double beta = 1.0;
    double l_max = 0.1;
    double sigma = 0.1;
    std::size_t walkers = 10;
    std::size_t iterations = 1000;
    std::uint64_t seed = 0;
    std::string goal = "minimize";
};

RunConfig parse_run_config(std::string const& text)
{
    static std::set<std::string> const known = {"objective", "dimension", "basin_width", "policy",
                                                "beta",      "l_max",     "sigma",       "walkers",
                                                "iterations", "seed",     "goal"};
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(text);
    }
    catch (nlohmann::json::exception const& e)
    {
        throw UsageError(std::string("malformed run configuration: ") + e.what());
    }
    if (!doc.is_object())
        throw UsageError("run configuration must be a JSON object");
    for (auto const& item : doc.items())
    {
        if (!known.contains(item.key()))
            throw UsageError("unknown run configuration key '" + item.key() + "'");
        if (item.value().is_object() || item.value().is_array())
            throw UsageError("run configuration must be flat; key '" + item.key()
                             + "' holds a nested value");
    }
    if (!doc.contains("seed"))
        throw UsageError("run configuration requires a 'seed'");

    RunConfig c;
    try
    {
        auto get = [&doc](char const* key, auto& field) {
            if (doc.contains(key))
                field = doc.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("objective", c.objective);
        get("dimension", c.dimension);
        get("basin_width", c.basin_width);
        get("policy", c.policy);
        get("beta", c.beta);
        get("l_max", c.l_max);
        get("sigma", c.sigma);
        get("walkers", c.walkers);
        get("iterations", c.iterations);
        get("seed", c.seed);
        get("goal", c.goal);
    }
    catch (nlohmann::json::exception const& e)
    {
        throw UsageError(std::string("run configuration has a value of the wrong type: ") + e.what());
    }
    return c;
}

void do_optimize(OptimizeArgs const& a, std::ostream& out, std::ostream& err)
{
    std::ifstream in(a.config);
    if (!in)
        throw UsageError("cannot read run configuration '" + a.config + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto const c = parse_run_config(buffer.str());

    if (c.dimension < 1)
        throw UsageError("'dimension' must be at least 1");
    ObjectiveFunction objective;
    if (c.objective == "bowl")
        objective = quadratic_bowl(c.dimension);
    else if (c.objective == "rastrigin")
        objective = rastrigin(c.dimension);
    else if (c.objective == "double-well")
        objective = double_well(c.basin_width);
    else
        throw UsageError("unknown objective '" + c.objective + "' (bowl, rastrigin, double-well)");

    auto policy = [&c]() {
        if (c.policy == "levy")
        {
            require_positive_beta(c.beta);
            return StepPolicy::levy(c.beta);
        }
        if (c.policy == "uniform")
            return StepPolicy::uniform(c.l_max);
        if (c.policy == "gaussian")
            return StepPolicy::gaussian(c.sigma);
        throw UsageError("unknown policy '" + c.policy + "' (levy, uniform, gaussian)");
    }();

    RunOptions options;
    if (c.goal == "maximize")
        options.goal = Goal::maximize;
    else if (c.goal != "minimize")
        throw UsageError("'goal' must be minimize or maximize");
    if (c.walkers < 1 || c.iterations < 1)
        throw UsageError("'walkers' and 'iterations' must be at least 1");

    auto const result = levy::run(objective, policy, c.walkers, c.iterations, c.seed, options);

    Sink sink(a.out, out);
    write_iteration_log_csv(result.log, sink.stream());
    sink.finish();
    err << "objective=" << objective.name << " policy=" << policy.describe()
        << " best_value=" << format_double(result.state.best.value)
        << " found_at_iteration=" << result.state.best.iteration
        << " evaluations=" << result.state.evaluations << '\n';
}

struct EscapeArgs
{
    double l_max = 0;
    double basin_width = 0;
    double beta = 1.0;
    std::size_t budget = 0;
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    std::string out = "-";
};

void do_escape(EscapeArgs const& a, std::ostream& out)
{
    require_positive_beta(a.beta);
    if (!(a.l_max > 0))
        throw UsageError("--lmax must be positive");
    if (!(a.basin_width > 2 * a.l_max))
        throw UsageError("--basin-width must exceed 2 * --lmax");
    if (a.repeats < 1)
        throw UsageError("--repeats must be at least 1");
    auto const r = escape_experiment(a.l_max, a.basin_width, LevyIndex{a.beta}, a.budget,
                                     a.repeats, a.seed);
    Sink sink(a.out, out);
    sink.stream() << "policy,escape_frequency\n"
                  << "uniform(" << format_double(a.l_max) << ")," << format_double(r.uniform_frequency)
                  << '\n'
                  << "levy(" << format_double(a.beta) << ")," << format_double(r.levy_frequency)
                  << '\n';
    sink.finish();
}

void add_out(CLI::App* sub, std::string& target)
{
    sub->add_option("--out", target, "Output file ('-' for standard output)")->capture_default_str();
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Levy flight sampling, stable densities, walks and Levy-step optimization",
                 "levyflight"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    SampleArgs sample;
    auto* s = app.add_subcommand("sample", "Draw power-law step lengths P(l) = beta (1+l)^(-1-beta)");
    s->add_option("--beta", sample.beta, "Levy index beta (dimensionless, > 0)")->required();
    s->add_option("--n", sample.n, "Number of steps to draw (count)")->required();
    s->add_option("--seed", sample.seed, "Seed of the uniform source (64-bit integer)")->required();
    s->add_option("--format", sample.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    add_out(s, sample.out);

    DensityArgs dens;
    auto* d = app.add_subcommand("density", "Evaluate the symmetric Levy stable density L(x)");
    d->add_option("--beta", dens.beta, "Stable index beta (dimensionless, in ]0, 2])")->required();
    d->add_option("--gamma", dens.gamma, "Scale factor gamma (dimensionless, > 0)")->capture_default_str();
    d->add_option("--x-grid", dens.x_grid,
                  "Evaluation points x (dimensionless): start:stop:count or a comma list")
        ->capture_default_str();
    d->add_option("--method", dens.method, "Evaluation method")
        ->check(CLI::IsMember({"auto", "quadrature", "series", "closed_form"}))
        ->capture_default_str();
    add_out(d, dens.out);

    WalkArgs walk;
    auto* w = app.add_subcommand("walk", "Simulate one Levy flight or walk trajectory");
    w->add_option("--beta", walk.beta, "Levy index beta (dimensionless, > 0)")->required();
    w->add_option("--steps", walk.steps, "Number of straight sections (count, >= 1)")->required();
    w->add_option("--dim", walk.dim, "Space dimension (count, >= 1)")->capture_default_str();
    w->add_option("--mode", walk.mode, "Time accounting: flight (unit time per jump) or walk (time = length / speed)")
        ->check(CLI::IsMember({"flight", "walk"}))
        ->capture_default_str();
    w->add_option("--speed", walk.speed, "Walk speed v (length per time unit, walk mode)")->capture_default_str();
    w->add_option("--seed", walk.seed, "Seed of the uniform source (64-bit integer)")->required();
    w->add_option("--format", walk.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    add_out(w, walk.out);

    MsdArgs msd;
    auto* m = app.add_subcommand("msd", "Ensemble mean squared displacement and its growth exponent");
    m->add_option("--beta", msd.beta, "Levy index beta (dimensionless, > 0)")->required();
    m->add_option("--walkers", msd.walkers, "Ensemble size (count, >= 100)")->required();
    m->add_option("--mode", msd.mode, "Time accounting: flight or walk")
        ->check(CLI::IsMember({"flight", "walk"}))
        ->capture_default_str();
    m->add_option("--speed", msd.speed, "Walk speed v (length per time unit)")->capture_default_str();
    m->add_option("--seed", msd.seed, "Base seed; walker i uses a derived stream (64-bit integer)")->required();
    m->add_option("--dim", msd.dim, "Space dimension (count)")->capture_default_str();
    m->add_option("--t-min", msd.t_min, "First grid time (time units, > 0)")->capture_default_str();
    m->add_option("--t-max", msd.t_max, "Last grid time (time units)")->capture_default_str();
    m->add_option("--points", msd.points, "Number of log-spaced grid times (count)")->capture_default_str();
    m->add_option("--threads", msd.threads, "Worker threads, 0 = all cores (count; output is unaffected)")
        ->capture_default_str();
    add_out(m, msd.out);

    FitTailArgs tail;
    auto* t = app.add_subcommand("fit-tail", "Sample steps and estimate the tail index (Hill)");
    t->add_option("--beta", tail.beta, "Levy index beta used for sampling (dimensionless, > 0)")->required();
    t->add_option("--n", tail.n, "Number of samples (count)")->required();
    t->add_option("--seed", tail.seed, "Seed of the uniform source (64-bit integer)")->required();
    t->add_option("--k", tail.k, "Order statistics used, 0 = round(n^0.7) (count)")->capture_default_str();
    add_out(t, tail.out);

    OptimizeArgs opt;
    auto* o = app.add_subcommand(
        "optimize",
        "Run the greedy walker optimizer from a flat JSON configuration\n"
        "  keys: objective (bowl|rastrigin|double-well), dimension, basin_width,\n"
        "        policy (levy|uniform|gaussian), beta, l_max, sigma, walkers,\n"
        "        iterations, seed (required), goal (minimize|maximize)");
    o->add_option("--config", opt.config, "Path of the JSON run configuration")->required();
    add_out(o, opt.out);

    EscapeArgs esc;
    auto* e = app.add_subcommand("escape", "Escape frequency from a wide local well: uniform vs Levy steps");
    e->add_option("--lmax", esc.l_max, "Uniform step bound l_max (dimensionless length)")->required();
    e->add_option("--basin-width", esc.basin_width, "Width of the local well (dimensionless length, > 2 l_max)")
        ->required();
    e->add_option("--beta", esc.beta, "Levy index of the Levy policy (dimensionless, > 0)")->capture_default_str();
    e->add_option("--budget", esc.budget, "Moves per walker (count)")->required();
    e->add_option("--repeats", esc.repeats, "Independent walkers per policy (count)")->required();
    e->add_option("--seed", esc.seed, "Base seed (64-bit integer)")->required();
    add_out(e, esc.out);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (CLI::CallForHelp const&)
    {
        // Delegates to the selected subcommand's help.
        out << app.help();
        return success;
    }
    catch (CLI::CallForAllHelp const&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return success;
    }
    catch (CLI::ParseError const& ex)
    {
        err << "error: " << ex.what() << '\n';
        return usage;
    }

    try
    {
        if (s->parsed())
            do_sample(sample, out, err);
        else if (d->parsed())
            do_density(dens, out);
        else if (w->parsed())
            do_walk(walk, out, err);
        else if (m->parsed())
            do_msd(msd, out, err);
        else if (t->parsed())
            do_fit_tail(tail, out);
        else if (o->parsed())
            do_optimize(opt, out, err);
        else if (e->parsed())
            do_escape(esc, out);
    }
    catch (UsageError const& ex)
    {
        err << "error: " << ex.what() << '\n';
        return usage;
    }
    catch (std::exception const& ex)
    {
        err << "error: " << ex.what() << '\n';
        return failure;
    }
    return success;
}

}  // namespace levy::cli
