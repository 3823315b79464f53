#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "levy/optimizer.hpp"

using namespace levy;

namespace {

struct ConstantSource
{
    double value;
    double next() { return value; }
};

ObjectiveFunction scripted(std::vector<double> values, std::size_t* calls)
{
    ObjectiveFunction f;
    f.name = "scripted";
    f.dimension = 1;
    f.evaluate = [values = std::move(values), calls](std::span<double const>) {
        return values[(*calls)++ % values.size()];
    };
    return f;
}

double distance(std::span<double const> a, std::span<double const> b)
{
    double d2 = 0;
    for (std::size_t c = 0; c < a.size(); ++c)
        d2 += (a[c] - b[c]) * (a[c] - b[c]);
    return std::sqrt(d2);
}

}  // namespace

TEST_CASE("policy construction")
{
    CHECK_THROWS_AS(StepPolicy::levy(0.0), std::domain_error);
    CHECK_THROWS_AS(StepPolicy::uniform(0.0), std::invalid_argument);
    CHECK_THROWS_AS(StepPolicy::gaussian(-1.0), std::invalid_argument);
    CHECK(StepPolicy::levy(1.5).describe() == "levy(1.5)");
    CHECK(StepPolicy::uniform(2).describe() == "uniform(2)");
    CHECK(StepPolicy::gaussian(0.25).describe() == "gaussian(0.25)");
}

TEST_CASE("box reflection")
{
    Box const box{{0.0, -1.0}, {1.0, 1.0}};
    std::vector<double> x = {1.25, -1.5};
    reflect_into_box(x, box);
    CHECK(x[0] == doctest::Approx(0.75));
    CHECK(x[1] == doctest::Approx(-0.5));

    x = {-0.25, 4.5};
    reflect_into_box(x, box);
    CHECK(x[0] == doctest::Approx(0.25));
    CHECK(x[1] == doctest::Approx(0.5));

    x = {2.5, 0.3};
    reflect_into_box(x, box);
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(x[1] == 0.3);

    x = {std::numeric_limits<double>::infinity(), 1e300};
    reflect_into_box(x, box);
    CHECK(box.contains(x));
}

TEST_CASE("proposals")
{
    std::vector<double> const origin = {0.5, -2.0};

    SUBCASE("levy step with xi = 1 stays put")
    {
        ConstantSource ones{1.0};
        auto const p = propose_step(origin, StepPolicy::levy(1.3), ones);
        CHECK(p[0] == doctest::Approx(origin[0]).epsilon(1e-15));
        CHECK(p[1] == doctest::Approx(origin[1]).epsilon(1e-15));
    }
    SUBCASE("uniform steps stay within l_max")
    {
        UniformSource source(2);
        auto const policy = StepPolicy::uniform(0.7);
        for (int i = 0; i < 10000; ++i)
            REQUIRE(distance(propose_step(origin, policy, source), origin) <= 0.7 + 1e-12);
    }
    SUBCASE("bounded proposals are reflected into the box")
    {
        UniformSource source(2);
        Box const box{{0.0, -3.0}, {1.0, 0.0}};
        for (int i = 0; i < 10000; ++i)
            REQUIRE(box.contains(propose_step(origin, StepPolicy::levy(0.8), source, &box)));
    }
    SUBCASE("gaussian step lengths")
    {
        UniformSource source(5);
        auto const policy = StepPolicy::gaussian(2.0);
        double sum2 = 0;
        int const n = 100000;
        for (int i = 0; i < n; ++i)
            sum2 += std::pow(policy.draw_length(source), 2);
        CHECK(sum2 / n == doctest::Approx(4.0).epsilon(0.02));
    }
}

TEST_CASE("long levy steps in one dimension")
{
    UniformSource source(13);
    auto const policy = StepPolicy::levy(1.0);
    std::vector<double> const origin = {0.0};
    int const n = 100000;
    int far = 0;
    for (int i = 0; i < n; ++i)
        far += std::abs(propose_step(origin, policy, source)[0]) > 10.0;
    double const expected = 1.0 / 11.0;
    double const fraction = static_cast<double>(far) / n;
    CHECK(fraction > 0.7 * expected);
    CHECK(fraction < 1.3 * expected);
}

TEST_CASE("greedy acceptance")
{
    UniformSource source(1);
    std::size_t calls = 0;

    SUBCASE("worse proposal is rejected")
    {
        auto const f = scripted({5.0}, &calls);
        Walker w{{0.25}, 1.0, false, {}};
        std::size_t evals = 0;
        CHECK_FALSE(step_walker(w, StepPolicy::levy(1.0), f, source, Goal::minimize, &evals));
        CHECK(w.position[0] == 0.25);
        CHECK(w.value == 1.0);
        CHECK(evals == 1);
        CHECK(calls == 1);
    }
    SUBCASE("equal value is rejected")
    {
        auto const f = scripted({1.0}, &calls);
        Walker w{{0.25}, 1.0, false, {}};
        CHECK_FALSE(step_walker(w, StepPolicy::levy(1.0), f, source));
        CHECK(w.position[0] == 0.25);
    }
    SUBCASE("better proposal is accepted")
    {
        auto const f = scripted({-3.0}, &calls);
        Walker w{{0.25}, 1.0, false, {}};
        UniformSource replay(1);
        auto const expected = propose_step(w.position, StepPolicy::levy(1.0), replay);
        CHECK(step_walker(w, StepPolicy::levy(1.0), f, source));
        CHECK(w.position == expected);
        CHECK(w.value == -3.0);
    }
    SUBCASE("maximization flips the comparison")
    {
        auto const f = scripted({5.0}, &calls);
        Walker w{{0.25}, 1.0, false, {}};
        CHECK(step_walker(w, StepPolicy::levy(1.0), f, source, Goal::maximize));
        CHECK(w.value == 5.0);
    }
    SUBCASE("non-finite value quarantines the walker")
    {
        auto const f = scripted({std::nan(""), -10.0}, &calls);
        Walker w{{0.25}, 1.0, false, {}};
        CHECK_FALSE(step_walker(w, StepPolicy::levy(1.0), f, source));
        CHECK(w.quarantined);
        CHECK_FALSE(w.diagnostic.empty());
        CHECK(w.position[0] == 0.25);
        CHECK_FALSE(step_walker(w, StepPolicy::levy(1.0), f, source));
        CHECK(calls == 1);
    }
}

TEST_CASE("descent on the quadratic bowl")
{
    auto const f = quadratic_bowl(2);
    auto const result = run(f, StepPolicy::levy(1.5), 1, 1000, 7, RunOptions{Goal::minimize, {3.0, -4.0}});
    CHECK(result.state.walkers[0].value < result.log.front().best_value);
    CHECK(result.state.best.value < 1e-2);
}

TEST_CASE("run bookkeeping")
{
    auto const f = rastrigin(3);
    for (auto const& policy : {StepPolicy::levy(1.0), StepPolicy::uniform(0.3), StepPolicy::gaussian(0.2)})
    {
        for (std::uint64_t seed : {1u, 2u})
        {
            auto const r = run(f, policy, 7, 200, seed);
            CHECK(r.log.size() == 201);
            CHECK(r.state.iteration == 200);
            CHECK(r.state.evaluations == 7 * 200 + 7);
            for (std::size_t i = 1; i < r.log.size(); ++i)
                REQUIRE(r.log[i].best_value <= r.log[i - 1].best_value);
            double current_min = INFINITY;
            for (auto const& w : r.state.walkers)
            {
                REQUIRE(f.bounds->contains(w.position));
                current_min = std::min(current_min, w.value);
            }
            CHECK(r.state.best.value <= current_min);
            CHECK(r.state.best.value == r.log.back().best_value);
        }
    }
}

TEST_CASE("runs are reproducible")
{
    auto const f = rastrigin(2);
    auto const a = run(f, StepPolicy::levy(0.8), 5, 300, 99);
    auto const b = run(f, StepPolicy::levy(0.8), 5, 300, 99);
    std::ostringstream la, lb;
    write_iteration_log_csv(a.log, la);
    write_iteration_log_csv(b.log, lb);
    CHECK(la.str() == lb.str());
    CHECK(la.str().rfind("iteration,best_value,best_x_0,best_x_1\n0,", 0) == 0);
}

TEST_CASE("rejecting every proposal keeps the initial best")
{
    ObjectiveFunction flat;
    flat.name = "flat";
    flat.dimension = 2;
    flat.evaluate = [](std::span<double const>) { return 1.0; };
    auto const r = run(flat, StepPolicy::levy(1.0), 4, 50, 3);
    CHECK(r.state.best.iteration == 0);
    CHECK(r.state.best.position == r.log.front().best_position);
}

TEST_CASE("maximization")
{
    ObjectiveFunction hill;
    hill.name = "hill";
    hill.dimension = 1;
    hill.evaluate = [](std::span<double const> x) { return -std::pow(x[0] - 2.0, 2); };
    auto const r = run(hill, StepPolicy::gaussian(0.5), 3, 500, 4, RunOptions{Goal::maximize, {}});
    CHECK(r.state.best.value > -1e-3);
    for (std::size_t i = 1; i < r.log.size(); ++i)
        REQUIRE(r.log[i].best_value >= r.log[i - 1].best_value);
}

TEST_CASE("run guards")
{
    auto const f = quadratic_bowl(2);
    CHECK_THROWS_AS(run(f, StepPolicy::levy(1.0), 0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(run(f, StepPolicy::levy(1.0), 1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(run(f, StepPolicy::levy(1.0), 1, 10, 1, RunOptions{Goal::minimize, {1.0}}),
                    std::invalid_argument);
    ObjectiveFunction nan;
    nan.dimension = 1;
    nan.evaluate = [](std::span<double const>) { return std::nan(""); };
    CHECK_THROWS_AS(run(nan, StepPolicy::levy(1.0), 2, 10, 1), std::runtime_error);
}

TEST_CASE("uniform accepted displacements never exceed l_max")
{
    auto const f = rastrigin(2);
    auto const policy = StepPolicy::uniform(0.4);
    std::vector<Walker> walkers;
    UniformSource source(17);
    for (int w = 0; w < 20; ++w)
    {
        Walker walker{{-5.0 + 0.5 * w, 4.0 - 0.4 * w}, 0.0, false, {}};
        walker.value = f.evaluate(walker.position);
        for (int it = 0; it < 500; ++it)
        {
            auto const before = walker.position;
            if (step_walker(walker, policy, f, source))
                REQUIRE(distance(before, walker.position) <= 0.4 + 1e-12);
        }
    }
}

TEST_CASE("levy beats small uniform steps on Rastrigin")
{
    auto const f = rastrigin(2);
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        auto const levy = run(f, StepPolicy::levy(1.0), 10, 1000, seed);
        auto const uniform = run(f, StepPolicy::uniform(0.1), 10, 1000, seed);
        CAPTURE(seed);
        CHECK(levy.state.evaluations == uniform.state.evaluations);
        CHECK(levy.state.best.value < uniform.state.best.value);
    }
}

TEST_CASE("double well")
{
    auto const f = double_well(3.0);
    auto at = [&f](double x) { return f.evaluate(std::vector<double>{x}); };
    CHECK(at(0.0) == 0.0);
    CHECK(at(1.4) > 0.0);
    CHECK(at(1.5) == -1.0);
    CHECK(at(3.0) == -2.0);
    CHECK(at(-3.0) == -2.0);
    CHECK(f.known_optimum->value == -2.0);
    CHECK_THROWS_AS(double_well(0.0), std::invalid_argument);
}

TEST_CASE("greedy trap in the local well")
{
    // Every start more than l_max inside the rim can only improve by moving
    // toward the origin, so uniform(l_max) walkers never leave the well. A
    // uniform step can be exactly l_max long, hence the strict margin.
    double const width = 3.0;
    double const l_max = 1.0;
    double const h = width / 2;
    auto const f = double_well(width);
    auto at = [&f](double x) { return f.evaluate(std::vector<double>{x}); };

    double const inner = 0.999 * (h - l_max);
    int const n = 600;
    for (int i = 0; i <= n; ++i)
    {
        double const x = -inner + 2 * inner * i / n;
        for (int j = 0; j <= n; ++j)
        {
            double const y = x - l_max + 2 * l_max * j / n;
            if (at(y) < at(x))
                REQUIRE(std::abs(y) < std::abs(x));
        }
    }

    auto const policy = StepPolicy::uniform(l_max);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        UniformSource source(seed);
        double const start = -inner + 2 * inner * static_cast<double>(seed) / 19.0;
        Walker w{{start}, at(start), false, {}};
        for (int step = 0; step < 5000; ++step)
        {
            step_walker(w, policy, f, source);
            REQUIRE(std::abs(w.position[0]) <= std::abs(start));
        }
    }
}

TEST_CASE("escape experiment")
{
    auto const r = escape_experiment(1.0, 3.0, LevyIndex{1.0}, 100000, 100, 5);
    CHECK(r.uniform_frequency == 0.0);
    CHECK(r.levy_frequency > 0.5);
    CHECK(r.repeats == 100);

    auto const none = escape_experiment(1.0, 3.0, LevyIndex{1.0}, 0, 10, 5);
    CHECK(none.uniform_frequency == 0.0);
    CHECK(none.levy_frequency == 0.0);

    CHECK_THROWS_AS(escape_experiment(1.0, 2.0, LevyIndex{1.0}, 10, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(escape_experiment(1.0, 3.0, LevyIndex{1.0}, 10, 0, 5), std::invalid_argument);
}

TEST_CASE("tracking a static optimum")
{
    for (auto const& policy : {StepPolicy::levy(0.67), StepPolicy::uniform(1.0), StepPolicy::gaussian(0.3)})
    {
        auto const r = tracking_experiment(0.0, policy, 500, 3);
        for (double e : r.errors)
            REQUIRE(e == 0.0);
    }
}

TEST_CASE("tracking a drifting optimum")
{
    double const sigma = 0.5;
    auto const gauss = tracking_experiment(0.01, StepPolicy::gaussian(sigma), 5000, 1);
    auto const levy = tracking_experiment(0.01, StepPolicy::levy(0.67), 5000, 1);
    REQUIRE(gauss.errors.size() == 5000);
    // Measured 0.127 with this seed.
    CHECK(gauss.late_window_mean() < 0.25);
    MESSAGE("late-window tracking error: gaussian(0.5) " << gauss.late_window_mean()
                                                         << ", levy(0.67) " << levy.late_window_mean());
    CHECK_THROWS_AS(gauss.late_window_mean(0.0), std::invalid_argument);
    CHECK_THROWS_AS(tracking_experiment(-1.0, StepPolicy::levy(1.0), 10, 1), std::invalid_argument);
}
