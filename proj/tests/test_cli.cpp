#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "levy/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> const& args)
{
    std::ostringstream out, err;
    int const code = levy::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("levy_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::size_t lines(std::string const& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("help lists every flag of every subcommand")
{
    auto const top = invoke({"--help"});
    CHECK(top.code == 0);
    for (char const* sub : {"sample", "density", "walk", "msd", "fit-tail", "optimize", "escape"})
        CHECK(top.out.find(sub) != std::string::npos);

    std::vector<std::pair<std::string, std::vector<std::string>>> const flags = {
        {"sample", {"--beta", "--n", "--seed", "--format", "--out"}},
        {"density", {"--beta", "--gamma", "--x-grid", "--method", "--out"}},
        {"walk", {"--beta", "--steps", "--dim", "--mode", "--speed", "--seed", "--format", "--out"}},
        {"msd", {"--beta", "--walkers", "--mode", "--speed", "--seed", "--dim", "--t-min", "--t-max",
                 "--points", "--threads", "--out"}},
        {"fit-tail", {"--beta", "--n", "--seed", "--k", "--out"}},
        {"optimize", {"--config", "--out"}},
        {"escape", {"--lmax", "--basin-width", "--beta", "--budget", "--repeats", "--seed", "--out"}},
    };
    for (auto const& [sub, names] : flags)
    {
        auto const h = invoke({sub, "--help"});
        CAPTURE(sub);
        CHECK(h.code == 0);
        for (auto const& name : names)
        {
            CAPTURE(name);
            CHECK(h.out.find(name) != std::string::npos);
        }
    }
    // Defaults are shown.
    CHECK(invoke({"msd", "--help"}).out.find("1000") != std::string::npos);
}

TEST_CASE("usage errors")
{
    for (auto const& args : std::vector<std::vector<std::string>>{
             {},
             {"frobnicate"},
             {"sample", "--beta", "-1", "--n", "10", "--seed", "1"},
             {"sample", "--beta", "1", "--n", "10"},
             {"sample", "--beta", "1", "--n", "10", "--seed", "1", "--bogus", "3"},
             {"sample", "--beta", "1", "--n", "10", "--seed", "1", "--format", "xml"},
             {"density", "--beta", "2.5"},
             {"density", "--beta", "1", "--gamma", "0"},
             {"density", "--beta", "1", "--x-grid", "0:1"},
             {"density", "--beta", "1", "--method", "fft"},
             {"walk", "--beta", "1", "--steps", "0", "--seed", "1"},
             {"walk", "--beta", "1", "--steps", "5", "--seed", "1", "--mode", "run"},
             {"msd", "--beta", "1.5", "--walkers", "50", "--seed", "1"},
             {"fit-tail", "--beta", "1.5", "--n", "100", "--seed", "1", "--k", "100"},
             {"escape", "--lmax", "1", "--basin-width", "2", "--budget", "10", "--repeats", "5",
              "--seed", "1"},
         })
    {
        auto const r = invoke(args);
        CAPTURE(args.size());
        CHECK(r.code == 2);
        CHECK(r.err.rfind("error: ", 0) == 0);
        CHECK(lines(r.err) == 1);
    }
    auto const clt = invoke({"density", "--beta", "2.5"});
    CHECK(clt.err.find("central limit theorem") != std::string::npos);
}

TEST_CASE("sample")
{
    auto const r = invoke({"sample", "--beta", "1.0", "--n", "3", "--seed", "7"});
    CHECK(r.code == 0);
    CHECK(lines(r.out) == 4);
    CHECK(r.out.rfind("step_length\n", 0) == 0);
    CHECK(r.err.empty());

    auto const json = invoke({"sample", "--beta", "1.0", "--n", "3", "--seed", "7", "--format", "json"});
    auto const values = nlohmann::json::parse(json.out);
    REQUIRE(values.size() == 3);
    std::istringstream csv(r.out);
    std::string line;
    std::getline(csv, line);
    for (auto const& v : values)
    {
        std::getline(csv, line);
        CHECK(std::stod(line) == v.get<double>());
        CHECK(v.get<double>() > 0);
    }

    auto const caveat = invoke({"sample", "--beta", "2.5", "--n", "1", "--seed", "1"});
    CHECK(caveat.code == 0);
    CHECK(lines(caveat.out) == 2);
    CHECK(caveat.err.find("normally distributed") != std::string::npos);
}

TEST_CASE("density")
{
    auto const r = invoke({"density", "--beta", "1", "--x-grid", "0"});
    CHECK(r.code == 0);
    CHECK(r.out == "x,density,method_used\n0,0.3183098861837907,closed_form\n");

    auto const g = invoke({"density", "--beta", "2", "--x-grid", "0", "--method", "quadrature"});
    CHECK(g.out.find("0,0.28209479177") != std::string::npos);
    CHECK(g.out.find(",quadrature\n") != std::string::npos);

    auto const defaults = invoke({"density", "--beta", "1.5"});
    CHECK(lines(defaults.out) == 12);

    auto const list = invoke({"density", "--beta", "1.5", "--x-grid", "0.5,50"});
    CHECK(list.out.find("50,") != std::string::npos);
    CHECK(list.out.find(",series\n") != std::string::npos);
}

TEST_CASE("walk writes a trajectory file")
{
    TempDir dir;
    auto const file = dir.path / "walk.csv";
    auto const r = invoke({"walk", "--beta", "1.99", "--steps", "500", "--seed", "1", "--out", file.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    auto const text = slurp(file);
    CHECK(lines(text) == 502);
    CHECK(text.rfind("step,time,x_0,x_1,segment_length\n", 0) == 0);

    auto const unwritable = invoke({"walk", "--beta", "1", "--steps", "5", "--seed", "1", "--out",
                                    (dir.path / "missing" / "x.csv").string()});
    CHECK(unwritable.code == 1);
    CHECK(unwritable.err.rfind("error: ", 0) == 0);
}

TEST_CASE("stochastic subcommands are byte-reproducible")
{
    TempDir dir;
    fs::path const config = dir.path / "run.json";
    std::ofstream(config) << R"({"objective": "rastrigin", "dimension": 2, "policy": "levy", "beta": 1.0,
                                 "walkers": 5, "iterations": 200, "seed": 11})";

    std::vector<std::vector<std::string>> const commands = {
        {"sample", "--beta", "0.8", "--n", "1000", "--seed", "3"},
        {"sample", "--beta", "0.8", "--n", "100", "--seed", "3", "--format", "json"},
        {"walk", "--beta", "0.67", "--steps", "300", "--seed", "3", "--mode", "walk"},
        {"walk", "--beta", "1.5", "--steps", "300", "--seed", "3", "--dim", "3", "--format", "json"},
        {"msd", "--beta", "1.5", "--walkers", "200", "--seed", "3", "--t-max", "100", "--points", "11"},
        {"fit-tail", "--beta", "1.5", "--n", "10000", "--seed", "3"},
        {"optimize", "--config", config.string()},
        {"escape", "--lmax", "1", "--basin-width", "3", "--budget", "1000", "--repeats", "10", "--seed", "3"},
    };
    for (auto const& cmd : commands)
    {
        CAPTURE(cmd.front());
        auto with_out = [&](int run_index) {
            auto args = cmd;
            fs::path const file = dir.path / (cmd.front() + std::to_string(run_index) + ".out");
            args.push_back("--out");
            args.push_back(file.string());
            auto const r = invoke(args);
            REQUIRE(r.code == 0);
            return slurp(file);
        };
        auto const a = with_out(1);
        auto const b = with_out(2);
        CHECK_FALSE(a.empty());
        CHECK(a == b);
        CHECK(invoke(cmd).out == a);
    }
}

TEST_CASE("msd reports the fitted exponent")
{
    auto const r = invoke({"msd", "--beta", "1.5", "--walkers", "200", "--seed", "3", "--t-max", "100",
                           "--points", "11", "--threads", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("t,msd\n", 0) == 0);
    CHECK(lines(r.out) == 12);
    CHECK(r.err.find("fitted_exponent=") != std::string::npos);
    CHECK(r.err.find("regime=superdiffusion") != std::string::npos);

    auto const threaded = invoke({"msd", "--beta", "1.5", "--walkers", "200", "--seed", "3", "--t-max",
                                  "100", "--points", "11", "--threads", "3"});
    CHECK(threaded.out == r.out);
}

TEST_CASE("fit-tail")
{
    auto const r = invoke({"fit-tail", "--beta", "1.5", "--n", "100000", "--seed", "9", "--k", "1000"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("beta,estimated_index,k,sample_size,standard_error\n1.5,", 0) == 0);
    CHECK(r.out.find(",1000,100000,") != std::string::npos);
}

TEST_CASE("optimize")
{
    TempDir dir;
    auto write = [&](std::string const& text) {
        fs::path const p = dir.path / "c.json";
        std::ofstream(p) << text;
        return p.string();
    };

    auto const ok = invoke({"optimize", "--config",
                            write(R"({"objective":"bowl","dimension":3,"policy":"gaussian","sigma":0.3,
                                      "walkers":4,"iterations":50,"seed":2})")});
    CHECK(ok.code == 0);
    CHECK(ok.out.rfind("iteration,best_value,best_x_0,best_x_1,best_x_2\n0,", 0) == 0);
    CHECK(lines(ok.out) == 52);

    auto const well = invoke({"optimize", "--config",
                              write(R"({"objective":"double-well","basin_width":3,"policy":"uniform",
                                        "l_max":1,"walkers":2,"iterations":10,"seed":2})")});
    CHECK(well.code == 0);

    for (std::string const bad : {R"({"objective":"bowl","seed":1,"colour":"red"})",
                                  R"({"objective":"bowl"})",
                                  R"({"objective":"bowl","seed":1,"nested":{"a":1}})",
                                  R"({"objective":"sphere","seed":1})",
                                  R"({"objective":"bowl","seed":"one"})",
                                  R"([1,2])",
                                  R"({"objective":)"})
    {
        CAPTURE(bad);
        auto const r = invoke({"optimize", "--config", write(bad)});
        CHECK(r.code == 2);
        CHECK(lines(r.err) == 1);
    }
    CHECK(invoke({"optimize", "--config", (dir.path / "none.json").string()}).code == 2);
}

TEST_CASE("escape")
{
    auto const r = invoke({"escape", "--lmax", "1", "--basin-width", "3", "--beta", "1", "--budget",
                           "100000", "--repeats", "100", "--seed", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("policy,escape_frequency\nuniform(1),0\nlevy(1),", 0) == 0);
}
