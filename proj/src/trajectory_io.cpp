#include <charconv>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "levy/flight_sim.hpp"

namespace levy {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        auto const pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double parse_number(std::string_view field)
{
    double value = 0;
    auto const [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::invalid_argument("malformed number '" + std::string(field) + "'");
    return value;
}

void write_csv(Trajectory const& t, std::ostream& out)
{
    out << "step,time";
    for (std::size_t c = 0; c < t.dimension; ++c)
        out << ",x_" << c;
    out << ",segment_length\n";

    auto const elapsed = t.elapsed_times();
    for (std::size_t i = 0; i < t.num_points(); ++i)
    {
        out << i << ',' << format_double(elapsed[i]);
        for (double x : t.point(i))
            out << ',' << format_double(x);
        out << ',' << format_double(i == 0 ? 0.0 : t.segment_lengths[i - 1]) << '\n';
    }
}

Trajectory parse_csv(std::string_view text)
{
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n'))
    {
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!line.empty())
            lines.push_back(line);
    }
    if (lines.size() < 2)
        throw std::invalid_argument("trajectory CSV needs a header and at least one row");

    auto const header = split(lines.front(), ',');
    if (header.size() < 4 || header[0] != "step" || header[1] != "time"
        || header.back() != "segment_length")
        throw std::invalid_argument("unexpected trajectory CSV header");

    Trajectory t;
    t.dimension = header.size() - 3;
    for (std::size_t c = 0; c < t.dimension; ++c)
    {
        if (header[2 + c] != "x_" + std::to_string(c))
            throw std::invalid_argument("unexpected trajectory CSV header");
    }

    std::vector<double> elapsed;
    for (std::size_t row = 1; row < lines.size(); ++row)
    {
        auto const fields = split(lines[row], ',');
        if (fields.size() != header.size())
            throw std::invalid_argument("trajectory CSV row " + std::to_string(row)
                                        + " has the wrong number of fields");
        if (fields[0] != std::to_string(row - 1))
            throw std::invalid_argument("trajectory CSV steps must be consecutive from 0");
        elapsed.push_back(parse_number(fields[1]));
        for (std::size_t c = 0; c < t.dimension; ++c)
            t.coordinates.push_back(parse_number(fields[2 + c]));
        if (row > 1)
            t.segment_lengths.push_back(parse_number(fields.back()));
    }
    for (std::size_t i = 1; i < elapsed.size(); ++i)
        t.segment_times.push_back(elapsed[i] - elapsed[i - 1]);
    return t;
}

void write_json(Trajectory const& t, std::ostream& out)
{
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < t.num_points(); ++i)
    {
        auto const p = t.point(i);
        points.push_back(std::vector<double>(p.begin(), p.end()));
    }
    nlohmann::json doc = {
        {"dimension", t.dimension},
        {"seed", t.seed},
        {"points", points},
        {"segment_lengths", t.segment_lengths},
        {"segment_times", t.segment_times},
    };
    out << doc.dump() << '\n';
}

Trajectory parse_json(std::string_view text)
{
    try
    {
        auto const doc = nlohmann::json::parse(text);
        Trajectory t;
        t.dimension = doc.at("dimension").get<std::size_t>();
        t.seed = doc.at("seed").get<std::uint64_t>();
        for (auto const& p : doc.at("points"))
        {
            auto const coords = p.get<std::vector<double>>();
            if (coords.size() != t.dimension)
                throw std::invalid_argument("trajectory point has the wrong dimension");
            t.coordinates.insert(t.coordinates.end(), coords.begin(), coords.end());
        }
        t.segment_lengths = doc.at("segment_lengths").get<std::vector<double>>();
        t.segment_times = doc.at("segment_times").get<std::vector<double>>();
        if (t.segment_lengths.size() + 1 != t.num_points()
            || t.segment_times.size() != t.segment_lengths.size())
            throw std::invalid_argument("trajectory JSON field lengths are inconsistent");
        return t;
    }
    catch (nlohmann::json::exception const& e)
    {
        throw std::invalid_argument(std::string("malformed trajectory JSON: ") + e.what());
    }
}

}  // namespace

std::string format_double(double value)
{
    char buf[32];
    auto const [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

TrajectoryFormat parse_trajectory_format(std::string_view name)
{
    if (name == "csv")
        return TrajectoryFormat::csv;
    if (name == "json")
        return TrajectoryFormat::json;
    throw std::invalid_argument("unknown format '" + std::string(name) + "' (expected csv or json)");
}

void write_trajectory(Trajectory const& trajectory, TrajectoryFormat format, std::ostream& out)
{
    if (format == TrajectoryFormat::csv)
        write_csv(trajectory, out);
    else
        write_json(trajectory, out);
    out.flush();
    if (!out)
        throw std::runtime_error("failed to write trajectory");
}

std::string export_trajectory(Trajectory const& trajectory, TrajectoryFormat format)
{
    std::ostringstream out;
    write_trajectory(trajectory, format, out);
    return out.str();
}

Trajectory parse_trajectory(std::string_view text, TrajectoryFormat format)
{
    return format == TrajectoryFormat::csv ? parse_csv(text) : parse_json(text);
}

}  // namespace levy
