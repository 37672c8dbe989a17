#pragma once

/**
 * @file
 * Line-oriented scenario files:
 *
 *     # comment
 *     p x y                 point
 *     s i j                 wall between points i and j (0-based)
 *     poly i j k ...        closed obstacle polygon
 *     boundary i j k ...    outer cycle of the region, exactly one
 *     q sx sy gx gy c       query from (sx,sy) to (gx,gy) with clearance c
 *
 * Blank lines and trailing comments are ignored.
 */

#include "clearway/error.hpp"
#include "clearway/obstacles.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace clearway {

struct Query {
    Point start;
    Point goal;
    double clearance = 0.0;
    int line = 0;

    friend bool operator==(const Query& l, const Query& r)
    {
        return l.start == r.start && l.goal == r.goal && l.clearance == r.clearance;
    }
};

struct Scenario {
    ObstacleSet obstacles;
    std::vector<Query> queries;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_words(std::string_view line)
{
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while(i < line.size()) {
        while(i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        const std::size_t start = i;
        while(i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
            ++i;
        if(i > start)
            words.push_back(line.substr(start, i - start));
    }
    return words;
}

inline double parse_number(std::string_view word, int line)
{
    double value = 0.0;
    const char* first = word.data();
    if(!word.empty() && word.front() == '+')
        ++first;
    const auto [end, ec] = std::from_chars(first, word.data() + word.size(), value);
    if(ec != std::errc() || end != word.data() + word.size() || !std::isfinite(value))
        throw InputError("expected a finite number, got '" + std::string(word) + "'", line);
    return value;
}

inline std::size_t parse_index(std::string_view word, int line)
{
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
    if(ec != std::errc() || end != word.data() + word.size())
        throw InputError("expected a point index, got '" + std::string(word) + "'", line);
    return value;
}

inline void append_number(std::string& out, double v)
{
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

} // namespace detail

/// Parses and validates a scenario. Errors carry the 1-based line they refer to.
inline Scenario parse_scenario(std::string_view text)
{
    Scenario sc;
    ObstacleSet& obs = sc.obstacles;
    int line_no = 0;
    while(!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if(const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const auto words = detail::split_words(line);
        if(words.empty())
            continue;
        const std::string_view key = words[0];
        const std::size_t args = words.size() - 1;
        auto arity = [&](std::size_t n) {
            if(args != n)
                throw InputError("'" + std::string(key) + "' takes " + std::to_string(n) + " values, got "
                                     + std::to_string(args),
                                 line_no);
        };
        auto cycle = [&] {
            std::vector<std::size_t> out;
            for(std::size_t k = 1; k < words.size(); ++k)
                out.push_back(detail::parse_index(words[k], line_no));
            return out;
        };
        if(key == "p") {
            arity(2);
            obs.points.push_back({detail::parse_number(words[1], line_no), detail::parse_number(words[2], line_no)});
            obs.point_lines.push_back(line_no);
        } else if(key == "s") {
            arity(2);
            obs.segments.push_back({detail::parse_index(words[1], line_no), detail::parse_index(words[2], line_no)});
            obs.segment_lines.push_back(line_no);
        } else if(key == "poly") {
            obs.polygons.push_back(cycle());
            obs.polygon_lines.push_back(line_no);
        } else if(key == "boundary") {
            if(obs.boundary_line > 0)
                throw InputError("second boundary; the first is on line " + std::to_string(obs.boundary_line), line_no);
            obs.boundary = cycle();
            obs.boundary_line = line_no;
        } else if(key == "q") {
            arity(5);
            Query q;
            q.start = {detail::parse_number(words[1], line_no), detail::parse_number(words[2], line_no)};
            q.goal = {detail::parse_number(words[3], line_no), detail::parse_number(words[4], line_no)};
            q.clearance = detail::parse_number(words[5], line_no);
            q.line = line_no;
            if(q.clearance < 0.0)
                throw InputError("clearance must not be negative", line_no);
            sc.queries.push_back(q);
        } else {
            throw InputError("unknown record '" + std::string(key) + "'", line_no);
        }
    }
    validate(obs);
    for(const Query& q : sc.queries)
        for(Point p : {q.start, q.goal})
            if(!inside_cycle(p, obs.points, obs.boundary))
                throw InputError("query endpoint lies outside the boundary", q.line);
    return sc;
}

inline Scenario read_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if(!in)
        throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

/// Writes a scenario in the format parse_scenario reads, with shortest round-trip numbers.
inline std::string format_scenario(const Scenario& sc)
{
    const ObstacleSet& obs = sc.obstacles;
    std::string out;
    for(Point p : obs.points) {
        out += "p ";
        detail::append_number(out, p.x);
        out += ' ';
        detail::append_number(out, p.y);
        out += '\n';
    }
    for(const IndexSegment& s : obs.segments)
        out += "s " + std::to_string(s.a) + ' ' + std::to_string(s.b) + '\n';
    auto cycle = [&](const char* key, const std::vector<std::size_t>& cyc) {
        out += key;
        for(std::size_t i : cyc)
            out += ' ' + std::to_string(i);
        out += '\n';
    };
    for(const auto& poly : obs.polygons)
        cycle("poly", poly);
    if(!obs.boundary.empty())
        cycle("boundary", obs.boundary);
    for(const Query& q : sc.queries) {
        out += 'q';
        for(double v : {q.start.x, q.start.y, q.goal.x, q.goal.y, q.clearance}) {
            out += ' ';
            detail::append_number(out, v);
        }
        out += '\n';
    }
    return out;
}

} // namespace clearway
