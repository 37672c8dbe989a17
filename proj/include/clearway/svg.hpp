#pragma once

/**
 * @file
 * Deterministic SVG drawings of a mesh with optional roadmap, reachability and paths.
 * World y points up; the drawing negates y so the picture is not mirrored. Obstacle
 * segments are drawn whole, with their Steiner points marked on them.
 */

#include "clearway/channel.hpp"
#include "clearway/roadmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace clearway {

struct SvgOverlay {
    const RoadmapGraph* graph = nullptr;
    /// With a graph, triangles not reachable from `source` at `clearance` are filled.
    std::optional<TriangleId> source;
    double clearance = 0.0;
    std::vector<ClearancePath> paths;
};

namespace detail {

class SvgWriter {
public:
    void num(double v)
    {
        if(v == 0.0)
            v = 0.0;
        char buf[32];
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.append(buf, end);
    }
    void pt(Point p, char sep = ' ')
    {
        num(p.x);
        out += sep;
        num(-p.y);
    }
    void line(Point a, Point b, const char* cls = nullptr)
    {
        out += "<line";
        if(cls) {
            out += " class=\"";
            out += cls;
            out += '"';
        }
        out += " x1=\"";
        num(a.x);
        out += "\" y1=\"";
        num(-a.y);
        out += "\" x2=\"";
        num(b.x);
        out += "\" y2=\"";
        num(-b.y);
        out += "\"/>\n";
    }
    void circle(Point c, double r)
    {
        out += "<circle cx=\"";
        num(c.x);
        out += "\" cy=\"";
        num(-c.y);
        out += "\" r=\"";
        num(r);
        out += "\"/>\n";
    }

    std::string out;
};

} // namespace detail

inline std::string render_svg(const TriMesh& mesh, const SvgOverlay& overlay = {})
{
    detail::SvgWriter w;
    std::string& out = w.out;

    Point lo{0, 0}, hi{1, 1};
    if(mesh.vertex_count() > 0) {
        lo = hi = mesh.position(0);
        for(const Vertex& v : mesh.vertices()) {
            lo = {std::min(lo.x, v.position.x), std::min(lo.y, v.position.y)};
            hi = {std::max(hi.x, v.position.x), std::max(hi.y, v.position.y)};
        }
    }
    const double diag = std::max(std::hypot(hi.x - lo.x, hi.y - lo.y), 1e-9);
    const double margin = 0.02 * diag;
    const double dot = 0.004 * diag;

    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
    w.num(lo.x - margin);
    out += ' ';
    w.num(-hi.y - margin);
    out += ' ';
    w.num(hi.x - lo.x + 2 * margin);
    out += ' ';
    w.num(hi.y - lo.y + 2 * margin);
    out += "\">\n";
    out += "<style>\n"
           "line, path { vector-effect: non-scaling-stroke; fill: none; }\n"
           ".unconstrained line { stroke: #9aa5b1; stroke-width: 0.5; }\n"
           ".constrained line { stroke: #1f2933; stroke-width: 2; }\n"
           ".unreachable polygon { fill: #f5c6c6; stroke: none; }\n"
           ".roadmap line { stroke: #3e7cb1; stroke-width: 0.75; }\n"
           ".roadmap line.blocked { stroke: #d64545; stroke-dasharray: 2 2; }\n"
           ".vertices circle { fill: #1f2933; }\n"
           ".steiner circle { fill: #e8a33d; stroke: #1f2933; vector-effect: non-scaling-stroke; }\n"
           ".paths path { stroke: #2f8f46; stroke-width: 2; }\n"
           ".endpoints circle { fill: #2f8f46; }\n"
           "</style>\n";

    out += "<g class=\"unreachable\">\n";
    if(overlay.graph && overlay.source) {
        const std::vector<char> seen = reachable_from(*overlay.graph, *overlay.source, overlay.clearance);
        for(TriangleId t = 0; t < mesh.triangle_count(); ++t) {
            if(seen[t])
                continue;
            out += "<polygon points=\"";
            for(int i = 0; i < 3; ++i) {
                if(i)
                    out += ' ';
                w.pt(mesh.corner(t, i), ',');
            }
            out += "\"/>\n";
        }
    }
    out += "</g>\n<g class=\"unconstrained\">\n";
    for(TriangleId t = 0; t < mesh.triangle_count(); ++t) {
        const Triangle& tri = mesh.triangle(t);
        for(int i = 0; i < 3; ++i)
            if(!tri.constrained(i) && (tri.n[i] == kNoId || t < tri.n[i]))
                w.line(mesh.position(tri.v[ccw(i)]), mesh.position(tri.v[cw(i)]));
    }
    out += "</g>\n<g class=\"constrained\">\n";
    for(const MeshSegment& s : mesh.segments())
        w.line(mesh.position(s.a), mesh.position(s.b));
    out += "</g>\n<g class=\"roadmap\">\n";
    if(overlay.graph)
        for(const RoadmapEdge& e : overlay.graph->edges())
            w.line(overlay.graph->node(e.a).anchor, overlay.graph->node(e.b).anchor,
                   overlay.source && e.width < 2.0 * overlay.clearance ? "blocked" : nullptr);
    out += "</g>\n<g class=\"vertices\">\n";
    for(const Vertex& v : mesh.vertices())
        if(v.kind == VertexKind::Obstacle)
            w.circle(v.position, dot);
    out += "</g>\n<g class=\"steiner\">\n";
    for(const Vertex& v : mesh.vertices())
        if(v.kind == VertexKind::Steiner)
            w.circle(v.position, 1.5 * dot);
    out += "</g>\n<g class=\"paths\">\n";
    for(const ClearancePath& p : overlay.paths) {
        out += "<path d=\"M ";
        w.pt(p.start);
        for(const PathElement& e : p.elements) {
            if(const auto* s = std::get_if<PathSegment>(&e)) {
                out += " L ";
                w.pt(s->to);
                continue;
            }
            // Split so no piece needs the large-arc flag; y is negated, so CCW is sweep 0.
            const auto& a = std::get<PathArc>(e);
            const int pieces = a.sweep > std::numbers::pi / 2 ? 2 : 1;
            for(int k = 1; k <= pieces; ++k) {
                out += " A ";
                w.num(a.radius);
                out += ' ';
                w.num(a.radius);
                out += a.turn > 0 ? " 0 0 0 " : " 0 0 1 ";
                w.pt(a.point(double(k) / pieces));
            }
        }
        out += "\"/>\n";
    }
    out += "</g>\n<g class=\"endpoints\">\n";
    for(const ClearancePath& p : overlay.paths) {
        w.circle(p.start, 1.5 * dot);
        w.circle(p.end, 1.5 * dot);
    }
    out += "</g>\n</svg>\n";
    return out;
}

} // namespace clearway
