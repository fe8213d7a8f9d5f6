#include "pinto/refine.hpp"

#include "pinto/format.hpp"
#include "pinto/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace pinto {

BottomMethod parse_bottom_method(std::string_view name)
{
    if (name == "linear") return BottomMethod::linear;
    if (name == "nearest") return BottomMethod::nearest;
    throw Error("unknown bottom interpolation method '" + std::string(name) + "'");
}

LonLat edge_midpoint(LonLat a, LonLat b, Geometry geometry)
{
    if (geometry == Geometry::spherical) return great_circle_midpoint(a, b);
    if (b.lon - a.lon > 180.0) b.lon -= 360.0;
    if (a.lon - b.lon > 180.0) a.lon -= 360.0;
    return {normalize_lon(0.5 * (a.lon + b.lon)), 0.5 * (a.lat + b.lat)};
}

std::vector<double> interpolate_bottom(const LayeredMesh& coarse, const RefinementMap& map,
                                       std::span<const LonLat> midpoints, BottomMethod method)
{
    std::vector<double> out(map.midpoint_edges.size());
    const auto& bottom = coarse.bottom();
    for (std::size_t m = 0; m < map.midpoint_edges.size(); ++m) {
        const auto [a, b] = map.midpoint_edges[m];
        if (method == BottomMethod::linear) {
            out[m] = 0.5 * (bottom[a] + bottom[b]);
            continue;
        }
        const double da = great_circle_distance(midpoints[m], coarse.nodes()[a].pos);
        const double db = great_circle_distance(midpoints[m], coarse.nodes()[b].pos);
        const double tol = 1e-9 * std::max(da, db);
        // a < b by construction, so a tie resolves to a
        out[m] = (db < da - tol) ? bottom[b] : bottom[a];
    }
    return out;
}

Refinement refine_congruent(const LayeredMesh& coarse, BottomMethod method)
{
    const auto& table = coarse.edges();
    const int nc = coarse.node_count();
    const int ne = static_cast<int>(table.edges.size());
    const int tc = coarse.element_count();

    RefinementMap map;
    map.shared_nodes.resize(nc);
    for (int i = 0; i < nc; ++i) map.shared_nodes[i] = i;
    map.midpoint_edges = table.edges;
    map.edge_midpoint_nodes.resize(ne);

    std::vector<SurfaceNode> nodes = coarse.nodes();
    nodes.reserve(static_cast<std::size_t>(nc) + ne);
    std::vector<LonLat> midpoints(ne);
    for (int e = 0; e < ne; ++e) {
        const auto [a, b] = table.edges[e];
        midpoints[e] = edge_midpoint(coarse.nodes()[a].pos, coarse.nodes()[b].pos, coarse.geometry());
        map.edge_midpoint_nodes[e] = nc + e;
        nodes.push_back({midpoints[e], table.is_boundary(e) ? 1 : 0});
    }

    std::vector<SurfaceElement> elements(static_cast<std::size_t>(tc) * 4);
    map.children.resize(tc);
    map.parent.resize(static_cast<std::size_t>(tc) * 4);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < tc; ++t) {
        const auto& v = coarse.elements()[t].nodes;
        const auto& le = table.element_edges[t];
        const int m12 = nc + le[0], m23 = nc + le[1], m13 = nc + le[2];
        const int base = 4 * t;
        elements[base + 0] = {{v[0], m12, m13}};
        elements[base + 1] = {{m12, v[1], m23}};
        elements[base + 2] = {{m12, m23, m13}};
        elements[base + 3] = {{m13, m23, v[2]}};
        map.children[t] = {base, base + 1, base + 2, base + 3};
        for (int c = 0; c < 4; ++c) map.parent[base + c] = t;
    }

    std::vector<double> bottom = coarse.bottom();
    const auto mid_bottom = interpolate_bottom(coarse, map, midpoints, method);
    bottom.insert(bottom.end(), mid_bottom.begin(), mid_bottom.end());

    LayeredMesh fine(std::move(nodes), std::move(elements), coarse.axis(), std::move(bottom), coarse.geometry());
    return {std::move(fine), std::move(map)};
}

void write_refmap(std::ostream& out, const RefinementMap& map)
{
    for (std::size_t i = 0; i < map.shared_nodes.size(); ++i) out << "S " << i + 1 << ' ' << map.shared_nodes[i] + 1 << '\n';
    for (std::size_t m = 0; m < map.midpoint_edges.size(); ++m)
        out << "M " << map.midpoint_edges[m].a + 1 << ' ' << map.midpoint_edges[m].b + 1 << ' '
            << map.edge_midpoint_nodes[m] + 1 << '\n';
    for (std::size_t t = 0; t < map.children.size(); ++t) {
        out << "C " << t + 1;
        for (int c : map.children[t]) out << ' ' << c + 1;
        out << '\n';
    }
}

RefinementMap read_refmap(std::istream& in)
{
    RefinementMap map;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) { throw ParseError("refmap.txt", line_no, what); };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        std::vector<long long> v;
        std::string tok;
        while (ss >> tok) {
            auto x = parse_int(tok);
            if (!x || *x < 1) fail("bad index '" + tok + "'");
            v.push_back(*x - 1);
        }
        if (tag == "S" && v.size() == 2) {
            if (v[0] != static_cast<long long>(map.shared_nodes.size())) fail("shared nodes out of order");
            map.shared_nodes.push_back(static_cast<int>(v[1]));
        } else if (tag == "M" && v.size() == 3) {
            map.midpoint_edges.push_back({static_cast<int>(v[0]), static_cast<int>(v[1])});
            map.edge_midpoint_nodes.push_back(static_cast<int>(v[2]));
        } else if (tag == "C" && v.size() == 5) {
            if (v[0] != static_cast<long long>(map.children.size())) fail("children out of order");
            map.children.push_back({static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(v[3]),
                                    static_cast<int>(v[4])});
        } else {
            fail("unrecognized record");
        }
    }
    std::size_t fine_elements = 0;
    for (const auto& c : map.children)
        for (int x : c) fine_elements = std::max(fine_elements, static_cast<std::size_t>(x) + 1);
    map.parent.assign(fine_elements, -1);
    for (std::size_t t = 0; t < map.children.size(); ++t)
        for (int c : map.children[t]) map.parent[c] = static_cast<int>(t);
    return map;
}

MidpointDiscrepancy midpoint_discrepancy(double lat, double half_angle)
{
    const double d = half_angle * deg_to_rad;
    const Vec3 c = to_cartesian({0.0, lat});
    const Vec3 east{0.0, 1.0, 0.0};
    const Vec3 pa{c.x * std::cos(d) + east.x * std::sin(d), c.y * std::cos(d) + east.y * std::sin(d),
                  c.z * std::cos(d) + east.z * std::sin(d)};
    const Vec3 pb{c.x * std::cos(d) - east.x * std::sin(d), c.y * std::cos(d) - east.y * std::sin(d),
                  c.z * std::cos(d) - east.z * std::sin(d)};
    const LonLat a = to_lonlat(pa), b = to_lonlat(pb);

    double dlon = b.lon - a.lon;
    if (dlon > 180.0) dlon -= 360.0;
    if (dlon < -180.0) dlon += 360.0;
    const double dlat = b.lat - a.lat;

    // Arc length of the path that is linear in (lon, lat), composite Simpson.
    constexpr int n = 2000;
    auto speed = [&](double s) {
        const double phi = (a.lat + s * dlat) * deg_to_rad;
        const double x = std::cos(phi) * dlon * deg_to_rad;
        const double y = dlat * deg_to_rad;
        return std::sqrt(x * x + y * y);
    };
    double sum = speed(0.0) + speed(1.0);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * speed(static_cast<double>(i) / n);
    const double linear = sum / (3.0 * n);

    MidpointDiscrepancy r;
    r.great_circle_length = great_circle_distance(a, b);
    r.linear_length = linear;
    r.ratio = linear / r.great_circle_length;
    r.length_difference = linear - r.great_circle_length;
    return r;
}

}  // namespace pinto
