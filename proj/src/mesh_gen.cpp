#include "pinto/mesh_gen.hpp"

#include <algorithm>
#include <memory>
#include <random>

namespace pinto::gen {

namespace {

bool in_hole(const std::vector<Hole>& holes, int i, int j)
{
    return std::any_of(holes.begin(), holes.end(), [&](const Hole& h) {
        return i >= h.i0 && i < h.i0 + h.width && j >= h.j0 && j < h.j0 + h.height;
    });
}

}  // namespace

LayeredMesh box_mesh(const BoxSpec& spec)
{
    const int nx = spec.nx, ny = spec.ny;
    if (nx < 2 || ny < 2) throw MeshError("box_mesh: need at least 2 x 2 nodes");
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    const double dx = (spec.lon1 - spec.lon0) / (nx - 1);
    const double dy = (spec.lat1 - spec.lat0) / (ny - 1);
    std::vector<LonLat> pos(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            LonLat p{spec.lon0 + i * dx, spec.lat0 + j * dy};
            if (spec.jitter > 0.0 && i > 0 && j > 0 && i < nx - 1 && j < ny - 1) {
                p.lon += spec.jitter * dx * unit(rng);
                p.lat += spec.jitter * dy * unit(rng);
            }
            pos[j * nx + i] = p;
        }
    }

    auto id = [nx](int i, int j) { return j * nx + i; };
    std::vector<SurfaceElement> elements;
    for (int j = 0; j < ny - 1; ++j) {
        for (int i = 0; i < nx - 1; ++i) {
            const bool flip = spec.random_diagonals && coin(rng);
            if (in_hole(spec.holes, i, j)) continue;
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if (!flip) {
                if (!(spec.drop_corner && i == nx - 2 && j == 0)) elements.push_back({{a, b, c}});
                elements.push_back({{a, c, d}});
            } else {
                elements.push_back({{a, b, d}});
                elements.push_back({{b, c, d}});
            }
        }
    }

    // Compact away nodes no element references.
    std::vector<int> remap(pos.size(), -1);
    for (const auto& e : elements)
        for (int v : e.nodes) remap[v] = 0;
    std::vector<SurfaceNode> nodes;
    for (std::size_t v = 0; v < pos.size(); ++v) {
        if (remap[v] < 0) continue;
        remap[v] = static_cast<int>(nodes.size());
        nodes.push_back({pos[v], 0});
    }
    for (auto& e : elements)
        for (int& v : e.nodes) v = remap[v];

    VerticalAxis axis(spec.levels);
    std::vector<double> bottom(nodes.size(), axis.levels().back());
    if (spec.bottom)
        for (std::size_t v = 0; v < nodes.size(); ++v)
            bottom[v] = std::clamp(spec.bottom(nodes[v].pos), axis.levels().back(), 0.0);

    LayeredMesh mesh(std::move(nodes), std::move(elements), std::move(axis), std::move(bottom), spec.geometry);
    return with_classified_nodes(mesh);
}

LayeredMesh random_mesh(std::uint64_t seed, int n, Geometry geometry, std::vector<double> levels)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BoxSpec spec;
    spec.lon0 = 10.0 + 40.0 * u(rng);
    spec.lat0 = -40.0 + 40.0 * u(rng);
    spec.lon1 = spec.lon0 + 5.0 + 20.0 * u(rng);
    spec.lat1 = spec.lat0 + 5.0 + 20.0 * u(rng);
    spec.nx = n;
    spec.ny = std::max(2, n + static_cast<int>(u(rng) * 4.0) - 2);
    spec.jitter = 0.3;
    spec.random_diagonals = true;
    spec.seed = seed * 7919 + 17;
    spec.levels = levels;
    spec.geometry = geometry;
    const double deepest = levels.back();
    auto depth_rng = std::make_shared<std::mt19937_64>(seed ^ 0x9e3779b97f4a7c15ull);
    spec.bottom = [depth_rng, deepest](LonLat) {
        std::uniform_real_distribution<double> d(deepest, 0.0);
        return d(*depth_rng);
    };
    return box_mesh(spec);
}

LayeredMesh band_mesh(int n_lon, int n_lat, double lat0, double lat1, std::vector<double> levels)
{
    if (n_lon < 3 || n_lat < 2) throw MeshError("band_mesh: need n_lon >= 3 and n_lat >= 2");
    std::vector<SurfaceNode> nodes;
    const double dlon = 360.0 / n_lon;
    const double dlat = (lat1 - lat0) / (n_lat - 1);
    for (int j = 0; j < n_lat; ++j)
        for (int i = 0; i < n_lon; ++i) nodes.push_back({{i * dlon + 0.5 * dlon * (j % 2), lat0 + j * dlat}, 0});
    auto id = [n_lon](int i, int j) { return j * n_lon + (i % n_lon); };
    std::vector<SurfaceElement> elements;
    for (int j = 0; j < n_lat - 1; ++j) {
        for (int i = 0; i < n_lon; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if (j % 2 == 0) {
                elements.push_back({{a, b, d}});
                elements.push_back({{b, c, d}});
            } else {
                elements.push_back({{a, b, c}});
                elements.push_back({{a, c, d}});
            }
        }
    }
    VerticalAxis axis(std::move(levels));
    std::vector<double> bottom(nodes.size(), axis.levels().back());
    LayeredMesh mesh(std::move(nodes), std::move(elements), std::move(axis), std::move(bottom));
    return with_classified_nodes(mesh);
}

std::vector<double> reference_levels()
{
    return {0.0,     -5.0,    -10.0,   -20.0,   -30.0,   -40.0,   -50.0,   -60.0,   -70.0,   -80.0,
            -90.0,   -100.0,  -115.0,  -135.0,  -160.0,  -190.0,  -230.0,  -280.0,  -340.0,  -410.0,
            -490.0,  -580.0,  -680.0,  -790.0,  -910.0,  -1040.0, -1180.0, -1330.0, -1500.0, -1700.0,
            -1920.0, -2150.0, -2400.0, -2650.0, -2900.0, -3150.0, -3400.0, -3650.0, -3900.0, -4150.0,
            -4400.0, -4650.0, -4900.0, -5150.0, -5400.0, -5650.0, -6000.0, -6250.0};
}

LayeredMesh example_triangle()
{
    std::vector<SurfaceNode> nodes{{{30.0, 40.0}, 1}, {{32.0, 40.0}, 1}, {{30.0, 42.0}, 1}};
    std::vector<SurfaceElement> elements{{{0, 1, 2}}};
    return LayeredMesh(std::move(nodes), std::move(elements), VerticalAxis(reference_levels()), {-672.0, -534.0, -621.0});
}

LayeredMesh reference_count_mesh()
{
    BoxSpec spec;
    spec.lon0 = 0.5;
    spec.lon1 = 50.5;
    spec.lat0 = -34.0;
    spec.lat1 = 34.0;
    spec.nx = 51;
    spec.ny = 69;
    for (int i0 : {10, 30})
        for (int j0 : {8, 28, 48}) spec.holes.push_back({i0, j0, 8, 10});
    spec.drop_corner = true;
    spec.levels = reference_levels();
    spec.bottom = [](LonLat p) { return -4000.0 + 40.0 * p.lat; };
    return box_mesh(spec);
}

std::function<double(LonLat)> basin_bottom(const BoxSpec& box, double shelf, double deep)
{
    const double lon0 = box.lon0, lon1 = box.lon1, lat0 = box.lat0, lat1 = box.lat1;
    return [=](LonLat p) {
        const double xi = (p.lon - lon0) / (lon1 - lon0);
        const double eta = (p.lat - lat0) / (lat1 - lat0);
        const double edge = std::clamp(std::min({xi, 1.0 - xi, eta, 1.0 - eta}), 0.0, 0.5);
        const double t = std::min(1.0, 4.0 * edge);
        return shelf + (deep - shelf) * t;
    };
}

}  // namespace pinto::gen
