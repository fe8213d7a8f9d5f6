#include "pinto/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <tuple>

namespace pinto {

namespace {

class Fnv1a {
public:
    void add(const void* data, std::size_t size)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            h_ ^= p[i];
            h_ *= 1099511628211ull;
        }
    }
    template <typename T>
    void add(const T& v)
    {
        add(&v, sizeof(T));
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 14695981039346656037ull;
};

}  // namespace

VerticalAxis::VerticalAxis(std::vector<double> levels) : levels_(std::move(levels))
{
    if (levels_.empty()) throw MeshError("vertical axis: no levels");
    if (levels_.front() != 0.0) throw MeshError("vertical axis: first level must be 0.0");
    for (std::size_t i = 1; i < levels_.size(); ++i)
        if (!(levels_[i] < levels_[i - 1]))
            throw MeshError("vertical axis: levels not strictly decreasing at level " + std::to_string(i + 1));
}

int VerticalAxis::layers_above(double bottom) const
{
    int count = 0;
    for (double z : levels_)
        if (z > bottom) ++count;
    return std::min(count, layer_count());
}

int EdgeTable::boundary_count() const
{
    return static_cast<int>(std::count_if(adjacent.begin(), adjacent.end(), [](const auto& a) { return a[1] < 0; }));
}

int EdgeTable::find(int n1, int n2) const
{
    const Edge key{std::min(n1, n2), std::max(n1, n2)};
    auto it = std::lower_bound(edges.begin(), edges.end(), key,
                               [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    if (it == edges.end() || !(*it == key)) return -1;
    return static_cast<int>(it - edges.begin());
}

EdgeTable compute_edges(int node_count, std::span<const SurfaceElement> elements)
{
    struct Entry {
        int a, b, element, local;
    };
    std::vector<Entry> entries;
    entries.reserve(elements.size() * 3);
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const auto& n = elements[e].nodes;
        for (int j = 0; j < 3; ++j) {
            const int p = n[j], q = n[(j + 1) % 3];
            if (p < 0 || q < 0 || p >= node_count || q >= node_count)
                throw MeshError("compute_edges: node index out of range in element " + std::to_string(e + 1));
            entries.push_back({std::min(p, q), std::max(p, q), static_cast<int>(e), j});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return std::tie(x.a, x.b, x.element, x.local) < std::tie(y.a, y.b, y.element, y.local);
    });

    EdgeTable table;
    table.element_edges.assign(elements.size(), {-1, -1, -1});
    for (const auto& en : entries) {
        if (table.edges.empty() || !(table.edges.back() == Edge{en.a, en.b})) {
            table.edges.push_back({en.a, en.b});
            table.adjacent.push_back({en.element, -1});
        } else {
            auto& adj = table.adjacent.back();
            if (adj[1] >= 0)
                throw MeshError("compute_edges: edge (" + std::to_string(en.a + 1) + "," + std::to_string(en.b + 1) +
                                ") shared by more than two elements");
            adj[1] = en.element;
        }
        table.element_edges[en.element][en.local] = static_cast<int>(table.edges.size()) - 1;
    }
    return table;
}

double element_area(const Triangle& c, Geometry geometry)
{
    if (geometry == Geometry::planar)
        return std::abs(signed_area(c[0], c[1], c[2])) * meters_per_degree * meters_per_degree;
    return spherical_triangle_area(c[0], c[1], c[2]);
}

LayeredMesh::LayeredMesh(std::vector<SurfaceNode> nodes, std::vector<SurfaceElement> elements, VerticalAxis axis,
                         std::vector<double> bottom, Geometry geometry)
    : nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      axis_(std::move(axis)),
      bottom_(std::move(bottom)),
      geometry_(geometry)
{
    const int n_nodes = node_count();
    if (static_cast<int>(bottom_.size()) != n_nodes)
        throw MeshError("mesh: bottom depth count " + std::to_string(bottom_.size()) + " != node count " +
                        std::to_string(n_nodes));
    if (axis_.level_count() == 0) throw MeshError("mesh: empty vertical axis");
    const double deepest = axis_.levels().back();

    for (int i = 0; i < n_nodes; ++i) {
        auto& p = nodes_[i];
        if (!std::isfinite(p.pos.lon) || !std::isfinite(p.pos.lat) || p.pos.lat < -90.0 || p.pos.lat > 90.0)
            throw MeshError("mesh: node " + std::to_string(i + 1) + " has invalid coordinates");
        p.pos.lon = normalize_lon(p.pos.lon);
        if (p.boundary != 0 && p.boundary != 1)
            throw MeshError("mesh: node " + std::to_string(i + 1) + " has boundary flag outside {0,1}");
        if (bottom_[i] > 0.0 || bottom_[i] < deepest)
            throw MeshError("mesh: bottom depth at node " + std::to_string(i + 1) + " outside [deepest level, 0]");
    }

    int ccw = 0, cw = 0;
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        auto& n = elements_[e].nodes;
        for (int v : n)
            if (v < 0 || v >= n_nodes) throw MeshError("mesh: element " + std::to_string(e + 1) + " has dangling node");
        if (n[0] == n[1] || n[1] == n[2] || n[0] == n[2])
            throw MeshError("mesh: element " + std::to_string(e + 1) + " is degenerate (repeated node)");
        const auto t = periodic_shift(nodes_[n[0]].pos, nodes_[n[1]].pos, nodes_[n[2]].pos);
        const double f = signed_area(t[0], t[1], t[2]);
        if (f == 0.0) throw MeshError("mesh: element " + std::to_string(e + 1) + " has zero area");
        if (f < 0.0) {
            ++cw;
            std::swap(n[1], n[2]);
        } else {
            ++ccw;
        }
    }
    original_orientation_ = elements_.empty() ? Orientation::empty
                            : cw == 0         ? Orientation::counterclockwise
                            : ccw == 0        ? Orientation::clockwise
                                              : Orientation::mixed;

    edges_ = compute_edges(n_nodes, elements_);

    centroids_.resize(elements_.size());
    areas_.resize(elements_.size());
    dual_areas_.assign(n_nodes, 0.0);
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto c = corners(static_cast<int>(e));
        centroids_[e] = {normalize_lon((c[0].lon + c[1].lon + c[2].lon) / 3.0), (c[0].lat + c[1].lat + c[2].lat) / 3.0};
        areas_[e] = element_area(c, geometry_);
        if (!(areas_[e] > 0.0)) throw MeshError("mesh: element " + std::to_string(e + 1) + " has non-positive area");
        for (int v : elements_[e].nodes) dual_areas_[v] += areas_[e] / 3.0;
    }

    node_layers_.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) node_layers_[i] = axis_.layers_above(bottom_[i]);
    element_layers_.resize(elements_.size());
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& n = elements_[e].nodes;
        element_layers_[e] = std::min({node_layers_[n[0]], node_layers_[n[1]], node_layers_[n[2]]});
    }
    masks_ = layer_masks(*this);

    Fnv1a h;
    h.add(static_cast<int>(geometry_));
    h.add(n_nodes);
    for (const auto& p : nodes_) {
        h.add(p.pos.lon);
        h.add(p.pos.lat);
        h.add(p.boundary);
    }
    h.add(element_count());
    for (const auto& e : elements_) h.add(e.nodes);
    for (double z : axis_.levels()) h.add(z);
    for (double b : bottom_) h.add(b);
    hash_ = h.value();
}

Triangle LayeredMesh::corners(int element) const
{
    const auto& n = elements_[element].nodes;
    return periodic_shift(nodes_[n[0]].pos, nodes_[n[1]].pos, nodes_[n[2]].pos);
}

std::vector<int> classify_nodes(const LayeredMesh& mesh)
{
    std::vector<int> flags(mesh.node_count(), 0);
    const auto& t = mesh.edges();
    for (std::size_t i = 0; i < t.edges.size(); ++i) {
        if (t.is_boundary(static_cast<int>(i))) {
            flags[t.edges[i].a] = 1;
            flags[t.edges[i].b] = 1;
        }
    }
    return flags;
}

std::vector<LonLat> set_centroids(const LayeredMesh& mesh)
{
    std::vector<LonLat> out(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto c = mesh.corners(e);
        out[e] = {normalize_lon((c[0].lon + c[1].lon + c[2].lon) / 3.0), (c[0].lat + c[1].lat + c[2].lat) / 3.0};
    }
    return out;
}

LayerMasks layer_masks(const LayeredMesh& mesh)
{
    LayerMasks m;
    const int layers = mesh.layer_count();
    m.nodes.resize(layers);
    m.elements.resize(layers);
    for (int k = 0; k < layers; ++k) {
        for (int i = 0; i < mesh.node_count(); ++i)
            if (mesh.node_active(i, k)) m.nodes[k].push_back(i);
        for (int e = 0; e < mesh.element_count(); ++e)
            if (mesh.element_active(e, k)) m.elements[k].push_back(e);
    }
    return m;
}

LayeredMesh rotate_mesh(const LayeredMesh& mesh, double alpha, double beta, double gamma)
{
    auto nodes = mesh.nodes();
    for (auto& n : nodes) n.pos = rotate_euler(n.pos, alpha, beta, gamma);
    return LayeredMesh(std::move(nodes), mesh.elements(), mesh.axis(), mesh.bottom(), mesh.geometry());
}

LayeredMesh with_classified_nodes(const LayeredMesh& mesh)
{
    auto nodes = mesh.nodes();
    const auto flags = classify_nodes(mesh);
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].boundary = flags[i];
    return LayeredMesh(std::move(nodes), mesh.elements(), mesh.axis(), mesh.bottom(), mesh.geometry());
}

}  // namespace pinto
