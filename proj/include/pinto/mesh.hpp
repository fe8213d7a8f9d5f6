#pragma once

#include "pinto/geometry.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace pinto {

class MeshError : public Error {
public:
    using Error::Error;
};

/// How areas and edge midpoints are measured. Spherical is the default for
/// geographic meshes; planar treats the lon/lat chart as a flat plane.
enum class Geometry { spherical, planar };

/// Orientation found in the input before normalization.
enum class Orientation { empty, counterclockwise, clockwise, mixed };

struct SurfaceNode {
    LonLat pos;
    int boundary = 0;

    friend bool operator==(const SurfaceNode&, const SurfaceNode&) = default;
};

/// Node indices are 0-based in memory; files are 1-based.
struct SurfaceElement {
    std::array<int, 3> nodes{};

    friend bool operator==(const SurfaceElement&, const SurfaceElement&) = default;
};

/// Level depths in meters, surface first. Layer k lies between level k and
/// level k + 1.
class VerticalAxis {
public:
    VerticalAxis() = default;
    explicit VerticalAxis(std::vector<double> levels);

    const std::vector<double>& levels() const { return levels_; }
    int level_count() const { return static_cast<int>(levels_.size()); }
    int layer_count() const { return level_count() > 0 ? level_count() - 1 : 0; }
    double thickness(int layer) const { return levels_[layer] - levels_[layer + 1]; }

    /// Number of levels strictly above the given bottom depth, capped at the
    /// layer count.
    int layers_above(double bottom) const;

    friend bool operator==(const VerticalAxis&, const VerticalAxis&) = default;

private:
    std::vector<double> levels_;
};

struct Edge {
    int a = 0;  ///< smaller node index
    int b = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeTable {
    std::vector<Edge> edges;  ///< sorted by (a, b)
    /// Adjacent elements per edge; second entry is -1 on boundary edges.
    std::vector<std::array<int, 2>> adjacent;
    /// Edge id of the local edges (n0,n1), (n1,n2), (n2,n0) of every element.
    std::vector<std::array<int, 3>> element_edges;

    bool is_boundary(int edge) const { return adjacent[edge][1] < 0; }
    int boundary_count() const;
    int find(int n1, int n2) const;  ///< -1 if absent
};

struct LayerMasks {
    std::vector<std::vector<int>> nodes;     ///< active node indices per layer
    std::vector<std::vector<int>> elements;  ///< active element indices per layer
};

/// Surface triangulation with a vertical axis and bottom topography.
/// Immutable after construction; element orientation is normalized to
/// counterclockwise in the periodic-shifted lon/lat chart.
class LayeredMesh {
public:
    LayeredMesh() = default;
    LayeredMesh(std::vector<SurfaceNode> nodes, std::vector<SurfaceElement> elements, VerticalAxis axis,
                std::vector<double> bottom, Geometry geometry = Geometry::spherical);

    const std::vector<SurfaceNode>& nodes() const { return nodes_; }
    const std::vector<SurfaceElement>& elements() const { return elements_; }
    const VerticalAxis& axis() const { return axis_; }
    const std::vector<double>& bottom() const { return bottom_; }
    Geometry geometry() const { return geometry_; }
    Orientation original_orientation() const { return original_orientation_; }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int element_count() const { return static_cast<int>(elements_.size()); }
    int layer_count() const { return axis_.layer_count(); }
    int level_count() const { return axis_.level_count(); }

    const EdgeTable& edges() const { return edges_; }

    /// Element corners after the periodic shift.
    Triangle corners(int element) const;
    LonLat centroid(int element) const { return centroids_[element]; }
    const std::vector<LonLat>& centroids() const { return centroids_; }
    double area(int element) const { return areas_[element]; }
    const std::vector<double>& areas() const { return areas_; }
    /// Median-dual control-volume area of a node: a third of every adjacent element.
    double dual_area(int node) const { return dual_areas_[node]; }
    const std::vector<double>& dual_areas() const { return dual_areas_; }

    int node_layers(int node) const { return node_layers_[node]; }
    int element_layers(int element) const { return element_layers_[element]; }
    bool node_active(int node, int layer) const { return layer < node_layers_[node]; }
    bool element_active(int element, int layer) const { return layer < element_layers_[element]; }
    const LayerMasks& masks() const { return masks_; }

    /// FNV-1a over coordinates, connectivity, levels, bottom and geometry.
    std::uint64_t hash() const { return hash_; }

    friend bool operator==(const LayeredMesh& a, const LayeredMesh& b)
    {
        return a.geometry_ == b.geometry_ && a.nodes_ == b.nodes_ && a.elements_ == b.elements_ &&
               a.axis_ == b.axis_ && a.bottom_ == b.bottom_;
    }

private:
    std::vector<SurfaceNode> nodes_;
    std::vector<SurfaceElement> elements_;
    VerticalAxis axis_;
    std::vector<double> bottom_;
    Geometry geometry_ = Geometry::spherical;
    Orientation original_orientation_ = Orientation::empty;

    EdgeTable edges_;
    std::vector<LonLat> centroids_;
    std::vector<double> areas_;
    std::vector<double> dual_areas_;
    std::vector<int> node_layers_;
    std::vector<int> element_layers_;
    LayerMasks masks_;
    std::uint64_t hash_ = 0;
};

EdgeTable compute_edges(int node_count, std::span<const SurfaceElement> elements);
inline EdgeTable compute_edges(const LayeredMesh& mesh)
{
    return compute_edges(mesh.node_count(), mesh.elements());
}

/// 1 for nodes touching an edge with a single adjacent element, 0 otherwise.
std::vector<int> classify_nodes(const LayeredMesh& mesh);

/// Arithmetic mean of the shifted corners, longitude normalized to [0, 360).
std::vector<LonLat> set_centroids(const LayeredMesh& mesh);

LayerMasks layer_masks(const LayeredMesh& mesh);

/// Area of an element in m^2 under the given geometry.
double element_area(const Triangle& shifted_corners, Geometry geometry);

/// Copy of the mesh with every node rotated by z-x-z Euler angles (degrees).
LayeredMesh rotate_mesh(const LayeredMesh& mesh, double alpha, double beta, double gamma);

/// Copy of the mesh with boundary flags recomputed by classify_nodes.
LayeredMesh with_classified_nodes(const LayeredMesh& mesh);

}  // namespace pinto
