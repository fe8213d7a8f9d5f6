#pragma once

#include "pinto/mesh.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace pinto {

/// Parent/child bookkeeping between a coarse mesh and its congruent
/// refinement. All indices are 0-based.
struct RefinementMap {
    std::vector<int> shared_nodes;          ///< fine node per coarse node (identity prefix)
    std::vector<Edge> midpoint_edges;       ///< coarse edge per midpoint node, in fine-node order
    std::vector<int> edge_midpoint_nodes;   ///< fine node per coarse edge id
    std::vector<std::array<int, 4>> children;  ///< fine elements per coarse element
    std::vector<int> parent;                ///< coarse element per fine element

    int coarse_node_count() const { return static_cast<int>(shared_nodes.size()); }
    int midpoint_count() const { return static_cast<int>(midpoint_edges.size()); }
};

enum class BottomMethod { nearest, linear };

BottomMethod parse_bottom_method(std::string_view name);

/// Edge midpoint under the mesh geometry: great-circle midpoint for spherical
/// meshes, arithmetic mean of the periodic-shifted coordinates for planar ones.
LonLat edge_midpoint(LonLat a, LonLat b, Geometry geometry);

/// Bottom depths for the midpoint nodes, one per coarse edge in midpoint
/// order. Linear averages the endpoints; nearest takes the closer endpoint
/// (ties to the lower node id).
std::vector<double> interpolate_bottom(const LayeredMesh& coarse, const RefinementMap& map,
                                       std::span<const LonLat> midpoints, BottomMethod method);

struct Refinement {
    LayeredMesh fine;
    RefinementMap map;
};

/// Splits every triangle into four through its edge midpoints. Midpoint nodes
/// follow the coarse nodes, ordered by (min endpoint, max endpoint); children
/// of parent (v1, v2, v3) are (v1, m12, m13), (m12, v2, m23), (m12, m23, m13),
/// (m13, m23, v3). The vertical axis is copied.
Refinement refine_congruent(const LayeredMesh& coarse, BottomMethod method = BottomMethod::linear);

/// Refinement sidecar: "S coarse fine", "M n1 n2 fine", "C parent c1 c2 c3 c4"
/// with 1-based ids.
void write_refmap(std::ostream& out, const RefinementMap& map);
RefinementMap read_refmap(std::istream& in);

struct MidpointDiscrepancy {
    double ratio = 1.0;              ///< lon/lat-linear path length over great-circle length
    double length_difference = 0.0;  ///< on the unit sphere, radians
    double linear_length = 0.0;
    double great_circle_length = 0.0;
};

/// Compares linear interpolation in lon/lat with the great circle for a test
/// segment of fixed length (2 * half_angle degrees of arc) centred at
/// (0, lat) and aligned with the local east direction. At lat = 90 the
/// segment passes through the pole.
MidpointDiscrepancy midpoint_discrepancy(double lat, double half_angle = 0.5);

}  // namespace pinto
