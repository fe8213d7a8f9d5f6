#pragma once

#include "pinto/mesh.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace pinto::gen {

/// Cell block [i0, i0 + width) x [j0, j0 + height) removed from a box grid.
struct Hole {
    int i0 = 0, j0 = 0, width = 0, height = 0;
};

struct BoxSpec {
    double lon0 = 0.0, lon1 = 10.0;
    double lat0 = 0.0, lat1 = 10.0;
    int nx = 3, ny = 3;           ///< nodes per direction
    double jitter = 0.0;          ///< interior node displacement, fraction of spacing
    bool random_diagonals = false;
    std::uint64_t seed = 1;
    std::vector<Hole> holes;
    bool drop_corner = false;     ///< remove the lone triangle at the (nx-1, 0) corner
    std::vector<double> levels{0.0, -10.0};
    std::function<double(LonLat)> bottom;  ///< defaults to the deepest level
    Geometry geometry = Geometry::spherical;
};

/// Structured triangulation of a lon/lat box; boundary flags are classified.
LayeredMesh box_mesh(const BoxSpec& spec);

/// Jittered box mesh with random diagonals and random bottom depths drawn
/// from the levels; about n x n nodes.
LayeredMesh random_mesh(std::uint64_t seed, int n, Geometry geometry = Geometry::planar,
                        std::vector<double> levels = {0.0, -10.0, -25.0, -50.0});

/// Latitude band around the globe, crossing the 0/360 seam.
LayeredMesh band_mesh(int n_lon, int n_lat, double lat0, double lat1, std::vector<double> levels = {0.0, -10.0});

/// The single-triangle example mesh with bottoms -672, -534, -621 on the
/// 48-level axis.
LayeredMesh example_triangle();

/// 48 levels: 0, -5, -10, ... as in the reference configuration.
std::vector<double> reference_levels();

/// Box mesh with the node and element counts of the reference coarse mesh
/// (3140 nodes, 5839 elements).
LayeredMesh reference_count_mesh();

/// Shallow-rim basin topography for toy runs.
std::function<double(LonLat)> basin_bottom(const BoxSpec& box, double shelf, double deep);

}  // namespace pinto::gen
