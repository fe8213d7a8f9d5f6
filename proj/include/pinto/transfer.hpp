#pragma once

#include "pinto/mesh.hpp"
#include "pinto/refine.hpp"
#include "pinto/state.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace pinto {

enum class Exec { serial, parallel };

/// How fine node fields are mapped back to the coarse mesh.
///   injection:    coarse node takes the value of its shared fine node (R(L(g)) = g)
///   conservative: dual-area-weighted mean over the shared node and half of
///                 every adjacent midpoint node
enum class NodeRestriction { injection, conservative };

/// Lifting and restriction between a coarse mesh and its congruent
/// refinement. Node fields (T, S, w) are lifted linearly along parent edges;
/// element fields (u, v) are lifted by injection into the four children and
/// restricted by area-weighted averaging.
///
/// Every entry active on the fine mesh receives a lifted value:
///   shared node: the coarse node
///   midpoint:    mean of the active edge endpoints (one endpoint is always
///                active, since the midpoint bottom lies between them)
///   child:       its parent at the same layer, or at the parent's deepest
///                layer when the child reaches further down
/// Inactive fine entries are written as 0. Restriction reads only entries
/// that coarse-active values map to, so R(L(g)) = g.
class TransferPair {
public:
    TransferPair(const LayeredMesh& coarse, const LayeredMesh& fine, RefinementMap map,
                 NodeRestriction node_mode = NodeRestriction::injection);

    const LayeredMesh& coarse() const { return *coarse_; }
    const LayeredMesh& fine() const { return *fine_; }
    const RefinementMap& map() const { return map_; }
    NodeRestriction node_mode() const { return node_mode_; }

    /// Area of a child over the summed area of its siblings.
    double child_weight(int fine_element) const { return child_weights_[fine_element]; }

    bool node_transfer_active(int fine_node, int slab) const;
    bool element_transfer_active(int fine_element, int layer) const;

    /// (layer, fine node) pairs active on the fine mesh but not reached by
    /// node transfers; empty for refinements built by refine_congruent.
    std::vector<std::pair<int, int>> mask_mismatches() const;

    // Single-slab operators. `slab` is a layer for T/S/u/v and a level for w;
    // it must be below the level count (node channel) or layer count
    // (element channel). Element lifting reads the whole coarse column
    // (layer-major, all layers) to fill children below their parent.
    std::vector<double> lift_node_field(std::span<const double> coarse, int slab) const;
    std::vector<double> restrict_node_field(std::span<const double> fine, int slab) const;
    std::vector<double> lift_elem_field(std::span<const double> coarse_column, int layer) const;
    std::vector<double> restrict_elem_field(std::span<const double> fine, int layer) const;

    /// Whole-state operators; slabs are independent and run in parallel
    /// unless Exec::serial is requested.
    OceanState lift(const OceanState& coarse, Exec exec = Exec::parallel) const;
    OceanState restrict(const OceanState& fine, Exec exec = Exec::parallel) const;

private:
    void check_node_slab(int slab, std::size_t size, std::size_t expected) const;
    void check_elem_layer(int layer, std::size_t size, std::size_t expected) const;

    const LayeredMesh* coarse_;
    const LayeredMesh* fine_;
    RefinementMap map_;
    NodeRestriction node_mode_;
    std::vector<double> child_weights_;
    std::vector<std::vector<int>> node_midpoints_;  ///< midpoint fine nodes around each coarse node
};

enum class RoundTrip {
    cfc,  ///< coarse -> fine -> coarse: R(L(g)) - g on the coarse mesh
    fcf   ///< fine -> coarse -> fine:   L(R(f)) - f on the fine mesh
};

struct LayerNorm {
    double max_error = 0.0;
    double relative = 0.0;  ///< max_error / max|reference|, 0 for an all-zero reference
};

struct InterpErrors {
    /// Indexed by Field; one entry per slab (levels for w).
    std::array<std::vector<LayerNorm>, 5> per_field;
    const std::vector<LayerNorm>& operator[](Field f) const { return per_field[static_cast<int>(f)]; }
};

/// Round-trip interpolation error of a state: coarse state for cfc, fine
/// state for fcf.
InterpErrors interp_error_norms(const OceanState& state, const TransferPair& pair, RoundTrip direction);

}  // namespace pinto
