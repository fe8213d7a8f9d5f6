#include "pinto/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pinto {

TransferPair::TransferPair(const LayeredMesh& coarse, const LayeredMesh& fine, RefinementMap map,
                           NodeRestriction node_mode)
    : coarse_(&coarse), fine_(&fine), map_(std::move(map)), node_mode_(node_mode)
{
    if (map_.coarse_node_count() != coarse.node_count() ||
        map_.coarse_node_count() + map_.midpoint_count() != fine.node_count() ||
        static_cast<int>(map_.children.size()) != coarse.element_count() ||
        static_cast<int>(map_.parent.size()) != fine.element_count())
        throw Error("TransferPair: refinement map does not match the mesh pair");
    if (!(coarse.axis() == fine.axis())) throw Error("TransferPair: vertical axes differ");
    for (int i = 0; i < coarse.node_count(); ++i) {
        const int f = map_.shared_nodes[i];
        if (f < 0 || f >= fine.node_count() || !(fine.nodes()[f].pos == coarse.nodes()[i].pos))
            throw Error("TransferPair: coarse node " + std::to_string(i + 1) + " is not a fine node");
    }

    child_weights_.assign(fine.element_count(), 0.0);
    for (const auto& kids : map_.children) {
        double total = 0.0;
        for (int c : kids) total += fine.area(c);
        for (int c : kids) child_weights_[c] = fine.area(c) / total;
    }

    node_midpoints_.resize(coarse.node_count());
    for (int m = 0; m < map_.midpoint_count(); ++m) {
        const auto [a, b] = map_.midpoint_edges[m];
        node_midpoints_[a].push_back(map_.edge_midpoint_nodes[m]);
        node_midpoints_[b].push_back(map_.edge_midpoint_nodes[m]);
    }
}

bool TransferPair::node_transfer_active(int fine_node, int slab) const
{
    const int nc = coarse_->node_count();
    if (fine_node < nc) return coarse_->node_active(fine_node, slab);
    const auto [a, b] = map_.midpoint_edges[fine_node - nc];
    return fine_->node_active(fine_node, slab) && (coarse_->node_active(a, slab) || coarse_->node_active(b, slab));
}

bool TransferPair::element_transfer_active(int fine_element, int layer) const
{
    return fine_->element_active(fine_element, layer) && coarse_->element_layers(map_.parent[fine_element]) > 0;
}

std::vector<std::pair<int, int>> TransferPair::mask_mismatches() const
{
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k < fine_->layer_count(); ++k)
        for (int i = 0; i < fine_->node_count(); ++i)
            if (fine_->node_active(i, k) && !node_transfer_active(i, k)) out.emplace_back(k, i);
    return out;
}

void TransferPair::check_node_slab(int slab, std::size_t size, std::size_t expected) const
{
    if (slab < 0 || slab >= coarse_->level_count()) throw Error("transfer: layer " + std::to_string(slab) + " out of range");
    if (size != expected) throw Error("transfer: node field has wrong length");
}

void TransferPair::check_elem_layer(int layer, std::size_t size, std::size_t expected) const
{
    if (layer < 0 || layer >= coarse_->layer_count())
        throw Error("transfer: layer " + std::to_string(layer) + " out of range");
    if (size != expected) throw Error("transfer: element field has wrong length");
}

std::vector<double> TransferPair::lift_node_field(std::span<const double> coarse, int slab) const
{
    check_node_slab(slab, coarse.size(), coarse_->node_count());
    const int nc = coarse_->node_count();
    std::vector<double> fine(fine_->node_count(), 0.0);
    for (int i = 0; i < nc; ++i)
        if (coarse_->node_active(i, slab)) fine[i] = coarse[i];
    for (int m = 0; m < map_.midpoint_count(); ++m) {
        const auto [a, b] = map_.midpoint_edges[m];
        const bool ua = coarse_->node_active(a, slab), ub = coarse_->node_active(b, slab);
        const int f = map_.edge_midpoint_nodes[m];
        if (!fine_->node_active(f, slab)) continue;
        if (ua && ub)
            fine[f] = 0.5 * (coarse[a] + coarse[b]);
        else if (ua)
            fine[f] = coarse[a];
        else if (ub)
            fine[f] = coarse[b];
    }
    return fine;
}

std::vector<double> TransferPair::restrict_node_field(std::span<const double> fine, int slab) const
{
    check_node_slab(slab, fine.size(), fine_->node_count());
    const int nc = coarse_->node_count();
    std::vector<double> coarse(nc, 0.0);
    for (int i = 0; i < nc; ++i) {
        if (!coarse_->node_active(i, slab)) continue;
        const double anchor = fine[map_.shared_nodes[i]];
        if (node_mode_ == NodeRestriction::injection) {
            coarse[i] = anchor;
            continue;
        }
        // Weighted mean written as anchor + sum w_j (f_j - anchor), so equal
        // inputs reproduce the anchor exactly.
        double total = fine_->dual_area(map_.shared_nodes[i]);
        for (int m : node_midpoints_[i])
            if (node_transfer_active(m, slab)) total += 0.5 * fine_->dual_area(m);
        double acc = 0.0;
        for (int m : node_midpoints_[i])
            if (node_transfer_active(m, slab)) acc += 0.5 * fine_->dual_area(m) / total * (fine[m] - anchor);
        coarse[i] = anchor + acc;
    }
    return coarse;
}

std::vector<double> TransferPair::lift_elem_field(std::span<const double> coarse_column, int layer) const
{
    const int nt = coarse_->element_count();
    check_elem_layer(layer, coarse_column.size(), static_cast<std::size_t>(nt) * coarse_->layer_count());
    std::vector<double> fine(fine_->element_count(), 0.0);
    for (int t = 0; t < nt; ++t) {
        const int deepest = coarse_->element_layers(t) - 1;
        if (deepest < 0) continue;
        const double value = coarse_column[static_cast<std::size_t>(std::min(layer, deepest)) * nt + t];
        for (int c : map_.children[t])
            if (fine_->element_active(c, layer)) fine[c] = value;
    }
    return fine;
}

std::vector<double> TransferPair::restrict_elem_field(std::span<const double> fine, int layer) const
{
    check_elem_layer(layer, fine.size(), fine_->element_count());
    std::vector<double> coarse(coarse_->element_count(), 0.0);
    for (int t = 0; t < coarse_->element_count(); ++t) {
        if (!coarse_->element_active(t, layer)) continue;
        const auto& kids = map_.children[t];
        const double anchor = fine[kids[0]];
        double acc = 0.0;
        for (int c : kids) acc += child_weights_[c] * (fine[c] - anchor);
        coarse[t] = anchor + acc;
    }
    return coarse;
}

namespace {

template <typename Slab>
void for_each_slab(int count, Exec exec, Slab&& slab)
{
    if (exec == Exec::serial) {
        for (int k = 0; k < count; ++k) slab(k);
        return;
    }
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) slab(k);
}

}  // namespace

OceanState TransferPair::lift(const OceanState& coarse, Exec exec) const
{
    if (!coarse.matches(*coarse_)) throw Error("transfer: state does not match the coarse mesh");
    OceanState fine = OceanState::zeros(*fine_);
    fine.clock = coarse.clock;
    const int layers = coarse.layers, levels = coarse.levels();
    // slabs: T and S layers, u and v layers, w levels
    const int total = 4 * layers + levels;
    for_each_slab(total, exec, [&](int job) {
        if (job < 2 * layers) {
            const Field f = job < layers ? Field::temperature : Field::salinity;
            const int k = job % layers;
            const auto out = lift_node_field(coarse.slab(f, k), k);
            std::copy(out.begin(), out.end(), fine.slab(f, k).begin());
        } else if (job < 4 * layers) {
            const Field f = job < 3 * layers ? Field::u : Field::v;
            const int k = job % layers;
            const auto out = lift_elem_field(coarse.field(f), k);
            std::copy(out.begin(), out.end(), fine.slab(f, k).begin());
        } else {
            const int k = job - 4 * layers;
            const auto out = lift_node_field(coarse.slab(Field::w, k), k);
            std::copy(out.begin(), out.end(), fine.slab(Field::w, k).begin());
        }
    });
    return fine;
}

OceanState TransferPair::restrict(const OceanState& fine, Exec exec) const
{
    if (!fine.matches(*fine_)) throw Error("transfer: state does not match the fine mesh");
    OceanState coarse = OceanState::zeros(*coarse_);
    coarse.clock = fine.clock;
    const int layers = fine.layers, levels = fine.levels();
    const int total = 4 * layers + levels;
    for_each_slab(total, exec, [&](int job) {
        if (job < 2 * layers) {
            const Field f = job < layers ? Field::temperature : Field::salinity;
            const int k = job % layers;
            const auto out = restrict_node_field(fine.slab(f, k), k);
            std::copy(out.begin(), out.end(), coarse.slab(f, k).begin());
        } else if (job < 4 * layers) {
            const Field f = job < 3 * layers ? Field::u : Field::v;
            const int k = job % layers;
            const auto out = restrict_elem_field(fine.slab(f, k), k);
            std::copy(out.begin(), out.end(), coarse.slab(f, k).begin());
        } else {
            const int k = job - 4 * layers;
            const auto out = restrict_node_field(fine.slab(Field::w, k), k);
            std::copy(out.begin(), out.end(), coarse.slab(Field::w, k).begin());
        }
    });
    return coarse;
}

InterpErrors interp_error_norms(const OceanState& state, const TransferPair& pair, RoundTrip direction)
{
    const OceanState back = direction == RoundTrip::cfc ? pair.restrict(pair.lift(state)) : pair.lift(pair.restrict(state));
    InterpErrors out;
    for (Field f : all_fields) {
        auto& norms = out.per_field[static_cast<int>(f)];
        norms.resize(state.slabs(f));
        for (int k = 0; k < state.slabs(f); ++k) {
            const auto ref = state.slab(f, k);
            const auto got = back.slab(f, k);
            double err = 0.0, mag = 0.0;
            for (std::size_t i = 0; i < ref.size(); ++i) {
                err = std::max(err, std::abs(got[i] - ref[i]));
                mag = std::max(mag, std::abs(ref[i]));
            }
            norms[k] = {err, mag > 0.0 ? err / mag : 0.0};
        }
    }
    return out;
}

}  // namespace pinto
