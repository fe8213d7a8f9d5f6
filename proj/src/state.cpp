#include "pinto/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pinto {

std::string_view field_name(Field f)
{
    switch (f) {
    case Field::temperature: return "temp";
    case Field::salinity: return "salt";
    case Field::u: return "u";
    case Field::v: return "v";
    case Field::w: return "w";
    }
    return "?";
}

OceanState OceanState::zeros(const LayeredMesh& mesh)
{
    OceanState s;
    s.nodes = mesh.node_count();
    s.elements = mesh.element_count();
    s.layers = mesh.layer_count();
    const auto nl = static_cast<std::size_t>(s.layers);
    s.temperature.assign(nl * s.nodes, 0.0);
    s.salinity.assign(nl * s.nodes, 0.0);
    s.u.assign(nl * s.elements, 0.0);
    s.v.assign(nl * s.elements, 0.0);
    s.w.assign((nl + 1) * s.nodes, 0.0);
    return s;
}

std::vector<double>& OceanState::field(Field f)
{
    return const_cast<std::vector<double>&>(static_cast<const OceanState&>(*this).field(f));
}

const std::vector<double>& OceanState::field(Field f) const
{
    switch (f) {
    case Field::temperature: return temperature;
    case Field::salinity: return salinity;
    case Field::u: return u;
    case Field::v: return v;
    case Field::w: return w;
    }
    return w;
}

int OceanState::entities(Field f) const { return (f == Field::u || f == Field::v) ? elements : nodes; }

int OceanState::slabs(Field f) const { return f == Field::w ? levels() : layers; }

std::span<double> OceanState::slab(Field f, int k)
{
    const auto n = static_cast<std::size_t>(entities(f));
    return std::span<double>(field(f)).subspan(k * n, n);
}

std::span<const double> OceanState::slab(Field f, int k) const
{
    const auto n = static_cast<std::size_t>(entities(f));
    return std::span<const double>(field(f)).subspan(k * n, n);
}

bool OceanState::matches(const LayeredMesh& mesh) const
{
    if (nodes != mesh.node_count() || elements != mesh.element_count() || layers != mesh.layer_count()) return false;
    for (Field f : all_fields)
        if (field(f).size() != static_cast<std::size_t>(entities(f)) * slabs(f)) return false;
    return true;
}

OceanState add_difference(const OceanState& base, const OceanState& plus, const OceanState& minus)
{
    OceanState out = base;
    for (Field f : all_fields) {
        auto& o = out.field(f);
        const auto& p = plus.field(f);
        const auto& m = minus.field(f);
        if (p.size() != o.size() || m.size() != o.size()) throw Error("add_difference: state shape mismatch");
        for (std::size_t i = 0; i < o.size(); ++i) o[i] += (p[i] - m[i]);
    }
    return out;
}

double max_relative_difference(const OceanState& a, const OceanState& b)
{
    double worst = 0.0;
    for (Field f : all_fields) {
        const auto& x = a.field(f);
        const auto& y = b.field(f);
        if (x.size() != y.size()) throw Error("max_relative_difference: state shape mismatch");
        double diff = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            diff = std::max(diff, std::abs(x[i] - y[i]));
            ref = std::max(ref, std::abs(y[i]));
        }
        worst = std::max(worst, ref > 0.0 ? diff / ref : diff);
    }
    return worst;
}

double max_abs_difference(const OceanState& a, const OceanState& b)
{
    double worst = 0.0;
    for (Field f : all_fields) {
        const auto& x = a.field(f);
        const auto& y = b.field(f);
        if (x.size() != y.size()) throw Error("max_abs_difference: state shape mismatch");
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    }
    return worst;
}

bool all_finite(const OceanState& s)
{
    for (Field f : all_fields)
        for (double x : s.field(f))
            if (!std::isfinite(x)) return false;
    return std::isfinite(s.clock);
}

void FieldBounds::validate() const
{
    if (temp_min && temp_max && !(*temp_min < *temp_max)) throw Error("bounds: temp_min must be below temp_max");
    if (salt_min && salt_max && !(*salt_min < *salt_max)) throw Error("bounds: salt_min must be below salt_max");
}

int ClampReport::count(Field f, int layer) const
{
    const auto& c = counts[f == Field::temperature ? 0 : 1];
    return layer < static_cast<int>(c.size()) ? c[layer] : 0;
}

ClampReport clamp_bounds(OceanState& state, const FieldBounds& bounds, const LayeredMesh* mesh)
{
    bounds.validate();
    ClampReport report;
    report.counts[0].assign(state.layers, 0);
    report.counts[1].assign(state.layers, 0);
    auto apply = [&](Field f, int slot, const std::optional<double>& lo, const std::optional<double>& hi) {
        for (int k = 0; k < state.layers; ++k) {
            auto layer = state.slab(f, k);
            for (int i = 0; i < state.nodes; ++i) {
                if (mesh && !mesh->node_active(i, k)) continue;
                double& x = layer[i];
                double y = x;
                if (lo && y < *lo) y = *lo;
                if (hi && y > *hi) y = *hi;
                if (y != x) {
                    report.events.push_back({f, k, i, x, y});
                    ++report.counts[slot][k];
                    x = y;
                }
            }
        }
    };
    apply(Field::temperature, 0, bounds.temp_min, bounds.temp_max);
    apply(Field::salinity, 1, bounds.salt_min, bounds.salt_max);
    return report;
}

}  // namespace pinto
