#pragma once

#include "pinto/mesh.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pinto {

enum class Field { temperature, salinity, u, v, w };

inline constexpr std::array<Field, 5> all_fields{Field::temperature, Field::salinity, Field::u, Field::v, Field::w};

std::string_view field_name(Field f);

/// Prognostic state on one mesh. Arrays are layer-major:
///   temperature, salinity: [layer][node]   (deg C, g/kg)
///   u, v:                  [layer][element] (m/s)
///   w:                     [level][node]   (m/s, positive downward)
/// Inactive entries are zero.
struct OceanState {
    int nodes = 0;
    int elements = 0;
    int layers = 0;
    std::vector<double> temperature;
    std::vector<double> salinity;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> w;
    double clock = 0.0;  ///< seconds since the start of the epoch year

    static OceanState zeros(const LayeredMesh& mesh);

    int levels() const { return layers + 1; }

    std::vector<double>& field(Field f);
    const std::vector<double>& field(Field f) const;
    /// Entities per layer (or level) of a field.
    int entities(Field f) const;
    /// Number of layers (levels for w) of a field.
    int slabs(Field f) const;

    std::span<double> slab(Field f, int k);
    std::span<const double> slab(Field f, int k) const;

    bool matches(const LayeredMesh& mesh) const;

    friend bool operator==(const OceanState&, const OceanState&) = default;
};

/// base + (plus - minus), entrywise; the clock is taken from base.
/// When plus and minus are bitwise equal the result is exactly base.
OceanState add_difference(const OceanState& base, const OceanState& plus, const OceanState& minus);

/// max over fields of max|a - b| / max|b|; fields with an all-zero b
/// contribute their absolute difference.
double max_relative_difference(const OceanState& a, const OceanState& b);

/// max over fields of max|a - b|.
double max_abs_difference(const OceanState& a, const OceanState& b);

bool all_finite(const OceanState& s);

struct FieldBounds {
    std::optional<double> temp_min;
    std::optional<double> temp_max;
    std::optional<double> salt_min;
    std::optional<double> salt_max;

    void validate() const;
};

struct ClampEvent {
    Field field;
    int layer;
    int entity;
    double before;
    double after;
};

struct ClampReport {
    /// counts[field][layer], fields temperature and salinity only
    std::array<std::vector<int>, 2> counts;
    std::vector<ClampEvent> events;
    int total() const { return static_cast<int>(events.size()); }
    int count(Field f, int layer) const;
};

/// Replaces values below a minimum (above a maximum) by the bound. When a mesh
/// is given only active entries are touched.
ClampReport clamp_bounds(OceanState& state, const FieldBounds& bounds, const LayeredMesh* mesh = nullptr);

}  // namespace pinto
