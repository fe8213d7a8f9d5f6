#pragma once

#include "pinto/mesh.hpp"
#include "pinto/state.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pinto::diag {

/// A level ("500") or a range of levels ("0-500"), depths in meters below
/// the surface. Both ends of a range must be levels of the axis.
struct DepthSpec {
    bool range = false;
    double z1 = 0.0;
    double z2 = 0.0;

    static DepthSpec parse(std::string_view text);
    std::string text() const;
};

/// Dual-area weighted mean of a layer-major node field over active nodes.
/// A level selects the layer directly below it; a range weights its layers
/// by thickness.
double area_mean(const std::vector<double>& field, const LayeredMesh& mesh, const DepthSpec& depth);

/// Mean of the three node values of an element at one level.
double node_to_center_w(const std::vector<double>& w, const LayeredMesh& mesh, int element, int level);

/// Per-element region mask; empty means every element.
using Region = std::vector<char>;

/// Elements whose centroid longitude lies in [lon0, lon1] (wrapping at 360).
Region longitude_window(const LayeredMesh& mesh, double lon0, double lon1);

struct Streamfunction {
    std::vector<double> edges;  ///< bin edges, -90 .. 90
    int levels = 0;
    int bins = 0;
    std::vector<double> psi;    ///< [level][bin], Sv

    double at(int level, int bin) const { return psi[static_cast<std::size_t>(level) * bins + bin]; }
    /// Bin containing a latitude; the last bin is closed.
    int bin_of(double lat) const;
};

/// Meridional overturning from vertical velocity. For each level k and bin i,
/// ΔΨ = (Σ w(c_l) A_l) / 1e6 over elements of the bin in ascending order that
/// have level k as the top of an active layer; Ψ accumulates ΔΨ over bins
/// from the south.
Streamfunction overturning(const std::vector<double>& w, const LayeredMesh& mesh, double dphi, const Region& region = {});

enum class Reduction {
    max,      ///< largest value over levels
    extremum  ///< value of largest magnitude over levels, sign kept
};

Reduction parse_reduction(std::string_view name);

double overturning_at(const Streamfunction& psi, double lat, Reduction reduction = Reduction::max);

struct LayerError {
    double max_error = 0.0;
    double relative = 0.0;
    bool zero_reference = false;  ///< relative is 0 because the reference layer is all zero
};

struct ErrorProfile {
    /// Indexed by Field; layers (levels for w).
    std::array<std::vector<LayerError>, 5> fields;
    const std::vector<LayerError>& operator[](Field f) const { return fields[static_cast<int>(f)]; }
    double max_relative() const;
};

/// Per-layer error over active entities of the mesh.
ErrorProfile layer_error_profile(const OceanState& iterate, const OceanState& reference, const LayeredMesh& mesh);

/// Scalar diagnostics of a state, selectable by name:
///   sst, sss           surface layer means of temperature, salinity
///   temp@<depth>       mean temperature at a level or range, e.g. temp@0-500
///   amoc               overturning_at the configured latitude
struct Selection {
    std::vector<std::string> names;
    double amoc_lat = 26.5;
    double amoc_dphi = 1.0;
    Reduction amoc_reduction = Reduction::max;
    Region region;

    static Selection parse(std::string_view comma_list);
    void validate() const;
};

double evaluate(std::string_view name, const OceanState& state, const LayeredMesh& mesh, const Selection& sel);

/// One row per (iteration, slice): the diagnostic of the iterate and its
/// absolute difference from the two references.
struct ConvergenceRow {
    int iteration = 0;
    int slice = 0;
    double value = 0.0;
    double error_uninterrupted = 0.0;
    double error_restarted = 0.0;
};

struct ConvergenceTable {
    std::string diagnostic;
    std::vector<ConvergenceRow> rows;
};

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);
ConvergenceTable read_convergence_csv(std::istream& in, const std::string& diagnostic);

/// Writes <dir>/<diagnostic>__<run_id>.csv for every table; returns the paths.
std::vector<std::filesystem::path> emit_convergence_csv(const std::vector<ConvergenceTable>& tables,
                                                        const std::string& run_id, const std::filesystem::path& dir);

/// File-name-safe form of a diagnostic name ("temp@0-500" -> "temp_0-500").
std::string file_stem(std::string_view diagnostic);

}  // namespace pinto::diag
