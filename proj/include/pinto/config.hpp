#pragma once

#include "pinto/diagnostics.hpp"
#include "pinto/mesh.hpp"
#include "pinto/model.hpp"
#include "pinto/parareal.hpp"
#include "pinto/refine.hpp"
#include "pinto/transfer.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pinto {

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Generated box basin used when no coarse mesh directory is given.
struct ToyMeshConfig {
    double lon0 = 0.0, lon1 = 30.0, lat0 = 20.0, lat1 = 50.0;
    int nx = 16, ny = 16;
    double jitter = 0.2;
    std::uint64_t seed = 7;
    std::vector<double> depths{0.0, 50.0, 150.0, 300.0, 500.0, 800.0};  ///< level depths, positive down
    double bottom = 800.0;                 ///< flat bottom depth
    std::optional<double> shelf;           ///< shelf depth for a sloping basin
};

/// Experiment description read from a key=value file. Keys carry a section
/// prefix, e.g. grid.Nt=10; '#' starts a comment. Relative paths are taken
/// from the directory of the file.
struct ExperimentConfig {
    std::optional<std::filesystem::path> coarse_mesh;  ///< nullopt: generate from toy.*
    std::optional<std::filesystem::path> fine_mesh;    ///< nullopt: refine the coarse mesh
    Geometry geometry = Geometry::spherical;
    BottomMethod bottom_method = BottomMethod::linear;
    ToyMeshConfig toy;

    double t0_days = 0.0;
    double slice_days = 5.0;
    int slices = 10;

    double coarse_spd = 36.0;
    double fine_spd = 36.0;
    ModelConfig model;  ///< dt is overwritten per propagator from the spd values

    parareal::Config parareal;
    NodeRestriction node_restriction = NodeRestriction::injection;
    std::set<std::pair<int, int>> inject_fine;

    diag::Selection diagnostics;
    std::optional<std::pair<double, double>> region_lon;

    std::filesystem::path out = "run";
    int workers = 0;
    std::uint64_t seed = 1;
    double noise = 0.0;
    std::string run_id = "run";
    bool write_restarts = true;

    parareal::SliceGrid grid() const;
    ModelConfig coarse_model() const;
    ModelConfig fine_model() const;
    void validate() const;
};

/// Parses and validates; throws ConfigError naming the line on failure.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {},
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical key=value rendering (round-trips through parse_config).
std::string render_config(const ExperimentConfig& cfg);

}  // namespace pinto
