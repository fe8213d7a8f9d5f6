#pragma once

#include "pinto/config.hpp"
#include "pinto/ocean_parareal.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pinto {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,         ///< I/O and other errors
    exit_config = 2,          ///< invalid configuration or usage
    exit_numerical = 3,       ///< blow-up under the abort policy
    exit_not_converged = 4    ///< K_max reached above epsilon
};

/// Coarse mesh from mesh.coarse or the toy box; fine mesh from mesh.fine or
/// by congruent refinement.
LayeredMesh build_coarse_mesh(const ExperimentConfig& cfg);
Refinement build_refinement(const ExperimentConfig& cfg, const LayeredMesh& coarse);
LayeredMesh toy_mesh(const ToyMeshConfig& toy, Geometry geometry);

OceanOptions ocean_options(const ExperimentConfig& cfg, const LayeredMesh& fine);
std::unique_ptr<OceanExperiment> make_experiment(const ExperimentConfig& cfg);

/// mesh refine: writes nod2d.out, elem2d.out, aux3d.out, refmap.txt and
/// gridfile.txt of the refined mesh.
void cmd_mesh_refine(const std::filesystem::path& in, const std::filesystem::path& out, BottomMethod method,
                     Geometry geometry, std::ostream& report);

/// mesh stats: counts, orientation, skewness and area summary.
void cmd_mesh_stats(const std::filesystem::path& dir, Geometry geometry, std::ostream& report);

/// mesh generate: writes a named mesh (toy, reference, triangle) or the
/// coarse mesh of a config.
void cmd_mesh_generate(const std::string& kind, const ExperimentConfig* cfg, const std::filesystem::path& out,
                       std::ostream& report);

/// run serial: both fine references under <out>/reference/{uninterrupted,restarted}.
/// Returns the largest gap between the two.
double cmd_run_serial(const ExperimentConfig& cfg, std::ostream& report);

/// run parareal: references, the run directory and convergence CSVs.
ExitCode cmd_run_parareal(const ExperimentConfig& cfg, std::ostream& report);

/// diagnose: recomputes the convergence tables of a finished run directory
/// from its restarts for the given selection; empty selection does nothing.
std::vector<std::filesystem::path> cmd_diagnose(const ExperimentConfig& cfg, const diag::Selection& selection,
                                                std::ostream& report);

/// speedup: table of S_K for K = 1..K_max. m comes from run.log when not given.
void cmd_speedup(std::optional<double> m, int k_max, int slices, const std::optional<std::filesystem::path>& run_log,
                 std::ostream& report);

}  // namespace pinto
