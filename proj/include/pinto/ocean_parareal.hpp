#pragma once

#include "pinto/diagnostics.hpp"
#include "pinto/model.hpp"
#include "pinto/parareal.hpp"
#include "pinto/refine.hpp"
#include "pinto/transfer.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pinto {

using OceanRun = parareal::Run<OceanState, OceanState>;
using OceanIterate = parareal::Iterate<OceanState, OceanState>;

/// Serial fine references at every slice boundary (index 0 is u0).
struct References {
    std::vector<OceanState> uninterrupted;  ///< one propagation over the whole window
    std::vector<OceanState> restarted;      ///< one propagation per slice, via restart files
};

/// Error of iterate k, slice n against both references.
struct ErrorPoint {
    int iteration = 0;
    int slice = 0;
    double vs_uninterrupted = 0.0;  ///< max over fields of relative max-norm error
    double vs_restarted = 0.0;
};

struct OceanOptions {
    parareal::SliceGrid grid;
    parareal::Config parareal;
    ModelConfig coarse_model;  ///< used on the coarse mesh (classical: on the fine mesh)
    ModelConfig fine_model;
    NodeRestriction node_restriction = NodeRestriction::injection;
    /// (iteration, slice) pairs whose fine propagation is poisoned with NaN.
    std::set<std::pair<int, int>> inject_fine_failures;
    std::filesystem::path run_dir;  ///< empty: nothing written
    bool write_restarts = true;
    diag::Selection diagnostics;
    std::string run_id = "run";
};

/// Coarse and fine meshes with their propagators and transfers. Holds
/// references into its own members and is therefore neither copied nor moved.
class OceanExperiment {
public:
    OceanExperiment(LayeredMesh coarse, Refinement refinement, OceanOptions options);
    OceanExperiment(const OceanExperiment&) = delete;
    OceanExperiment& operator=(const OceanExperiment&) = delete;

    const LayeredMesh& coarse() const { return coarse_; }
    const LayeredMesh& fine() const { return fine_; }
    const TransferPair& pair() const { return *pair_; }
    const ToyOcean& coarse_model() const { return *G_; }
    const ToyOcean& fine_model() const { return *F_; }
    const OceanOptions& options() const { return options_; }

    /// Synthetic fine initial state.
    OceanState initial_state(std::uint64_t seed, double noise) const { return F_->initial_state(seed, noise); }

    /// Serial references. The restarted one writes and reads a restart per
    /// slice under <dir>/slice<n>/U.restart (a temporary buffer when dir is empty).
    References references(const OceanState& u0, const std::filesystem::path& dir = {}) const;

    /// Parareal problem bound to this experiment; `iteration` is read by the
    /// failure injection and must hold the iteration being computed.
    parareal::Problem<OceanState, OceanState> problem(const int* iteration,
                                                      std::vector<double>* coarse_seconds = nullptr) const;

    struct Result {
        OceanRun run;
        std::vector<ErrorPoint> errors;                 ///< empty without references
        std::vector<diag::ConvergenceTable> tables;     ///< max_error plus selected diagnostics
    };

    /// Runs Parareal from u0. With references, errors and convergence tables
    /// are collected for every iteration and slice. Writes the run directory
    /// (restarts, run.log, CSVs) when options().run_dir is set.
    Result run(const OceanState& u0, const References* refs = nullptr, bool keep_history = false) const;

private:
    LayeredMesh coarse_;
    LayeredMesh fine_;
    OceanOptions options_;
    std::unique_ptr<TransferPair> pair_;
    std::unique_ptr<ToyOcean> G_;
    std::unique_ptr<ToyOcean> F_;
};

/// Reads run.log lines "iteration slice phase seconds status" and returns
/// mean fine-slice time over mean coarse-slice time.
double measured_ratio(const std::filesystem::path& run_log);

}  // namespace pinto
