#pragma once

#include "pinto/mesh.hpp"
#include "pinto/state.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pinto {

inline constexpr double seconds_per_day = 86400.0;
inline constexpr double days_per_year = 360.0;
inline constexpr double seconds_per_year = days_per_year * seconds_per_day;

/// Raised when the propagator leaves its stability domain.
class BlowUp : public Error {
public:
    enum class Kind { non_finite, cfl_horizontal, cfl_vertical };

    BlowUp(Kind kind, long step, int layer, int entity, const std::string& detail);

    Kind kind() const { return kind_; }
    long step() const { return step_; }
    int layer() const { return layer_; }
    int entity() const { return entity_; }

private:
    Kind kind_;
    long step_;
    int layer_;
    int entity_;
};

/// Parameters of the stand-in ocean. Velocities relax toward a steady
/// double-gyre plus overturning pattern inside a lon/lat box; the surface
/// layer relaxes toward latitude profiles of temperature and salinity.
struct ModelConfig {
    double dt = 2400.0;                    ///< s
    double diffusivity = 2000.0;           ///< horizontal, m^2/s
    double vertical_diffusivity = 1e-3;    ///< m^2/s
    double gyre_velocity = 0.1;            ///< m/s, target gyre speed scale
    double overturning_velocity = 0.02;    ///< m/s, target meridional overturning scale
    double decay_depth = 800.0;            ///< m, e-folding depth of the gyre
    double damping = 1.0 / (10.0 * seconds_per_day);  ///< 1/s
    double relax_rate = 1.0 / (20.0 * seconds_per_day);  ///< 1/s, surface restoring
    double box_lon0 = 0.0, box_lon1 = 360.0;
    double box_lat0 = -90.0, box_lat1 = 90.0;
    FieldBounds bounds;
    bool clamp_after_propagate = false;

    double steps_per_day() const { return seconds_per_day / dt; }
    void validate() const;
};

/// Surface restoring targets.
double target_temperature(double lat);
double target_salinity(double lat);

/// Time means over one propagation interval.
struct RunAverages {
    std::vector<double> temperature, salinity, u, v, w;
    long samples = 0;
};

struct Propagation {
    OceanState state;
    RunAverages averages;
    ClampReport clamps;  ///< empty unless clamp_after_propagate is set
};

/// Explicit first-order stepping on median-dual control volumes:
///   scalars: upwind advection by element velocities and diagnosed w,
///            two-point horizontal and vertical diffusion, surface restoring
///   velocity: du/dt = damping * (target - u)
/// Every call is deterministic and single-threaded.
class ToyOcean {
public:
    ToyOcean(const LayeredMesh& mesh, ModelConfig config);

    const LayeredMesh& mesh() const { return *mesh_; }
    const ModelConfig& config() const { return config_; }

    /// One time step; throws BlowUp (step index 0) on CFL violation or
    /// non-finite output.
    OceanState step(const OceanState& state) const;

    /// Applies step interval/dt times and accumulates time means. Blow-ups
    /// carry the failing step index within this call. The optional observer
    /// sees the state after every step.
    Propagation propagate(const OceanState& state, double interval,
                          const std::function<void(long, const OceanState&)>& observer = {}) const;

    /// w at every level (positive downward), integrated from w = 0 at the
    /// bottom of each column using the dual-volume divergence of (u, v).
    std::vector<double> diagnose_w(const std::vector<double>& u, const std::vector<double>& v) const;

    /// Net outflow per unit area of the dual volume of each node, per layer.
    std::vector<double> horizontal_divergence(const std::vector<double>& u, const std::vector<double>& v) const;

    /// Steady velocity target at an element and layer.
    std::array<double, 2> target_velocity(int element, int layer) const;

    /// Stratified initial state at rest-pattern equilibrium velocities, with
    /// optional seeded temperature noise (deg C amplitude).
    OceanState initial_state(std::uint64_t seed = 0, double noise = 0.0) const;

    /// Per element and local edge (n0n1, n1n2, n2n0): dual-face normal in
    /// meters, pointing from the first to the second node.
    std::array<double, 2> face_normal(int element, int local_edge) const;

private:
    OceanState step_at(const OceanState& state, long index) const;
    void check_cfl(const OceanState& s, const std::vector<double>& w, long index) const;

    const LayeredMesh* mesh_;
    ModelConfig config_;
    std::vector<std::array<double, 6>> normals_;     ///< per element: 3 x (nx, ny)
    std::vector<std::array<double, 3>> diff_coef_;   ///< per element: |n| / edge length
    std::vector<double> min_edge_;                   ///< per element, m
    std::vector<double> mid_depth_;                  ///< per layer, m (negative)
};

/// Free-function forms used by tests and the CLI.
OceanState step(const OceanState& state, const ModelConfig& config, const LayeredMesh& mesh);
std::vector<double> diagnose_w(const OceanState& state, const LayeredMesh& mesh);
Propagation propagate(const OceanState& state, double interval, const ModelConfig& config, const LayeredMesh& mesh);

}  // namespace pinto
