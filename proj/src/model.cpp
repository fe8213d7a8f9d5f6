#include "pinto/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace pinto {

namespace {

std::string kind_text(BlowUp::Kind k)
{
    switch (k) {
    case BlowUp::Kind::non_finite: return "non-finite value";
    case BlowUp::Kind::cfl_horizontal: return "horizontal CFL above 1";
    case BlowUp::Kind::cfl_vertical: return "vertical CFL above 1";
    }
    return "?";
}

}  // namespace

BlowUp::BlowUp(Kind kind, long step, int layer, int entity, const std::string& detail)
    : Error("blow-up at step " + std::to_string(step) + ", layer " + std::to_string(layer) + ", entity " +
            std::to_string(entity) + ": " + kind_text(kind) + (detail.empty() ? "" : " (" + detail + ")")),
      kind_(kind), step_(step), layer_(layer), entity_(entity)
{
}

void ModelConfig::validate() const
{
    if (!(dt > 0.0) || dt != std::floor(dt)) throw Error("model: dt must be a positive whole number of seconds");
    if (diffusivity < 0.0 || vertical_diffusivity < 0.0) throw Error("model: diffusivities must be non-negative");
    if (damping < 0.0 || relax_rate < 0.0) throw Error("model: rates must be non-negative");
    if (!(decay_depth > 0.0)) throw Error("model: decay_depth must be positive");
    if (!(box_lat0 < box_lat1)) throw Error("model: box_lat0 must be below box_lat1");
    if (box_lon0 == box_lon1) throw Error("model: empty longitude box");
    bounds.validate();
}

double target_temperature(double lat)
{
    const double c = std::cos(lat * deg_to_rad);
    return 28.0 * c * c - 2.0;
}

double target_salinity(double lat) { return 34.0 + 2.0 * std::cos(2.0 * lat * deg_to_rad); }

ToyOcean::ToyOcean(const LayeredMesh& mesh, ModelConfig config) : mesh_(&mesh), config_(config)
{
    config_.validate();
    const int ne = mesh.element_count();
    normals_.resize(ne);
    diff_coef_.resize(ne);
    min_edge_.resize(ne);
    for (int e = 0; e < ne; ++e) {
        const Triangle c = mesh.corners(e);
        const double lon_c = (c[0].lon + c[1].lon + c[2].lon) / 3.0;
        const double lat_c = (c[0].lat + c[1].lat + c[2].lat) / 3.0;
        const double sx = mesh.geometry() == Geometry::spherical ? meters_per_degree * std::cos(lat_c * deg_to_rad)
                                                                 : meters_per_degree;
        std::array<double, 3> x{}, y{};
        for (int j = 0; j < 3; ++j) {
            x[j] = sx * (c[j].lon - lon_c);
            y[j] = meters_per_degree * (c[j].lat - lat_c);
        }
        const double gx = (x[0] + x[1] + x[2]) / 3.0, gy = (y[0] + y[1] + y[2]) / 3.0;
        double shortest = 0.0;
        for (int j = 0; j < 3; ++j) {
            const int a = j, b = (j + 1) % 3;
            const double ex = x[b] - x[a], ey = y[b] - y[a];
            const double dx = gx - 0.5 * (x[a] + x[b]), dy = gy - 0.5 * (y[a] + y[b]);
            double nx = dy, ny = -dx;
            if (nx * ex + ny * ey < 0.0) {
                nx = -nx;
                ny = -ny;
            }
            const double len = std::hypot(ex, ey);
            normals_[e][2 * j] = nx;
            normals_[e][2 * j + 1] = ny;
            diff_coef_[e][j] = std::hypot(nx, ny) / len;
            shortest = j == 0 ? len : std::min(shortest, len);
        }
        min_edge_[e] = shortest;
    }
    const auto& lev = mesh.axis().levels();
    mid_depth_.resize(mesh.layer_count());
    for (int k = 0; k < mesh.layer_count(); ++k) mid_depth_[k] = 0.5 * (lev[k] + lev[k + 1]);
}

std::array<double, 2> ToyOcean::face_normal(int element, int local_edge) const
{
    return {normals_[element][2 * local_edge], normals_[element][2 * local_edge + 1]};
}

std::array<double, 2> ToyOcean::target_velocity(int element, int layer) const
{
    const LonLat p = mesh_->centroid(element);
    double width = config_.box_lon1 - config_.box_lon0;
    if (width <= 0.0) width += 360.0;
    const double xi = std::clamp(normalize_lon(p.lon - config_.box_lon0) / width, 0.0, 1.0);
    const double eta = std::clamp((p.lat - config_.box_lat0) / (config_.box_lat1 - config_.box_lat0), 0.0, 1.0);
    const double z = mid_depth_[layer];
    const double depth = -mesh_->axis().levels().back();
    const double decay = std::exp(z / config_.decay_depth);
    const double U = config_.gyre_velocity, V = config_.overturning_velocity;
    const double u = -U * std::sin(pi * xi) * std::cos(2.0 * pi * eta) * decay;
    const double v = 0.5 * U * std::cos(pi * xi) * std::sin(2.0 * pi * eta) * decay +
                     V * std::sin(pi * eta) * std::cos(pi * (-z) / depth);
    return {u, v};
}

std::vector<double> ToyOcean::horizontal_divergence(const std::vector<double>& u, const std::vector<double>& v) const
{
    const LayeredMesh& m = *mesh_;
    const int nn = m.node_count(), ne = m.element_count();
    std::vector<double> div(static_cast<std::size_t>(m.layer_count()) * nn, 0.0);
    for (int k = 0; k < m.layer_count(); ++k) {
        double* d = div.data() + static_cast<std::size_t>(k) * nn;
        const double* uk = u.data() + static_cast<std::size_t>(k) * ne;
        const double* vk = v.data() + static_cast<std::size_t>(k) * ne;
        for (int e : m.masks().elements[k]) {
            const auto& nodes = m.elements()[e].nodes;
            for (int j = 0; j < 3; ++j) {
                const double flux = uk[e] * normals_[e][2 * j] + vk[e] * normals_[e][2 * j + 1];
                d[nodes[j]] += flux;
                d[nodes[(j + 1) % 3]] -= flux;
            }
        }
        for (int i : m.masks().nodes[k]) d[i] /= m.dual_area(i);
    }
    return div;
}

std::vector<double> ToyOcean::diagnose_w(const std::vector<double>& u, const std::vector<double>& v) const
{
    const LayeredMesh& m = *mesh_;
    const int nn = m.node_count();
    const auto div = horizontal_divergence(u, v);
    std::vector<double> w(static_cast<std::size_t>(m.level_count()) * nn, 0.0);
    for (int i = 0; i < nn; ++i)
        for (int k = m.node_layers(i) - 1; k >= 0; --k)
            w[static_cast<std::size_t>(k) * nn + i] =
                w[static_cast<std::size_t>(k + 1) * nn + i] + div[static_cast<std::size_t>(k) * nn + i] * m.axis().thickness(k);
    return w;
}

void ToyOcean::check_cfl(const OceanState& s, const std::vector<double>& w, long index) const
{
    const LayeredMesh& m = *mesh_;
    const double dt = config_.dt;
    for (int k = 0; k < m.layer_count(); ++k)
        for (int e : m.masks().elements[k]) {
            const std::size_t at = static_cast<std::size_t>(k) * s.elements + e;
            const double c = std::hypot(s.u[at], s.v[at]) * dt / min_edge_[e];
            if (!std::isfinite(c)) throw BlowUp(BlowUp::Kind::non_finite, index, k, e, "velocity");
            if (c > 1.0) throw BlowUp(BlowUp::Kind::cfl_horizontal, index, k, e, "courant " + std::to_string(c));
        }
    for (int i = 0; i < m.node_count(); ++i)
        for (int j = 1; j < m.node_layers(i); ++j) {
            const double h = std::min(m.axis().thickness(j - 1), m.axis().thickness(j));
            const double c = std::abs(w[static_cast<std::size_t>(j) * s.nodes + i]) * dt / h;
            if (c > 1.0) throw BlowUp(BlowUp::Kind::cfl_vertical, index, j, i, "courant " + std::to_string(c));
        }
}

OceanState ToyOcean::step_at(const OceanState& s, long index) const
{
    const LayeredMesh& m = *mesh_;
    if (!s.matches(m)) throw Error("model: state does not match the mesh");
    const int nn = m.node_count(), ne = m.element_count(), nl = m.layer_count();
    const double dt = config_.dt;

    const auto w = diagnose_w(s.u, s.v);
    check_cfl(s, w, index);

    std::vector<double> dT(s.temperature.size(), 0.0), dS(s.salinity.size(), 0.0);
    auto at = [nn](int k, int i) { return static_cast<std::size_t>(k) * nn + i; };

    for (int k = 0; k < nl; ++k) {
        for (int e : m.masks().elements[k]) {
            const auto& nodes = m.elements()[e].nodes;
            const double ue = s.u[static_cast<std::size_t>(k) * ne + e];
            const double ve = s.v[static_cast<std::size_t>(k) * ne + e];
            for (int j = 0; j < 3; ++j) {
                const int a = nodes[j], b = nodes[(j + 1) % 3];
                const std::size_t ia = at(k, a), ib = at(k, b);
                const double flux = ue * normals_[e][2 * j] + ve * normals_[e][2 * j + 1];
                // upwind, advective form: only the downstream node changes
                if (flux > 0.0) {
                    dT[ib] += flux * (s.temperature[ia] - s.temperature[ib]) / m.dual_area(b);
                    dS[ib] += flux * (s.salinity[ia] - s.salinity[ib]) / m.dual_area(b);
                } else if (flux < 0.0) {
                    dT[ia] -= flux * (s.temperature[ib] - s.temperature[ia]) / m.dual_area(a);
                    dS[ia] -= flux * (s.salinity[ib] - s.salinity[ia]) / m.dual_area(a);
                }
                const double c = config_.diffusivity * diff_coef_[e][j];
                const double fT = c * (s.temperature[ib] - s.temperature[ia]);
                const double fS = c * (s.salinity[ib] - s.salinity[ia]);
                dT[ia] += fT / m.dual_area(a);
                dT[ib] -= fT / m.dual_area(b);
                dS[ia] += fS / m.dual_area(a);
                dS[ib] -= fS / m.dual_area(b);
            }
        }
    }

    for (int i = 0; i < nn; ++i) {
        const int n = m.node_layers(i);
        for (int j = 1; j < n; ++j) {
            const std::size_t up = at(j - 1, i), dn = at(j, i);
            const double hu = m.axis().thickness(j - 1), hd = m.axis().thickness(j);
            const double wj = w[at(j, i)];
            if (wj > 0.0) {
                dT[dn] += wj * (s.temperature[up] - s.temperature[dn]) / hd;
                dS[dn] += wj * (s.salinity[up] - s.salinity[dn]) / hd;
            } else if (wj < 0.0) {
                dT[up] -= wj * (s.temperature[dn] - s.temperature[up]) / hu;
                dS[up] -= wj * (s.salinity[dn] - s.salinity[up]) / hu;
            }
            const double kz = config_.vertical_diffusivity / (0.5 * (hu + hd));
            const double fT = kz * (s.temperature[up] - s.temperature[dn]);
            const double fS = kz * (s.salinity[up] - s.salinity[dn]);
            dT[dn] += fT / hd;
            dT[up] -= fT / hu;
            dS[dn] += fS / hd;
            dS[up] -= fS / hu;
        }
        if (n > 0) {
            const double lat = m.nodes()[i].pos.lat;
            dT[at(0, i)] += config_.relax_rate * (target_temperature(lat) - s.temperature[at(0, i)]);
            dS[at(0, i)] += config_.relax_rate * (target_salinity(lat) - s.salinity[at(0, i)]);
        }
    }

    OceanState out = s;
    for (int k = 0; k < nl; ++k)
        for (int i : m.masks().nodes[k]) {
            out.temperature[at(k, i)] += dt * dT[at(k, i)];
            out.salinity[at(k, i)] += dt * dS[at(k, i)];
        }
    const double r = dt * config_.damping;
    for (int k = 0; k < nl; ++k)
        for (int e : m.masks().elements[k]) {
            const auto target = target_velocity(e, k);
            const std::size_t x = static_cast<std::size_t>(k) * ne + e;
            out.u[x] += r * (target[0] - s.u[x]);
            out.v[x] += r * (target[1] - s.v[x]);
        }
    out.w = diagnose_w(out.u, out.v);
    out.clock = s.clock + dt;

    for (Field f : all_fields)
        for (int k = 0; k < out.slabs(f); ++k) {
            const auto slab = out.slab(f, k);
            for (std::size_t i = 0; i < slab.size(); ++i)
                if (!std::isfinite(slab[i]))
                    throw BlowUp(BlowUp::Kind::non_finite, index, k, static_cast<int>(i), std::string(field_name(f)));
        }
    return out;
}

OceanState ToyOcean::step(const OceanState& state) const { return step_at(state, 0); }

Propagation ToyOcean::propagate(const OceanState& state, double interval,
                                const std::function<void(long, const OceanState&)>& observer) const
{
    if (!(interval >= 0.0)) throw Error("model: interval must be non-negative");
    const long steps = std::lround(interval / config_.dt);
    if (std::abs(steps * config_.dt - interval) > 1e-9 * std::max(1.0, interval))
        throw Error("model: interval is not a whole number of time steps");

    Propagation out;
    out.state = state;
    RunAverages& avg = out.averages;
    avg.temperature.assign(state.temperature.size(), 0.0);
    avg.salinity.assign(state.salinity.size(), 0.0);
    avg.u.assign(state.u.size(), 0.0);
    avg.v.assign(state.v.size(), 0.0);
    avg.w.assign(state.w.size(), 0.0);
    auto accumulate = [](std::vector<double>& sum, const std::vector<double>& x) {
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += x[i];
    };
    for (long n = 1; n <= steps; ++n) {
        out.state = step_at(out.state, n);
        accumulate(avg.temperature, out.state.temperature);
        accumulate(avg.salinity, out.state.salinity);
        accumulate(avg.u, out.state.u);
        accumulate(avg.v, out.state.v);
        accumulate(avg.w, out.state.w);
        if (observer) observer(n, out.state);
    }
    if (steps == 0) {
        avg.temperature = state.temperature;
        avg.salinity = state.salinity;
        avg.u = state.u;
        avg.v = state.v;
        avg.w = state.w;
        avg.samples = 0;
    } else {
        const double inv = 1.0 / static_cast<double>(steps);
        for (auto* f : {&avg.temperature, &avg.salinity, &avg.u, &avg.v, &avg.w})
            for (double& x : *f) x *= inv;
        avg.samples = steps;
    }
    if (config_.clamp_after_propagate) out.clamps = clamp_bounds(out.state, config_.bounds, mesh_);
    return out;
}

OceanState ToyOcean::initial_state(std::uint64_t seed, double noise) const
{
    const LayeredMesh& m = *mesh_;
    OceanState s = OceanState::zeros(m);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    for (int k = 0; k < m.layer_count(); ++k) {
        const double decay = std::exp(mid_depth_[k] / config_.decay_depth);
        for (int i : m.masks().nodes[k]) {
            const double lat = m.nodes()[i].pos.lat;
            const std::size_t x = static_cast<std::size_t>(k) * s.nodes + i;
            s.temperature[x] = -1.5 + (target_temperature(lat) + 1.5) * decay;
            s.salinity[x] = 34.7 + (target_salinity(lat) - 34.7) * decay;
            if (noise > 0.0) s.temperature[x] += noise * jitter(rng);
        }
        for (int e : m.masks().elements[k]) {
            const auto t = target_velocity(e, k);
            const std::size_t x = static_cast<std::size_t>(k) * s.elements + e;
            s.u[x] = t[0];
            s.v[x] = t[1];
        }
    }
    s.w = diagnose_w(s.u, s.v);
    return s;
}

OceanState step(const OceanState& state, const ModelConfig& config, const LayeredMesh& mesh)
{
    return ToyOcean(mesh, config).step(state);
}

std::vector<double> diagnose_w(const OceanState& state, const LayeredMesh& mesh)
{
    return ToyOcean(mesh, ModelConfig{}).diagnose_w(state.u, state.v);
}

Propagation propagate(const OceanState& state, double interval, const ModelConfig& config, const LayeredMesh& mesh)
{
    return ToyOcean(mesh, config).propagate(state, interval);
}

}  // namespace pinto
