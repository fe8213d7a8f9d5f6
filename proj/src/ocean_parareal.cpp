#include "pinto/ocean_parareal.hpp"

#include "pinto/format.hpp"
#include "pinto/restart.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pinto {

namespace fs = std::filesystem;

OceanExperiment::OceanExperiment(LayeredMesh coarse, Refinement refinement, OceanOptions options)
    : coarse_(std::move(coarse)), fine_(std::move(refinement.fine)), options_(std::move(options))
{
    options_.grid.validate();
    options_.parareal.validate(options_.grid);
    const bool after_propagate = options_.parareal.clamp == parareal::ClampPolicy::after_propagate;
    options_.coarse_model.clamp_after_propagate = after_propagate;
    options_.fine_model.clamp_after_propagate = after_propagate;
    pair_ = std::make_unique<TransferPair>(coarse_, fine_, std::move(refinement.map), options_.node_restriction);
    const bool classical = options_.parareal.mode == parareal::Mode::classical;
    G_ = std::make_unique<ToyOcean>(classical ? fine_ : coarse_, options_.coarse_model);
    F_ = std::make_unique<ToyOcean>(fine_, options_.fine_model);
}

References OceanExperiment::references(const OceanState& u0, const fs::path& dir) const
{
    const auto& grid = options_.grid;
    References refs;
    refs.uninterrupted.push_back(u0);
    const long per_slice = std::lround(grid.slice_length / F_->config().dt);
    F_->propagate(u0, grid.slices * grid.slice_length, [&](long step, const OceanState& s) {
        if (step % per_slice == 0) refs.uninterrupted.push_back(s);
    });
    if (F_->config().clamp_after_propagate) {
        // a single propagation clamps only at its end
        clamp_bounds(refs.uninterrupted.back(), F_->config().bounds, &fine_);
    }

    refs.restarted.push_back(u0);
    for (int n = 1; n <= grid.slices; ++n) {
        const OceanState next = F_->propagate(refs.restarted.back(), grid.slice_length).state;
        if (dir.empty()) {
            std::stringstream buffer;
            write_restart(next, fine_.hash(), buffer);
            refs.restarted.push_back(read_restart(buffer, fine_));
        } else {
            const fs::path path = dir / ("slice" + std::to_string(n)) / "U.restart";
            write_restart(next, fine_, path);
            refs.restarted.push_back(read_restart(path, fine_));
        }
    }
    return refs;
}

parareal::Problem<OceanState, OceanState> OceanExperiment::problem(const int* iteration,
                                                                   std::vector<double>* coarse_seconds) const
{
    parareal::Problem<OceanState, OceanState> p;
    const double interval = options_.grid.slice_length;
    p.fine = [this, iteration, interval](const OceanState& u, int slice) {
        if (iteration && options_.inject_fine_failures.count({*iteration, slice})) {
            OceanState poisoned = u;
            const int i = fine_.masks().nodes[0].empty() ? 0 : fine_.masks().nodes[0].front();
            poisoned.temperature[i] = std::numeric_limits<double>::quiet_NaN();
            return F_->propagate(poisoned, interval).state;
        }
        return F_->propagate(u, interval).state;
    };
    p.coarse = [this, interval, coarse_seconds](const OceanState& g, int slice) {
        const auto t = std::chrono::steady_clock::now();
        OceanState out = G_->propagate(g, interval).state;
        if (coarse_seconds) {
            if (static_cast<int>(coarse_seconds->size()) <= slice) coarse_seconds->resize(slice + 1, 0.0);
            (*coarse_seconds)[slice] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
        }
        return out;
    };
    if (options_.parareal.mode == parareal::Mode::micro_macro) {
        p.lift = [this](const OceanState& g) { return pair_->lift(g); };
        p.restrict = [this](const OceanState& u) { return pair_->restrict(u); };
    }
    p.add_fine = add_difference;
    p.add_coarse = add_difference;
    p.increment = max_relative_difference;
    p.clamp_fine = [this](OceanState& s) { clamp_bounds(s, F_->config().bounds, &fine_); };
    const LayeredMesh* gmesh = &G_->mesh();
    p.clamp_coarse = [this, gmesh](OceanState& s) { clamp_bounds(s, G_->config().bounds, gmesh); };
    return p;
}

namespace {

std::string seconds_text(double s)
{
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(6);
    o << s;
    return o.str();
}

}  // namespace

OceanExperiment::Result OceanExperiment::run(const OceanState& u0, const References* refs, bool keep_history) const
{
    if (!u0.matches(fine_)) throw Error("parareal: initial state does not match the fine mesh");
    const int N = options_.grid.slices;
    const fs::path& dir = options_.run_dir;
    std::ofstream log;
    if (!dir.empty()) {
        fs::create_directories(dir);
        log.open(dir / "run.log");
        if (!log) throw Error("cannot write " + (dir / "run.log").string());
        log << "# iteration slice phase wall_seconds status\n";
    }

    int iteration = 0;
    std::vector<double> coarse_seconds;
    const auto problem_ = problem(&iteration, &coarse_seconds);

    Result result;
    const auto& sel = options_.diagnostics;
    std::vector<std::vector<double>> ref_u_diag, ref_r_diag;  // [diagnostic][slice]
    if (refs) {
        if (static_cast<int>(refs->uninterrupted.size()) != N + 1 || static_cast<int>(refs->restarted.size()) != N + 1)
            throw Error("parareal: references do not cover the slice grid");
        result.tables.push_back({"max_error", {}});
        for (const auto& name : sel.names) {
            result.tables.push_back({name, {}});
            std::vector<double> a, b;
            for (int n = 0; n <= N; ++n) {
                a.push_back(diag::evaluate(name, refs->uninterrupted[n], fine_, sel));
                b.push_back(diag::evaluate(name, refs->restarted[n], fine_, sel));
            }
            ref_u_diag.push_back(std::move(a));
            ref_r_diag.push_back(std::move(b));
        }
    }
    std::ofstream profile_csv;
    if (refs && !dir.empty()) {
        profile_csv.open(dir / ("layer_error__" + options_.run_id + ".csv"), std::ios::binary);
        profile_csv << "iteration,slice,field,layer,max_error,relative\n";
    }

    const LayeredMesh& gmesh = G_->mesh();
    auto observer = [&](const parareal::Iteration& rec, const OceanIterate& it) {
        const int k = rec.k;
        if (log) {
            for (int n = 1; n <= N; ++n) {
                const double c = n < static_cast<int>(coarse_seconds.size()) ? coarse_seconds[n] : 0.0;
                const auto status = parareal::status_name(rec.status[n - 1]);
                if (it.G[n] && rec.status[n - 1] != parareal::SliceStatus::converged)
                    log << k << ' ' << n << " coarse " << seconds_text(c) << ' ' << status << '\n';
                if (k > 0 && rec.status[n - 1] != parareal::SliceStatus::converged)
                    log << k << ' ' << n << " fine " << seconds_text(rec.fine_seconds[n - 1]) << ' ' << status << '\n';
            }
            log << k << " 0 increment " << format_double(rec.increment) << " ok\n";
            log.flush();
        }
        std::fill(coarse_seconds.begin(), coarse_seconds.end(), 0.0);
        if (!dir.empty() && options_.write_restarts) {
            const fs::path idir = dir / ("iter" + std::to_string(k));
            for (int n = 0; n <= N; ++n) {
                const fs::path sdir = idir / ("slice" + std::to_string(n));
                write_restart(it.U[n], fine_, sdir / "U.restart");
                if (it.G[n]) write_restart(*it.G[n], gmesh, sdir / "G.restart");
                if (it.F[n]) write_restart(*it.F[n], fine_, sdir / "F.restart");
            }
        }
        if (refs) {
            for (int n = 1; n <= N; ++n) {
                ErrorPoint e{k, n, max_relative_difference(it.U[n], refs->uninterrupted[n]),
                             max_relative_difference(it.U[n], refs->restarted[n])};
                result.errors.push_back(e);
                result.tables[0].rows.push_back({k, n, e.vs_uninterrupted, e.vs_uninterrupted, e.vs_restarted});
                for (std::size_t d = 0; d < sel.names.size(); ++d) {
                    const double v = diag::evaluate(sel.names[d], it.U[n], fine_, sel);
                    result.tables[d + 1].rows.push_back(
                        {k, n, v, std::abs(v - ref_u_diag[d][n]), std::abs(v - ref_r_diag[d][n])});
                }
                if (profile_csv) {
                    const auto prof = diag::layer_error_profile(it.U[n], refs->uninterrupted[n], fine_);
                    for (Field f : all_fields)
                        for (std::size_t l = 0; l < prof[f].size(); ++l)
                            profile_csv << k << ',' << n << ',' << field_name(f) << ',' << l << ','
                                        << format_double(prof[f][l].max_error) << ','
                                        << format_double(prof[f][l].relative) << '\n';
                }
            }
        }
        iteration = k + 1;
    };

    try {
        result.run = parareal::run<OceanState, OceanState>(u0, options_.grid, options_.parareal, problem_, observer,
                                                           keep_history);
    } catch (const parareal::Failure& f) {
        if (log) log << f.iteration() << ' ' << f.slice() << ' ' << f.phase() << " 0 aborted\n";
        throw;
    }
    if (log) log << result.run.iterations_done << " 0 outcome 0 " << parareal::outcome_name(result.run.outcome) << '\n';
    if (refs && !dir.empty()) diag::emit_convergence_csv(result.tables, options_.run_id, dir);
    return result;
}

double measured_ratio(const fs::path& run_log)
{
    std::ifstream in(run_log);
    if (!in) throw Error("cannot read " + run_log.string());
    double fine = 0.0, coarse = 0.0;
    long nf = 0, nc = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        int k = 0, n = 0;
        std::string phase, secs, status;
        if (!(row >> k >> n >> phase >> secs >> status)) throw Error("run.log: malformed line '" + line + "'");
        const auto v = parse_double(secs);
        if (!v) throw Error("run.log: bad wall time '" + secs + "'");
        if (phase == "fine" && status == "ok") {
            fine += *v;
            ++nf;
        } else if (phase == "coarse" && status != "coarse_failed") {
            coarse += *v;
            ++nc;
        }
    }
    if (nf == 0 || nc == 0 || coarse <= 0.0) throw Error("run.log: no usable fine and coarse timings");
    return (fine / nf) / (coarse / nc);
}

}  // namespace pinto
