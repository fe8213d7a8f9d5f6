#pragma once

#include "pinto/geometry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace pinto::parareal {

struct SliceGrid {
    double t0 = 0.0;
    double slice_length = 1.0;  ///< ΔT, seconds
    int slices = 1;             ///< N_t

    double time(int n) const { return t0 + n * slice_length; }
    void validate() const
    {
        if (slices < 1) throw Error("slice grid: slice count must be at least 1");
        if (!(slice_length > 0.0)) throw Error("slice grid: slice length must be positive");
    }
};

enum class Mode { classical, micro_macro };
enum class ClampPolicy { off, after_update, after_propagate };
enum class FailurePolicy { abort, skip_update, reinit_from_previous };

struct Config {
    Mode mode = Mode::micro_macro;
    int max_iterations = 1;  ///< K_max
    double epsilon = 1e-2;
    ClampPolicy clamp = ClampPolicy::off;
    FailurePolicy failure = FailurePolicy::abort;
    int workers = 0;  ///< 0: OpenMP default
    bool parallel = true;

    void validate(const SliceGrid& grid) const
    {
        if (max_iterations < 1 || max_iterations > grid.slices)
            throw Error("parareal: K_max must lie in [1, N_t]");
        if (!(epsilon >= 0.0)) throw Error("parareal: epsilon must be non-negative");
        if (workers < 0) throw Error("parareal: worker count must be non-negative");
    }
};

/// Wrapping type for propagator failures, carrying slice and iteration.
class Failure : public Error {
public:
    Failure(const std::string& phase, int iteration, int slice, const std::string& what)
        : Error(phase + " failure in iteration " + std::to_string(iteration) + ", slice " + std::to_string(slice) +
                ": " + what),
          phase_(phase), iteration_(iteration), slice_(slice)
    {
    }
    const std::string& phase() const { return phase_; }
    int iteration() const { return iteration_; }
    int slice() const { return slice_; }

private:
    std::string phase_;
    int iteration_;
    int slice_;
};

/// Propagators and transfers. Slices are numbered 1..N_t by their end
/// point; a propagator for slice n maps the state at t_{n-1} to t_n.
/// For Mode::classical Fine and Coarse must be the same type; lift and
/// restrict are then unused.
template <typename Fine, typename Coarse>
struct Problem {
    std::function<Fine(const Fine&, int slice)> fine;
    std::function<Coarse(const Coarse&, int slice)> coarse;
    std::function<Fine(const Coarse&)> lift;
    std::function<Coarse(const Fine&)> restrict;
    /// base + (plus - minus), entrywise, exact when plus == minus
    std::function<Fine(const Fine&, const Fine&, const Fine&)> add_fine;
    std::function<Coarse(const Coarse&, const Coarse&, const Coarse&)> add_coarse;
    /// Stopping measure between consecutive iterates of one slice.
    std::function<double(const Fine& next, const Fine& prev)> increment;
    /// Optional bound clamps for ClampPolicy::after_update.
    std::function<void(Fine&)> clamp_fine;
    std::function<void(Coarse&)> clamp_coarse;
};

enum class SliceStatus { ok, converged, fine_failed, coarse_failed };

inline const char* status_name(SliceStatus s)
{
    switch (s) {
    case SliceStatus::ok: return "ok";
    case SliceStatus::converged: return "converged";
    case SliceStatus::fine_failed: return "fine_failed";
    case SliceStatus::coarse_failed: return "coarse_failed";
    }
    return "?";
}

struct Iteration {
    int k = 0;
    double increment = 0.0;                ///< max over slices, 0 for k = 0
    std::vector<SliceStatus> status;       ///< per slice 1..N_t (index n-1)
    std::vector<double> fine_seconds;      ///< per slice, 0 where not run
    double fine_sweep_seconds = 0.0;
    double coarse_seconds = 0.0;
    std::vector<std::string> messages;     ///< failure descriptions
};

enum class Outcome { converged, finite_termination, max_iterations };

inline const char* outcome_name(Outcome o)
{
    switch (o) {
    case Outcome::converged: return "converged";
    case Outcome::finite_termination: return "finite_termination";
    case Outcome::max_iterations: return "max_iterations";
    }
    return "?";
}

/// Iterate k holds U^k_n for n = 0..N_t, the coarse values G^k_n and the
/// fine values F^{k-1}_n that produced it (empty for k = 0 and for slices
/// not propagated).
template <typename Fine, typename Coarse>
struct Iterate {
    std::vector<Fine> U;
    std::vector<std::optional<Coarse>> G;
    std::vector<std::optional<Fine>> F;
};

template <typename Fine, typename Coarse>
struct Run {
    std::vector<Iteration> iterations;
    std::vector<Iterate<Fine, Coarse>> history;  ///< empty unless keep_history
    std::vector<Fine> U;                         ///< final iterate
    Outcome outcome = Outcome::max_iterations;
    int iterations_done = 0;
};

/// S_K = min(m / (K + 1), N_t / K): fine-to-coarse run-time ratio m, K
/// iterations, N_t slices.
inline double speedup_estimate(double m, int K, int slices)
{
    if (!(m > 0.0) || K < 1 || slices < 1) throw Error("speedup: need m > 0, K >= 1, N_t >= 1");
    return std::min(m / (K + 1), static_cast<double>(slices) / K);
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

template <typename Fine, typename Coarse>
Coarse to_coarse(const Problem<Fine, Coarse>& p, const Fine& u)
{
    if constexpr (std::is_same_v<Fine, Coarse>)
        return p.restrict ? p.restrict(u) : u;
    else
        return p.restrict(u);
}

template <typename Fine, typename Coarse>
Fine to_fine(const Problem<Fine, Coarse>& p, const Coarse& g)
{
    if constexpr (std::is_same_v<Fine, Coarse>)
        return p.lift ? p.lift(g) : g;
    else
        return p.lift(g);
}

}  // namespace detail

/// U^0_0 = u0, G^0_{n} = G(R(U^0_{n-1})), U^0_n = L(G^0_n). In classical mode
/// R and L are the identity and this is the serial coarse solution.
template <typename Fine, typename Coarse>
Iterate<Fine, Coarse> initial_coarse_sweep(const Fine& u0, const SliceGrid& grid, const Problem<Fine, Coarse>& p,
                                           Mode mode, double* seconds = nullptr)
{
    const auto t = std::chrono::steady_clock::now();
    Iterate<Fine, Coarse> it;
    const int N = grid.slices;
    it.U.resize(N + 1);
    it.G.resize(N + 1);
    it.F.resize(N + 1);
    it.U[0] = u0;
    for (int n = 1; n <= N; ++n) {
        Coarse start = mode == Mode::classical ? detail::to_coarse(p, it.U[n - 1]) : p.restrict(it.U[n - 1]);
        try {
            it.G[n] = p.coarse(start, n);
        } catch (const std::exception& e) {
            throw Failure("coarse", 0, n, e.what());
        }
        it.U[n] = mode == Mode::classical ? detail::to_fine(p, *it.G[n]) : p.lift(*it.G[n]);
    }
    if (seconds) *seconds = detail::seconds_since(t);
    return it;
}

/// F(U_{n-1}) for slices first..N_t, in parallel over slices. Failures are
/// captured per slice; outputs do not depend on the schedule.
template <typename Fine, typename Coarse>
std::vector<std::optional<Fine>> fine_parallel_sweep(const std::vector<Fine>& U, int first, const Problem<Fine, Coarse>& p,
                                                     const Config& cfg, std::vector<std::string>& errors,
                                                     std::vector<double>& seconds)
{
    const int N = static_cast<int>(U.size()) - 1;
    std::vector<std::optional<Fine>> F(N + 1);
    errors.assign(N + 1, {});
    seconds.assign(N + 1, 0.0);
    auto one = [&](int n) {
        const auto t = std::chrono::steady_clock::now();
        try {
            F[n] = p.fine(U[n - 1], n);
        } catch (const std::exception& e) {
            errors[n] = e.what();
            if (errors[n].empty()) errors[n] = "unknown failure";
        }
        seconds[n] = detail::seconds_since(t);
    };
    if (!cfg.parallel) {
        for (int n = first; n <= N; ++n) one(n);
    } else {
        const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (int n = first; n <= N; ++n) one(n);
    }
    return F;
}

/// U^{k+1}_n = F^k_n + (G^{k+1}_n - G^k_n)
template <typename State>
State correct_classical(const State& g_new, const State& f_old, const State& g_old,
                        const std::function<State(const State&, const State&, const State&)>& add)
{
    return add(f_old, g_new, g_old);
}

/// Ũ = R(F) + (G_new - G_old) on the coarse mesh, then
/// U = F + (L(Ũ) - L(R(F))) on the fine mesh. Written in this order so that
/// equal coarse values return F bitwise.
template <typename Fine, typename Coarse>
Fine correct_micro_macro(const Coarse& g_new, const Fine& f_old, const Coarse& g_old, const Problem<Fine, Coarse>& p,
                         bool clamp)
{
    const Coarse rf = p.restrict(f_old);
    Coarse tilde = p.add_coarse(rf, g_new, g_old);
    if (clamp && p.clamp_coarse) p.clamp_coarse(tilde);
    Fine u = p.add_fine(f_old, p.lift(tilde), p.lift(rf));
    if (clamp && p.clamp_fine) p.clamp_fine(u);
    return u;
}

/// max over slices of the increment measure.
template <typename Fine>
double stopping_measure(const std::vector<Fine>& next, const std::vector<Fine>& prev,
                        const std::function<double(const Fine&, const Fine&)>& increment)
{
    double worst = 0.0;
    for (std::size_t n = 1; n < next.size(); ++n) worst = std::max(worst, increment(next[n], prev[n]));
    return worst;
}

inline bool stopping_check(double measure, double epsilon) { return measure <= epsilon; }

/// Called after every iteration (including k = 0) with the iterate.
template <typename Fine, typename Coarse>
using Observer = std::function<void(const Iteration&, const Iterate<Fine, Coarse>&)>;

/// Full Parareal run. Slices 1..k are exact after iteration k and are not
/// propagated again.
template <typename Fine, typename Coarse>
Run<Fine, Coarse> run(const Fine& u0, const SliceGrid& grid, const Config& cfg, const Problem<Fine, Coarse>& p,
                      const Observer<Fine, Coarse>& observer = {}, bool keep_history = false)
{
    grid.validate();
    cfg.validate(grid);
    if constexpr (!std::is_same_v<Fine, Coarse>)
        if (cfg.mode == Mode::classical) throw Error("parareal: classical mode needs one state type");
    const int N = grid.slices;
    const bool clamp = cfg.clamp == ClampPolicy::after_update;

    Run<Fine, Coarse> out;
    Iteration rec0;
    rec0.status.assign(N, SliceStatus::ok);
    rec0.fine_seconds.assign(N, 0.0);
    Iterate<Fine, Coarse> cur = initial_coarse_sweep(u0, grid, p, cfg.mode, &rec0.coarse_seconds);
    out.iterations.push_back(rec0);
    if (observer) observer(rec0, cur);
    if (keep_history) out.history.push_back(cur);

    for (int k = 0; k < cfg.max_iterations; ++k) {
        Iteration rec;
        rec.k = k + 1;
        rec.status.assign(N, SliceStatus::ok);
        rec.fine_seconds.assign(N, 0.0);
        for (int n = 1; n <= k; ++n) rec.status[n - 1] = SliceStatus::converged;

        // slices 1..k are exact; propagate from U^k_k onward
        std::vector<std::string> errors;
        std::vector<double> seconds;
        const auto tf = std::chrono::steady_clock::now();
        auto F = fine_parallel_sweep(cur.U, k + 1, p, cfg, errors, seconds);
        rec.fine_sweep_seconds = detail::seconds_since(tf);
        for (int n = k + 1; n <= N; ++n) {
            rec.fine_seconds[n - 1] = seconds[n];
            if (!F[n]) {
                rec.status[n - 1] = SliceStatus::fine_failed;
                rec.messages.push_back("slice " + std::to_string(n) + ": " + errors[n]);
                if (cfg.failure == FailurePolicy::abort) throw Failure("fine", k + 1, n, errors[n]);
            }
        }

        Iterate<Fine, Coarse> next;
        next.U.resize(N + 1);
        next.G.resize(N + 1);
        next.F = F;
        next.U[0] = u0;
        const auto tc = std::chrono::steady_clock::now();
        for (int n = 1; n <= N; ++n) {
            if (n <= k) {
                next.U[n] = cur.U[n];
                next.G[n] = cur.G[n];
                continue;
            }
            if (n == k + 1) {
                // U^{k+1}_k = U^k_k, so the coarse re-solve would repeat G^k_{k+1}
                next.G[n] = cur.G[n];
            } else {
                const Coarse start = cfg.mode == Mode::classical ? detail::to_coarse(p, next.U[n - 1])
                                                                 : p.restrict(next.U[n - 1]);
                try {
                    next.G[n] = p.coarse(start, n);
                } catch (const std::exception& e) {
                    if (cfg.failure == FailurePolicy::abort) throw Failure("coarse", k + 1, n, e.what());
                    rec.messages.push_back("slice " + std::to_string(n) + ": coarse: " + e.what());
                    if (cfg.failure == FailurePolicy::reinit_from_previous) {
                        next.G[n] = cur.G[n];
                        rec.status[n - 1] = SliceStatus::coarse_failed;
                    } else {
                        next.U[n] = cur.U[n];
                        next.G[n] = cur.G[n];
                        rec.status[n - 1] = SliceStatus::coarse_failed;
                        continue;
                    }
                }
            }
            if (!F[n]) {
                // no fine value: keep the previous iterate for this slice
                next.U[n] = cur.U[n];
                continue;
            }
            if (cfg.mode == Mode::classical) {
                if constexpr (std::is_same_v<Fine, Coarse>) {
                    next.U[n] = correct_classical<Fine>(*next.G[n], *F[n], *cur.G[n], p.add_fine);
                    if (clamp && p.clamp_fine) p.clamp_fine(next.U[n]);
                }
            } else {
                next.U[n] = correct_micro_macro(*next.G[n], *F[n], *cur.G[n], p, clamp);
            }
        }
        rec.coarse_seconds = detail::seconds_since(tc);
        rec.increment = stopping_measure(next.U, cur.U, p.increment);

        cur = std::move(next);
        out.iterations.push_back(rec);
        out.iterations_done = k + 1;
        if (observer) observer(rec, cur);
        if (keep_history) out.history.push_back(cur);

        if (stopping_check(rec.increment, cfg.epsilon)) {
            out.outcome = Outcome::converged;
            break;
        }
        if (k + 1 == N) {
            out.outcome = Outcome::finite_termination;
            break;
        }
    }
    out.U = cur.U;
    return out;
}

}  // namespace pinto::parareal
