#include "pinto/experiment.hpp"

#include "pinto/format.hpp"
#include "pinto/mesh_gen.hpp"
#include "pinto/mesh_io.hpp"
#include "pinto/restart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace pinto {

namespace fs = std::filesystem;

LayeredMesh toy_mesh(const ToyMeshConfig& toy, Geometry geometry)
{
    gen::BoxSpec b;
    b.lon0 = toy.lon0;
    b.lon1 = toy.lon1;
    b.lat0 = toy.lat0;
    b.lat1 = toy.lat1;
    b.nx = toy.nx;
    b.ny = toy.ny;
    b.jitter = toy.jitter;
    b.random_diagonals = true;
    b.seed = toy.seed;
    b.levels.clear();
    for (double d : toy.depths) b.levels.push_back(-d);
    b.geometry = geometry;
    if (toy.shelf)
        b.bottom = gen::basin_bottom(b, -*toy.shelf, -toy.bottom);
    else
        b.bottom = [deep = -toy.bottom](LonLat) { return deep; };
    return gen::box_mesh(b);
}

LayeredMesh build_coarse_mesh(const ExperimentConfig& cfg)
{
    if (cfg.coarse_mesh) return read_mesh(*cfg.coarse_mesh, cfg.geometry);
    return toy_mesh(cfg.toy, cfg.geometry);
}

Refinement build_refinement(const ExperimentConfig& cfg, const LayeredMesh& coarse)
{
    if (!cfg.fine_mesh) return refine_congruent(coarse, cfg.bottom_method);
    Refinement r;
    r.fine = read_mesh(*cfg.fine_mesh, cfg.geometry);
    std::ifstream in(*cfg.fine_mesh / "refmap.txt");
    if (!in) throw Error("cannot read " + (*cfg.fine_mesh / "refmap.txt").string());
    r.map = read_refmap(in);
    return r;
}

OceanOptions ocean_options(const ExperimentConfig& cfg, const LayeredMesh& fine)
{
    OceanOptions o;
    o.grid = cfg.grid();
    o.parareal = cfg.parareal;
    o.parareal.workers = cfg.workers;
    o.coarse_model = cfg.coarse_model();
    o.fine_model = cfg.fine_model();
    o.node_restriction = cfg.node_restriction;
    o.inject_fine_failures = cfg.inject_fine;
    o.run_dir = cfg.out;
    o.write_restarts = cfg.write_restarts;
    o.diagnostics = cfg.diagnostics;
    if (cfg.region_lon) o.diagnostics.region = diag::longitude_window(fine, cfg.region_lon->first, cfg.region_lon->second);
    o.run_id = cfg.run_id;
    return o;
}

std::unique_ptr<OceanExperiment> make_experiment(const ExperimentConfig& cfg)
{
    LayeredMesh coarse = build_coarse_mesh(cfg);
    Refinement r = build_refinement(cfg, coarse);
    OceanOptions o = ocean_options(cfg, r.fine);
    return std::make_unique<OceanExperiment>(std::move(coarse), std::move(r), std::move(o));
}

void cmd_mesh_refine(const fs::path& in, const fs::path& out, BottomMethod method, Geometry geometry, std::ostream& report)
{
    const LayeredMesh coarse = read_mesh(in, geometry);
    const Refinement r = refine_congruent(coarse, method);
    write_mesh(r.fine, out);
    {
        std::ofstream map(out / "refmap.txt");
        if (!map) throw Error("cannot write " + (out / "refmap.txt").string());
        write_refmap(map, r.map);
    }
    export_gridfile(r.fine, out / "gridfile.txt");
    report << "coarse: " << coarse.node_count() << " nodes, " << coarse.element_count() << " elements, "
           << coarse.edges().edges.size() << " edges\n"
           << "fine:   " << r.fine.node_count() << " nodes, " << r.fine.element_count() << " elements\n";
}

void cmd_mesh_stats(const fs::path& dir, Geometry geometry, std::ostream& report)
{
    const LayeredMesh m = read_mesh(dir, geometry);
    double smin = 1.0, smax = 0.0, ssum = 0.0, area = 0.0;
    for (int e = 0; e < m.element_count(); ++e) {
        const Triangle c = m.corners(e);
        const double s = skewness(c[0], c[1], c[2]);
        smin = std::min(smin, s);
        smax = std::max(smax, s);
        ssum += s;
        area += m.area(e);
    }
    const char* orientation = "empty";
    switch (m.original_orientation()) {
    case Orientation::empty: break;
    case Orientation::counterclockwise: orientation = "counterclockwise"; break;
    case Orientation::clockwise: orientation = "clockwise"; break;
    case Orientation::mixed: orientation = "mixed"; break;
    }
    report << "nodes " << m.node_count() << "\n"
           << "elements " << m.element_count() << "\n"
           << "edges " << m.edges().edges.size() << "\n"
           << "boundary_edges " << m.edges().boundary_count() << "\n"
           << "layers " << m.layer_count() << "\n"
           << "orientation " << orientation << "\n"
           << "skew_min " << format_double(smin) << "\n"
           << "skew_max " << format_double(smax) << "\n"
           << "skew_mean " << format_double(m.element_count() ? ssum / m.element_count() : 0.0) << "\n"
           << "area_m2 " << format_double(area) << "\n"
           << "hash " << m.hash() << "\n";
}

void cmd_mesh_generate(const std::string& kind, const ExperimentConfig* cfg, const fs::path& out, std::ostream& report)
{
    LayeredMesh m;
    if (kind == "config") {
        if (!cfg) throw ConfigError("mesh generate config: --config is required");
        m = build_coarse_mesh(*cfg);
    } else if (kind == "toy") {
        m = toy_mesh(ToyMeshConfig{}, Geometry::spherical);
    } else if (kind == "reference") {
        m = gen::reference_count_mesh();
    } else if (kind == "triangle") {
        m = gen::example_triangle();
    } else {
        throw ConfigError("unknown mesh kind '" + kind + "' (toy, reference, triangle, config)");
    }
    write_mesh(m, out);
    report << kind << ": " << m.node_count() << " nodes, " << m.element_count() << " elements -> " << out.string() << "\n";
}

namespace {

void write_references(const References& refs, const LayeredMesh& fine, const fs::path& dir)
{
    for (std::size_t n = 0; n < refs.uninterrupted.size(); ++n) {
        const std::string slice = "slice" + std::to_string(n);
        write_restart(refs.uninterrupted[n], fine, dir / "uninterrupted" / slice / "U.restart");
        write_restart(refs.restarted[n], fine, dir / "restarted" / slice / "U.restart");
    }
}

double reference_gap(const References& refs)
{
    double gap = 0.0;
    for (std::size_t n = 0; n < refs.uninterrupted.size(); ++n)
        gap = std::max(gap, max_abs_difference(refs.uninterrupted[n], refs.restarted[n]));
    return gap;
}

}  // namespace

double cmd_run_serial(const ExperimentConfig& cfg, std::ostream& report)
{
    auto ex = make_experiment(cfg);
    const OceanState u0 = ex->initial_state(cfg.seed, cfg.noise);
    const References refs = ex->references(u0);
    write_references(refs, ex->fine(), cfg.out / "reference");
    const double gap = reference_gap(refs);
    report << "serial fine reference: " << cfg.slices << " slices of " << format_double(cfg.slice_days)
           << " days -> " << (cfg.out / "reference").string() << "\n"
           << "max gap uninterrupted vs restarted: " << format_double(gap) << "\n";
    return gap;
}

ExitCode cmd_run_parareal(const ExperimentConfig& cfg, std::ostream& report)
{
    auto ex = make_experiment(cfg);
    fs::create_directories(cfg.out);
    {
        std::ofstream copy(cfg.out / "config.txt");
        copy << render_config(cfg);
    }
    const OceanState u0 = ex->initial_state(cfg.seed, cfg.noise);
    const References refs = ex->references(u0);
    write_references(refs, ex->fine(), cfg.out / "reference");
    const auto result = ex->run(u0, &refs);
    const auto& run = result.run;
    report << "mode " << (cfg.parareal.mode == parareal::Mode::classical ? "classical" : "micro_macro") << ", "
           << cfg.slices << " slices, coarse " << ex->coarse().node_count() << " nodes, fine " << ex->fine().node_count()
           << " nodes\n";
    report << "iteration increment max_error_uninterrupted max_error_restarted failed_slices\n";
    for (const auto& rec : run.iterations) {
        double eu = 0.0, er = 0.0;
        for (const auto& e : result.errors)
            if (e.iteration == rec.k) {
                eu = std::max(eu, e.vs_uninterrupted);
                er = std::max(er, e.vs_restarted);
            }
        std::string failed;
        for (std::size_t n = 0; n < rec.status.size(); ++n)
            if (rec.status[n] == parareal::SliceStatus::fine_failed || rec.status[n] == parareal::SliceStatus::coarse_failed)
                failed += (failed.empty() ? "" : ",") + std::to_string(n + 1);
        report << rec.k << ' ' << format_double(rec.increment) << ' ' << format_double(eu) << ' ' << format_double(er)
               << ' ' << (failed.empty() ? "-" : failed) << '\n';
    }
    report << "outcome " << parareal::outcome_name(run.outcome) << " after " << run.iterations_done << " iterations\n";
    return run.outcome == parareal::Outcome::max_iterations ? exit_not_converged : exit_ok;
}

std::vector<fs::path> cmd_diagnose(const ExperimentConfig& cfg, const diag::Selection& selection, std::ostream& report)
{
    if (selection.names.empty()) {
        report << "no diagnostics selected\n";
        return {};
    }
    selection.validate();
    LayeredMesh coarse = build_coarse_mesh(cfg);
    Refinement r = build_refinement(cfg, coarse);
    const LayeredMesh& fine = r.fine;
    diag::Selection sel = selection;
    if (cfg.region_lon && sel.region.empty()) sel.region = diag::longitude_window(fine, cfg.region_lon->first, cfg.region_lon->second);

    const fs::path dir = cfg.out;
    auto slice_path = [](const fs::path& base, int n) { return base / ("slice" + std::to_string(n)) / "U.restart"; };
    std::vector<OceanState> ref_u, ref_r;
    for (int n = 0; n <= cfg.slices; ++n) {
        ref_u.push_back(read_restart(slice_path(dir / "reference" / "uninterrupted", n), fine));
        ref_r.push_back(read_restart(slice_path(dir / "reference" / "restarted", n), fine));
    }
    std::vector<diag::ConvergenceTable> tables;
    for (const auto& name : sel.names) tables.push_back({name, {}});
    for (int k = 0;; ++k) {
        const fs::path idir = dir / ("iter" + std::to_string(k));
        if (!fs::is_directory(idir)) {
            if (k == 0) throw Error("diagnose: no iterations under " + dir.string());
            break;
        }
        for (int n = 1; n <= cfg.slices; ++n) {
            const OceanState u = read_restart(slice_path(idir, n), fine);
            for (std::size_t d = 0; d < sel.names.size(); ++d) {
                const double v = diag::evaluate(sel.names[d], u, fine, sel);
                const double a = diag::evaluate(sel.names[d], ref_u[n], fine, sel);
                const double b = diag::evaluate(sel.names[d], ref_r[n], fine, sel);
                tables[d].rows.push_back({k, n, v, std::abs(v - a), std::abs(v - b)});
            }
        }
    }
    auto paths = diag::emit_convergence_csv(tables, cfg.run_id, dir);
    for (const auto& p : paths) report << p.string() << "\n";
    return paths;
}

void cmd_speedup(std::optional<double> m, int k_max, int slices, const std::optional<fs::path>& run_log, std::ostream& report)
{
    if (!m) {
        if (!run_log) throw ConfigError("speedup: give --m or --log");
        m = measured_ratio(*run_log);
        report << "m " << format_double(*m) << " (from " << run_log->string() << ")\n";
    }
    if (k_max < 1 || slices < 1) throw ConfigError("speedup: K and N_t must be at least 1");
    report << "K S_K\n";
    for (int k = 1; k <= k_max; ++k) report << k << ' ' << format_double(parareal::speedup_estimate(*m, k, slices)) << '\n';
}

}  // namespace pinto
