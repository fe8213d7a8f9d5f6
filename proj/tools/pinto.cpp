#include "pinto/experiment.hpp"
#include "pinto/parareal.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace pinto;

namespace {

Geometry geometry_of(const std::string& name)
{
    if (name == "spherical") return Geometry::spherical;
    if (name == "planar") return Geometry::planar;
    throw ConfigError("unknown geometry '" + name + "' (spherical, planar)");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Micro-macro Parareal on nested layered triangular meshes"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = -1;
    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", config_path, "experiment config (key=value)");
        if (config_required) opt->required();
        cmd->add_option("--out", out_dir, "output directory (overrides run.out)");
        cmd->add_option("--workers", workers, "fine-sweep worker count (overrides run.workers)")->check(CLI::NonNegativeNumber);
    };

    auto* mesh = app.add_subcommand("mesh", "mesh tools");
    mesh->require_subcommand(1);
    std::string mesh_in, mesh_out, bottom = "linear", geometry = "spherical", kind = "toy";
    auto* refine = mesh->add_subcommand("refine", "congruent refinement of a mesh directory");
    refine->add_option("input", mesh_in, "directory with nod2d.out, elem2d.out, aux3d.out")->required();
    refine->add_option("output", mesh_out, "output directory")->required();
    refine->add_option("--bottom", bottom, "midpoint bottom interpolation")->check(CLI::IsMember({"linear", "nearest"}));
    refine->add_option("--geometry", geometry, "spherical or planar")->check(CLI::IsMember({"spherical", "planar"}));
    auto* stats = mesh->add_subcommand("stats", "mesh summary");
    stats->add_option("input", mesh_in, "mesh directory")->required();
    stats->add_option("--geometry", geometry, "spherical or planar")->check(CLI::IsMember({"spherical", "planar"}));
    auto* generate = mesh->add_subcommand("generate", "write a generated mesh");
    generate->add_option("--kind", kind, "toy, reference, triangle or config")
        ->check(CLI::IsMember({"toy", "reference", "triangle", "config"}));
    generate->add_option("--config", config_path, "config for --kind config");
    generate->add_option("--out", out_dir, "output directory")->required();

    auto* run = app.add_subcommand("run", "serial references or Parareal");
    run->require_subcommand(1);
    auto* serial = run->add_subcommand("serial", "serial fine references");
    add_common(serial, true);
    auto* para = run->add_subcommand("parareal", "Parareal run");
    add_common(para, true);

    auto* diagnose = app.add_subcommand("diagnose", "convergence tables of a finished run");
    add_common(diagnose, true);
    std::string select;
    bool select_given = false;
    diagnose->add_option("--select", select, "comma-separated diagnostics (sst, sss, temp@<depth>, amoc)")
        ->each([&](const std::string&) { select_given = true; });

    auto* speedup = app.add_subcommand("speedup", "speedup estimate table");
    double m = 0.0;
    int k_max = 3, slices = 10;
    std::string log_path;
    auto* m_opt = speedup->add_option("--m", m, "fine/coarse run-time ratio")->check(CLI::PositiveNumber);
    speedup->add_option("-K,--K", k_max, "largest iteration count")->check(CLI::PositiveNumber);
    speedup->add_option("--Nt", slices, "slice count")->check(CLI::PositiveNumber);
    speedup->add_option("--log", log_path, "run.log to measure m from");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    auto load = [&]() {
        ExperimentConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.out = out_dir;
        if (workers >= 0) {
            cfg.workers = workers;
            cfg.parareal.workers = workers;
        }
        cfg.validate();
        return cfg;
    };

    try {
        if (refine->parsed()) {
            cmd_mesh_refine(mesh_in, mesh_out, parse_bottom_method(bottom), geometry_of(geometry), std::cout);
        } else if (stats->parsed()) {
            cmd_mesh_stats(mesh_in, geometry_of(geometry), std::cout);
        } else if (generate->parsed()) {
            std::optional<ExperimentConfig> cfg;
            if (!config_path.empty()) cfg = load_config(config_path);
            cmd_mesh_generate(kind, cfg ? &*cfg : nullptr, out_dir, std::cout);
        } else if (serial->parsed()) {
            cmd_run_serial(load(), std::cout);
        } else if (para->parsed()) {
            return cmd_run_parareal(load(), std::cout);
        } else if (diagnose->parsed()) {
            const ExperimentConfig cfg = load();
            diag::Selection sel = cfg.diagnostics;
            if (select_given) {
                try {
                    sel.names = diag::Selection::parse(select).names;
                } catch (const Error& e) {
                    throw ConfigError(e.what());
                }
            }
            cmd_diagnose(cfg, sel, std::cout);
        } else if (speedup->parsed()) {
            std::optional<double> given;
            if (*m_opt) given = m;
            std::optional<std::filesystem::path> log;
            if (!log_path.empty()) log = log_path;
            cmd_speedup(given, k_max, slices, log, std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const parareal::Failure& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return exit_numerical;
    } catch (const BlowUp& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_ok;
}
