#include "pinto/config.hpp"

#include "pinto/format.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace pinto {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    for (;;) {
        const auto at = s.find(sep);
        out.push_back(trim(s.substr(0, at)));
        if (at == std::string_view::npos) break;
        s.remove_prefix(at + 1);
    }
    return out;
}

double to_double(std::string_view v)
{
    const auto d = parse_double(v);
    if (!d || !std::isfinite(*d)) throw ConfigError("expected a number, got '" + std::string(v) + "'");
    return *d;
}

long long to_int(std::string_view v)
{
    const auto i = parse_int(v);
    if (!i) throw ConfigError("expected an integer, got '" + std::string(v) + "'");
    return *i;
}

bool to_bool(std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

template <typename E>
E choose(std::string_view v, std::initializer_list<std::pair<const char*, E>> options)
{
    std::string names;
    for (const auto& [name, value] : options) {
        if (v == name) return value;
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError("unknown value '" + std::string(v) + "' (" + names + ")");
}

const char* mode_name(parareal::Mode m) { return m == parareal::Mode::classical ? "classical" : "micro_macro"; }

const char* clamp_name(parareal::ClampPolicy c)
{
    switch (c) {
    case parareal::ClampPolicy::off: return "off";
    case parareal::ClampPolicy::after_update: return "after_update";
    case parareal::ClampPolicy::after_propagate: return "after_propagate";
    }
    return "?";
}

const char* failure_name(parareal::FailurePolicy f)
{
    switch (f) {
    case parareal::FailurePolicy::abort: return "abort";
    case parareal::FailurePolicy::skip_update: return "skip_update";
    case parareal::FailurePolicy::reinit_from_previous: return "reinit_from_previous";
    }
    return "?";
}

bool divides(double whole, double dt)
{
    const double q = whole / dt;
    return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

}  // namespace

parareal::SliceGrid ExperimentConfig::grid() const
{
    return {t0_days * seconds_per_day, slice_days * seconds_per_day, slices};
}

ModelConfig ExperimentConfig::coarse_model() const
{
    ModelConfig m = model;
    m.dt = seconds_per_day / coarse_spd;
    return m;
}

ModelConfig ExperimentConfig::fine_model() const
{
    ModelConfig m = model;
    m.dt = seconds_per_day / fine_spd;
    return m;
}

void ExperimentConfig::validate() const
{
    for (double spd : {coarse_spd, fine_spd}) {
        if (!(spd > 0.0) || !divides(seconds_per_day, seconds_per_day / spd) ||
            seconds_per_day / spd != std::floor(seconds_per_day / spd))
            throw ConfigError("steps per day must divide 86400 into whole seconds");
    }
    if (!(slice_days > 0.0)) throw ConfigError("grid.slice_days must be positive");
    if (slices < 1) throw ConfigError("grid.Nt must be at least 1");
    if (!(t0_days >= 0.0)) throw ConfigError("grid.t0_days must be non-negative");
    const double slice_seconds = slice_days * seconds_per_day;
    if (!divides(slice_seconds, seconds_per_day / coarse_spd) || !divides(slice_seconds, seconds_per_day / fine_spd))
        throw ConfigError("grid.slice_days must be a whole number of coarse and fine steps");
    if (parareal.max_iterations < 1 || parareal.max_iterations > slices)
        throw ConfigError("parareal.K_max must lie in [1, grid.Nt]");
    if (!(parareal.epsilon >= 0.0)) throw ConfigError("parareal.epsilon must be non-negative");
    if (workers < 0) throw ConfigError("run.workers must be non-negative");
    if (!(noise >= 0.0)) throw ConfigError("run.noise must be non-negative");
    for (const auto& [k, n] : inject_fine)
        if (k < 1 || n < 1 || n > slices) throw ConfigError("inject.fine entries must be iteration:slice with k >= 1, 1 <= n <= Nt");
    if (toy.nx < 2 || toy.ny < 2) throw ConfigError("toy.nx and toy.ny must be at least 2");
    if (!(toy.lon0 < toy.lon1) || !(toy.lat0 < toy.lat1)) throw ConfigError("toy box bounds are empty");
    if (toy.depths.size() < 2 || toy.depths[0] != 0.0) throw ConfigError("toy.levels must start at 0 and list at least two levels");
    for (std::size_t i = 1; i < toy.depths.size(); ++i)
        if (!(toy.depths[i] > toy.depths[i - 1])) throw ConfigError("toy.levels must increase with depth");
    if (!(toy.bottom > 0.0) || toy.bottom > toy.depths.back()) throw ConfigError("toy.bottom must lie within the levels");
    if (toy.shelf && (!(*toy.shelf > 0.0) || *toy.shelf > toy.bottom)) throw ConfigError("toy.shelf must lie between 0 and toy.bottom");
    if (fine_mesh && !coarse_mesh) throw ConfigError("mesh.fine needs mesh.coarse");
    if (coarse_mesh && !fs::is_directory(*coarse_mesh)) throw ConfigError("mesh.coarse: no such directory " + coarse_mesh->string());
    if (fine_mesh && !fs::is_directory(*fine_mesh)) throw ConfigError("mesh.fine: no such directory " + fine_mesh->string());
    if (fine_mesh && !fs::exists(*fine_mesh / "refmap.txt")) throw ConfigError("mesh.fine: missing refmap.txt");
    try {
        model.validate();
        diagnostics.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig parse_config(std::istream& in, const fs::path& base_dir, const std::string& source)
{
    ExperimentConfig c;
    c.model.box_lon0 = c.toy.lon0;
    c.model.box_lon1 = c.toy.lon1;
    c.model.box_lat0 = c.toy.lat0;
    c.model.box_lat1 = c.toy.lat1;
    c.model.damping = 1.0 / seconds_per_day;
    bool box_set = false;

    auto path = [&](std::string_view v) {
        fs::path p{std::string(v)};
        return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    };
    auto days_rate = [](std::string_view v) {
        const double d = to_double(v);
        if (d < 0.0) throw ConfigError("time scale must be non-negative");
        return d == 0.0 ? 0.0 : 1.0 / (d * seconds_per_day);
    };

    using Setter = std::function<void(std::string_view)>;
    const std::map<std::string, Setter, std::less<>> keys{
        {"mesh.coarse", [&](auto v) { c.coarse_mesh = path(v); }},
        {"mesh.fine", [&](auto v) { if (v != "refine") c.fine_mesh = path(v); }},
        {"mesh.geometry", [&](auto v) { c.geometry = choose<Geometry>(v, {{"spherical", Geometry::spherical}, {"planar", Geometry::planar}}); }},
        {"mesh.bottom_method", [&](auto v) {
             try { c.bottom_method = parse_bottom_method(v); } catch (const Error& e) { throw ConfigError(e.what()); }
         }},
        {"toy.lon0", [&](auto v) { c.toy.lon0 = to_double(v); }},
        {"toy.lon1", [&](auto v) { c.toy.lon1 = to_double(v); }},
        {"toy.lat0", [&](auto v) { c.toy.lat0 = to_double(v); }},
        {"toy.lat1", [&](auto v) { c.toy.lat1 = to_double(v); }},
        {"toy.nx", [&](auto v) { c.toy.nx = static_cast<int>(to_int(v)); }},
        {"toy.ny", [&](auto v) { c.toy.ny = static_cast<int>(to_int(v)); }},
        {"toy.jitter", [&](auto v) { c.toy.jitter = to_double(v); }},
        {"toy.seed", [&](auto v) { c.toy.seed = static_cast<std::uint64_t>(to_int(v)); }},
        {"toy.levels", [&](auto v) {
             c.toy.depths.clear();
             for (auto item : split(v, ',')) c.toy.depths.push_back(to_double(item));
         }},
        {"toy.bottom", [&](auto v) { c.toy.bottom = to_double(v); }},
        {"toy.shelf", [&](auto v) { c.toy.shelf = to_double(v); }},
        {"grid.t0_days", [&](auto v) { c.t0_days = to_double(v); }},
        {"grid.slice_days", [&](auto v) { c.slice_days = to_double(v); }},
        {"grid.Nt", [&](auto v) { c.slices = static_cast<int>(to_int(v)); }},
        {"model.coarse_spd", [&](auto v) { c.coarse_spd = to_double(v); }},
        {"model.fine_spd", [&](auto v) { c.fine_spd = to_double(v); }},
        {"model.diffusivity", [&](auto v) { c.model.diffusivity = to_double(v); }},
        {"model.vertical_diffusivity", [&](auto v) { c.model.vertical_diffusivity = to_double(v); }},
        {"model.gyre_velocity", [&](auto v) { c.model.gyre_velocity = to_double(v); }},
        {"model.overturning_velocity", [&](auto v) { c.model.overturning_velocity = to_double(v); }},
        {"model.decay_depth", [&](auto v) { c.model.decay_depth = to_double(v); }},
        {"model.damping_days", [&](auto v) { c.model.damping = days_rate(v); }},
        {"model.relax_days", [&](auto v) { c.model.relax_rate = days_rate(v); }},
        {"model.box", [&](auto v) {
             const auto parts = split(v, ',');
             if (parts.size() != 4) throw ConfigError("model.box needs lon0,lon1,lat0,lat1");
             c.model.box_lon0 = to_double(parts[0]);
             c.model.box_lon1 = to_double(parts[1]);
             c.model.box_lat0 = to_double(parts[2]);
             c.model.box_lat1 = to_double(parts[3]);
             box_set = true;
         }},
        {"bounds.temp_min", [&](auto v) { c.model.bounds.temp_min = to_double(v); }},
        {"bounds.temp_max", [&](auto v) { c.model.bounds.temp_max = to_double(v); }},
        {"bounds.salt_min", [&](auto v) { c.model.bounds.salt_min = to_double(v); }},
        {"bounds.salt_max", [&](auto v) { c.model.bounds.salt_max = to_double(v); }},
        {"parareal.mode", [&](auto v) {
             c.parareal.mode = choose<parareal::Mode>(v, {{"classical", parareal::Mode::classical}, {"micro_macro", parareal::Mode::micro_macro}});
         }},
        {"parareal.K_max", [&](auto v) { c.parareal.max_iterations = static_cast<int>(to_int(v)); }},
        {"parareal.epsilon", [&](auto v) { c.parareal.epsilon = to_double(v); }},
        {"parareal.clamp", [&](auto v) {
             c.parareal.clamp = choose<parareal::ClampPolicy>(v, {{"off", parareal::ClampPolicy::off},
                                                                  {"after_update", parareal::ClampPolicy::after_update},
                                                                  {"after_propagate", parareal::ClampPolicy::after_propagate}});
         }},
        {"parareal.failure", [&](auto v) {
             c.parareal.failure = choose<parareal::FailurePolicy>(v, {{"abort", parareal::FailurePolicy::abort},
                                                                      {"skip_update", parareal::FailurePolicy::skip_update},
                                                                      {"reinit_from_previous", parareal::FailurePolicy::reinit_from_previous}});
         }},
        {"parareal.node_restriction", [&](auto v) {
             c.node_restriction = choose<NodeRestriction>(v, {{"injection", NodeRestriction::injection}, {"conservative", NodeRestriction::conservative}});
         }},
        {"inject.fine", [&](auto v) {
             for (auto item : split(v, ',')) {
                 if (item.empty()) continue;
                 const auto kn = split(item, ':');
                 if (kn.size() != 2) throw ConfigError("inject.fine entries look like iteration:slice");
                 c.inject_fine.emplace(static_cast<int>(to_int(kn[0])), static_cast<int>(to_int(kn[1])));
             }
         }},
        {"diagnostics.select", [&](auto v) {
             try { c.diagnostics.names = diag::Selection::parse(v).names; } catch (const Error& e) { throw ConfigError(e.what()); }
         }},
        {"diagnostics.amoc_lat", [&](auto v) { c.diagnostics.amoc_lat = to_double(v); }},
        {"diagnostics.amoc_dphi", [&](auto v) { c.diagnostics.amoc_dphi = to_double(v); }},
        {"diagnostics.amoc_reduction", [&](auto v) {
             try { c.diagnostics.amoc_reduction = diag::parse_reduction(v); } catch (const Error& e) { throw ConfigError(e.what()); }
         }},
        {"diagnostics.region", [&](auto v) {
             const auto parts = split(v, ',');
             if (parts.size() != 2) throw ConfigError("diagnostics.region needs lon0,lon1");
             c.region_lon = std::make_pair(to_double(parts[0]), to_double(parts[1]));
         }},
        {"run.out", [&](auto v) { c.out = path(v); }},
        {"run.workers", [&](auto v) { c.workers = static_cast<int>(to_int(v)); }},
        {"run.seed", [&](auto v) { c.seed = static_cast<std::uint64_t>(to_int(v)); }},
        {"run.noise", [&](auto v) { c.noise = to_double(v); }},
        {"run.id", [&](auto v) {
             if (v.empty() || v.find_first_of("/\\ ") != std::string_view::npos) throw ConfigError("run.id must be a plain name");
             c.run_id = std::string(v);
         }},
        {"run.restarts", [&](auto v) { c.write_restarts = to_bool(v); }},
    };

    std::set<std::string, std::less<>> seen;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view text(line);
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        const auto where = source + ":" + std::to_string(number) + ": ";
        if (eq == std::string_view::npos) throw ConfigError(where + "expected key=value");
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
        if (!seen.emplace(key).second) throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
        try {
            it->second(value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + std::string(key) + ": " + e.what());
        }
    }
    if (!box_set) {
        c.model.box_lon0 = c.toy.lon0;
        c.model.box_lon1 = c.toy.lon1;
        c.model.box_lat0 = c.toy.lat0;
        c.model.box_lat1 = c.toy.lat1;
    }
    c.parareal.workers = c.workers;
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    return parse_config(in, path.parent_path(), path.string());
}

std::string render_config(const ExperimentConfig& c)
{
    std::ostringstream o;
    auto line = [&](const std::string& key, const std::string& value) { o << key << '=' << value << '\n'; };
    auto days = [](double rate) { return rate == 0.0 ? std::string("0") : format_double(1.0 / (rate * seconds_per_day)); };
    if (c.coarse_mesh) line("mesh.coarse", c.coarse_mesh->string());
    line("mesh.fine", c.fine_mesh ? c.fine_mesh->string() : "refine");
    line("mesh.geometry", c.geometry == Geometry::planar ? "planar" : "spherical");
    line("mesh.bottom_method", c.bottom_method == BottomMethod::linear ? "linear" : "nearest");
    line("toy.lon0", format_double(c.toy.lon0));
    line("toy.lon1", format_double(c.toy.lon1));
    line("toy.lat0", format_double(c.toy.lat0));
    line("toy.lat1", format_double(c.toy.lat1));
    line("toy.nx", std::to_string(c.toy.nx));
    line("toy.ny", std::to_string(c.toy.ny));
    line("toy.jitter", format_double(c.toy.jitter));
    line("toy.seed", std::to_string(c.toy.seed));
    std::string levels;
    for (double d : c.toy.depths) levels += (levels.empty() ? "" : ",") + format_depth(d);
    line("toy.levels", levels);
    line("toy.bottom", format_depth(c.toy.bottom));
    if (c.toy.shelf) line("toy.shelf", format_depth(*c.toy.shelf));
    line("grid.t0_days", format_double(c.t0_days));
    line("grid.slice_days", format_double(c.slice_days));
    line("grid.Nt", std::to_string(c.slices));
    line("model.coarse_spd", format_double(c.coarse_spd));
    line("model.fine_spd", format_double(c.fine_spd));
    line("model.diffusivity", format_double(c.model.diffusivity));
    line("model.vertical_diffusivity", format_double(c.model.vertical_diffusivity));
    line("model.gyre_velocity", format_double(c.model.gyre_velocity));
    line("model.overturning_velocity", format_double(c.model.overturning_velocity));
    line("model.decay_depth", format_double(c.model.decay_depth));
    line("model.damping_days", days(c.model.damping));
    line("model.relax_days", days(c.model.relax_rate));
    line("model.box", format_double(c.model.box_lon0) + "," + format_double(c.model.box_lon1) + "," +
                          format_double(c.model.box_lat0) + "," + format_double(c.model.box_lat1));
    if (c.model.bounds.temp_min) line("bounds.temp_min", format_double(*c.model.bounds.temp_min));
    if (c.model.bounds.temp_max) line("bounds.temp_max", format_double(*c.model.bounds.temp_max));
    if (c.model.bounds.salt_min) line("bounds.salt_min", format_double(*c.model.bounds.salt_min));
    if (c.model.bounds.salt_max) line("bounds.salt_max", format_double(*c.model.bounds.salt_max));
    line("parareal.mode", mode_name(c.parareal.mode));
    line("parareal.K_max", std::to_string(c.parareal.max_iterations));
    line("parareal.epsilon", format_double(c.parareal.epsilon));
    line("parareal.clamp", clamp_name(c.parareal.clamp));
    line("parareal.failure", failure_name(c.parareal.failure));
    line("parareal.node_restriction", c.node_restriction == NodeRestriction::injection ? "injection" : "conservative");
    if (!c.inject_fine.empty()) {
        std::string inj;
        for (const auto& [k, n] : c.inject_fine) inj += (inj.empty() ? "" : ",") + std::to_string(k) + ":" + std::to_string(n);
        line("inject.fine", inj);
    }
    std::string sel;
    for (const auto& n : c.diagnostics.names) sel += (sel.empty() ? "" : ",") + n;
    line("diagnostics.select", sel);
    line("diagnostics.amoc_lat", format_double(c.diagnostics.amoc_lat));
    line("diagnostics.amoc_dphi", format_double(c.diagnostics.amoc_dphi));
    line("diagnostics.amoc_reduction", c.diagnostics.amoc_reduction == diag::Reduction::max ? "max" : "extremum");
    if (c.region_lon) line("diagnostics.region", format_double(c.region_lon->first) + "," + format_double(c.region_lon->second));
    line("run.out", c.out.string());
    line("run.workers", std::to_string(c.workers));
    line("run.seed", std::to_string(c.seed));
    line("run.noise", format_double(c.noise));
    line("run.id", c.run_id);
    line("run.restarts", c.write_restarts ? "true" : "false");
    return o.str();
}

}  // namespace pinto
