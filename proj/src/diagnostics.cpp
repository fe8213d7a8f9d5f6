#include "pinto/diagnostics.hpp"

#include "pinto/format.hpp"
#include "pinto/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pinto::diag {

namespace {

int level_index(const LayeredMesh& mesh, double depth)
{
    const auto& lev = mesh.axis().levels();
    for (int j = 0; j < static_cast<int>(lev.size()); ++j)
        if (std::abs(lev[j] + depth) <= 1e-9 * std::max(1.0, depth)) return j;
    throw Error("depth " + format_depth(depth) + " m is not a level of the mesh");
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

DepthSpec DepthSpec::parse(std::string_view text)
{
    text = trim(text);
    DepthSpec d;
    const auto dash = text.find('-', 1);
    auto number = [&](std::string_view s) {
        const auto v = parse_double(trim(s));
        if (!v || *v < 0.0) throw Error("depth spec: bad depth '" + std::string(s) + "'");
        return *v;
    };
    if (dash == std::string_view::npos) {
        d.z1 = d.z2 = number(text);
        return d;
    }
    d.range = true;
    d.z1 = number(text.substr(0, dash));
    d.z2 = number(text.substr(dash + 1));
    if (!(d.z1 < d.z2)) throw Error("depth spec: range must be increasing in depth");
    return d;
}

std::string DepthSpec::text() const
{
    return range ? format_depth(z1) + "-" + format_depth(z2) : format_depth(z1);
}

double area_mean(const std::vector<double>& field, const LayeredMesh& mesh, const DepthSpec& depth)
{
    const int nn = mesh.node_count();
    if (field.size() != static_cast<std::size_t>(nn) * mesh.layer_count())
        throw Error("area_mean: field is not a layer-major node field of the mesh");
    int first = level_index(mesh, depth.z1);
    int last = depth.range ? level_index(mesh, depth.z2) : first + 1;
    if (first >= mesh.layer_count()) throw Error("area_mean: no layer below depth " + depth.text());
    double num = 0.0, den = 0.0;
    for (int k = first; k < last; ++k) {
        const double h = depth.range ? mesh.axis().thickness(k) : 1.0;
        for (int i : mesh.masks().nodes[k]) {
            const double a = mesh.dual_area(i) * h;
            num += a * field[static_cast<std::size_t>(k) * nn + i];
            den += a;
        }
    }
    if (den == 0.0) throw Error("area_mean: no active nodes at depth " + depth.text());
    return num / den;
}

double node_to_center_w(const std::vector<double>& w, const LayeredMesh& mesh, int element, int level)
{
    const int nn = mesh.node_count();
    const auto& n = mesh.elements()[element].nodes;
    const std::size_t base = static_cast<std::size_t>(level) * nn;
    return (w[base + n[0]] + w[base + n[1]] + w[base + n[2]]) / 3.0;
}

Region longitude_window(const LayeredMesh& mesh, double lon0, double lon1)
{
    double width = lon1 - lon0;
    if (width < 0.0) width += 360.0;
    Region r(mesh.element_count(), 0);
    for (int e = 0; e < mesh.element_count(); ++e)
        r[e] = normalize_lon(mesh.centroid(e).lon - lon0) <= width ? 1 : 0;
    return r;
}

int Streamfunction::bin_of(double lat) const
{
    if (lat < edges.front() || lat > edges.back()) return -1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), lat);
    const int i = static_cast<int>(it - edges.begin()) - 1;
    return std::min(i, bins - 1);
}

Streamfunction overturning(const std::vector<double>& w, const LayeredMesh& mesh, double dphi, const Region& region)
{
    if (!(dphi > 0.0)) throw Error("overturning: bin width must be positive");
    if (w.size() != static_cast<std::size_t>(mesh.node_count()) * mesh.level_count())
        throw Error("overturning: w is not a level-major node field of the mesh");
    if (!region.empty() && static_cast<int>(region.size()) != mesh.element_count())
        throw Error("overturning: region mask has wrong length");
    Streamfunction s;
    s.bins = static_cast<int>(std::ceil(180.0 / dphi - 1e-9));
    for (int i = 0; i <= s.bins; ++i) s.edges.push_back(std::min(90.0, -90.0 + i * dphi));
    s.levels = mesh.level_count();
    s.psi.assign(static_cast<std::size_t>(s.levels) * s.bins, 0.0);

    std::vector<int> bin(mesh.element_count(), -1);
    bool any = false;
    for (int e = 0; e < mesh.element_count(); ++e) {
        if (!region.empty() && !region[e]) continue;
        bin[e] = s.bin_of(mesh.centroid(e).lat);
        any = true;
    }
    if (!any) throw Error("overturning: empty region");

    for (int k = 0; k < s.levels; ++k) {
        std::vector<double> transport(s.bins, 0.0);
        for (int e = 0; e < mesh.element_count(); ++e)
            if (bin[e] >= 0 && k < mesh.element_layers(e))
                transport[bin[e]] += node_to_center_w(w, mesh, e, k) * mesh.area(e);
        double acc = 0.0;
        for (int i = 0; i < s.bins; ++i) {
            acc += transport[i] / 1e6;
            s.psi[static_cast<std::size_t>(k) * s.bins + i] = acc;
        }
    }
    return s;
}

Reduction parse_reduction(std::string_view name)
{
    if (name == "max") return Reduction::max;
    if (name == "extremum") return Reduction::extremum;
    throw Error("unknown overturning reduction '" + std::string(name) + "' (max, extremum)");
}

double overturning_at(const Streamfunction& psi, double lat, Reduction reduction)
{
    const int i = psi.bin_of(lat);
    if (i < 0) throw Error("overturning_at: latitude out of range");
    double best = psi.at(0, i);
    for (int k = 1; k < psi.levels; ++k) {
        const double x = psi.at(k, i);
        if (reduction == Reduction::max ? x > best : std::abs(x) > std::abs(best)) best = x;
    }
    return best;
}

double ErrorProfile::max_relative() const
{
    double worst = 0.0;
    for (const auto& f : fields)
        for (const auto& l : f) worst = std::max(worst, l.relative);
    return worst;
}

ErrorProfile layer_error_profile(const OceanState& iterate, const OceanState& reference, const LayeredMesh& mesh)
{
    if (!iterate.matches(mesh) || !reference.matches(mesh)) throw Error("layer_error_profile: state does not match the mesh");
    ErrorProfile out;
    for (Field f : all_fields) {
        auto& layers = out.fields[static_cast<int>(f)];
        const bool elem = f == Field::u || f == Field::v;
        layers.resize(reference.slabs(f));
        for (int k = 0; k < reference.slabs(f); ++k) {
            const auto a = iterate.slab(f, k);
            const auto b = reference.slab(f, k);
            double err = 0.0, mag = 0.0;
            for (std::size_t i = 0; i < b.size(); ++i) {
                const bool active = elem ? mesh.element_active(static_cast<int>(i), k) : mesh.node_active(static_cast<int>(i), k);
                if (!active) continue;
                err = std::max(err, std::abs(a[i] - b[i]));
                mag = std::max(mag, std::abs(b[i]));
            }
            layers[k].max_error = err;
            layers[k].zero_reference = mag == 0.0;
            layers[k].relative = mag > 0.0 ? err / mag : 0.0;
        }
    }
    return out;
}

Selection Selection::parse(std::string_view list)
{
    Selection s;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        const auto item = trim(list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!item.empty()) s.names.emplace_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    s.validate();
    return s;
}

void Selection::validate() const
{
    for (const auto& n : names) {
        if (n == "sst" || n == "sss" || n == "amoc") continue;
        if (n.rfind("temp@", 0) == 0) {
            DepthSpec::parse(std::string_view(n).substr(5));
            continue;
        }
        throw Error("unknown diagnostic '" + n + "' (sst, sss, temp@<depth>, amoc)");
    }
    if (!(amoc_dphi > 0.0)) throw Error("diagnostics: amoc bin width must be positive");
}

double evaluate(std::string_view name, const OceanState& state, const LayeredMesh& mesh, const Selection& sel)
{
    if (name == "sst") return area_mean(state.temperature, mesh, DepthSpec{});
    if (name == "sss") return area_mean(state.salinity, mesh, DepthSpec{});
    if (name == "amoc") return overturning_at(overturning(state.w, mesh, sel.amoc_dphi, sel.region), sel.amoc_lat, sel.amoc_reduction);
    if (name.rfind("temp@", 0) == 0) return area_mean(state.temperature, mesh, DepthSpec::parse(name.substr(5)));
    throw Error("unknown diagnostic '" + std::string(name) + "'");
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table)
{
    out << "iteration,slice," << table.diagnostic << ",error_uninterrupted,error_restarted\n";
    for (const auto& r : table.rows)
        out << r.iteration << ',' << r.slice << ',' << format_double(r.value) << ',' << format_double(r.error_uninterrupted)
            << ',' << format_double(r.error_restarted) << '\n';
}

ConvergenceTable read_convergence_csv(std::istream& in, const std::string& diagnostic)
{
    ConvergenceTable t;
    t.diagnostic = diagnostic;
    std::string line;
    if (!std::getline(in, line)) throw Error("convergence csv: missing header");
    const std::string header = "iteration,slice," + diagnostic + ",error_uninterrupted,error_restarted";
    if (line != header) throw Error("convergence csv: unexpected header '" + line + "'");
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != 5) throw Error("convergence csv: line " + std::to_string(number) + " has wrong column count");
        const auto it = parse_int(cells[0]), sl = parse_int(cells[1]);
        const auto v = parse_double(cells[2]), e1 = parse_double(cells[3]), e2 = parse_double(cells[4]);
        if (!it || !sl || !v || !e1 || !e2) throw Error("convergence csv: bad number on line " + std::to_string(number));
        t.rows.push_back({static_cast<int>(*it), static_cast<int>(*sl), *v, *e1, *e2});
    }
    return t;
}

std::string file_stem(std::string_view diagnostic)
{
    std::string out(diagnostic);
    for (char& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return out;
}

std::vector<std::filesystem::path> emit_convergence_csv(const std::vector<ConvergenceTable>& tables,
                                                        const std::string& run_id, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    for (const auto& t : tables) {
        const auto path = dir / (file_stem(t.diagnostic) + "__" + run_id + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        write_convergence_csv(out, t);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace pinto::diag
