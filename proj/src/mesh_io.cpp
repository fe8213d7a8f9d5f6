#include "pinto/mesh_io.hpp"

#include "pinto/format.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace pinto {

namespace {

/// Line reader that skips blank and comment-only lines and tracks line numbers.
class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    /// Next non-empty line split into fields; false at end of input.
    bool next(std::vector<std::string_view>& fields)
    {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (auto hash = line_.find('#'); hash != std::string::npos) line_.erase(hash);
            fields.clear();
            std::string_view rest(line_);
            while (true) {
                const auto b = rest.find_first_not_of(" \t\r");
                if (b == std::string_view::npos) break;
                rest.remove_prefix(b);
                const auto e = rest.find_first_of(" \t\r");
                fields.push_back(rest.substr(0, e));
                if (e == std::string_view::npos) break;
                rest.remove_prefix(e);
            }
            if (!fields.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

    long long to_int(std::string_view s) const
    {
        auto v = parse_int(s);
        if (!v) fail("non-numeric field '" + std::string(s) + "'");
        return *v;
    }

    double to_double(std::string_view s) const
    {
        auto v = parse_double(s);
        if (!v) fail("non-numeric field '" + std::string(s) + "'");
        return *v;
    }

    long long read_count()
    {
        std::vector<std::string_view> f;
        if (!next(f)) fail("missing count header");
        if (f.size() != 1) fail("count header must hold a single integer");
        const auto n = to_int(f[0]);
        if (n < 0) fail("negative count");
        return n;
    }

    void expect_end()
    {
        std::vector<std::string_view> f;
        if (next(f)) fail("count mismatch: more entries than declared");
    }

private:
    std::istream& in_;
    std::string source_;
    std::string line_;
    int line_no_ = 0;
};

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return in;
}

}  // namespace

std::vector<SurfaceNode> parse_nod2d(std::istream& in, const std::string& source)
{
    LineReader r(in, source);
    const auto count = r.read_count();
    std::vector<SurfaceNode> nodes;
    nodes.reserve(static_cast<std::size_t>(count));
    std::vector<std::string_view> f;
    for (long long i = 1; i <= count; ++i) {
        if (!r.next(f)) r.fail("count mismatch: declared " + std::to_string(count) + ", found " + std::to_string(i - 1));
        if (f.size() != 4) r.fail("expected 'index lon lat flag'");
        const auto idx = r.to_int(f[0]);
        if (idx != i) r.fail("duplicate or gapped index " + std::to_string(idx) + ", expected " + std::to_string(i));
        SurfaceNode n;
        n.pos.lon = r.to_double(f[1]);
        n.pos.lat = r.to_double(f[2]);
        const auto flag = r.to_int(f[3]);
        if (flag != 0 && flag != 1) r.fail("boundary flag must be 0 or 1");
        if (n.pos.lat < -90.0 || n.pos.lat > 90.0) r.fail("latitude outside [-90, 90]");
        n.pos.lon = normalize_lon(n.pos.lon);
        n.boundary = static_cast<int>(flag);
        nodes.push_back(n);
    }
    r.expect_end();
    return nodes;
}

std::vector<SurfaceElement> parse_elem2d(std::istream& in, int node_count, const std::string& source)
{
    LineReader r(in, source);
    const auto count = r.read_count();
    std::vector<SurfaceElement> elements;
    elements.reserve(static_cast<std::size_t>(count));
    std::vector<std::string_view> f;
    for (long long i = 1; i <= count; ++i) {
        if (!r.next(f)) r.fail("count mismatch: declared " + std::to_string(count) + ", found " + std::to_string(i - 1));
        if (f.size() != 3) r.fail("expected three node indices");
        SurfaceElement e;
        for (int j = 0; j < 3; ++j) {
            const auto id = r.to_int(f[j]);
            if (id < 1 || (node_count >= 0 && id > node_count))
                r.fail("dangling node id " + std::to_string(id));
            e.nodes[j] = static_cast<int>(id - 1);
        }
        if (e.nodes[0] == e.nodes[1] || e.nodes[1] == e.nodes[2] || e.nodes[0] == e.nodes[2])
            r.fail("degenerate element: repeated node id");
        elements.push_back(e);
    }
    r.expect_end();
    return elements;
}

Aux3d parse_aux3d(std::istream& in, int node_count, const std::string& source)
{
    LineReader r(in, source);
    const auto levels = r.read_count();
    if (levels < 1) r.fail("level count must be at least 1");
    std::vector<double> z;
    std::vector<std::string_view> f;
    for (long long i = 0; i < levels; ++i) {
        if (!r.next(f)) r.fail("wrong line count: missing level depths");
        if (f.size() != 1) r.fail("expected one depth per line");
        z.push_back(r.to_double(f[0]));
        if (i == 0 && z[0] != 0.0) r.fail("first level must be 0.0");
        if (i > 0 && !(z[i] < z[i - 1])) r.fail("non-monotone level depths");
    }
    Aux3d aux{VerticalAxis(z), {}};
    aux.bottom.reserve(static_cast<std::size_t>(node_count));
    for (int i = 0; i < node_count; ++i) {
        if (!r.next(f)) r.fail("wrong line count: missing bottom depth for node " + std::to_string(i + 1));
        if (f.size() != 1) r.fail("expected one depth per line");
        const double b = r.to_double(f[0]);
        if (b > 0.0) r.fail("positive bottom depth at node " + std::to_string(i + 1));
        if (b < z.back()) r.fail("bottom depth below deepest level at node " + std::to_string(i + 1));
        aux.bottom.push_back(b);
    }
    r.expect_end();
    return aux;
}

void write_nod2d(std::ostream& out, const std::vector<SurfaceNode>& nodes)
{
    out << nodes.size() << '\n';
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out << (i + 1) << ' ' << format_coord(nodes[i].pos.lon) << ' ' << format_coord(nodes[i].pos.lat) << ' '
            << nodes[i].boundary << '\n';
}

void write_elem2d(std::ostream& out, const std::vector<SurfaceElement>& elements)
{
    out << elements.size() << '\n';
    for (const auto& e : elements) out << e.nodes[0] + 1 << ' ' << e.nodes[1] + 1 << ' ' << e.nodes[2] + 1 << '\n';
}

void write_aux3d(std::ostream& out, const VerticalAxis& axis, const std::vector<double>& bottom)
{
    out << axis.level_count() << '\n';
    for (double z : axis.levels()) out << format_level(z) << '\n';
    for (double b : bottom) out << format_depth(b) << '\n';
}

LayeredMesh read_mesh(const std::filesystem::path& dir, Geometry geometry)
{
    auto nod = open_in(dir / "nod2d.out");
    auto nodes = parse_nod2d(nod, (dir / "nod2d.out").string());
    auto elem = open_in(dir / "elem2d.out");
    auto elements = parse_elem2d(elem, static_cast<int>(nodes.size()), (dir / "elem2d.out").string());
    auto aux = open_in(dir / "aux3d.out");
    auto a = parse_aux3d(aux, static_cast<int>(nodes.size()), (dir / "aux3d.out").string());
    return LayeredMesh(std::move(nodes), std::move(elements), std::move(a.axis), std::move(a.bottom), geometry);
}

void write_mesh(const LayeredMesh& mesh, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    {
        auto out = open_out(dir / "nod2d.out");
        write_nod2d(out, mesh.nodes());
    }
    {
        auto out = open_out(dir / "elem2d.out");
        write_elem2d(out, mesh.elements());
    }
    {
        auto out = open_out(dir / "aux3d.out");
        write_aux3d(out, mesh.axis(), mesh.bottom());
        if (!out) throw IoError("write failed in " + dir.string());
    }
}

void write_gridfile(std::ostream& out, const LayeredMesh& mesh)
{
    out << "# gridfile v1 " << mesh.element_count() << '\n';
    for (int e = 0; e < mesh.element_count(); ++e) {
        auto c = mesh.corners(e);
        LonLat center{(c[0].lon + c[1].lon + c[2].lon) / 3.0, (c[0].lat + c[1].lat + c[2].lat) / 3.0};
        if (center.lon < 0.0) {
            center.lon += 360.0;
            for (auto& p : c) p.lon += 360.0;
        }
        out << e + 1 << ' ' << format_double(center.lon) << ' ' << format_double(center.lat);
        for (const auto& p : c) out << ' ' << format_double(p.lon) << ' ' << format_double(p.lat);
        out << '\n';
    }
}

void export_gridfile(const LayeredMesh& mesh, const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    auto out = open_out(path);
    write_gridfile(out, mesh);
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace pinto
