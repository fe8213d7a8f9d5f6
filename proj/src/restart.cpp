#include "pinto/restart.hpp"

#include "pinto/format.hpp"
#include "pinto/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace pinto {

namespace {

constexpr char magic[6] = {'P', 'I', 'N', 'T', 'O', '1'};

template <typename T>
void put(std::ostream& out, T value)
{
    static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what)
{
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
        throw RestartError(std::string("restart: truncated file while reading ") + what);
    return value;
}

}  // namespace

void write_restart(const OceanState& state, std::uint64_t mesh_hash, std::ostream& out)
{
    out.write(magic, sizeof magic);
    put<std::uint64_t>(out, mesh_hash);
    put<std::int32_t>(out, state.layers);
    put<std::int32_t>(out, state.nodes);
    put<std::int32_t>(out, state.elements);
    put<double>(out, state.clock);
    for (Field f : all_fields) {
        const auto& data = state.field(f);
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
    }
    if (!out) throw RestartError("restart: write failed");
}

OceanState read_restart(std::istream& in, const LayeredMesh& mesh)
{
    char head[sizeof magic];
    if (!in.read(head, sizeof head)) throw RestartError("restart: truncated file while reading magic");
    if (std::memcmp(head, magic, sizeof magic) != 0) throw RestartError("restart: bad magic or unsupported version");
    const auto hash = get<std::uint64_t>(in, "mesh hash");
    const int layers = get<std::int32_t>(in, "layer count");
    const int nodes = get<std::int32_t>(in, "node count");
    const int elements = get<std::int32_t>(in, "element count");
    const double clock = get<double>(in, "clock");
    if (layers != mesh.layer_count() || nodes != mesh.node_count() || elements != mesh.element_count())
        throw RestartError("restart: shape " + std::to_string(layers) + "x" + std::to_string(nodes) + "/" +
                           std::to_string(elements) + " does not match the mesh " + std::to_string(mesh.layer_count()) +
                           "x" + std::to_string(mesh.node_count()) + "/" + std::to_string(mesh.element_count()));
    if (hash != mesh.hash()) throw RestartError("restart: mesh hash mismatch");
    OceanState s = OceanState::zeros(mesh);
    s.clock = clock;
    for (Field f : all_fields) {
        auto& data = s.field(f);
        const auto bytes = static_cast<std::streamsize>(data.size() * sizeof(double));
        if (!in.read(reinterpret_cast<char*>(data.data()), bytes))
            throw RestartError("restart: truncated file in field " + std::string(field_name(f)));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw RestartError("restart: trailing data");
    return s;
}

std::string clock_line(double seconds)
{
    const double day_index = std::floor(seconds / seconds_per_day);
    const double year = std::floor(day_index / days_per_year);
    const double day = day_index - year * days_per_year;
    return format_double(seconds) + " " + format_double(day + 1) + " " + format_double(year + 1);
}

void write_restart(const OceanState& state, const LayeredMesh& mesh, const std::filesystem::path& path)
{
    if (!state.matches(mesh)) throw RestartError("restart: state does not match the mesh");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw RestartError("restart: cannot open " + path.string());
        write_restart(state, mesh.hash(), out);
    }
    std::ofstream clock(path.parent_path() / "clock.txt");
    clock << clock_line(state.clock) << '\n';
}

OceanState read_restart(const std::filesystem::path& path, const LayeredMesh& mesh)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RestartError("restart: cannot open " + path.string());
    return read_restart(in, mesh);
}

}  // namespace pinto
