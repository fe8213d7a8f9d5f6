#pragma once

#include "pinto/mesh.hpp"
#include "pinto/state.hpp"

#include <filesystem>
#include <iosfwd>

namespace pinto {

class RestartError : public Error {
public:
    using Error::Error;
};

/// Binary snapshot, little-endian:
///   "PINTO1", u64 mesh hash, i32 layers, i32 nodes, i32 elements, f64 clock,
///   then T, S, u, v, w as f64 arrays.
void write_restart(const OceanState& state, std::uint64_t mesh_hash, std::ostream& out);
OceanState read_restart(std::istream& in, const LayeredMesh& mesh);

/// File forms; write_restart also writes clock.txt next to the snapshot.
void write_restart(const OceanState& state, const LayeredMesh& mesh, const std::filesystem::path& path);
OceanState read_restart(const std::filesystem::path& path, const LayeredMesh& mesh);

/// "<seconds> <day> <year>" with 360-day years; day and year count from 1.
std::string clock_line(double seconds);

}  // namespace pinto
