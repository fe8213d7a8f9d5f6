#pragma once

#include "pinto/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pinto {

class ParseError : public Error {
public:
    ParseError(const std::string& source, int line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Text formats: first line holds the count, whitespace separated fields,
// anything after '#' is ignored, blank lines are skipped.

/// nod2d.out: "index lon lat flag", indices contiguous from 1.
std::vector<SurfaceNode> parse_nod2d(std::istream& in, const std::string& source = "nod2d.out");

/// elem2d.out: three 1-based node indices per line. Pass node_count < 0 to
/// skip the range check.
std::vector<SurfaceElement> parse_elem2d(std::istream& in, int node_count = -1,
                                         const std::string& source = "elem2d.out");

struct Aux3d {
    VerticalAxis axis;
    std::vector<double> bottom;
};

/// aux3d.out: level count, level depths, then one bottom depth per node.
Aux3d parse_aux3d(std::istream& in, int node_count, const std::string& source = "aux3d.out");

void write_nod2d(std::ostream& out, const std::vector<SurfaceNode>& nodes);
void write_elem2d(std::ostream& out, const std::vector<SurfaceElement>& elements);
void write_aux3d(std::ostream& out, const VerticalAxis& axis, const std::vector<double>& bottom);

/// Reads nod2d.out, elem2d.out and aux3d.out from a directory.
LayeredMesh read_mesh(const std::filesystem::path& dir, Geometry geometry = Geometry::spherical);

/// Writes nod2d.out, elem2d.out and aux3d.out into a directory (created if
/// missing).
void write_mesh(const LayeredMesh& mesh, const std::filesystem::path& dir);

/// Remapping grid description: header "# gridfile v1 <count>", then one
/// record per element "id center_lon center_lat c1_lon c1_lat c2_lon c2_lat
/// c3_lon c3_lat". Corners are periodic-shifted onto the centroid's branch.
void write_gridfile(std::ostream& out, const LayeredMesh& mesh);
void export_gridfile(const LayeredMesh& mesh, const std::filesystem::path& path);

}  // namespace pinto
