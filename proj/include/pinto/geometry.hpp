#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace pinto {

/// Radius used for all dimensional lengths and areas, in meters.
inline constexpr double earth_radius = 6.317e6;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double deg_to_rad = pi / 180.0;

/// Meters per degree along a great circle of radius earth_radius.
inline constexpr double meters_per_degree = earth_radius * deg_to_rad;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;

    friend bool operator==(const LonLat&, const LonLat&) = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

using Triangle = std::array<LonLat, 3>;

/// Maps a longitude into [0, 360).
double normalize_lon(double lon);

/// Oriented area of the triangle in the lon/lat chart (degrees squared).
/// Positive when the vertices run counterclockwise.
double signed_area(LonLat n1, LonLat n2, LonLat n3);

/// Interior angles in degrees, in vertex order. Computed in the lon/lat
/// chart with atan2 so that small angles stay well conditioned.
std::array<double, 3> triangle_angles(LonLat n1, LonLat n2, LonLat n3);

/// Equiangular skewness in [0, 1). Throws GeometryError for a degenerate
/// triangle.
double skewness(LonLat n1, LonLat n2, LonLat n3);

/// Moves the longitudes of a triangle that straddles the 0/360 seam onto one
/// branch: when the longitude spread exceeds 180 degrees, every longitude
/// above 180 is shifted by -360. Latitudes are untouched.
Triangle periodic_shift(LonLat n1, LonLat n2, LonLat n3);

Vec3 to_cartesian(LonLat p);
LonLat to_lonlat(Vec3 v);

/// Great-circle midpoint from the normalized chord midpoint in 3-D.
/// Throws GeometryError for (near) antipodal pairs.
LonLat great_circle_midpoint(LonLat a, LonLat b);

/// Central angle between two points, radians.
double great_circle_distance(LonLat a, LonLat b);

/// Area of the geodesic triangle on a sphere of the given radius.
double spherical_triangle_area(LonLat a, LonLat b, LonLat c, double radius = earth_radius);

/// z-x-z Euler rotation of a point on the sphere; angles in degrees.
LonLat rotate_euler(LonLat p, double alpha, double beta, double gamma);

/// Inverse of rotate_euler with the same angles.
LonLat rotate_euler_inverse(LonLat p, double alpha, double beta, double gamma);

}  // namespace pinto
