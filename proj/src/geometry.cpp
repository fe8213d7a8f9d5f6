#include "pinto/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pinto {

namespace {

double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(Vec3 a, Vec3 b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

double angle_at(LonLat apex, LonLat p, LonLat q)
{
    const double ux = p.lon - apex.lon, uy = p.lat - apex.lat;
    const double vx = q.lon - apex.lon, vy = q.lat - apex.lat;
    const double c = std::abs(ux * vy - uy * vx);
    const double d = ux * vx + uy * vy;
    return std::atan2(c, d) / deg_to_rad;
}

Vec3 rot_z(Vec3 v, double deg)
{
    const double c = std::cos(deg * deg_to_rad), s = std::sin(deg * deg_to_rad);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

Vec3 rot_x(Vec3 v, double deg)
{
    const double c = std::cos(deg * deg_to_rad), s = std::sin(deg * deg_to_rad);
    return {v.x, c * v.y - s * v.z, s * v.y + c * v.z};
}

}  // namespace

double normalize_lon(double lon)
{
    double r = std::fmod(lon, 360.0);
    if (r < 0.0) r += 360.0;
    if (r >= 360.0) r -= 360.0;
    return r;
}

double signed_area(LonLat n1, LonLat n2, LonLat n3)
{
    return 0.5 * ((n2.lon - n1.lon) * (n3.lat - n1.lat) - (n3.lon - n1.lon) * (n2.lat - n1.lat));
}

std::array<double, 3> triangle_angles(LonLat n1, LonLat n2, LonLat n3)
{
    return {angle_at(n1, n2, n3), angle_at(n2, n3, n1), angle_at(n3, n1, n2)};
}

double skewness(LonLat n1, LonLat n2, LonLat n3)
{
    if (signed_area(n1, n2, n3) == 0.0) throw GeometryError("skewness: degenerate triangle");
    constexpr double equiangular = 60.0;
    const auto angles = triangle_angles(n1, n2, n3);
    const auto [lo, hi] = std::minmax_element(angles.begin(), angles.end());
    return std::max((*hi - equiangular) / (180.0 - equiangular), (equiangular - *lo) / equiangular);
}

Triangle periodic_shift(LonLat n1, LonLat n2, LonLat n3)
{
    Triangle t{n1, n2, n3};
    const auto [lo, hi] = std::minmax({n1.lon, n2.lon, n3.lon});
    if (hi - lo > 180.0) {
        for (auto& p : t)
            if (p.lon > 180.0) p.lon -= 360.0;
    }
    return t;
}

Vec3 to_cartesian(LonLat p)
{
    const double lam = p.lon * deg_to_rad, phi = p.lat * deg_to_rad;
    return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)};
}

LonLat to_lonlat(Vec3 v)
{
    const double h = std::hypot(v.x, v.y);
    const double lon = (h == 0.0) ? 0.0 : normalize_lon(std::atan2(v.y, v.x) / deg_to_rad);
    return {lon, std::atan2(v.z, h) / deg_to_rad};
}

LonLat great_circle_midpoint(LonLat a, LonLat b)
{
    const Vec3 u = to_cartesian(a), v = to_cartesian(b);
    const Vec3 m{u.x + v.x, u.y + v.y, u.z + v.z};
    if (norm(m) < 1e-12) throw GeometryError("great_circle_midpoint: antipodal points");
    return to_lonlat(m);
}

double great_circle_distance(LonLat a, LonLat b)
{
    const Vec3 u = to_cartesian(a), v = to_cartesian(b);
    return std::atan2(norm(cross(u, v)), dot(u, v));
}

double spherical_triangle_area(LonLat a, LonLat b, LonLat c, double radius)
{
    const Vec3 u = to_cartesian(a), v = to_cartesian(b), w = to_cartesian(c);
    const double triple = std::abs(dot(u, cross(v, w)));
    const double denom = 1.0 + dot(u, v) + dot(v, w) + dot(w, u);
    return 2.0 * std::atan2(triple, denom) * radius * radius;
}

LonLat rotate_euler(LonLat p, double alpha, double beta, double gamma)
{
    return to_lonlat(rot_z(rot_x(rot_z(to_cartesian(p), alpha), beta), gamma));
}

LonLat rotate_euler_inverse(LonLat p, double alpha, double beta, double gamma)
{
    return to_lonlat(rot_z(rot_x(rot_z(to_cartesian(p), -gamma), -beta), -alpha));
}

}  // namespace pinto
