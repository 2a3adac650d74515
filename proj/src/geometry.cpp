#include "klm3d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace klm3d {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

double TargetGeometry::effective_extent() const {
    if (shape == ShapeTag::rect && width && height) return std::min(*width, *height);
    return extent;
}

void TargetGeometry::validate() const {
    if (!center.finite()) throw InvalidLayout("target center must be finite");
    if (!(extent > 0.0) || !std::isfinite(extent))
        throw InvalidLayout("target extent must be > 0");
    if (shape == ShapeTag::rect) {
        if (width && !(*width > 0.0)) throw InvalidLayout("rect width must be > 0");
        if (height && !(*height > 0.0)) throw InvalidLayout("rect height must be > 0");
    }
}

Vec3 MovementSpec::resolved_depth_axis() const {
    if (depth_axis) return *depth_axis;
    const Vec3 dir = start - origin;
    const double n = norm(dir);
    if (n < kDegenerateNorm)
        throw DegenerateGeometry("depth axis default undefined: start coincides with origin");
    return dir / n;
}

void MovementSpec::validate() const {
    if (!origin.finite() || !start.finite()) throw InvalidLayout("positions must be finite");
    target.validate();
    if (norm(target.center - origin) < kDegenerateNorm)
        throw InvalidLayout("origin must not coincide with the target center");
    if (depth_axis) {
        if (!depth_axis->finite()) throw InvalidLayout("depth axis must be finite");
        if (std::fabs(norm(*depth_axis) - 1.0) > kUnitNormTolerance)
            throw InvalidLayout("depth axis must have unit norm");
    }
}

double angular_distance_deg(const MovementSpec& spec) {
    const Vec3 u = spec.start - spec.origin;
    const Vec3 v = spec.target.center - spec.origin;
    if (norm(u) < kDegenerateNorm || norm(v) < kDegenerateNorm)
        throw DegenerateGeometry("angular distance undefined: zero-length direction");
    // atan2 of (|u x v|, u.v) is stable near 0 and 180 degrees.
    return std::atan2(norm(cross(u, v)), dot(u, v)) * kRadToDeg;
}

double angular_width_deg(const MovementSpec& spec) {
    const double d = norm(spec.target.center - spec.origin);
    if (d < kDegenerateNorm)
        throw DegenerateGeometry("angular width undefined: target at the origin");
    return 2.0 * std::atan2(spec.target.effective_extent() * 0.5, d) * kRadToDeg;
}

double linear_distance_m(const MovementSpec& spec) {
    return norm(spec.target.center - spec.start);
}

double depth_change_cm(const MovementSpec& spec) {
    const Vec3 axis = spec.resolved_depth_axis();
    return std::fabs(dot(spec.target.center - spec.start, axis)) * 100.0;
}

} // namespace klm3d
