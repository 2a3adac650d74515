#pragma once

#include <optional>

#include "klm3d/errors.hpp"
#include "klm3d/vec3.hpp"

namespace klm3d {

// Below this norm a direction is treated as degenerate rather than letting
// NaNs propagate.
inline constexpr double kDegenerateNorm = 1e-12;

// Unit-norm tolerance for a caller-supplied depth axis.
inline constexpr double kUnitNormTolerance = 1e-9;

enum class ShapeTag { sphere, disk, rect };

struct TargetGeometry {
    Vec3 center;
    double extent = 0.0; // diameter, meters
    ShapeTag shape = ShapeTag::sphere;
    std::optional<double> width;  // rect only, meters
    std::optional<double> height; // rect only, meters

    // Diameter used as W. Rect targets use the smaller of width/height, a
    // conservative single angular size.
    double effective_extent() const;

    void validate() const; // throws InvalidLayout
};

// One movement: from `start` toward `target`, with angular quantities
// measured at `origin` (the device position at the home press).
struct MovementSpec {
    Vec3 origin;
    Vec3 start;
    TargetGeometry target;
    std::optional<Vec3> depth_axis; // unit; defaults to the origin->start direction

    Vec3 resolved_depth_axis() const; // throws DegenerateGeometry
    void validate() const;            // throws InvalidLayout
};

// Angle in degrees at the origin between start and target center, in [0, 180].
double angular_distance_deg(const MovementSpec& spec);

// Angular size of the target as seen from the origin, degrees.
double angular_width_deg(const MovementSpec& spec);

// Euclidean start-to-target distance, meters.
double linear_distance_m(const MovementSpec& spec);

// Absolute displacement component along the depth axis, centimeters.
double depth_change_cm(const MovementSpec& spec);

} // namespace klm3d
