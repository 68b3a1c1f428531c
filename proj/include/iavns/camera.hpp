#pragma once

#include <optional>

#include "iavns/liegroup.hpp"

namespace iavns {

inline constexpr double kEarthRadius = 6371000.0;

// Pinhole camera. Image coordinates are pixels with origin at a sensor corner,
// so the principal point sits at c_img (sensor centre by default).
struct CameraModel {
    double focal_m = 19e-3;
    double pixel_pitch_m = 1e-5;
    Vec2 principal_px = Vec2(384.0, 512.0);
    Vec2 sensor_px = Vec2(768.0, 1024.0);

    double focal_px() const { return focal_m / pixel_pitch_m; }
    bool in_sensor(const Vec2& p) const;
    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct GeodeticCoord {
    double latitude = 0.0;   // rad
    double longitude = 0.0;  // rad
    double h = 0.0;          // m above the sphere
};

// Constant body->camera mounting plus the ECEF->NED rotation at the current
// location. The default mount points the optical axis along body z (down),
// with image u along body y and image v along -body x.
struct FrameChain {
    Pose zeta_bc;
    UnitQuaternion q_en;
};

Pose downward_camera_mount();

// nullopt when the point is on or behind the focal plane.
std::optional<Vec2> project(const CameraModel& cam, const Vec3& p_c);

// d(pixel)/d(local perturbation) for a static point, columns ordered
// (rho, phi) like Tangent6. nullopt on non-positive depth.
std::optional<Mat26> optical_flow_jacobian(const CameraModel& cam, const Vec3& p_c);

Vec3 geodetic_to_ecef(const GeodeticCoord& g);
GeodeticCoord ecef_to_geodetic(const Vec3& p);
// Rotation whose columns are the North, East and Down axes in ECEF.
UnitQuaternion ecef_to_ned_quat(const GeodeticCoord& g);

// ZYX Euler angles (yaw psi, pitch theta, bank xi), radians.
struct Euler {
    double psi = 0.0;
    double theta = 0.0;
    double xi = 0.0;
};

UnitQuaternion quat_from_euler(const Euler& e);
Euler euler_from_quat(const UnitQuaternion& q_nb);

// Body attitude relative to the local NED frame for a body pose in ECEF.
UnitQuaternion ned_attitude(const Pose& pose_eb);

inline Pose camera_from_body(const Pose& pose_eb, const Pose& zeta_bc) {
    return pose_compose(pose_eb, zeta_bc);
}
inline Pose body_from_camera(const Pose& pose_ec, const Pose& zeta_bc) {
    return pose_compose(pose_ec, pose_inverse(zeta_bc));
}

}  // namespace iavns
