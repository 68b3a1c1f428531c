#include "iavns/camera.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iavns {

bool CameraModel::in_sensor(const Vec2& p) const {
    return p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= sensor_px.x() && p.y() <= sensor_px.y();
}

void CameraModel::validate() const {
    auto bad = [](const std::string& what) { throw std::invalid_argument("camera." + what); };
    if (!(focal_m > 0.0)) bad("focal_m must be > 0");
    if (!(pixel_pitch_m > 0.0)) bad("pixel_pitch_m must be > 0");
    if (!(sensor_px.x() > 0.0 && sensor_px.y() > 0.0)) bad("sensor_px must be positive");
    for (int i = 0; i < 2; ++i) {
        if (!(principal_px[i] >= 0.0 && principal_px[i] <= sensor_px[i])) {
            bad("principal_px must lie inside the sensor");
        }
    }
}

Pose downward_camera_mount() {
    Mat3 r_bc;
    r_bc.col(0) = Vec3(0.0, 1.0, 0.0);
    r_bc.col(1) = Vec3(-1.0, 0.0, 0.0);
    r_bc.col(2) = Vec3(0.0, 0.0, 1.0);
    return {UnitQuaternion::from_matrix(r_bc), Vec3::Zero()};
}

std::optional<Vec2> project(const CameraModel& cam, const Vec3& p_c) {
    if (!(p_c.z() > 0.0)) return std::nullopt;
    const double k = cam.focal_px();
    return Vec2(k * (p_c.x() / p_c.z()) + cam.principal_px.x(),
                k * (p_c.y() / p_c.z()) + cam.principal_px.y());
}

std::optional<Mat26> optical_flow_jacobian(const CameraModel& cam, const Vec3& p_c) {
    if (!(p_c.z() > 0.0)) return std::nullopt;
    const double inv_d = 1.0 / p_c.z();
    const double u = p_c.x() * inv_d;
    const double v = p_c.y() * inv_d;
    Mat26 j;
    j << -inv_d, 0.0, u * inv_d, u * v, -1.0 - u * u, v,
         0.0, -inv_d, v * inv_d, 1.0 + v * v, -u * v, -u;
    return j * cam.focal_px();
}

Vec3 geodetic_to_ecef(const GeodeticCoord& g) {
    const double r = kEarthRadius + g.h;
    const double cl = std::cos(g.latitude);
    return {r * cl * std::cos(g.longitude), r * cl * std::sin(g.longitude),
            r * std::sin(g.latitude)};
}

GeodeticCoord ecef_to_geodetic(const Vec3& p) {
    GeodeticCoord g;
    g.latitude = std::atan2(p.z(), std::hypot(p.x(), p.y()));
    g.longitude = std::atan2(p.y(), p.x());
    g.h = p.norm() - kEarthRadius;
    return g;
}

UnitQuaternion ecef_to_ned_quat(const GeodeticCoord& g) {
    const double sp = std::sin(g.latitude), cp = std::cos(g.latitude);
    const double sl = std::sin(g.longitude), cl = std::cos(g.longitude);
    Mat3 r;
    r.col(0) = Vec3(-sp * cl, -sp * sl, cp);
    r.col(1) = Vec3(-sl, cl, 0.0);
    r.col(2) = Vec3(-cp * cl, -cp * sl, -sp);
    return UnitQuaternion::from_matrix(r);
}

UnitQuaternion quat_from_euler(const Euler& e) {
    const Eigen::Quaterniond q = Eigen::AngleAxisd(e.psi, Vec3::UnitZ()) *
                                 Eigen::AngleAxisd(e.theta, Vec3::UnitY()) *
                                 Eigen::AngleAxisd(e.xi, Vec3::UnitX());
    return UnitQuaternion(q);
}

Euler euler_from_quat(const UnitQuaternion& q_nb) {
    const Mat3 r = q_nb.matrix();
    Euler e;
    e.theta = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
    e.psi = std::atan2(r(1, 0), r(0, 0));
    e.xi = std::atan2(r(2, 1), r(2, 2));
    return e;
}

UnitQuaternion ned_attitude(const Pose& pose_eb) {
    const UnitQuaternion q_en = ecef_to_ned_quat(ecef_to_geodetic(pose_eb.translation));
    return q_en.conjugate() * pose_eb.rotation;
}

}  // namespace iavns
