#include "iavns/liegroup.hpp"

#include <cmath>

namespace iavns {

namespace {

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
    q.normalize();
    bool flip = q.w() < 0.0;
    if (q.w() == 0.0) {
        // Half-turn: q and -q both have w = 0. Pick the first nonzero
        // vector component positive so Log stays single-valued.
        for (int i = 0; i < 3; ++i) {
            if (q.vec()[i] != 0.0) {
                flip = q.vec()[i] < 0.0;
                break;
            }
        }
    }
    if (flip) q.coeffs() = -q.coeffs();
    return q;
}

}  // namespace

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z)
    : q_(canonical(Eigen::Quaterniond(w, x, y, z))) {}

UnitQuaternion::UnitQuaternion(const Eigen::Quaterniond& q) : q_(canonical(q)) {}

UnitQuaternion UnitQuaternion::from_matrix(const Mat3& r) {
    return UnitQuaternion(Eigen::Quaterniond(r));
}

Eigen::Matrix4d Pose::matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation.matrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
}

Vec6 Tangent6::vector() const {
    Vec6 v;
    v << rho, phi;
    return v;
}

Tangent6 Tangent6::from_vector(const Vec6& v) {
    return {v.head<3>(), v.tail<3>()};
}

Mat3 hat(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

UnitQuaternion so3_exp(const Vec3& r) {
    const double theta = r.norm();
    if (theta < kExpLogSeriesThreshold) {
        const double t2 = theta * theta;
        const Vec3 v = r * (0.5 - t2 / 48.0);
        return UnitQuaternion(1.0 - t2 / 8.0, v.x(), v.y(), v.z());
    }
    const double half = 0.5 * theta;
    const Vec3 v = r * (std::sin(half) / theta);
    return UnitQuaternion(std::cos(half), v.x(), v.y(), v.z());
}

Vec3 so3_log_unfolded(const Eigen::Quaterniond& q) {
    const Vec3 v = q.vec();
    const double s = v.norm();
    const double w = q.w();
    if (s < kExpLogSeriesThreshold) {
        if (w > 0.0) {
            return v * (2.0 / w) * (1.0 - s * s / (3.0 * w * w));
        }
        // Full turn with undefined axis; fall back to the folded branch.
        return so3_log(UnitQuaternion(q));
    }
    return v * (2.0 * std::atan2(s, w) / s);
}

Vec3 so3_log(const UnitQuaternion& q) {
    return so3_log_unfolded(q.eigen());
}

Mat3 so3_right_jacobian(const Vec3& r) {
    const double theta = r.norm();
    const Mat3 k = hat(r);
    if (theta < kJacobianSeriesThreshold) {
        return Mat3::Identity() - 0.5 * k + (1.0 / 6.0) * k * k;
    }
    const double t2 = theta * theta;
    const double sh = std::sin(0.5 * theta);
    const double a = 2.0 * sh * sh / t2;  // (1 - cos) / theta^2
    const double b = (theta - std::sin(theta)) / (t2 * theta);
    return Mat3::Identity() - a * k + b * k * k;
}

Mat3 so3_right_jacobian_inv(const Vec3& r) {
    const double theta = r.norm();
    const Mat3 k = hat(r);
    if (theta < kJacobianSeriesThreshold) {
        return Mat3::Identity() + 0.5 * k + (1.0 / 12.0) * k * k;
    }
    const double half = 0.5 * theta;
    const double c = 1.0 / (theta * theta) - std::cos(half) / (2.0 * theta * std::sin(half));
    return Mat3::Identity() + 0.5 * k + c * k * k;
}

Pose se3_exp(const Tangent6& t) {
    Pose z;
    z.rotation = so3_exp(t.phi);
    z.translation = so3_right_jacobian(t.phi).transpose() * t.rho;
    return z;
}

Tangent6 se3_log(const Pose& z) {
    Tangent6 t;
    t.phi = so3_log(z.rotation);
    t.rho = so3_right_jacobian_inv(t.phi).transpose() * z.translation;
    return t;
}

Pose pose_compose(const Pose& a, const Pose& b) {
    return {a.rotation * b.rotation, a.translation + a.rotation.rotate(b.translation)};
}

Pose pose_inverse(const Pose& a) {
    const UnitQuaternion inv = a.rotation.conjugate();
    return {inv, -inv.rotate(a.translation)};
}

Vec3 pose_act(const Pose& z, const Vec3& p) {
    return z.rotation.rotate(p) + z.translation;
}

Pose pose_plus(const Pose& z, const Tangent6& dt) {
    return pose_compose(z, se3_exp(dt));
}

Tangent6 pose_minus(const Pose& a, const Pose& b) {
    return se3_log(pose_compose(pose_inverse(b), a));
}

UnitQuaternion slerp(const UnitQuaternion& q0, const UnitQuaternion& q1, double t) {
    Eigen::Quaterniond target = q1.eigen();
    if (q0.dot(q1) < 0.0) target.coeffs() = -target.coeffs();
    const Eigen::Quaterniond rel = q0.eigen().conjugate() * target;
    const Vec3 r = so3_log_unfolded(rel);
    return q0 * so3_exp(t * r);
}

double rotation_angle_between(const UnitQuaternion& q0, const UnitQuaternion& q1) {
    return so3_log(q0.conjugate() * q1).norm();
}

}  // namespace iavns
