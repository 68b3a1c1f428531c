#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace iavns {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat26 = Eigen::Matrix<double, 2, 6>;

// Below these norms the closed forms lose precision and the series take over.
inline constexpr double kExpLogSeriesThreshold = 1e-7;
inline constexpr double kJacobianSeriesThreshold = 1e-5;

// Rotation stored as a unit quaternion in canonical sign (w >= 0).
class UnitQuaternion {
public:
    UnitQuaternion() : q_(1.0, 0.0, 0.0, 0.0) {}
    UnitQuaternion(double w, double x, double y, double z);
    explicit UnitQuaternion(const Eigen::Quaterniond& q);

    static UnitQuaternion identity() { return {}; }
    static UnitQuaternion from_matrix(const Mat3& r);

    double w() const { return q_.w(); }
    double x() const { return q_.x(); }
    double y() const { return q_.y(); }
    double z() const { return q_.z(); }
    Vec3 vec() const { return q_.vec(); }

    const Eigen::Quaterniond& eigen() const { return q_; }
    Mat3 matrix() const { return q_.toRotationMatrix(); }

    UnitQuaternion conjugate() const { return UnitQuaternion(q_.conjugate()); }
    UnitQuaternion operator*(const UnitQuaternion& o) const { return UnitQuaternion(q_ * o.q_); }
    Vec3 rotate(const Vec3& v) const { return q_ * v; }

    // 4-vector dot product (sign sensitive).
    double dot(const UnitQuaternion& o) const { return q_.coeffs().dot(o.q_.coeffs()); }

private:
    Eigen::Quaterniond q_;
};

struct Pose {
    UnitQuaternion rotation;
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return {}; }
    Eigen::Matrix4d matrix() const;
};

struct Tangent6 {
    Vec3 rho = Vec3::Zero();
    Vec3 phi = Vec3::Zero();

    Vec6 vector() const;
    static Tangent6 from_vector(const Vec6& v);
};

Mat3 hat(const Vec3& v);

UnitQuaternion so3_exp(const Vec3& r);
Vec3 so3_log(const UnitQuaternion& q);
// Log of the quaternion as given, without folding into w >= 0. Angles up to
// 2*pi come out, which keeps differences between nearby attitudes continuous.
Vec3 so3_log_unfolded(const Eigen::Quaterniond& q);

Mat3 so3_right_jacobian(const Vec3& r);
Mat3 so3_right_jacobian_inv(const Vec3& r);

Pose se3_exp(const Tangent6& t);
Tangent6 se3_log(const Pose& z);

Pose pose_compose(const Pose& a, const Pose& b);
Pose pose_inverse(const Pose& a);
Vec3 pose_act(const Pose& z, const Vec3& p);

// z (+) dt = z o Exp(dt)
Pose pose_plus(const Pose& z, const Tangent6& dt);
// a (-) b = Log(b^-1 o a), so that b (+) (a (-) b) = a
Tangent6 pose_minus(const Pose& a, const Pose& b);

UnitQuaternion slerp(const UnitQuaternion& q0, const UnitQuaternion& q1, double t);

// Angle of the relative rotation q0^-1 q1, in [0, pi].
double rotation_angle_between(const UnitQuaternion& q0, const UnitQuaternion& q1);

inline Pose operator*(const Pose& a, const Pose& b) { return pose_compose(a, b); }

}  // namespace iavns
