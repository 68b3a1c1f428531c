#pragma once

#include <optional>
#include <vector>

#include "iavns/camera.hpp"
#include "iavns/liegroup.hpp"
#include "iavns/robust.hpp"

namespace iavns {

inline constexpr int kMinCorrespondences = 3;

struct Correspondence {
    Vec3 p_e;    // terrain point, ECEF
    Vec2 p_img;  // measured pixel
};

enum class RobustKind { tukey, none };

struct GnConfig {
    double delta_rp = 1e-3;  // stop when the cost decrease falls below this
    double delta_q = 1e-7;   // attitude-only solver stop threshold, rad
    int max_iters = 30;
    RobustKind robust = RobustKind::tukey;
    RobustScaleConfig scale;
    std::optional<TukeyConfig> tukey;  // fixed cutoff; adaptive when empty
    double max_condition = 1e12;       // on the Jacobi-scaled Hessian
    bool record_iterates = false;

    void validate() const;
};

enum class PoseOptStatus { converged, max_iterations, singular_hessian, insufficient_points };

struct PoseOptResult {
    Pose pose;
    int iterations = 0;
    // E_RP + f_q * E_q at the returned pose (plain sum of residual norms).
    double final_error = 0.0;
    double initial_error = 0.0;
    // Robust objective actually minimised, at the returned pose.
    double final_cost = 0.0;
    std::vector<double> per_point_weights;
    bool converged = false;
    PoseOptStatus status = PoseOptStatus::max_iterations;
    std::vector<Pose> iterates;  // z0 first; filled when record_iterates
};

struct ReprojectionResiduals {
    std::vector<Vec2> residuals;  // zero for dropped points
    std::vector<bool> valid;      // false when the point has non-positive depth
    double total = 0.0;           // sum of residual norms over valid points
    int n_valid = 0;
    bool sufficient() const { return n_valid >= kMinCorrespondences; }
};

// Camera-frame coordinates of a world point, with exactly the arithmetic of the
// solver kernels, so synthetic measurements built from it have zero residual.
Vec3 to_camera_frame(const Pose& pose_ec, const Vec3& p_e);

ReprojectionResiduals reprojection_residuals(const Pose& z, const std::vector<Correspondence>& corr,
                                             const CameraModel& cam);

PoseOptResult optimize_pose_reprojection(const Pose& z0, const std::vector<Correspondence>& corr,
                                         const CameraModel& cam, const GnConfig& cfg);

struct AttitudeError {
    double error = 0.0;
    Vec3 residual = Vec3::Zero();  // Log(q) - Log(q_target)
};

// The target's Log is taken on the hemisphere of q, so the residual stays
// continuous when either attitude sits near a half turn.
AttitudeError attitude_error(const UnitQuaternion& q, const UnitQuaternion& q_target);

struct AttitudeOptResult {
    UnitQuaternion q;
    int iterations = 0;
    std::vector<double> errors;  // E_q before the first step and after each accepted step
};

AttitudeOptResult optimize_attitude(const UnitQuaternion& q0, const UnitQuaternion& q_target,
                                    const GnConfig& cfg);

double compute_fq(double e_rp0, double e_q0);

PoseOptResult optimize_pose_with_prior(const Pose& z0, const std::vector<Correspondence>& corr,
                                       const CameraModel& cam, const UnitQuaternion& q_ec_target,
                                       double f_q, const GnConfig& cfg);

// Joint Gauss-Newton system at z for given per-point weights; exposed for
// property tests on symmetry and semi-definiteness.
struct NormalSystem {
    Mat6 h = Mat6::Zero();
    Vec6 g = Vec6::Zero();
};

NormalSystem joint_normal_system(const Pose& z, const std::vector<Correspondence>& corr,
                                 const CameraModel& cam, const std::vector<double>& weights,
                                 const UnitQuaternion& q_ec_target, double f_q);

const char* to_string(PoseOptStatus s);

}  // namespace iavns
