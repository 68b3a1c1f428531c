#include "iavns/pose_opt.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "iavns/kernels.hpp"

namespace iavns {

namespace {

kernels::Intrinsics intrinsics_of(const CameraModel& cam) {
    return {cam.focal_px(), cam.principal_px.x(), cam.principal_px.y()};
}

kernels::WorldToCamera world_to_camera(const Pose& z) {
    kernels::WorldToCamera w{};
    const Mat3 r = z.rotation.matrix();
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) w.rt[3 * i + k] = r(k, i);
        w.t[i] = z.translation[i];
    }
    return w;
}

kernels::Correspondences to_block(const std::vector<Correspondence>& corr) {
    kernels::Correspondences b;
    b.reserve(corr.size());
    for (const auto& c : corr) b.push_back(c.p_e.x(), c.p_e.y(), c.p_e.z(), c.p_img.x(), c.p_img.y());
    return b;
}

int count_valid(const kernels::Residuals& r) {
    int n = 0;
    for (double v : r.valid) n += v != 0.0 ? 1 : 0;
    return n;
}

double sum_of_norms(const kernels::Residuals& r) {
    double total = 0.0;
    for (std::size_t j = 0; j < r.sq.size(); ++j) {
        if (r.valid[j] != 0.0) total += std::sqrt(r.sq[j]);
    }
    return total;
}

Vec3 aligned_target_log(const UnitQuaternion& q, const UnitQuaternion& q_target) {
    Eigen::Quaterniond t = q_target.eigen();
    if (q.dot(q_target) < 0.0) t.coeffs() = -t.coeffs();
    return so3_log_unfolded(t);
}

struct Robustifier {
    RobustKind kind;
    TukeyConfig tukey;

    double weight(double sq) const { return kind == RobustKind::tukey ? tukey_weight(sq, tukey) : 1.0; }
    double rho(double sq) const { return kind == RobustKind::tukey ? tukey_rho(sq, tukey) : 0.5 * sq; }
};

Robustifier robustifier_for(const kernels::Residuals& r, const GnConfig& cfg) {
    if (cfg.robust == RobustKind::none) return {RobustKind::none, {}};
    if (cfg.tukey) return {RobustKind::tukey, *cfg.tukey};
    std::vector<double> norms;
    norms.reserve(r.sq.size());
    for (std::size_t j = 0; j < r.sq.size(); ++j) {
        if (r.valid[j] != 0.0) norms.push_back(std::sqrt(r.sq[j]));
    }
    return {RobustKind::tukey, adaptive_tukey(norms, cfg.scale)};
}

void fill_weights(const kernels::Residuals& r, const Robustifier& rb, std::vector<double>& w) {
    w.resize(r.sq.size());
    for (std::size_t j = 0; j < r.sq.size(); ++j) w[j] = r.valid[j] != 0.0 ? rb.weight(r.sq[j]) : 0.0;
}

double robust_cost(const kernels::Residuals& r, const Robustifier& rb) {
    double c = 0.0;
    for (std::size_t j = 0; j < r.sq.size(); ++j) {
        if (r.valid[j] != 0.0) c += rb.rho(r.sq[j]);
    }
    return c;
}

void unpack(const kernels::NormalEquations& ne, NormalSystem& sys) {
    int idx = 0;
    for (int r = 0; r < 6; ++r) {
        for (int c = r; c < 6; ++c) {
            sys.h(r, c) = ne.h[idx];
            sys.h(c, r) = ne.h[idx];
            ++idx;
        }
        sys.g[r] = ne.g[r];
    }
}

void add_prior(const Pose& z, const UnitQuaternion& q_target, double f_q, NormalSystem& sys) {
    const Vec3 r = so3_log(z.rotation);
    const Vec3 e = r - aligned_target_log(z.rotation, q_target);
    const Mat3 jinv = so3_right_jacobian_inv(r);
    const double f2 = f_q * f_q;
    // Jinv^T Jinv rounds asymmetrically; average the halves so H stays exactly symmetric.
    const Mat3 block = jinv.transpose() * jinv;
    sys.h.bottomRightCorner<3, 3>() += f2 * (0.5 * (block + block.transpose()));
    sys.g.tail<3>() += f2 * jinv.transpose() * e;
}

bool ill_conditioned(const Mat6& h, double max_condition) {
    const Vec6 d = h.diagonal();
    if ((d.array() <= 0.0).any() || !d.allFinite()) return true;
    const Vec6 s = d.cwiseSqrt().cwiseInverse();
    const Mat6 scaled = s.asDiagonal() * h * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat6> es(scaled, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    return !(lo > 0.0) || hi / lo > max_condition;
}

}  // namespace

void GnConfig::validate() const {
    if (!(delta_rp > 0.0)) throw std::invalid_argument("pose_opt.delta_rp must be > 0");
    if (!(delta_q > 0.0)) throw std::invalid_argument("pose_opt.delta_q must be > 0");
    if (max_iters < 1) throw std::invalid_argument("pose_opt.max_iters must be >= 1");
    if (tukey && !(tukey->c > 0.0)) throw std::invalid_argument("pose_opt.tukey_cutoff must be > 0");
    if (!(scale.tuning > 0.0) || !(scale.floor_px > 0.0)) {
        throw std::invalid_argument("pose_opt robust scale parameters must be > 0");
    }
}

const char* to_string(PoseOptStatus s) {
    switch (s) {
        case PoseOptStatus::converged: return "converged";
        case PoseOptStatus::max_iterations: return "max_iterations";
        case PoseOptStatus::singular_hessian: return "singular_hessian";
        case PoseOptStatus::insufficient_points: return "insufficient_points";
    }
    return "unknown";
}

Vec3 to_camera_frame(const Pose& pose_ec, const Vec3& p_e) {
    const kernels::WorldToCamera w = world_to_camera(pose_ec);
    const double dx = p_e.x() - w.t[0];
    const double dy = p_e.y() - w.t[1];
    const double dz = p_e.z() - w.t[2];
    return {w.rt[0] * dx + w.rt[1] * dy + w.rt[2] * dz,
            w.rt[3] * dx + w.rt[4] * dy + w.rt[5] * dz,
            w.rt[6] * dx + w.rt[7] * dy + w.rt[8] * dz};
}

ReprojectionResiduals reprojection_residuals(const Pose& z, const std::vector<Correspondence>& corr,
                                             const CameraModel& cam) {
    const auto block = to_block(corr);
    kernels::Residuals r;
    kernels::active_kernels().residuals(world_to_camera(z), intrinsics_of(cam), block, r);
    ReprojectionResiduals out;
    out.residuals.resize(corr.size());
    out.valid.resize(corr.size());
    for (std::size_t j = 0; j < corr.size(); ++j) {
        out.valid[j] = r.valid[j] != 0.0;
        out.residuals[j] = Vec2(r.ex[j], r.ey[j]);
    }
    out.n_valid = count_valid(r);
    out.total = sum_of_norms(r);
    return out;
}

AttitudeError attitude_error(const UnitQuaternion& q, const UnitQuaternion& q_target) {
    AttitudeError e;
    e.residual = so3_log(q) - aligned_target_log(q, q_target);
    e.error = e.residual.norm();
    return e;
}

AttitudeOptResult optimize_attitude(const UnitQuaternion& q0, const UnitQuaternion& q_target,
                                    const GnConfig& cfg) {
    AttitudeOptResult out;
    out.q = q0;
    AttitudeError e = attitude_error(q0, q_target);
    out.errors.push_back(e.error);
    for (int it = 0; it < cfg.max_iters; ++it) {
        // With a square, invertible J_R^-1 the normal-equation step collapses to -J_R E.
        const Vec3 step = -so3_right_jacobian(so3_log(out.q)) * e.residual;
        const UnitQuaternion q_new = out.q * so3_exp(step);
        const AttitudeError e_new = attitude_error(q_new, q_target);
        if (!(e_new.error < e.error)) break;
        const double decrease = e.error - e_new.error;
        out.q = q_new;
        e = e_new;
        ++out.iterations;
        out.errors.push_back(e.error);
        if (decrease < cfg.delta_q) break;
    }
    return out;
}

double compute_fq(double e_rp0, double e_q0) {
    if (e_q0 < 1e-12) return 0.0;
    return e_rp0 / e_q0;
}

NormalSystem joint_normal_system(const Pose& z, const std::vector<Correspondence>& corr,
                                 const CameraModel& cam, const std::vector<double>& weights,
                                 const UnitQuaternion& q_ec_target, double f_q) {
    const auto& k = kernels::active_kernels();
    const auto block = to_block(corr);
    kernels::Residuals r;
    k.residuals(world_to_camera(z), intrinsics_of(cam), block, r);
    std::vector<double> w(weights);
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (r.valid[j] == 0.0) w[j] = 0.0;
    }
    kernels::NormalEquations ne;
    k.accumulate(intrinsics_of(cam), r, w.data(), ne);
    NormalSystem sys;
    unpack(ne, sys);
    if (f_q != 0.0) add_prior(z, q_ec_target, f_q, sys);
    return sys;
}

PoseOptResult optimize_pose_with_prior(const Pose& z0, const std::vector<Correspondence>& corr,
                                       const CameraModel& cam, const UnitQuaternion& q_ec_target,
                                       double f_q, const GnConfig& cfg) {
    if (!(f_q >= 0.0)) throw std::invalid_argument("f_q must be >= 0");
    const auto& k = kernels::active_kernels();
    const auto intr = intrinsics_of(cam);
    const auto block = to_block(corr);
    const bool prior = f_q != 0.0;

    auto prior_term = [&](const Pose& z) {
        return prior ? attitude_error(z.rotation, q_ec_target).error : 0.0;
    };
    auto prior_cost = [&](const Pose& z) {
        if (!prior) return 0.0;
        const double e = f_q * prior_term(z);
        return 0.5 * e * e;
    };

    PoseOptResult out;
    out.pose = z0;
    if (cfg.record_iterates) out.iterates.push_back(z0);

    kernels::Residuals res;
    k.residuals(world_to_camera(z0), intr, block, res);
    out.initial_error = sum_of_norms(res) + f_q * prior_term(z0);
    out.final_error = out.initial_error;
    if (count_valid(res) < kMinCorrespondences) {
        out.status = PoseOptStatus::insufficient_points;
        out.per_point_weights.assign(corr.size(), 0.0);
        return out;
    }

    Pose z = z0;
    std::vector<double> weights;
    kernels::Residuals trial;
    bool stopped = false;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        const Robustifier rb = robustifier_for(res, cfg);
        fill_weights(res, rb, weights);
        const double cost = robust_cost(res, rb) + prior_cost(z);

        kernels::NormalEquations ne;
        k.accumulate(intr, res, weights.data(), ne);
        NormalSystem sys;
        unpack(ne, sys);
        if (prior) add_prior(z, q_ec_target, f_q, sys);

        if (ill_conditioned(sys.h, cfg.max_condition)) {
            out.status = PoseOptStatus::singular_hessian;
            out.converged = false;
            stopped = true;
            break;
        }
        const Vec6 dx = -sys.h.ldlt().solve(sys.g);
        const Pose z_new = pose_plus(z, Tangent6::from_vector(dx));
        k.residuals(world_to_camera(z_new), intr, block, trial);
        out.iterations = it;
        if (count_valid(trial) < kMinCorrespondences) {
            out.status = PoseOptStatus::converged;
            out.converged = true;
            stopped = true;
            break;
        }
        const double cost_new = robust_cost(trial, rb) + prior_cost(z_new);
        if (!(cost_new <= cost)) {
            // Pure Gauss-Newton without damping: an uphill step ends the solve
            // and the previous iterate is kept.
            out.status = PoseOptStatus::converged;
            out.converged = true;
            stopped = true;
            break;
        }
        z = z_new;
        std::swap(res, trial);
        if (cfg.record_iterates) out.iterates.push_back(z);
        if (cost - cost_new < cfg.delta_rp) {
            out.status = PoseOptStatus::converged;
            out.converged = true;
            stopped = true;
            break;
        }
    }
    if (!stopped) {
        out.status = PoseOptStatus::max_iterations;
        out.converged = false;
    }

    out.pose = z;
    const Robustifier rb = robustifier_for(res, cfg);
    fill_weights(res, rb, out.per_point_weights);
    out.final_cost = robust_cost(res, rb) + prior_cost(z);
    out.final_error = sum_of_norms(res) + f_q * prior_term(z);
    return out;
}

PoseOptResult optimize_pose_reprojection(const Pose& z0, const std::vector<Correspondence>& corr,
                                         const CameraModel& cam, const GnConfig& cfg) {
    return optimize_pose_with_prior(z0, corr, cam, UnitQuaternion::identity(), 0.0, cfg);
}

}  // namespace iavns
