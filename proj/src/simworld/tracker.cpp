#include <cmath>
#include <random>
#include <unordered_set>

#include "iavns/simworld.hpp"

namespace iavns {

Pose initial_visual_pose(const TruthSample& truth0, double scale_error, const Pose& zeta_bc,
                         double ground_elevation) {
    Pose cam = camera_from_body(truth0.pose_eb, zeta_bc);
    if (scale_error == 0.0) return cam;
    const Vec3 up = cam.translation.normalized();
    const double agl = cam.translation.norm() - kEarthRadius - ground_elevation;
    const Vec3 ground = cam.translation - agl * up;
    cam.translation = ground + (1.0 + scale_error) * (cam.translation - ground);
    return cam;
}

double initial_scale_error(EstimatorKind kind, const ScenarioConfig& cfg, double visual_scale_error) {
    if (kind != EstimatorKind::iavns || !cfg.adjustment.can_activate()) return visual_scale_error;
    return visual_scale_error * cfg.frontend.inertial_init_residual;
}

VisualTracker::VisualTracker(EstimatorKind kind, const ScenarioConfig& cfg, const Pose& zeta_bc,
                             std::uint64_t seed)
    : kind_(kind), cfg_(&cfg), zeta_bc_(zeta_bc), seed_(seed), roc_(cfg.adjustment.roc_window) {}

Vec3 VisualTracker::triangulate(const Observation& o, double scale) const {
    const CameraModel& cam = cfg_->camera;
    // Depth error is a property of the point, identical for every estimator.
    SplitMix64 rng(hash_seed(seed_, {stream_id("depth"), o.id}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double depth = o.p_c_true.z() * scale * (1.0 + cfg_->frontend.depth_noise_frac * gauss(rng));
    const Vec3 ray((o.corr.p_img.x() - cam.principal_px.x()) / cam.focal_px(),
                   (o.corr.p_img.y() - cam.principal_px.y()) / cam.focal_px(), 1.0);
    return pose_act(pose_, ray * depth);
}

void VisualTracker::initialize(double t, const Pose& pose_ec_est, double scale,
                               const std::vector<Observation>& obs) {
    pose_ = pose_ec_est;
    scale_ = scale;
    map_.clear();
    tracks_.clear();
    for (const auto& o : obs) {
        if (!o.outlier) map_[o.id] = triangulate(o, scale);
    }
    roc_ = RocSmoother(cfg_->adjustment.roc_window);
    roc_.push(t, ecef_to_geodetic(body_from_camera(pose_, zeta_bc_).translation).h);
}

void VisualTracker::maintain_map(const std::vector<Observation>& obs, const std::vector<int>& corr_index,
                                 const std::vector<double>& weights) {
    const CameraModel& cam = cfg_->camera;
    const double gain = cfg_->frontend.map_refine_gain;
    if (gain > 0.0) {
        const Pose inv = pose_inverse(pose_);
        for (std::size_t j = 0; j < corr_index.size() && j < weights.size(); ++j) {
            if (weights[j] < 0.5) continue;
            const Observation& o = obs[static_cast<std::size_t>(corr_index[j])];
            Vec3& p = map_[o.id];
            const double depth = pose_act(inv, p).z();
            if (!(depth > 0.0)) continue;
            const Vec3 ray((o.corr.p_img.x() - cam.principal_px.x()) / cam.focal_px(),
                           (o.corr.p_img.y() - cam.principal_px.y()) / cam.focal_px(), 1.0);
            p += gain * (pose_act(pose_, ray * depth) - p);
        }
    }

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(obs.size() * 2);
    for (const auto& o : obs) seen.insert(o.id);
    std::erase_if(map_, [&](const auto& kv) { return !seen.contains(kv.first); });
    std::erase_if(tracks_, [&](const auto& kv) { return !seen.contains(kv.first); });

    for (const auto& o : obs) {
        if (map_.contains(o.id)) continue;
        int& count = tracks_[o.id];
        if (o.outlier) continue;
        if (++count >= cfg_->frontend.min_track_frames) {
            map_[o.id] = triangulate(o, scale_);
            tracks_.erase(o.id);
        }
    }
}

FrameResult VisualTracker::step(double t, const Pose& pose_ec_true_prev, const Pose& pose_ec_true,
                                const std::vector<Observation>& obs, const Tangent6& guess_noise,
                                const InsEstimate& ins) {
    const Pose increment = pose_compose(pose_inverse(pose_ec_true_prev), pose_ec_true);
    const Pose guess = pose_plus(pose_compose(pose_, increment), guess_noise);

    std::vector<Correspondence> corr;
    std::vector<int> corr_index;
    corr.reserve(obs.size());
    corr_index.reserve(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto it = map_.find(obs[i].id);
        if (it == map_.end()) continue;
        corr.push_back({it->second, obs[i].corr.p_img});
        corr_index.push_back(static_cast<int>(i));
    }

    FrameResult fr;
    fr.n_correspondences = static_cast<int>(corr.size());
    const CameraModel& cam = cfg_->camera;
    PoseOptResult result = optimize_pose_reprojection(guess, corr, cam, cfg_->gn);

    if (kind_ == EstimatorKind::iavns && result.status != PoseOptStatus::insufficient_points) {
        const VisualState vis = make_visual_state(result.pose, zeta_bc_, roc_.slope().value_or(0.0));
        const Pose body = body_from_camera(result.pose, zeta_bc_);
        const UnitQuaternion q_en = ecef_to_ned_quat(ecef_to_geodetic(body.translation));
        const PriorTargets targets = build_targets(vis, ins, q_en, zeta_bc_, cfg_->adjustment);
        if (targets.active) {
            fr.e_rp0 = reprojection_residuals(guess, corr, cam).total;
            fr.e_q0 = attitude_error(guess.rotation, targets.q_ec_target).error;
            fr.f_q = compute_fq(fr.e_rp0, fr.e_q0);
            if (fr.f_q > 0.0) {
                fr.prior_active = true;
                result = optimize_pose_with_prior(guess, corr, cam, targets.q_ec_target, fr.f_q, cfg_->gn);
            }
        }
    }

    pose_ = result.pose;
    fr.pose_ec = pose_;
    fr.status = result.status;
    roc_.push(t, ecef_to_geodetic(body_from_camera(pose_, zeta_bc_).translation).h);
    maintain_map(obs, corr_index, result.per_point_weights);
    return fr;
}

}  // namespace iavns
