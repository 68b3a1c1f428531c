#include <cmath>
#include <numbers>
#include <random>

#include "iavns/montecarlo.hpp"

namespace iavns {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double wrap_deg(double a) { return std::remainder(a, 360.0); }

FrameRecord attitude_altitude_errors(double t, const UnitQuaternion& q_nb_hat, const TruthSample& truth) {
    FrameRecord r;
    r.t = t;
    const Euler e = euler_from_quat(q_nb_hat);
    r.dpsi = wrap_deg(e.psi * kDeg - truth.psi_deg);
    r.dtheta = e.theta * kDeg - truth.theta_deg;
    r.dxi = wrap_deg(e.xi * kDeg - truth.xi_deg);
    r.dr = so3_log(ned_attitude(truth.pose_eb).conjugate() * q_nb_hat).norm() * kDeg;
    return r;
}

FrameRecord visual_errors(double t, const Pose& pose_ec, const Pose& zeta_bc, const TruthSample& truth) {
    const Pose body = body_from_camera(pose_ec, zeta_bc);
    FrameRecord r = attitude_altitude_errors(t, ned_attitude(body), truth);
    const GeodeticCoord g_hat = ecef_to_geodetic(body.translation);
    r.dh = g_hat.h - truth.h;
    const Vec3 d = body.translation - truth.pose_eb.translation;
    const Vec3 d_ned = ecef_to_ned_quat(ecef_to_geodetic(truth.pose_eb.translation)).conjugate().rotate(d);
    r.dhor = std::hypot(d_ned.x(), d_ned.y());
    return r;
}

FrameRecord ins_errors(const InsSample& s, const TruthSample& truth) {
    FrameRecord r = attitude_altitude_errors(s.t, s.est.q_nb_hat, truth);
    r.dh = s.dh_m;
    r.dhor = s.hor_error_ne.norm();
    return r;
}

bool counts_as_flag(PoseOptStatus s) {
    return s == PoseOptStatus::singular_hessian || s == PoseOptStatus::insufficient_points;
}

}  // namespace

double value_of(const FrameRecord& r, Variable v) {
    switch (v) {
        case Variable::psi: return r.dpsi;
        case Variable::theta: return r.dtheta;
        case Variable::xi: return r.dxi;
        case Variable::dr: return r.dr;
        case Variable::h: return r.dh;
        case Variable::hor: return r.dhor;
    }
    return 0.0;
}

const char* to_string(Variable v) {
    switch (v) {
        case Variable::psi: return "psi_deg";
        case Variable::theta: return "theta_deg";
        case Variable::xi: return "xi_deg";
        case Variable::dr: return "attitude_deg";
        case Variable::h: return "altitude_m";
        case Variable::hor: return "horizontal_m";
    }
    return "unknown";
}

const char* to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::ins: return "ins";
        case EstimatorKind::vns: return "vns";
        case EstimatorKind::iavns: return "iavns";
    }
    return "unknown";
}

std::optional<EstimatorKind> estimator_from_string(const std::string& s) {
    if (s == "ins") return EstimatorKind::ins;
    if (s == "vns") return EstimatorKind::vns;
    if (s == "iavns" || s == "ia-vns") return EstimatorKind::iavns;
    return std::nullopt;
}

bool EstimatorSet::contains(EstimatorKind k) const {
    switch (k) {
        case EstimatorKind::ins: return ins;
        case EstimatorKind::vns: return vns;
        case EstimatorKind::iavns: return iavns;
    }
    return false;
}

std::vector<EstimatorKind> EstimatorSet::kinds() const {
    std::vector<EstimatorKind> out;
    for (auto k : {EstimatorKind::ins, EstimatorKind::vns, EstimatorKind::iavns}) {
        if (contains(k)) out.push_back(k);
    }
    return out;
}

const EstimatorSeries* RunReport::find(EstimatorKind k) const {
    for (const auto& s : series) {
        if (s.kind == k) return &s;
    }
    return nullptr;
}

RunReport run_single(const ScenarioConfig& cfg, const EstimatorSet& estimators, std::uint64_t seed,
                     const RunOptions& opts) {
    cfg.validate();
    const ResolvedScenario rs = resolve_scenario(cfg, seed);
    const std::vector<TruthSample> traj = generate_trajectory(cfg, rs, seed);
    TerrainField field = generate_terrain(cfg, traj, seed);
    const Pose mount = downward_camera_mount();
    const std::vector<InsSample> ins = ins_stream(traj, cfg.ins, cfg.t_gnss, seed, cfg.adjustment.roc_window);

    RunReport report;
    report.seed = seed;
    report.distance_flown = ground_distance(traj);
    for (auto k : estimators.kinds()) report.series.push_back({k, {}, 0, 0});

    std::vector<VisualTracker> trackers;
    std::vector<std::size_t> tracker_series;
    for (std::size_t s = 0; s < report.series.size(); ++s) {
        if (report.series[s].kind == EstimatorKind::ins) continue;
        trackers.emplace_back(report.series[s].kind, cfg, mount, seed);
        tracker_series.push_back(s);
    }

    SplitMix64 obs_rng = substream(seed, "observations");
    SplitMix64 guess_rng = substream(seed, "guess");
    std::normal_distribution<double> gauss(0.0, 1.0);
    const ObservationNoise noise{cfg.obs_noise_px, cfg.outlier_rate, cfg.outlier_px};
    const double rot_sigma = cfg.frontend.guess_rot_sigma_deg / kDeg;
    const double trans_sigma = cfg.frontend.guess_trans_sigma_m;
    const int stride = std::max(1, opts.record_stride);

    bool visual_started = false;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const TruthSample& truth = traj[k];
        const bool record = k % static_cast<std::size_t>(stride) == 0 || k + 1 == traj.size();
        const bool gnss = truth.t < cfg.t_gnss;

        if (!gnss && !trackers.empty()) {
            const Pose cam_true = camera_from_body(truth.pose_eb, mount);
            const std::vector<Observation> obs =
                synthesize_observations(truth, field, cfg.camera, mount, noise, obs_rng);
            if (!visual_started) {
                for (std::size_t i = 0; i < trackers.size(); ++i) {
                    const double s0 = initial_scale_error(report.series[tracker_series[i]].kind, cfg, rs.scale_error);
                    const Pose cam0 = initial_visual_pose(truth, s0, mount, cfg.terrain.ground_elevation_m);
                    trackers[i].initialize(truth.t, cam0, 1.0 + s0, obs);
                }
                visual_started = true;
            } else {
                Tangent6 dn;
                dn.rho = Vec3(gauss(guess_rng), gauss(guess_rng), gauss(guess_rng)) * trans_sigma;
                dn.phi = Vec3(gauss(guess_rng), gauss(guess_rng), gauss(guess_rng)) * rot_sigma;
                const Pose cam_prev = camera_from_body(traj[k - 1].pose_eb, mount);
                for (std::size_t i = 0; i < trackers.size(); ++i) {
                    const FrameResult fr = trackers[i].step(truth.t, cam_prev, cam_true, obs, dn, ins[k].est);
                    EstimatorSeries& es = report.series[tracker_series[i]];
                    if (counts_as_flag(fr.status)) ++es.solver_flags;
                    if (fr.prior_active) ++es.prior_frames;
                    if (opts.on_frame) opts.on_frame(es.kind, truth.t, fr);
                }
            }
        }
        if (!record) continue;

        for (std::size_t s = 0, v = 0; s < report.series.size(); ++s) {
            EstimatorSeries& es = report.series[s];
            if (es.kind == EstimatorKind::ins) {
                es.records.push_back(ins_errors(ins[k], truth));
                continue;
            }
            FrameRecord r;
            r.t = truth.t;
            if (visual_started) r = visual_errors(truth.t, trackers[v].pose(), mount, truth);
            es.records.push_back(r);
            ++v;
        }
    }
    return report;
}

}  // namespace iavns
