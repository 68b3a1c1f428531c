#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "iavns/camera.hpp"
#include "iavns/pose_opt.hpp"
#include "iavns/prior_policy.hpp"
#include "iavns/rng.hpp"
#include "iavns/scenario.hpp"

namespace iavns {

// ---------------------------------------------------------------- trajectory

struct TruthSample {
    double t = 0.0;
    Pose pose_eb;  // body pose in ECEF
    double psi_deg = 0.0;
    double theta_deg = 0.0;
    double xi_deg = 0.0;
    double h = 0.0;
    Vec3 v_ned = Vec3::Zero();
};

class InvalidSchedule : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Rough time a maneuver needs to settle, used to reject overlapping schedules.
double maneuver_duration_estimate(const ManeuverSegment& s, const FlightConfig& flight, double airspeed_mps);
void check_schedule(const std::vector<ManeuverSegment>& segments, const FlightConfig& flight,
                    double airspeed_mps, double t_end);

std::vector<TruthSample> generate_trajectory(const ScenarioConfig& cfg, const ResolvedScenario& rs,
                                             std::uint64_t seed);

// Horizontal distance flown between samples [from, to].
double ground_distance(const std::vector<TruthSample>& traj, std::size_t from = 0,
                       std::size_t to = static_cast<std::size_t>(-1));

// ------------------------------------------------------------------- terrain

struct TerrainPoint {
    std::uint64_t id = 0;
    Vec3 p_e = Vec3::Zero();
};

// Procedural point field on a latitude/longitude cell grid. Each cell's points
// are a pure function of (seed, cell), so the field is identical no matter in
// which order cells are first touched.
class TerrainField {
public:
    TerrainField(const TerrainConfig& cfg, double lat_ref, double lon_ref, double points_per_m2,
                 std::uint64_t seed);

    const std::vector<TerrainPoint>& cell(int i, int j);
    void query(const Vec3& center_e, double radius, std::vector<TerrainPoint>& out);
    // Every point generated so far, in id order.
    std::vector<TerrainPoint> points() const;

    double relief_sigma() const { return cfg_.relief_sigma_m; }
    double ground_elevation() const { return cfg_.ground_elevation_m; }
    double points_per_m2() const { return density_; }
    std::uint64_t seed() const { return seed_; }

private:
    static std::int64_t key(int i, int j) { return (static_cast<std::int64_t>(i) << 32) ^ static_cast<std::uint32_t>(j); }

    TerrainConfig cfg_;
    double lat_ref_, lon_ref_;
    double dlat_, dlon_;
    double density_;
    std::uint64_t seed_;
    std::unordered_map<std::int64_t, std::vector<TerrainPoint>> cells_;
};

// Areal density that yields `per_image` points in a nadir image taken from
// `height_agl` metres above the ground.
double areal_density_for(const CameraModel& cam, double per_image, double height_agl);

TerrainField generate_terrain(const ScenarioConfig& cfg, const std::vector<TruthSample>& trajectory,
                              std::uint64_t seed);

// -------------------------------------------------------------- observations

struct Observation {
    std::uint64_t id = 0;
    Correspondence corr;
    Vec3 p_c_true = Vec3::Zero();  // true camera-frame point
    bool outlier = false;
};

struct ObservationNoise {
    double obs_noise_px = 0.5;
    double outlier_rate = 0.05;
    double outlier_px = 50.0;
};

std::vector<Observation> synthesize_observations(const TruthSample& truth, TerrainField& field,
                                                 const CameraModel& cam, const Pose& zeta_bc,
                                                 const ObservationNoise& noise, SplitMix64& rng);

std::vector<Correspondence> correspondences_of(const std::vector<Observation>& obs);

// ----------------------------------------------------------------------- INS

struct InsSample {
    double t = 0.0;
    InsEstimate est;
    double dpsi_deg = 0.0;
    double dtheta_deg = 0.0;
    double dxi_deg = 0.0;
    double dh_m = 0.0;
    Vec2 hor_error_ne = Vec2::Zero();
};

std::vector<InsSample> ins_stream(const std::vector<TruthSample>& truth, const InsErrorModel& model,
                                  double t_gnss, std::uint64_t seed, int roc_window = 100);

// ------------------------------------------------------------ visual tracker

// True initial camera pose with its height over the terrain scaled by
// (1 + scale_error).
Pose initial_visual_pose(const TruthSample& truth0, double scale_error, const Pose& zeta_bc,
                         double ground_elevation);

enum class EstimatorKind { ins, vns, iavns };

// Scale error an estimator starts from. IA-VNS sizes its initial map with
// GNSS-aided inertial distances and keeps only a residual share of the visual
// error; when its adjustment can never activate it uses no inertial input and
// starts exactly like VNS.
double initial_scale_error(EstimatorKind kind, const ScenarioConfig& cfg, double visual_scale_error);

struct FrameResult {
    Pose pose_ec;
    PoseOptStatus status = PoseOptStatus::converged;
    int n_correspondences = 0;
    bool prior_active = false;
    double f_q = 0.0;
    double e_rp0 = 0.0;  // plain reprojection error at the initial guess
    double e_q0 = 0.0;   // attitude error to the target at the initial guess
};

// Stand-in for the tracking and mapping threads of a monocular VO pipeline.
// Owns a map of estimated point positions; points are triangulated from the
// tracker's own pose estimates, so pose errors feed back into the map.
class VisualTracker {
public:
    VisualTracker(EstimatorKind kind, const ScenarioConfig& cfg, const Pose& zeta_bc, std::uint64_t seed);

    void initialize(double t, const Pose& pose_ec_est, double scale,
                    const std::vector<Observation>& obs);

    // guess_noise perturbs the true inter-frame increment used as initial guess.
    FrameResult step(double t, const Pose& pose_ec_true_prev, const Pose& pose_ec_true,
                     const std::vector<Observation>& obs, const Tangent6& guess_noise, const InsEstimate& ins);

    const Pose& pose() const { return pose_; }
    std::size_t map_size() const { return map_.size(); }
    // Scale every triangulated point inherits from initialization.
    double map_scale() const { return scale_; }

private:
    void maintain_map(const std::vector<Observation>& obs, const std::vector<int>& corr_index,
                      const std::vector<double>& weights);
    Vec3 triangulate(const Observation& o, double scale) const;

    EstimatorKind kind_;
    const ScenarioConfig* cfg_;
    Pose zeta_bc_;
    std::uint64_t seed_;
    Pose pose_;
    double scale_ = 1.0;
    std::unordered_map<std::uint64_t, Vec3> map_;
    std::unordered_map<std::uint64_t, int> tracks_;
    RocSmoother roc_;
};

}  // namespace iavns
