#pragma once

#include <deque>
#include <optional>
#include <utility>

#include "iavns/camera.hpp"
#include "iavns/liegroup.hpp"

namespace iavns {

enum class AdjustmentMode { pitch_bank, attitude_slerp };

// Dead zones and maximum per-image adjustments. Angles in degrees.
struct AdjustmentConfig {
    double dh_low = 25.0;
    double dtheta_low = 0.2;
    double droc_low = 0.01;
    double dxi_low = 0.2;
    double dtheta1_max = 0.0005;
    double dtheta2_max = 0.0003;
    double dxi1_max = 0.0003;
    int roc_window = 100;
    AdjustmentMode mode = AdjustmentMode::pitch_bank;

    // Dead zones must be > 0 (infinity disables a law); maxima must be >= 0.
    void validate() const;
    // False when no law can ever produce a nonzero adjustment (every dead zone
    // infinite or every maximum zero), so no inertial input is ever used.
    bool can_activate() const;
};

struct InsEstimate {
    UnitQuaternion q_nb_hat;
    double h_hat = 0.0;    // m
    double roc_hat = 0.0;  // m/s, smoothed
};

struct VisualState {
    Pose zeta_ec;
    UnitQuaternion q_nb_vis;
    double psi_deg = 0.0;
    double theta_deg = 0.0;
    double xi_deg = 0.0;
    double h_vis = 0.0;
    double roc_vis = 0.0;
};

VisualState make_visual_state(const Pose& zeta_ec, const Pose& zeta_bc, double roc_vis);

struct PriorTargets {
    bool active = false;
    double dtheta_target = 0.0;  // deg
    double dxi_target = 0.0;     // deg
    double dtheta_h = 0.0;
    double dtheta_theta = 0.0;
    double dtheta_roc = 0.0;
    UnitQuaternion q_ec_target;
    double f_q = 0.0;  // filled by the caller from compute_fq at the initial guess
};

// Dead-zoned, saturated ramp opposing x: 0 inside low, full `max` beyond 2*low.
double adjustment_ramp(double x, double low, double max);

double pitch_adjust_altitude(double dh, const AdjustmentConfig& cfg);
double pitch_adjust_pitch(double dtheta, double dtheta_h, const AdjustmentConfig& cfg);
double pitch_adjust_roc(double droc, double dtheta_h, const AdjustmentConfig& cfg);
double bank_adjust(double dxi, const AdjustmentConfig& cfg);

PriorTargets build_targets(const VisualState& vis, const InsEstimate& ins, const UnitQuaternion& q_en,
                           const Pose& zeta_bc, const AdjustmentConfig& cfg);

// Rotate q_vis by dphi_target (rad) along the geodesic toward q_ins. Returns
// q_vis when the two are closer than 1e-9 rad.
UnitQuaternion attitude_target_slerp(const UnitQuaternion& q_vis, const UnitQuaternion& q_ins,
                                     double dphi_target);

// Least-squares slope of altitude over the most recent `window` samples.
class RocSmoother {
public:
    explicit RocSmoother(int window = 100) : window_(window) {}
    void push(double t, double h);
    // nullopt with fewer than two samples.
    std::optional<double> slope() const;
    std::size_t size() const { return samples_.size(); }

private:
    int window_;
    std::deque<std::pair<double, double>> samples_;
};

}  // namespace iavns
