#include "iavns/prior_policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iavns {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

bool AdjustmentConfig::can_activate() const {
    if (mode == AdjustmentMode::attitude_slerp) return dtheta1_max > 0.0 && std::isfinite(dtheta_low);
    // The rate-of-climb law only scales the altitude term, so it cannot fire alone.
    const bool pitch = dtheta1_max > 0.0 && (std::isfinite(dh_low) || std::isfinite(dtheta_low));
    const bool bank = dxi1_max > 0.0 && std::isfinite(dxi_low);
    return pitch || bank;
}

void AdjustmentConfig::validate() const {
    auto check_low = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string("adjustment.") + name + " must be > 0");
    };
    auto check_max = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("adjustment.") + name + " must be finite and >= 0");
        }
    };
    check_low(dh_low, "dh_low");
    check_low(dtheta_low, "dtheta_low");
    check_low(droc_low, "droc_low");
    check_low(dxi_low, "dxi_low");
    check_max(dtheta1_max, "dtheta1_max");
    check_max(dtheta2_max, "dtheta2_max");
    check_max(dxi1_max, "dxi1_max");
    if (roc_window < 2) throw std::invalid_argument("adjustment.roc_window must be >= 2");
}

VisualState make_visual_state(const Pose& zeta_ec, const Pose& zeta_bc, double roc_vis) {
    VisualState s;
    s.zeta_ec = zeta_ec;
    const Pose zeta_eb = body_from_camera(zeta_ec, zeta_bc);
    s.q_nb_vis = ned_attitude(zeta_eb);
    const Euler e = euler_from_quat(s.q_nb_vis);
    s.psi_deg = e.psi / kDeg;
    s.theta_deg = e.theta / kDeg;
    s.xi_deg = e.xi / kDeg;
    s.h_vis = ecef_to_geodetic(zeta_eb.translation).h;
    s.roc_vis = roc_vis;
    return s;
}

double adjustment_ramp(double x, double low, double max) {
    const double a = std::abs(x);
    if (!(a >= low)) return 0.0;
    const double mag = a <= 2.0 * low ? max * ((a - low) / low) : max;
    return x > 0.0 ? -mag : mag;
}

double pitch_adjust_altitude(double dh, const AdjustmentConfig& cfg) {
    return adjustment_ramp(dh, cfg.dh_low, cfg.dtheta1_max);
}

double pitch_adjust_pitch(double dtheta, double dtheta_h, const AdjustmentConfig& cfg) {
    double adj = adjustment_ramp(dtheta, cfg.dtheta_low, cfg.dtheta1_max);
    if (adj == 0.0) return 0.0;
    if (dtheta_h != 0.0 && (adj > 0.0) != (dtheta_h > 0.0)) return 0.0;
    const double lim = cfg.dtheta1_max;
    if (std::abs(dtheta_h + adj) > lim) {
        adj = std::copysign(lim, dtheta_h + adj) - dtheta_h;
        // Rounding in the subtraction can leave the pair one ulp over the limit.
        while (std::abs(dtheta_h + adj) > lim) adj = std::nextafter(adj, 0.0);
    }
    return adj;
}

double pitch_adjust_roc(double droc, double dtheta_h, const AdjustmentConfig& cfg) {
    if (dtheta_h == 0.0 || cfg.dtheta1_max == 0.0) return 0.0;
    const double adj = adjustment_ramp(droc, cfg.droc_low, cfg.dtheta2_max);
    if (adj == 0.0) return 0.0;
    return adj * (std::abs(dtheta_h) / cfg.dtheta1_max);
}

double bank_adjust(double dxi, const AdjustmentConfig& cfg) {
    return adjustment_ramp(dxi, cfg.dxi_low, cfg.dxi1_max);
}

UnitQuaternion attitude_target_slerp(const UnitQuaternion& q_vis, const UnitQuaternion& q_ins,
                                     double dphi_target) {
    const double sep = rotation_angle_between(q_vis, q_ins);
    if (sep < 1e-9) return q_vis;
    return slerp(q_vis, q_ins, dphi_target / sep);
}

PriorTargets build_targets(const VisualState& vis, const InsEstimate& ins, const UnitQuaternion& q_en,
                           const Pose& zeta_bc, const AdjustmentConfig& cfg) {
    PriorTargets out;
    if (cfg.mode == AdjustmentMode::attitude_slerp) {
        const UnitQuaternion q_ins_ec = q_en * ins.q_nb_hat * zeta_bc.rotation;
        const double sep = rotation_angle_between(vis.zeta_ec.rotation, q_ins_ec);
        out.q_ec_target = vis.zeta_ec.rotation;
        if (sep > cfg.dtheta_low * kDeg) {
            const double dphi = std::min(sep, cfg.dtheta1_max * kDeg);
            if (dphi > 0.0) {
                out.q_ec_target = attitude_target_slerp(vis.zeta_ec.rotation, q_ins_ec, dphi);
                out.active = true;
            }
        }
        return out;
    }

    const Euler ins_e = euler_from_quat(ins.q_nb_hat);
    out.dtheta_h = pitch_adjust_altitude(vis.h_vis - ins.h_hat, cfg);
    out.dtheta_theta = pitch_adjust_pitch(vis.theta_deg - ins_e.theta / kDeg, out.dtheta_h, cfg);
    out.dtheta_roc = pitch_adjust_roc(vis.roc_vis - ins.roc_hat, out.dtheta_h, cfg);
    out.dtheta_target = out.dtheta_h + out.dtheta_theta + out.dtheta_roc;
    out.dxi_target = bank_adjust(vis.xi_deg - ins_e.xi / kDeg, cfg);
    out.active = out.dtheta_target != 0.0 || out.dxi_target != 0.0;

    Euler target;
    target.psi = vis.psi_deg * kDeg;
    target.theta = (vis.theta_deg + out.dtheta_target) * kDeg;
    target.xi = (vis.xi_deg + out.dxi_target) * kDeg;
    out.q_ec_target = q_en * quat_from_euler(target) * zeta_bc.rotation;
    return out;
}

void RocSmoother::push(double t, double h) {
    samples_.emplace_back(t, h);
    while (samples_.size() > static_cast<std::size_t>(window_)) samples_.pop_front();
}

std::optional<double> RocSmoother::slope() const {
    const std::size_t n = samples_.size();
    if (n < 2) return std::nullopt;
    const double t0 = samples_.front().first;
    double st = 0.0, sh = 0.0;
    for (const auto& [t, h] : samples_) {
        st += t - t0;
        sh += h;
    }
    const double mt = st / static_cast<double>(n);
    const double mh = sh / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [t, h] : samples_) {
        const double dt = (t - t0) - mt;
        sxy += dt * (h - mh);
        sxx += dt * dt;
    }
    if (!(sxx > 0.0)) return std::nullopt;
    return sxy / sxx;
}

}  // namespace iavns
