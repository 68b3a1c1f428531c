#include <cmath>
#include <numbers>
#include <random>

#include "iavns/simworld.hpp"

namespace iavns {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Critically damped second-order Gauss-Markov process with stationary std
// `sigma`. Smooth sample paths keep the derived rate of climb well behaved.
class SecondOrderMarkov {
public:
    SecondOrderMarkov(double sigma, double tau, double dt)
        : omega_(2.0 / tau), dt_(dt), drive_(std::sqrt(4.0 * omega_ * omega_ * omega_ * sigma * sigma * dt)) {}

    double next(double n) {
        rate_ += (-2.0 * omega_ * rate_ - omega_ * omega_ * x_) * dt_ + drive_ * n;
        x_ += rate_ * dt_;
        return x_;
    }

private:
    double omega_, dt_, drive_;
    double x_ = 0.0, rate_ = 0.0;
};

}  // namespace

std::vector<InsSample> ins_stream(const std::vector<TruthSample>& truth, const InsErrorModel& model,
                                  double t_gnss, std::uint64_t seed, int roc_window) {
    std::vector<InsSample> out;
    out.reserve(truth.size());
    if (truth.empty()) return out;
    const double dt = truth.size() > 1 ? truth[1].t - truth[0].t : 0.1;

    SplitMix64 rng = substream(seed, "ins");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    SecondOrderMarkov e_psi(model.sigma_psi, model.tau_corr, dt);
    SecondOrderMarkov e_theta(model.sigma_theta, model.tau_corr, dt);
    SecondOrderMarkov e_xi(model.sigma_xi, model.tau_corr, dt);
    SecondOrderMarkov e_h(model.sigma_h, model.tau_corr, dt);
    double bias_dir = angle(rng);
    const double bias_mag = std::sqrt(2.0) * model.hor_drift_rate;
    const double dir_step = model.hor_drift_turn_sigma_deg * kDeg * std::sqrt(dt);
    Vec2 hor = Vec2::Zero();
    RocSmoother roc(roc_window);

    double dpsi = 0.0, dtheta = 0.0, dxi = 0.0, dh = 0.0;
    for (const auto& s : truth) {
        // Draws happen every frame so the stream does not depend on t_gnss.
        const double n[5] = {gauss(rng), gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
        if (s.t >= t_gnss) {
            dpsi = e_psi.next(n[0]);
            dtheta = e_theta.next(n[1]);
            dxi = e_xi.next(n[2]);
            dh = e_h.next(n[3]);
            bias_dir += dir_step * n[4];
            hor += bias_mag * Vec2(std::cos(bias_dir), std::sin(bias_dir)) * dt;
        }
        InsSample smp;
        smp.t = s.t;
        smp.dpsi_deg = dpsi;
        smp.dtheta_deg = dtheta;
        smp.dxi_deg = dxi;
        smp.dh_m = dh;
        smp.hor_error_ne = hor;
        if (dpsi == 0.0 && dtheta == 0.0 && dxi == 0.0) {
            smp.est.q_nb_hat = ned_attitude(s.pose_eb);
        } else {
            smp.est.q_nb_hat = quat_from_euler({(s.psi_deg + dpsi) * kDeg, (s.theta_deg + dtheta) * kDeg,
                                                (s.xi_deg + dxi) * kDeg});
        }
        smp.est.h_hat = s.h + dh;
        roc.push(s.t, smp.est.h_hat);
        smp.est.roc_hat = roc.slope().value_or(0.0);
        out.push_back(smp);
    }
    return out;
}

}  // namespace iavns
