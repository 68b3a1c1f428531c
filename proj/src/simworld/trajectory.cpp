#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "iavns/simworld.hpp"

namespace iavns {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kGravity = 9.80665;

double wrap_pi(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a;
}

double step_toward(double value, double target, double max_step) {
    return value + std::clamp(target - value, -max_step, max_step);
}

// First-order Gauss-Markov (Ornstein-Uhlenbeck) sample path.
struct OuProcess {
    double a = 0.0;
    double drive = 0.0;
    double x = 0.0;
    OuProcess(double sigma, double tau, double dt) : a(std::exp(-dt / tau)), drive(sigma * std::sqrt(1.0 - a * a)) {}
    double next(double n) {
        x = a * x + drive * n;
        return x;
    }
};

}  // namespace

double maneuver_duration_estimate(const ManeuverSegment& s, const FlightConfig& flight, double airspeed_mps) {
    switch (s.kind) {
        case ManeuverKind::turn: {
            const double rate = kGravity * std::tan(flight.bank_deg * kDeg) / airspeed_mps;
            return std::abs(s.change * kDeg) / rate + 2.0 * flight.bank_deg / flight.roll_rate_dps + 10.0;
        }
        case ManeuverKind::climb: {
            const double vz = airspeed_mps * std::sin(flight.path_angle_deg * kDeg);
            return std::abs(s.change) / vz + 2.0 * flight.path_angle_deg / flight.path_rate_dps + 60.0;
        }
        case ManeuverKind::speed:
            return std::abs(s.change) / flight.accel_mps2 + 25.0;
    }
    return 0.0;
}

void check_schedule(const std::vector<ManeuverSegment>& segments, const FlightConfig& flight,
                    double airspeed_mps, double t_end) {
    double busy_until = -1.0;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& s = segments[k];
        if (!(s.start_s >= 0.0 && s.start_s < t_end)) {
            throw InvalidSchedule("maneuver " + std::to_string(k) + " starts outside [0, t_end)");
        }
        if (s.start_s < busy_until) {
            throw InvalidSchedule("maneuver " + std::to_string(k) + " (" + to_string(s.kind) + " at t=" +
                                  std::to_string(s.start_s) + " s) overlaps the previous one, busy until t=" +
                                  std::to_string(busy_until) + " s");
        }
        busy_until = s.start_s + maneuver_duration_estimate(s, flight, airspeed_mps);
    }
}

std::vector<TruthSample> generate_trajectory(const ScenarioConfig& cfg, const ResolvedScenario& rs,
                                             std::uint64_t seed) {
    std::vector<ManeuverSegment> segments = rs.segments;
    std::stable_sort(segments.begin(), segments.end(),
                     [](const ManeuverSegment& a, const ManeuverSegment& b) { return a.start_s < b.start_s; });
    check_schedule(segments, cfg.flight, rs.airspeed_mps, cfg.t_end);

    const FlightConfig& fl = cfg.flight;
    const double dt = cfg.frame_dt;
    const auto n_frames = static_cast<std::size_t>(std::llround(cfg.t_end / dt)) + 1;

    double lat = fl.latitude_deg * kDeg;
    double lon = fl.longitude_deg * kDeg;
    double h = rs.altitude_m;
    double v = rs.airspeed_mps;
    double chi = rs.bearing_deg * kDeg;
    double gamma = 0.0;
    double bank = 0.0;
    double chi_t = chi, h_t = h, v_t = v;

    const double bank_max = fl.bank_deg * kDeg;
    const double gamma_max = fl.path_angle_deg * kDeg;
    const double roll_step = fl.roll_rate_dps * kDeg * dt;
    const double path_step = fl.path_rate_dps * kDeg * dt;
    constexpr double kHeadingGain = 1.0;   // rad of bank per rad of heading error
    constexpr double kAltitudeGain = 0.003;  // rad of path angle per metre
    constexpr double kSpeedGain = 0.2;     // 1/s

    SplitMix64 rng = substream(seed, "turbulence");
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double turb_sigma = fl.turbulence_sigma_deg * kDeg;
    OuProcess t_psi(turb_sigma, fl.turbulence_tau_s, dt);
    OuProcess t_theta(turb_sigma, fl.turbulence_tau_s, dt);
    OuProcess t_xi(turb_sigma, fl.turbulence_tau_s, dt);

    std::vector<TruthSample> out;
    out.reserve(n_frames);
    std::size_t next_segment = 0;
    for (std::size_t k = 0; k < n_frames; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (next_segment < segments.size() && segments[next_segment].start_s <= t) {
            const auto& s = segments[next_segment++];
            switch (s.kind) {
                case ManeuverKind::turn: chi_t += s.change * kDeg; break;
                case ManeuverKind::climb: h_t += s.change; break;
                case ManeuverKind::speed: v_t += s.change; break;
            }
        }

        const double dpsi = t_psi.next(gauss(rng));
        const double dtheta = t_theta.next(gauss(rng));
        const double dxi = t_xi.next(gauss(rng));

        TruthSample smp;
        smp.t = t;
        const GeodeticCoord geo{lat, lon, h};
        const Euler e{wrap_pi(chi + dpsi), gamma + dtheta, bank + dxi};
        smp.pose_eb.rotation = ecef_to_ned_quat(geo) * quat_from_euler(e);
        smp.pose_eb.translation = geodetic_to_ecef(geo);
        // Angles reported as recovered from the stored pose so the sample is
        // self-consistent to rounding.
        const Euler back = euler_from_quat(ned_attitude(smp.pose_eb));
        smp.psi_deg = back.psi / kDeg;
        smp.theta_deg = back.theta / kDeg;
        smp.xi_deg = back.xi / kDeg;
        smp.h = ecef_to_geodetic(smp.pose_eb.translation).h;
        smp.v_ned = Vec3(v * std::cos(gamma) * std::cos(chi), v * std::cos(gamma) * std::sin(chi),
                         -v * std::sin(gamma));
        out.push_back(smp);

        // Guidance: heading, altitude and speed holds with rate limits.
        const double bank_cmd = std::clamp(kHeadingGain * wrap_pi(chi_t - chi), -bank_max, bank_max);
        const double gamma_cmd = std::clamp(kAltitudeGain * (h_t - h), -gamma_max, gamma_max);
        const double v_dot = std::clamp(kSpeedGain * (v_t - v), -fl.accel_mps2, fl.accel_mps2);

        const double r = kEarthRadius + h;
        const double clat = std::cos(lat);
        lat += smp.v_ned.x() / r * dt;
        lon += smp.v_ned.y() / (r * clat) * dt;
        h += -smp.v_ned.z() * dt;
        chi += kGravity * std::tan(bank) / v * dt;
        bank = step_toward(bank, bank_cmd, roll_step);
        gamma = step_toward(gamma, gamma_cmd, path_step);
        v += v_dot * dt;
    }
    return out;
}

double ground_distance(const std::vector<TruthSample>& traj, std::size_t from, std::size_t to) {
    if (traj.size() < 2) return 0.0;
    to = std::min(to, traj.size() - 1);
    double d = 0.0;
    for (std::size_t k = from; k < to; ++k) {
        const double dt = traj[k + 1].t - traj[k].t;
        d += std::hypot(traj[k].v_ned.x(), traj[k].v_ned.y()) * dt;
    }
    return d;
}

}  // namespace iavns
