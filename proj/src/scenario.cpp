#include "iavns/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace iavns {

double Range::draw(SplitMix64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    return lo == hi ? lo : lo + x * (hi - lo);
}

const char* to_string(ScenarioKind k) {
    return k == ScenarioKind::scenario1 ? "scenario1" : "scenario2";
}

const char* to_string(ManeuverKind k) {
    switch (k) {
        case ManeuverKind::turn: return "turn";
        case ManeuverKind::climb: return "climb";
        case ManeuverKind::speed: return "speed";
    }
    return "unknown";
}

const std::vector<TerrainPreset>& terrain_presets() {
    static const std::vector<TerrainPreset> presets = {
        {"DS", 40.0, 225.0, 0.06, 0.03},
        {"FM", 3.0, 250.0, 0.04, 0.012},
        {"FR", 25.0, 400.0, 0.05, 0.025},
        {"MX", 15.0, 300.0, 0.05, 0.02},
        {"PR", 6.0, 250.0, 0.04, 0.015},
        {"UR", 12.0, 375.0, 0.08, 0.02},
    };
    return presets;
}

void apply_terrain_preset(ScenarioConfig& cfg, const std::string& name) {
    for (const auto& p : terrain_presets()) {
        if (name == p.name) {
            cfg.terrain.preset = p.name;
            cfg.terrain.relief_sigma_m = p.relief_sigma_m;
            cfg.terrain.density = p.density;
            cfg.outlier_rate = p.outlier_rate;
            cfg.scale_error = {-p.scale_error, p.scale_error};
            return;
        }
    }
    throw std::invalid_argument("terrain.preset: unknown preset '" + name + "' (expected DS, FM, FR, MX, PR or UR)");
}

ScenarioConfig default_scenario(ScenarioKind kind) {
    ScenarioConfig cfg;
    cfg.kind = kind;
    if (kind == ScenarioKind::scenario1) {
        cfg.name = "scenario1";
        cfg.t_end = 3800.0;
        cfg.maneuvers = {
            {ManeuverKind::turn, {150.0, 300.0}, {30.0, 150.0}, true},
            {ManeuverKind::climb, {700.0, 1300.0}, {150.0, 350.0}, true},
            {ManeuverKind::speed, {1800.0, 2600.0}, {1.5, 3.0}, true},
        };
    } else {
        cfg.name = "scenario2";
        cfg.t_end = 500.0;
        for (int k = 0; k < 8; ++k) {
            const double t0 = 20.0 + 55.0 * k;
            cfg.maneuvers.push_back({ManeuverKind::turn, {t0, t0 + 10.0}, {15.0, 60.0}, true});
        }
    }
    apply_terrain_preset(cfg, "MX");
    return cfg;
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    auto range_ok = [&](const Range& r, const std::string& name) {
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) fail(name + ": expected lo <= hi");
    };
    if (!(t_end > 0.0)) fail("scenario.t_end must be > 0");
    if (!(t_gnss >= 0.0 && t_gnss < t_end)) fail("scenario.t_gnss must satisfy 0 <= t_gnss < t_end");
    if (!(frame_dt > 0.0 && frame_dt <= t_end)) fail("scenario.frame_dt must be > 0");
    range_ok(flight.altitude_m, "flight.altitude_m");
    range_ok(flight.airspeed_mps, "flight.airspeed_mps");
    range_ok(flight.bearing_deg, "flight.bearing_deg");
    if (!(flight.airspeed_mps.lo > 0.0)) fail("flight.airspeed_mps must be > 0");
    if (!(flight.bank_deg > 0.0 && flight.bank_deg < 60.0)) fail("flight.bank_deg must be in (0, 60)");
    if (!(flight.path_angle_deg > 0.0 && flight.path_angle_deg < 20.0)) fail("flight.path_angle_deg must be in (0, 20)");
    if (!(flight.roll_rate_dps > 0.0)) fail("flight.roll_rate_dps must be > 0");
    if (!(flight.path_rate_dps > 0.0)) fail("flight.path_rate_dps must be > 0");
    if (!(flight.accel_mps2 > 0.0)) fail("flight.accel_mps2 must be > 0");
    if (!(flight.turbulence_sigma_deg >= 0.0)) fail("flight.turbulence_sigma_deg must be >= 0");
    if (!(flight.turbulence_tau_s > 0.0)) fail("flight.turbulence_tau_s must be > 0");
    for (std::size_t i = 0; i < maneuvers.size(); ++i) {
        range_ok(maneuvers[i].start_s, "maneuver[" + std::to_string(i) + "].start_s");
        range_ok(maneuvers[i].change, "maneuver[" + std::to_string(i) + "].change");
    }
    if (!(terrain.density >= 20.0)) fail("terrain.density must be >= 20");
    if (!(terrain.relief_sigma_m >= 0.0)) fail("terrain.relief_sigma_m must be >= 0");
    if (!(terrain.cell_m > 0.0)) fail("terrain.cell_m must be > 0");
    if (!(flight.altitude_m.lo > terrain.ground_elevation_m + 100.0)) {
        fail("flight.altitude_m must stay at least 100 m above terrain.ground_elevation_m");
    }
    if (!(obs_noise_px >= 0.0)) fail("noise.obs_noise_px must be >= 0");
    if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0)) fail("noise.outlier_rate must be in [0, 1]");
    if (!(outlier_px >= 0.0)) fail("noise.outlier_px must be >= 0");
    range_ok(scale_error, "noise.scale_error");
    if (!(scale_error.lo > -1.0)) fail("noise.scale_error must be > -1");
    if (!(frontend.guess_rot_sigma_deg >= 0.0)) fail("frontend.guess_rot_sigma_deg must be >= 0");
    if (!(frontend.guess_trans_sigma_m >= 0.0)) fail("frontend.guess_trans_sigma_m must be >= 0");
    if (!(frontend.depth_noise_frac >= 0.0 && frontend.depth_noise_frac < 0.5)) {
        fail("frontend.depth_noise_frac must be in [0, 0.5)");
    }
    if (frontend.min_track_frames < 1) fail("frontend.min_track_frames must be >= 1");
    if (!(frontend.inertial_init_residual >= 0.0 && frontend.inertial_init_residual <= 1.0)) {
        fail("frontend.inertial_init_residual must be in [0, 1]");
    }
    if (!(frontend.map_refine_gain >= 0.0 && frontend.map_refine_gain <= 1.0)) {
        fail("frontend.map_refine_gain must be in [0, 1]");
    }
    if (!(ins.sigma_psi >= 0.0 && ins.sigma_theta >= 0.0 && ins.sigma_xi >= 0.0 && ins.sigma_h >= 0.0)) {
        fail("ins_model sigmas must be >= 0");
    }
    if (!(ins.tau_corr > 0.0)) fail("ins_model.tau_corr must be > 0");
    if (!(ins.hor_drift_rate >= 0.0)) fail("ins_model.hor_drift_rate must be >= 0");
    if (!(ins.hor_drift_turn_sigma_deg >= 0.0)) fail("ins_model.hor_drift_turn_sigma_deg must be >= 0");
    camera.validate();
    adjustment.validate();
    gn.validate();
}

ResolvedScenario resolve_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    SplitMix64 rng = substream(seed, "scenario");
    ResolvedScenario r;
    r.altitude_m = cfg.flight.altitude_m.draw(rng);
    r.airspeed_mps = cfg.flight.airspeed_mps.draw(rng);
    r.bearing_deg = cfg.flight.bearing_deg.draw(rng);
    r.scale_error = cfg.scale_error.draw(rng);
    std::bernoulli_distribution coin(0.5);
    for (const auto& m : cfg.maneuvers) {
        ManeuverSegment s;
        s.kind = m.kind;
        s.start_s = m.start_s.draw(rng);
        s.change = m.change.draw(rng);
        const bool negative = coin(rng);
        if (m.random_sign && negative) s.change = -s.change;
        r.segments.push_back(s);
    }
    std::stable_sort(r.segments.begin(), r.segments.end(),
                     [](const ManeuverSegment& a, const ManeuverSegment& b) { return a.start_s < b.start_s; });
    return r;
}

}  // namespace iavns
