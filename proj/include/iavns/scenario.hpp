#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iavns/camera.hpp"
#include "iavns/pose_opt.hpp"
#include "iavns/prior_policy.hpp"
#include "iavns/rng.hpp"

namespace iavns {

// Closed interval a stochastic parameter is drawn from; lo == hi is fixed.
struct Range {
    double lo = 0.0;
    double hi = 0.0;

    static Range fixed(double v) { return {v, v}; }
    double draw(SplitMix64& rng) const;
    bool operator==(const Range&) const = default;
};

enum class ScenarioKind { scenario1, scenario2 };
enum class ManeuverKind { turn, climb, speed };

// Turn: change in heading, deg. Climb: change in altitude, m. Speed: change in
// airspeed, m/s. The change magnitude is drawn from `change` and its sign is
// random when `random_sign` is set.
struct ManeuverSpec {
    ManeuverKind kind = ManeuverKind::turn;
    Range start_s;
    Range change;
    bool random_sign = true;
    bool operator==(const ManeuverSpec&) const = default;
};

struct ManeuverSegment {
    ManeuverKind kind = ManeuverKind::turn;
    double start_s = 0.0;
    double change = 0.0;
};

struct FlightConfig {
    double latitude_deg = 40.0;
    double longitude_deg = -3.5;
    Range altitude_m{2000.0, 2300.0};
    Range airspeed_mps{27.0, 31.0};
    Range bearing_deg{0.0, 360.0};
    double bank_deg = 10.0;
    double path_angle_deg = 2.0;
    double roll_rate_dps = 5.0;
    double path_rate_dps = 0.5;
    double accel_mps2 = 0.2;
    double turbulence_sigma_deg = 0.03;
    double turbulence_tau_s = 2.0;
    bool operator==(const FlightConfig&) const = default;
};

struct TerrainConfig {
    std::string preset = "MX";
    double ground_elevation_m = 300.0;
    double relief_sigma_m = 15.0;
    double density = 300.0;  // points per image at the initial height over ground
    double cell_m = 100.0;
    bool operator==(const TerrainConfig&) const = default;
};

// Synthetic stand-in for the visual front end (tracking and mapping).
struct FrontendConfig {
    double guess_rot_sigma_deg = 0.02;   // initial-guess increment noise
    double guess_trans_sigma_m = 0.3;
    double depth_noise_frac = 2e-4;      // per-point depth error at triangulation
    int min_track_frames = 5;            // sightings before a point is mapped
    double map_refine_gain = 0.2;        // per-frame pull of mapped points toward new rays
    // Share of the initial scale error left when initialization uses
    // GNSS-aided inertial distances (IA-VNS only).
    double inertial_init_residual = 0.1;
    bool operator==(const FrontendConfig&) const = default;
};

struct InsErrorModel {
    double sigma_psi = 0.18;   // deg
    double sigma_theta = 0.05; // deg
    double sigma_xi = 0.06;    // deg
    double sigma_h = 25.78;    // m
    double tau_corr = 300.0;   // s
    double hor_drift_rate = 1.45;  // m/s per horizontal axis
    double hor_drift_turn_sigma_deg = 0.2;  // direction random walk, deg/sqrt(s)
    bool operator==(const InsErrorModel&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario1";
    ScenarioKind kind = ScenarioKind::scenario1;
    double t_end = 3800.0;
    double t_gnss = 100.0;
    double frame_dt = 0.1;
    std::uint64_t seed = 1;

    FlightConfig flight;
    std::vector<ManeuverSpec> maneuvers;
    TerrainConfig terrain;

    double obs_noise_px = 0.3;
    double outlier_rate = 0.05;
    double outlier_px = 50.0;
    Range scale_error{-0.02, 0.02};

    FrontendConfig frontend;
    InsErrorModel ins;
    CameraModel camera;
    AdjustmentConfig adjustment;
    GnConfig gn;

    // Throws std::invalid_argument with a "section.field" message.
    void validate() const;
};

struct TerrainPreset {
    const char* name;
    double relief_sigma_m;
    double density;
    double outlier_rate;
    double scale_error;  // symmetric bound of the per-run initial scale error
};

const std::vector<TerrainPreset>& terrain_presets();
// Overwrites the terrain/noise fields owned by the preset; throws on unknown names.
void apply_terrain_preset(ScenarioConfig& cfg, const std::string& name);

ScenarioConfig default_scenario(ScenarioKind kind);

// Values drawn once per run from the configured ranges.
struct ResolvedScenario {
    double altitude_m = 0.0;
    double airspeed_mps = 0.0;
    double bearing_deg = 0.0;
    double scale_error = 0.0;
    std::vector<ManeuverSegment> segments;
};

ResolvedScenario resolve_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

const char* to_string(ScenarioKind k);
const char* to_string(ManeuverKind k);

}  // namespace iavns
