#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "iavns/simworld.hpp"

namespace iavns {

namespace {

constexpr int kIdOffset = 1 << 20;

}  // namespace

TerrainField::TerrainField(const TerrainConfig& cfg, double lat_ref, double lon_ref, double points_per_m2,
                           std::uint64_t seed)
    : cfg_(cfg),
      lat_ref_(lat_ref),
      lon_ref_(lon_ref),
      dlat_(cfg.cell_m / kEarthRadius),
      dlon_(cfg.cell_m / (kEarthRadius * std::cos(lat_ref))),
      density_(points_per_m2),
      seed_(seed) {}

const std::vector<TerrainPoint>& TerrainField::cell(int i, int j) {
    const auto k = key(i, j);
    auto it = cells_.find(k);
    if (it != cells_.end()) return it->second;

    SplitMix64 rng(hash_seed(seed_, {stream_id("terrain"), static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(j)}));
    const double area = (dlat_ * kEarthRadius) * (dlon_ * kEarthRadius * std::cos(lat_ref_));
    std::poisson_distribution<int> count(density_ * area);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = count(rng);
    std::vector<TerrainPoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        GeodeticCoord g;
        g.latitude = lat_ref_ + (i + unit(rng)) * dlat_;
        g.longitude = lon_ref_ + (j + unit(rng)) * dlon_;
        const double relief = gauss(rng);
        g.h = cfg_.ground_elevation_m + (cfg_.relief_sigma_m > 0.0 ? cfg_.relief_sigma_m * relief : 0.0);
        TerrainPoint p;
        // Cell indices and the in-cell counter packed into disjoint bit ranges.
        p.id = (static_cast<std::uint64_t>(i + kIdOffset) << 43) |
               (static_cast<std::uint64_t>(j + kIdOffset) << 22) | static_cast<std::uint64_t>(m);
        p.p_e = geodetic_to_ecef(g);
        pts.push_back(p);
    }
    return cells_.emplace(k, std::move(pts)).first->second;
}

void TerrainField::query(const Vec3& center_e, double radius, std::vector<TerrainPoint>& out) {
    out.clear();
    const GeodeticCoord g = ecef_to_geodetic(center_e);
    const int ic = static_cast<int>(std::floor((g.latitude - lat_ref_) / dlat_));
    const int jc = static_cast<int>(std::floor((g.longitude - lon_ref_) / dlon_));
    const int di = static_cast<int>(std::ceil(radius / cfg_.cell_m)) + 1;
    const double lon_cell_m = dlon_ * kEarthRadius * std::max(std::cos(g.latitude), 1e-3);
    const int dj = static_cast<int>(std::ceil(radius / lon_cell_m)) + 1;
    const double r2 = radius * radius;
    for (int i = ic - di; i <= ic + di; ++i) {
        for (int j = jc - dj; j <= jc + dj; ++j) {
            for (const auto& p : cell(i, j)) {
                if ((p.p_e - center_e).squaredNorm() <= r2) out.push_back(p);
            }
        }
    }
}

std::vector<TerrainPoint> TerrainField::points() const {
    std::vector<TerrainPoint> all;
    for (const auto& [k, pts] : cells_) all.insert(all.end(), pts.begin(), pts.end());
    std::sort(all.begin(), all.end(), [](const TerrainPoint& a, const TerrainPoint& b) { return a.id < b.id; });
    return all;
}

double areal_density_for(const CameraModel& cam, double per_image, double height_agl) {
    const double w = cam.sensor_px.x() * cam.pixel_pitch_m / cam.focal_m * height_agl;
    const double l = cam.sensor_px.y() * cam.pixel_pitch_m / cam.focal_m * height_agl;
    return per_image / (w * l);
}

namespace {

// Ground disc that contains the camera footprint: centre where the optical
// axis meets the reference ground, radius covering the image corners plus relief.
bool footprint(const Pose& pose_ec, const CameraModel& cam, double ground, double relief_sigma, Vec3& center,
               double& radius) {
    const Vec3 pos = pose_ec.translation;
    const Vec3 up = pos.normalized();
    const Vec3 axis = pose_ec.rotation.rotate(Vec3::UnitZ());
    const double cos_off = -axis.dot(up);
    const double agl = pos.norm() - kEarthRadius - ground;
    if (cos_off < 0.2 || agl <= 0.0) return false;
    const double range = agl / cos_off;
    center = pos + range * axis;
    const double half_diag = 0.5 * std::hypot(cam.sensor_px.x(), cam.sensor_px.y()) * cam.pixel_pitch_m / cam.focal_m;
    radius = 1.3 * (range * half_diag / cos_off) + 4.0 * relief_sigma + 10.0;
    return true;
}

}  // namespace

TerrainField generate_terrain(const ScenarioConfig& cfg, const std::vector<TruthSample>& trajectory,
                              std::uint64_t seed) {
    const double lat0 = cfg.flight.latitude_deg * std::numbers::pi / 180.0;
    const double lon0 = cfg.flight.longitude_deg * std::numbers::pi / 180.0;
    const double agl0 = trajectory.empty() ? 1000.0 : trajectory.front().h - cfg.terrain.ground_elevation_m;
    TerrainField field(cfg.terrain, lat0, lon0, areal_density_for(cfg.camera, cfg.terrain.density, agl0), seed);
    const Pose mount = downward_camera_mount();
    std::vector<TerrainPoint> scratch;
    for (std::size_t k = 0; k < trajectory.size(); k += 20) {
        Vec3 c;
        double r;
        if (footprint(camera_from_body(trajectory[k].pose_eb, mount), cfg.camera, cfg.terrain.ground_elevation_m,
                      cfg.terrain.relief_sigma_m, c, r)) {
            field.query(c, r, scratch);
        }
    }
    return field;
}

std::vector<Observation> synthesize_observations(const TruthSample& truth, TerrainField& field,
                                                 const CameraModel& cam, const Pose& zeta_bc,
                                                 const ObservationNoise& noise, SplitMix64& rng) {
    std::vector<Observation> out;
    const Pose pose_ec = camera_from_body(truth.pose_eb, zeta_bc);
    Vec3 center;
    double radius;
    if (!footprint(pose_ec, cam, field.ground_elevation(), field.relief_sigma(), center, radius)) return out;
    std::vector<TerrainPoint> candidates;
    field.query(center, radius, candidates);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> offset(-noise.outlier_px, noise.outlier_px);
    std::normal_distribution<double> gauss(0.0, 1.0);
    out.reserve(candidates.size());
    for (const auto& p : candidates) {
        const Vec3 p_c = to_camera_frame(pose_ec, p.p_e);
        const auto px = project(cam, p_c);
        if (!px || !cam.in_sensor(*px)) continue;
        // Fixed number of draws per visible point keeps the stream aligned.
        const bool outlier = unit(rng) < noise.outlier_rate;
        const Vec2 gross(offset(rng), offset(rng));
        const Vec2 fine(gauss(rng), gauss(rng));
        const Vec2 measured = *px + (outlier ? gross : Vec2(noise.obs_noise_px * fine));
        if (!cam.in_sensor(measured)) continue;
        out.push_back({p.id, {p.p_e, measured}, p_c, outlier});
    }
    return out;
}

std::vector<Correspondence> correspondences_of(const std::vector<Observation>& obs) {
    std::vector<Correspondence> c;
    c.reserve(obs.size());
    for (const auto& o : obs) c.push_back(o.corr);
    return c;
}

}  // namespace iavns
