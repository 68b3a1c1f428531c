#pragma once

#include <cmath>
#include <random>

#include "iavns/checks.hpp"
#include "iavns/pose_opt.hpp"

namespace iavns::test {

// Pose error in metres: translation error plus rotation error times the mean
// scene depth, so both components weigh alike on a 2 km nadir scene.
inline double pose_error_m(const Pose& est, const Pose& truth, double depth = 2000.0) {
    return (est.translation - truth.translation).norm() + depth * rotation_angle_between(est.rotation, truth.rotation);
}

struct RobustnessTrial {
    double clean = 0.0;   // Tukey solve, inlier noise only
    double tukey = 0.0;   // Tukey solve, with gross outliers
    double unit = 0.0;    // unit-weight solve, with gross outliers
};

// One seeded scene of `n` points with `noise_px` Gaussian pixel noise; a share
// `outlier_share` of them is displaced by +-`outlier_px` on each image axis.
inline RobustnessTrial robustness_trial(std::uint64_t seed, int n = 100, double noise_px = 0.5,
                                        double outlier_share = 0.2, double outlier_px = 50.0) {
    SplitMix64 rng(seed);
    const CameraModel cam;
    const SyntheticScene s = make_scene(rng, cam, n);
    std::normal_distribution<double> noise(0.0, noise_px);

    std::vector<Correspondence> clean = s.corr;
    for (auto& c : clean) c.p_img += Vec2(noise(rng), noise(rng));
    std::vector<Correspondence> dirty = clean;
    const int n_out = static_cast<int>(std::lround(outlier_share * n));
    for (int j = 0; j < n_out; ++j) {
        const double su = (rng() & 1) ? 1.0 : -1.0;
        const double sv = (rng() & 1) ? 1.0 : -1.0;
        dirty[j].p_img += outlier_px * Vec2(su, sv);
    }
    const Pose z0 = pose_plus(s.truth, random_tangent(rng, 0.5 * 3.14159265358979323846 / 180.0, 2.0));

    GnConfig tukey;
    GnConfig unit;
    unit.robust = RobustKind::none;
    RobustnessTrial t;
    t.clean = pose_error_m(optimize_pose_reprojection(z0, clean, cam, tukey).pose, s.truth);
    t.tukey = pose_error_m(optimize_pose_reprojection(z0, dirty, cam, tukey).pose, s.truth);
    t.unit = pose_error_m(optimize_pose_reprojection(z0, dirty, cam, unit).pose, s.truth);
    return t;
}

inline bool robustness_passes(const RobustnessTrial& t) {
    return t.tukey <= 3.0 * t.clean && t.unit >= 10.0 * t.tukey;
}

}  // namespace iavns::test
