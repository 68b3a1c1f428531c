#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iavns/pose_opt.hpp"
#include "iavns/prior_policy.hpp"
#include "iavns/rng.hpp"

namespace iavns {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

CheckResult check_exp_log(std::uint64_t seed, int cases);
CheckResult check_right_jacobian(std::uint64_t seed, int cases);
CheckResult check_plus_minus(std::uint64_t seed, int cases);
// Includes points on the principal axis.
CheckResult check_optical_flow_jacobian(std::uint64_t seed, int cases);
// Compares the laws evaluated with `cfg` against the frozen table values, so a
// corrupted constant shows up as a failure of this check.
CheckResult check_activation_table(const AdjustmentConfig& cfg);
CheckResult check_noiseless_recovery(std::uint64_t seed, int scenes);
// Scalar and AVX2 kernels must agree bit for bit; passes trivially without AVX2.
CheckResult check_kernel_equivalence(std::uint64_t seed, int cases);

struct CheckSuiteOptions {
    std::uint64_t seed = 0x5eed;
    int cases = 1000;
    int scenes = 100;
    AdjustmentConfig adjustment;
};

std::vector<CheckResult> run_checks(const CheckSuiteOptions& opts = {});

// Nadir-looking camera about 2 km above a sphere-sized ground patch, with
// noiseless pixel measurements of `n_points` points spread over the sensor.
struct SyntheticScene {
    Pose truth;
    std::vector<Correspondence> corr;
};

SyntheticScene make_scene(SplitMix64& rng, const CameraModel& cam, int n_points);

// Uniform draw of a tangent with rotation angle <= max_rot_rad and translation
// norm <= max_trans_m.
Tangent6 random_tangent(SplitMix64& rng, double max_rot_rad, double max_trans_m);

}  // namespace iavns
