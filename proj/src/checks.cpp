#include "iavns/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>

#include "iavns/camera.hpp"
#include "iavns/kernels.hpp"
#include "iavns/liegroup.hpp"

namespace iavns {

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform(SplitMix64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 random_direction(SplitMix64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 v(g(rng), g(rng), g(rng));
    while (v.norm() < 1e-12) v = Vec3(g(rng), g(rng), g(rng));
    return v.normalized();
}

// Rotation vectors with a share of tiny angles so the series branches run too.
Vec3 random_rotation_vector(SplitMix64& rng, int i, double max_angle) {
    const double angle = i % 10 == 0 ? std::pow(10.0, uniform(rng, -12.0, -3.0)) : uniform(rng, 0.0, max_angle);
    return random_direction(rng) * angle;
}

Pose random_pose(SplitMix64& rng) {
    return {so3_exp(random_rotation_vector(rng, 1, 0.99 * kPi)), random_direction(rng) * uniform(rng, 0.0, 1e4)};
}

std::string format(const char* fmt, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

template <class F>
CheckResult timed(const char* name, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = body();
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

Tangent6 random_tangent(SplitMix64& rng, double max_rot_rad, double max_trans_m) {
    Tangent6 t;
    t.phi = random_direction(rng) * uniform(rng, 0.0, max_rot_rad);
    t.rho = random_direction(rng) * uniform(rng, 0.0, max_trans_m);
    return t;
}

SyntheticScene make_scene(SplitMix64& rng, const CameraModel& cam, int n_points) {
    GeodeticCoord g;
    g.latitude = uniform(rng, -1.2, 1.2);
    g.longitude = uniform(rng, -kPi, kPi);
    g.h = uniform(rng, 1800.0, 2300.0);
    Euler e;
    e.psi = uniform(rng, -kPi, kPi);
    e.theta = uniform(rng, -0.1, 0.1);
    e.xi = uniform(rng, -0.2, 0.2);
    const Pose body{ecef_to_ned_quat(g) * quat_from_euler(e), geodetic_to_ecef(g)};
    SyntheticScene s;
    s.truth = camera_from_body(body, downward_camera_mount());

    const double agl = g.h - uniform(rng, 200.0, 400.0);
    std::normal_distribution<double> relief(0.0, 0.02);
    while (static_cast<int>(s.corr.size()) < n_points) {
        const Vec2 px(uniform(rng, 0.0, cam.sensor_px.x()), uniform(rng, 0.0, cam.sensor_px.y()));
        const Vec3 ray((px.x() - cam.principal_px.x()) / cam.focal_px(),
                       (px.y() - cam.principal_px.y()) / cam.focal_px(), 1.0);
        const Vec3 p_e = pose_act(s.truth, ray * agl * (1.0 + relief(rng)));
        const auto p_img = project(cam, to_camera_frame(s.truth, p_e));
        if (!p_img) continue;
        s.corr.push_back({p_e, *p_img});
    }
    return s;
}

CheckResult check_exp_log(std::uint64_t seed, int cases) {
    return timed("exp_log_roundtrip", [&] {
        SplitMix64 rng = substream(seed, "exp_log");
        double worst = 0.0;
        for (int i = 0; i < cases; ++i) {
            const Vec3 r = random_rotation_vector(rng, i, 0.99 * kPi);
            worst = std::max(worst, (so3_log(so3_exp(r)) - r).norm());
            Tangent6 t;
            t.phi = random_rotation_vector(rng, i + 1, 0.99 * kPi);
            t.rho = random_direction(rng) * uniform(rng, 0.0, 10.0);
            worst = std::max(worst, (se3_log(se3_exp(t)).vector() - t.vector()).norm());
        }
        return CheckResult{"", worst < 1e-10, format("max error %.3g (limit %.0e)", worst, 1e-10)};
    });
}

CheckResult check_right_jacobian(std::uint64_t seed, int cases) {
    return timed("right_jacobian_fd", [&] {
        SplitMix64 rng = substream(seed, "right_jacobian");
        const double h = 1e-6;
        double worst = 0.0;
        for (int i = 0; i < cases; ++i) {
            const Vec3 r = random_rotation_vector(rng, i, 0.95 * kPi);
            const UnitQuaternion inv = so3_exp(r).conjugate();
            Mat3 fd;
            for (int k = 0; k < 3; ++k) {
                const Vec3 d = Vec3::Unit(k) * h;
                fd.col(k) = (so3_log(inv * so3_exp(r + d)) - so3_log(inv * so3_exp(r - d))) / (2.0 * h);
            }
            const Mat3 jr = so3_right_jacobian(r);
            worst = std::max(worst, (fd - jr).norm() / jr.norm());
        }
        return CheckResult{"", worst < 1e-5, format("max relative error %.3g (limit %.0e)", worst, 1e-5)};
    });
}

CheckResult check_plus_minus(std::uint64_t seed, int cases) {
    return timed("plus_minus_consistency", [&] {
        SplitMix64 rng = substream(seed, "plus_minus");
        double worst = 0.0;
        for (int i = 0; i < cases; ++i) {
            const Pose a = random_pose(rng);
            Tangent6 d;
            d.phi = random_rotation_vector(rng, i, 0.9 * kPi);
            d.rho = random_direction(rng) * uniform(rng, 0.0, 100.0);
            worst = std::max(worst, (pose_minus(pose_plus(a, d), a).vector() - d.vector()).norm());
            const Pose b = random_pose(rng);
            const Pose back = pose_plus(b, pose_minus(a, b));
            worst = std::max(worst, (back.translation - a.translation).norm() / std::max(1.0, a.translation.norm()));
            worst = std::max(worst, rotation_angle_between(back.rotation, a.rotation));
        }
        return CheckResult{"", worst < 1e-9, format("max error %.3g (limit %.0e)", worst, 1e-9)};
    });
}

CheckResult check_optical_flow_jacobian(std::uint64_t seed, int cases) {
    return timed("optical_flow_jacobian_fd", [&] {
        SplitMix64 rng = substream(seed, "optical_flow");
        const CameraModel cam;
        double worst = 0.0;
        for (int i = 0; i < cases; ++i) {
            const Pose z = random_pose(rng);
            const double depth = uniform(rng, 1.0, 3000.0);
            Vec3 p_c(0.0, 0.0, depth);
            if (i % 10 != 0) {
                p_c.x() = uniform(rng, -0.3, 0.3) * depth;
                p_c.y() = uniform(rng, -0.3, 0.3) * depth;
            }
            const Vec3 p_e = pose_act(z, p_c);
            const auto jac = optical_flow_jacobian(cam, to_camera_frame(z, p_e));
            if (!jac) return CheckResult{"", false, "jacobian rejected a point in front of the camera"};
            Mat26 fd;
            for (int k = 0; k < 6; ++k) {
                const double h = k < 3 ? 1e-6 * depth : 1e-6;
                Vec6 d = Vec6::Zero();
                d(k) = h;
                const auto up = project(cam, pose_act(pose_inverse(pose_plus(z, Tangent6::from_vector(d))), p_e));
                const auto dn = project(cam, pose_act(pose_inverse(pose_plus(z, Tangent6::from_vector(-d))), p_e));
                fd.col(k) = (*up - *dn) / (2.0 * h);
            }
            // Columns carry different units, so compare each against its own scale.
            for (int k = 0; k < 6; ++k) {
                const double scale = k < 3 ? cam.focal_px() / depth : cam.focal_px();
                worst = std::max(worst, (fd.col(k) - jac->col(k)).norm() / scale);
            }
        }
        return CheckResult{"", worst < 1e-5, format("max relative error %.3g (limit %.0e)", worst, 1e-5)};
    });
}

CheckResult check_activation_table(const AdjustmentConfig& cfg) {
    return timed("activation_table", [&] {
        // Frozen table values.
        constexpr double dh_low = 25.0, dtheta_low = 0.2, droc_low = 0.01, dxi_low = 0.2;
        constexpr double dtheta1 = 0.0005, dtheta2 = 0.0003, dxi1 = 0.0003;
        std::string failures;
        auto expect = [&](const char* what, double got, double want) {
            if (got != want) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s%s got %.17g want %.17g", failures.empty() ? "" : "; ", what, got, want);
                failures += buf;
            }
        };
        expect("altitude dead zone", pitch_adjust_altitude(24.999, cfg), 0.0);
        expect("altitude at dead zone edge", pitch_adjust_altitude(dh_low, cfg), 0.0);
        expect("altitude ramp midpoint", pitch_adjust_altitude(1.5 * dh_low, cfg), -dtheta1 * 0.5);
        expect("altitude ramp midpoint below", pitch_adjust_altitude(-1.5 * dh_low, cfg), dtheta1 * 0.5);
        expect("altitude saturation", pitch_adjust_altitude(2.0 * dh_low, cfg), -dtheta1);
        expect("altitude far", pitch_adjust_altitude(-400.0, cfg), dtheta1);

        expect("pitch dead zone", pitch_adjust_pitch(0.19, 0.0, cfg), 0.0);
        expect("pitch ramp midpoint", pitch_adjust_pitch(0.3, 0.0, cfg), -(dtheta1 * ((0.3 - dtheta_low) / dtheta_low)));
        expect("pitch saturation", pitch_adjust_pitch(-1.0, 0.0, cfg), dtheta1);
        expect("pitch sign conflict", pitch_adjust_pitch(1.0, 0.0002, cfg), 0.0);
        {
            // The clamp may step one ulp toward zero to keep the pair within the limit.
            const double dh_adj = -0.0004;
            const double got = pitch_adjust_pitch(1.0, dh_adj, cfg);
            const double want = -dtheta1 - dh_adj;
            if (!(std::abs(dh_adj + got) <= dtheta1) || (got != want && got != std::nextafter(want, 0.0))) {
                expect("pitch combined clamp", got, want);
            }
        }

        expect("roc dead zone", pitch_adjust_roc(0.009, -dtheta1, cfg), 0.0);
        expect("roc without altitude term", pitch_adjust_roc(1.0, 0.0, cfg), 0.0);
        expect("roc ramp midpoint", pitch_adjust_roc(1.5 * droc_low, -dtheta1, cfg),
               -(dtheta2 * ((1.5 * droc_low - droc_low) / droc_low)) * (dtheta1 / dtheta1));
        expect("roc saturation scaled", pitch_adjust_roc(-1.0, -0.5 * dtheta1, cfg), dtheta2 * ((0.5 * dtheta1) / dtheta1));

        expect("bank dead zone", bank_adjust(0.1, cfg), 0.0);
        expect("bank ramp midpoint", bank_adjust(0.3, cfg), -(dxi1 * ((0.3 - dxi_low) / dxi_low)));
        expect("bank saturation", bank_adjust(-2.0, cfg), dxi1);
        return CheckResult{"", failures.empty(), failures.empty() ? "all table branches match" : failures};
    });
}

CheckResult check_noiseless_recovery(std::uint64_t seed, int scenes) {
    return timed("noiseless_recovery", [&] {
        SplitMix64 rng = substream(seed, "recovery");
        const CameraModel cam;
        const GnConfig cfg;
        double worst_rot = 0.0, worst_trans = 0.0;
        for (int i = 0; i < scenes; ++i) {
            const SyntheticScene s = make_scene(rng, cam, 60);
            const Pose z0 = pose_plus(s.truth, random_tangent(rng, 1.0 * kPi / 180.0, 5.0));
            const PoseOptResult r = optimize_pose_reprojection(z0, s.corr, cam, cfg);
            worst_rot = std::max(worst_rot, rotation_angle_between(r.pose.rotation, s.truth.rotation));
            worst_trans = std::max(worst_trans, (r.pose.translation - s.truth.translation).norm());
        }
        const bool ok = worst_rot < 1e-6 && worst_trans < 1e-4;
        return CheckResult{"", ok, format("max rotation error %.3g rad, max translation error %.3g m", worst_rot, worst_trans)};
    });
}

CheckResult check_kernel_equivalence(std::uint64_t seed, int cases) {
    return timed("kernel_equivalence", [&] {
        using namespace kernels;
        if (!isa_available(Isa::avx2)) return CheckResult{"", true, "AVX2 unavailable; scalar only"};
        SplitMix64 rng = substream(seed, "kernels");
        const KernelTable& a = kernels_for(Isa::scalar);
        const KernelTable& b = kernels_for(Isa::avx2);
        for (int i = 0; i < cases; ++i) {
            const int n = 1 + i % 67;
            Correspondences c;
            std::vector<double> w;
            for (int j = 0; j < n; ++j) {
                // Every seventh point sits behind the camera to exercise masking.
                const double z = j % 7 == 3 ? -uniform(rng, 1.0, 50.0) : uniform(rng, 100.0, 3000.0);
                c.push_back(uniform(rng, -500.0, 500.0), uniform(rng, -500.0, 500.0), z, uniform(rng, 0.0, 768.0),
                            uniform(rng, 0.0, 1024.0));
                w.push_back(j % 5 == 0 ? 0.0 : uniform(rng, 0.0, 1.0));
            }
            const Pose z = random_pose(rng);
            WorldToCamera pose{};
            const Mat3 rt = z.rotation.matrix().transpose();
            for (int r = 0; r < 3; ++r) {
                for (int k = 0; k < 3; ++k) pose.rt[3 * r + k] = rt(r, k);
                pose.t[r] = 0.0;
            }
            const Intrinsics k{1900.0, 384.0, 512.0};
            Residuals ra, rb;
            a.residuals(pose, k, c, ra);
            b.residuals(pose, k, c, rb);
            auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
                return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
            };
            if (!same(ra.cx, rb.cx) || !same(ra.cy, rb.cy) || !same(ra.cz, rb.cz) || !same(ra.ex, rb.ex) ||
                !same(ra.ey, rb.ey) || !same(ra.sq, rb.sq) || !same(ra.valid, rb.valid)) {
                return CheckResult{"", false, "residual kernels differ for n = " + std::to_string(n)};
            }
            NormalEquations na{}, nb{};
            a.accumulate(k, ra, w.data(), na);
            b.accumulate(k, ra, w.data(), nb);
            if (std::memcmp(&na, &nb, sizeof na) != 0) {
                return CheckResult{"", false, "accumulate kernels differ for n = " + std::to_string(n)};
            }
        }
        return CheckResult{"", true, std::to_string(cases) + " cases bit-identical"};
    });
}

std::vector<CheckResult> run_checks(const CheckSuiteOptions& opts) {
    return {
        check_exp_log(opts.seed, opts.cases),
        check_right_jacobian(opts.seed, opts.cases),
        check_plus_minus(opts.seed, opts.cases),
        check_optical_flow_jacobian(opts.seed, opts.cases),
        check_activation_table(opts.adjustment),
        check_noiseless_recovery(opts.seed, opts.scenes),
        check_kernel_equivalence(opts.seed, opts.cases),
    };
}

}  // namespace iavns
