#include <gtest/gtest.h>

#include "iavns/camera.hpp"
#include "iavns/pose_opt.hpp"
#include "support.hpp"

using namespace iavns;
using iavns::test::Gen;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST(Camera, DefaultsMatchTheDeskCamera) {
    const CameraModel cam;
    EXPECT_EQ(cam.focal_m, 19e-3);
    EXPECT_EQ(cam.pixel_pitch_m, 1e-5);
    EXPECT_EQ(cam.principal_px, Vec2(384, 512));
    EXPECT_EQ(cam.sensor_px, Vec2(768, 1024));
    EXPECT_NO_THROW(cam.validate());
}

TEST(Camera, ValidateNamesField) {
    CameraModel cam;
    cam.focal_m = -1.0;
    try {
        cam.validate();
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("camera.focal_m"), std::string::npos);
    }
}

TEST(Project, PrincipalAxisHitsPrincipalPoint) {
    const CameraModel cam;
    for (double d : {0.1, 1.0, 2000.0}) EXPECT_EQ(*project(cam, Vec3(0, 0, d)), cam.principal_px);
}

TEST(Project, NineteenMillimetreFocalLength) {
    const CameraModel cam;
    const Vec2 p = *project(cam, Vec3(1, 0, 100));
    EXPECT_NEAR(p.x() - 384.0, 19.0, 1e-12);
    EXPECT_EQ(p.y(), 512.0);
}

TEST(Project, BehindCameraIsRejected) {
    const CameraModel cam;
    EXPECT_FALSE(project(cam, Vec3(0, 0, -1)).has_value());
    EXPECT_FALSE(project(cam, Vec3(1, 1, 0)).has_value());
    EXPECT_FALSE(optical_flow_jacobian(cam, Vec3(0, 0, -1)).has_value());
}

TEST(OpticalFlow, PrincipalAxisReducedForm) {
    const CameraModel cam;
    const double d = 1234.5;
    const Mat26 j = *optical_flow_jacobian(cam, Vec3(0, 0, d));
    Mat26 want;
    want << -1 / d, 0, 0, 0, -1, 0, 0, -1 / d, 0, 1, 0, 0;
    want *= cam.focal_px();
    EXPECT_LT((j - want).norm(), 1e-12);
}

TEST(OpticalFlow, CentralDifferenceProperty) {
    const CameraModel cam;
    Gen g(21);
    for (int i = 0; i < 1000; ++i) {
        const Pose z = g.pose(1000.0);
        const double depth = g.uniform(5.0, 3000.0);
        const Vec3 p_c = i % 5 == 0 ? Vec3(0, 0, depth) : Vec3(g.uniform(-0.2, 0.2) * depth, g.uniform(-0.25, 0.25) * depth, depth);
        const Vec3 p_e = pose_act(z, p_c);
        const Mat26 j = *optical_flow_jacobian(cam, p_c);
        for (int k = 0; k < 6; ++k) {
            const double h = k < 3 ? 1e-6 * depth : 1e-6;
            Vec6 d = Vec6::Zero();
            d(k) = h;
            const Vec2 up = *project(cam, pose_act(pose_inverse(pose_plus(z, Tangent6::from_vector(d))), p_e));
            const Vec2 dn = *project(cam, pose_act(pose_inverse(pose_plus(z, Tangent6::from_vector(-d))), p_e));
            const Vec2 fd = (up - dn) / (2 * h);
            const double scale = k < 3 ? cam.focal_px() / depth : cam.focal_px();
            EXPECT_LT((fd - j.col(k)).norm() / scale, 1e-5) << "case " << i << " column " << k;
        }
    }
}

TEST(OpticalFlow, DepthVelocityAmbiguity) {
    const CameraModel cam;
    const Vec3 p(30.0, -20.0, 500.0);
    const Vec3 v(1.5, -0.7, 0.3);
    const Mat26 j1 = *optical_flow_jacobian(cam, p);
    const Mat26 j2 = *optical_flow_jacobian(cam, 2.0 * p);
    EXPECT_LT((j1.leftCols<3>() * v - j2.leftCols<3>() * (2.0 * v)).norm(), 1e-12);
}

TEST(OpticalFlow, PixelPitchScalesEverything) {
    CameraModel a, b;
    b.pixel_pitch_m = a.pixel_pitch_m * 2.0;
    const Vec3 p(12.0, 7.0, 300.0);
    EXPECT_LT(((*project(b, p) - b.principal_px) - (*project(a, p) - a.principal_px) / 2.0).norm(), 1e-12);
    EXPECT_LT((*optical_flow_jacobian(b, p) - *optical_flow_jacobian(a, p) / 2.0).norm(), 1e-12);
}

TEST(Geodetic, EquatorPrimeMeridian) {
    EXPECT_LT((geodetic_to_ecef({0, 0, 0}) - Vec3(kEarthRadius, 0, 0)).norm(), 1e-9);
}

TEST(Geodetic, RoundtripProperty) {
    Gen g(22);
    for (int i = 0; i < 1000; ++i) {
        const GeodeticCoord c{g.uniform(-1.5, 1.5), g.uniform(-kPi, kPi), g.uniform(-500.0, 1e4)};
        const Vec3 p = geodetic_to_ecef(c);
        EXPECT_LT((geodetic_to_ecef(ecef_to_geodetic(p)) - p).norm(), 1e-6);
        EXPECT_NEAR(ecef_to_geodetic(p).h, c.h, 1e-6);
    }
}

TEST(Geodetic, NedDownAtOriginPointsToEarthCentre) {
    const UnitQuaternion q_en = ecef_to_ned_quat({0, 0, 0});
    EXPECT_LT((q_en.rotate(Vec3(0, 0, 1)) - Vec3(-1, 0, 0)).norm(), 1e-15);
    EXPECT_LT((q_en.rotate(Vec3(1, 0, 0)) - Vec3(0, 0, 1)).norm(), 1e-15);
    EXPECT_LT((q_en.rotate(Vec3(0, 1, 0)) - Vec3(0, 1, 0)).norm(), 1e-15);
}

TEST(Euler, RoundtripProperty) {
    Gen g(23);
    for (int i = 0; i < 1000; ++i) {
        const Euler e{g.uniform(-3.1, 3.1), g.uniform(-1.5, 1.5), g.uniform(-3.1, 3.1)};
        const Euler back = euler_from_quat(quat_from_euler(e));
        EXPECT_NEAR(back.psi, e.psi, 1e-9);
        EXPECT_NEAR(back.theta, e.theta, 1e-9);
        EXPECT_NEAR(back.xi, e.xi, 1e-9);
    }
}

TEST(Mount, DownwardCameraAxes) {
    const Pose m = downward_camera_mount();
    EXPECT_LT((m.rotation.rotate(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm(), 1e-15);
    EXPECT_LT((m.rotation.rotate(Vec3(0, 1, 0)) - Vec3(-1, 0, 0)).norm(), 1e-15);
    EXPECT_LT((m.rotation.rotate(Vec3(0, 0, 1)) - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(Mount, BodyCameraRoundtrip) {
    Gen g(24);
    const Pose mount = downward_camera_mount();
    for (int i = 0; i < 100; ++i) {
        const Pose body = g.pose(1e6);
        const Pose back = body_from_camera(camera_from_body(body, mount), mount);
        EXPECT_LT((back.translation - body.translation).norm(), 1e-9);
        EXPECT_LT(rotation_angle_between(back.rotation, body.rotation), 1e-12);
    }
}

TEST(Attitude, NedAttitudeRecoversEuler) {
    const GeodeticCoord c{0.7, -0.06, 2000.0};
    const Euler e{0.4, 0.03, -0.1};
    const Pose body{ecef_to_ned_quat(c) * quat_from_euler(e), geodetic_to_ecef(c)};
    const Euler back = euler_from_quat(ned_attitude(body));
    EXPECT_NEAR(back.psi, e.psi, 1e-12);
    EXPECT_NEAR(back.theta, e.theta, 1e-12);
    EXPECT_NEAR(back.xi, e.xi, 1e-12);
}
