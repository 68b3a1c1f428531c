#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "iavns/liegroup.hpp"
#include "iavns/rng.hpp"

namespace iavns::test {

// Hand-rolled seeded generators for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(splitmix64_mix(seed ^ 0x7e57ULL)) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double gauss() {
        // Box-Muller on two uniforms in (0, 1].
        const double u1 = 1.0 - unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    std::uint64_t bits() { return rng_(); }

    Vec3 direction() {
        Vec3 v(gauss(), gauss(), gauss());
        while (v.norm() < 1e-9) v = Vec3(gauss(), gauss(), gauss());
        return v.normalized();
    }
    Vec3 vec3(double scale) { return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)); }
    Vec3 rotation_vector(double max_angle) { return direction() * uniform(0.0, max_angle); }
    UnitQuaternion rotation() { return so3_exp(rotation_vector(3.14159265358979323846 - 1e-3)); }
    Pose pose(double trans_scale = 100.0) { return {rotation(), vec3(trans_scale)}; }
    Tangent6 tangent(double max_rot, double max_trans) {
        Tangent6 t;
        t.phi = rotation_vector(max_rot);
        t.rho = direction() * uniform(0.0, max_trans);
        return t;
    }

private:
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    SplitMix64 rng_;
};

inline std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("iavns_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace iavns::test
