#pragma once

// Per-correspondence hot loops of the pose solver, in structure-of-arrays form.
// Each kernel has a scalar reference and an AVX2 variant; the variant is picked
// once at startup from CPU features (IAVNS_FORCE_SCALAR=1 pins the scalar one).
// Neither translation unit depends on Eigen so the AVX2 one can be compiled with
// wider ISA flags without leaking those instructions into shared inline code.

#include <cstddef>
#include <string_view>
#include <vector>

namespace iavns::kernels {

enum class Isa { scalar, avx2 };

struct Intrinsics {
    double focal_px;
    double cx;
    double cy;
};

// Camera pose in world coordinates, passed as the world->camera rotation
// (row-major R^T) and the camera centre t, so p_c = R^T (p - t).
struct WorldToCamera {
    double rt[9];
    double t[3];
};

struct Correspondences {
    std::vector<double> px, py, pz;  // world point
    std::vector<double> u, v;        // measured pixel
    std::size_t size() const { return px.size(); }
    void reserve(std::size_t n);
    void push_back(double x, double y, double z, double mu, double mv);
    void clear();
};

struct Residuals {
    std::vector<double> cx, cy, cz;  // camera-frame point (0, 0, 1 when invalid)
    std::vector<double> ex, ey;      // projection minus measurement, pixels
    std::vector<double> sq;          // ex^2 + ey^2
    std::vector<double> valid;       // 1 when depth > 0, else 0
    void resize(std::size_t n);
};

// Upper triangle of the 6x6 Hessian, row by row, and the gradient.
// Callers pass zero weights for invalid points; the kernels do not re-check.
struct NormalEquations {
    double h[21];
    double g[6];
};

using ResidualFn = void (*)(const WorldToCamera&, const Intrinsics&, const Correspondences&, Residuals&);
using AccumulateFn = void (*)(const Intrinsics&, const Residuals&, const double* weights, NormalEquations&);

struct KernelTable {
    Isa isa;
    ResidualFn residuals;
    AccumulateFn accumulate;
};

bool isa_available(Isa isa);
const KernelTable& kernels_for(Isa isa);
const KernelTable& active_kernels();
std::string_view isa_name(Isa isa);

namespace scalar {
void residuals(const WorldToCamera& pose, const Intrinsics& k, const Correspondences& in, Residuals& out);
void accumulate(const Intrinsics& k, const Residuals& res, const double* weights, NormalEquations& out);
}  // namespace scalar

#if defined(IAVNS_HAVE_AVX2)
namespace avx2 {
void residuals(const WorldToCamera& pose, const Intrinsics& k, const Correspondences& in, Residuals& out);
void accumulate(const Intrinsics& k, const Residuals& res, const double* weights, NormalEquations& out);
}  // namespace avx2
#endif

}  // namespace iavns::kernels
