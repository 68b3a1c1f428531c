#include "iavns/kernels.hpp"

namespace iavns::kernels {

void Correspondences::reserve(std::size_t n) {
    px.reserve(n); py.reserve(n); pz.reserve(n); u.reserve(n); v.reserve(n);
}

void Correspondences::push_back(double x, double y, double z, double mu, double mv) {
    px.push_back(x); py.push_back(y); pz.push_back(z); u.push_back(mu); v.push_back(mv);
}

void Correspondences::clear() {
    px.clear(); py.clear(); pz.clear(); u.clear(); v.clear();
}

void Residuals::resize(std::size_t n) {
    cx.resize(n); cy.resize(n); cz.resize(n);
    ex.resize(n); ey.resize(n); sq.resize(n); valid.resize(n);
}

namespace scalar {

void residuals(const WorldToCamera& pose, const Intrinsics& k, const Correspondences& in, Residuals& out) {
    const std::size_t n = in.size();
    out.resize(n);
    const double* r = pose.rt;
    for (std::size_t j = 0; j < n; ++j) {
        const double dx = in.px[j] - pose.t[0];
        const double dy = in.py[j] - pose.t[1];
        const double dz = in.pz[j] - pose.t[2];
        const double x = r[0] * dx + r[1] * dy + r[2] * dz;
        const double y = r[3] * dx + r[4] * dy + r[5] * dz;
        const double z = r[6] * dx + r[7] * dy + r[8] * dz;
        if (z > 0.0) {
            const double ex = (k.focal_px * (x / z) + k.cx) - in.u[j];
            const double ey = (k.focal_px * (y / z) + k.cy) - in.v[j];
            out.cx[j] = x; out.cy[j] = y; out.cz[j] = z;
            out.ex[j] = ex; out.ey[j] = ey;
            out.sq[j] = ex * ex + ey * ey;
            out.valid[j] = 1.0;
        } else {
            out.cx[j] = 0.0; out.cy[j] = 0.0; out.cz[j] = 1.0;
            out.ex[j] = 0.0; out.ey[j] = 0.0; out.sq[j] = 0.0;
            out.valid[j] = 0.0;
        }
    }
}

void accumulate(const Intrinsics& k, const Residuals& res, const double* weights, NormalEquations& out) {
    // Blocks of four points go to four lane-wise partial sums, reduced as
    // (l0 + l1) + (l2 + l3), so the order of additions matches the AVX2 kernel.
    double hl[4][21] = {};
    double gl[4][6] = {};
    const std::size_t n = res.cx.size();
    auto jacobian_rows = [&](std::size_t j, double* a, double* b) {
        const double iz = 1.0 / res.cz[j];
        const double u = res.cx[j] * iz;
        const double v = res.cy[j] * iz;
        const double uv = u * v;
        const double ra[6] = {0.0 - iz, 0.0, u * iz, uv, (0.0 - 1.0) - u * u, v};
        const double rb[6] = {0.0, 0.0 - iz, v * iz, 1.0 + v * v, 0.0 - uv, 0.0 - u};
        for (int i = 0; i < 6; ++i) {
            a[i] = ra[i];
            b[i] = rb[i];
        }
    };
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        for (int lane = 0; lane < 4; ++lane) {
            const std::size_t p = j + static_cast<std::size_t>(lane);
            const double w = weights[p];
            double a[6], b[6];
            jacobian_rows(p, a, b);
            int idx = 0;
            for (int r = 0; r < 6; ++r) {
                for (int c = r; c < 6; ++c) {
                    hl[lane][idx] = hl[lane][idx] + w * (a[r] * a[c] + b[r] * b[c]);
                    ++idx;
                }
                gl[lane][r] = gl[lane][r] + w * (a[r] * res.ex[p] + b[r] * res.ey[p]);
            }
        }
    }
    double h[21];
    double g[6];
    for (int i = 0; i < 21; ++i) h[i] = (hl[0][i] + hl[1][i]) + (hl[2][i] + hl[3][i]);
    for (int i = 0; i < 6; ++i) g[i] = (gl[0][i] + gl[1][i]) + (gl[2][i] + gl[3][i]);
    for (; j < n; ++j) {
        const double w = weights[j];
        if (w == 0.0) continue;
        double a[6], b[6];
        jacobian_rows(j, a, b);
        int idx = 0;
        for (int r = 0; r < 6; ++r) {
            for (int c = r; c < 6; ++c) {
                h[idx++] += w * (a[r] * a[c] + b[r] * b[c]);
            }
            g[r] += w * (a[r] * res.ex[j] + b[r] * res.ey[j]);
        }
    }
    const double f2 = k.focal_px * k.focal_px;
    for (int i = 0; i < 21; ++i) out.h[i] = f2 * h[i];
    for (int i = 0; i < 6; ++i) out.g[i] = k.focal_px * g[i];
}

}  // namespace scalar
}  // namespace iavns::kernels
