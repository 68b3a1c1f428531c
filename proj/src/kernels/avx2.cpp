// Built with -mavx2 -ffp-contract=off; only reached after a CPU feature check.
#include <immintrin.h>

#include "iavns/kernels.hpp"

namespace iavns::kernels::avx2 {

namespace {

inline double lane_sum(__m256d v) {
    alignas(32) double l[4];
    _mm256_store_pd(l, v);
    return (l[0] + l[1]) + (l[2] + l[3]);
}

}  // namespace

void residuals(const WorldToCamera& pose, const Intrinsics& k, const Correspondences& in, Residuals& out) {
    const std::size_t n = in.size();
    out.resize(n);
    const double* r = pose.rt;
    const __m256d t0 = _mm256_set1_pd(pose.t[0]);
    const __m256d t1 = _mm256_set1_pd(pose.t[1]);
    const __m256d t2 = _mm256_set1_pd(pose.t[2]);
    __m256d rv[9];
    for (int i = 0; i < 9; ++i) rv[i] = _mm256_set1_pd(r[i]);
    const __m256d f = _mm256_set1_pd(k.focal_px);
    const __m256d ccx = _mm256_set1_pd(k.cx);
    const __m256d ccy = _mm256_set1_pd(k.cy);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);

    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&in.px[j]), t0);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&in.py[j]), t1);
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&in.pz[j]), t2);
        const __m256d x = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(rv[0], dx), _mm256_mul_pd(rv[1], dy)),
                                        _mm256_mul_pd(rv[2], dz));
        const __m256d y = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(rv[3], dx), _mm256_mul_pd(rv[4], dy)),
                                        _mm256_mul_pd(rv[5], dz));
        const __m256d z = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(rv[6], dx), _mm256_mul_pd(rv[7], dy)),
                                        _mm256_mul_pd(rv[8], dz));
        const __m256d ok = _mm256_cmp_pd(z, zero, _CMP_GT_OQ);
        const __m256d ex = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(f, _mm256_div_pd(x, z)), ccx),
                                         _mm256_loadu_pd(&in.u[j]));
        const __m256d ey = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(f, _mm256_div_pd(y, z)), ccy),
                                         _mm256_loadu_pd(&in.v[j]));
        const __m256d sq = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));
        _mm256_storeu_pd(&out.cx[j], _mm256_blendv_pd(zero, x, ok));
        _mm256_storeu_pd(&out.cy[j], _mm256_blendv_pd(zero, y, ok));
        _mm256_storeu_pd(&out.cz[j], _mm256_blendv_pd(one, z, ok));
        _mm256_storeu_pd(&out.ex[j], _mm256_blendv_pd(zero, ex, ok));
        _mm256_storeu_pd(&out.ey[j], _mm256_blendv_pd(zero, ey, ok));
        _mm256_storeu_pd(&out.sq[j], _mm256_blendv_pd(zero, sq, ok));
        _mm256_storeu_pd(&out.valid[j], _mm256_and_pd(ok, one));
    }
    for (; j < n; ++j) {
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
    const std::size_t n = res.cx.size();
    __m256d hv[21];
    __m256d gv[6];
    for (auto& x : hv) x = _mm256_setzero_pd();
    for (auto& x : gv) x = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();

    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d w = _mm256_loadu_pd(&weights[j]);
        const __m256d iz = _mm256_div_pd(one, _mm256_loadu_pd(&res.cz[j]));
        const __m256d u = _mm256_mul_pd(_mm256_loadu_pd(&res.cx[j]), iz);
        const __m256d v = _mm256_mul_pd(_mm256_loadu_pd(&res.cy[j]), iz);
        const __m256d uv = _mm256_mul_pd(u, v);
        const __m256d a[6] = {_mm256_sub_pd(zero, iz), zero, _mm256_mul_pd(u, iz), uv,
                              _mm256_sub_pd(_mm256_sub_pd(zero, one), _mm256_mul_pd(u, u)), v};
        const __m256d b[6] = {zero, _mm256_sub_pd(zero, iz), _mm256_mul_pd(v, iz),
                              _mm256_add_pd(one, _mm256_mul_pd(v, v)), _mm256_sub_pd(zero, uv),
                              _mm256_sub_pd(zero, u)};
        const __m256d ex = _mm256_loadu_pd(&res.ex[j]);
        const __m256d ey = _mm256_loadu_pd(&res.ey[j]);
        int idx = 0;
        for (int r = 0; r < 6; ++r) {
            for (int c = r; c < 6; ++c) {
                const __m256d term = _mm256_add_pd(_mm256_mul_pd(a[r], a[c]), _mm256_mul_pd(b[r], b[c]));
                hv[idx] = _mm256_add_pd(hv[idx], _mm256_mul_pd(w, term));
                ++idx;
            }
            const __m256d gt = _mm256_add_pd(_mm256_mul_pd(a[r], ex), _mm256_mul_pd(b[r], ey));
            gv[r] = _mm256_add_pd(gv[r], _mm256_mul_pd(w, gt));
        }
    }

    double h[21];
    double g[6];
    for (int i = 0; i < 21; ++i) h[i] = lane_sum(hv[i]);
    for (int i = 0; i < 6; ++i) g[i] = lane_sum(gv[i]);

    for (; j < n; ++j) {
        const double w = weights[j];
        if (w == 0.0) continue;
        const double iz = 1.0 / res.cz[j];
        const double u = res.cx[j] * iz;
        const double v = res.cy[j] * iz;
        const double uv = u * v;
        const double a[6] = {0.0 - iz, 0.0, u * iz, uv, (0.0 - 1.0) - u * u, v};
        const double b[6] = {0.0, 0.0 - iz, v * iz, 1.0 + v * v, 0.0 - uv, 0.0 - u};
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

}  // namespace iavns::kernels::avx2
