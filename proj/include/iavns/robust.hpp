#pragma once

#include <span>
#include <vector>

namespace iavns {

// Tukey bisquare on squared residual norms s = |e|^2.
// Convention: d rho / ds = weight / 2, so sum(rho) and sum(w J^T J) pair up as
// the cost and Gauss-Newton Hessian of one IRLS problem.
struct TukeyConfig {
    double c = 4.685;  // cutoff on the residual norm, pixels
};

double tukey_rho(double s, const TukeyConfig& cfg);
double tukey_weight(double s, const TukeyConfig& cfg);

// Data-driven cutoff: tuning * max(floor, 1.4826 * median(norms)).
struct RobustScaleConfig {
    double tuning = 4.685;
    double floor_px = 0.1;
};

double median(std::vector<double> values);
double residual_scale(std::span<const double> norms, double floor_px);
TukeyConfig adaptive_tukey(std::span<const double> norms, const RobustScaleConfig& cfg);

}  // namespace iavns
