#include "iavns/robust.hpp"

#include <algorithm>
#include <stdexcept>

namespace iavns {

double tukey_rho(double s, const TukeyConfig& cfg) {
    const double c2 = cfg.c * cfg.c;
    if (s >= c2) return c2 / 6.0;
    const double a = 1.0 - s / c2;
    return c2 / 6.0 * (1.0 - a * a * a);
}

double tukey_weight(double s, const TukeyConfig& cfg) {
    const double c2 = cfg.c * cfg.c;
    if (s >= c2) return 0.0;
    const double a = 1.0 - s / c2;
    return a * a;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double residual_scale(std::span<const double> norms, double floor_px) {
    if (norms.empty()) return floor_px;
    const double mad = 1.4826 * median(std::vector<double>(norms.begin(), norms.end()));
    return std::max(floor_px, mad);
}

TukeyConfig adaptive_tukey(std::span<const double> norms, const RobustScaleConfig& cfg) {
    return {cfg.tuning * residual_scale(norms, cfg.floor_px)};
}

}  // namespace iavns
