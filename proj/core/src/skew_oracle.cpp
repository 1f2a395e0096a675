#include "skewlab/skew_oracle.hpp"

#include "skewlab/error.hpp"

#include <cmath>
#include <numbers>

namespace skewlab {
namespace {

double gaussian(double t, double z) {
    return std::exp(-z * z / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

}  // namespace

double skew_density_oracle(double alpha, double t, double x, double y) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(t > 0.0)) {
        throw UsageError("skew_density_oracle: need alpha in (0,1) and t > 0");
    }
    const double sign_y = y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
    return gaussian(t, y - x) + sign_y * (2.0 * alpha - 1.0) * gaussian(t, std::abs(x) + std::abs(y));
}

double rescaled_skew_density(double alpha, double sigma_minus, double sigma_plus, double t, double x, double y) {
    const double sx = x > 0.0 ? sigma_plus : sigma_minus;
    const double sy = y > 0.0 ? sigma_plus : sigma_minus;
    return skew_density_oracle(alpha, t, x / sx, y / sy) / sy;
}

double skew_transmission(double d_minus, double d_plus, double eta_minus, double eta_plus, double area_minus,
                         double area_plus) {
    const double plus = area_plus * std::sqrt(eta_plus * d_plus);
    const double minus = area_minus * std::sqrt(eta_minus * d_minus);
    return plus / (plus + minus);
}

}  // namespace skewlab
