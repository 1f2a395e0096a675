#pragma once

namespace skewlab {

/// Transition density of skew Brownian motion with transmission probability alpha:
///   g_t(y - x) + sign(y) (2 alpha - 1) g_t(|x| + |y|),
/// g_t the centred Gaussian kernel with variance t. Closed form, used as an oracle.
[[nodiscard]] double skew_density_oracle(double alpha, double t, double x, double y);

/// Density of X = sigma(B) B where B is skew BM started from x / sigma(x), with
/// sigma = sigma_minus on (-inf, 0] and sigma_plus on (0, inf).
[[nodiscard]] double rescaled_skew_density(double alpha, double sigma_minus, double sigma_plus, double t,
                                           double x, double y);

/// P(X(t) > 0 | X(0) = 0) for the single-interface piecewise-constant medium:
///   A+ sqrt(eta+ D+) / (A+ sqrt(eta+ D+) + A- sqrt(eta- D-)).
/// The cross-section weights A are 1 / beta.
[[nodiscard]] double skew_transmission(double d_minus, double d_plus, double eta_minus, double eta_plus,
                                       double area_minus = 1.0, double area_plus = 1.0);

}  // namespace skewlab
