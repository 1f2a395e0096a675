#pragma once

#include "skewlab/medium.hpp"

#include <functional>
#include <vector>

namespace skewlab {

/// One-sided densities at a point.
struct Densities {
    double s_prime = 0.0;  // scale density 2 phi_j / D
    double m_prime = 0.0;  // speed density eta / phi_j
    double qv_rate = 0.0;  // d<X>/dt = D / eta = 2 / (m' s')
};

/// Integrand for Green-function integrals; evaluated with the side that keeps the
/// evaluation point inside the current sub-interval.
using SidedFunction = std::function<double(double x, Side side)>;

/// Scale and speed of the diffusion generated by the medium.
///
/// s(x) = integral from 0 of s'(y) dy, with 0 clamped into the window when the
/// window does not contain the origin. The value of s at every piece endpoint is
/// cached at construction, so s(x) costs one quadrature over a partial piece (or
/// nothing on constant-D pieces).
class ScaleSpeed {
public:
    explicit ScaleSpeed(Medium medium);

    [[nodiscard]] const Medium& medium() const noexcept { return medium_; }

    [[nodiscard]] Densities densities_at(double x, Side side) const;
    [[nodiscard]] double scale_value(double x) const;
    /// Throws DomainError when u is outside [s(y_min), s(y_max)].
    [[nodiscard]] double inverse_scale_value(double u) const;
    /// m_Y'(u) = m'(x) / s'(x) at x = s^{-1}(u).
    [[nodiscard]] double speed_density_in_scale(double u, Side side) const;

    [[nodiscard]] double scale_image_lo() const noexcept { return cumulative_.front() - origin_offset_; }
    [[nodiscard]] double scale_image_hi() const noexcept { return cumulative_.back() - origin_offset_; }
    [[nodiscard]] double reference_point() const noexcept { return reference_; }

    /// P_x(hit b before a) = (s(x) - s(a)) / (s(b) - s(a)).
    [[nodiscard]] double exit_probability(double a, double b, double x) const;

    /// E_x[H_a ^ H_b] = integral of G(x,y) m'(y) dy with
    /// G = [s(x^y) - s(a)][s(b) - s(x v y)] / (s(b) - s(a)).
    [[nodiscard]] double expected_exit_time(double a, double b, double x) const;

    /// Integral over (a,b) of G(x,y) m'(y) g(y) dy. With g = Af this is
    /// E_x[f(X at exit)] - f(x) (Dynkin); with g = 1 it is the mean exit time.
    [[nodiscard]] double green_integral(double a, double b, double x, const SidedFunction& g) const;

    /// Mean time for the process reflected at `boundary` to reach `target`:
    /// integral between them of |s(target) - s(y)| m'(y) dy.
    [[nodiscard]] double reflected_exit_time(double boundary, double target) const;
    [[nodiscard]] double reflected_green_integral(double boundary, double target, const SidedFunction& g) const;

    /// s(y) - s(c) for c <= y inside one piece (or c > y, giving a negative value).
    [[nodiscard]] double scale_increment_in_piece(std::size_t piece, double c, double y) const;

private:
    [[nodiscard]] double piece_s_prime(std::size_t piece, double x) const;
    [[nodiscard]] double piece_m_prime(std::size_t piece, double x) const;
    [[nodiscard]] double raw_scale(double x) const;  // integral from window.lo

    /// Split [c, d] at interfaces and call fn(piece, lo, hi) per sub-interval.
    template <class Fn>
    void for_each_piece_segment(double c, double d, Fn&& fn) const;

    Medium medium_;
    std::vector<double> breaks_;      // window.lo, interfaces..., window.hi
    std::vector<double> cumulative_;  // integral of s' from window.lo to each break
    std::vector<bool> constant_diffusion_;
    double reference_ = 0.0;
    double origin_offset_ = 0.0;
};

}  // namespace skewlab
