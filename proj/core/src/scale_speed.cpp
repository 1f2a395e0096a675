#include "skewlab/scale_speed.hpp"

#include "skewlab/error.hpp"
#include "skewlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace skewlab {
namespace {

constexpr double kScaleTolerance = 1e-13;
constexpr int kMaxDepth = 30;

}  // namespace

ScaleSpeed::ScaleSpeed(Medium medium) : medium_(std::move(medium)) {
    const auto& spec = medium_.spec();
    breaks_.push_back(spec.window.lo);
    for (const auto& itf : spec.interfaces) breaks_.push_back(itf.x);
    breaks_.push_back(spec.window.hi);

    constant_diffusion_.reserve(spec.pieces.size());
    for (const auto& p : spec.pieces) constant_diffusion_.push_back(p.diffusion.is_constant());

    cumulative_.assign(breaks_.size(), 0.0);
    for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
        cumulative_[p + 1] = cumulative_[p] + scale_increment_in_piece(p, breaks_[p], breaks_[p + 1]);
    }
    reference_ = std::clamp(0.0, spec.window.lo, spec.window.hi);
    origin_offset_ = 0.0;
    origin_offset_ = raw_scale(reference_);
}

double ScaleSpeed::piece_s_prime(std::size_t piece, double x) const {
    return 2.0 * medium_.phi_of_piece(piece) / medium_.spec().pieces[piece].diffusion(x);
}

double ScaleSpeed::piece_m_prime(std::size_t piece, double x) const {
    return medium_.spec().pieces[piece].capacity(x) / medium_.phi_of_piece(piece);
}

double ScaleSpeed::scale_increment_in_piece(std::size_t piece, double c, double y) const {
    if (c == y) return 0.0;
    if (constant_diffusion_[piece]) return piece_s_prime(piece, c) * (y - c);
    return adaptive_simpson([&](double z) { return piece_s_prime(piece, z); }, c, y, kScaleTolerance, kMaxDepth);
}

double ScaleSpeed::raw_scale(double x) const {
    const std::size_t p = std::min(medium_.piece_index(x, Side::right), medium_.piece_count() - 1);
    return cumulative_[p] + scale_increment_in_piece(p, breaks_[p], x);
}

Densities ScaleSpeed::densities_at(double x, Side side) const {
    const auto c = medium_.coeff(x, side);  // DomainError outside the window
    const double phi = medium_.phi_of_piece(medium_.piece_index(x, side));
    return {2.0 * phi / c.diffusion, c.capacity / phi, c.diffusion / c.capacity};
}

double ScaleSpeed::scale_value(double x) const {
    if (!medium_.contains(x)) {
        throw DomainError("scale_value: x=" + std::to_string(x) + " outside the window");
    }
    return raw_scale(x) - origin_offset_;
}

double ScaleSpeed::inverse_scale_value(double u) const {
    const double lo_u = scale_image_lo();
    const double hi_u = scale_image_hi();
    if (!(u >= lo_u && u <= hi_u)) {
        throw DomainError("inverse_scale_value: u=" + std::to_string(u) + " outside the scale image [" +
                          std::to_string(lo_u) + ", " + std::to_string(hi_u) + "]");
    }
    const double target = u + origin_offset_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    std::size_t p = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    p = std::min(p, medium_.piece_count() - 1);

    const double left = breaks_[p];
    const double right = breaks_[p + 1];
    const double rest = target - cumulative_[p];
    if (constant_diffusion_[p]) return std::clamp(left + rest / piece_s_prime(p, left), left, right);

    // Newton on g(x) = s(x) - u inside the bracket, bisecting when a step leaves it.
    double a = left;
    double b = right;
    const double width = cumulative_[p + 1] - cumulative_[p];
    double x = left + (right - left) * (width > 0.0 ? rest / width : 0.5);
    const double tol = 1e-12 * (1.0 + std::abs(u));
    for (int iter = 0; iter < 200; ++iter) {
        const double g = scale_increment_in_piece(p, left, x) - rest;
        if (std::abs(g) <= tol) return x;
        if (g > 0.0) b = x; else a = x;
        double next = x - g / piece_s_prime(p, x);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) return next;
        x = next;
    }
    return x;
}

double ScaleSpeed::speed_density_in_scale(double u, Side side) const {
    const double x = inverse_scale_value(u);
    const auto d = densities_at(x, side);
    return d.m_prime / d.s_prime;
}

double ScaleSpeed::exit_probability(double a, double b, double x) const {
    if (!(a < b && x >= a && x <= b)) throw UsageError("exit_probability: need a <= x <= b with a < b");
    const double sa = scale_value(a);
    return (scale_value(x) - sa) / (scale_value(b) - sa);
}

template <class Fn>
void ScaleSpeed::for_each_piece_segment(double c, double d, Fn&& fn) const {
    if (!(c < d)) return;
    std::size_t p = medium_.piece_index(c, Side::right);
    double lo = c;
    while (lo < d && p < medium_.piece_count()) {
        const double hi = std::min(d, breaks_[p + 1]);
        if (hi > lo) fn(p, lo, hi);
        lo = hi;
        ++p;
    }
}

namespace {

/// Integrate fn over [c, d] with a tolerance relative to a coarse estimate of |fn|.
template <class F>
double integrate_relative(F&& fn, double c, double d) {
    const double h = (d - c) / 4.0;
    double coarse = 0.0;
    for (int i = 0; i <= 4; ++i) {
        const double w = (i == 0 || i == 4) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        coarse += w * std::abs(fn(c + i * h));
    }
    coarse *= h / 3.0;
    const double tol = std::max(1e-13 * coarse, 1e-300);
    return adaptive_simpson(fn, c, d, tol, kMaxDepth);
}

}  // namespace

double ScaleSpeed::green_integral(double a, double b, double x, const SidedFunction& g) const {
    if (!(a < b && x >= a && x <= b)) throw UsageError("green_integral: need a <= x <= b with a < b");
    const double sa = scale_value(a);
    const double sb = scale_value(b);
    const double sx = scale_value(x);
    const double span = sb - sa;
    double total = 0.0;

    auto segment = [&](bool below_x) {
        return [&, below_x](std::size_t p, double c, double d) {
            const double sc = scale_value(c);
            auto integrand = [&](double y) {
                const double sy = sc + scale_increment_in_piece(p, c, y);
                const double kernel = below_x ? (sy - sa) * (sb - sx) / span : (sx - sa) * (sb - sy) / span;
                const Side side = y == d ? Side::left : Side::right;
                return kernel * piece_m_prime(p, y) * g(y, side);
            };
            total += integrate_relative(integrand, c, d);
        };
    };
    for_each_piece_segment(a, x, segment(true));
    for_each_piece_segment(x, b, segment(false));
    return total;
}

double ScaleSpeed::expected_exit_time(double a, double b, double x) const {
    return green_integral(a, b, x, [](double, Side) { return 1.0; });
}

double ScaleSpeed::reflected_green_integral(double boundary, double target, const SidedFunction& g) const {
    if (boundary == target) return 0.0;
    const double st = scale_value(target);
    const double c0 = std::min(boundary, target);
    const double d0 = std::max(boundary, target);
    double total = 0.0;
    for_each_piece_segment(c0, d0, [&](std::size_t p, double c, double d) {
        const double sc = scale_value(c);
        auto integrand = [&](double y) {
            const double sy = sc + scale_increment_in_piece(p, c, y);
            const Side side = y == d ? Side::left : Side::right;
            return std::abs(st - sy) * piece_m_prime(p, y) * g(y, side);
        };
        total += integrate_relative(integrand, c, d);
    });
    return total;
}

double ScaleSpeed::reflected_exit_time(double boundary, double target) const {
    return reflected_green_integral(boundary, target, [](double, Side) { return 1.0; });
}

}  // namespace skewlab
