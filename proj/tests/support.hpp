#pragma once

#include "skewlab/medium.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace skewlab::testing {

inline Interface lambda_interface(double x, double lambda) {
    Interface itf;
    itf.x = x;
    itf.lambda = lambda;
    return itf;
}

inline Interface beta_interface(double x, double beta_minus, double beta_plus) {
    Interface itf;
    itf.x = x;
    itf.beta_minus = beta_minus;
    itf.beta_plus = beta_plus;
    return itf;
}

/// D- = 1, D+ = 2, eta = 1, unit cross sections, window [-3, 3].
inline MediumSpec two_diffusivity_spec() {
    return piecewise_constant_spec({-3.0, 3.0}, {0.5, 4.0}, {beta_interface(0.0, 1.0, 1.0)}, {1.0, 2.0}, {1.0, 1.0});
}

/// D- = 1, D+ = 2, eta- = 1, eta+ = 3, lambda = 2/3, window [-3, 3].
inline MediumSpec capacity_jump_spec() {
    return piecewise_constant_spec({-3.0, 3.0}, {0.5, 4.0}, {lambda_interface(0.0, 2.0 / 3.0)}, {1.0, 2.0},
                                   {1.0, 3.0});
}

inline MediumSpec uniform_spec(double d, double eta, double lo = -3.0, double hi = 3.0) {
    return piecewise_constant_spec({lo, hi}, {0.1, 10.0}, {}, {d}, {eta});
}

/// Random valid medium: 0-3 interfaces in [-2, 2], cubic coefficients that stay
/// inside [0.1, 10], interfaces given by lambda or by beta weights.
class RandomMedia {
public:
    explicit RandomMedia(std::uint64_t seed) : rng_(seed) {}

    MediumSpec next(bool piecewise_constant = false) {
        MediumSpec spec;
        spec.window = {-2.0, 2.0};
        spec.bounds = {0.1, 10.0};
        const int n = std::uniform_int_distribution<int>(0, 3)(rng_);
        std::vector<double> xs;
        while (static_cast<int>(xs.size()) < n) {
            const double x = uniform(-1.6, 1.6);
            bool ok = true;
            for (double y : xs) ok = ok && std::abs(x - y) > 0.3;
            if (ok) xs.push_back(x);
        }
        std::sort(xs.begin(), xs.end());
        for (double x : xs) {
            if (uniform(0.0, 1.0) < 0.5) {
                spec.interfaces.push_back(lambda_interface(x, uniform(0.2, 0.8)));
            } else {
                spec.interfaces.push_back(beta_interface(x, uniform(0.5, 2.0), uniform(0.5, 2.0)));
            }
        }
        double left = spec.window.lo;
        for (std::size_t p = 0; p <= xs.size(); ++p) {
            Piece piece;
            piece.left = left;
            piece.right = p < xs.size() ? xs[p] : spec.window.hi;
            piece.diffusion = cubic(piecewise_constant);
            piece.capacity = cubic(piecewise_constant);
            spec.pieces.push_back(piece);
            left = piece.right;
        }
        return spec;
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

private:
    Cubic cubic(bool constant) {
        Cubic c = Cubic::constant(uniform(1.0, 3.0));
        if (!constant) {
            for (int i = 1; i < 4; ++i) c.c[i] = uniform(-0.05, 0.05);
        }
        return c;
    }

    std::mt19937_64 rng_;
};

}  // namespace skewlab::testing
