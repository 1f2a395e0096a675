#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace skewlab {

/// Which one-sided limit to take at a point: f(x-) or f(x+).
enum class Side { left, right };

[[nodiscard]] constexpr const char* to_string(Side side) noexcept {
    return side == Side::left ? "left" : "right";
}

/// c0 + c1 x + c2 x^2 + c3 x^3 in absolute coordinates.
struct Cubic {
    std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

    [[nodiscard]] static constexpr Cubic constant(double v) noexcept { return Cubic{{v, 0.0, 0.0, 0.0}}; }

    [[nodiscard]] constexpr double operator()(double x) const noexcept {
        return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
    }
    [[nodiscard]] constexpr double derivative(double x) const noexcept {
        return c[1] + x * (2.0 * c[2] + x * 3.0 * c[3]);
    }
    [[nodiscard]] constexpr bool is_constant() const noexcept {
        return c[1] == 0.0 && c[2] == 0.0 && c[3] == 0.0;
    }
};

/// An interface point x_j. Either lambda or both beta weights (or all three) must be given.
struct Interface {
    double x = 0.0;
    std::optional<double> lambda;
    std::optional<double> beta_plus;
    std::optional<double> beta_minus;
};

/// Coefficients on the open interval (left, right).
struct Piece {
    double left = 0.0;
    double right = 0.0;
    Cubic diffusion;  // D
    Cubic capacity;   // eta
};

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

/// Declared uniform bounds k <= D, eta <= K.
struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Raw medium description, as read from a config document.
struct MediumSpec {
    Window window;
    Bounds bounds;
    std::vector<Interface> interfaces;
    std::vector<Piece> pieces;
};

struct Violation {
    std::string code;      // stable machine-readable tag, e.g. "interface-order"
    std::string location;  // "interfaces[2]", "pieces[0] x=0.25", ...
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    /// Sum over interfaces of (1 - lambda_j)/lambda_j, reported for completeness.
    double lambda_decay_sum = 0.0;
    /// True when eta(x_j-) == eta(x_j+) at every interface.
    bool capacity_continuous = true;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] bool has(const std::string& code) const;
    [[nodiscard]] std::string summary() const;
};

/// Number of sample points per piece used by the bound checks.
inline constexpr std::size_t kBoundSamplesPerPiece = 1024;
/// Maximum disagreement tolerated between a given lambda and the one implied by beta weights.
inline constexpr double kLambdaBetaTolerance = 1e-10;

struct CoefficientPair {
    double diffusion = 0.0;
    double capacity = 0.0;
};

/// Check every structural and bound invariant of a spec. Never throws.
[[nodiscard]] ValidationReport validate_model(const MediumSpec& spec);

/// One-sided limits D(x+-), eta(x+-). Throws DomainError outside the window.
[[nodiscard]] CoefficientPair coeff_at(const MediumSpec& spec, double x, Side side);

/// Fill lambda_j = D+ beta- / (D+ beta- + D- beta+) for interfaces given by beta weights.
/// Interfaces carrying only lambda are left untouched. Throws ConfigError when an
/// interface has neither lambda nor a complete pair of beta weights.
[[nodiscard]] MediumSpec derive_lambdas(MediumSpec spec);

/// phi per piece, indexed by piece position in MediumSpec::pieces.
struct PhiSequence {
    std::vector<double> phi;
    /// Piece that carries phi = 1 (the piece right of the anchor interface x_0).
    std::size_t anchor_piece = 0;
};

/// Index of the interface that plays the role of x_0: the one nearest the origin,
/// ties going to the left. Empty when there are no interfaces.
[[nodiscard]] std::optional<std::size_t> anchor_interface(const MediumSpec& spec);

/// phi_j / phi_{j-1} = D(x_j+)(1 - lambda_j) / (D(x_j-) lambda_j), phi = 1 on the anchor piece.
/// Requires lambdas to be present (see derive_lambdas).
[[nodiscard]] PhiSequence phi_sequence(const MediumSpec& spec);

/// Validated, immutable medium with lambdas and phi resolved.
///
/// Interface j sits between pieces j and j + 1. All queries are const and
/// the object can be shared freely between threads.
class Medium {
public:
    /// Throws ConfigError carrying the validation summary when the spec is invalid.
    explicit Medium(MediumSpec spec);

    [[nodiscard]] const MediumSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const Window& window() const noexcept { return spec_.window; }
    [[nodiscard]] std::size_t interface_count() const noexcept { return spec_.interfaces.size(); }
    [[nodiscard]] std::size_t piece_count() const noexcept { return spec_.pieces.size(); }
    [[nodiscard]] double interface_position(std::size_t j) const { return spec_.interfaces.at(j).x; }
    [[nodiscard]] std::vector<double> interface_positions() const;
    [[nodiscard]] double lambda(std::size_t j) const { return *spec_.interfaces.at(j).lambda; }
    /// beta_j+ / beta_j-, implied by lambda and the one-sided D values when betas are absent.
    [[nodiscard]] double beta_ratio(std::size_t j) const;
    [[nodiscard]] const PhiSequence& phi() const noexcept { return phi_; }
    [[nodiscard]] double phi_of_piece(std::size_t piece) const { return phi_.phi.at(piece); }
    [[nodiscard]] bool capacity_continuous() const noexcept { return capacity_continuous_; }

    /// Piece whose closure contains x, resolving interfaces by side. Window ends map inward.
    [[nodiscard]] std::size_t piece_index(double x, Side side) const;
    /// Interface index if x coincides with an interface position.
    [[nodiscard]] std::optional<std::size_t> interface_at(double x) const;
    [[nodiscard]] bool contains(double x) const noexcept {
        return x >= spec_.window.lo && x <= spec_.window.hi;
    }

    [[nodiscard]] CoefficientPair coeff(double x, Side side) const;
    [[nodiscard]] double diffusion(double x, Side side) const { return coeff(x, side).diffusion; }
    [[nodiscard]] double capacity(double x, Side side) const { return coeff(x, side).capacity; }

private:
    MediumSpec spec_;
    PhiSequence phi_;
    bool capacity_continuous_ = true;
};

/// Convenience builder: piecewise-constant medium with the given interfaces.
/// `diffusion` and `capacity` have one entry per piece.
[[nodiscard]] MediumSpec piecewise_constant_spec(Window window, Bounds bounds,
                                                 std::vector<Interface> interfaces,
                                                 const std::vector<double>& diffusion,
                                                 const std::vector<double>& capacity);

}  // namespace skewlab
