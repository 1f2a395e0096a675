#pragma once

#include "skewlab/medium.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace skewlab {

/// Flux (D/2) du/dy across an edge whose sides have one-sided conductances
/// a = 2 delta_L / D(x-), b = 2 delta_R / D(x+) and trace ratio u+ / u- = r.
[[nodiscard]] constexpr double interface_flux(double u_left, double u_right, double a, double b, double r) noexcept {
    return (u_right - r * u_left) / (r * a + b);
}

enum class Scheme { implicit_euler, crank_nicolson };

[[nodiscard]] const char* to_string(Scheme scheme) noexcept;
/// Accepts "implicit-euler"/"ie" and "crank-nicolson"/"cn".
[[nodiscard]] Scheme parse_scheme(const std::string& text);

/// Cell-centred finite-volume discretisation of
///   eta du/dt = d/dy (D/2 du/dy),  beta+ u(x_j+) = beta- u(x_j-),  zero flux at the window bounds.
///
/// Edge e sits between cells e-1 and e; edges 0 and n are the outer boundaries.
/// The flux through edge e is right_coeff[e] * u[e] - left_coeff[e] * u[e-1].
struct FvSystem {
    std::vector<double> edges;
    std::vector<double> centers;
    std::vector<double> widths;
    std::vector<double> eta;     // cell averages of the capacity
    std::vector<double> weight;  // eta * width
    std::vector<double> left_coeff;
    std::vector<double> right_coeff;
    std::vector<double> edge_a;  // 2 delta_L / D_L
    std::vector<double> edge_b;  // 2 delta_R / D_R
    std::vector<double> edge_r;  // 1 on smooth edges
    std::vector<std::size_t> interface_edges;  // edge index of interface j
    double dt = 0.0;
    Scheme scheme = Scheme::implicit_euler;

    [[nodiscard]] std::size_t size() const noexcept { return centers.size(); }
    /// Cell c with edges[c] < x <= edges[c + 1]; x == edges[0] maps to cell 0.
    [[nodiscard]] std::size_t cell_of(double x) const;
};

/// Cells are shared among pieces in proportion to their length, at least 4 each,
/// uniform within a piece. Throws UsageError for dt <= 0 or too few cells.
[[nodiscard]] FvSystem assemble_system(const Medium& medium, std::size_t n_cells, double dt,
                                       Scheme scheme = Scheme::implicit_euler);

struct DensityField {
    std::vector<double> u;
    double time = 0.0;
};

[[nodiscard]] double mass(const FvSystem& system, const DensityField& field);

/// Apply the time stepper n_steps times. Throws NumericalError if a tridiagonal
/// pivot is not positive or the system loses column diagonal dominance.
[[nodiscard]] DensityField advance(const FvSystem& system, DensityField field, std::size_t n_steps);

struct DeltaInitial {
    double x0 = 0.0;
};

/// Cell values of q(0, .) on the system's cells, with the reference mass M used
/// to normalise p.
struct TabulatedInitial {
    std::vector<double> u;
};

using InitialData = std::variant<DeltaInitial, TabulatedInitial>;

struct ForwardSolution {
    FvSystem system;
    DensityField field;
    double mass_initial = 0.0;
    double mass_final = 0.0;
    /// eta(x0) for delta data (eta(x0-) at an interface), mass_initial otherwise.
    double reference_capacity = 1.0;
    std::size_t steps = 0;
};

/// Delta data puts eta(x0) / (eta_cell dx) into the cell containing x0 so the
/// conserved mass is eta(x0). Steps ceil(t / dt - 1e-9) times with the step
/// shortened to t / steps.
[[nodiscard]] ForwardSolution solve_forward(const Medium& medium, const InitialData& initial, double t,
                                            std::size_t n_cells, double dt, Scheme scheme = Scheme::implicit_euler);

/// p(t, x0, y) = eta(y) q(t, x0, y) / reference_capacity, per cell.
[[nodiscard]] std::vector<double> p_from_q(const ForwardSolution& solution);

struct InterfaceTrace {
    double x = 0.0;
    double flux = 0.0;
    double u_minus = 0.0;
    double u_plus = 0.0;
    double r = 1.0;
};

/// One-sided traces u- = u_L + a F, u+ = u_R - b F at every interface edge.
[[nodiscard]] std::vector<InterfaceTrace> interface_traces(const FvSystem& system, const DensityField& field);

}  // namespace skewlab
