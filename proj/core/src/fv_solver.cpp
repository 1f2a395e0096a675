#include "skewlab/fv_solver.hpp"

#include "skewlab/error.hpp"
#include "skewlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace skewlab {
namespace {

constexpr std::size_t kMinCellsPerPiece = 4;

std::vector<std::size_t> cells_per_piece(const MediumSpec& spec, std::size_t n_cells) {
    const std::size_t n_pieces = spec.pieces.size();
    const double total = spec.window.hi - spec.window.lo;
    std::vector<std::size_t> counts(n_pieces);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t used = 0;
    for (std::size_t p = 0; p < n_pieces; ++p) {
        const double share = static_cast<double>(n_cells) * (spec.pieces[p].right - spec.pieces[p].left) / total;
        counts[p] = static_cast<std::size_t>(std::floor(share));
        used += counts[p];
        remainders.emplace_back(share - std::floor(share), p);
    }
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
    for (std::size_t i = 0; used < n_cells && i < remainders.size(); ++i, ++used) ++counts[remainders[i].second];
    for (auto& c : counts) c = std::max(c, kMinCellsPerPiece);
    return counts;
}

struct Tridiagonal {
    std::vector<double> lower;  // lower[i] multiplies x[i-1]
    std::vector<double> diag;
    std::vector<double> upper;  // upper[i] multiplies x[i+1]
};

/// System matrix W/dt - theta L, where (L u)_i = F_{i+1} - F_i.
Tridiagonal system_matrix(const FvSystem& s, double theta) {
    const std::size_t n = s.size();
    Tridiagonal m{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        m.diag[i] = s.weight[i] / s.dt + theta * (s.left_coeff[i + 1] + s.right_coeff[i]);
        if (i > 0) m.lower[i] = -theta * s.left_coeff[i];
        if (i + 1 < n) m.upper[i] = -theta * s.right_coeff[i + 1];
    }
    return m;
}

std::string describe(const FvSystem& s) {
    std::ostringstream os;
    os << "cells=" << s.size() << " dt=" << s.dt << " scheme=" << to_string(s.scheme);
    return os.str();
}

void check_dominance(const FvSystem& s, const Tridiagonal& m) {
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        if (i > 0) off += std::abs(m.upper[i - 1]);
        if (i + 1 < n) off += std::abs(m.lower[i + 1]);
        if (!(m.diag[i] > 0.0) || m.diag[i] < off * (1.0 - 1e-14)) {
            throw NumericalError("fv solver: matrix not column diagonally dominant at cell " + std::to_string(i) +
                                 " (" + describe(s) + ")");
        }
    }
}

void thomas_solve(const FvSystem& s, const Tridiagonal& m, std::vector<double>& rhs, std::vector<double>& scratch) {
    const std::size_t n = rhs.size();
    scratch.resize(n);
    double pivot = m.diag[0];
    for (std::size_t i = 0;; ++i) {
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw NumericalError("fv solver: tridiagonal pivot " + std::to_string(pivot) + " at cell " +
                                 std::to_string(i) + " (" + describe(s) + ")");
        }
        scratch[i] = m.upper[i] / pivot;
        rhs[i] /= pivot;
        if (i + 1 == n) break;
        pivot = m.diag[i + 1] - m.lower[i + 1] * scratch[i];
        rhs[i + 1] -= m.lower[i + 1] * rhs[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

}  // namespace

const char* to_string(Scheme scheme) noexcept {
    return scheme == Scheme::implicit_euler ? "implicit-euler" : "crank-nicolson";
}

Scheme parse_scheme(const std::string& text) {
    if (text == "implicit-euler" || text == "ie") return Scheme::implicit_euler;
    if (text == "crank-nicolson" || text == "cn") return Scheme::crank_nicolson;
    throw ConfigError("unknown scheme '" + text + "' (expected implicit-euler or crank-nicolson)");
}

std::size_t FvSystem::cell_of(double x) const {
    if (!(x >= edges.front() && x <= edges.back())) {
        throw DomainError("cell_of: x=" + std::to_string(x) + " outside the solver window");
    }
    const auto it = std::lower_bound(edges.begin(), edges.end(), x);
    const auto idx = static_cast<std::size_t>(it - edges.begin());
    return idx == 0 ? 0 : idx - 1;
}

FvSystem assemble_system(const Medium& medium, std::size_t n_cells, double dt, Scheme scheme) {
    const auto& spec = medium.spec();
    if (!(dt > 0.0)) throw UsageError("assemble_system: dt must be positive");
    if (n_cells < kMinCellsPerPiece * spec.pieces.size()) {
        throw UsageError("assemble_system: need at least " + std::to_string(kMinCellsPerPiece) + " cells per piece");
    }
    FvSystem s;
    s.dt = dt;
    s.scheme = scheme;

    const auto counts = cells_per_piece(spec, n_cells);
    std::vector<std::size_t> piece_of_cell;
    s.edges.push_back(spec.window.lo);
    for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
        const auto& piece = spec.pieces[p];
        const double dx = (piece.right - piece.left) / static_cast<double>(counts[p]);
        for (std::size_t c = 1; c <= counts[p]; ++c) {
            s.edges.push_back(c == counts[p] ? piece.right : piece.left + dx * static_cast<double>(c));
            piece_of_cell.push_back(p);
        }
        if (p + 1 < spec.pieces.size()) s.interface_edges.push_back(s.edges.size() - 1);
    }
    for (std::size_t j = 0; j < s.interface_edges.size(); ++j) {
        if (s.edges[s.interface_edges[j]] != spec.interfaces[j].x) {
            throw NumericalError("assemble_system: interface " + std::to_string(j) + " is not on a cell edge");
        }
    }

    const std::size_t n = piece_of_cell.size();
    s.centers.resize(n);
    s.widths.resize(n);
    s.eta.resize(n);
    s.weight.resize(n);
    std::vector<double> d_center(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& piece = spec.pieces[piece_of_cell[i]];
        const double lo = s.edges[i];
        const double hi = s.edges[i + 1];
        s.centers[i] = 0.5 * (lo + hi);
        s.widths[i] = hi - lo;
        s.eta[i] = piece.capacity.is_constant()
                       ? piece.capacity.c[0]
                       : adaptive_simpson([&](double y) { return piece.capacity(y); }, lo, hi, 1e-15 * (hi - lo)) /
                             (hi - lo);
        s.weight[i] = s.eta[i] * s.widths[i];
        d_center[i] = piece.diffusion(s.centers[i]);
    }

    s.left_coeff.assign(n + 1, 0.0);
    s.right_coeff.assign(n + 1, 0.0);
    s.edge_a.assign(n + 1, 0.0);
    s.edge_b.assign(n + 1, 0.0);
    s.edge_r.assign(n + 1, 1.0);
    std::size_t next_interface = 0;
    for (std::size_t e = 1; e < n; ++e) {
        const double delta_l = 0.5 * s.widths[e - 1];
        const double delta_r = 0.5 * s.widths[e];
        double d_l = d_center[e - 1];
        double d_r = d_center[e];
        double r = 1.0;
        if (next_interface < s.interface_edges.size() && s.interface_edges[next_interface] == e) {
            const double x = s.edges[e];
            d_l = medium.diffusion(x, Side::left);
            d_r = medium.diffusion(x, Side::right);
            r = 1.0 / medium.beta_ratio(next_interface);
            ++next_interface;
        }
        const double a = 2.0 * delta_l / d_l;
        const double b = 2.0 * delta_r / d_r;
        s.edge_a[e] = a;
        s.edge_b[e] = b;
        s.edge_r[e] = r;
        s.right_coeff[e] = 1.0 / (r * a + b);
        s.left_coeff[e] = r / (r * a + b);
    }
    check_dominance(s, system_matrix(s, 1.0));
    return s;
}

double mass(const FvSystem& system, const DensityField& field) {
    if (field.u.size() != system.size()) throw UsageError("mass: field does not match the system");
    double total = 0.0;
    for (std::size_t i = 0; i < field.u.size(); ++i) total += system.weight[i] * field.u[i];
    return total;
}

DensityField advance(const FvSystem& system, DensityField field, std::size_t n_steps) {
    const std::size_t n = system.size();
    if (field.u.size() != n) throw UsageError("advance: field has " + std::to_string(field.u.size()) +
                                              " cells, system has " + std::to_string(n));
    const double theta = system.scheme == Scheme::implicit_euler ? 1.0 : 0.5;
    const auto m = system_matrix(system, theta);
    std::vector<double> rhs(n);
    std::vector<double> scratch(n);
    for (std::size_t step = 0; step < n_steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = system.weight[i] / system.dt * field.u[i];
        if (theta < 1.0) {
            const double explicit_part = 1.0 - theta;
            for (std::size_t i = 0; i < n; ++i) {
                const double f_right = system.right_coeff[i + 1] * (i + 1 < n ? field.u[i + 1] : 0.0) -
                                       system.left_coeff[i + 1] * field.u[i];
                const double f_left = system.right_coeff[i] * field.u[i] -
                                      system.left_coeff[i] * (i > 0 ? field.u[i - 1] : 0.0);
                rhs[i] += explicit_part * (f_right - f_left);
            }
        }
        thomas_solve(system, m, rhs, scratch);
        field.u.swap(rhs);
        field.time += system.dt;
    }
    return field;
}

ForwardSolution solve_forward(const Medium& medium, const InitialData& initial, double t, std::size_t n_cells,
                              double dt, Scheme scheme) {
    if (!(t >= 0.0)) throw UsageError("solve_forward: t must be non-negative");
    if (!(dt > 0.0)) throw UsageError("solve_forward: dt must be positive");
    const std::size_t steps = t == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
    ForwardSolution sol;
    sol.steps = steps;
    sol.system = assemble_system(medium, n_cells, steps ? t / static_cast<double>(steps) : dt, scheme);
    const std::size_t n = sol.system.size();

    DensityField field;
    if (const auto* delta = std::get_if<DeltaInitial>(&initial)) {
        if (!medium.contains(delta->x0)) {
            throw DomainError("solve_forward: x0=" + std::to_string(delta->x0) + " outside the window");
        }
        const std::size_t c = sol.system.cell_of(delta->x0);
        sol.reference_capacity = medium.capacity(delta->x0, Side::left);
        field.u.assign(n, 0.0);
        field.u[c] = sol.reference_capacity / sol.system.weight[c];
    } else {
        const auto& tab = std::get<TabulatedInitial>(initial);
        if (tab.u.size() != n) {
            throw UsageError("solve_forward: tabulated data has " + std::to_string(tab.u.size()) +
                             " values, system has " + std::to_string(n) + " cells");
        }
        field.u = tab.u;
    }
    sol.mass_initial = mass(sol.system, field);
    if (std::holds_alternative<TabulatedInitial>(initial)) {
        if (!(sol.mass_initial > 0.0)) throw UsageError("solve_forward: tabulated data has no mass");
        sol.reference_capacity = sol.mass_initial;
    }
    sol.field = advance(sol.system, std::move(field), steps);
    sol.field.time = t;
    sol.mass_final = mass(sol.system, sol.field);
    return sol;
}

std::vector<double> p_from_q(const ForwardSolution& solution) {
    std::vector<double> p(solution.field.u.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = solution.system.eta[i] * solution.field.u[i] / solution.reference_capacity;
    }
    return p;
}

std::vector<InterfaceTrace> interface_traces(const FvSystem& system, const DensityField& field) {
    if (field.u.size() != system.size()) throw UsageError("interface_traces: field does not match the system");
    std::vector<InterfaceTrace> out;
    for (std::size_t e : system.interface_edges) {
        InterfaceTrace tr;
        tr.x = system.edges[e];
        tr.r = system.edge_r[e];
        const double ul = field.u[e - 1];
        const double ur = field.u[e];
        tr.flux = interface_flux(ul, ur, system.edge_a[e], system.edge_b[e], tr.r);
        tr.u_minus = ul + system.edge_a[e] * tr.flux;
        tr.u_plus = ur - system.edge_b[e] * tr.flux;
        out.push_back(tr);
    }
    return out;
}

}  // namespace skewlab
