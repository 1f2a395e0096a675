#include "skewlab/medium.hpp"

#include "skewlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace skewlab {
namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

std::string index_loc(const char* what, std::size_t i) {
    return std::string(what) + "[" + std::to_string(i) + "]";
}

std::optional<double> lambda_from_betas(const Interface& itf, double d_minus, double d_plus) {
    if (!itf.beta_plus || !itf.beta_minus) return std::nullopt;
    const double bp = *itf.beta_plus;
    const double bm = *itf.beta_minus;
    return d_plus * bm / (d_plus * bm + d_minus * bp);
}

void check_bounds(const MediumSpec& spec, std::size_t index, ValidationReport& report) {
    const Piece& p = spec.pieces[index];
    const double k = spec.bounds.lower;
    const double big_k = spec.bounds.upper;
    bool d_reported = false;
    bool eta_reported = false;
    const std::size_t n = kBoundSamplesPerPiece;
    for (std::size_t i = 0; i < n && !(d_reported && eta_reported); ++i) {
        const double x = i + 1 == n ? p.right
                                    : p.left + (p.right - p.left) * static_cast<double>(i) /
                                                   static_cast<double>(n - 1);
        const double d = p.diffusion(x);
        const double eta = p.capacity(x);
        if (!d_reported && !(d >= k && d <= big_k)) {
            report.violations.push_back({"diffusion-bound", index_loc("pieces", index) + " x=" + fmt_num(x),
                                         "D=" + fmt_num(d) + " outside [" + fmt_num(k) + ", " +
                                             fmt_num(big_k) + "]"});
            d_reported = true;
        }
        if (!eta_reported && !(eta >= k && eta <= big_k)) {
            report.violations.push_back({"capacity-bound", index_loc("pieces", index) + " x=" + fmt_num(x),
                                         "eta=" + fmt_num(eta) + " outside [" + fmt_num(k) + ", " +
                                             fmt_num(big_k) + "]"});
            eta_reported = true;
        }
    }
}

}  // namespace

bool ValidationReport::has(const std::string& code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::summary() const {
    if (violations.empty()) return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        const auto& v = violations[i];
        if (i) os << "; ";
        os << v.code << " at " << v.location << ": " << v.message;
    }
    return os.str();
}

ValidationReport validate_model(const MediumSpec& spec) {
    ValidationReport report;
    auto add = [&](std::string code, std::string loc, std::string msg) {
        report.violations.push_back({std::move(code), std::move(loc), std::move(msg)});
    };

    const auto& w = spec.window;
    if (!(std::isfinite(w.lo) && std::isfinite(w.hi) && w.lo < w.hi)) {
        add("window-order", "window", "window must satisfy y_min < y_max");
    }
    const auto& b = spec.bounds;
    if (!(b.lower > 0.0 && b.lower < b.upper && std::isfinite(b.upper))) {
        add("bounds-range", "bounds", "bounds must satisfy 0 < k < K < inf");
    }

    const auto& ifs = spec.interfaces;
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        const auto& itf = ifs[i];
        const auto loc = index_loc("interfaces", i);
        if (i > 0 && !(ifs[i - 1].x < itf.x)) {
            add("interface-order", loc, "interface positions must be strictly increasing");
        }
        if (!(itf.x > w.lo && itf.x < w.hi)) {
            add("interface-outside-window", loc, "x=" + fmt_num(itf.x) + " is not inside the window");
        }
        if (itf.lambda && !(*itf.lambda > 0.0 && *itf.lambda < 1.0)) {
            add("lambda-range", loc, "lambda=" + fmt_num(*itf.lambda) + " must lie in the open interval (0,1)");
        }
        if (itf.beta_plus && !(*itf.beta_plus > 0.0)) {
            add("beta-positive", loc, "beta_plus must be strictly positive");
        }
        if (itf.beta_minus && !(*itf.beta_minus > 0.0)) {
            add("beta-positive", loc, "beta_minus must be strictly positive");
        }
        const bool betas = itf.beta_plus && itf.beta_minus;
        if (!itf.lambda && !betas) {
            add("interface-parameters-missing", loc, "give lambda or both beta_plus and beta_minus");
        }
    }

    const auto& pcs = spec.pieces;
    if (pcs.size() != ifs.size() + 1) {
        add("piece-count", "pieces",
            "expected " + std::to_string(ifs.size() + 1) + " pieces, got " + std::to_string(pcs.size()));
    } else {
        for (std::size_t i = 0; i < pcs.size(); ++i) {
            const auto loc = index_loc("pieces", i);
            if (!(pcs[i].left < pcs[i].right)) add("piece-order", loc, "piece must satisfy left < right");
            const double want_left = i == 0 ? w.lo : ifs[i - 1].x;
            const double want_right = i + 1 == pcs.size() ? w.hi : ifs[i].x;
            if (pcs[i].left != want_left || pcs[i].right != want_right) {
                add("piece-endpoints", loc,
                    "piece must span [" + fmt_num(want_left) + ", " + fmt_num(want_right) + "]");
            }
        }
    }
    for (std::size_t i = 0; i < pcs.size(); ++i) {
        const auto& p = pcs[i];
        const bool finite = std::all_of(p.diffusion.c.begin(), p.diffusion.c.end(), [](double c) { return std::isfinite(c); }) &&
                            std::all_of(p.capacity.c.begin(), p.capacity.c.end(), [](double c) { return std::isfinite(c); });
        if (!finite) {
            add("coefficient-finite", index_loc("pieces", i), "coefficients must be finite");
            continue;
        }
        if (p.left < p.right) check_bounds(spec, i, report);
    }

    // The remaining checks need one-sided values at interfaces.
    if (report.has("piece-count") || report.has("piece-endpoints") || report.has("piece-order")) {
        return report;
    }
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        const auto& itf = ifs[i];
        const double x = itf.x;
        const double d_minus = pcs[i].diffusion(x);
        const double d_plus = pcs[i + 1].diffusion(x);
        const double eta_minus = pcs[i].capacity(x);
        const double eta_plus = pcs[i + 1].capacity(x);
        if (std::abs(eta_plus - eta_minus) > 1e-12 * std::max(std::abs(eta_plus), std::abs(eta_minus))) {
            report.capacity_continuous = false;
        }
        const auto from_beta = lambda_from_betas(itf, d_minus, d_plus);
        if (itf.lambda && from_beta && std::abs(*itf.lambda - *from_beta) > kLambdaBetaTolerance) {
            add("lambda-beta-mismatch", index_loc("interfaces", i),
                "lambda=" + fmt_num(*itf.lambda) + " but beta weights imply " + fmt_num(*from_beta));
        }
        const auto lam = itf.lambda ? itf.lambda : from_beta;
        if (lam && *lam > 0.0 && *lam < 1.0) report.lambda_decay_sum += (1.0 - *lam) / *lam;
    }
    return report;
}

CoefficientPair coeff_at(const MediumSpec& spec, double x, Side side) {
    const auto& w = spec.window;
    if (!(x >= w.lo && x <= w.hi)) {
        throw DomainError("coordinate " + fmt_num(x) + " outside window [" + fmt_num(w.lo) + ", " +
                          fmt_num(w.hi) + "]");
    }
    const auto& pcs = spec.pieces;
    if (pcs.empty()) throw ConfigError("medium has no pieces");
    for (std::size_t i = 0; i < pcs.size(); ++i) {
        const auto& p = pcs[i];
        const bool inside = side == Side::left
                                ? (x > p.left && x <= p.right) || (i == 0 && x == p.left)
                                : (x >= p.left && x < p.right) || (i + 1 == pcs.size() && x == p.right);
        if (inside) return {p.diffusion(x), p.capacity(x)};
    }
    throw DomainError("coordinate " + fmt_num(x) + " not covered by any piece");
}

MediumSpec derive_lambdas(MediumSpec spec) {
    for (std::size_t i = 0; i < spec.interfaces.size(); ++i) {
        auto& itf = spec.interfaces[i];
        if (itf.lambda) continue;
        if (!itf.beta_plus || !itf.beta_minus) {
            throw ConfigError("interfaces[" + std::to_string(i) + "]: missing beta_plus/beta_minus (and no lambda)");
        }
        const double d_minus = coeff_at(spec, itf.x, Side::left).diffusion;
        const double d_plus = coeff_at(spec, itf.x, Side::right).diffusion;
        itf.lambda = lambda_from_betas(itf, d_minus, d_plus);
    }
    return spec;
}

std::optional<std::size_t> anchor_interface(const MediumSpec& spec) {
    if (spec.interfaces.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < spec.interfaces.size(); ++i) {
        if (std::abs(spec.interfaces[i].x) < std::abs(spec.interfaces[best].x)) best = i;
    }
    return best;
}

PhiSequence phi_sequence(const MediumSpec& spec) {
    PhiSequence out;
    const std::size_t n_pieces = spec.interfaces.size() + 1;
    out.phi.assign(n_pieces, 1.0);
    const auto anchor = anchor_interface(spec);
    if (!anchor) return out;

    auto ratio = [&](std::size_t j) {
        const auto& itf = spec.interfaces[j];
        if (!itf.lambda) throw ConfigError("phi_sequence requires lambda at every interface");
        const double lam = *itf.lambda;
        const double d_minus = coeff_at(spec, itf.x, Side::left).diffusion;
        const double d_plus = coeff_at(spec, itf.x, Side::right).diffusion;
        return d_plus * (1.0 - lam) / (d_minus * lam);
    };

    out.anchor_piece = *anchor + 1;
    for (std::size_t p = out.anchor_piece + 1; p < n_pieces; ++p) out.phi[p] = out.phi[p - 1] * ratio(p - 1);
    for (std::size_t p = out.anchor_piece; p-- > 0;) out.phi[p] = out.phi[p + 1] / ratio(p);
    return out;
}

Medium::Medium(MediumSpec spec) {
    const auto report = validate_model(spec);
    if (!report.ok()) throw ConfigError("invalid medium: " + report.summary());
    spec_ = derive_lambdas(std::move(spec));
    phi_ = phi_sequence(spec_);
    capacity_continuous_ = report.capacity_continuous;
}

std::vector<double> Medium::interface_positions() const {
    std::vector<double> xs;
    xs.reserve(spec_.interfaces.size());
    for (const auto& itf : spec_.interfaces) xs.push_back(itf.x);
    return xs;
}

double Medium::beta_ratio(std::size_t j) const {
    const auto& itf = spec_.interfaces.at(j);
    if (itf.beta_plus && itf.beta_minus) return *itf.beta_plus / *itf.beta_minus;
    const double lam = *itf.lambda;
    return spec_.pieces[j + 1].diffusion(itf.x) * (1.0 - lam) / (spec_.pieces[j].diffusion(itf.x) * lam);
}

std::size_t Medium::piece_index(double x, Side side) const {
    const auto& ifs = spec_.interfaces;
    auto pos_less = [](const Interface& itf, double v) { return itf.x < v; };
    auto it = side == Side::left
                  ? std::lower_bound(ifs.begin(), ifs.end(), x, pos_less)
                  : std::upper_bound(ifs.begin(), ifs.end(), x,
                                     [](double v, const Interface& itf) { return v < itf.x; });
    return static_cast<std::size_t>(it - ifs.begin());
}

std::optional<std::size_t> Medium::interface_at(double x) const {
    const auto& ifs = spec_.interfaces;
    auto it = std::lower_bound(ifs.begin(), ifs.end(), x,
                               [](const Interface& itf, double v) { return itf.x < v; });
    if (it != ifs.end() && it->x == x) return static_cast<std::size_t>(it - ifs.begin());
    return std::nullopt;
}

CoefficientPair Medium::coeff(double x, Side side) const {
    if (!contains(x)) return coeff_at(spec_, x, side);  // throws DomainError
    const auto& p = spec_.pieces[piece_index(x, side)];
    return {p.diffusion(x), p.capacity(x)};
}

MediumSpec piecewise_constant_spec(Window window, Bounds bounds, std::vector<Interface> interfaces,
                                   const std::vector<double>& diffusion, const std::vector<double>& capacity) {
    if (diffusion.size() != interfaces.size() + 1 || capacity.size() != interfaces.size() + 1) {
        throw UsageError("piecewise_constant_spec: need one D and one eta value per piece");
    }
    MediumSpec spec;
    spec.window = window;
    spec.bounds = bounds;
    for (std::size_t i = 0; i < diffusion.size(); ++i) {
        Piece p;
        p.left = i == 0 ? window.lo : interfaces[i - 1].x;
        p.right = i == interfaces.size() ? window.hi : interfaces[i].x;
        p.diffusion = Cubic::constant(diffusion[i]);
        p.capacity = Cubic::constant(capacity[i]);
        spec.pieces.push_back(p);
    }
    spec.interfaces = std::move(interfaces);
    return spec;
}

}  // namespace skewlab
