#include "bvres/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bvres {

namespace {
const cd I(0.0, 1.0);

void require_inside(const CoefficientSpec& spec, const Grid& g) {
    for (const Atom& a : spec.V0.atoms)
        if (a.x <= g.left() || a.x >= g.right()) throw std::invalid_argument("V0 atom outside the grid");
}
} // namespace

LocalCoeffs local_coeffs(const CoefficientSpec& spec, double x) {
    return {spec.alpha.piece_at(x), spec.beta.piece_at(x), spec.b0.piece_at(x) + spec.b1.piece_at(x),
            spec.V1.piece_at(x) + spec.V0.density.piece_at(x)};
}

std::vector<cd> flux(const GridFunction& u, const CoefficientSpec& spec) {
    const Grid& g = *u.grid;
    const double h = spec.h;
    std::vector<cd> p(g.size());
    for (std::size_t s = 0; s < g.num_segments(); ++s) {
        LocalCoeffs c = local_coeffs(spec, g.segments()[s].mid());
        for (int j = 0; j < g.n(); ++j) {
            double x = g.x(s, j);
            std::size_t k = g.index(s, j);
            p[k] = h * h * c.alpha(x) * u.du[k] + I * h * c.b(x) * u.u[k];
        }
    }
    return p;
}

cd quadratic_form(const GridFunction& u, const GridFunction& v, const CoefficientSpec& spec) {
    if (u.grid != v.grid && (u.grid->size() != v.grid->size() || u.grid->nodes() != v.grid->nodes()))
        throw std::invalid_argument("quadratic_form: mismatched grids");
    const Grid& g = *u.grid;
    require_inside(spec, g);
    const double h = spec.h;
    cd q = 0.0;
    for (std::size_t s = 0; s < g.num_segments(); ++s) {
        LocalCoeffs c = local_coeffs(spec, g.segments()[s].mid());
        for (int j = 0; j < g.n(); ++j) {
            double x = g.x(s, j), w = g.weight(s, j);
            std::size_t k = g.index(s, j);
            cd ub = std::conj(u.u[k]), dub = std::conj(u.du[k]);
            q += w * (h * h * c.alpha(x) * dub * v.du[k] + I * h * c.b(x) * (dub * v.u[k] - ub * v.du[k]) +
                      ub * v.u[k] * c.V(x) / c.beta(x));
        }
    }
    for (const Atom& a : spec.V0.atoms) q += a.mass * std::conj(u.value_at(a.x)) * v.value_at(a.x) / spec.beta(a.x);
    return q;
}

NotInDomain::NotInDomain(double r, double x)
    : std::runtime_error("function not in the operator domain: atomic residue " + std::to_string(r) + " at x = " +
                         std::to_string(x)),
      residue(r), location(x) {}

OperatorImage apply_operator_unchecked(const GridFunction& u, const CoefficientSpec& spec) {
    const Grid& g = *u.grid;
    require_inside(spec, g);
    const double h = spec.h;
    std::vector<cd> p = flux(u, spec);
    std::vector<cd> dp = differentiate(g, p);
    OperatorImage out;
    out.values.resize(g.size());
    for (std::size_t s = 0; s < g.num_segments(); ++s) {
        LocalCoeffs c = local_coeffs(spec, g.segments()[s].mid());
        for (int j = 0; j < g.n(); ++j) {
            double x = g.x(s, j);
            std::size_t k = g.index(s, j);
            double al = c.alpha(x), be = c.beta(x), bb = c.b(x);
            out.values[k] = be * (-dp[k] - I * bb * p[k] / (h * al) - bb * bb * u.u[k] / al) + c.V(x) * u.u[k];
        }
    }
    // atomic part: beta^A (-(jump of p)) + mass * u at each panel boundary
    const int n = g.n();
    for (std::size_t s = 1; s < g.num_segments(); ++s) {
        double x = g.segments()[s].a;
        cd jump = p[g.index(s, 0)] - p[g.index(s - 1, n - 1)];
        cd uc = 0.5 * (u.u[g.index(s, 0)] + u.u[g.index(s - 1, n - 1)]);
        double m = spec.V0.atom_mass(x);
        double r = std::abs(spec.beta(x) * (m * uc / spec.beta(x) - jump));
        if (r > out.max_atomic_residue) {
            out.max_atomic_residue = r;
            out.worst_location = x;
        }
    }
    return out;
}

OperatorImage apply_operator(const GridFunction& u, const CoefficientSpec& spec, double tol) {
    OperatorImage out = apply_operator_unchecked(u, spec);
    if (out.max_atomic_residue > tol * (1.0 + u.sup_abs()))
        throw NotInDomain(out.max_atomic_residue, out.worst_location);
    return out;
}

cd weighted_inner(const std::vector<cd>& f, const std::vector<cd>& gv, const Grid& grid, const CoefficientSpec& spec) {
    cd s = 0.0;
    for (std::size_t seg = 0; seg < grid.num_segments(); ++seg) {
        Poly beta = spec.beta.piece_at(grid.segments()[seg].mid());
        for (int j = 0; j < grid.n(); ++j) {
            std::size_t k = grid.index(seg, j);
            double x = grid.x(seg, j);
            s += grid.weight(seg, j) * std::conj(f[k]) * gv[k] / beta(x);
        }
    }
    return s;
}

FormBound form_lower_bound(const CoefficientSpec& spec) {
    const double h = spec.h, ia = spec.inf_alpha(), ib = spec.inf_beta();
    // |V0| enters through beta^{-1} V0; the extra inf beta only matters when beta is not 1
    double v0 = spec.V0_norm() / std::min(1.0, ib);
    double b0 = spec.b0_l2(), b1 = spec.b1_sup();
    double c = v0 * v0 / (h * h * ia) + 864.0 * std::pow(b0, 4) / (h * h * ia * ia * ia) + 4.0 * b1 * b1 / ia;
    // negative part of V1 / beta, absent from the pure-measure bound
    double neg = std::max(0.0, -spec.V1.inf()) / ib;
    return {c + neg, h * h * ia / 2.0};
}

cd jump_rule(const CoefficientSpec& spec, double x, cd u_value) {
    double m = spec.V0.atom_mass(x);
    bool found = std::any_of(spec.V0.atoms.begin(), spec.V0.atoms.end(), [x](const Atom& a) { return a.x == x; });
    if (!found) throw std::invalid_argument("jump_rule: no V0 atom at the given location");
    return m * u_value / spec.beta(x);
}

} // namespace bvres
