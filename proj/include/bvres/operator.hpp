#pragma once

#include <complex>
#include <stdexcept>

#include "bvres/grid.hpp"
#include "bvres/spec.hpp"

namespace bvres {

// Coefficient polynomials valid on one open piece between breakpoints.
struct LocalCoeffs {
    Poly alpha, beta, b, V;
};
LocalCoeffs local_coeffs(const CoefficientSpec& spec, double x_inside);

// Quasi-derivative h^2 alpha u' + i h b u at every node.
std::vector<cd> flux(const GridFunction& u, const CoefficientSpec& spec);

// q(u, v), antilinear in u.
cd quadratic_form(const GridFunction& u, const GridFunction& v, const CoefficientSpec& spec);

class NotInDomain : public std::runtime_error {
public:
    NotInDomain(double residue, double location);
    double residue;
    double location;
};

struct OperatorImage {
    std::vector<cd> values; // absolutely continuous part at the grid nodes
    double max_atomic_residue = 0.0;
    double worst_location = 0.0;
};

// (P u) for u in the domain. Throws NotInDomain when the atomic part at some
// panel boundary exceeds tol * (1 + |u|_sup).
OperatorImage apply_operator(const GridFunction& u, const CoefficientSpec& spec, double tol = 1e-8);
// Same computation without the domain check.
OperatorImage apply_operator_unchecked(const GridFunction& u, const CoefficientSpec& spec);

// <f, g> in L^2(beta^{-1} dx), antilinear in f.
cd weighted_inner(const std::vector<cd>& f, const std::vector<cd>& g, const Grid& grid, const CoefficientSpec& spec);

struct FormBound {
    double c_mass;
    double c_grad;
};

// q(u,u) >= -c_mass |u|^2 + c_grad |u'|^2.
FormBound form_lower_bound(const CoefficientSpec& spec);

// Required jump of h^2 alpha u' + i h b u across the V0 atom at x.
cd jump_rule(const CoefficientSpec& spec, double atom_location, cd u_value);

} // namespace bvres
