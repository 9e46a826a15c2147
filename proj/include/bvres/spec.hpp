#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bvres/bv.hpp"

namespace bvres {

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Coefficients of  beta (-h^2 d alpha d + h b D + h D b) + V  with
// b = b0 + b1 and V = V0 + V1, V0 a measure.
struct CoefficientSpec {
    double h = 1.0;
    PiecewiseBV alpha = PiecewiseBV::constant(1.0);
    PiecewiseBV beta = PiecewiseBV::constant(1.0);
    PiecewiseBV b0;
    PiecewiseBV b1;
    PiecewiseBV V1;
    SignedMeasure V0;
    std::optional<double> R0;

    PiecewiseBV b() const { return b0 + b1; }
    // V1 plus the density part of V0
    PiecewiseBV V_density() const { return V1 + V0.density; }

    // Every breakpoint of every coefficient and every atom location.
    std::vector<double> breakpoints() const;

    double inf_alpha() const { return alpha.inf(); }
    double inf_beta() const { return beta.inf(); }
    double V0_norm() const { return V0.total_variation(); }
    double b0_l1() const { return b0.lp_norm(1); }
    double b0_l2() const { return b0.lp_norm(2); }
    double b1_sup() const { return b1.sup_abs(); }

    // Throws SpecError naming the violated condition.
    void validate() const;

    // b and V vanish outside a bounded set and alpha, beta have equal
    // constant values in both tails.
    bool compactly_supported() const;
    // smallest R with all non-constant behaviour inside [-R, R]
    double support_radius() const;
};

// Energy and absorption for a resolvent (P - E - i eps)^{-1}. When built from
// lambda, E and eps come from the semiclassical rescaling.
struct SpectralPoint {
    double E = 0.0;
    double eps = 0.0;
    std::optional<std::complex<double>> lambda;

    std::complex<double> z() const { return {E, eps}; }
};

struct RescaledProblem {
    CoefficientSpec spec;
    SpectralPoint point;
};

// h = 1/|Re lambda|, V -> h^2 V, b -> h b, so that
// spec operator - z = h^2 (H - lambda^2).
RescaledProblem rescale(const CoefficientSpec& H, std::complex<double> lambda);

} // namespace bvres
