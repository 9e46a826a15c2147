#include "bvres/spec.hpp"

#include <algorithm>
#include <cmath>

namespace bvres {

std::vector<double> CoefficientSpec::breakpoints() const {
    std::vector<double> all;
    for (const PiecewiseBV* f : {&alpha, &beta, &b0, &b1, &V1, &V0.density})
        all = merge_breakpoints(all, f->breakpoints());
    std::vector<double> ax;
    for (const Atom& a : V0.atoms) ax.push_back(a.x);
    return merge_breakpoints(all, ax);
}

void CoefficientSpec::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw SpecError("h must be positive and finite");
    if (!(inf_alpha() > 0.0)) throw SpecError("positivity violated: inf alpha must be > 0");
    if (!(inf_beta() > 0.0)) throw SpecError("positivity violated: inf beta must be > 0");
    auto bv = [](const PiecewiseBV& f, const char* name) {
        if (!std::isfinite(f.total_variation()))
            throw SpecError(std::string(name) + " must have bounded variation (constant tails)");
    };
    bv(alpha, "alpha");
    bv(beta, "beta");
    bv(b1, "b1");
    bv(V1, "V1");
    if (!std::isfinite(b0.lp_norm(1))) throw SpecError("b0 must be integrable (vanishing tails)");
    if (!std::isfinite(V0.total_variation())) throw SpecError("V0 must be a finite measure");
    if (R0) {
        double r = *R0;
        if (r < 0) throw SpecError("R0 must be nonnegative");
        auto inside = [r](const std::vector<double>& bp) {
            return bp.empty() || (bp.front() >= -r && bp.back() <= r);
        };
        if (!inside(b0.breakpoints())) throw SpecError("b0 must be supported in [-R0, R0]");
        if (!inside(V0.density.breakpoints())) throw SpecError("V0 must be supported in [-R0, R0]");
        for (const Atom& a : V0.atoms)
            if (std::abs(a.x) > r) throw SpecError("V0 must be supported in [-R0, R0]");
    }
}

bool CoefficientSpec::compactly_supported() const {
    auto zero_tails = [](const PiecewiseBV& f) { return f.pieces().front().is_zero() && f.pieces().back().is_zero(); };
    auto equal_tails = [](const PiecewiseBV& f) {
        return f.pieces().front().is_constant() && f.pieces().front() == f.pieces().back();
    };
    return zero_tails(b0) && zero_tails(b1) && zero_tails(V1) && zero_tails(V0.density) && equal_tails(alpha) &&
           equal_tails(beta);
}

double CoefficientSpec::support_radius() const {
    double r = 0.0;
    for (double x : breakpoints()) r = std::max(r, std::abs(x));
    if (R0) r = std::max(r, *R0);
    return r;
}

RescaledProblem rescale(const CoefficientSpec& H, std::complex<double> lambda) {
    if (lambda.real() == 0.0) throw SpecError("rescaling needs Re lambda != 0");
    double h = 1.0 / std::abs(lambda.real());
    double sgn = lambda.real() > 0 ? 1.0 : -1.0;
    RescaledProblem r{H, {}};
    r.spec.h = h;
    r.spec.b0 = h * H.b0;
    r.spec.b1 = h * H.b1;
    r.spec.V1 = (h * h) * H.V1;
    r.spec.V0 = (h * h) * H.V0;
    r.point.E = 1.0 - h * h * lambda.imag() * lambda.imag();
    r.point.eps = 2.0 * h * sgn * lambda.imag();
    r.point.lambda = lambda;
    return r;
}

} // namespace bvres
