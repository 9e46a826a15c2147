#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bvres/resolvent.hpp"

namespace bvres {

// Complex number stored as mantissa * exp(log_scale) with |mantissa| = 1
// (or 0), for values that overflow double.
struct ScaledValue {
    cd mantissa;
    double log_scale = 0.0;

    cd value() const;
    double log_abs() const;
};

// C^2 bump: 1 on |x| <= inner, quintic smoothstep down to 0 at |x| = outer.
struct Cutoff {
    double inner = 1.0;
    double outer = 2.0;

    double operator()(double x) const;
    double derivative(double x) const;
};

// Radius R with every coefficient feature and atom strictly inside [-R, R].
double matching_radius(const CoefficientSpec& H);
Cutoff default_cutoff(const CoefficientSpec& H);

// Wronskian of the outgoing solutions (value 1 at +-R) at x = 0, divided by
// its free value, so that D = 1 for the free operator. Zeros are the
// resonances. Requires a compactly supported spec and lambda != 0.
ScaledValue determinant_scaled(const CoefficientSpec& H, cd lambda);
cd determinant(const CoefficientSpec& H, cd lambda);

struct Rect {
    double re_lo, re_hi, im_lo, im_hi;
    bool contains(cd z) const { return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo && z.imag() <= im_hi; }
};

class ZeroOnContour : public std::runtime_error {
public:
    explicit ZeroOnContour(cd at);
    cd at;
};

// Number of zeros of D inside r by the argument principle on the boundary.
int winding_number(const CoefficientSpec& H, const Rect& r);

struct ResonanceZero {
    cd lambda;
    int multiplicity = 1;
    double residual = 0.0; // |D| at the refined point
};

struct NormRow {
    cd lambda;
    int k1 = 0, k2 = 0;  // H^k1 -> H^k2
    double norm = 0.0;
    double refinement_change = 0.0; // relative change under a finer grid
    bool accepted = false;
};

struct ResonanceReport {
    std::vector<ResonanceZero> zeros;
    std::vector<Rect> verified;                    // winding 0
    std::vector<std::pair<Rect, int>> unresolved; // cluster or inconsistent subdivision
    bool strip_certified = false;
    double lambda0 = 0.0, re_max = 0.0, theta0 = 0.0;
    std::vector<NormRow> norm_rows;
};

// Zeros of D in the rectangle (which must not contain 0) by adaptive
// subdivision and Newton refinement to |D| <= tol.
ResonanceReport find_resonances(const CoefficientSpec& H, const Rect& rect, double tol = 1e-10,
                                double min_size = 1e-3);

// Refine a zero of D from a starting guess.
std::optional<cd> newton_zero(const CoefficientSpec& H, cd guess, int max_iter = 60);

// |chi (H - lambda^2)^{-1} chi| from H^k1 to H^k2 (k in {0, 1}) on discrete
// Sobolev spaces over the cutoff support, continued to Im lambda < 0.
// Returns the four rows for (k1, k2) in {0,1}^2.
std::vector<NormRow> cutoff_resolvent_norms(const CoefficientSpec& H, cd lambda, const Cutoff& chi,
                                            int nodes = 24);

// Largest theta on the grid with no zero in lambda0 <= |Re lambda| <= re_max,
// |Im lambda| <= theta; norm rows at `samples` log-spaced Re lambda on
// Im lambda = 0 and -theta0. Zeros found inside a failing strip are attached.
ResonanceReport strip_certificate(const CoefficientSpec& H, double lambda0, double re_max,
                                  std::vector<double> theta_grid, int samples = 6);

// slope of log norm against log Re lambda for one (k1, k2) variant on one
// Im lambda line, using rows with Re lambda >= re_min
LineFit norm_exponent(const std::vector<NormRow>& rows, int k1, int k2, double im, double re_min = 0.0);

struct ZeroResonanceReport {
    bool has_zero_resonance = false;
    bool inconclusive = false;
    double margin = 0.0;        // extrapolated Wronskian angle at 0
    double direct_margin = 0.0; // with constant exterior solutions at lambda = 0
    std::vector<double> ray_margins; // |lambda| = 1e-2, 1e-3, 1e-4 per ray
};

// Threshold behaviour from the angle between the solutions bounded at -inf
// and +inf: zero angle means a bounded solution of H u = 0.
ZeroResonanceReport zero_resonance_test(const CoefficientSpec& H, double threshold = 1e-6);

// Weighted a-priori chain for V = M 1_[-1,1], b = 1_[-1,1] on solutions of
// (H - i eps) u = (|x|+1)^{-(3+delta)/2} f with random f. Certifies absence
// of a zero resonance when M >= 5/2 and every sampled line holds.
struct BarrierChainReport {
    double M = 0.0;
    double M_required = 2.5;
    int samples = 0;
    int violations = 0;
    double worst_slack = 0.0; // min over samples and lines of (rhs - lhs) / rhs
    bool certified = false;
};
BarrierChainReport barrier_chain_check(double M, double eps, double delta, int samples, std::uint64_t seed);

} // namespace bvres
