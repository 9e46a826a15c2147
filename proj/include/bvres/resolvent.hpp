#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bvres/propagate.hpp"

namespace bvres {

class SingularMatching : public std::runtime_error {
public:
    SingularMatching(double condition);
    double condition;
};

// Right-hand side supported in [-radius, radius]; cuts are points where f
// may jump.
struct Source {
    std::function<cd(double)> f;
    double radius = 1.0;
    std::vector<double> cuts;
};

struct ResolveOptions {
    double box_radius = 0.0; // solve box [-R, R]; 0 picks support + 1
    int nodes = 24;
    double max_panel = 0.5;
    double panel_phase = 6.0;  // panel length <= panel_phase / |local wavenumber|
    bool outgoing = false;     // allow eps = 0 with the outgoing branch
    double singular_tol = 1e-13;
    std::vector<double> cuts;
    std::shared_ptr<const Grid> grid; // reuse a grid instead of building one
    // pick the exterior wavenumber with positive projection on this direction
    // instead of the decaying one (meromorphic continuation in lambda)
    std::optional<cd> root_hint;
};

struct SolutionField {
    std::shared_ptr<const Grid> grid;
    std::vector<cd> v;    // solution at the nodes
    std::vector<cd> flux; // h^2 alpha v' + i h b v
    std::vector<cd> dv;
    SpectralPoint point;
    double h = 1.0;
    cd k_left, k_right;       // exterior wavenumbers, Im >= 0
    cd rate_left, rate_right; // v = v(end) exp(rate (x - end)) outside the box
    double alpha_left = 1.0, alpha_right = 1.0;
    double residual = 0.0;           // relative sup residual on the grid
    double matching_condition = 1.0; // |W| / (|Y-| |Y+|)

    cd value(double x) const;
    GridFunction as_grid_function() const { return {grid, v, dv}; }
    // semiclassical quasi-derivative p = h alpha v' + i b v at the nodes
    std::vector<cd> quasi_derivative() const;
};

// Green's function of P - z on a fixed grid: two homogeneous solutions
// launched from the exterior, reused for many right-hand sides.
class ResolventKernel {
public:
    ResolventKernel(const CoefficientSpec& spec, SpectralPoint point, const ResolveOptions& opts = {});

    const std::shared_ptr<const Grid>& grid() const { return grid_; }
    const CoefficientSpec& spec() const { return spec_; }
    const SpectralPoint& point() const { return point_; }
    double matching_condition() const { return condition_; }

    // f at the grid nodes; one-sided values at panel ends
    SolutionField apply(const std::vector<cd>& f, bool with_residual = true) const;
    std::vector<cd> sample(const Source& s) const;
    // sup residual of (P - z) v - f relative to the size of the terms
    double residual(const SolutionField& field, const std::vector<cd>& f) const;

private:
    CoefficientSpec spec_;
    SpectralPoint point_;
    std::shared_ptr<const Grid> grid_;
    std::vector<State> left_, right_; // decaying to the left / to the right
    std::vector<cd> wronskian_;
    std::vector<double> beta_;
    cd kL_, kR_;
    TailCoeffs tl_, tr_;
    double condition_ = 1.0;
};

// Grid suitable for (spec, z) on [-R, R] with the given cut points.
std::shared_ptr<const Grid> resolvent_grid(const CoefficientSpec& spec, cd z, double R, std::vector<double> cuts,
                                           const ResolveOptions& opts);

SolutionField solve(const CoefficientSpec& spec, const SpectralPoint& point, const Source& f,
                    const ResolveOptions& opts = {});

// sqrt of the integral of <x>^{-2s} (|v|^2 + |p|^2) over R, or over |x| > R
// when an exterior cutoff is given. Tails beyond the box use the exact
// exponential form of the solution.
double weighted_norm(const SolutionField& field, double s, std::optional<double> exterior_cutoff = std::nullopt);

// Integral over [from, inf) of <x>^{-2s} exp(-2 decay (x - from)), and its mirror.
double tail_integral(double from, double decay, double s, bool rightward);

struct WeightPair {
    std::function<double(double)> in;  // applied to the source
    std::function<double(double)> out; // applied to the solution
    std::vector<double> cuts;

    static WeightPair japanese(double s);
    // 1_{|x| > R} <x>^{-s} on both sides
    static WeightPair exterior(double s, double R);
};

struct NormEstimate {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> lower_history; // nondecreasing
    int iterations = 0;
    bool converged = false;
    double truncation = 0.0; // probes and outputs restricted to |x| <= truncation
};

// Norm of out * (P - z)^{-1} * in on L^2(|x| <= truncation) by block subspace
// iteration on T*T, with T* from the conjugate spectral point.
NormEstimate opnorm_estimate(const CoefficientSpec& spec, const SpectralPoint& point, const WeightPair& weights,
                             int probes, int iters, double truncation, std::uint64_t seed = 1,
                             const ResolveOptions& opts = {}, double target_gap = 0.01);

struct SweepRow {
    double h = 0.0;
    NormEstimate exterior;
    NormEstimate full;
    double h_times_exterior = 0.0;
    double h_log_full = 0.0;
    std::string error;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct NormReport {
    double s = 1.0;
    double E = 0.0, eps = 0.0;
    double exterior_radius = 0.0;
    double truncation = 0.0;
    std::vector<SweepRow> rows;
    LineFit exterior_growth; // log(ext norm) against log(1/h)
    LineFit full_growth;     // log(full norm) against 1/h
};

struct SweepOptions {
    double exterior_radius = 1.0;
    double truncation = 20.0;
    int probes = 4;
    int iters = 40;
    bool exterior = true;
    bool full = true;
    std::uint64_t seed = 1;
    ResolveOptions resolve;
};

NormReport lap_sweep(const CoefficientSpec& spec, double s, const std::vector<double>& h_grid, double E, double eps,
                     const SweepOptions& opts = {});

} // namespace bvres
