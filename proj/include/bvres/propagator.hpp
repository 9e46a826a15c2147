#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "bvres/resonance.hpp"

namespace bvres {

// Samples of [R(l) - R(-l)] chi v on a fixed grid for l on composite
// Gauss-Legendre panels in (0, sqrt(Lambda)], R(l) = (H - l^2)^{-1} with the
// outgoing (l > 0) or incoming (l < 0) exterior condition. With tau = l^2
// the spectral density of H is J(tau) = [R(l) - R(-l)] / (2 pi i).
struct SpectralQuadrature {
    std::shared_ptr<const Grid> grid;
    Cutoff chi;
    double Lambda = 0.0;
    std::vector<double> lambda, weight; // nodes and weights in l
    std::vector<std::vector<cd>> jump;  // chi [R(l) - R(-l)] chi v at the grid nodes
    std::vector<cd> form;               // <chi v, J(l^2) chi v>_{beta^-1} per node
    double captured = 0.0;              // <chi v, 1_[0,Lambda](H) chi v> in L^2(beta^-1)
    double source_norm2 = 0.0;          // |chi v|^2 in L^2(beta^-1)
    double sup_beta = 1.0;

    // upper bound on |1_{> Lambda}(H) chi v| in L^2
    double tail_bound() const;
};

// 16 point panels of the given width in l; the first panel is graded
// geometrically toward 0.
SpectralQuadrature spectral_quadrature(const CoefficientSpec& H, const Cutoff& chi,
                                       const std::function<cd(double)>& v, double Lambda, double panel_width);

// min(0.25, phase / rate), rate = largest oscillation rate of the time factor in l
double panel_width(double rate, double phase = 10.0);

enum class WaveKind { Cosine, Sine };

struct EvolutionResult {
    std::vector<double> t;
    std::vector<double> norm;        // |chi U(t) 1_[0,Lambda](H) chi v|, fine quadrature
    std::vector<double> coarse_norm; // half the panels
    double max_rel_change = 0.0;     // relative to max(norm, 1e-6 max norm)
    bool refinement_needed = false;  // max_rel_change > 5%
    double tail_bound = 0.0;         // bound for the part above Lambda
    double captured_fraction = 0.0;
    std::vector<std::vector<cd>> fields; // filled when requested
    std::shared_ptr<const Grid> grid;
};

EvolutionResult schrodinger_evolve(const CoefficientSpec& H, const Cutoff& chi, const std::function<cd(double)>& v,
                                   const std::vector<double>& t_grid, double Lambda, bool keep_fields = false);

EvolutionResult wave_evolve(const CoefficientSpec& H, const Cutoff& chi, const std::function<cd(double)>& v,
                            const std::vector<double>& t_grid, double Lambda, WaveKind kind,
                            bool keep_fields = false);

// sum over the grid of |samples|^2 dt (trapezoid) up to each T
double time_integral(const std::vector<double>& t, const std::vector<double>& norm, double T);

struct DecayFit {
    double rate = 0.0;
    double r_squared = 0.0;
    int used = 0;
    int excluded = 0; // nonpositive samples in the window
};

// least squares fit of log(sample) against t on [t_lo, t_hi]; rate = -slope
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& samples, double t_lo, double t_hi);

} // namespace bvres
