#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bvres/resolvent.hpp"

namespace bvres {

class HypothesisFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Odd phase derivative: k on (0, R1], quintic smoothstep down to 0 on
// (R1, 2R1], zero beyond. phi is even with phi(0) = 0.
struct PhaseSpec {
    double R1 = 0.0;
    double k = 0.0;
    double grid_step = 0.0; // resolution of the k search that produced it

    double dphi(double x) const;
    double phi(double x) const;
    double sup_phi() const { return 1.5 * k * R1; }
    PiecewiseBV dphi_bv() const;
    std::vector<double> breakpoints() const;
};

// inf over x of (alpha (E - V1) + beta (alpha^2 phi'^2 + b1^2)) / beta.
double compute_tau(const CoefficientSpec& spec, const PhaseSpec& phase, double E);

// inf over |x| >= R1 of (alpha (E - V1) + beta b1^2) / beta.
double exterior_infimum(const CoefficientSpec& spec, double E, double R1);

// Smallest k on a 64-per-decade grid with compute_tau >= tau_target
// (default: half the exterior infimum). Throws HypothesisFailure when the
// exterior infimum is not positive.
PhaseSpec choose_phase_slope(const CoefficientSpec& spec, double E, double R1, double tau_target = -1.0);

// |num/den| summed over terms, per piece.
struct RationalTerm {
    Poly num;
    Poly den;
};

class PositiveDensity {
public:
    PositiveDensity() : pieces_(1) {}
    PositiveDensity(std::vector<double> bp, std::vector<std::vector<RationalTerm>> pieces);

    const std::vector<double>& breakpoints() const { return bp_; }
    double operator()(double x) const;
    // integral over [a, b] (a < b, finite)
    double integral(double a, double b) const;
    double total() const; // infinite unless the tails vanish
    bool polynomial() const;
    // exact piecewise polynomial form (requires polynomial())
    PiecewiseBV to_bv() const;

    void add(const PiecewiseBV& num, const PiecewiseBV& den, double scale = 1.0);

private:
    std::vector<double> bp_;
    std::vector<std::vector<RationalTerm>> pieces_;
};

// The nonnegative remainder measure of the weighted energy argument.
struct RemainderMeasure {
    PositiveDensity density;
    std::vector<Atom> atoms; // masses > 0, sorted

    double atom_mass(double x) const;
    double total() const;
    SignedMeasure to_signed_measure() const;
};

RemainderMeasure build_mu(const CoefficientSpec& spec, const PhaseSpec& phase, double E);

struct CarlemanWeight {
    double tau = 0.0;
    double kappa = 0.0;
    double s = 1.0;
    double M = 0.0;
    RemainderMeasure mu;
    std::vector<Atom> atoms; // atoms of mu away from 0
    std::vector<double> W, gamma, Gamma;
    double mu_c_total = 0.0;

    double q1(double x, double eta) const;
    double q2(double x) const;
    double q2_max() const;
    double w(double x, double eta) const;
    // density of dw (dw has no atoms)
    double dw(double x, double eta) const;
    // eta -> 0 limit of |w(x_j)|
    double limit_at_atom(std::size_t j) const;
    // eta -> 0 limit of |w(x_j + eta y)|
    double limit_near_atom(std::size_t j, double y) const;
    // log of exp(mu_c(R) + sum W)(exp(q2_max) - 1) >= sup |w|; past an atom
    // the regularized step has its full height W_j
    double log_Cw() const;
    double min_atom_gap() const;
};

CarlemanWeight build_weight(const CoefficientSpec& spec, const PhaseSpec& phase, double E, double s);

// Both left-hand sides of the per-atom conditions with W = M mu_j,
// gamma = exp(-W/4). Large values saturate at +-inf.
std::vector<std::pair<double, double>> check_atom_inequalities(const CarlemanWeight& weight);
std::pair<double, double> atom_inequalities(double tau, double M, double mu);

struct EstimateSides {
    double lhs = 0.0;
    double rhs_f = 0.0;
    double rhs_eps = 0.0;
};

// lhs = int <x>^{-2s}(|e^{phi/h} v|^2 + |(h alpha d + i b) e^{phi/h} v|^2),
// rhs_f = int <x>^{2s} |g|^2 with g = (P - z) v at the nodes, rhs_eps = |eps| |v|^2.
EstimateSides evaluate_estimate(const CoefficientSpec& spec, const PhaseSpec& phase, double s,
                                const SolutionField& v, const std::vector<cd>& g);

// Solves v = (P - z)^{-1} <x>^{-s} f on a box holding the phase support and
// evaluates both sides.
EstimateSides evaluate_estimate(const CoefficientSpec& spec, const PhaseSpec& phase, const SpectralPoint& point,
                                double s, const Source& f, ResolveOptions opts = {});

struct Factor {
    std::string name;
    double value;
    std::string source;
};

struct ConstantReport {
    double log_C = 0.0; // C(h) can exceed the double range
    std::vector<Factor> factors;
    double C() const;
};

ConstantReport constant_report(const CoefficientSpec& spec, const PhaseSpec& phase, const CarlemanWeight& weight,
                               const SpectralPoint& point);

} // namespace bvres
