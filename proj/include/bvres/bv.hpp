#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "bvres/poly.hpp"

namespace bvres {

// Piecewise polynomial function on the real line. pieces()[i] lives on
// (bp[i-1], bp[i]); the first and last pieces are the unbounded tails.
// At a breakpoint the left/right limits come from the adjacent pieces and
// the point value is their average.
class PiecewiseBV {
public:
    PiecewiseBV() : pieces_{Poly()} {}
    explicit PiecewiseBV(Poly p) : pieces_{std::move(p)} {}
    PiecewiseBV(std::vector<double> breakpoints, std::vector<Poly> pieces);

    static PiecewiseBV constant(double c) { return PiecewiseBV(Poly(c)); }
    // value on (a, b), zero elsewhere; a or b may be infinite
    static PiecewiseBV indicator(double a, double b, double value = 1.0);
    static PiecewiseBV heaviside(double x0, double left = 0.0, double right = 1.0);

    const std::vector<double>& breakpoints() const { return bp_; }
    const std::vector<Poly>& pieces() const { return pieces_; }

    // index of the piece containing x (x not a breakpoint), or of the piece
    // immediately right of x when x is a breakpoint
    std::size_t piece_index(double x) const;
    const Poly& piece_at(double x) const { return pieces_[piece_index(x)]; }

    double left(double x) const;
    double right(double x) const;
    double average(double x) const { return 0.5 * (left(x) + right(x)); }
    double operator()(double x) const { return average(x); }

    // Both tails constant: total variation and sup norm finite.
    bool tails_constant() const;
    double inf() const;
    double sup() const;
    double sup_abs() const;
    double total_variation() const;
    // integral of |f|^p over R for p = 1, 2 (infinite unless the tails vanish)
    double lp_norm(int p) const;
    bool is_constant() const { return bp_.empty() && pieces_[0].is_constant(); }
    int max_degree() const;

    PiecewiseBV operator-() const;
    friend PiecewiseBV operator+(const PiecewiseBV& a, const PiecewiseBV& b);
    friend PiecewiseBV operator-(const PiecewiseBV& a, const PiecewiseBV& b);
    friend PiecewiseBV operator*(const PiecewiseBV& a, const PiecewiseBV& b);
    friend PiecewiseBV operator*(double s, const PiecewiseBV& a);

    // Same function on a finer breakpoint set (must contain the current one).
    PiecewiseBV refined(const std::vector<double>& breakpoints) const;
    // Drop breakpoints where both sides carry the same polynomial.
    PiecewiseBV simplified() const;

private:
    std::vector<double> bp_;
    std::vector<Poly> pieces_;
};

std::vector<double> merge_breakpoints(const std::vector<double>& a, const std::vector<double>& b);

// Pointwise combination on the common refinement.
PiecewiseBV combine(const PiecewiseBV& a, const PiecewiseBV& b,
                    const std::function<Poly(const Poly&, const Poly&)>& op);

struct Atom {
    double x;
    double mass;
};

// Absolutely continuous density plus finitely many point masses.
struct SignedMeasure {
    PiecewiseBV density;
    std::vector<Atom> atoms; // sorted by location, locations distinct

    SignedMeasure() = default;
    SignedMeasure(PiecewiseBV d, std::vector<Atom> a);

    static SignedMeasure dirac(double x, double mass = 1.0) { return {PiecewiseBV(), {{x, mass}}}; }

    double atom_mass(double x) const;
    // |mu|(R); infinite unless the density tails vanish
    double total_variation() const;
    bool has_atoms() const { return !atoms.empty(); }

    SignedMeasure operator-() const;
    friend SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b);
    friend SignedMeasure operator-(const SignedMeasure& a, const SignedMeasure& b);
    friend SignedMeasure operator*(double s, const SignedMeasure& a);
};

// Atoms with equal locations merged, zero masses dropped, sorted.
std::vector<Atom> normalize_atoms(std::vector<Atom> atoms);

SignedMeasure derivative_measure(const PiecewiseBV& f);

enum class Closure { HalfOpen, Open }; // (a, b] or (a, b)

double integrate(const SignedMeasure& mu, double a, double b, Closure closure = Closure::HalfOpen);

// g^A * mu: density times g, atom masses times the average value of g.
SignedMeasure multiply(const PiecewiseBV& g, const SignedMeasure& mu);

struct ProductRuleReport {
    SignedMeasure lhs;
    SignedMeasure rhs;
    double max_defect;
};

ProductRuleReport product_rule_check(const PiecewiseBV& f, const PiecewiseBV& g);

// Right-continuous primitive of mu anchored at `anchor`.
PiecewiseBV cumulative(const SignedMeasure& mu, double anchor);

} // namespace bvres
