#include "bvres/bv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bvres {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Representative point inside piece i of a breakpoint list.
double interior_point(const std::vector<double>& bp, std::size_t i) {
    if (bp.empty()) return 0.0;
    if (i == 0) return bp.front() - 1.0;
    if (i == bp.size()) return bp.back() + 1.0;
    return 0.5 * (bp[i - 1] + bp[i]);
}

double piece_lo(const std::vector<double>& bp, std::size_t i) { return i == 0 ? -kInf : bp[i - 1]; }
double piece_hi(const std::vector<double>& bp, std::size_t i) { return i == bp.size() ? kInf : bp[i]; }

} // namespace

PiecewiseBV::PiecewiseBV(std::vector<double> breakpoints, std::vector<Poly> pieces)
    : bp_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.size() != bp_.size() + 1)
        throw std::invalid_argument("piecewise function needs one more piece than breakpoints");
    for (std::size_t i = 1; i < bp_.size(); ++i)
        if (!(bp_[i] > bp_[i - 1])) throw std::invalid_argument("breakpoints must be strictly increasing");
    for (double x : bp_)
        if (!std::isfinite(x)) throw std::invalid_argument("breakpoints must be finite");
    for (const Poly& p : pieces_)
        for (double c : p.coeffs())
            if (!std::isfinite(c)) throw std::invalid_argument("polynomial coefficients must be finite");
}

PiecewiseBV PiecewiseBV::indicator(double a, double b, double value) {
    std::vector<double> bp;
    std::vector<Poly> pieces;
    if (std::isinf(a) && std::isinf(b)) return constant(value);
    if (std::isinf(a)) return PiecewiseBV({b}, {Poly(value), Poly()});
    if (std::isinf(b)) return PiecewiseBV({a}, {Poly(), Poly(value)});
    return PiecewiseBV({a, b}, {Poly(), Poly(value), Poly()});
}

PiecewiseBV PiecewiseBV::heaviside(double x0, double left, double right) {
    return PiecewiseBV({x0}, {Poly(left), Poly(right)});
}

std::size_t PiecewiseBV::piece_index(double x) const {
    return static_cast<std::size_t>(std::upper_bound(bp_.begin(), bp_.end(), x) - bp_.begin());
}

double PiecewiseBV::left(double x) const {
    auto it = std::lower_bound(bp_.begin(), bp_.end(), x);
    if (it != bp_.end() && *it == x) return pieces_[static_cast<std::size_t>(it - bp_.begin())](x);
    return piece_at(x)(x);
}

double PiecewiseBV::right(double x) const { return piece_at(x)(x); }

bool PiecewiseBV::tails_constant() const {
    return pieces_.front().is_constant() && pieces_.back().is_constant();
}

int PiecewiseBV::max_degree() const {
    int d = -1;
    for (const Poly& p : pieces_) d = std::max(d, p.degree());
    return d;
}

double PiecewiseBV::inf() const {
    double m = kInf;
    for (std::size_t i = 0; i < pieces_.size(); ++i)
        m = std::min(m, poly_min(pieces_[i], piece_lo(bp_, i), piece_hi(bp_, i)));
    return m;
}

double PiecewiseBV::sup() const {
    double m = -kInf;
    for (std::size_t i = 0; i < pieces_.size(); ++i)
        m = std::max(m, poly_max(pieces_[i], piece_lo(bp_, i), piece_hi(bp_, i)));
    return m;
}

double PiecewiseBV::sup_abs() const { return std::max(std::abs(inf()), std::abs(sup())); }

double PiecewiseBV::total_variation() const {
    if (!tails_constant()) return kInf;
    double tv = 0.0;
    for (std::size_t i = 1; i + 1 < pieces_.size(); ++i)
        tv += integrate_abs(pieces_[i].derivative(), bp_[i - 1], bp_[i]);
    for (double x : bp_) tv += std::abs(right(x) - left(x));
    return tv;
}

double PiecewiseBV::lp_norm(int p) const {
    if (!pieces_.front().is_zero() || !pieces_.back().is_zero()) return kInf;
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < pieces_.size(); ++i) {
        if (p == 1) s += integrate_abs(pieces_[i], bp_[i - 1], bp_[i]);
        else s += (pieces_[i] * pieces_[i]).integral(bp_[i - 1], bp_[i]);
    }
    return p == 1 ? s : std::sqrt(s);
}

PiecewiseBV PiecewiseBV::operator-() const {
    std::vector<Poly> p;
    for (const Poly& q : pieces_) p.push_back(-q);
    return PiecewiseBV(bp_, std::move(p));
}

std::vector<double> merge_breakpoints(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> m;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
}

PiecewiseBV PiecewiseBV::refined(const std::vector<double>& breakpoints) const {
    std::vector<Poly> p;
    p.reserve(breakpoints.size() + 1);
    for (std::size_t i = 0; i <= breakpoints.size(); ++i) p.push_back(piece_at(interior_point(breakpoints, i)));
    return PiecewiseBV(breakpoints, std::move(p));
}

PiecewiseBV PiecewiseBV::simplified() const {
    std::vector<double> bp;
    std::vector<Poly> p{pieces_[0]};
    for (std::size_t i = 0; i < bp_.size(); ++i) {
        if (pieces_[i + 1] == p.back()) continue;
        bp.push_back(bp_[i]);
        p.push_back(pieces_[i + 1]);
    }
    return PiecewiseBV(std::move(bp), std::move(p));
}

PiecewiseBV combine(const PiecewiseBV& a, const PiecewiseBV& b,
                    const std::function<Poly(const Poly&, const Poly&)>& op) {
    std::vector<double> bp = merge_breakpoints(a.breakpoints(), b.breakpoints());
    std::vector<Poly> p;
    p.reserve(bp.size() + 1);
    for (std::size_t i = 0; i <= bp.size(); ++i) {
        double x = interior_point(bp, i);
        p.push_back(op(a.piece_at(x), b.piece_at(x)));
    }
    return PiecewiseBV(std::move(bp), std::move(p));
}

PiecewiseBV operator+(const PiecewiseBV& a, const PiecewiseBV& b) {
    return combine(a, b, [](const Poly& p, const Poly& q) { return p + q; });
}
PiecewiseBV operator-(const PiecewiseBV& a, const PiecewiseBV& b) {
    return combine(a, b, [](const Poly& p, const Poly& q) { return p - q; });
}
PiecewiseBV operator*(const PiecewiseBV& a, const PiecewiseBV& b) {
    return combine(a, b, [](const Poly& p, const Poly& q) { return p * q; });
}
PiecewiseBV operator*(double s, const PiecewiseBV& a) {
    std::vector<Poly> p;
    for (const Poly& q : a.pieces()) p.push_back(s * q);
    return PiecewiseBV(a.breakpoints(), std::move(p));
}

std::vector<Atom> normalize_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
    std::vector<Atom> out;
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.x) || !std::isfinite(a.mass)) throw std::invalid_argument("atom must be finite");
        if (!out.empty() && out.back().x == a.x) out.back().mass += a.mass;
        else out.push_back(a);
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Atom& a) { return a.mass == 0.0; }), out.end());
    return out;
}

SignedMeasure::SignedMeasure(PiecewiseBV d, std::vector<Atom> a)
    : density(std::move(d)), atoms(normalize_atoms(std::move(a))) {}

double SignedMeasure::atom_mass(double x) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), x, [](const Atom& a, double v) { return a.x < v; });
    return (it != atoms.end() && it->x == x) ? it->mass : 0.0;
}

double SignedMeasure::total_variation() const {
    double s = density.lp_norm(1);
    for (const Atom& a : atoms) s += std::abs(a.mass);
    return s;
}

SignedMeasure SignedMeasure::operator-() const { return (-1.0) * (*this); }

SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b) {
    std::vector<Atom> at = a.atoms;
    at.insert(at.end(), b.atoms.begin(), b.atoms.end());
    return SignedMeasure(a.density + b.density, std::move(at));
}

SignedMeasure operator-(const SignedMeasure& a, const SignedMeasure& b) { return a + (-b); }

SignedMeasure operator*(double s, const SignedMeasure& a) {
    std::vector<Atom> at = a.atoms;
    for (Atom& x : at) x.mass *= s;
    return SignedMeasure(s * a.density, std::move(at));
}

SignedMeasure derivative_measure(const PiecewiseBV& f) {
    std::vector<Poly> d;
    for (const Poly& p : f.pieces()) d.push_back(p.derivative());
    std::vector<Atom> atoms;
    for (double x : f.breakpoints()) {
        double jump = f.right(x) - f.left(x);
        if (jump != 0.0) atoms.push_back({x, jump});
    }
    return SignedMeasure(PiecewiseBV(f.breakpoints(), std::move(d)), std::move(atoms));
}

double integrate(const SignedMeasure& mu, double a, double b, Closure closure) {
    if (!(a < b)) throw std::invalid_argument("integrate: invalid interval, need a < b");
    const auto& bp = mu.density.breakpoints();
    const auto& pieces = mu.density.pieces();
    double s = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        double lo = std::max(a, piece_lo(bp, i));
        double hi = std::min(b, piece_hi(bp, i));
        if (hi > lo) {
            if (std::isinf(lo) || std::isinf(hi)) {
                if (!pieces[i].is_zero()) return pieces[i](0.0) > 0 ? kInf : -kInf;
                continue;
            }
            s += pieces[i].integral(lo, hi);
        }
    }
    for (const Atom& at : mu.atoms) {
        bool inside = at.x > a && (closure == Closure::HalfOpen ? at.x <= b : at.x < b);
        if (inside) s += at.mass;
    }
    return s;
}

SignedMeasure multiply(const PiecewiseBV& g, const SignedMeasure& mu) {
    std::vector<Atom> at = mu.atoms;
    for (Atom& a : at) a.mass *= g.average(a.x);
    return SignedMeasure(g * mu.density, std::move(at));
}

ProductRuleReport product_rule_check(const PiecewiseBV& f, const PiecewiseBV& g) {
    SignedMeasure lhs = derivative_measure(f * g);
    SignedMeasure rhs = multiply(f, derivative_measure(g)) + multiply(g, derivative_measure(f));
    double defect = (lhs - rhs).total_variation();
    return {std::move(lhs), std::move(rhs), defect};
}

PiecewiseBV cumulative(const SignedMeasure& mu, double anchor) {
    std::vector<double> pts = mu.density.breakpoints();
    std::vector<double> ax;
    for (const Atom& a : mu.atoms) ax.push_back(a.x);
    pts = merge_breakpoints(pts, ax);

    // value of f_mu at a point c that is not an atom
    auto value_at = [&](double c) {
        if (c >= anchor) {
            double v = mu.atom_mass(anchor);
            if (c > anchor) v += integrate(mu, anchor, c, Closure::HalfOpen);
            return v;
        }
        return -integrate(mu, c, anchor, Closure::Open);
    };

    std::vector<Poly> pieces;
    for (std::size_t i = 0; i <= pts.size(); ++i) {
        double c = pts.empty() ? anchor : interior_point(pts, i);
        Poly prim = mu.density.piece_at(c).antiderivative();
        pieces.push_back(prim + Poly(value_at(c) - prim(c)));
    }
    return PiecewiseBV(std::move(pts), std::move(pieces));
}

} // namespace bvres
