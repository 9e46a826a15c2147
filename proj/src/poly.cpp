#include "bvres/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

namespace bvres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_at_infinity(const Poly& p, bool positive_side) {
    if (p.is_zero()) return 0.0;
    double lead = p.coeffs().back();
    if (p.degree() == 0) return lead;
    bool odd = p.degree() % 2 == 1;
    double s = (positive_side || !odd) ? lead : -lead;
    return s > 0 ? kInf : -kInf;
}

double refine_root(const Poly& p, double lo, double hi, double plo, double phi) {
    boost::uintmax_t iters = 200;
    auto f = [&p](double x) { return p(x); };
    auto r = boost::math::tools::toms748_solve(f, lo, hi, plo, phi,
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

std::vector<double> roots_finite(const Poly& p, double a, double b) {
    std::vector<double> out;
    int d = p.degree();
    if (d <= 0) return out;
    if (d == 1) {
        double x = -p.coeff(0) / p.coeff(1);
        if (x >= a && x <= b) out.push_back(x);
        return out;
    }
    std::vector<double> pts{a};
    for (double c : roots_finite(p.derivative(), a, b))
        if (c > a && c < b) pts.push_back(c);
    pts.push_back(b);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double l = pts[i], r = pts[i + 1];
        double pl = p(l), pr = p(r);
        if (pl == 0.0) {
            out.push_back(l);
            continue;
        }
        if (pr == 0.0) continue; // picked up as the next left endpoint or below
        if ((pl < 0) != (pr < 0)) out.push_back(refine_root(p, l, r, pl, pr));
    }
    if (p(b) == 0.0) out.push_back(b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

Poly Poly::monomial(int degree, double coeff) {
    std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
    c.back() = coeff;
    return Poly(std::move(c));
}

void Poly::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Poly::operator()(double x) const {
    double r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return Poly(std::move(d));
}

Poly Poly::antiderivative() const {
    if (c_.empty()) return Poly();
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<double>(i + 1);
    return Poly(std::move(a));
}

double Poly::integral(double a, double b) const {
    // Evaluate the antiderivative in coordinates centred on a to limit cancellation.
    Poly s = shifted(a).antiderivative();
    return s(b - a);
}

Poly Poly::operator-() const {
    std::vector<double> c = c_;
    for (double& v : c) v = -v;
    return Poly(std::move(c));
}

Poly operator+(const Poly& a, const Poly& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.c_.empty() || b.c_.empty()) return Poly();
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
}

Poly operator*(double s, const Poly& a) {
    std::vector<double> c = a.c_;
    for (double& v : c) v *= s;
    return Poly(std::move(c));
}

Poly Poly::shifted(double shift) const {
    // Horner on polynomials: p(y + shift)
    Poly lin(std::vector<double>{shift, 1.0});
    Poly r;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * lin + Poly(*it);
    return r;
}

double Poly::root_bound() const {
    if (c_.size() <= 1) return 0.0;
    double lead = std::abs(c_.back());
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < c_.size(); ++i) m = std::max(m, std::abs(c_[i]) / lead);
    return 1.0 + m;
}

std::vector<double> real_roots(const Poly& p, double a, double b) {
    if (p.degree() <= 0 || a > b) return {};
    double bound = p.root_bound() + 1.0;
    double lo = std::isinf(a) ? -bound : a;
    double hi = std::isinf(b) ? bound : b;
    if (lo > hi) return {};
    return roots_finite(p, lo, hi);
}

namespace {

double extreme(const Poly& p, double a, double b, bool want_min) {
    std::vector<double> vals;
    if (std::isinf(a)) vals.push_back(sign_at_infinity(p, false));
    else vals.push_back(p(a));
    if (std::isinf(b)) vals.push_back(sign_at_infinity(p, true));
    else vals.push_back(p(b));
    for (double c : real_roots(p.derivative(), a, b)) vals.push_back(p(c));
    return want_min ? *std::min_element(vals.begin(), vals.end())
                    : *std::max_element(vals.begin(), vals.end());
}

double ratio_limit(const Poly& num, const Poly& den, bool positive_side) {
    if (num.is_zero()) return 0.0;
    int dn = num.degree(), dd = den.degree();
    double ln = num.coeffs().back(), ld = den.coeffs().back();
    if (dn < dd) return 0.0;
    if (dn == dd) return ln / ld;
    double s = ln / ld;
    if (!positive_side && (dn - dd) % 2 == 1) s = -s;
    return s > 0 ? kInf : -kInf;
}

} // namespace

double poly_min(const Poly& p, double a, double b) { return extreme(p, a, b, true); }
double poly_max(const Poly& p, double a, double b) { return extreme(p, a, b, false); }

double integrate_abs(const Poly& p, double a, double b) {
    if (p.is_zero() || !(b > a)) return 0.0;
    std::vector<double> pts{a};
    for (double r : real_roots(p, a, b))
        if (r > a && r < b) pts.push_back(r);
    pts.push_back(b);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += std::abs(p.integral(pts[i], pts[i + 1]));
    return s;
}

double rational_min(const Poly& num, const Poly& den, double a, double b) {
    std::vector<double> vals;
    vals.push_back(std::isinf(a) ? ratio_limit(num, den, false) : num(a) / den(a));
    vals.push_back(std::isinf(b) ? ratio_limit(num, den, true) : num(b) / den(b));
    Poly crit = num.derivative() * den - num * den.derivative();
    for (double c : real_roots(crit, a, b)) vals.push_back(num(c) / den(c));
    return *std::min_element(vals.begin(), vals.end());
}

double rational_variation(const Poly& num, const Poly& den, double a, double b) {
    if (!(b > a)) return 0.0;
    std::vector<double> pts{a};
    Poly crit = num.derivative() * den - num * den.derivative();
    for (double c : real_roots(crit, a, b))
        if (c > a && c < b) pts.push_back(c);
    pts.push_back(b);
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        tv += std::abs(num(pts[i + 1]) / den(pts[i + 1]) - num(pts[i]) / den(pts[i]));
    return tv;
}

} // namespace bvres
