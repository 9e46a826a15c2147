#pragma once

#include <vector>

namespace bvres {

// Real polynomial in the global variable x, coefficients in increasing degree.
class Poly {
public:
    Poly() = default;
    Poly(double c) : c_{c} { trim(); }
    explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly monomial(int degree, double coeff = 1.0);

    // -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    const std::vector<double>& coeffs() const { return c_; }
    double coeff(int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }

    double operator()(double x) const;
    Poly derivative() const;
    // Antiderivative vanishing at x = 0.
    Poly antiderivative() const;
    double integral(double a, double b) const;

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(double s, const Poly& a);
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

    // p(x + shift), used to move between global and local coordinates.
    Poly shifted(double shift) const;
    // Upper bound on |root| (Cauchy).
    double root_bound() const;

private:
    void trim();
    std::vector<double> c_;
};

// Real roots of p in the closed interval [a, b]; a and b may be infinite.
// Returned sorted, multiple roots reported once. The zero polynomial has no roots.
std::vector<double> real_roots(const Poly& p, double a, double b);

// inf and sup of p over [a, b] (endpoints may be infinite; the result is then
// the limit value, possibly infinite).
double poly_min(const Poly& p, double a, double b);
double poly_max(const Poly& p, double a, double b);

// Exact integral of |p| over a bounded interval.
double integrate_abs(const Poly& p, double a, double b);

// inf of num/den over [a, b] where den has no zero in the open interval.
// Endpoint values are one-sided limits; infinite endpoints use the limit at infinity.
double rational_min(const Poly& num, const Poly& den, double a, double b);

// Total variation of num/den over the bounded interval [a, b].
double rational_variation(const Poly& num, const Poly& den, double a, double b);

} // namespace bvres
