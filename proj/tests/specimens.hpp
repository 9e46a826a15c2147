#pragma once

#include <random>
#include <vector>

#include <cmath>

#include "bvres/bv.hpp"
#include "bvres/operator.hpp"
#include "bvres/resolvent.hpp"
#include "bvres/spec.hpp"

namespace bvres::testing {

// Random piecewise cubic with constant tails and n breakpoints in [-3, 3].
inline PiecewiseBV random_bv(std::mt19937_64& rng, int n, int degree = 3) {
    std::uniform_real_distribution<double> pos(-3.0, 3.0), coef(-1.0, 1.0);
    std::vector<double> bp;
    while (static_cast<int>(bp.size()) < n) {
        double x = pos(rng);
        bool near = false;
        for (double y : bp) near = near || std::abs(x - y) < 1e-3;
        if (!near) bp.push_back(x);
    }
    std::sort(bp.begin(), bp.end());
    std::vector<Poly> pieces;
    pieces.push_back(Poly(coef(rng)));
    for (int i = 0; i + 1 <= n - 1; ++i) {
        std::vector<double> c(static_cast<std::size_t>(degree) + 1);
        for (double& v : c) v = coef(rng);
        pieces.push_back(Poly(c));
    }
    pieces.push_back(Poly(coef(rng)));
    return PiecewiseBV(bp, pieces);
}

inline SignedMeasure random_measure(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> pos(-3.0, 3.0), coef(-1.0, 1.0);
    PiecewiseBV d = random_bv(rng, n);
    std::vector<Poly> pieces = d.pieces();
    pieces.front() = Poly();
    pieces.back() = Poly();
    std::vector<Atom> atoms;
    for (int i = 0; i < 3; ++i) atoms.push_back({pos(rng), coef(rng)});
    atoms.push_back({d.breakpoints()[0], coef(rng)});
    return SignedMeasure(PiecewiseBV(d.breakpoints(), pieces), atoms);
}

} // namespace bvres::testing

namespace bvres::testing {

// V = M 1_[-1,1], b = 1_[-1,1] at h = 1.
inline CoefficientSpec barrier_example(double M = 10.0) {
    CoefficientSpec s;
    s.V1 = PiecewiseBV::indicator(-1.0, 1.0, M);
    s.b1 = PiecewiseBV::indicator(-1.0, 1.0, 1.0);
    return s;
}

inline CoefficientSpec delta_example(double c) {
    CoefficientSpec s;
    s.V0 = SignedMeasure::dirac(0.0, c);
    return s;
}

inline CoefficientSpec square_well(double depth = 4.0) {
    CoefficientSpec s;
    s.V1 = PiecewiseBV::indicator(-1.0, 1.0, -depth);
    return s;
}

inline CoefficientSpec magnetic_step() {
    CoefficientSpec s;
    s.b1 = PiecewiseBV::indicator(-1.0, 1.0, 1.0);
    return s;
}

// Valid spec with every coefficient type present.
inline CoefficientSpec random_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0), pos(-2.0, 2.0), h(0.2, 1.5);
    CoefficientSpec s;
    s.h = h(rng);
    s.alpha = PiecewiseBV({pos(rng)}, {Poly(1.0 + 0.5 * std::abs(U(rng))), Poly(1.0 + 0.5 * std::abs(U(rng)))});
    s.beta = PiecewiseBV({-0.5, 0.5}, {Poly(1.0), Poly({1.2, 0.1 * U(rng)}), Poly(1.0)});
    s.b0 = PiecewiseBV::indicator(-1.0, 1.0, U(rng));
    s.b1 = PiecewiseBV({-1.5, 1.5}, {Poly(), Poly({U(rng), 0.3 * U(rng)}), Poly()});
    s.V1 = PiecewiseBV::indicator(-1.0, 0.7, 2.0 * U(rng));
    s.V0 = SignedMeasure(PiecewiseBV(), {{0.3, 2.0 * U(rng)}, {-0.8, U(rng)}});
    s.validate();
    return s;
}

inline GridFunction random_u(std::shared_ptr<const Grid> g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    cd c0(U(rng), U(rng)), c1(U(rng), U(rng)), c2(U(rng), U(rng));
    double w = 0.5 + std::abs(U(rng)), sh = U(rng), k = 3.0 * U(rng);
    auto f = [=](double x) {
        double y = x - sh;
        return (c0 + c1 * y + c2 * y * y) * std::exp(-w * y * y + cd(0.0, k) * x);
    };
    auto df = [=](double x) {
        double y = x - sh;
        cd poly = c0 + c1 * y + c2 * y * y;
        return ((c1 + 2.0 * c2 * y) + poly * (-2.0 * w * y + cd(0.0, k))) * std::exp(-w * y * y + cd(0.0, k) * x);
    };
    return GridFunction::sample(g, f, df);
}

// smooth source on [-3, 3]
inline Source random_source(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    cd c[4];
    for (auto& v : c) v = {u(rng), u(rng)};
    double f1 = 3 * u(rng), f2 = 3 * u(rng);
    return {[=](double x) {
                double env = (1 - x * x / 9) * (1 - x * x / 9);
                return env * (c[0] + c[1] * x + c[2] * std::cos(f1 * x) + c[3] * std::sin(f2 * x));
            },
            3.0,
            {}};
}

} // namespace bvres::testing
