#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bvres/carleman.hpp"
#include "specimens.hpp"

using namespace bvres;

namespace {

const double kPi = std::numbers::pi;

// tau by dense sampling of the threshold function
double sampled_tau(const CoefficientSpec& spec, const PhaseSpec& ph, double E) {
    double best = 1e300;
    for (int i = 0; i <= 2000000; ++i) {
        double x = -10.0 + 20.0 * (i + 0.3183) / 2000000.0;
        double a = spec.alpha(x), b = spec.beta(x), d = ph.dphi(x), b1 = spec.b1(x);
        best = std::min(best, a * (E - spec.V1(x)) / b + a * a * d * d + b1 * b1);
    }
    return best;
}

} // namespace

using testing::random_source;

TEST_CASE("threshold infimum") {
    CoefficientSpec free;
    CHECK(compute_tau(free, PhaseSpec{}, 1.0) == doctest::Approx(1.0));

    CoefficientSpec well;
    well.V1 = PiecewiseBV::indicator(-1.0, 1.0, 2.0);
    CHECK(compute_tau(well, PhaseSpec{1.0, 2.0}, 1.0) == doctest::Approx(1.0));
    CHECK(compute_tau(well, PhaseSpec{1.0, 0.5}, 1.0) == doctest::Approx(-0.75));

    CoefficientSpec mag;
    mag.b1 = PiecewiseBV::indicator(-1.0, 1.0, 1.0);
    mag.V1 = PiecewiseBV::indicator(-1.0, 1.0, 1.0);
    CHECK(compute_tau(mag, PhaseSpec{}, 1.0) == doctest::Approx(sampled_tau(mag, PhaseSpec{}, 1.0)));

    std::mt19937_64 rng(7);
    for (int t = 0; t < 5; ++t) {
        CoefficientSpec s;
        s.alpha = PiecewiseBV::constant(3.0) + 0.05 * testing::random_bv(rng, 3);
        s.beta = PiecewiseBV::constant(2.0) + 0.02 * testing::random_bv(rng, 2, 1);
        s.V1 = testing::random_bv(rng, 4);
        s.b1 = testing::random_bv(rng, 2);
        s.validate();
        PhaseSpec ph{1.5, 0.7};
        double exact = compute_tau(s, ph, 1.3), sampled = sampled_tau(s, ph, 1.3);
        CHECK(exact <= sampled + 1e-12);
        CHECK(exact >= sampled - 1e-3);
    }
}

TEST_CASE("phase slope search") {
    CoefficientSpec free;
    CHECK(choose_phase_slope(free, 1.0, 1.0).k == 0.0);

    CoefficientSpec well;
    well.V1 = PiecewiseBV::indicator(-1.0, 1.0, 2.0);
    PhaseSpec ph = choose_phase_slope(well, 1.0, 1.0);
    CHECK(ph.k >= std::sqrt(1.5));
    CHECK(ph.k <= std::sqrt(1.5) * ph.grid_step);
    CHECK(compute_tau(well, ph, 1.0) >= 0.5);

    CoefficientSpec wall;
    wall.V1 = PiecewiseBV::heaviside(0.0, 0.0, 3.0);
    CHECK_THROWS_WITH_AS(choose_phase_slope(wall, 1.0, 2.0), "hypothesis (general inf) fails", HypothesisFailure);

    PhaseSpec p{1.0, 2.0};
    CHECK(p.phi(0.0) == 0.0);
    CHECK(p.phi(-1.7) == p.phi(1.7));
    CHECK(p.phi(5.0) == doctest::Approx(p.sup_phi()));
    PiecewiseBV d = p.dphi_bv();
    for (double x : {0.3, 1.2, 1.5, 1.9, -1.4, -0.2, 2.5}) CHECK(d(x) == doctest::Approx(p.dphi(x)));
    // phi' is the derivative of phi
    for (double x : {0.5, 1.3, 1.8, -1.6}) CHECK((p.phi(x + 1e-6) - p.phi(x - 1e-6)) / 2e-6 == doctest::Approx(p.dphi(x)).epsilon(1e-6));
}

TEST_CASE("remainder measure") {
    CoefficientSpec free;
    RemainderMeasure m0 = build_mu(free, PhaseSpec{}, 1.0);
    CHECK(m0.total() == 0.0);

    CoefficientSpec delta;
    delta.V0 = SignedMeasure::dirac(0.0, 1.0);
    RemainderMeasure m1 = build_mu(delta, PhaseSpec{}, 1.0);
    REQUIRE(m1.atoms.size() == 1);
    CHECK(m1.atoms[0].x == 0.0);
    CHECK(m1.atoms[0].mass == doctest::Approx(1.0));
    CHECK(m1.density.total() == 0.0);

    CoefficientSpec step;
    step.b1 = PiecewiseBV::indicator(-1.0, 1.0, 1.0);
    RemainderMeasure m2 = build_mu(step, PhaseSpec{}, 1.0);
    REQUIRE(m2.atoms.size() == 2);
    CHECK(m2.atom_mass(-1.0) == doctest::Approx(1.0));
    CHECK(m2.atom_mass(1.0) == doctest::Approx(1.0));
    CHECK(m2.density.total() == 0.0);
}

TEST_CASE("remainder measure against sampled variation") {
    // phi' and alpha active, b = V = 0, beta non-constant
    CoefficientSpec s;
    s.alpha = PiecewiseBV({-0.5, 0.8}, {Poly(1.0), Poly({1.2, 0.3, 0.2}), Poly(2.0)});
    s.beta = PiecewiseBV({-1.0, 0.4}, {Poly(1.0), Poly({1.5, 0.4}), Poly(1.3)});
    s.V1 = PiecewiseBV({-0.3, 1.1}, {Poly(), Poly({0.5, -1.0, 0.7}), Poly()});
    PhaseSpec ph{1.0, 0.8};
    const double E = 1.4;
    RemainderMeasure mu = build_mu(s, ph, E);
    PiecewiseBV dphi = ph.dphi_bv();
    auto g = [&](double x) {
        double a = s.alpha.right(x), d = dphi.right(x);
        return a * (E - s.V1.right(x)) / s.beta.right(x) + a * a * d * d;
    };
    double tv = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        double x0 = -4.0 + 8.0 * i / n, x1 = -4.0 + 8.0 * (i + 1) / n;
        double am = 0.5 * (s.alpha.right(x0) + s.alpha.right(x1));
        double dm = 0.5 * (dphi.right(x0) + dphi.right(x1));
        tv += std::abs(am * (dphi.right(x1) - dphi.right(x0)));
        tv += std::abs(dm * (s.alpha.right(x1) - s.alpha.right(x0)));
        tv += std::abs(g(x1) - g(x0));
    }
    CHECK(mu.total() == doctest::Approx(tv).epsilon(1e-4));
    // the jump of phi' at zero
    CHECK(mu.atom_mass(0.0) == doctest::Approx(2 * 0.8 * 1.2 + std::abs(g(1e-12) - g(-1e-12))));
}

TEST_CASE("weight without atoms") {
    CoefficientSpec free;
    CarlemanWeight w = build_weight(free, PhaseSpec{}, 1.0, 1.0);
    CHECK(w.tau == doctest::Approx(1.0));
    CHECK(w.kappa == 2.0);
    CHECK(w.atoms.empty());
    for (double x : {-3.0, -0.4, 0.2, 1.0, 7.0}) {
        CHECK(w.q2(x) == doctest::Approx(2 * std::atan(std::abs(x))));
        double sg = x < 0 ? -1.0 : 1.0;
        CHECK(w.w(x, 0.1) == doctest::Approx(sg * std::expm1(2 * std::atan(std::abs(x)))));
    }
    CHECK(w.w(0.0, 0.3) == 0.0);
    CHECK(w.log_Cw() == doctest::Approx(std::log(std::expm1(kPi))));
    // s = 2: kappa * int_0^x <t>^-4 dt
    CarlemanWeight w2 = build_weight(free, PhaseSpec{}, 1.0, 2.0);
    double x = 1.3;
    double exact = 0.5 * (std::atan(x) + x / (1 + x * x));
    CHECK(w2.q2(x) == doctest::Approx(2 * exact));
}

TEST_CASE("single atom limit values") {
    CoefficientSpec s;
    s.V0 = SignedMeasure::dirac(1.0, 1.0);
    CarlemanWeight w = build_weight(s, PhaseSpec{}, 1.0, 1.0);
    CHECK(w.tau == doctest::Approx(1.0));
    CHECK(w.M == 8.0);
    REQUIRE(w.atoms.size() == 1);
    CHECK(w.W[0] == doctest::Approx(8.0));
    CHECK(w.gamma[0] == doctest::Approx(std::exp(-2.0)));
    double limit = std::expm1(2 * std::atan(1.0)) * std::exp(4.0);
    CHECK(w.limit_at_atom(0) == doctest::Approx(limit));
    double gap = w.min_atom_gap();
    CHECK(std::abs(w.w(1.0, 1e-3 * gap)) == doctest::Approx(limit).epsilon(1e-3));
    // approach is monotone as eta shrinks
    double prev = 1e300;
    for (double eta : {0.3, 0.1, 0.03, 0.01, 0.003}) {
        double err = std::abs(std::abs(w.w(1.0, eta)) - limit);
        CHECK(err <= prev);
        prev = err;
    }
}

TEST_CASE("weight derivative is a nonnegative density") {
    std::mt19937_64 rng(3);
    CoefficientSpec s;
    s.V1 = PiecewiseBV::indicator(-1.0, 1.0, 2.0);
    s.b1 = PiecewiseBV({-0.5, 0.7}, {Poly(), Poly({0.2, 0.5}), Poly()});
    s.V0 = SignedMeasure(PiecewiseBV(), {{-1.5, 0.3}, {0.4, -0.6}});
    PhaseSpec ph = choose_phase_slope(s, 1.0, 1.0);
    CarlemanWeight w = build_weight(s, ph, 1.0, 0.8);
    double logcw = w.log_Cw();
    for (double eta : {0.2, 0.05}) {
        for (int i = 0; i < 400; ++i) {
            double x = -6.0 + 12.0 * (i + 0.5) / 400;
            double d = w.dw(x, eta);
            CHECK(d >= 0.0);
            CHECK(std::log(std::abs(w.w(x, eta)) + 1e-300) <= logcw);
            double fd = (w.w(x + 1e-5, eta) - w.w(x - 1e-5, eta)) / 2e-5;
            CHECK(fd == doctest::Approx(d).epsilon(1e-3));
        }
    }
}

TEST_CASE("atom inequalities") {
    auto [a, b] = atom_inequalities(1.0, 8.0, 1.0);
    CHECK(a == doctest::Approx(std::exp(8.0) - 1 - 2 * std::exp(6.0)));
    CHECK(b == doctest::Approx(2 * (std::exp(4.0) - 1) - std::exp(2.0)));
    CHECK(a > 0);
    CHECK(b > 0);
    auto z = atom_inequalities(1.0, 8.0, 0.0);
    CHECK(z.first == 0.0);
    CHECK(z.second == 0.0);
    for (double m : {0.1, 1.0, 5.0}) {
        auto r = atom_inequalities(0.5, 16.0, m);
        CHECK(r.first > 0);
        CHECK(r.second > 0);
    }
    CHECK(atom_inequalities(1.0, 8.0, 200.0).first == std::numeric_limits<double>::infinity());
}

TEST_CASE("constant report baseline") {
    CoefficientSpec free;
    SpectralPoint pt{1.0, 0.1, {}};
    PhaseSpec ph{};
    CarlemanWeight w = build_weight(free, ph, 1.0, 1.0);
    ConstantReport r = constant_report(free, ph, w, pt);
    // C_w = e^pi - 1, K = 0, gamma = 1, a = 1/2, c1 = 1/2 + 1, sup alpha = 1:
    // Qf = 4, Qv = 4 * 2 * 3/2 = 12, coefficients 1 + 0.1 * 4 and 13
    CHECK(r.C() == doctest::Approx(13.0 * std::expm1(kPi)));

    CoefficientSpec well;
    well.V1 = PiecewiseBV::indicator(-1.0, 1.0, 2.0);
    well.V0 = SignedMeasure::dirac(0.5, 0.3);
    SpectralPoint p2{1.0, 0.05, {}};
    PhaseSpec big{1.0, 2.0}, small{1.0, 1.6};
    CarlemanWeight wb = build_weight(well, big, 1.0, 1.0);
    CarlemanWeight ws = build_weight(well, small, 1.0, 1.0);
    CHECK(constant_report(well, small, ws, p2).log_C <= constant_report(well, big, wb, p2).log_C);

    CoefficientSpec heavy = well;
    heavy.V0 = 2.0 * well.V0;
    CarlemanWeight wh = build_weight(heavy, big, 1.0, 1.0);
    CHECK(constant_report(heavy, big, wh, p2).log_C >= constant_report(well, big, wb, p2).log_C);
}

TEST_CASE("weighted estimate holds") {
    std::mt19937_64 rng(11);
    SUBCASE("free operator") {
        CoefficientSpec free;
        SpectralPoint pt{1.0, 0.1, {}};
        PhaseSpec ph{};
        CarlemanWeight w = build_weight(free, ph, 1.0, 1.0);
        double logC = constant_report(free, ph, w, pt).log_C;
        Source zero{[](double) { return cd(0.0); }, 1.0, {}};
        EstimateSides z = evaluate_estimate(free, ph, pt, 1.0, zero);
        CHECK(z.lhs == 0.0);
        CHECK(z.rhs_f == 0.0);
        CHECK(z.rhs_eps == 0.0);
        for (int t = 0; t < 20; ++t) {
            EstimateSides e = evaluate_estimate(free, ph, pt, 1.0, random_source(rng));
            CHECK(std::log(e.lhs) <= logC + std::log(e.rhs_f + e.rhs_eps));
        }
    }
    SUBCASE("phase slope increases the left side") {
        CoefficientSpec well;
        well.V1 = PiecewiseBV::indicator(-1.0, 1.0, 2.0);
        SpectralPoint pt{1.0, 0.1, {}};
        Source f = random_source(rng);
        EstimateSides a = evaluate_estimate(well, PhaseSpec{1.0, 1.3}, pt, 1.0, f);
        EstimateSides b = evaluate_estimate(well, PhaseSpec{1.0, 1.6}, pt, 1.0, f);
        CHECK(b.lhs > a.lhs);
        CHECK(b.rhs_f == doctest::Approx(a.rhs_f));
    }
    SUBCASE("barrier with magnetic step over h") {
        CoefficientSpec H = testing::barrier_example(10.0);
        std::uniform_real_distribution<double> eps(-0.1, 0.1);
        for (double h : {1.0, 0.5, 0.2, 0.08}) {
            double e = eps(rng);
            RescaledProblem rp = rescale(H, cd(1.0 / h, e / (2 * h)));
            PhaseSpec ph = choose_phase_slope(rp.spec, rp.point.E, 1.0);
            CarlemanWeight w = build_weight(rp.spec, ph, rp.point.E, 1.0);
            double logC = constant_report(rp.spec, ph, w, rp.point).log_C;
            for (int t = 0; t < 3; ++t) {
                EstimateSides es = evaluate_estimate(rp.spec, ph, rp.point, 1.0, random_source(rng));
                double ratio = std::log(es.lhs) - std::log(es.rhs_f + es.rhs_eps);
                MESSAGE("h=" << h << " log ratio " << ratio << " log C " << logC);
                CHECK(ratio <= logC);
            }
        }
    }
}
