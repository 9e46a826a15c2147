#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bvres/propagator.hpp"
#include "specimens.hpp"

using namespace bvres;

namespace {

const cd I(0.0, 1.0);

std::function<cd(double)> gaussian(double sigma) {
    return [sigma](double x) -> cd { return std::exp(-x * x / (2 * sigma * sigma)); };
}

// |chi e^{it d^2} v| for a gaussian v, by the explicit spreading formula
double free_gaussian_norm(const Cutoff& chi, double sigma, double t) {
    cd s2 = sigma * sigma + 2.0 * I * t;
    const int n = 20000;
    double a = -chi.outer, b = chi.outer, acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        double x = a + (b - a) * i / n;
        cd u = sigma / std::sqrt(s2) * std::exp(-x * x / (2.0 * s2));
        acc += (i == 0 || i == n ? 0.5 : 1.0) * std::norm(chi(x) * u) * (b - a) / n;
    }
    return std::sqrt(acc);
}

double l2(const Grid& g, const std::vector<cd>& f) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.num_segments(); ++k)
        for (int j = 0; j < g.n(); ++j) s += g.weight(k, j) * std::norm(f[g.index(k, j)]);
    return std::sqrt(s);
}

} // namespace

TEST_CASE("free gaussian against the spreading formula") {
    CoefficientSpec free;
    Cutoff chi{3.0, 4.0};
    EvolutionResult r = schrodinger_evolve(free, chi, gaussian(0.5), {0.0, 1.0, 5.0}, 100.0);
    CHECK_FALSE(r.refinement_needed);
    CHECK(r.tail_bound < 1e-4);
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        double exact = free_gaussian_norm(chi, 0.5, r.t[k]);
        CHECK(std::abs(r.norm[k] - exact) < 0.01 * exact);
    }
}

TEST_CASE("unitarity on a wide cutoff") {
    CoefficientSpec free;
    Cutoff chi{30.0, 31.0};
    EvolutionResult r = schrodinger_evolve(free, chi, gaussian(1.0), {0.0, 2.0, 4.0}, 64.0);
    for (double n : r.norm) CHECK(std::abs(n - r.norm[0]) < 0.02 * r.norm[0]);
}

TEST_CASE("time zero identities") {
    CoefficientSpec H = testing::barrier_example(10.0);
    Cutoff chi{1.75, 2.25};
    auto v = gaussian(0.3);
    EvolutionResult c = wave_evolve(H, chi, v, {0.0}, 900.0, WaveKind::Cosine);
    EvolutionResult s = wave_evolve(H, chi, v, {0.0}, 900.0, WaveKind::Sine);
    EvolutionResult u = schrodinger_evolve(H, chi, v, {0.0}, 900.0);
    CHECK(s.norm[0] < 1e-10);
    CHECK(std::abs(c.norm[0] - u.norm[0]) < 1e-8);
    // no spectrum below 0, so the projection is nearly the identity on a smooth v
    CHECK(u.captured_fraction == doctest::Approx(1.0).epsilon(1e-6));
    double direct = 0.0;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
        double x = -2.25 + 4.5 * i / n;
        direct += (i == 0 || i == n ? 0.5 : 1.0) * std::norm(chi(x) * chi(x) * v(x)) * 4.5 / n;
    }
    CHECK(c.norm[0] == doctest::Approx(std::sqrt(direct)).epsilon(1e-6));
}

TEST_CASE("spectral density is a nonnegative form") {
    CoefficientSpec H = testing::square_well();
    SpectralQuadrature sq = spectral_quadrature(H, Cutoff{1.75, 2.25}, gaussian(0.5), 100.0, 0.25);
    double scale = 0.0;
    for (const cd& f : sq.form) scale = std::max(scale, std::abs(f));
    for (const cd& f : sq.form) {
        CHECK(f.real() > -1e-10 * scale);
        CHECK(std::abs(f.imag()) < 1e-8 * scale);
    }
    // the well has bound states, so part of chi v sits below 0
    CHECK(sq.captured < sq.source_norm2);
    CHECK(sq.tail_bound() > 0.0);
}

TEST_CASE("free cosine propagator vanishes after leaving the cutoff") {
    CoefficientSpec free;
    std::vector<double> t;
    for (int i = 0; i <= 60; ++i) t.push_back(0.1 * i);
    EvolutionResult r = wave_evolve(free, Cutoff{1.5, 2.0}, gaussian(0.2), t, 2500.0, WaveKind::Cosine);
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] > 4.0) CHECK(r.norm[k] < 0.02 * r.norm[0]);
}

TEST_CASE("cosine is the time derivative of sine") {
    CoefficientSpec H = testing::barrier_example(10.0);
    Cutoff chi{1.75, 2.25};
    auto v = gaussian(0.3);
    const double dt = 1e-3;
    for (double t : {1.0, 3.0, 7.0}) {
        EvolutionResult s = wave_evolve(H, chi, v, {t - dt, t + dt}, 900.0, WaveKind::Sine, true);
        EvolutionResult c = wave_evolve(H, chi, v, {t}, 900.0, WaveKind::Cosine, true);
        std::vector<cd> d(c.fields[0].size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = (s.fields[1][i] - s.fields[0][i]) / (2 * dt) - c.fields[0][i];
        CHECK(l2(*c.grid, d) < 0.02 * l2(*c.grid, c.fields[0]));
    }
}

TEST_CASE("halving the spectral grid") {
    CoefficientSpec H = testing::magnetic_step();
    std::vector<double> t;
    for (int i = 0; i <= 20; ++i) t.push_back(0.5 * i);
    EvolutionResult r = schrodinger_evolve(H, Cutoff{1.75, 2.25}, gaussian(0.4), t, 100.0);
    CHECK(r.max_rel_change < 0.01);
    CHECK_FALSE(r.refinement_needed);
}

TEST_CASE("decay fit") {
    std::vector<double> t, s;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.1 * i);
        s.push_back(std::exp(-0.3 * t.back()));
    }
    DecayFit f = decay_fit(t, s, 0.0, 10.0);
    CHECK(f.rate == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(f.r_squared > 0.999999);
    s[10] = 0.0;
    s[20] = -1.0;
    f = decay_fit(t, s, 0.0, 10.0);
    CHECK(f.excluded == 2);
    CHECK(f.used == 99);
    CHECK(f.rate == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("barrier wave decay follows the first resonance") {
    CoefficientSpec H = testing::barrier_example(10.0);
    ResonanceReport res = find_resonances(H, Rect{0.5, 6.0, -1.0, -0.01});
    REQUIRE_FALSE(res.zeros.empty());
    double width = 1e300;
    for (const auto& z : res.zeros) width = std::min(width, -z.lambda.imag());
    std::vector<double> t;
    for (int i = 0; i <= 200; ++i) t.push_back(0.2 * i);
    EvolutionResult r = wave_evolve(H, Cutoff{1.75, 2.25}, gaussian(0.3), t, 900.0, WaveKind::Cosine);
    DecayFit f = decay_fit(t, r.norm, 5.0, 40.0);
    CHECK(f.rate > 0.0);
    CHECK(f.rate == doctest::Approx(width).epsilon(0.1));
}
