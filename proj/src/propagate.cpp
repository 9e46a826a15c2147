#include "bvres/propagate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace bvres {

namespace {
const cd I(0.0, 1.0);

bool is_constant(const LocalCoeffs& c) {
    return c.alpha.is_constant() && c.beta.is_constant() && c.b.is_constant() && c.V.is_constant();
}

using OdeState = std::array<cd, 2>;

struct Rhs {
    const LocalCoeffs* c;
    double h;
    cd z;
    void operator()(const OdeState& y, OdeState& dy, double x) const {
        Mat2 A = system_matrix(*c, x, h, z);
        dy[0] = A(0, 0) * y[0] + A(0, 1) * y[1];
        dy[1] = A(1, 0) * y[0] + A(1, 1) * y[1];
    }
};

// Integrate through the listed points (monotone), writing the state at each.
void integrate_polynomial(const LocalCoeffs& c, double h, cd z, const std::vector<double>& xs, OdeState& y,
                          std::vector<OdeState>& out) {
    namespace ode = boost::numeric::odeint;
    using Stepper = ode::runge_kutta_fehlberg78<OdeState>;
    auto stepper = ode::make_controlled<Stepper>(1e-14, 1e-13);
    Rhs rhs{&c, h, z};
    out.clear();
    double span = std::abs(xs.back() - xs.front());
    double dt = (xs.back() >= xs.front() ? 1.0 : -1.0) * std::max(span, 1e-3) * 0.05;
    try {
        ode::integrate_times(stepper, rhs, y, xs.begin(), xs.end(), dt,
                             [&out](const OdeState& s, double) { out.push_back(s); },
                             ode::max_step_checker(100000));
    } catch (const std::exception& e) {
        throw StepFailure(std::string("adaptive step failed: ") + e.what());
    }
}

} // namespace

Mat2 system_matrix(const LocalCoeffs& c, double x, double h, cd z) {
    double al = c.alpha(x), be = c.beta(x), b = c.b(x), V = c.V(x);
    Mat2 A;
    A(0, 0) = -I * b / (h * al);
    A(0, 1) = 1.0 / (h * h * al);
    A(1, 0) = (V - z) / be - b * b / al;
    A(1, 1) = -I * b / (h * al);
    return A;
}

Mat2 exponential(const Mat2& A, double dx) {
    cd m = 0.5 * (A(0, 0) + A(1, 1));
    cd det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    cd s = std::sqrt(m * m - det);
    Mat2 N = A - m * Mat2::Identity();
    cd sh = std::abs(s) == 0.0 ? cd(dx) : std::sinh(s * dx) / s;
    return std::exp(m * dx) * (std::cosh(s * dx) * Mat2::Identity() + sh * N);
}

cd wavenumber_squared(double alpha, double beta, double b, double V, double h, cd z) {
    return ((z - V) / (alpha * beta) + b * b / (alpha * alpha)) / (h * h);
}

cd decaying_root(cd k2) {
    cd k = std::sqrt(k2);
    if (k.imag() < 0.0 || (k.imag() == 0.0 && k.real() < 0.0)) k = -k;
    return k;
}

TailCoeffs left_tail(const CoefficientSpec& s) {
    return {s.alpha.pieces().front().coeff(0), s.beta.pieces().front().coeff(0),
            s.b0.pieces().front().coeff(0) + s.b1.pieces().front().coeff(0),
            s.V1.pieces().front().coeff(0) + s.V0.density.pieces().front().coeff(0)};
}

TailCoeffs right_tail(const CoefficientSpec& s) {
    return {s.alpha.pieces().back().coeff(0), s.beta.pieces().back().coeff(0),
            s.b0.pieces().back().coeff(0) + s.b1.pieces().back().coeff(0),
            s.V1.pieces().back().coeff(0) + s.V0.density.pieces().back().coeff(0)};
}

std::vector<State> sweep(const CoefficientSpec& spec, cd z, const Grid& g, State start, bool rightward) {
    const int n = g.n();
    const std::size_t ns = g.num_segments();
    std::vector<State> out(g.size());
    State cur = start;
    std::vector<double> xs;
    std::vector<OdeState> sol;
    for (std::size_t step = 0; step < ns; ++step) {
        std::size_t s = rightward ? step : ns - 1 - step;
        const Segment& seg = g.segments()[s];
        // entering the panel across a boundary: apply the atom jump
        if (step > 0) {
            double xb = rightward ? seg.a : seg.b;
            double m = spec.V0.atom_mass(xb);
            if (m != 0.0) {
                cd jump = m * cur.u / spec.beta(xb);
                cur.p += rightward ? jump : -jump;
            }
        }
        LocalCoeffs c = local_coeffs(spec, seg.mid());
        auto node = [&](int k) { return rightward ? k : n - 1 - k; };
        if (is_constant(c)) {
            Mat2 A = system_matrix(c, seg.mid(), spec.h, z);
            double x0 = g.x(s, node(0));
            Eigen::Vector2cd y0(cur.u, cur.p);
            for (int k = 0; k < n; ++k) {
                int j = node(k);
                Eigen::Vector2cd y = exponential(A, g.x(s, j) - x0) * y0;
                out[g.index(s, j)] = {y(0), y(1)};
            }
        } else {
            xs.clear();
            for (int k = 0; k < n; ++k) xs.push_back(g.x(s, node(k)));
            OdeState y{cur.u, cur.p};
            integrate_polynomial(c, spec.h, z, xs, y, sol);
            for (int k = 0; k < n; ++k) out[g.index(s, node(k))] = {sol[static_cast<std::size_t>(k)][0], sol[static_cast<std::size_t>(k)][1]};
        }
        cur = out[g.index(s, node(n - 1))];
    }
    return out;
}

ScaledState transfer(const CoefficientSpec& spec, cd z, double from, double to, State start) {
    ScaledState st{start, 0.0};
    auto renorm = [&st]() {
        double m = std::max(std::abs(st.s.u), std::abs(st.s.p));
        if (m > 0.0 && std::isfinite(m)) {
            st.s.u /= m;
            st.s.p /= m;
            st.log_scale += std::log(m);
        }
    };
    renorm();
    if (from == to) return st;
    const bool right = to > from;
    std::vector<double> pts{from};
    std::vector<double> bps = spec.breakpoints();
    if (right) {
        for (double x : bps)
            if (x > from && x < to) pts.push_back(x);
    } else {
        for (auto it = bps.rbegin(); it != bps.rend(); ++it)
            if (*it < from && *it > to) pts.push_back(*it);
    }
    pts.push_back(to);
    std::vector<OdeState> sol;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i], b = pts[i + 1];
        if (i > 0) {
            double m = spec.V0.atom_mass(a);
            if (m != 0.0) {
                cd jump = m * st.s.u / spec.beta(a);
                st.s.p += right ? jump : -jump;
            }
        }
        LocalCoeffs c = local_coeffs(spec, 0.5 * (a + b));
        Mat2 A0 = system_matrix(c, 0.5 * (a + b), spec.h, z);
        // sub-steps short enough that one step grows by at most ~e^4
        double rate = std::sqrt(A0.cwiseAbs2().sum()) + 1.0;
        int m = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) * rate / 4.0)));
        for (int k = 0; k < m; ++k) {
            double x0 = a + (b - a) * k / m, x1 = (k + 1 == m) ? b : a + (b - a) * (k + 1) / m;
            if (is_constant(c)) {
                Eigen::Vector2cd y = exponential(A0, x1 - x0) * Eigen::Vector2cd(st.s.u, st.s.p);
                st.s = {y(0), y(1)};
            } else {
                OdeState y{st.s.u, st.s.p};
                integrate_polynomial(c, spec.h, z, {x0, x1}, y, sol);
                st.s = {sol.back()[0], sol.back()[1]};
            }
            renorm();
        }
    }
    return st;
}

} // namespace bvres
