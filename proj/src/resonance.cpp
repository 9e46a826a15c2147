#include "bvres/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "bvres/parallel.hpp"

namespace bvres {

namespace {

const cd I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

ScaledValue make_scaled(cd m, double log_scale) {
    double a = std::abs(m);
    if (a == 0.0 || !std::isfinite(a)) return {m, log_scale};
    return {m / a, log_scale + std::log(a)};
}

double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep_d(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

struct Matching {
    State left, right; // at x = 0+, mantissas
    double log_scale;
    cd k;
    double alpha, R;
};

Matching match_at_zero(const CoefficientSpec& H, cd lambda, bool at_threshold) {
    if (!H.compactly_supported()) throw std::invalid_argument("resonance computations need compactly supported coefficients");
    TailCoeffs t = right_tail(H);
    const double h = H.h;
    const double R = matching_radius(H);
    cd k = at_threshold ? cd(0.0) : lambda / (h * std::sqrt(t.alpha * t.beta));
    cd z = lambda * lambda;
    ScaledState L = transfer(H, z, -R, 0.0, {1.0, -I * h * h * t.alpha * k});
    ScaledState Rs = transfer(H, z, R, 0.0, {1.0, I * h * h * t.alpha * k});
    double m = H.V0.atom_mass(0.0);
    if (m != 0.0) L.s.p += m * L.s.u / H.beta(0.0);
    return {L.s, Rs.s, L.log_scale + Rs.log_scale, k, t.alpha, R};
}

} // namespace

cd ScaledValue::value() const { return mantissa * std::exp(log_scale); }
double ScaledValue::log_abs() const {
    return std::abs(mantissa) == 0.0 ? -std::numeric_limits<double>::infinity() : log_scale + std::log(std::abs(mantissa));
}

double Cutoff::operator()(double x) const {
    double a = std::abs(x);
    if (a <= inner) return 1.0;
    if (a >= outer) return 0.0;
    return 1.0 - smoothstep((a - inner) / (outer - inner));
}

double Cutoff::derivative(double x) const {
    double a = std::abs(x);
    if (a <= inner || a >= outer) return 0.0;
    double d = -smoothstep_d((a - inner) / (outer - inner)) / (outer - inner);
    return x < 0 ? -d : d;
}

double matching_radius(const CoefficientSpec& H) {
    double R = H.R0.value_or(0.0);
    double far = 0.0;
    for (double x : H.breakpoints()) far = std::max(far, std::abs(x));
    if (far >= R) R = far + 0.5;
    return std::max(R, 0.5);
}

Cutoff default_cutoff(const CoefficientSpec& H) {
    double R = matching_radius(H);
    return {R + 0.25, R + 0.75};
}

ScaledValue determinant_scaled(const CoefficientSpec& H, cd lambda) {
    if (lambda == cd(0.0)) throw std::invalid_argument("determinant: lambda = 0 is the threshold; use zero_resonance_test");
    Matching mt = match_at_zero(H, lambda, false);
    const double h = H.h;
    cd W = mt.left.u * mt.right.p - mt.right.u * mt.left.p;
    // divide by the free value 2 i h^2 alpha k exp(-2 i k R)
    cd m = W * std::exp(2.0 * I * mt.k.real() * mt.R) / (2.0 * I * h * h * mt.alpha * mt.k);
    return make_scaled(m, mt.log_scale - 2.0 * mt.k.imag() * mt.R);
}

cd determinant(const CoefficientSpec& H, cd lambda) { return determinant_scaled(H, lambda).value(); }

ZeroOnContour::ZeroOnContour(cd a)
    : std::runtime_error("determinant vanishes on the contour near " + std::to_string(a.real()) + " + " +
                         std::to_string(a.imag()) + "i"),
      at(a) {}

namespace {

// phase of D relative to a reference, from scaled values
double phase_of(const ScaledValue& v) { return std::arg(v.mantissa); }

double wrap(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a <= -kPi) a += 2 * kPi;
    return a;
}

struct ArgTracker {
    const CoefficientSpec& H;
    double scale_log; // |D| below exp(scale_log) * 1e-12 counts as a zero on the contour
    ScaledValue eval(cd z) const {
        ScaledValue v = determinant_scaled(H, z);
        if (!(v.log_abs() > -27.0)) throw ZeroOnContour(z);
        return v;
    }
    // continuous change of arg D along the segment a -> b
    double increment(cd a, cd b, const ScaledValue& va, const ScaledValue& vb, int depth) const {
        double d = wrap(phase_of(vb) - phase_of(va));
        cd m = 0.5 * (a + b);
        if (depth > 40) throw ZeroOnContour(m);
        ScaledValue vm = eval(m);
        double d1 = wrap(phase_of(vm) - phase_of(va)), d2 = wrap(phase_of(vb) - phase_of(vm));
        if (std::abs(d) < kPi / 6 && std::abs(d1 + d2 - d) < 1e-9 && std::abs(d1) < kPi / 6 && std::abs(d2) < kPi / 6)
            return d;
        return increment(a, m, va, vm, depth + 1) + increment(m, b, vm, vb, depth + 1);
    }
};

} // namespace

int winding_number(const CoefficientSpec& H, const Rect& r) {
    if (r.re_lo <= 0 && r.re_hi >= 0 && r.im_lo <= 0 && r.im_hi >= 0)
        throw std::invalid_argument("winding_number: rectangle contains lambda = 0");
    ArgTracker tr{H, 0.0};
    std::vector<cd> corners{{r.re_lo, r.im_lo}, {r.re_hi, r.im_lo}, {r.re_hi, r.im_hi}, {r.re_lo, r.im_hi}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        cd a = corners[e], b = corners[(e + 1) % 4];
        // initial sampling at a quarter of the free oscillation scale
        double len = std::abs(b - a);
        double R = matching_radius(H);
        int n = std::max(4, static_cast<int>(std::ceil(len * R * 2.0)));
        std::vector<cd> pts(n + 1);
        for (int i = 0; i <= n; ++i) pts[i] = a + (b - a) * (static_cast<double>(i) / n);
        std::vector<ScaledValue> vals(n + 1);
        parallel_for(static_cast<std::size_t>(n + 1), [&](std::size_t i) { vals[i] = tr.eval(pts[i]); });
        for (int i = 0; i < n; ++i) total += tr.increment(pts[i], pts[i + 1], vals[i], vals[i + 1], 0);
    }
    return static_cast<int>(std::lround(total / (2 * kPi)));
}

std::optional<cd> newton_zero(const CoefficientSpec& H, cd z, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        double d = 1e-6 * std::max(1.0, std::abs(z));
        ScaledValue v0 = determinant_scaled(H, z);
        if (std::abs(v0.mantissa) == 0.0) return z;
        auto ratio = [&](cd dz) {
            ScaledValue v = determinant_scaled(H, z + dz);
            return v.mantissa / v0.mantissa * std::exp(v.log_scale - v0.log_scale);
        };
        cd rp = ratio(d), rm = ratio(-d);
        cd step = -2.0 * d / (rp - rm);
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
        double cap = 0.5 * std::max(1.0, std::abs(z));
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z += step;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) return z;
    }
    return std::nullopt;
}

namespace {

void subdivide(const CoefficientSpec& H, const Rect& r, int w, double tol, double min_size, ResonanceReport& out,
               int depth) {
    if (w == 0) {
        out.verified.push_back(r);
        return;
    }
    double wr = r.re_hi - r.re_lo, wi = r.im_hi - r.im_lo;
    cd centre(0.5 * (r.re_lo + r.re_hi), 0.5 * (r.im_lo + r.im_hi));
    if (w == 1 || std::max(wr, wi) < min_size || depth > 40) {
        std::optional<cd> z = newton_zero(H, centre);
        if (z && r.contains(*z)) {
            double res = std::abs(determinant(H, *z));
            if (res <= tol || w > 1) {
                out.zeros.push_back({*z, w, res});
                if (w > 1) out.unresolved.push_back({r, w});
                return;
            }
        }
        if (std::max(wr, wi) < min_size || depth > 40) {
            out.unresolved.push_back({r, w});
            return;
        }
    }
    // split off-centre so a symmetric zero does not land on the cut
    for (double off : {0.0137, -0.0291, 0.0419}) {
        double xm = r.re_lo + (0.5 + off) * wr, ym = r.im_lo + (0.5 + off) * wi;
        std::vector<Rect> kids{{r.re_lo, xm, r.im_lo, ym}, {xm, r.re_hi, r.im_lo, ym},
                               {r.re_lo, xm, ym, r.im_hi}, {xm, r.re_hi, ym, r.im_hi}};
        std::vector<int> ws;
        try {
            for (const Rect& k : kids) ws.push_back(winding_number(H, k));
        } catch (const ZeroOnContour&) {
            continue;
        }
        int sum = 0;
        for (int x : ws) sum += x;
        if (sum != w) out.unresolved.push_back({r, w});
        for (std::size_t i = 0; i < kids.size(); ++i) subdivide(H, kids[i], ws[i], tol, min_size, out, depth + 1);
        return;
    }
    out.unresolved.push_back({r, w});
}

} // namespace

ResonanceReport find_resonances(const CoefficientSpec& H, const Rect& rect, double tol, double min_size) {
    ResonanceReport out;
    int w = winding_number(H, rect);
    subdivide(H, rect, w, tol, min_size, out, 0);
    std::sort(out.zeros.begin(), out.zeros.end(), [](const ResonanceZero& a, const ResonanceZero& b) {
        return a.lambda.real() != b.lambda.real() ? a.lambda.real() < b.lambda.real() : a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

namespace {

// Largest singular value of [Bv; Bd] L^{-H} (Bd optional) by block subspace
// iteration with Rayleigh-Ritz.
double top_singular_value(const Eigen::MatrixXcd& Bv, const Eigen::MatrixXcd* Bd, const Eigen::MatrixXcd& L) {
    const Eigen::Index n = L.rows();
    const Eigen::Index b = std::min<Eigen::Index>(8, n);
    auto apply = [&](const Eigen::MatrixXcd& X, Eigen::MatrixXcd& Yv, Eigen::MatrixXcd& Yd) {
        Eigen::MatrixXcd Z = L.adjoint().triangularView<Eigen::Upper>().solve(X);
        Yv = Bv * Z;
        if (Bd) Yd = *Bd * Z;
    };
    auto adjoint_apply = [&](const Eigen::MatrixXcd& Yv, const Eigen::MatrixXcd& Yd) {
        Eigen::MatrixXcd Z = Bv.adjoint() * Yv;
        if (Bd) Z += Bd->adjoint() * Yd;
        return Eigen::MatrixXcd(L.triangularView<Eigen::Lower>().solve(Z));
    };
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd X(n, b);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < b; ++j) X(i, j) = cd(nd(rng), nd(rng));
    double prev = 0.0, sigma = 0.0;
    Eigen::MatrixXcd Yv, Yd;
    for (int it = 0; it < 500; ++it) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(X);
        X = qr.householderQ() * Eigen::MatrixXcd::Identity(n, b);
        apply(X, Yv, Yd);
        Eigen::MatrixXcd Y(Yv.rows() + (Bd ? Yd.rows() : 0), b);
        Y.topRows(Yv.rows()) = Yv;
        if (Bd) Y.bottomRows(Yd.rows()) = Yd;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Y);
        sigma = svd.singularValues()(0);
        if (it > 3 && std::abs(sigma - prev) <= 1e-11 * sigma) break;
        prev = sigma;
        X = adjoint_apply(Yv, Yd);
    }
    return sigma;
}

// Matrix norms on one grid. Columns: cardinal functions on the continuous
// node space times chi.
std::array<double, 4> dense_norms(const CoefficientSpec& H, cd lambda, const Cutoff& chi, int nodes) {
    cd z = lambda * lambda;
    ResolveOptions opts;
    opts.nodes = nodes;
    opts.root_hint = lambda;
    opts.outgoing = true;
    opts.box_radius = chi.outer;
    opts.cuts = {-chi.inner, chi.inner};
    opts.panel_phase = 12.0;
    opts.singular_tol = 0.0;
    SpectralPoint pt{z.real(), z.imag(), lambda};
    ResolventKernel K(H, pt, opts);
    const Grid& g = *K.grid();
    const int n = g.n();
    const std::size_t N = g.size();
    const std::size_t S = g.num_segments();
    const std::size_t Nc = S * static_cast<std::size_t>(n - 1) + 1;
    auto cidx = [n](std::size_t s, int j) { return s * static_cast<std::size_t>(n - 1) + static_cast<std::size_t>(j); };

    Eigen::VectorXd w(N), cx(N), dcx(N);
    for (std::size_t s = 0; s < S; ++s)
        for (int j = 0; j < n; ++j) {
            std::size_t i = g.index(s, j);
            w(i) = g.weight(s, j);
            cx(i) = chi(g.x(s, j));
            dcx(i) = chi.derivative(g.x(s, j));
        }
    // Q: continuous dofs -> nodes; D: per-panel derivative
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, Nc), DQ = Eigen::MatrixXd::Zero(N, Nc);
    for (std::size_t s = 0; s < S; ++s) {
        double scale = 1.0 / g.segments()[s].half();
        for (int j = 0; j < n; ++j) {
            Q(g.index(s, j), cidx(s, j)) = 1.0;
            for (int l = 0; l < n; ++l) DQ(g.index(s, j), cidx(s, l)) += scale * g.rule().diff(j, l);
        }
    }
    Eigen::MatrixXcd Tv(N, Nc), Td(N, Nc);
    parallel_for(Nc, [&](std::size_t c) {
        std::vector<cd> f(N, 0.0);
        for (std::size_t i = 0; i < N; ++i)
            if (Q(i, c) != 0.0) f[i] = cx(i);
        SolutionField v = K.apply(f, false);
        for (std::size_t i = 0; i < N; ++i) {
            Tv(i, c) = cx(i) * v.v[i];
            Td(i, c) = dcx(i) * v.v[i] + cx(i) * v.dv[i];
        }
    });
    Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::MatrixXcd Bv = sw.asDiagonal() * Tv, Bd = sw.asDiagonal() * Td;
    Eigen::MatrixXd G0 = Q.transpose() * w.asDiagonal() * Q;
    Eigen::MatrixXd G1 = G0 + DQ.transpose() * w.asDiagonal() * DQ;
    std::array<double, 4> out{};
    int idx = 0;
    for (int k1 = 0; k1 < 2; ++k1) {
        Eigen::LLT<Eigen::MatrixXd> llt(k1 == 0 ? G0 : G1);
        Eigen::MatrixXcd L = llt.matrixL().toDenseMatrix().cast<cd>();
        for (int k2 = 0; k2 < 2; ++k2)
            out[static_cast<std::size_t>(idx++)] = top_singular_value(Bv, k2 == 1 ? &Bd : nullptr, L);
    }
    return out;
}

} // namespace

std::vector<NormRow> cutoff_resolvent_norms(const CoefficientSpec& H, cd lambda, const Cutoff& chi, int nodes) {
    std::array<double, 4> a = dense_norms(H, lambda, chi, nodes);
    std::array<double, 4> b = dense_norms(H, lambda, chi, nodes + 8);
    std::vector<NormRow> rows;
    int idx = 0;
    for (int k1 = 0; k1 < 2; ++k1)
        for (int k2 = 0; k2 < 2; ++k2, ++idx) {
            NormRow r;
            r.lambda = lambda;
            r.k1 = k1;
            r.k2 = k2;
            r.norm = b[static_cast<std::size_t>(idx)];
            r.refinement_change = std::abs(b[static_cast<std::size_t>(idx)] - a[static_cast<std::size_t>(idx)]) / b[static_cast<std::size_t>(idx)];
            r.accepted = r.refinement_change < 0.02;
            rows.push_back(r);
        }
    return rows;
}

ResonanceReport strip_certificate(const CoefficientSpec& H, double lambda0, double re_max,
                                  std::vector<double> theta_grid, int samples) {
    if (!(lambda0 > 0) || !(re_max > lambda0)) throw std::invalid_argument("strip_certificate: need 0 < lambda0 < re_max");
    std::sort(theta_grid.begin(), theta_grid.end());
    ResonanceReport rep;
    rep.lambda0 = lambda0;
    rep.re_max = re_max;
    for (double th : theta_grid) {
        if (!(th > 0)) continue;
        Rect right{lambda0, re_max, -th, th}, left{-re_max, -lambda0, -th, th};
        int wr, wl;
        try {
            wr = winding_number(H, right);
            wl = winding_number(H, left);
        } catch (const ZeroOnContour& e) {
            wr = wl = 1;
        }
        if (wr == 0 && wl == 0) {
            rep.verified.push_back(right);
            rep.verified.push_back(left);
            rep.theta0 = th;
            rep.strip_certified = true;
            continue;
        }
        // first failing strip: locate what is inside
        for (const Rect& r : {right, left}) {
            try {
                ResonanceReport f = find_resonances(H, r);
                for (const auto& z : f.zeros) rep.zeros.push_back(z);
                for (const auto& u : f.unresolved) rep.unresolved.push_back(u);
            } catch (const ZeroOnContour& e) {
                rep.zeros.push_back({e.at, 1, 0.0});
            }
        }
        break;
    }
    if (rep.strip_certified && samples > 0) {
        Cutoff chi = default_cutoff(H);
        for (double im : {0.0, -rep.theta0}) {
            for (int i = 0; i < samples; ++i) {
                double re = lambda0 * std::pow(re_max / lambda0, samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1));
                for (const NormRow& r : cutoff_resolvent_norms(H, cd(re, im), chi)) rep.norm_rows.push_back(r);
            }
        }
    }
    return rep;
}

LineFit norm_exponent(const std::vector<NormRow>& rows, int k1, int k2, double im, double re_min) {
    std::vector<double> x, y;
    for (const auto& r : rows)
        if (r.k1 == k1 && r.k2 == k2 && std::abs(r.lambda.imag() - im) < 1e-12 && r.lambda.real() >= re_min) {
            x.push_back(std::log(r.lambda.real()));
            y.push_back(std::log(r.norm));
        }
    return fit_line(x, y);
}

namespace {

double angle_margin(const Matching& m) {
    cd W = m.left.u * m.right.p - m.right.u * m.left.p;
    double nl = std::sqrt(std::norm(m.left.u) + std::norm(m.left.p));
    double nr = std::sqrt(std::norm(m.right.u) + std::norm(m.right.p));
    return std::abs(W) / (nl * nr);
}

} // namespace

ZeroResonanceReport zero_resonance_test(const CoefficientSpec& H, double threshold) {
    ZeroResonanceReport rep;
    rep.direct_margin = angle_margin(match_at_zero(H, 0.0, true));
    const std::array<double, 3> radii{1e-2, 1e-3, 1e-4};
    double worst = 0.0;
    for (double ang : {0.25 * kPi, 0.75 * kPi, -0.25 * kPi, -0.75 * kPi}) {
        std::array<double, 3> m{};
        for (std::size_t i = 0; i < radii.size(); ++i) {
            m[i] = angle_margin(match_at_zero(H, std::polar(radii[i], ang), false));
            rep.ray_margins.push_back(m[i]);
        }
        // linear in |lambda| through the two smallest radii
        double slope = (m[1] - m[2]) / (radii[1] - radii[2]);
        double extrap = std::max(0.0, m[2] - slope * radii[2]);
        worst = std::max(worst, extrap);
    }
    rep.margin = worst;
    rep.has_zero_resonance = rep.margin <= threshold;
    bool direct = rep.direct_margin <= threshold;
    // the two readings disagree by more than the extrapolation can explain
    rep.inconclusive = direct != rep.has_zero_resonance &&
                       std::abs(rep.direct_margin - rep.margin) > 10 * threshold;
    return rep;
}

BarrierChainReport barrier_chain_check(double M, double eps, double delta, int samples, std::uint64_t seed) {
    BarrierChainReport rep;
    rep.M = M;
    rep.samples = samples;
    CoefficientSpec H;
    H.V1 = PiecewiseBV::indicator(-1.0, 1.0, M);
    H.b1 = PiecewiseBV::indicator(-1.0, 1.0, 1.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double p = 0.5 * (3.0 + delta);
    ResolveOptions opts;
    opts.box_radius = 4.0;
    ResolventKernel K(H, SpectralPoint{0.0, eps, {}}, opts);
    const Grid& g = *K.grid();
    double worst = 1.0;
    for (int t = 0; t < samples; ++t) {
        cd c[3] = {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        double fr = 3 * u(rng);
        Source src{[=](double x) {
                       double env = (1 - x * x / 9) * (1 - x * x / 9);
                       return std::pow(std::abs(x) + 1.0, -p) * env * (c[0] + c[1] * x + c[2] * std::cos(fr * x));
                   },
                   3.0,
                   {}};
        std::vector<cd> f = K.sample(src);
        SolutionField v = K.apply(f);
        double L = 0, B = 0, G = 0;
        cd form = 0.0;
        for (std::size_t s = 0; s < g.num_segments(); ++s) {
            bool inner = g.segments()[s].mid() > -1.0 && g.segments()[s].mid() < 1.0;
            for (int j = 0; j < g.n(); ++j) {
                std::size_t i = g.index(s, j);
                double x = g.x(s, j), wq = g.weight(s, j);
                L += wq * std::pow(std::abs(x) + 1.0, -2 * p) * std::norm(v.v[i]);
                if (inner) B += wq * std::norm(v.v[i]);
                G += wq * std::norm(v.dv[i]);
                form += wq * f[i] * std::conj(v.v[i]);
            }
        }
        // exterior tails
        for (bool right : {true, false}) {
            cd rate = right ? v.rate_right : v.rate_left;
            double decay = std::abs(rate.real());
            double x0 = right ? g.right() : g.left();
            double v2 = std::norm(right ? v.v.back() : v.v.front());
            G += std::norm(rate) * v2 / (2 * decay);
            auto fn = [&](double t) { return std::pow(std::abs(x0) + t + 1.0, -2 * p) * std::exp(-2 * decay * t); };
            double tail = 0.0;
            for (int q = 0; q < 4000; ++q) {
                double t0 = q * 0.05, t1 = t0 + 0.05;
                tail += 0.05 / 6 * (fn(t0) + 4 * fn(0.5 * (t0 + t1)) + fn(t1));
            }
            L += v2 * tail;
        }
        double lhs1 = 0.5 * G + (M - 2.0) * B, rhs1 = form.real();
        double lhs2 = (2.0 + delta) / 12.0 * L, rhs2 = 0.5 * B + 0.5 * G;
        double s1 = (rhs1 - lhs1) / std::abs(rhs1), s2 = (rhs2 - lhs2) / std::abs(rhs2);
        if (s1 < -1e-9 || s2 < -1e-9) ++rep.violations;
        worst = std::min({worst, s1, s2});
    }
    rep.worst_slack = worst;
    rep.certified = M >= rep.M_required && rep.violations == 0;
    return rep;
}

} // namespace bvres
