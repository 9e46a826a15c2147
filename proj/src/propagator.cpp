#include "bvres/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "bvres/operator.hpp"
#include "bvres/parallel.hpp"

namespace bvres {

namespace {

const cd I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

// 16 point Gauss-Legendre rule on [-1, 1]
void gauss_legendre(std::vector<double>& x, std::vector<double>& w) {
    using rule = boost::math::quadrature::gauss<double, 16>;
    const auto& a = rule::abscissa();
    const auto& wt = rule::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        x.push_back(a[i]);
        w.push_back(wt[i]);
        x.push_back(-a[i]);
        w.push_back(wt[i]);
    }
}

std::vector<double> beta_at_nodes(const CoefficientSpec& H, const Grid& g) {
    std::vector<double> b(g.size());
    for (std::size_t s = 0; s < g.num_segments(); ++s) {
        const Poly& p = H.beta.piece_at(g.segments()[s].mid());
        for (int j = 0; j < g.n(); ++j) b[g.index(s, j)] = p(g.x(s, j));
    }
    return b;
}

} // namespace

double SpectralQuadrature::tail_bound() const {
    return std::sqrt(sup_beta * std::max(0.0, source_norm2 - captured));
}

SpectralQuadrature spectral_quadrature(const CoefficientSpec& H, const Cutoff& chi,
                                       const std::function<cd(double)>& v, double Lambda, double panel_width) {
    if (!(Lambda > 0)) throw std::invalid_argument("spectral truncation Lambda must be positive");
    if (!H.compactly_supported()) throw std::invalid_argument("propagators need compactly supported coefficients");
    SpectralQuadrature sq;
    sq.chi = chi;
    sq.Lambda = Lambda;
    const double lmax = std::sqrt(Lambda);
    ResolveOptions base;
    base.cuts = {-chi.inner, chi.inner};
    base.outgoing = true;
    base.singular_tol = 0.0;
    sq.grid = resolvent_grid(H, cd(Lambda, 0.0), std::max(chi.outer, matching_radius(H)), base.cuts, base);
    base.grid = sq.grid;
    const Grid& g = *sq.grid;
    std::vector<double> beta = beta_at_nodes(H, g);

    // panels in l
    int np = std::max(1, static_cast<int>(std::ceil(lmax / panel_width)));
    std::vector<double> edges;
    double first = lmax / np;
    for (int k = 8; k >= 1; --k) edges.push_back(first * std::pow(0.5, k));
    for (int k = 1; k <= np; ++k) edges.push_back(lmax * k / np);
    std::vector<double> gx, gw;
    gauss_legendre(gx, gw);
    double prev = 0.0;
    for (double e : edges) {
        for (std::size_t i = 0; i < gx.size(); ++i) {
            sq.lambda.push_back(0.5 * (prev + e) + 0.5 * (e - prev) * gx[i]);
            sq.weight.push_back(0.5 * (e - prev) * gw[i]);
        }
        prev = e;
    }

    std::vector<cd> f(g.size()), fb(g.size());
    for (std::size_t s = 0; s < g.num_segments(); ++s)
        for (int j = 0; j < g.n(); ++j) {
            std::size_t i = g.index(s, j);
            double x = g.x(s, j);
            f[i] = chi(x) * v(x);
            fb[i] = f[i] / beta[i];
            sq.source_norm2 += g.weight(s, j) * std::norm(f[i]) / beta[i];
        }
    sq.sup_beta = H.beta.sup();
    sq.jump.resize(sq.lambda.size());
    sq.form.resize(sq.lambda.size());
    parallel_for(sq.lambda.size(), [&](std::size_t q) {
        double l = sq.lambda[q];
        SpectralPoint pt{l * l, 0.0, {}};
        ResolveOptions op = base, om = base;
        op.root_hint = cd(l, 0.0);
        om.root_hint = cd(-l, 0.0);
        SolutionField a = ResolventKernel(H, pt, op).apply(f, false);
        SolutionField b = ResolventKernel(H, pt, om).apply(f, false);
        std::vector<cd> d(g.size());
        cd form = 0.0;
        for (std::size_t s = 0; s < g.num_segments(); ++s)
            for (int j = 0; j < g.n(); ++j) {
                std::size_t i = g.index(s, j);
                cd diff = a.v[i] - b.v[i];
                form += g.weight(s, j) * std::conj(fb[i]) * diff;
                d[i] = chi(g.x(s, j)) * diff;
            }
        sq.jump[q] = std::move(d);
        sq.form[q] = form / (2.0 * kPi * I);
    });
    // spectral mass in [0, Lambda]: int <chi v, J chi v> d tau with d tau = 2 l dl
    double mass = 0.0;
    for (std::size_t q = 0; q < sq.lambda.size(); ++q) mass += sq.weight[q] * 2.0 * sq.lambda[q] * sq.form[q].real();
    sq.captured = mass;
    return sq;
}

namespace {

enum class Kind { Schrodinger, Cosine, Sine };

EvolutionResult assemble(const SpectralQuadrature& fine, const SpectralQuadrature& coarse,
                         const std::vector<double>& t, Kind kind, bool keep) {
    EvolutionResult res;
    res.t = t;
    res.grid = fine.grid;
    auto coefficient = [kind](double l, double tt) -> cd {
        switch (kind) {
        case Kind::Schrodinger: return std::exp(-I * tt * l * l) * 2.0 * l;
        case Kind::Cosine: return std::cos(tt * l) * 2.0 * l;
        case Kind::Sine: return 2.0 * std::sin(tt * l);
        }
        return 0.0;
    };
    auto run = [&](const SpectralQuadrature& sq, std::vector<double>& norms, bool store) {
        const Grid& g = *sq.grid;
        const Eigen::Index N = static_cast<Eigen::Index>(g.size());
        const Eigen::Index Q = static_cast<Eigen::Index>(sq.lambda.size());
        const Eigen::Index T = static_cast<Eigen::Index>(t.size());
        Eigen::MatrixXcd Jm(Q, N);
        for (Eigen::Index q = 0; q < Q; ++q)
            for (Eigen::Index i = 0; i < N; ++i) Jm(q, i) = sq.jump[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
        Eigen::MatrixXcd C(T, Q);
        for (Eigen::Index k = 0; k < T; ++k)
            for (Eigen::Index q = 0; q < Q; ++q) {
                double l = sq.lambda[static_cast<std::size_t>(q)];
                C(k, q) = sq.weight[static_cast<std::size_t>(q)] * coefficient(l, t[static_cast<std::size_t>(k)]) / (2.0 * kPi * I);
            }
        Eigen::MatrixXcd Out = C * Jm;
        Eigen::VectorXd w(N);
        for (std::size_t s = 0; s < g.num_segments(); ++s)
            for (int j = 0; j < g.n(); ++j) w(static_cast<Eigen::Index>(g.index(s, j))) = g.weight(s, j);
        norms.resize(t.size());
        for (Eigen::Index k = 0; k < T; ++k) {
            norms[static_cast<std::size_t>(k)] = std::sqrt((Out.row(k).cwiseAbs2().transpose().cwiseProduct(w)).sum());
            if (store) {
                std::vector<cd> f(static_cast<std::size_t>(N));
                for (Eigen::Index i = 0; i < N; ++i) f[static_cast<std::size_t>(i)] = Out(k, i);
                res.fields.push_back(std::move(f));
            }
        }
    };
    run(fine, res.norm, keep);
    run(coarse, res.coarse_norm, false);
    double mx = 0.0;
    for (double x : res.norm) mx = std::max(mx, x);
    for (std::size_t k = 0; k < t.size(); ++k) {
        double denom = std::max(res.norm[k], 1e-6 * mx);
        if (denom > 0) res.max_rel_change = std::max(res.max_rel_change, std::abs(res.norm[k] - res.coarse_norm[k]) / denom);
    }
    res.refinement_needed = res.max_rel_change > 0.05;
    res.captured_fraction = fine.source_norm2 > 0 ? fine.captured / fine.source_norm2 : 1.0;
    res.tail_bound = fine.tail_bound();
    if (kind == Kind::Sine) res.tail_bound /= std::sqrt(fine.Lambda);
    return res;
}

double max_abs(const std::vector<double>& t) {
    double m = 0.0;
    for (double x : t) m = std::max(m, std::abs(x));
    return m;
}

EvolutionResult evolve(const CoefficientSpec& H, const Cutoff& chi, const std::function<cd(double)>& v,
                       const std::vector<double>& t_grid, double Lambda, Kind kind, bool keep) {
    double rate = max_abs(t_grid);
    if (kind == Kind::Schrodinger) rate *= 2.0 * std::sqrt(Lambda);
    double width = panel_width(rate);
    SpectralQuadrature fine = spectral_quadrature(H, chi, v, Lambda, width);
    SpectralQuadrature coarse = spectral_quadrature(H, chi, v, Lambda, 2.0 * width);
    return assemble(fine, coarse, t_grid, kind, keep);
}

} // namespace

double panel_width(double rate, double phase) {
    double w = 0.25;
    if (rate > 0) w = std::min(w, phase / rate);
    return w;
}

EvolutionResult schrodinger_evolve(const CoefficientSpec& H, const Cutoff& chi, const std::function<cd(double)>& v,
                                   const std::vector<double>& t_grid, double Lambda, bool keep_fields) {
    return evolve(H, chi, v, t_grid, Lambda, Kind::Schrodinger, keep_fields);
}

EvolutionResult wave_evolve(const CoefficientSpec& H, const Cutoff& chi, const std::function<cd(double)>& v,
                            const std::vector<double>& t_grid, double Lambda, WaveKind kind, bool keep_fields) {
    return evolve(H, chi, v, t_grid, Lambda, kind == WaveKind::Cosine ? Kind::Cosine : Kind::Sine, keep_fields);
}

double time_integral(const std::vector<double>& t, const std::vector<double>& norm, double T) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < t.size() && t[k] < T; ++k) {
        double t1 = std::min(t[k + 1], T);
        double frac = (t1 - t[k]) / (t[k + 1] - t[k]);
        double n1 = norm[k] * norm[k], n2 = norm[k + 1] * norm[k + 1];
        s += 0.5 * (t1 - t[k]) * (n1 + (n1 + frac * (n2 - n1)));
    }
    return s;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& samples, double t_lo, double t_hi) {
    DecayFit out;
    std::vector<double> x, y;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_lo || t[k] > t_hi) continue;
        if (!(samples[k] > 0)) {
            ++out.excluded;
            continue;
        }
        x.push_back(t[k]);
        y.push_back(std::log(samples[k]));
    }
    out.used = static_cast<int>(x.size());
    if (x.size() < 2) return out;
    LineFit f = fit_line(x, y);
    out.rate = -f.slope;
    out.r_squared = f.r_squared;
    return out;
}

} // namespace bvres
