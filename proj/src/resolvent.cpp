#include "bvres/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "bvres/parallel.hpp"

namespace bvres {

namespace {
const cd I(0.0, 1.0);

double japanese(double x) { return std::sqrt(1.0 + x * x); }

// node position nudged into the open panel, for one-sided evaluation
double inside(const Grid& g, std::size_t s, int j) {
    double x = g.x(s, j);
    if (j == 0) return std::nextafter(x, std::numeric_limits<double>::infinity());
    if (j == g.n() - 1) return std::nextafter(x, -std::numeric_limits<double>::infinity());
    return x;
}

double state_size(const State& y, double h) { return std::sqrt(std::norm(y.u) + std::norm(y.p / h)); }
} // namespace

SingularMatching::SingularMatching(double c)
    : std::runtime_error("singular matching: homogeneous solutions nearly dependent (condition " +
                         std::to_string(c) + "), possible eigenvalue or resonance"),
      condition(c) {}

std::shared_ptr<const Grid> resolvent_grid(const CoefficientSpec& spec, cd z, double R, std::vector<double> cuts,
                                           const ResolveOptions& opts) {
    std::vector<double> all = spec.breakpoints();
    std::sort(cuts.begin(), cuts.end());
    all = merge_breakpoints(all, cuts);
    std::vector<double> oc = opts.cuts;
    std::sort(oc.begin(), oc.end());
    all = merge_breakpoints(all, oc);
    std::vector<double> pts{-R};
    for (double x : all)
        if (x > -R && x < R) pts.push_back(x);
    pts.push_back(R);
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i], b = pts[i + 1];
        LocalCoeffs c = local_coeffs(spec, 0.5 * (a + b));
        double rate = 0.0;
        for (double t : {a, 0.25 * (3 * a + b), 0.5 * (a + b), 0.25 * (a + 3 * b), b}) {
            double al = c.alpha(t);
            cd k2 = wavenumber_squared(al, c.beta(t), c.b(t), c.V(t), spec.h, z);
            rate = std::max(rate, std::sqrt(std::abs(k2)) + std::abs(c.b(t)) / (spec.h * al));
        }
        double len = opts.max_panel;
        if (rate > 0) len = std::min(len, opts.panel_phase / rate);
        int m = std::max(1, static_cast<int>(std::ceil((b - a) / len - 1e-12)));
        for (int k = 0; k < m; ++k)
            segs.push_back({a + (b - a) * k / m, k + 1 == m ? b : a + (b - a) * (k + 1) / m});
    }
    return std::make_shared<const Grid>(std::move(segs), opts.nodes);
}

ResolventKernel::ResolventKernel(const CoefficientSpec& spec, SpectralPoint point, const ResolveOptions& opts)
    : spec_(spec), point_(point) {
    if (point.eps == 0.0 && !opts.outgoing && !opts.root_hint)
        throw std::invalid_argument("resolvent needs eps != 0 or the outgoing flag");
    if (point.eps == 0.0 && point.E <= 0.0 && !opts.root_hint)
        throw std::invalid_argument("outgoing resolvent needs E > 0");
    const cd z = point.z();
    const double h = spec.h;
    tl_ = left_tail(spec);
    tr_ = right_tail(spec);
    kL_ = decaying_root(wavenumber_squared(tl_.alpha, tl_.beta, tl_.b, tl_.V, h, z));
    kR_ = decaying_root(wavenumber_squared(tr_.alpha, tr_.beta, tr_.b, tr_.V, h, z));
    if (opts.root_hint) {
        auto pick = [&](cd k) { return (k * std::conj(*opts.root_hint)).real() >= 0 ? k : -k; };
        kL_ = pick(kL_);
        kR_ = pick(kR_);
    }
    if (opts.grid) {
        grid_ = opts.grid;
    } else {
        double R = opts.box_radius > 0 ? opts.box_radius : spec.support_radius() + 1.0;
        grid_ = resolvent_grid(spec, z, R, {}, opts);
    }
    const Grid& g = *grid_;
    std::vector<double> bps = spec.breakpoints();
    if (!bps.empty() && (bps.front() < g.left() || bps.back() > g.right()))
        throw std::invalid_argument("solve box must contain every coefficient breakpoint");
    for (const Atom& a : spec.V0.atoms)
        if (a.x <= g.left() || a.x >= g.right()) throw std::invalid_argument("V0 atom on or outside the solve box");

    left_ = sweep(spec, z, g, {1.0, -I * h * h * tl_.alpha * kL_}, true);
    right_ = sweep(spec, z, g, {1.0, I * h * h * tr_.alpha * kR_}, false);
    wronskian_.resize(g.size());
    beta_.resize(g.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < g.num_segments(); ++s) {
        Poly be = spec.beta.piece_at(g.segments()[s].mid());
        for (int j = 0; j < g.n(); ++j) {
            std::size_t k = g.index(s, j);
            wronskian_[k] = left_[k].u * right_[k].p - right_[k].u * left_[k].p;
            beta_[k] = be(g.x(s, j));
            double x = std::abs(g.x(s, j));
            if (x < best) {
                best = x;
                condition_ = std::abs(wronskian_[k]) / (state_size(left_[k], h) * state_size(right_[k], h) * h);
            }
        }
    }
    if (!(condition_ >= opts.singular_tol)) throw SingularMatching(condition_);
}

std::vector<cd> ResolventKernel::sample(const Source& src) const {
    const Grid& g = *grid_;
    std::vector<cd> f(g.size());
    for (std::size_t s = 0; s < g.num_segments(); ++s)
        for (int j = 0; j < g.n(); ++j) {
            double x = inside(g, s, j);
            f[g.index(s, j)] = std::abs(x) <= src.radius ? src.f(x) : cd(0.0);
        }
    return f;
}

SolutionField ResolventKernel::apply(const std::vector<cd>& f, bool with_residual) const {
    const Grid& g = *grid_;
    const int n = g.n();
    const std::size_t ns = g.num_segments();
    const double h = spec_.h;
    if (f.size() != g.size()) throw std::invalid_argument("source does not match the kernel grid");
    const Eigen::MatrixXd& C = g.rule().cumint;

    std::vector<cd> A(g.size()), B(g.size());
    Eigen::VectorXcd ga(n), gb(n);
    cd acc = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
        for (int j = 0; j < n; ++j) {
            std::size_t k = g.index(s, j);
            cd gk = f[k] / (beta_[k] * wronskian_[k]);
            ga(j) = left_[k].u * gk;
        }
        Eigen::VectorXcd ca = C * ga * g.segments()[s].half();
        for (int j = 0; j < n; ++j) A[g.index(s, j)] = acc + ca(j);
        acc += ca(n - 1);
    }
    acc = 0.0;
    for (std::size_t t = 0; t < ns; ++t) {
        std::size_t s = ns - 1 - t;
        for (int j = 0; j < n; ++j) {
            std::size_t k = g.index(s, j);
            cd gk = f[k] / (beta_[k] * wronskian_[k]);
            gb(j) = right_[k].u * gk;
        }
        Eigen::VectorXcd cb = C * gb * g.segments()[s].half();
        for (int j = 0; j < n; ++j) B[g.index(s, j)] = acc + (cb(n - 1) - cb(j));
        acc += cb(n - 1);
    }

    SolutionField out;
    out.grid = grid_;
    out.point = point_;
    out.h = h;
    out.k_left = kL_;
    out.k_right = kR_;
    out.alpha_left = tl_.alpha;
    out.alpha_right = tr_.alpha;
    out.rate_left = -I * tl_.b / (h * tl_.alpha) - I * kL_;
    out.rate_right = -I * tr_.b / (h * tr_.alpha) + I * kR_;
    out.matching_condition = condition_;
    out.v.resize(g.size());
    out.flux.resize(g.size());
    out.dv.resize(g.size());
    for (std::size_t s = 0; s < ns; ++s) {
        LocalCoeffs c = local_coeffs(spec_, g.segments()[s].mid());
        for (int j = 0; j < n; ++j) {
            std::size_t k = g.index(s, j);
            double x = g.x(s, j);
            out.v[k] = -left_[k].u * B[k] - right_[k].u * A[k];
            out.flux[k] = -left_[k].p * B[k] - right_[k].p * A[k];
            out.dv[k] = (out.flux[k] - I * h * c.b(x) * out.v[k]) / (h * h * c.alpha(x));
        }
    }
    if (with_residual) out.residual = residual(out, f);
    return out;
}

double ResolventKernel::residual(const SolutionField& field, const std::vector<cd>& f) const {
    const Grid& g = *grid_;
    OperatorImage img = apply_operator_unchecked(field.as_grid_function(), spec_);
    const cd z = point_.z();
    double err = 0.0, fs = 0.0, vs = 0.0, ps = 0.0;
    for (std::size_t s = 0; s < g.num_segments(); ++s) {
        LocalCoeffs c = local_coeffs(spec_, g.segments()[s].mid());
        for (int j = 0; j < g.n(); ++j) {
            std::size_t k = g.index(s, j);
            double x = g.x(s, j);
            err = std::max(err, std::abs(img.values[k] - z * field.v[k] - f[k]));
            fs = std::max(fs, std::abs(f[k]));
            double coef = std::abs(z) + std::abs(c.V(x)) + c.beta(x) * c.b(x) * c.b(x) / c.alpha(x);
            vs = std::max(vs, coef * std::abs(field.v[k]));
            ps = std::max(ps, std::abs(field.flux[k]));
        }
    }
    double scale = fs + vs;
    double ac = scale > 0 ? err / scale : err;
    double atomic = img.max_atomic_residue / (ps + vs + std::numeric_limits<double>::min());
    return std::max(ac, atomic);
}

cd SolutionField::value(double x) const {
    const Grid& g = *grid;
    if (x < g.left()) return v.front() * std::exp(rate_left * (x - g.left()));
    if (x > g.right()) return v.back() * std::exp(rate_right * (x - g.right()));
    return as_grid_function().value_at(x);
}

std::vector<cd> SolutionField::quasi_derivative() const {
    std::vector<cd> p(flux.size());
    for (std::size_t k = 0; k < flux.size(); ++k) p[k] = flux[k] / h;
    return p;
}

SolutionField solve(const CoefficientSpec& spec, const SpectralPoint& point, const Source& f,
                    const ResolveOptions& opts) {
    ResolveOptions o = opts;
    if (!o.grid) {
        double R = std::max({o.box_radius, f.radius, spec.support_radius() + 1.0});
        std::vector<double> cuts = f.cuts;
        cuts.push_back(-f.radius);
        cuts.push_back(f.radius);
        o.grid = resolvent_grid(spec, point.z(), R, cuts, o);
    }
    ResolventKernel K(spec, point, o);
    std::vector<cd> fs = K.sample(f);
    return K.apply(fs);
}

double tail_integral(double from, double decay, double s, bool rightward) {
    double x0 = rightward ? from : -from;
    boost::math::quadrature::exp_sinh<double> q;
    auto fn = [=](double t) { return std::pow(1.0 + (x0 + t) * (x0 + t), -s) * std::exp(-2.0 * decay * t); };
    return q.integrate(fn, 0.0, std::numeric_limits<double>::infinity());
}

namespace {
// integral over [lo, hi] inside panel s of <x>^{-2s}(|v|^2 + |p|^2)
double panel_part(const SolutionField& f, std::size_t seg, double lo, double hi, double s) {
    const Grid& g = *f.grid;
    const int n = g.n();
    Eigen::Map<const Eigen::VectorXcd> vv(f.v.data() + g.index(seg, 0), n);
    Eigen::Map<const Eigen::VectorXcd> pp(f.flux.data() + g.index(seg, 0), n);
    Eigen::VectorXcd cv = g.rule().to_coeffs.cast<cd>() * vv;
    Eigen::VectorXcd cp = g.rule().to_coeffs.cast<cd>() * pp;
    const Segment& sg = g.segments()[seg];
    auto fn = [&](double x) {
        double t = (x - sg.mid()) / sg.half();
        return std::pow(1 + x * x, -s) * (std::norm(chebyshev_eval(cv, t)) + std::norm(chebyshev_eval(cp, t) / f.h));
    };
    return boost::math::quadrature::gauss<double, 30>::integrate(fn, lo, hi);
}
} // namespace

double weighted_norm(const SolutionField& f, double s, std::optional<double> cutoff) {
    const Grid& g = *f.grid;
    const double R = cutoff ? *cutoff : -1.0;
    double total = 0.0;
    for (std::size_t seg = 0; seg < g.num_segments(); ++seg) {
        const Segment& sg = g.segments()[seg];
        // parts of the panel with |x| > R
        std::vector<std::pair<double, double>> parts;
        if (R < 0) parts.push_back({sg.a, sg.b});
        else {
            if (sg.a < -R) parts.push_back({sg.a, std::min(sg.b, -R)});
            if (sg.b > R) parts.push_back({std::max(sg.a, R), sg.b});
        }
        for (auto [lo, hi] : parts) {
            if (lo == sg.a && hi == sg.b) {
                for (int j = 0; j < g.n(); ++j) {
                    std::size_t k = g.index(seg, j);
                    double x = g.x(seg, j);
                    total += g.weight(seg, j) * std::pow(1 + x * x, -s) * (std::norm(f.v[k]) + std::norm(f.flux[k] / f.h));
                }
            } else if (hi > lo) {
                total += panel_part(f, seg, lo, hi, s);
            }
        }
    }
    // exterior tails
    {
        double start = std::max(g.right(), R);
        double decay = f.rate_right.real() < 0 ? -f.rate_right.real() : 0.0;
        double v2 = std::norm(f.v.back()) * std::exp(-2 * decay * (start - g.right()));
        double pfac = 1.0 + std::norm(f.h * f.alpha_right * f.k_right);
        total += v2 * pfac * tail_integral(start, decay, s, true);
    }
    {
        double start = std::min(g.left(), R < 0 ? g.left() : -R);
        double decay = f.rate_left.real() > 0 ? f.rate_left.real() : 0.0;
        double v2 = std::norm(f.v.front()) * std::exp(-2 * decay * (g.left() - start));
        double pfac = 1.0 + std::norm(f.h * f.alpha_left * f.k_left);
        total += v2 * pfac * tail_integral(start, decay, s, false);
    }
    return std::sqrt(total);
}

WeightPair WeightPair::japanese(double s) {
    auto w = [s](double x) { return std::pow(1 + x * x, -s / 2); };
    return {w, w, {}};
}

WeightPair WeightPair::exterior(double s, double R) {
    auto w = [s, R](double x) { return std::abs(x) > R ? std::pow(1 + x * x, -s / 2) : 0.0; };
    return {w, w, {-R, R}};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    LineFit r;
    if (n < 2) return r;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return r;
}

NormEstimate opnorm_estimate(const CoefficientSpec& spec, const SpectralPoint& point, const WeightPair& weights,
                             int probes, int iters, double truncation, std::uint64_t seed, const ResolveOptions& opts,
                             double target_gap) {
    if (probes < 1) throw std::invalid_argument("opnorm_estimate needs at least one probe");
    if (!(truncation > 0)) throw std::invalid_argument("opnorm_estimate needs a positive truncation radius");
    NormEstimate est;
    est.truncation = truncation;
    ResolveOptions o = opts;
    double R = std::max({o.box_radius, truncation, spec.support_radius() + 1.0});
    std::vector<double> cuts = weights.cuts;
    cuts.push_back(-truncation);
    cuts.push_back(truncation);
    o.grid = resolvent_grid(spec, point.z(), R, cuts, o);
    ResolventKernel K(spec, point, o);
    SpectralPoint conj_point{point.E, -point.eps, std::nullopt};
    ResolventKernel Kc(spec, conj_point, o);
    const Grid& g = *o.grid;

    std::vector<std::size_t> idx;
    std::vector<double> sw, win, wout, beta;
    for (std::size_t s = 0; s < g.num_segments(); ++s) {
        const Segment& sg = g.segments()[s];
        if (sg.a < -truncation || sg.b > truncation) continue;
        Poly be = spec.beta.piece_at(sg.mid());
        for (int j = 0; j < g.n(); ++j) {
            idx.push_back(g.index(s, j));
            sw.push_back(std::sqrt(g.weight(s, j)));
            double x = inside(g, s, j);
            win.push_back(weights.in(x));
            wout.push_back(weights.out(x));
            beta.push_back(be(g.x(s, j)));
        }
    }
    const std::size_t np = idx.size();
    const Eigen::Index b = probes;

    // Euclidean coordinates y = sqrt(w) g on the probe nodes
    auto apply_TstarT = [&](const Eigen::VectorXcd& y) {
        std::vector<cd> f(g.size(), 0.0);
        for (std::size_t i = 0; i < np; ++i) f[idx[i]] = win[i] * y(static_cast<Eigen::Index>(i)) / sw[i];
        SolutionField v = K.apply(f, false);
        std::vector<cd> f2(g.size(), 0.0);
        for (std::size_t i = 0; i < np; ++i) f2[idx[i]] = beta[i] * wout[i] * wout[i] * v.v[idx[i]];
        SolutionField w = Kc.apply(f2, false);
        Eigen::VectorXcd out(static_cast<Eigen::Index>(np));
        for (std::size_t i = 0; i < np; ++i) out(static_cast<Eigen::Index>(i)) = sw[i] * win[i] * w.v[idx[i]] / beta[i];
        return out;
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N01;
    Eigen::MatrixXcd X(static_cast<Eigen::Index>(np), b);
    for (Eigen::Index c = 0; c < b; ++c)
        for (Eigen::Index r = 0; r < X.rows(); ++r) X(r, c) = cd(N01(rng), N01(rng));
    X = Eigen::HouseholderQR<Eigen::MatrixXcd>(X).householderQ() * Eigen::MatrixXcd::Identity(X.rows(), b);

    double best = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXcd Y(X.rows(), b);
        for (Eigen::Index c = 0; c < b; ++c) Y.col(c) = apply_TstarT(X.col(c));
        Eigen::MatrixXcd H = X.adjoint() * Y;
        H = 0.5 * (H + H.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        Eigen::Index top = b - 1;
        double theta = std::max(0.0, es.eigenvalues()(top));
        Eigen::VectorXcd s1 = es.eigenvectors().col(top);
        double rnorm = (Y * s1 - theta * (X * s1)).norm();
        est.iterations = it + 1;
        if (Y.norm() == 0.0) {
            est.lower = est.upper = 0.0;
            est.lower_history.push_back(0.0);
            est.converged = true;
            return est;
        }
        best = std::max(best, std::sqrt(theta));
        est.lower = best;
        est.lower_history.push_back(best);
        est.upper = std::max(best, std::sqrt(theta + rnorm));
        if (est.upper - est.lower <= target_gap * est.lower) {
            est.converged = true;
            break;
        }
        Eigen::MatrixXcd Z = Y * es.eigenvectors();
        X = Eigen::HouseholderQR<Eigen::MatrixXcd>(Z).householderQ() * Eigen::MatrixXcd::Identity(X.rows(), b);
    }
    return est;
}

NormReport lap_sweep(const CoefficientSpec& spec, double s, const std::vector<double>& h_grid, double E, double eps,
                     const SweepOptions& opts) {
    if (h_grid.empty()) throw std::invalid_argument("lap_sweep needs at least one h");
    NormReport rep;
    rep.s = s;
    rep.E = E;
    rep.eps = eps;
    rep.exterior_radius = opts.exterior_radius;
    rep.truncation = opts.truncation;
    rep.rows.resize(h_grid.size());
    parallel_for(h_grid.size(), [&](std::size_t i) {
        SweepRow& row = rep.rows[i];
        row.h = h_grid[i];
        try {
            CoefficientSpec sp = spec;
            sp.h = h_grid[i];
            SpectralPoint pt{E, eps, std::nullopt};
            if (opts.exterior) {
                row.exterior = opnorm_estimate(sp, pt, WeightPair::exterior(s, opts.exterior_radius), opts.probes,
                                               opts.iters, opts.truncation, opts.seed + i, opts.resolve);
                row.h_times_exterior = row.h * row.exterior.lower;
            }
            if (opts.full) {
                row.full = opnorm_estimate(sp, pt, WeightPair::japanese(s), opts.probes, opts.iters, opts.truncation,
                                           opts.seed + 1000 + i, opts.resolve);
                row.h_log_full = row.h * std::log(row.full.lower);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    std::vector<double> lx, ly, ix, iy;
    for (const SweepRow& r : rep.rows) {
        if (!r.error.empty()) continue;
        if (opts.exterior && r.exterior.lower > 0) {
            lx.push_back(std::log(1.0 / r.h));
            ly.push_back(std::log(r.exterior.lower));
        }
        if (opts.full && r.full.lower > 0) {
            ix.push_back(1.0 / r.h);
            iy.push_back(std::log(r.full.lower));
        }
    }
    rep.exterior_growth = fit_line(lx, ly);
    rep.full_growth = fit_line(ix, iy);
    return rep;
}

} // namespace bvres
