#include "bvres/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "bvres/operator.hpp"

namespace bvres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - S(t) with S the quintic smoothstep, as a polynomial in t
Poly taper_poly() { return Poly(std::vector<double>{1.0, 0.0, 0.0, -10.0, 15.0, -6.0}); }

// p(c * x)
Poly scaled(const Poly& p, double c) {
    std::vector<double> out(p.coeffs());
    double f = 1.0;
    for (double& v : out) {
        v *= f;
        f *= c;
    }
    return Poly(out);
}

double midpoint(const std::vector<double>& bp, std::size_t i) {
    if (bp.empty()) return 0.0;
    if (i == 0) return bp.front() - 1.0;
    if (i == bp.size()) return bp.back() + 1.0;
    return 0.5 * (bp[i - 1] + bp[i]);
}

double piece_lo(const std::vector<double>& bp, std::size_t i) { return i == 0 ? -kInf : bp[i - 1]; }
double piece_hi(const std::vector<double>& bp, std::size_t i) { return i == bp.size() ? kInf : bp[i]; }

// alpha (E - V1) + beta (alpha^2 phi'^2 + b1^2)
PiecewiseBV tau_numerator(const CoefficientSpec& spec, const PiecewiseBV& dphi, double E) {
    const PiecewiseBV& a = spec.alpha;
    return a * (PiecewiseBV::constant(E) - spec.V1) + spec.beta * (a * a * dphi * dphi + spec.b1 * spec.b1);
}

// inf of num/den over the pieces overlapping (lo, hi)
double rational_inf(const PiecewiseBV& num, const PiecewiseBV& den, double lo, double hi) {
    std::vector<double> bp = merge_breakpoints(num.breakpoints(), den.breakpoints());
    double best = kInf;
    for (std::size_t i = 0; i <= bp.size(); ++i) {
        double a = std::max(piece_lo(bp, i), lo), b = std::min(piece_hi(bp, i), hi);
        if (a >= b) continue;
        double m = midpoint(bp, i);
        best = std::min(best, rational_min(num.piece_at(m), den.piece_at(m), a, b));
    }
    return best;
}

double abs_rational_integral(const Poly& num, const Poly& den, double a, double b) {
    if (num.is_zero() || b <= a) return 0.0;
    if (den.is_constant()) return integrate_abs(num, a, b) / std::abs(den(0.0));
    std::vector<double> cuts{a};
    for (double r : real_roots(num, a, b))
        if (r > a && r < b) cuts.push_back(r);
    cuts.push_back(b);
    double total = 0.0;
    auto fn = [&](double x) { return num(x) / den(x); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += std::abs(boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, cuts[i], cuts[i + 1], 8, 1e-14));
    return total;
}

} // namespace

double PhaseSpec::dphi(double x) const {
    if (k == 0.0 || R1 <= 0.0) return 0.0;
    double ax = std::abs(x), sg = x < 0 ? -1.0 : 1.0;
    if (x == 0.0) return 0.0;
    if (ax <= R1) return sg * k;
    if (ax >= 2 * R1) return 0.0;
    return sg * k * taper_poly()((ax - R1) / R1);
}

double PhaseSpec::phi(double x) const {
    if (k == 0.0 || R1 <= 0.0) return 0.0;
    double ax = std::abs(x);
    if (ax <= R1) return k * ax;
    double t = std::min(1.0, (ax - R1) / R1);
    double t4 = t * t * t * t;
    return k * R1 + k * R1 * (t - (t4 * t * t - 3.0 * t4 * t + 2.5 * t4));
}

PiecewiseBV PhaseSpec::dphi_bv() const {
    if (k == 0.0 || R1 <= 0.0) return PiecewiseBV();
    Poly p = taper_poly();
    Poly right = k * scaled(p, 1.0 / R1).shifted(-R1);
    Poly left = -k * scaled(p, -1.0 / R1).shifted(R1);
    return PiecewiseBV({-2 * R1, -R1, 0.0, R1, 2 * R1}, {Poly(), left, Poly(-k), Poly(k), right, Poly()});
}

std::vector<double> PhaseSpec::breakpoints() const {
    if (k == 0.0 || R1 <= 0.0) return {};
    return {-2 * R1, -R1, 0.0, R1, 2 * R1};
}

double compute_tau(const CoefficientSpec& spec, const PhaseSpec& phase, double E) {
    return rational_inf(tau_numerator(spec, phase.dphi_bv(), E), spec.beta, -kInf, kInf);
}

double exterior_infimum(const CoefficientSpec& spec, double E, double R1) {
    PiecewiseBV num = tau_numerator(spec, PiecewiseBV(), E);
    return std::min(rational_inf(num, spec.beta, -kInf, -R1), rational_inf(num, spec.beta, R1, kInf));
}

PhaseSpec choose_phase_slope(const CoefficientSpec& spec, double E, double R1, double tau_target) {
    double ext = exterior_infimum(spec, E, R1);
    if (!(ext > 0)) throw HypothesisFailure("hypothesis (general inf) fails");
    if (tau_target < 0) tau_target = 0.5 * ext;
    constexpr int per_decade = 64;
    const double step = std::pow(10.0, 1.0 / per_decade);
    PhaseSpec ph{R1, 0.0, step};
    if (compute_tau(spec, ph, E) >= tau_target) return ph;
    if (R1 <= 0) throw HypothesisFailure("hypothesis (general inf) fails");
    // tau is nondecreasing in k: bisect on the index grid k_i = 1e-4 * step^i
    auto k_at = [&](int i) { return 1e-4 * std::pow(10.0, static_cast<double>(i) / per_decade); };
    int lo = -1, hi = 10 * per_decade;
    ph.k = k_at(hi);
    if (compute_tau(spec, ph, E) < tau_target)
        throw HypothesisFailure("no phase slope up to 1e6 reaches the tau target");
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        ph.k = k_at(mid);
        if (compute_tau(spec, ph, E) >= tau_target) hi = mid;
        else lo = mid;
    }
    ph.k = k_at(hi);
    return ph;
}

PositiveDensity::PositiveDensity(std::vector<double> bp, std::vector<std::vector<RationalTerm>> pieces)
    : bp_(std::move(bp)), pieces_(std::move(pieces)) {}

void PositiveDensity::add(const PiecewiseBV& num, const PiecewiseBV& den, double scale) {
    std::vector<double> bp = merge_breakpoints(bp_, merge_breakpoints(num.breakpoints(), den.breakpoints()));
    std::vector<std::vector<RationalTerm>> pieces(bp.size() + 1);
    for (std::size_t i = 0; i <= bp.size(); ++i) {
        double m = midpoint(bp, i);
        std::size_t old = static_cast<std::size_t>(std::upper_bound(bp_.begin(), bp_.end(), m) - bp_.begin());
        pieces[i] = pieces_[old];
        Poly n = scale * num.piece_at(m);
        if (!n.is_zero()) pieces[i].push_back({n, den.piece_at(m)});
    }
    bp_ = std::move(bp);
    pieces_ = std::move(pieces);
}

double PositiveDensity::operator()(double x) const {
    std::size_t i = static_cast<std::size_t>(std::upper_bound(bp_.begin(), bp_.end(), x) - bp_.begin());
    double s = 0.0;
    for (const auto& t : pieces_[i]) s += std::abs(t.num(x) / t.den(x));
    return s;
}

double PositiveDensity::integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    double total = 0.0;
    for (std::size_t i = 0; i <= bp_.size(); ++i) {
        double lo = std::max(piece_lo(bp_, i), a), hi = std::min(piece_hi(bp_, i), b);
        if (lo >= hi) continue;
        for (const auto& t : pieces_[i]) {
            if (t.num.is_zero()) continue;
            if (std::isinf(lo) || std::isinf(hi)) return kInf;
            total += abs_rational_integral(t.num, t.den, lo, hi);
        }
    }
    return total;
}

double PositiveDensity::total() const { return integral(-kInf, kInf); }

bool PositiveDensity::polynomial() const {
    for (const auto& p : pieces_)
        for (const auto& t : p)
            if (!t.den.is_constant()) return false;
    return true;
}

PiecewiseBV PositiveDensity::to_bv() const {
    if (!polynomial()) throw std::logic_error("density has a non-constant denominator");
    std::vector<double> bp = bp_;
    for (std::size_t i = 0; i <= bp_.size(); ++i)
        for (const auto& t : pieces_[i])
            for (double r : real_roots(t.num, piece_lo(bp_, i), piece_hi(bp_, i)))
                if (r > piece_lo(bp_, i) && r < piece_hi(bp_, i)) bp.push_back(r);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<Poly> out;
    for (std::size_t i = 0; i <= bp.size(); ++i) {
        double m = midpoint(bp, i);
        std::size_t old = static_cast<std::size_t>(std::upper_bound(bp_.begin(), bp_.end(), m) - bp_.begin());
        Poly acc;
        for (const auto& t : pieces_[old]) {
            double sg = t.num(m) / t.den(0.0) < 0 ? -1.0 : 1.0;
            acc = acc + (sg / t.den(0.0)) * t.num;
        }
        out.push_back(acc);
    }
    return PiecewiseBV(bp, out).simplified();
}

double RemainderMeasure::atom_mass(double x) const {
    for (const auto& a : atoms)
        if (a.x == x) return a.mass;
    return 0.0;
}

double RemainderMeasure::total() const {
    double t = density.total();
    for (const auto& a : atoms) t += a.mass;
    return t;
}

SignedMeasure RemainderMeasure::to_signed_measure() const { return SignedMeasure(density.to_bv(), atoms); }

namespace {

// sum |c_i| |x|^i over both adjacent pieces: the rounding scale of the
// one-sided values at a breakpoint
double evaluation_scale(const PiecewiseBV& f, double x) {
    auto one = [x](const Poly& p) {
        double s = 0.0, xp = 1.0;
        for (double c : p.coeffs()) {
            s += std::abs(c) * xp;
            xp *= std::abs(x);
        }
        return s;
    };
    const auto& bp = f.breakpoints();
    std::size_t i = static_cast<std::size_t>(std::lower_bound(bp.begin(), bp.end(), x) - bp.begin());
    return one(f.pieces()[i]) + one(f.pieces()[std::min(i + 1, f.pieces().size() - 1)]);
}

// jumps below the evaluation rounding of the monomial pieces are not atoms
bool rounding_jump(double jump, double scale) {
    return std::abs(jump) <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

} // namespace

RemainderMeasure build_mu(const CoefficientSpec& spec, const PhaseSpec& phase, double E) {
    const double h = spec.h;
    const PiecewiseBV& alpha = spec.alpha;
    const PiecewiseBV& beta = spec.beta;
    const PiecewiseBV b = spec.b();
    const PiecewiseBV dphi = phase.dphi_bv();
    const PiecewiseBV one = PiecewiseBV::constant(1.0);
    RemainderMeasure mu;
    std::vector<Atom> atoms;

    // h^-1 |alpha^-1 (b1^2 - b^2) + beta^-1 V0|
    mu.density.add((spec.b1 * spec.b1 - b * b) * beta + alpha * spec.V0.density, alpha * beta, 1.0 / h);
    for (const auto& a : spec.V0.atoms) atoms.push_back({a.x, std::abs(a.mass) / spec.beta(a.x) / h});

    // |alpha^A d(phi')|
    SignedMeasure ddphi = derivative_measure(dphi);
    mu.density.add(alpha * ddphi.density, one);
    for (const auto& a : ddphi.atoms)
        if (!rounding_jump(a.mass, evaluation_scale(dphi, a.x))) atoms.push_back({a.x, std::abs(alpha(a.x) * a.mass)});

    // |(phi')^A d alpha|
    SignedMeasure dalpha = derivative_measure(alpha);
    mu.density.add(dphi * dalpha.density, one);
    for (const auto& a : dalpha.atoms) atoms.push_back({a.x, std::abs(dphi(a.x) * a.mass)});

    // 4 h^-1 |phi'| (b^2 + |b|)
    mu.density.add(dphi * b * b, one, 4.0 / h);
    mu.density.add(dphi * b, one, 4.0 / h);

    // |d(N / beta)|
    PiecewiseBV N = tau_numerator(spec, dphi, E);
    std::vector<double> bp = merge_breakpoints(N.breakpoints(), beta.breakpoints());
    PiecewiseBV Nr = N.refined(bp), br = beta.refined(bp);
    std::vector<Poly> num, den;
    for (std::size_t i = 0; i <= bp.size(); ++i) {
        const Poly& n = Nr.pieces()[i];
        const Poly& d = br.pieces()[i];
        num.push_back(n.derivative() * d - n * d.derivative());
        den.push_back(d * d);
    }
    mu.density.add(PiecewiseBV(bp, num), PiecewiseBV(bp, den));
    for (double x : bp) {
        double jump = N.right(x) / beta.right(x) - N.left(x) / beta.left(x);
        double scale = evaluation_scale(N, x) / std::min(beta.right(x), beta.left(x)) +
                       std::abs(N.right(x)) * evaluation_scale(beta, x) / std::pow(std::min(beta.right(x), beta.left(x)), 2);
        if (!rounding_jump(jump, scale)) atoms.push_back({x, std::abs(jump)});
    }

    mu.atoms = normalize_atoms(atoms);
    return mu;
}

double CarlemanWeight::q1(double x, double eta) const {
    double sg = x < 0 ? -1.0 : 1.0;
    double v = x < 0 ? mu.density.integral(x, 0.0) : mu.density.integral(0.0, x);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        double xj = atoms[j].x;
        v += sg * W[j] * 0.5 * (std::erf((x - xj) / eta) + std::erf(xj / eta));
    }
    return v;
}

double CarlemanWeight::q2(double x) const {
    double y = x * x / (1.0 + x * x);
    if (y == 0.0) return 0.0;
    return kappa * 0.5 * boost::math::beta(0.5, s - 0.5, y);
}

double CarlemanWeight::q2_max() const { return kappa * 0.5 * boost::math::beta(0.5, s - 0.5); }

double CarlemanWeight::w(double x, double eta) const {
    if (x == 0.0) return 0.0;
    double v = std::exp(q1(x, eta)) * std::expm1(q2(x));
    return x < 0 ? -v : v;
}

double CarlemanWeight::dw(double x, double eta) const {
    double bumps = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        double t = (x - atoms[j].x) / eta;
        bumps += W[j] * std::exp(-t * t);
    }
    bumps /= std::sqrt(std::numbers::pi) * eta;
    double q = q1(x, eta);
    return kappa * std::pow(1.0 + x * x, -s) * std::exp(q + q2(x)) + std::abs(w(x, eta)) * (mu.density(x) + bumps);
}

double CarlemanWeight::limit_at_atom(std::size_t j) const { return limit_near_atom(j, 0.0); }

double CarlemanWeight::limit_near_atom(std::size_t j, double y) const {
    double xj = atoms[j].x;
    double sg = xj < 0 ? -1.0 : 1.0;
    double extra = 0.5 * W[j] * (1.0 + sg * std::erf(y));
    return std::exp(Gamma[j] + extra) * std::expm1(q2(xj));
}

double CarlemanWeight::log_Cw() const {
    double sw = 0.0;
    for (double x : W) sw += x;
    return mu_c_total + sw + std::log(std::expm1(q2_max()));
}

double CarlemanWeight::min_atom_gap() const {
    double gap = kInf;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        gap = std::min(gap, std::abs(atoms[j].x));
        if (j > 0) gap = std::min(gap, atoms[j].x - atoms[j - 1].x);
    }
    return gap;
}

CarlemanWeight build_weight(const CoefficientSpec& spec, const PhaseSpec& phase, double E, double s) {
    if (!(s > 0.5)) throw std::invalid_argument("weight exponent s must exceed 1/2");
    CarlemanWeight cw;
    cw.tau = compute_tau(spec, phase, E);
    if (!(cw.tau > 0)) throw HypothesisFailure("hypothesis (general inf) fails: tau <= 0 for this phase");
    cw.s = s;
    cw.kappa = std::max(2.0, 1.0 / cw.tau);
    cw.M = std::max(2.0, 8.0 / cw.tau);
    cw.mu = build_mu(spec, phase, E);
    cw.mu_c_total = cw.mu.density.total();
    for (const auto& a : cw.mu.atoms) {
        if (a.x == 0.0) continue;
        cw.atoms.push_back(a);
        cw.W.push_back(cw.M * a.mass);
        cw.gamma.push_back(std::exp(-cw.M * a.mass / 4.0));
    }
    for (std::size_t j = 0; j < cw.atoms.size(); ++j) {
        double xj = cw.atoms[j].x;
        double g = xj < 0 ? cw.mu.density.integral(xj, 0.0) : cw.mu.density.integral(0.0, xj);
        for (std::size_t l = 0; l < cw.atoms.size(); ++l) {
            double xl = cw.atoms[l].x;
            if (xj > 0 ? (xl > 0 && xl < xj) : (xl < 0 && xl > xj)) g += cw.W[l];
        }
        cw.Gamma.push_back(g);
    }
    return cw;
}

std::pair<double, double> atom_inequalities(double tau, double M, double mu) {
    double t = M * mu;
    std::pair<double, double> r;
    if (t < 600) {
        r.first = tau * std::exp(t) - 1.0 - 2.0 * mu * std::exp(0.75 * t);
        r.second = 2.0 * std::expm1(0.5 * t) - mu * std::exp(0.25 * t);
    } else {
        double a = tau - std::exp(-t) - 2.0 * mu * std::exp(-0.25 * t);
        double b = 2.0 * (1.0 - std::exp(-0.5 * t)) - mu * std::exp(-0.25 * t);
        r.first = a > 0 ? kInf : (a < 0 ? -kInf : 0.0);
        r.second = b > 0 ? kInf : (b < 0 ? -kInf : 0.0);
    }
    return r;
}

std::vector<std::pair<double, double>> check_atom_inequalities(const CarlemanWeight& weight) {
    std::vector<std::pair<double, double>> out;
    for (const auto& a : weight.atoms) out.push_back(atom_inequalities(weight.tau, weight.M, a.mass));
    return out;
}

EstimateSides evaluate_estimate(const CoefficientSpec& spec, const PhaseSpec& phase, double s, const SolutionField& v,
                                const std::vector<cd>& g) {
    const Grid& grid = *v.grid;
    if (grid.size() != g.size()) throw std::invalid_argument("evaluate_estimate: source size mismatch");
    const double h = v.h;
    const PiecewiseBV dphi = phase.dphi_bv();
    std::vector<cd> p = v.quasi_derivative();
    EstimateSides out;
    double mass = 0.0;
    for (std::size_t seg = 0; seg < grid.num_segments(); ++seg) {
        double mid = grid.segments()[seg].mid();
        const Poly& a = spec.alpha.piece_at(mid);
        const Poly& dp = dphi.piece_at(mid);
        for (int j = 0; j < grid.n(); ++j) {
            std::size_t i = grid.index(seg, j);
            double x = grid.x(seg, j), wq = grid.weight(seg, j);
            double jx = 1.0 + x * x;
            double e = std::exp(2.0 * phase.phi(x) / h);
            cd dq = p[i] + a(x) * dp(x) * v.v[i];
            out.lhs += wq * std::pow(jx, -s) * e * (std::norm(v.v[i]) + std::norm(dq));
            out.rhs_f += wq * std::pow(jx, s) * std::norm(g[i]);
            mass += wq * std::norm(v.v[i]);
        }
    }
    double xl = grid.left(), xr = grid.right();
    if (std::max(-xl, xr) < 2 * phase.R1 && phase.k > 0)
        throw std::invalid_argument("evaluate_estimate: solution box must contain the phase support");
    double e = std::exp(2.0 * phase.sup_phi() / h);
    double dr = -v.rate_right.real(), dl = v.rate_left.real();
    if (!(dr > 0) || !(dl > 0)) {
        out.lhs = out.rhs_eps = kInf;
        return out;
    }
    double pr = 1.0 + std::norm(h * v.alpha_right * v.k_right);
    double pl = 1.0 + std::norm(h * v.alpha_left * v.k_left);
    out.lhs += e * (std::norm(v.v.back()) * pr * tail_integral(xr, dr, s, true) +
                    std::norm(v.v.front()) * pl * tail_integral(xl, dl, s, false));
    mass += std::norm(v.v.back()) / (2 * dr) + std::norm(v.v.front()) / (2 * dl);
    out.rhs_eps = std::abs(v.point.eps) * mass;
    return out;
}

EstimateSides evaluate_estimate(const CoefficientSpec& spec, const PhaseSpec& phase, const SpectralPoint& point,
                                double s, const Source& f, ResolveOptions opts) {
    for (double c : phase.breakpoints()) opts.cuts.push_back(c);
    for (double c : f.cuts) opts.cuts.push_back(c);
    double R = std::max({f.radius, 2 * phase.R1, spec.support_radius()}) + 1.0;
    opts.box_radius = std::max(opts.box_radius, R);
    ResolventKernel kernel(spec, point, opts);
    Source g = f;
    g.f = [&f, s](double x) { return std::pow(1.0 + x * x, -s / 2) * f.f(x); };
    std::vector<cd> gs = kernel.sample(g);
    SolutionField v = kernel.apply(gs);
    return evaluate_estimate(spec, phase, s, v, gs);
}

double ConstantReport::C() const { return std::exp(log_C); }

ConstantReport constant_report(const CoefficientSpec& spec, const PhaseSpec& phase, const CarlemanWeight& weight,
                               const SpectralPoint& point) {
    const double h = spec.h;
    const double ib = spec.inf_beta(), ia = spec.inf_alpha(), sa = spec.alpha.sup();
    const double eps = std::abs(point.eps);
    const double b0l2sq = std::pow(spec.b0_l2(), 2);
    const double b1sq = std::pow(spec.b1_sup(), 2);
    const double aphi_sq = std::pow((spec.alpha * phase.dphi_bv()).sup_abs(), 2);
    const double EV = (PiecewiseBV::constant(point.E) - spec.V1).sup_abs();

    const double log_cw = weight.log_Cw();
    const double log_e = 2.0 * phase.sup_phi() / h;
    const double rho = std::pow(std::max(1.0, 1.0 / ib), 2);

    // sup norm interpolation |v|_inf^2 <= a |v|^2 + (gamma/2) int alpha |h v'|^2
    const double K = spec.V0_norm() / ib + 4.0 * b0l2sq / ia;
    const double gamma = K > 0 ? 1.0 / (2.0 * K) : 1.0;
    const double a = 1.0 / (2.0 * h * h * gamma * ia);
    // int alpha |h v'|^2 <= 2 |g|^2 / inf beta + 4 (c1 + K a) |v|^2
    const double c1 = 0.5 / ib + EV / ib + 4.0 * b1sq / ia;
    // |(h alpha d + i b) u|^2 + |u|^2 <= e^{2 sup phi / h} (Qf |g|^2 + (Qv + 1) |v|^2)
    const double cA = 2.0 * sa + 2.0 * gamma * b0l2sq;
    const double Qf = 2.0 * cA / ib;
    const double Qv = 4.0 * cA * (c1 + K * a) + 4.0 * (aphi_sq + b1sq) + 4.0 * b0l2sq * a;

    const double log_pref = log_cw + log_e;
    // coefficient of rhs_f: h^-2 C_w rho e + |eps| C_w e Qf / (h inf beta)
    const double cf = rho / (h * h) + eps * Qf / (h * ib);
    // coefficient of rhs_eps = |eps| |v|^2: C_w e (Qv + 1) / (h inf beta)
    const double ce = (Qv + 1.0) / (h * ib);

    ConstantReport r;
    r.log_C = log_pref + std::log(std::max(cf, ce));
    r.factors = {
        {"tau", weight.tau, "infimum of the threshold function"},
        {"kappa", weight.kappa, "max(2, 1/tau)"},
        {"M", weight.M, "max(2, 8/tau)"},
        {"mu_c_total", weight.mu_c_total, "continuous part of the remainder measure"},
        {"log_C_w", log_cw, "mu_c(R) + sum W + log(exp(q2_max) - 1)"},
        {"log_exp_2supphi_over_h", log_e, "2 sup phi / h"},
        {"rho", rho, "max(1, 1/inf beta)^2 from the source term"},
        {"K", K, "|V0| / inf beta + 4 |b0|_2^2 / inf alpha"},
        {"gamma", gamma, "Young parameter 1 / (2K)"},
        {"a", a, "1 / (2 h^2 gamma inf alpha)"},
        {"c1", c1, "1/(2 inf beta) + |E - V1|_inf / inf beta + 4 |b1|_inf^2 / inf alpha"},
        {"cA", cA, "2 sup alpha + 2 gamma |b0|_2^2"},
        {"Qf", Qf, "source coefficient of the gradient bound"},
        {"Qv", Qv, "mass coefficient of the gradient bound"},
        {"coef_f", cf, "rhs_f coefficient divided by C_w e^{2 sup phi/h}"},
        {"coef_eps", ce, "rhs_eps coefficient divided by C_w e^{2 sup phi/h}"},
        {"log_C", r.log_C, "log of the assembled constant"},
    };
    return r;
}

} // namespace bvres
