#include "bvres/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bvres {

namespace {

ChebyshevRule build_rule(int n) {
    ChebyshevRule r;
    r.n = n;
    const int m = n - 1;
    r.t.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) r.t[static_cast<std::size_t>(j)] = -std::cos(M_PI * j / m);
    // T_k(t_j)
    Eigen::MatrixXd V(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) V(j, k) = std::cos(k * std::acos(std::clamp(r.t[static_cast<std::size_t>(j)], -1.0, 1.0)));
    Eigen::MatrixXd Vinv = V.inverse();
    r.to_coeffs = Vinv;

    // derivative in coefficient space
    Eigen::MatrixXd Dc = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k)
        for (int i = k - 1; i >= 0; i -= 2) Dc(i, k) = (i == 0 ? 1.0 : 2.0) * k;
    r.diff = V * Dc * Vinv;

    // antiderivative in coefficient space (degree grows by one; drop the top term,
    // which is below rounding for resolved data), then subtract value at -1
    Eigen::MatrixXd Ic = Eigen::MatrixXd::Zero(n + 1, n);
    for (int k = 0; k < n; ++k) {
        if (k == 0) Ic(1, 0) += 1.0;
        else if (k == 1) Ic(2, 1) += 0.25;
        else {
            Ic(k + 1, k) += 1.0 / (2.0 * (k + 1));
            Ic(k - 1, k) -= 1.0 / (2.0 * (k - 1));
        }
    }
    Eigen::MatrixXd Vext(n, n + 1);
    Eigen::RowVectorXd at_minus1(n + 1);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k <= n; ++k)
            Vext(j, k) = std::cos(k * std::acos(std::clamp(r.t[static_cast<std::size_t>(j)], -1.0, 1.0)));
    for (int k = 0; k <= n; ++k) at_minus1(k) = (k % 2 == 0) ? 1.0 : -1.0;
    Eigen::MatrixXd P = Vext * Ic;
    Eigen::RowVectorXd p0 = at_minus1 * Ic;
    r.cumint = (P - Eigen::VectorXd::Ones(n) * p0) * Vinv;

    // Clenshaw-Curtis weights: integral over [-1,1] is the last row of cumint
    r.w.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) r.w[static_cast<std::size_t>(j)] = r.cumint(n - 1, j);
    return r;
}

} // namespace

const ChebyshevRule& chebyshev_rule(int n) {
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<ChebyshevRule>> cache;
    if (n < 2) throw std::invalid_argument("chebyshev rule needs at least two nodes");
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<ChebyshevRule>(build_rule(n));
    return *slot;
}

double chebyshev_eval(const Eigen::VectorXd& c, double t) {
    // Clenshaw recurrence
    double b1 = 0.0, b2 = 0.0;
    for (Eigen::Index k = c.size() - 1; k >= 1; --k) {
        double b0 = 2.0 * t * b1 - b2 + c(k);
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c(0);
}

cd chebyshev_eval(const Eigen::VectorXcd& c, double t) {
    cd b1 = 0.0, b2 = 0.0;
    for (Eigen::Index k = c.size() - 1; k >= 1; --k) {
        cd b0 = 2.0 * t * b1 - b2 + c(k);
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c(0);
}

Grid::Grid(std::vector<Segment> segments, int nodes_per_segment)
    : n_(nodes_per_segment), rule_(&chebyshev_rule(nodes_per_segment)), segs_(std::move(segments)) {
    if (segs_.empty()) throw std::invalid_argument("grid needs at least one segment");
    for (std::size_t i = 0; i < segs_.size(); ++i) {
        if (!(segs_[i].b > segs_[i].a)) throw std::invalid_argument("empty grid segment");
        if (i > 0 && segs_[i].a != segs_[i - 1].b) throw std::invalid_argument("grid segments must be contiguous");
    }
}

std::size_t Grid::locate(double x) const {
    auto it = std::upper_bound(segs_.begin(), segs_.end(), x, [](double v, const Segment& s) { return v < s.a; });
    std::size_t i = it == segs_.begin() ? 0 : static_cast<std::size_t>(it - segs_.begin()) - 1;
    return std::min(i, segs_.size() - 1);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out;
    out.reserve(size());
    for (std::size_t s = 0; s < segs_.size(); ++s)
        for (int j = 0; j < n_; ++j) out.push_back(x(s, j));
    return out;
}

std::shared_ptr<const Grid> make_grid(double lo, double hi, const std::vector<double>& cuts, double max_len,
                                      int nodes_per_segment) {
    if (!(hi > lo)) throw std::invalid_argument("make_grid: need lo < hi");
    std::vector<double> pts{lo};
    std::vector<double> c = cuts;
    std::sort(c.begin(), c.end());
    for (double x : c)
        if (x > lo && x < hi && x > pts.back()) pts.push_back(x);
    pts.push_back(hi);
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double len = pts[i + 1] - pts[i];
        int m = std::max(1, static_cast<int>(std::ceil(len / max_len - 1e-12)));
        for (int k = 0; k < m; ++k) {
            double a = pts[i] + len * k / m;
            double b = (k + 1 == m) ? pts[i + 1] : pts[i] + len * (k + 1) / m;
            segs.push_back({a, b});
        }
    }
    return std::make_shared<const Grid>(std::move(segs), nodes_per_segment);
}

std::vector<cd> differentiate(const Grid& g, const std::vector<cd>& v) {
    std::vector<cd> out(v.size());
    const int n = g.n();
    const auto& D = g.rule().diff;
    for (std::size_t s = 0; s < g.num_segments(); ++s) {
        Eigen::Map<const Eigen::VectorXcd> in(v.data() + g.index(s, 0), n);
        Eigen::Map<Eigen::VectorXcd> o(out.data() + g.index(s, 0), n);
        o = (D.cast<cd>() * in) / g.segments()[s].half();
    }
    return out;
}

GridFunction GridFunction::from_values(std::shared_ptr<const Grid> g, std::vector<cd> values) {
    if (values.size() != g->size()) throw std::invalid_argument("value count does not match grid");
    std::vector<cd> d = differentiate(*g, values);
    return GridFunction{std::move(g), std::move(values), std::move(d)};
}

cd GridFunction::value_at(double x) const {
    const Grid& g = *grid;
    std::size_t s = g.locate(x);
    const Segment& seg = g.segments()[s];
    const int n = g.n();
    if (x == seg.a && s > 0) return 0.5 * (u[g.index(s, 0)] + u[g.index(s - 1, n - 1)]);
    if (x == seg.a) return u[g.index(s, 0)];
    if (x == seg.b) return u[g.index(s, n - 1)];
    Eigen::Map<const Eigen::VectorXcd> vals(u.data() + g.index(s, 0), n);
    Eigen::VectorXcd c = g.rule().to_coeffs.cast<cd>() * vals;
    return chebyshev_eval(c, (x - seg.mid()) / seg.half());
}

double GridFunction::l2_squared() const {
    double s = 0.0;
    for (std::size_t k = 0; k < grid->num_segments(); ++k)
        for (int j = 0; j < grid->n(); ++j) s += grid->weight(k, j) * std::norm(u[grid->index(k, j)]);
    return s;
}

double GridFunction::du_l2_squared() const {
    double s = 0.0;
    for (std::size_t k = 0; k < grid->num_segments(); ++k)
        for (int j = 0; j < grid->n(); ++j) s += grid->weight(k, j) * std::norm(du[grid->index(k, j)]);
    return s;
}

double GridFunction::sup_abs() const {
    double m = 0.0;
    for (const cd& z : u) m = std::max(m, std::abs(z));
    return m;
}

} // namespace bvres
