#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace bvres {

using cd = std::complex<double>;

// Chebyshev-Lobatto rule on [-1, 1], nodes increasing.
struct ChebyshevRule {
    int n = 0;
    std::vector<double> t;
    std::vector<double> w;     // Clenshaw-Curtis weights
    Eigen::MatrixXd diff;      // values -> derivative values
    Eigen::MatrixXd cumint;    // values -> integral from -1 to each node
    Eigen::MatrixXd to_coeffs; // values -> Chebyshev coefficients
};

const ChebyshevRule& chebyshev_rule(int n);

// Evaluate a Chebyshev series at t in [-1, 1].
double chebyshev_eval(const Eigen::VectorXd& c, double t);
cd chebyshev_eval(const Eigen::VectorXcd& c, double t);

struct Segment {
    double a;
    double b;
    double mid() const { return 0.5 * (a + b); }
    double half() const { return 0.5 * (b - a); }
};

// Consecutive Chebyshev panels covering [front().a, back().b]. Panel
// endpoints are shared, so every node index belongs to exactly one panel and
// values at a panel boundary exist from both sides.
class Grid {
public:
    Grid(std::vector<Segment> segments, int nodes_per_segment);

    int n() const { return n_; }
    const ChebyshevRule& rule() const { return *rule_; }
    const std::vector<Segment>& segments() const { return segs_; }
    std::size_t num_segments() const { return segs_.size(); }
    std::size_t size() const { return segs_.size() * static_cast<std::size_t>(n_); }
    std::size_t index(std::size_t seg, int j) const { return seg * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j); }
    double x(std::size_t seg, int j) const { return segs_[seg].mid() + segs_[seg].half() * rule_->t[static_cast<std::size_t>(j)]; }
    double weight(std::size_t seg, int j) const { return segs_[seg].half() * rule_->w[static_cast<std::size_t>(j)]; }
    double left() const { return segs_.front().a; }
    double right() const { return segs_.back().b; }
    // segment whose closure contains x, preferring the one to the right
    std::size_t locate(double x) const;

    std::vector<double> nodes() const;

private:
    int n_;
    const ChebyshevRule* rule_;
    std::vector<Segment> segs_;
};

// Panels split at every point of `cuts` inside [lo, hi]; each piece is then
// divided into equal panels no longer than max_len.
std::shared_ptr<const Grid> make_grid(double lo, double hi, const std::vector<double>& cuts,
                                      double max_len, int nodes_per_segment = 24);

// Complex function u on a grid with its derivative; du is one-sided at
// panel ends.
struct GridFunction {
    std::shared_ptr<const Grid> grid;
    std::vector<cd> u;
    std::vector<cd> du;

    template <class F, class DF>
    static GridFunction sample(std::shared_ptr<const Grid> g, F f, DF df) {
        GridFunction r{g, std::vector<cd>(g->size()), std::vector<cd>(g->size())};
        for (std::size_t s = 0; s < g->num_segments(); ++s)
            for (int j = 0; j < g->n(); ++j) {
                double xx = g->x(s, j);
                r.u[g->index(s, j)] = f(xx);
                r.du[g->index(s, j)] = df(xx);
            }
        return r;
    }
    // derivative by spectral differentiation on each panel
    static GridFunction from_values(std::shared_ptr<const Grid> g, std::vector<cd> values);

    // value at a grid point x; at a panel boundary the average of both sides
    cd value_at(double x) const;
    // integral of |u|^2
    double l2_squared() const;
    double du_l2_squared() const;
    double sup_abs() const;
};

// Per-panel spectral derivative of arbitrary node values.
std::vector<cd> differentiate(const Grid& g, const std::vector<cd>& v);

} // namespace bvres
