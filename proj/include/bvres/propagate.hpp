#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "bvres/grid.hpp"
#include "bvres/operator.hpp"

namespace bvres {

// (u, p) with p = h^2 alpha u' + i h b u.
struct State {
    cd u;
    cd p;
};

using Mat2 = Eigen::Matrix2cd;

class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Homogeneous first-order system (u, p)' = A (u, p) for (P - z) u = 0:
//   u' = (p - i h b u) / (h^2 alpha)
//   p' = ((V - z)/beta - b^2/alpha) u - i b p / (h alpha)
// plus the forcing (0, -f/beta) for (P - z) u = f.
Mat2 system_matrix(const LocalCoeffs& c, double x, double h, cd z);

// exp(A dx) for a constant 2x2 matrix.
Mat2 exponential(const Mat2& A, double dx);

// k^2 = ((z - V)/(alpha beta) + b^2/alpha^2) / h^2 in a constant region; the
// solutions there are exp((-i b/(h alpha) +- i k) x) with p = +- i h^2 alpha k u.
cd wavenumber_squared(double alpha, double beta, double b, double V, double h, cd z);
// root with Im k >= 0 (decaying, or outgoing when k^2 > 0)
cd decaying_root(cd k2);

// Coefficients of the constant left / right tail.
struct TailCoeffs {
    double alpha, beta, b, V;
};
TailCoeffs left_tail(const CoefficientSpec& spec);
TailCoeffs right_tail(const CoefficientSpec& spec);

// States at every grid node, starting from `start` at the left end (rightward)
// or the right end (leftward). V0 atoms at panel boundaries apply the jump rule.
std::vector<State> sweep(const CoefficientSpec& spec, cd z, const Grid& grid, State start, bool rightward);

// Transfer between two points with the magnitude kept as a separate log, so
// that growth like exp(|Im k| L) never overflows. The returned state has
// max(|u|, |p|) = 1 unless it is zero.
struct ScaledState {
    State s;
    double log_scale = 0.0;
};
ScaledState transfer(const CoefficientSpec& spec, cd z, double from, double to, State start);

} // namespace bvres
