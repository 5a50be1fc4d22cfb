#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trspec/linalg.hpp"
#include "trspec/model.hpp"

namespace trspec {

// Large-mode eigenvalue asymptotics for one-dimensional models with pairwise
// distinct velocities. For |k| large the eigenvalues of the mode matrix
// M(k) = -2 pi i k diag(v) + B split into branches
//
//   lambda_j(k) = b_jj - 2 pi i k v_j + sum_{n >= 1} (i / (2 pi k))^n c_j^(n+1)
//
// with real correction coefficients c_j^(n) determined by B and the velocity
// gaps. All branch indices in this header are 0-based.

// Diagonal entries of the reduced resolvents S_j; entry (j, i) holds
// 1 / (v_i - v_j) for i != j and 0 at i == j.
struct ReducedResolvents {
    std::vector<std::vector<double>> S;
    double min_gap = 0.0;
    double max_gap = 0.0;
};

// Throws DegenerateVelocities when two velocities are closer than
// 1e-12 * max |v| (or exactly equal), and PreconditionUnmet for d != 1.
ReducedResolvents reduced_resolvents(const ModelSpec& spec);

// Smallest mode magnitude from which the correction series is guaranteed to
// converge: ceil(2 ||B||_inf / (pi * min gap)), at least 1.
int validity_threshold(const ModelSpec& spec);

// Correction coefficient c_j^(n) for branch j, order n in [1, 6]:
//   c_j^(n) = ((-1)^n / n) * sum over compositions k_1 + ... + k_n = n - 1
//             of trace(B S_j^(k_1) B S_j^(k_2) ... B S_j^(k_n))
// where S_j^(0) = -P_j and S_j^(m) = S_j^m for m >= 1.
double coefficient(const ModelSpec& spec, int j, int n);

// Bound max gap * (2 ||B||_inf / min gap)^n on |c_j^(n)|, any branch.
double coefficient_bound(const ModelSpec& spec, int n);

// Truncated branch series at mode k with a geometric tail bound on the
// dropped terms. Throws BelowThreshold when |k| < validity_threshold(spec).
struct SeriesValue {
    cplx value;
    double remainder_bound = 0.0;
};
SeriesValue eigenvalue_series(const ModelSpec& spec, int j, int k, int n_max);

// Eventual behaviour of k -> Re lambda_j(k) for large |k|. The real part is
// b_jj + sum_m (-1)^m (2 pi k)^{-2m} c_j^(2m+1), so the first nonvanishing
// odd-order coefficient decides: with n* = min { n : c_j^(2n+1) != 0 } the
// sequence eventually increases strictly when (-1)^{n*+1} c_j^(2n*+1) > 0,
// decreases when < 0, and is constant (== b_jj) when no such n exists.
enum class Direction { Increasing, Decreasing, Constant };

struct MonotonicityReport {
    int branch = 0;
    std::vector<double> coeffs;  // orders 1 .. 2*cap + 1
    std::optional<int> n_star;
    Direction direction = Direction::Constant;
    int K_pert = 1;
    std::vector<std::string> warnings;
};

// The zero test for c_j^(2n+1) uses tolerance 1e-12 * coefficient_bound.
// For N = 2 the exact trichotomy (b_12 = 0 or b_21 = 0 or b_11 = b_22)
// decides constancy and overrides the numeric test. Cap limits the search,
// default 3 (first three odd orders), at most 6.
std::vector<MonotonicityReport> monotonicity(const ModelSpec& spec, int cap = 3);

const char* direction_name(Direction d);

} // namespace trspec
