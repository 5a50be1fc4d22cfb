#include "trspec/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace trspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_one_dimensional(const ModelSpec& spec, const char* who) {
    if (spec.d != 1)
        throw PreconditionUnmet(std::string(who) + ": perturbation analysis needs d = 1");
}

// trace(X * Y) for square matrices without forming the product.
double trace_product(const std::vector<std::vector<double>>& x,
                     const std::vector<std::vector<double>>& y) {
    const size_t n = x.size();
    double s = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < n; ++l) s += x[i][l] * y[l][i];
    return s;
}

// Correction coefficient of any order; the public entry point restricts the
// order, the monotonicity search does not.
double coefficient_core(const ModelSpec& spec, const ReducedResolvents& rr, int j, int n) {
    const int N = spec.N;

    // Diagonals of S_j^(m): m = 0 gives -P_j, m >= 1 gives the m-th power.
    std::vector<std::vector<double>> diag(n, std::vector<double>(N, 0.0));
    diag[0][j] = -1.0;
    for (int m = 1; m < n; ++m)
        for (int i = 0; i < N; ++i) diag[m][i] = std::pow(rr.S[j][i], m);

    // Factors E_m = B * diag(S_j^(m)).
    std::vector<std::vector<std::vector<double>>> factor(n);
    for (int m = 0; m < n; ++m) {
        factor[m].assign(N, std::vector<double>(N));
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) factor[m][r][c] = spec.B[r][c] * diag[m][c];
    }

    // Depth-first enumeration of compositions k_1 + ... + k_n = n - 1 with a
    // running partial product E_{k_1} ... E_{k_{n-1}}; the last factor only
    // contributes through the trace.
    double total = 0.0;
    std::vector<std::vector<double>> prod;
    std::function<void(int, int, const std::vector<std::vector<double>>&)> walk =
        [&](int depth, int remaining, const std::vector<std::vector<double>>& acc) {
            if (depth == n - 1) {
                total += trace_product(acc, factor[remaining]);
                return;
            }
            for (int m = 0; m <= remaining; ++m) {
                std::vector<std::vector<double>> next(N, std::vector<double>(N, 0.0));
                for (int r = 0; r < N; ++r)
                    for (int l = 0; l < N; ++l) {
                        const double a = acc[r][l];
                        if (a == 0.0) continue;
                        for (int c = 0; c < N; ++c) next[r][c] += a * factor[m][l][c];
                    }
                walk(depth + 1, remaining - m, next);
            }
        };
    if (n == 1) {
        double tr = 0.0;
        for (int i = 0; i < N; ++i) tr += spec.B[i][i] * diag[0][i];
        total = tr;
    } else {
        std::vector<std::vector<double>> ident(N, std::vector<double>(N, 0.0));
        for (int i = 0; i < N; ++i) ident[i][i] = 1.0;
        walk(0, n - 1, ident);
    }

    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign / n * total;
}

} // namespace

ReducedResolvents reduced_resolvents(const ModelSpec& spec) {
    require_one_dimensional(spec, "reduced_resolvents");
    ModelSpec s = validate(spec);
    const int N = s.N;

    double max_abs_v = 0.0;
    for (int i = 0; i < N; ++i) max_abs_v = std::max(max_abs_v, std::abs(s.velocities[i][0]));

    ReducedResolvents rr;
    rr.min_gap = std::numeric_limits<double>::infinity();
    rr.max_gap = 0.0;
    for (int i = 0; i < N; ++i)
        for (int l = i + 1; l < N; ++l) {
            const double gap = std::abs(s.velocities[i][0] - s.velocities[l][0]);
            rr.min_gap = std::min(rr.min_gap, gap);
            rr.max_gap = std::max(rr.max_gap, gap);
        }
    if (N == 1) {
        rr.min_gap = std::numeric_limits<double>::infinity();
        rr.max_gap = 0.0;
    } else if (rr.min_gap == 0.0 || rr.min_gap < 1e-12 * max_abs_v) {
        throw DegenerateVelocities("velocities are equal or nearly equal; no spectral gap");
    }

    rr.S.assign(N, std::vector<double>(N, 0.0));
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i)
            if (i != j) rr.S[j][i] = 1.0 / (s.velocities[i][0] - s.velocities[j][0]);
    return rr;
}

int validity_threshold(const ModelSpec& spec) {
    ReducedResolvents rr = reduced_resolvents(spec);
    ModelSpec s = validate(spec);
    if (s.norm_B_inf == 0.0 || s.N == 1) return 1;
    return std::max(1, static_cast<int>(std::ceil(2.0 * s.norm_B_inf / (kPi * rr.min_gap))));
}

double coefficient(const ModelSpec& spec, int j, int n) {
    if (n < 1 || n > 6)
        throw OrderTooLarge("coefficient: order must be between 1 and 6");
    ModelSpec s = validate(spec);
    if (j < 0 || j >= s.N) throw DimensionMismatch("coefficient: branch out of range");
    ReducedResolvents rr = reduced_resolvents(s);
    return coefficient_core(s, rr, j, n);
}

double coefficient_bound(const ModelSpec& spec, int n) {
    ModelSpec s = validate(spec);
    ReducedResolvents rr = reduced_resolvents(s);
    if (s.N == 1) return 0.0;
    return rr.max_gap * std::pow(2.0 * s.norm_B_inf / rr.min_gap, n);
}

SeriesValue eigenvalue_series(const ModelSpec& spec, int j, int k, int n_max) {
    ModelSpec s = validate(spec);
    if (j < 0 || j >= s.N) throw DimensionMismatch("eigenvalue_series: branch out of range");
    if (n_max < 0) throw OrderTooLarge("eigenvalue_series: negative order");
    ReducedResolvents rr = reduced_resolvents(s);
    const int threshold = validity_threshold(s);
    if (std::abs(k) < threshold)
        throw BelowThreshold("eigenvalue_series: |k| below validity threshold " +
                             std::to_string(threshold));

    const double v = s.velocities[j][0];
    SeriesValue out;
    out.value = cplx(s.B[j][j], -2.0 * kPi * k * v);
    const cplx z = cplx(0.0, 1.0) / (2.0 * kPi * k);
    cplx zn = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        zn *= z;
        out.value += zn * coefficient_core(s, rr, j, n + 1);
    }

    // Geometric tail: |c^(n+1)| <= M r^{n+1} with r = 2||B||/min gap gives
    // sum_{n > n_max} |z|^n M r^{n+1} = M r q^{n_max+1} / (1 - q), q = r |z|.
    if (s.norm_B_inf == 0.0 || s.N == 1) {
        out.remainder_bound = 0.0;
    } else {
        const double r = 2.0 * s.norm_B_inf / rr.min_gap;
        const double q = r / (2.0 * kPi * std::abs(k));
        out.remainder_bound = rr.max_gap * r * std::pow(q, n_max + 1) / (1.0 - q);
    }
    return out;
}

std::vector<MonotonicityReport> monotonicity(const ModelSpec& spec, int cap) {
    if (cap < 1 || cap > 6) throw OrderTooLarge("monotonicity: cap must be between 1 and 6");
    ModelSpec s = validate(spec);
    ReducedResolvents rr = reduced_resolvents(s);
    const int threshold = validity_threshold(s);

    const bool n2_constant =
        s.N == 2 && (s.B[0][1] == 0.0 || s.B[1][0] == 0.0 || s.B[0][0] == s.B[1][1]);

    std::vector<MonotonicityReport> reports;
    for (int j = 0; j < s.N; ++j) {
        MonotonicityReport rep;
        rep.branch = j;
        rep.K_pert = threshold;
        for (int n = 1; n <= 2 * cap + 1; ++n)
            rep.coeffs.push_back(coefficient_core(s, rr, j, n));

        for (int n = 1; n <= cap; ++n) {
            const double c = rep.coeffs[2 * n];  // order 2n+1
            const double tol = 1e-12 * coefficient_bound(s, 2 * n + 1);
            if (std::abs(c) > tol) {
                rep.n_star = n;
                const double saliency = ((n + 1) % 2 == 0 ? 1.0 : -1.0) * c;
                rep.direction = saliency > 0.0 ? Direction::Increasing : Direction::Decreasing;
                break;
            }
        }
        if (!rep.n_star.has_value()) rep.direction = Direction::Constant;

        if (s.N == 2) {
            if (n2_constant) {
                if (rep.n_star.has_value())
                    rep.warnings.push_back(
                        "exact two-species constancy condition holds; numeric coefficient "
                        "treated as roundoff");
                rep.n_star.reset();
                rep.direction = Direction::Constant;
            } else if (!rep.n_star.has_value()) {
                // The order-3 coefficient is nonzero in exact arithmetic; take
                // the direction from its computed sign.
                const double c3 = rep.coeffs[2];
                if (c3 != 0.0) {
                    rep.n_star = 1;
                    rep.direction = c3 > 0.0 ? Direction::Increasing : Direction::Decreasing;
                    rep.warnings.push_back(
                        "order-3 coefficient below tolerance but the two-species constancy "
                        "condition fails; direction taken from its sign");
                } else {
                    rep.warnings.push_back(
                        "order-3 coefficient vanished in floating point although the "
                        "two-species constancy condition fails");
                }
            }
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Increasing: return "inc";
        case Direction::Decreasing: return "dec";
        default: return "const";
    }
}

} // namespace trspec
