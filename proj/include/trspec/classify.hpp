#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "trspec/model.hpp"

namespace trspec {

enum class Verdict {
    Stable,
    UnstableReaction,
    TuringPattern,
    HyperbolicInstability,
    Indeterminate,
};

const char* verdict_name(Verdict v);

// Verdict plus the diagnostics needed to audit it: the limit abscissa
// b = max_j B_jj, the sampled growth profile k -> Sigma(k), and the modes
// attaining the sampled supremum in the pattern-forming case.
struct ClassificationReport {
    Verdict verdict = Verdict::Indeterminate;
    double b = 0.0;
    double sup_sigma = 0.0;
    int K_max = 0;
    std::vector<int> dominant_modes;
    std::vector<std::pair<int, double>> sigma_profile;
    std::vector<std::string> warnings;
};

// Samples Sigma(k) = max Re sigma(M(k)) on |k| <= K_max (default window when
// K_max <= 0) and walks the decision ladder: unstable reaction matrix,
// stable, Turing pattern, hyperbolic instability, indeterminate. tol scales
// relative to the max row sum of B.
ClassificationReport classify(const ModelSpec& spec, int K_max = 0, double tol = 1e-9);

// Closed-form two-species verdict, no spectral sampling: instabilities occur
// iff v1 != v2, trace B < 0, det B > 0 and some diagonal entry is positive,
// and every such instability is hyperbolic.
ClassificationReport classify_n2(const ModelSpec& spec);

// Third-order series test at the branch j* with maximal B_jj: a negative
// third coefficient makes Sigma overshoot its limit b, so an unstable model
// with a stable reaction matrix forms patterns at finitely many modes.
// Requires d = 1, distinct velocities, stable B, unstable model.
bool turing_criterion(const ModelSpec& spec, double tol = 1e-9);

struct QuarticCoefficients {
    double a3 = 0.0;
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;
};

// Two correlated random walkers with reaction: species i moves at speed vi,
// reverses direction at rate mui, and reacts through [[nu1, nu2], [nu3, nu4]].
struct RandomWalkParams {
    double v1 = 1.0, v2 = 1.0;
    double mu1 = 1.0, mu2 = 1.0;
    double nu1 = 0.0, nu2 = 0.0, nu3 = 0.0, nu4 = 0.0;
    double L = 1.0;
};

// Characteristic quartic of mode k; its roots are the four eigenvalues the
// mode contributes to the spectrum.
QuarticCoefficients random_walk_quartic(const RandomWalkParams& p, int k);

// The same system written as a four-species transport model (right- and
// left-moving halves of each walker).
ModelSpec random_walk_model(const RandomWalkParams& p);

struct RouthHurwitzResult {
    bool stable = false;
    std::array<double, 4> margins{};
};

// All roots of x^4 + a3 x^3 + a2 x^2 + a1 x + a0 lie in the open left half
// plane iff all four margins are positive.
RouthHurwitzResult routh_hurwitz_quartic(const QuarticCoefficients& c);

struct GoldsteinKacRate {
    bool unstable = false;  // set when lambda <= 0; omega is meaningless then
    double omega = 0.0;
};

// Optimal decay rate toward the constant-mean state for the two-speed model
// with turning rate lambda and speed v on a circle of length L:
// omega = -lambda + Re sqrt(lambda^2 - 4 pi^2 v^2 / L^2).
GoldsteinKacRate goldstein_kac_rate(double lambda, double v, double L = 1.0);

} // namespace trspec
