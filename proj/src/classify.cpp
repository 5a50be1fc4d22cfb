#include "trspec/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trspec/errors.hpp"
#include "trspec/linalg.hpp"
#include "trspec/modes.hpp"
#include "trspec/perturb.hpp"

namespace trspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_real_reaction_eigenvalue(const ModelSpec& s) {
    ComplexMatrix m(s.N, s.N);
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j) m.at(i, j) = s.B[i][j];
    double worst = -std::numeric_limits<double>::infinity();
    for (const cplx& l : eigenvalues(m).values) worst = std::max(worst, l.real());
    return worst;
}

double max_diagonal(const ModelSpec& s) {
    double b = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < s.N; ++j) b = std::max(b, s.B[j][j]);
    return b;
}

} // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "Stable";
        case Verdict::UnstableReaction: return "UnstableReaction";
        case Verdict::TuringPattern: return "TuringPattern";
        case Verdict::HyperbolicInstability: return "HyperbolicInstability";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

ClassificationReport classify(const ModelSpec& spec, int K_max, double tol) {
    if (spec.d != 1) throw PreconditionUnmet("classification requires d = 1");
    const ModelSpec s = rescale_to_unit_torus(spec);
    const double scale = tol * s.norm_B_inf;

    ClassificationReport rep;
    rep.b = max_diagonal(s);

    bool degenerate = false;
    int anchor = 1;
    try {
        anchor = validity_threshold(s);
    } catch (const DegenerateVelocities&) {
        degenerate = true;
    }
    if (K_max <= 0) K_max = degenerate ? 64 : std::max(64, 4 * anchor);
    rep.K_max = K_max;

    const SpectrumTable table = spectrum_table(s, K_max);
    const SigmaMax sm = sigma_max(table);
    rep.sup_sigma = sm.sup;
    rep.sigma_profile.reserve(sm.profile.size());
    for (const auto& [k, sigma] : sm.profile) rep.sigma_profile.emplace_back(k[0], sigma);

    if (degenerate)
        rep.warnings.push_back("degenerate velocities: verdict relies on sampled data only");
    if (std::abs(sm.sup - rep.b) <= scale)
        rep.warnings.push_back("sampled growth bound within tolerance of the limit abscissa");

    if (max_real_reaction_eigenvalue(s) >= scale) {
        rep.verdict = Verdict::UnstableReaction;
        return rep;
    }
    if (sm.sup < -scale && rep.b < 0.0) {
        rep.verdict = Verdict::Stable;
        return rep;
    }
    if (sm.sup > rep.b + scale && sm.sup > scale) {
        rep.verdict = Verdict::TuringPattern;
        for (const auto& [k, sigma] : rep.sigma_profile)
            if (sigma >= sm.sup - scale) rep.dominant_modes.push_back(k);
        std::sort(rep.dominant_modes.begin(), rep.dominant_modes.end());
        return rep;
    }
    if (rep.b > scale) {
        // Verify the approach to b from below on the sampled tail. With
        // degenerate velocities there is no series threshold; fall back to
        // the upper half of the window.
        const int start = degenerate ? std::max(1, K_max / 2) : anchor;
        if (start >= K_max) {
            rep.warnings.push_back("window too small to verify the tail of the growth profile");
        } else {
            auto sigma_at = [&](int k) { return rep.sigma_profile[k + K_max].second; };
            bool increasing = true;
            for (int k = start; k < K_max && increasing; ++k)
                increasing = sigma_at(k + 1) > sigma_at(k);
            if (increasing) {
                rep.verdict = Verdict::HyperbolicInstability;
                return rep;
            }
        }
    }
    rep.verdict = Verdict::Indeterminate;
    return rep;
}

ClassificationReport classify_n2(const ModelSpec& spec) {
    if (spec.N != 2 || spec.d != 1)
        throw PreconditionUnmet("closed-form verdict requires N = 2, d = 1");
    const ModelSpec s = rescale_to_unit_torus(spec);
    const double a = s.B[0][0], b = s.B[0][1];
    const double c = s.B[1][0], d = s.B[1][1];

    ClassificationReport rep;
    rep.b = std::max(a, d);
    if (a + d >= 0.0 || a * d - b * c <= 0.0)
        rep.verdict = Verdict::UnstableReaction;
    else if ((a > 0.0 || d > 0.0) && s.velocities[0][0] != s.velocities[1][0])
        rep.verdict = Verdict::HyperbolicInstability;
    else
        rep.verdict = Verdict::Stable;
    return rep;
}

bool turing_criterion(const ModelSpec& spec, double tol) {
    if (spec.d != 1) throw PreconditionUnmet("criterion requires d = 1");
    const ModelSpec s = rescale_to_unit_torus(spec);
    reduced_resolvents(s);  // rejects coinciding velocities
    const double scale = tol * s.norm_B_inf;
    if (max_real_reaction_eigenvalue(s) >= scale)
        throw PreconditionUnmet("criterion requires a stable reaction matrix");
    const SigmaMax sm = sigma_max(spectrum_table(s, default_window(s)));
    if (sm.sup <= scale) throw PreconditionUnmet("criterion requires an unstable model");

    int jstar = 0;
    for (int j = 1; j < s.N; ++j)
        if (s.B[j][j] > s.B[jstar][jstar]) jstar = j;
    return coefficient(s, jstar, 3) < -tol * coefficient_bound(s, 3);
}

QuarticCoefficients random_walk_quartic(const RandomWalkParams& p, int k) {
    if (p.v1 <= 0.0 || p.v2 <= 0.0 || p.mu1 <= 0.0 || p.mu2 <= 0.0)
        throw NonPositiveRates("speeds and turning rates must be positive");
    if (p.L <= 0.0) throw NonPositiveLength("side length must be positive");
    const double det_n = p.nu1 * p.nu4 - p.nu2 * p.nu3;
    const double ksq = 4.0 * kPi * kPi * k * k / (p.L * p.L);
    const double v1s = p.v1 * p.v1, v2s = p.v2 * p.v2;

    QuarticCoefficients c;
    c.a3 = 2.0 * (p.mu1 + p.mu2) - (p.nu1 + p.nu4);
    c.a2 = ksq * (v1s + v2s) - 2.0 * (p.mu1 + p.mu2) * (p.nu1 + p.nu4) +
           4.0 * p.mu1 * p.mu2 + det_n;
    c.a1 = ksq * (v1s * (2.0 * p.mu2 - p.nu4) + v2s * (2.0 * p.mu1 - p.nu1)) -
           4.0 * (p.nu1 + p.nu4) * p.mu1 * p.mu2 + 2.0 * (p.mu1 + p.mu2) * det_n;
    c.a0 = ksq * ksq * v1s * v2s - 2.0 * ksq * (v1s * p.nu4 * p.mu2 + v2s * p.nu1 * p.mu1) +
           4.0 * p.mu1 * p.mu2 * det_n;
    return c;
}

ModelSpec random_walk_model(const RandomWalkParams& p) {
    if (p.v1 <= 0.0 || p.v2 <= 0.0 || p.mu1 <= 0.0 || p.mu2 <= 0.0)
        throw NonPositiveRates("speeds and turning rates must be positive");
    if (p.L <= 0.0) throw NonPositiveLength("side length must be positive");
    const double h1 = p.nu1 / 2.0, h2 = p.nu2 / 2.0, h3 = p.nu3 / 2.0, h4 = p.nu4 / 2.0;

    ModelSpec s;
    s.d = 1;
    s.N = 4;
    s.L = p.L;
    s.velocities = {{p.v1}, {p.v2}, {-p.v1}, {-p.v2}};
    s.B = {
        {-p.mu1 + h1, h2, p.mu1 + h1, h2},
        {h3, -p.mu2 + h4, h3, p.mu2 + h4},
        {p.mu1 + h1, h2, -p.mu1 + h1, h2},
        {h3, p.mu2 + h4, h3, -p.mu2 + h4},
    };
    return validate(std::move(s));
}

RouthHurwitzResult routh_hurwitz_quartic(const QuarticCoefficients& c) {
    if (!std::isfinite(c.a3) || !std::isfinite(c.a2) || !std::isfinite(c.a1) ||
        !std::isfinite(c.a0))
        throw NonFinite("quartic coefficients must be finite");
    RouthHurwitzResult r;
    r.margins[0] = c.a3;
    r.margins[1] = c.a2 * c.a3 - c.a1;
    r.margins[2] = r.margins[1] * c.a1 - c.a3 * c.a3 * c.a0;
    r.margins[3] = c.a0 * r.margins[2];
    r.stable = true;
    for (double m : r.margins) r.stable = r.stable && m > 0.0;
    return r;
}

GoldsteinKacRate goldstein_kac_rate(double lambda, double v, double L) {
    if (!std::isfinite(lambda)) throw NonFinite("turning rate must be finite");
    if (v <= 0.0) throw NonPositiveRates("speed must be positive");
    if (L <= 0.0) throw NonPositiveLength("side length must be positive");
    GoldsteinKacRate r;
    if (lambda <= 0.0) {
        r.unstable = true;
        return r;
    }
    const double disc = lambda * lambda - 4.0 * kPi * kPi * v * v / (L * L);
    r.omega = disc <= 0.0 ? -lambda : -lambda + std::sqrt(disc);
    return r;
}

} // namespace trspec
