#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "trspec/errors.hpp"

namespace trspec {

// Exact fraction used for transport periodicity checks. Always normalized:
// den > 0 and gcd(|num|, den) == 1.
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational make(long long num, long long den);
    static Rational parse(const std::string& text);  // "p/q" or "p"
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
    bool operator==(const Rational&) const = default;
};

// A linear transport-reaction system du/dt + diag(v) grad u = B u on the
// d-torus of side L with N species.
struct ModelSpec {
    int d = 1;
    int N = 1;
    double L = 1.0;
    std::vector<std::vector<double>> velocities;  // N rows of d entries
    std::vector<std::vector<double>> B;           // N rows of N entries

    // Optional winding rates v_{j,i} / L as exact fractions, parallel to
    // velocities; required by transport_periodicity, empty otherwise.
    std::vector<std::vector<Rational>> velocities_exact;

    // Derived by validate().
    double norm_B_inf = 0.0;
    double velocity_gap = std::numeric_limits<double>::infinity();  // d = 1 only
};

// Shape and finiteness checks; fills the derived fields. Throws
// DimensionMismatch, NonFinite, or NonPositiveLength.
ModelSpec validate(ModelSpec spec);

// Equivalent system on the unit torus: v -> v/L, L -> 1. Spectra of the mode
// matrices are unchanged. Idempotent (dividing by 1 is exact). Drops
// velocities_exact when L != 1 since the winding rates were relative to L.
ModelSpec rescale_to_unit_torus(ModelSpec spec);

// B -> B - delta I, shifting all spectra left by delta. Throws
// NonPositiveDelta for delta <= 0.
ModelSpec apply_killing(ModelSpec spec, double delta);

// Off-diagonal nonnegativity of B, the criterion for positivity preservation
// of the evolution. Offending entries are reported with 1-based indices.
struct PositivityReport {
    bool positive;
    std::vector<std::pair<int, int>> offending;
};
PositivityReport positivity_check(const ModelSpec& spec);

// Basis of ker(B^T): the functionals y with d/dt <y, integral of u> = 0.
// mass_conserving reports whether (1, ..., 1) lies in that kernel.
struct ConservationReport {
    std::vector<std::vector<double>> basis;  // each of length N, unit norm
    bool mass_conserving = false;
};
ConservationReport conservation_basis(const ModelSpec& spec);

// Minimal time periods of the pure transport flow per component and jointly.
// Components with rational winding rates are always periodic; the minimal
// period of component j is lcm of the denominators over gcd of the numerators
// of its nonzero entries. Requires velocities_exact (else
// IrrationalInputUnsupported); zero velocity vectors have no minimal period
// and are rejected.
struct PeriodicityReport {
    std::vector<bool> component_periodic;
    std::vector<Rational> component_period;
    bool jointly_periodic = false;
    Rational joint_period;
};
PeriodicityReport transport_periodicity(const ModelSpec& spec);

// Two-speed symmetric system on the interval (0, L): species pairs moving
// with speeds +gamma_j and -gamma_j, reaction blocks B1 (same direction) and
// B2 (opposite direction). Models Neumann (reflecting) boundary conditions
// via extension to the periodic torus of side 2L.
struct SymmetricBlockModel {
    int species = 1;
    double L = 1.0;
    std::vector<double> speeds;               // positive, one per species
    std::vector<std::vector<double>> B1, B2;  // species x species
};

// Embedding as a periodic 2*species model on the torus of side 2L with
// velocities (gamma, -gamma) and block reaction matrix [[B1, B2], [B2, B1]].
ModelSpec to_periodic_model(const SymmetricBlockModel& block);

// Grid samples of the rightward (alpha) and leftward (beta) species families
// on a uniform cell-centered grid x_i = (i + 1/2) L / n.
struct GridPair {
    std::vector<std::vector<double>> alpha, beta;  // species x n
};

// Reflection extension from (0, L) to (0, 2L): alpha continues with beta
// reversed and vice versa. On the cell-centered grid the reflection
// x -> 2L - x is index-exact: sample i maps to sample 2n - 1 - i. Throws
// OddGrid for odd n.
GridPair neumann_extend(const SymmetricBlockModel& block, const GridPair& state);

// JSON round trip. Schema: {"d", "N", "L", "velocities", "B"} with optional
// "velocities_exact"; velocities are flat for d = 1 and nested for d > 1.
ModelSpec model_from_json_text(const std::string& text);
std::string model_to_json_text(const ModelSpec& spec);
ModelSpec load_model(const std::string& path);
void save_model(const ModelSpec& spec, const std::string& path);

} // namespace trspec
