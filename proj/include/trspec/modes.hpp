#pragma once

#include <string>
#include <vector>

#include "trspec/linalg.hpp"
#include "trspec/model.hpp"

namespace trspec {

// Fourier mode matrix M(k) = -2 pi i diag(k . v_j) + B on the unit torus;
// the model is rescaled internally, so L is already accounted for.
ComplexMatrix mode_matrix(const ModelSpec& spec, const std::vector<int>& k);
ComplexMatrix mode_matrix(const ModelSpec& spec, int k);  // d = 1

// One eigenvalue of one mode matrix. Branch labels are 1-based. Before
// tracking they index the eigenvalues in descending order of real part
// (imaginary part breaking ties); after track_branches they follow the
// branches continuously in k.
struct SpectrumRecord {
    std::vector<int> k;
    int branch = 1;
    cplx lambda;
};

// Eigenvalue sample of the generator over the mode box |k|_inf <= K_max.
// The full spectrum is the closure of these point sets over all of Z^d; the
// only accumulation points beyond the sample have real parts in
// accumulation_abscissas (the diagonal of B).
struct SpectrumTable {
    int d = 1;
    int N = 1;
    int K_max = 0;
    bool tracked = false;
    std::vector<SpectrumRecord> records;  // k lexicographic, then branch
    std::vector<double> accumulation_abscissas;
    std::vector<std::string> warnings;
};

SpectrumTable spectrum_table(const ModelSpec& spec, int k_max);

// Default sampling window max(64, 4 * validity_threshold); falls back to 64
// when no threshold exists (degenerate velocities or d > 1).
int default_window(const ModelSpec& spec);

// Spectral abscissa per sampled mode, its supremum, and the argmax modes
// (exact ties).
struct SigmaMax {
    std::vector<std::pair<std::vector<int>, double>> profile;
    double sup = 0.0;
    std::vector<std::vector<int>> argmax;
};
SigmaMax sigma_max(const SpectrumTable& table);

// Relabels branches continuously in k (d = 1 only): walking outward from
// k = 0, each branch takes the nearest eigenvalue at the next mode by greedy
// smallest-distance matching. Near ties (within 1e-12 relative) are reported
// in warnings as ambiguous and resolved in label order. From the validity
// threshold outward the transport term dominates, and branch j is instead
// anchored to the eigenvalue whose imaginary part is nearest
// -2 pi k v_j, which makes labels consistent with the perturbation series.
SpectrumTable track_branches(const SpectrumTable& table, const ModelSpec& spec);

// Sample of the time-t semigroup spectrum {exp(t lambda)}; the full spectrum
// of the evolution operator is the closure.
std::vector<cplx> semigroup_spectrum(const SpectrumTable& table, double t);

} // namespace trspec
