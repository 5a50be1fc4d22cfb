#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trspec/linalg.hpp"
#include "trspec/model.hpp"

namespace trspec {

// Truncated Fourier representation of a real N-component field on the torus:
// all modes with |k|_inf <= K, stored mode-major in lexicographic order with
// the component index fastest. Real fields keep the conjugate pairing
// coeff(-k) = conj(coeff(k)).
struct FourierState {
    int d = 1;
    int N = 1;
    int K = 0;
    std::vector<cplx> coeffs;

    int mode_count() const;
    int mode_index(const std::vector<int>& k) const;
    cplx& at(const std::vector<int>& k, int j);
    const cplx& at(const std::vector<int>& k, int j) const;
    double norm() const;  // coefficient l2 norm = field L2 norm
};

FourierState zero_state(const ModelSpec& spec, int K);

// Random perturbation of the zero state: for k = 0..K each component draws a
// complex Gaussian with total variance amplitude * (k+1)^-2, split evenly
// between real and imaginary parts (k = 0 stays real), and the negative modes
// complete the conjugate pairs. Normals come from a Box-Muller transform of
// mt19937_64 output, so a seed pins the state exactly.
FourierState sample_random_ic(const ModelSpec& spec, int K, std::uint64_t seed,
                              double amplitude = 1e-4);

// Exact per-mode evolution coeff(k) -> exp(t M(k)) coeff(k); t may be
// negative (the evolution is a group).
FourierState evolve(const ModelSpec& spec, const FourierState& state, double t);

// Real samples on the uniform grid x_i = i/g per axis, point-major with the
// component index fastest.
struct Field {
    int d = 1;
    int N = 1;
    int grid = 0;
    std::vector<double> values;

    int point_count() const;
    double at(int point, int j) const { return values[static_cast<size_t>(point) * N + j]; }
};

// Evaluates the Fourier series on a uniform grid with grid_points >= 2K+2
// points per axis and checks that the imaginary residue stays below
// 1e-10 * norm before discarding it.
Field synthesize(const FourierState& state, int grid_points);

// Series evaluation at one point (coordinates as fractions of the torus side).
std::vector<double> eval_at(const FourierState& state, const std::vector<double>& x);

// Default synthesis resolution: 2*(2K+2) rounded up to a power of two.
int default_grid(int K);

struct Observables {
    double t = 0.0;
    std::vector<double> averages;  // mode-zero coefficients: the spatial means
    double l2_norm = 0.0;
    double min_value = 0.0;
    std::vector<double> component_min;
    std::vector<double> component_max;
};

Observables observables(const ModelSpec& spec, const FourierState& state, double t);

struct Frame {
    double t = 0.0;
    Field field;
};

// Snapshots of exp(-c t) u(t) at the given ascending times. Without an
// explicit rate c the growth bound max Sigma(k) over the state's modes is
// used, which keeps the output O(1) for large t.
std::vector<Frame> rescaled_trajectory(const ModelSpec& spec, const FourierState& state,
                                       const std::vector<double>& times,
                                       std::optional<double> rate = std::nullopt,
                                       int grid_points = 0);

// Least-squares slope of log || u(t) - mean projection || over t_grid for the
// two-speed turning model with rate lambda and speed v on a circle of length
// L. The projection removes the conserved total mass.
double goldstein_kac_convergence_fit(double lambda, double v, double L,
                                     const FourierState& state,
                                     const std::vector<double>& t_grid);

// Reflecting-boundary evolution on (0, L) through the doubled periodic model:
// extend symmetrically, evolve, restrict. Input and output sample cell
// centers x_i = (i + 1/2) L / n.
GridPair simulate_neumann(const SymmetricBlockModel& block, const GridPair& state, double t);

// The evolved doubled-torus state behind simulate_neumann, for boundary
// traces and symmetry diagnostics. Components 0..m-1 carry the rightward
// species, m..2m-1 the leftward ones; coordinates are fractions of 2L.
FourierState neumann_evolved_state(const SymmetricBlockModel& block, const GridPair& state,
                                   double t);

} // namespace trspec
