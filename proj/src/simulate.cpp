#include "trspec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "trspec/errors.hpp"
#include "trspec/modes.hpp"
#include "trspec/parallel.hpp"

namespace trspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool next_mode(std::vector<int>& k, int K) {
    for (int axis = static_cast<int>(k.size()) - 1; axis >= 0; --axis) {
        if (k[axis] < K) {
            ++k[axis];
            return true;
        }
        k[axis] = -K;
    }
    return false;
}

// Uniform in (0, 1]: 53 mantissa bits from the generator, shifted off zero.
double uniform_unit(std::mt19937_64& g) {
    return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller: two uniforms give one standard normal (the sine partner is
// discarded to keep the draw order simple and documented).
double standard_normal(std::mt19937_64& g) {
    const double u1 = uniform_unit(g);
    const double u2 = uniform_unit(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

void check_state_shape(const ModelSpec& spec, const FourierState& state) {
    if (state.d != spec.d || state.N != spec.N)
        throw DimensionMismatch("state shape does not match the model");
    if (static_cast<int>(state.coeffs.size()) != state.mode_count() * state.N)
        throw DimensionMismatch("coefficient storage does not match the cutoff");
}

} // namespace

int FourierState::mode_count() const {
    int count = 1;
    for (int axis = 0; axis < d; ++axis) count *= 2 * K + 1;
    return count;
}

int FourierState::mode_index(const std::vector<int>& k) const {
    if (static_cast<int>(k.size()) != d) throw DimensionMismatch("mode index size");
    int index = 0;
    for (int axis = 0; axis < d; ++axis) {
        if (k[axis] < -K || k[axis] > K) throw DimensionMismatch("mode outside cutoff");
        index = index * (2 * K + 1) + (k[axis] + K);
    }
    return index;
}

cplx& FourierState::at(const std::vector<int>& k, int j) {
    return coeffs[static_cast<size_t>(mode_index(k)) * N + j];
}

const cplx& FourierState::at(const std::vector<int>& k, int j) const {
    return coeffs[static_cast<size_t>(mode_index(k)) * N + j];
}

double FourierState::norm() const {
    double sum = 0.0;
    for (const cplx& c : coeffs) sum += std::norm(c);
    return std::sqrt(sum);
}

FourierState zero_state(const ModelSpec& spec, int K) {
    if (K < 0) throw Error("cutoff must be nonnegative");
    FourierState st;
    st.d = spec.d;
    st.N = spec.N;
    st.K = K;
    st.coeffs.assign(static_cast<size_t>(st.mode_count()) * st.N, cplx(0.0));
    return st;
}

FourierState sample_random_ic(const ModelSpec& spec, int K, std::uint64_t seed,
                              double amplitude) {
    if (spec.d != 1) throw PreconditionUnmet("random sampling is defined for d = 1");
    if (K < 1) throw Error("cutoff must be at least 1");
    if (amplitude < 0.0 || !std::isfinite(amplitude))
        throw NonFinite("amplitude must be finite and nonnegative");

    FourierState st = zero_state(spec, K);
    std::mt19937_64 g(seed);
    for (int k = 0; k <= K; ++k) {
        const double variance = amplitude / ((k + 1.0) * (k + 1.0));
        for (int j = 0; j < spec.N; ++j) {
            if (k == 0) {
                st.at({0}, j) = standard_normal(g) * std::sqrt(variance);
                continue;
            }
            const double half = std::sqrt(variance / 2.0);
            const cplx value(standard_normal(g) * half, standard_normal(g) * half);
            st.at({k}, j) = value;
            st.at({-k}, j) = std::conj(value);
        }
    }
    return st;
}

FourierState evolve(const ModelSpec& spec, const FourierState& state, double t) {
    if (!std::isfinite(t)) throw NonFinite("time must be finite");
    check_state_shape(spec, state);
    const ModelSpec s = rescale_to_unit_torus(spec);

    FourierState out = state;
    std::vector<std::vector<int>> modes;
    modes.reserve(state.mode_count());
    std::vector<int> k(spec.d, -state.K);
    do {
        modes.push_back(k);
    } while (next_mode(k, state.K));

    parallel_for(static_cast<int>(modes.size()), [&](int idx) {
        const ComplexMatrix propagator = expm(mode_matrix(s, modes[idx]), t);
        const size_t base = static_cast<size_t>(idx) * state.N;
        std::vector<cplx> in(state.coeffs.begin() + base, state.coeffs.begin() + base + state.N);
        const std::vector<cplx> result = propagator * in;
        std::copy(result.begin(), result.end(), out.coeffs.begin() + base);
    });
    return out;
}

int default_grid(int K) {
    int g = 1;
    while (g < 2 * (2 * K + 2)) g *= 2;
    return g;
}

int Field::point_count() const {
    int count = 1;
    for (int axis = 0; axis < d; ++axis) count *= grid;
    return count;
}

Field synthesize(const FourierState& state, int grid_points) {
    if (grid_points < 2 * state.K + 2)
        throw GridTooCoarse("need at least 2K+2 grid points per axis");

    Field f;
    f.d = state.d;
    f.N = state.N;
    f.grid = grid_points;
    const int points = f.point_count();
    f.values.assign(static_cast<size_t>(points) * f.N, 0.0);

    std::vector<double> residues(points, 0.0);
    parallel_for(points, [&](int p) {
        std::vector<double> x(state.d);
        int rest = p;
        for (int axis = state.d - 1; axis >= 0; --axis) {
            x[axis] = static_cast<double>(rest % grid_points) / grid_points;
            rest /= grid_points;
        }
        std::vector<cplx> acc(state.N, cplx(0.0));
        std::vector<int> k(state.d, -state.K);
        int idx = 0;
        do {
            double phase = 0.0;
            for (int axis = 0; axis < state.d; ++axis) phase += k[axis] * x[axis];
            const cplx wave = std::polar(1.0, 2.0 * kPi * phase);
            const size_t base = static_cast<size_t>(idx) * state.N;
            for (int j = 0; j < state.N; ++j) acc[j] += state.coeffs[base + j] * wave;
            ++idx;
        } while (next_mode(k, state.K));
        double residue = 0.0;
        for (int j = 0; j < state.N; ++j) {
            residue = std::max(residue, std::abs(acc[j].imag()));
            f.values[static_cast<size_t>(p) * state.N + j] = acc[j].real();
        }
        residues[p] = residue;
    });

    const double worst = *std::max_element(residues.begin(), residues.end());
    if (worst > 1e-10 * state.norm())
        throw ImaginaryResidue("synthesized field is not real; broken conjugate pairing");
    return f;
}

std::vector<double> eval_at(const FourierState& state, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != state.d)
        throw DimensionMismatch("evaluation point dimension");
    std::vector<cplx> acc(state.N, cplx(0.0));
    std::vector<int> k(state.d, -state.K);
    int idx = 0;
    do {
        double phase = 0.0;
        for (int axis = 0; axis < state.d; ++axis) phase += k[axis] * x[axis];
        const cplx wave = std::polar(1.0, 2.0 * kPi * phase);
        const size_t base = static_cast<size_t>(idx) * state.N;
        for (int j = 0; j < state.N; ++j) acc[j] += state.coeffs[base + j] * wave;
        ++idx;
    } while (next_mode(k, state.K));

    std::vector<double> out(state.N);
    for (int j = 0; j < state.N; ++j) {
        if (std::abs(acc[j].imag()) > 1e-10 * state.norm())
            throw ImaginaryResidue("series value is not real; broken conjugate pairing");
        out[j] = acc[j].real();
    }
    return out;
}

Observables observables(const ModelSpec& spec, const FourierState& state, double t) {
    check_state_shape(spec, state);
    Observables ob;
    ob.t = t;
    ob.l2_norm = state.norm();
    ob.averages.resize(state.N);
    const std::vector<int> zero(state.d, 0);
    for (int j = 0; j < state.N; ++j) ob.averages[j] = state.at(zero, j).real();

    const Field f = synthesize(state, default_grid(state.K));
    ob.component_min.assign(state.N, std::numeric_limits<double>::infinity());
    ob.component_max.assign(state.N, -std::numeric_limits<double>::infinity());
    for (int p = 0; p < f.point_count(); ++p) {
        for (int j = 0; j < state.N; ++j) {
            ob.component_min[j] = std::min(ob.component_min[j], f.at(p, j));
            ob.component_max[j] = std::max(ob.component_max[j], f.at(p, j));
        }
    }
    ob.min_value = *std::min_element(ob.component_min.begin(), ob.component_min.end());
    return ob;
}

std::vector<Frame> rescaled_trajectory(const ModelSpec& spec, const FourierState& state,
                                       const std::vector<double>& times,
                                       std::optional<double> rate, int grid_points) {
    check_state_shape(spec, state);
    for (size_t i = 1; i < times.size(); ++i)
        if (times[i] < times[i - 1]) throw Error("times must be sorted ascending");

    const ModelSpec s = rescale_to_unit_torus(spec);
    const double c = rate ? *rate : sigma_max(spectrum_table(s, state.K)).sup;
    const int g = grid_points > 0 ? grid_points : default_grid(state.K);

    std::vector<Frame> frames;
    frames.reserve(times.size());
    for (double t : times) {
        Frame frame;
        frame.t = t;
        frame.field = synthesize(evolve(s, state, t), g);
        const double factor = std::exp(-c * t);
        for (double& v : frame.field.values) v *= factor;
        frames.push_back(std::move(frame));
    }
    return frames;
}

double goldstein_kac_convergence_fit(double lambda, double v, double L,
                                     const FourierState& state,
                                     const std::vector<double>& t_grid) {
    if (lambda <= 0.0) throw NonPositiveRates("turning rate must be positive");
    if (state.N != 2 || state.d != 1)
        throw DimensionMismatch("two-component one-dimensional state required");
    if (t_grid.size() < 2) throw DegenerateData("need at least two sample times");

    ModelSpec s;
    s.d = 1;
    s.N = 2;
    s.L = L;
    s.velocities = {{v}, {-v}};
    s.B = {{-lambda, lambda}, {lambda, -lambda}};
    s = validate(std::move(s));

    std::vector<double> logs(t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) {
        const FourierState evolved = evolve(s, state, t_grid[i]);
        const cplx mean = 0.5 * (evolved.at({0}, 0) + evolved.at({0}, 1));
        double dev = std::norm(evolved.at({0}, 0) - mean) + std::norm(evolved.at({0}, 1) - mean);
        std::vector<int> k{-state.K};
        int idx = 0;
        do {
            if (k[0] != 0) {
                const size_t base = static_cast<size_t>(idx) * 2;
                dev += std::norm(evolved.coeffs[base]) + std::norm(evolved.coeffs[base + 1]);
            }
            ++idx;
        } while (next_mode(k, state.K));
        const double norm = std::sqrt(dev);
        if (!(norm > 1e-150)) throw DegenerateData("deviation norm vanished");
        logs[i] = std::log(norm);
    }

    double t_bar = 0.0, y_bar = 0.0;
    for (size_t i = 0; i < t_grid.size(); ++i) {
        t_bar += t_grid[i];
        y_bar += logs[i];
    }
    t_bar /= t_grid.size();
    y_bar /= t_grid.size();
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < t_grid.size(); ++i) {
        num += (t_grid[i] - t_bar) * (logs[i] - y_bar);
        den += (t_grid[i] - t_bar) * (t_grid[i] - t_bar);
    }
    if (den == 0.0) throw DegenerateData("sample times are all equal");
    return num / den;
}

namespace {

// Trigonometric interpolation of real samples at the cell centers
// theta_i = (i + 1/2) / M. The two half-weighted |k| = M/2 coefficients
// reproduce the alternating component exactly, so evaluating back at the
// cell centers returns the input samples.
FourierState analyze_cell_centered(int N, const std::vector<std::vector<double>>& comps) {
    const int M = static_cast<int>(comps[0].size());
    FourierState st;
    st.d = 1;
    st.N = N;
    st.K = M / 2;
    st.coeffs.assign(static_cast<size_t>(st.mode_count()) * N, cplx(0.0));
    for (int k = -st.K; k <= st.K; ++k) {
        for (int j = 0; j < N; ++j) {
            cplx sum(0.0);
            for (int i = 0; i < M; ++i)
                sum += comps[j][i] * std::polar(1.0, -2.0 * kPi * k * (i + 0.5) / M);
            sum /= static_cast<double>(M);
            if (k == st.K || k == -st.K) sum *= 0.5;
            st.at({k}, j) = sum;
        }
    }
    return st;
}

} // namespace

FourierState neumann_evolved_state(const SymmetricBlockModel& block, const GridPair& state,
                                   double t) {
    const GridPair ext = neumann_extend(block, state);
    const int m = block.species;
    std::vector<std::vector<double>> comps(2 * m);
    for (int j = 0; j < m; ++j) {
        comps[j] = ext.alpha[j];
        comps[m + j] = ext.beta[j];
    }
    const ModelSpec per = to_periodic_model(block);
    return evolve(per, analyze_cell_centered(2 * m, comps), t);
}

GridPair simulate_neumann(const SymmetricBlockModel& block, const GridPair& state, double t) {
    const FourierState evolved = neumann_evolved_state(block, state, t);
    const int m = block.species;
    const int n = static_cast<int>(state.alpha[0].size());

    GridPair out;
    out.alpha.assign(m, std::vector<double>(n));
    out.beta.assign(m, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
        const std::vector<double> vals = eval_at(evolved, {(i + 0.5) / (2.0 * n)});
        for (int j = 0; j < m; ++j) {
            out.alpha[j][i] = vals[j];
            out.beta[j][i] = vals[m + j];
        }
    }
    return out;
}

} // namespace trspec
