#include "trspec/modes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "trspec/parallel.hpp"
#include "trspec/perturb.hpp"

namespace trspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lexicographic enumeration of the box |k|_inf <= K in Z^d.
std::vector<std::vector<int>> mode_box(int d, int k_max) {
    std::vector<std::vector<int>> box;
    std::vector<int> k(d, -k_max);
    while (true) {
        box.push_back(k);
        int axis = d - 1;
        while (axis >= 0 && k[axis] == k_max) {
            k[axis] = -k_max;
            --axis;
        }
        if (axis < 0) break;
        ++k[axis];
    }
    return box;
}

bool eig_order(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

} // namespace

int worker_count() {
    if (const char* env = std::getenv("TRSPEC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
        return 1;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> hold(error_lock);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

ComplexMatrix mode_matrix(const ModelSpec& spec, const std::vector<int>& k) {
    ModelSpec s = rescale_to_unit_torus(spec);
    if (static_cast<int>(k.size()) != s.d)
        throw DimensionMismatch("mode_matrix: k must have d entries");
    ComplexMatrix m(s.N, s.N);
    for (int i = 0; i < s.N; ++i) {
        for (int l = 0; l < s.N; ++l) m.at(i, l) = s.B[i][l];
        double kv = 0.0;
        for (int a = 0; a < s.d; ++a) kv += k[a] * s.velocities[i][a];
        m.at(i, i) += cplx(0.0, -2.0 * kPi * kv);
    }
    return m;
}

ComplexMatrix mode_matrix(const ModelSpec& spec, int k) {
    return mode_matrix(spec, std::vector<int>{k});
}

SpectrumTable spectrum_table(const ModelSpec& spec, int k_max) {
    ModelSpec s = rescale_to_unit_torus(spec);
    if (k_max < 0) throw DimensionMismatch("spectrum_table: window must be nonnegative");

    SpectrumTable table;
    table.d = s.d;
    table.N = s.N;
    table.K_max = k_max;
    for (int j = 0; j < s.N; ++j) table.accumulation_abscissas.push_back(s.B[j][j]);

    const auto box = mode_box(s.d, k_max);
    std::vector<std::vector<cplx>> values(box.size());
    parallel_for(static_cast<int>(box.size()), [&](int i) {
        EigenSet es = eigenvalues(mode_matrix(s, box[i]));
        std::sort(es.values.begin(), es.values.end(), eig_order);
        values[i] = std::move(es.values);
    });

    table.records.reserve(box.size() * s.N);
    for (size_t i = 0; i < box.size(); ++i)
        for (int j = 0; j < s.N; ++j)
            table.records.push_back({box[i], j + 1, values[i][j]});
    return table;
}

int default_window(const ModelSpec& spec) {
    if (spec.d == 1) {
        try {
            return std::max(64, 4 * validity_threshold(spec));
        } catch (const DegenerateVelocities&) {
        }
    }
    return 64;
}

SigmaMax sigma_max(const SpectrumTable& table) {
    SigmaMax out;
    out.sup = -std::numeric_limits<double>::infinity();
    size_t i = 0;
    while (i < table.records.size()) {
        const auto& k = table.records[i].k;
        double best = -std::numeric_limits<double>::infinity();
        for (; i < table.records.size() && table.records[i].k == k; ++i)
            best = std::max(best, table.records[i].lambda.real());
        out.profile.emplace_back(k, best);
        out.sup = std::max(out.sup, best);
    }
    for (const auto& [k, v] : out.profile)
        if (v == out.sup) out.argmax.push_back(k);
    return out;
}

namespace {

// Greedy smallest-distance assignment between the previous labels and the new
// eigenvalues; dist(label, candidate) is provided by the caller. Flags a
// near-tie between competing assignments.
std::vector<int> greedy_match(int n, const std::function<double(int, int)>& dist,
                              bool& ambiguous, double tie_tol) {
    std::vector<int> pick(n, -1);
    std::vector<bool> label_done(n, false), cand_done(n, false);
    for (int round = 0; round < n; ++round) {
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        int bl = -1, bc = -1;
        for (int l = 0; l < n; ++l) {
            if (label_done[l]) continue;
            for (int c = 0; c < n; ++c) {
                if (cand_done[c]) continue;
                const double d = dist(l, c);
                if (d < best) {
                    second = best;
                    best = d;
                    bl = l;
                    bc = c;
                } else if (d < second) {
                    second = d;
                }
            }
        }
        if (second < std::numeric_limits<double>::infinity() && second - best <= tie_tol)
            ambiguous = true;
        pick[bl] = bc;
        label_done[bl] = true;
        cand_done[bc] = true;
    }
    return pick;
}

} // namespace

SpectrumTable track_branches(const SpectrumTable& table, const ModelSpec& spec) {
    ModelSpec s = rescale_to_unit_torus(spec);
    if (table.d != 1)
        throw PreconditionUnmet("track_branches: branch continuation needs d = 1");
    if (table.N != s.N) throw DimensionMismatch("track_branches: table does not match spec");
    const int n = table.N;
    const int k_max = table.K_max;

    SpectrumTable out = table;
    out.tracked = true;

    int anchor_from = k_max + 1;
    try {
        anchor_from = validity_threshold(s);
    } catch (const DegenerateVelocities&) {
        out.warnings.push_back(
            "degenerate velocities: no anchoring threshold, tracking by continuity only");
    }

    auto eigs_at = [&](int k) {
        std::vector<cplx> v(n);
        const size_t base = static_cast<size_t>(k + k_max) * n;
        for (int j = 0; j < n; ++j) v[j] = table.records[base + j].lambda;
        return v;
    };

    // labels[k + k_max][j] = index of branch j+1 in the sorted record block.
    std::vector<std::vector<int>> labels(2 * k_max + 1);
    std::vector<int> start(n);
    for (int j = 0; j < n; ++j) start[j] = j;
    labels[k_max] = start;

    std::vector<int> ambiguous_at;
    auto continue_to = [&](int from, int to) {
        const auto prev = eigs_at(from);
        const auto cur = eigs_at(to);
        const auto& prev_labels = labels[from + k_max];

        double scale = 1.0;
        for (const auto& v : cur) scale = std::max(scale, std::abs(v));
        bool ambiguous = false;
        std::vector<int> pick;
        if (std::abs(to) >= anchor_from) {
            pick = greedy_match(
                n,
                [&](int label, int c) {
                    const double target = -2.0 * kPi * to * s.velocities[label][0];
                    return std::abs(cur[c].imag() - target);
                },
                ambiguous, 1e-12 * scale);
        } else {
            pick = greedy_match(
                n,
                [&](int label, int c) { return std::abs(cur[c] - prev[prev_labels[label]]); },
                ambiguous, 1e-12 * scale);
        }
        if (ambiguous) ambiguous_at.push_back(to);
        labels[to + k_max] = pick;
    };

    for (int k = 0; k < k_max; ++k) continue_to(k, k + 1);
    for (int k = 0; k > -k_max; --k) continue_to(k, k - 1);

    for (int k = -k_max; k <= k_max; ++k) {
        const size_t base = static_cast<size_t>(k + k_max) * n;
        const auto vals = eigs_at(k);
        for (int j = 0; j < n; ++j) {
            out.records[base + j].branch = j + 1;
            out.records[base + j].lambda = vals[labels[k + k_max][j]];
        }
    }
    for (int k : ambiguous_at)
        out.warnings.push_back("ambiguous branch match at k = " + std::to_string(k) +
                               ", assigned in label order");
    return out;
}

std::vector<cplx> semigroup_spectrum(const SpectrumTable& table, double t) {
    if (!std::isfinite(t)) throw NonFinite("semigroup_spectrum: time is not finite");
    std::vector<cplx> pts;
    pts.reserve(table.records.size());
    for (const auto& rec : table.records) pts.push_back(std::exp(t * rec.lambda));
    return pts;
}

} // namespace trspec
