#include "trspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace trspec {

namespace {

void check_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw NonFinite(std::string(what) + " is not finite");
}

long long checked_ll(__int128 v, const char* what) {
    if (v > (__int128)4611686018427387904LL || v < -(__int128)4611686018427387904LL)
        throw Error(std::string(what) + ": rational arithmetic overflow");
    return static_cast<long long>(v);
}

} // namespace

Rational Rational::make(long long num, long long den) {
    if (den == 0) throw IrrationalInputUnsupported("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

Rational Rational::parse(const std::string& text) {
    try {
        size_t used = 0;
        const long long p = std::stoll(text, &used);
        if (used == text.size()) return make(p, 1);
        if (text[used] != '/') throw std::invalid_argument(text);
        size_t used2 = 0;
        const std::string rest = text.substr(used + 1);
        const long long q = std::stoll(rest, &used2);
        if (used2 != rest.size()) throw std::invalid_argument(text);
        return make(p, q);
    } catch (const std::exception&) {
        throw IrrationalInputUnsupported("not an exact rational: \"" + text + "\"");
    }
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

ModelSpec validate(ModelSpec spec) {
    if (spec.d < 1) throw DimensionMismatch("d must be at least 1");
    if (spec.N < 1) throw DimensionMismatch("N must be at least 1");
    if (!std::isfinite(spec.L)) throw NonFinite("L is not finite");
    if (spec.L <= 0.0) throw NonPositiveLength("torus side L must be positive");

    if (static_cast<int>(spec.velocities.size()) != spec.N)
        throw DimensionMismatch("velocities must have N rows");
    for (const auto& v : spec.velocities) {
        if (static_cast<int>(v.size()) != spec.d)
            throw DimensionMismatch("each velocity must have d entries");
        for (double x : v) check_finite(x, "velocity entry");
    }
    if (static_cast<int>(spec.B.size()) != spec.N)
        throw DimensionMismatch("B must have N rows");
    for (const auto& row : spec.B) {
        if (static_cast<int>(row.size()) != spec.N)
            throw DimensionMismatch("each row of B must have N entries");
        for (double x : row) check_finite(x, "entry of B");
    }
    if (!spec.velocities_exact.empty()) {
        if (static_cast<int>(spec.velocities_exact.size()) != spec.N)
            throw DimensionMismatch("velocities_exact must have N rows");
        for (int j = 0; j < spec.N; ++j) {
            if (static_cast<int>(spec.velocities_exact[j].size()) != spec.d)
                throw DimensionMismatch("each exact velocity must have d entries");
            for (int i = 0; i < spec.d; ++i) {
                const double approx = spec.velocities_exact[j][i].value() * spec.L;
                const double given = spec.velocities[j][i];
                if (std::abs(approx - given) > 1e-9 * std::max(1.0, std::abs(given)))
                    throw Error("velocities_exact disagrees with velocities at component " +
                                std::to_string(j + 1));
            }
        }
    }

    spec.norm_B_inf = 0.0;
    for (const auto& row : spec.B) {
        double s = 0.0;
        for (double x : row) s += std::abs(x);
        spec.norm_B_inf = std::max(spec.norm_B_inf, s);
    }
    spec.velocity_gap = std::numeric_limits<double>::infinity();
    if (spec.d == 1) {
        for (int i = 0; i < spec.N; ++i)
            for (int l = i + 1; l < spec.N; ++l)
                spec.velocity_gap = std::min(
                    spec.velocity_gap, std::abs(spec.velocities[i][0] - spec.velocities[l][0]));
    }
    return spec;
}

ModelSpec rescale_to_unit_torus(ModelSpec spec) {
    spec = validate(std::move(spec));
    for (auto& v : spec.velocities)
        for (double& x : v) x /= spec.L;
    if (spec.L != 1.0) spec.velocities_exact.clear();
    spec.L = 1.0;
    return validate(std::move(spec));
}

ModelSpec apply_killing(ModelSpec spec, double delta) {
    if (!(delta > 0.0)) throw NonPositiveDelta("killing rate must be positive");
    spec = validate(std::move(spec));
    for (int j = 0; j < spec.N; ++j) spec.B[j][j] -= delta;
    return validate(std::move(spec));
}

PositivityReport positivity_check(const ModelSpec& spec) {
    PositivityReport rep{true, {}};
    for (int i = 0; i < spec.N; ++i)
        for (int j = 0; j < spec.N; ++j)
            if (i != j && spec.B[i][j] < 0.0) {
                rep.positive = false;
                rep.offending.emplace_back(i + 1, j + 1);
            }
    return rep;
}

ConservationReport conservation_basis(const ModelSpec& spec) {
    const int n = spec.N;
    const double tol = 1e-12 * std::max(1.0, spec.norm_B_inf);

    // Row-reduce B^T; kernel vectors come from the free columns.
    std::vector<std::vector<double>> t(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t[i][j] = spec.B[j][i];

    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < n; ++col) {
        int piv = row;
        for (int r = row + 1; r < n; ++r)
            if (std::abs(t[r][col]) > std::abs(t[piv][col])) piv = r;
        if (std::abs(t[piv][col]) <= tol) continue;
        std::swap(t[piv], t[row]);
        const double p = t[row][col];
        for (int j = 0; j < n; ++j) t[row][j] /= p;
        for (int r = 0; r < n; ++r) {
            if (r == row) continue;
            const double f = t[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) t[r][j] -= f * t[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }

    ConservationReport rep;
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col) is_pivot[c] = true;
    for (int free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<double> y(n, 0.0);
        y[free] = 1.0;
        for (size_t r = 0; r < pivot_col.size(); ++r) y[pivot_col[r]] = -t[r][free];
        double norm = 0.0;
        for (double x : y) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : y) x /= norm;
        rep.basis.push_back(std::move(y));
    }

    double worst_colsum = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += spec.B[j][i];
        worst_colsum = std::max(worst_colsum, std::abs(s));
    }
    rep.mass_conserving = worst_colsum <= tol;
    return rep;
}

namespace {

// Minimal t > 0 with t * r integral for every r in the list, i.e. the least
// common multiple of the reduced periods den/|num|.
Rational joint_period_of(const std::vector<Rational>& rates, const char* what) {
    __int128 lcm_den = 1;
    long long gcd_num = 0;
    for (const Rational& r : rates) {
        const long long p = r.num < 0 ? -r.num : r.num;
        const long long q = r.den;
        const long long g = std::gcd(checked_ll(lcm_den, what), q);
        lcm_den = lcm_den / g * q;
        checked_ll(lcm_den, what);
        gcd_num = std::gcd(gcd_num, p);
    }
    return Rational::make(checked_ll(lcm_den, what), gcd_num);
}

} // namespace

PeriodicityReport transport_periodicity(const ModelSpec& spec) {
    if (spec.velocities_exact.empty())
        throw IrrationalInputUnsupported(
            "transport_periodicity requires velocities_exact (winding rates as p/q)");
    ModelSpec checked = validate(spec);

    PeriodicityReport rep;
    std::vector<Rational> all_rates;
    for (int j = 0; j < checked.N; ++j) {
        std::vector<Rational> rates;
        for (const Rational& r : checked.velocities_exact[j])
            if (r.num != 0) rates.push_back(r);
        if (rates.empty())
            throw Error("transport_periodicity: component " + std::to_string(j + 1) +
                        " has zero velocity, no minimal period exists");
        rep.component_periodic.push_back(true);
        rep.component_period.push_back(joint_period_of(rates, "component period"));
        all_rates.insert(all_rates.end(), rates.begin(), rates.end());
    }
    rep.jointly_periodic = true;
    rep.joint_period = joint_period_of(all_rates, "joint period");
    return rep;
}

ModelSpec to_periodic_model(const SymmetricBlockModel& block) {
    const int m = block.species;
    if (m < 1) throw DimensionMismatch("block model needs at least one species");
    if (static_cast<int>(block.speeds.size()) != m)
        throw DimensionMismatch("speeds must have one entry per species");
    for (double g : block.speeds)
        if (!(g > 0.0)) throw Error("block model speeds must be positive");
    auto check_block = [&](const std::vector<std::vector<double>>& blk, const char* name) {
        if (static_cast<int>(blk.size()) != m)
            throw DimensionMismatch(std::string(name) + " must be species x species");
        for (const auto& row : blk)
            if (static_cast<int>(row.size()) != m)
                throw DimensionMismatch(std::string(name) + " must be species x species");
    };
    check_block(block.B1, "B1");
    check_block(block.B2, "B2");
    if (!(block.L > 0.0)) throw NonPositiveLength("block model length must be positive");

    ModelSpec spec;
    spec.d = 1;
    spec.N = 2 * m;
    spec.L = 2.0 * block.L;
    spec.velocities.resize(spec.N);
    for (int j = 0; j < m; ++j) {
        spec.velocities[j] = {block.speeds[j]};
        spec.velocities[m + j] = {-block.speeds[j]};
    }
    spec.B.assign(spec.N, std::vector<double>(spec.N, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            spec.B[i][j] = block.B1[i][j];
            spec.B[i][m + j] = block.B2[i][j];
            spec.B[m + i][j] = block.B2[i][j];
            spec.B[m + i][m + j] = block.B1[i][j];
        }
    return validate(std::move(spec));
}

GridPair neumann_extend(const SymmetricBlockModel& block, const GridPair& state) {
    const int m = block.species;
    if (static_cast<int>(state.alpha.size()) != m || static_cast<int>(state.beta.size()) != m)
        throw DimensionMismatch("state must have one grid row per species");
    if (state.alpha.empty()) throw DimensionMismatch("empty state");
    const size_t n = state.alpha[0].size();
    for (const auto& row : state.alpha)
        if (row.size() != n) throw DimensionMismatch("ragged grid in alpha");
    for (const auto& row : state.beta)
        if (row.size() != n) throw DimensionMismatch("ragged grid in beta");
    if (n == 0 || n % 2 != 0) throw OddGrid("grid size must be even and positive");

    GridPair out;
    out.alpha.assign(m, std::vector<double>(2 * n));
    out.beta.assign(m, std::vector<double>(2 * n));
    for (int s = 0; s < m; ++s) {
        for (size_t i = 0; i < n; ++i) {
            out.alpha[s][i] = state.alpha[s][i];
            out.beta[s][i] = state.beta[s][i];
            // x -> 2L - x sends grid index n + i to index n - 1 - i.
            out.alpha[s][n + i] = state.beta[s][n - 1 - i];
            out.beta[s][n + i] = state.alpha[s][n - 1 - i];
        }
    }
    return out;
}

namespace {

using nlohmann::json;

std::vector<std::vector<double>> velocities_from_json(const json& v, int expect_rows) {
    std::vector<std::vector<double>> out;
    for (const auto& row : v) {
        if (row.is_number())
            out.push_back({row.get<double>()});
        else
            out.push_back(row.get<std::vector<double>>());
    }
    if (expect_rows >= 0 && static_cast<int>(out.size()) != expect_rows)
        throw DimensionMismatch("velocities row count disagrees with N");
    return out;
}

} // namespace

ModelSpec model_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("model JSON parse failure: ") + e.what());
    }
    ModelSpec spec;
    try {
        spec.d = j.at("d").get<int>();
        spec.N = j.at("N").get<int>();
        spec.L = j.at("L").get<double>();
        spec.velocities = velocities_from_json(j.at("velocities"), spec.N);
        spec.B = j.at("B").get<std::vector<std::vector<double>>>();
        if (j.contains("velocities_exact")) {
            for (const auto& row : j.at("velocities_exact")) {
                std::vector<Rational> r;
                if (row.is_string())
                    r.push_back(Rational::parse(row.get<std::string>()));
                else
                    for (const auto& e : row) r.push_back(Rational::parse(e.get<std::string>()));
                spec.velocities_exact.push_back(std::move(r));
            }
        }
    } catch (const json::exception& e) {
        throw Error(std::string("model JSON schema failure: ") + e.what());
    }
    return validate(std::move(spec));
}

std::string model_to_json_text(const ModelSpec& spec) {
    json j;
    j["d"] = spec.d;
    j["N"] = spec.N;
    j["L"] = spec.L;
    if (spec.d == 1) {
        std::vector<double> flat;
        for (const auto& v : spec.velocities) flat.push_back(v[0]);
        j["velocities"] = flat;
    } else {
        j["velocities"] = spec.velocities;
    }
    j["B"] = spec.B;
    if (!spec.velocities_exact.empty()) {
        json ex = json::array();
        for (const auto& row : spec.velocities_exact) {
            if (spec.d == 1) {
                ex.push_back(row[0].str());
            } else {
                json r = json::array();
                for (const auto& e : row) r.push_back(e.str());
                ex.push_back(r);
            }
        }
        j["velocities_exact"] = ex;
    }
    return j.dump(2) + "\n";
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json_text(ss.str());
}

void save_model(const ModelSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path);
    out << model_to_json_text(spec);
}

} // namespace trspec
