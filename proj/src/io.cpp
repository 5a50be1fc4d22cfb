#include "trspec/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trspec/errors.hpp"

namespace trspec {

namespace {

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

void append_eigen_rows(std::string& out, const SpectrumTable& table,
                       bool semigroup, double t) {
    for (const SpectrumRecord& rec : table.records) {
        for (int value : rec.k) {
            out += fmt_double(value);
            out += ',';
        }
        out += fmt_double(rec.branch);
        const cplx z = semigroup ? std::exp(t * rec.lambda) : rec.lambda;
        out += ',';
        out += fmt_double(z.real());
        out += ',';
        out += fmt_double(z.imag());
        out += '\n';
    }
}

std::string eigen_header(int d) {
    std::string head;
    for (int axis = 0; axis < d; ++axis) {
        head += 'k';
        head += std::to_string(axis);
        head += ',';
    }
    head += "branch,re,im\n";
    return head;
}

} // namespace

std::string fmt_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string spectrum_csv(const SpectrumTable& table) {
    std::string out = eigen_header(table.d);
    append_eigen_rows(out, table, false, 0.0);
    return out;
}

std::string semigroup_csv(const SpectrumTable& table, double t) {
    std::string out = eigen_header(table.d);
    append_eigen_rows(out, table, true, t);
    return out;
}

std::string sigma_profile_csv(const ClassificationReport& report) {
    std::string out = "k,sigma\n";
    for (const auto& [k, sigma] : report.sigma_profile) {
        out += fmt_double(k);
        out += ',';
        out += fmt_double(sigma);
        out += '\n';
    }
    return out;
}

std::string classification_json(const ClassificationReport& report,
                                const std::string& profile_path) {
    nlohmann::json j;
    j["verdict"] = verdict_name(report.verdict);
    j["b"] = report.b;
    j["sup_sigma"] = report.sup_sigma;
    j["K_max"] = report.K_max;
    j["dominant_modes"] = report.dominant_modes;
    j["warnings"] = report.warnings;
    if (profile_path.empty())
        j["sigma_profile_csv"] = nullptr;
    else
        j["sigma_profile_csv"] = profile_path;
    return j.dump(2) + "\n";
}

std::string monotonicity_json(const std::vector<MonotonicityReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const MonotonicityReport& rep : reports) {
        nlohmann::json j;
        j["branch"] = rep.branch + 1;
        j["coeffs"] = rep.coeffs;
        if (rep.n_star)
            j["n_star"] = *rep.n_star;
        else
            j["n_star"] = nullptr;
        j["direction"] = direction_name(rep.direction);
        j["K_pert"] = rep.K_pert;
        j["warnings"] = rep.warnings;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string trajectory_csv(const std::vector<Frame>& frames, double L) {
    if (frames.empty()) throw Error("trajectory has no frames");
    const int d = frames.front().field.d;
    std::string out = "t,";
    for (int axis = 0; axis < d; ++axis) {
        out += 'x';
        out += std::to_string(axis);
        out += ',';
    }
    out += "component,value\n";
    for (const Frame& frame : frames) {
        const Field& f = frame.field;
        std::vector<int> idx(d, 0);
        for (int p = 0; p < f.point_count(); ++p) {
            int rest = p;
            for (int axis = d - 1; axis >= 0; --axis) {
                idx[axis] = rest % f.grid;
                rest /= f.grid;
            }
            for (int j = 0; j < f.N; ++j) {
                out += fmt_double(frame.t);
                out += ',';
                for (int axis = 0; axis < d; ++axis) {
                    out += fmt_double(idx[axis] * L / f.grid);
                    out += ',';
                }
                out += fmt_double(j);
                out += ',';
                out += fmt_double(f.at(p, j));
                out += '\n';
            }
        }
    }
    return out;
}

std::string observables_csv(const std::vector<Observables>& rows) {
    if (rows.empty()) throw Error("no observable samples");
    const int n = static_cast<int>(rows.front().averages.size());
    std::string out = "t,l2,min";
    for (int j = 0; j < n; ++j) out += ",avg" + std::to_string(j);
    for (int j = 0; j < n; ++j) out += ",min" + std::to_string(j);
    for (int j = 0; j < n; ++j) out += ",max" + std::to_string(j);
    out += '\n';
    for (const Observables& ob : rows) {
        out += fmt_double(ob.t);
        out += ',';
        out += fmt_double(ob.l2_norm);
        out += ',';
        out += fmt_double(ob.min_value);
        for (int j = 0; j < n; ++j) out += ',' + fmt_double(ob.averages[j]);
        for (int j = 0; j < n; ++j) out += ',' + fmt_double(ob.component_min[j]);
        for (int j = 0; j < n; ++j) out += ',' + fmt_double(ob.component_max[j]);
        out += '\n';
    }
    return out;
}

FourierState load_ic(const std::string& json_text, const ModelSpec& spec) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("initial data is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("K") || !j["K"].is_number_integer())
        throw Error("initial data needs an integer field K");
    const int K = j["K"].get<int>();
    if (K < 0) throw Error("field K must be nonnegative");

    FourierState st = zero_state(spec, K);
    for (const nlohmann::json& entry : j.value("entries", nlohmann::json::array())) {
        std::vector<int> k;
        if (entry.contains("k") && entry["k"].is_array())
            k = entry["k"].get<std::vector<int>>();
        else if (entry.contains("k") && entry["k"].is_number_integer())
            k = {entry["k"].get<int>()};
        else
            throw Error("entry field k must be an integer or integer array");
        if (static_cast<int>(k.size()) != spec.d)
            throw Error("entry mode dimension does not match the model");
        for (int value : k)
            if (std::abs(value) > K) throw Error("entry mode exceeds the cutoff K");
        if (!entry.contains("component") || !entry["component"].is_number_integer())
            throw Error("entry needs an integer field component");
        const int j_comp = entry["component"].get<int>();
        if (j_comp < 0 || j_comp >= spec.N)
            throw Error("entry component out of range");
        st.at(k, j_comp) = cplx(entry.value("re", 0.0), entry.value("im", 0.0));
    }

    double max_abs = 1.0;
    for (const cplx& c : st.coeffs) max_abs = std::max(max_abs, std::abs(c));
    std::vector<int> k(st.d, -K);
    std::vector<int> neg(st.d);
    do {
        for (int axis = 0; axis < st.d; ++axis) neg[axis] = -k[axis];
        for (int j_comp = 0; j_comp < st.N; ++j_comp)
            if (std::abs(st.at(neg, j_comp) - std::conj(st.at(k, j_comp))) > 1e-9 * max_abs)
                throw Error("initial data breaks the conjugate pairing of a real field");
    } while (next_mode(k, K));
    return st;
}

std::string gnuplot_spectrum(const std::string& csv_path) {
    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set xlabel 're'\n"
        << "set ylabel 'im'\n"
        << "plot '" << csv_path << "' using 're':'im' with points pt 7 ps 0.4 notitle\n";
    return out.str();
}

std::string gnuplot_profile(const std::string& csv_path) {
    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set xlabel 'k'\n"
        << "set ylabel 'sigma'\n"
        << "plot '" << csv_path << "' using 'k':'sigma' with linespoints notitle\n";
    return out.str();
}

std::string gnuplot_trajectory(const std::string& csv_path, int components,
                               const std::vector<double>& times) {
    if (times.empty()) throw Error("no times to plot");
    const std::string t_last = fmt_double(times.back());
    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set xlabel 'x'\n"
        << "set ylabel 'u'\n"
        << "t_show = " << t_last << "\n"
        << "plot";
    for (int j = 0; j < components; ++j) {
        if (j > 0) out << ',';
        out << " '" << csv_path << "' every ::1 using"
            << " (abs($1 - t_show) < 1e-12 && $3 == " << j << " ? $2 : 1/0):4"
            << " with lines title 'component " << j << "'";
    }
    out << '\n';
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

} // namespace trspec
