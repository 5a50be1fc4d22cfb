#include <cctype>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trspec/classify.hpp"
#include "trspec/errors.hpp"
#include "trspec/io.hpp"
#include "trspec/modes.hpp"
#include "trspec/parallel.hpp"
#include "trspec/perturb.hpp"
#include "trspec/simulate.hpp"

namespace fs = std::filesystem;
using namespace trspec;

namespace {

std::string semigroup_path_for(const std::string& out) {
    const std::string suffix = ".csv";
    if (out.size() > suffix.size() &&
        out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
        return out.substr(0, out.size() - suffix.size()) + ".semigroup.csv";
    return out + ".semigroup.csv";
}

double parse_rate(const std::string& text) {
    size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw Error("rescale must be 'auto' or a number, got '" + text + "'");
    }
    if (used != text.size())
        throw Error("rescale must be 'auto' or a number, got '" + text + "'");
    return value;
}

// Scalar locations a sweep may vary: B[i][j], velocities[i],
// velocities[i][axis], L.
struct AxisPath {
    enum class Kind { Reaction, Velocity, Length } kind = Kind::Length;
    int i = 0;
    int j = 0;
};

AxisPath parse_axis_path(const std::string& text) {
    AxisPath path;
    size_t pos = 0;
    auto read_index = [&](const char* what) {
        if (pos >= text.size() || text[pos] != '[')
            throw Error(std::string("axis path '") + text + "' is missing a " + what + " index");
        ++pos;
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start || pos >= text.size() || text[pos] != ']')
            throw Error(std::string("axis path '") + text + "' has a malformed " + what + " index");
        int value = std::stoi(text.substr(start, pos - start));
        ++pos;
        return value;
    };

    if (text == "L") {
        path.kind = AxisPath::Kind::Length;
        return path;
    }
    if (text.rfind("B[", 0) == 0) {
        pos = 1;
        path.kind = AxisPath::Kind::Reaction;
        path.i = read_index("row");
        path.j = read_index("column");
    } else if (text.rfind("velocities[", 0) == 0) {
        pos = 10;
        path.kind = AxisPath::Kind::Velocity;
        path.i = read_index("species");
        path.j = (pos < text.size()) ? read_index("axis") : 0;
    } else {
        throw Error("axis path '" + text + "' is not one of B[i][j], velocities[i], L");
    }
    if (pos != text.size())
        throw Error("axis path '" + text + "' has trailing characters");
    return path;
}

double& resolve_axis(ModelSpec& spec, const AxisPath& path, const std::string& text) {
    switch (path.kind) {
        case AxisPath::Kind::Length:
            return spec.L;
        case AxisPath::Kind::Reaction:
            if (path.i < 0 || path.i >= spec.N || path.j < 0 || path.j >= spec.N)
                throw Error("axis path '" + text + "' is out of range for N = " +
                            std::to_string(spec.N));
            return spec.B[path.i][path.j];
        case AxisPath::Kind::Velocity:
            if (path.i < 0 || path.i >= spec.N || path.j < 0 || path.j >= spec.d)
                throw Error("axis path '" + text + "' is out of range");
            return spec.velocities[path.i][path.j];
    }
    throw Error("unreachable");
}

struct SweepAxis {
    std::string text;
    AxisPath path;
    std::vector<double> values;
};

int run_spectrum(const std::string& model_path, int kmax, const std::string& out,
                 std::optional<double> time, const std::string& semigroup_out,
                 bool gnuplot) {
    const ModelSpec spec = load_model(model_path);
    const SpectrumTable table = spectrum_table(spec, kmax);
    write_text_file(out, spectrum_csv(table));
    if (time) {
        const std::string path = semigroup_out.empty() ? semigroup_path_for(out) : semigroup_out;
        write_text_file(path, semigroup_csv(table, *time));
    }
    if (gnuplot) write_text_file(out + ".gp", gnuplot_spectrum(out));
    return 0;
}

int run_classify(const std::string& model_path, int kmax, double tol, bool strict,
                 const std::string& out, const std::string& profile, bool gnuplot) {
    const ModelSpec spec = load_model(model_path);
    const ClassificationReport report = classify(spec, kmax, tol);
    if (!profile.empty()) {
        write_text_file(profile, sigma_profile_csv(report));
        if (gnuplot) write_text_file(profile + ".gp", gnuplot_profile(profile));
    } else if (gnuplot) {
        throw Error("--gnuplot needs --profile to have a data file to reference");
    }
    const std::string text = classification_json(report, profile);
    if (out.empty())
        std::cout << text;
    else
        write_text_file(out, text);
    return (strict && report.verdict == Verdict::Indeterminate) ? 3 : 0;
}

int run_coeffs(const std::string& model_path, int order, const std::string& out) {
    const ModelSpec spec = load_model(model_path);
    std::vector<MonotonicityReport> reports = monotonicity(spec);
    for (MonotonicityReport& rep : reports) {
        std::vector<double> coeffs;
        for (int n = 1; n <= order; ++n) coeffs.push_back(coefficient(spec, rep.branch, n));
        rep.coeffs = std::move(coeffs);
    }
    const std::string text = monotonicity_json(reports);
    if (out.empty())
        std::cout << text;
    else
        write_text_file(out, text);
    return 0;
}

int run_simulate(const std::string& model_path, std::vector<double> times, int kmax,
                 int nx, std::uint64_t seed, double amplitude, const std::string& ic_path,
                 const std::string& rescale, const std::string& out_dir, bool gnuplot) {
    const ModelSpec spec = load_model(model_path);
    if (times.empty()) throw Error("need at least one time in --t");

    FourierState state;
    if (!ic_path.empty())
        state = load_ic(read_text_file(ic_path), spec);
    else if (kmax >= 1)
        state = sample_random_ic(spec, kmax, seed, amplitude);
    else
        throw Error("need --ic or a positive --kmax to build initial data");

    std::optional<double> rate;
    if (rescale != "auto") rate = parse_rate(rescale);

    const auto frames = rescaled_trajectory(spec, state, times, rate, nx);
    std::vector<Observables> rows;
    for (double t : times) rows.push_back(observables(spec, evolve(spec, state, t), t));

    fs::create_directories(out_dir);
    const std::string traj_path = (fs::path(out_dir) / "trajectory.csv").string();
    write_text_file(traj_path, trajectory_csv(frames, spec.L));
    write_text_file((fs::path(out_dir) / "observables.csv").string(), observables_csv(rows));
    if (gnuplot)
        write_text_file((fs::path(out_dir) / "plot.gp").string(),
                        gnuplot_trajectory("trajectory.csv", spec.N, times));
    return 0;
}

int run_sweep(const std::string& sweep_path, const std::string& out_override) {
    nlohmann::json sj;
    try {
        sj = nlohmann::json::parse(read_text_file(sweep_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("sweep file is not valid JSON: ") + e.what());
    }
    if (!sj.is_object() || !sj.contains("template"))
        throw Error("sweep file needs a 'template' model");
    ModelSpec base = model_from_json_text(sj["template"].dump());

    std::string out_dir = out_override;
    if (out_dir.empty()) out_dir = sj.value("output", std::string());
    if (out_dir.empty()) throw Error("sweep needs an output directory ('output' or --out)");

    std::vector<SweepAxis> axes;
    for (const nlohmann::json& aj : sj.value("axes", nlohmann::json::array())) {
        SweepAxis axis;
        axis.text = aj.value("path", std::string());
        axis.path = parse_axis_path(axis.text);
        resolve_axis(base, axis.path, axis.text);  // bounds check against the template
        const double start = aj.value("start", 0.0);
        const double stop = aj.value("stop", 0.0);
        const double step = aj.value("step", 0.0);
        if (!(step > 0.0)) throw Error("axis '" + axis.text + "' needs step > 0");
        if (stop < start) throw Error("axis '" + axis.text + "' has stop < start");
        const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) axis.values.push_back(start + i * step);
        axes.push_back(std::move(axis));
    }
    if (axes.size() > 3) throw Error("at most 3 sweep axes are supported");

    int total = 1;
    for (const SweepAxis& axis : axes) total *= static_cast<int>(axis.values.size());

    fs::create_directories(out_dir);
    std::vector<std::string> summary_rows(total);
    std::vector<std::string> failures(total);
    parallel_for(total, [&](int point) {
        try {
            ModelSpec spec = base;
            int rest = point;
            std::vector<double> coords(axes.size());
            for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
                const int idx = rest % static_cast<int>(axes[a].values.size());
                rest /= static_cast<int>(axes[a].values.size());
                coords[a] = axes[a].values[idx];
                resolve_axis(spec, axes[a].path, axes[a].text) = coords[a];
                if (axes[a].path.kind == AxisPath::Kind::Velocity) spec.velocities_exact.clear();
            }
            spec = validate(std::move(spec));
            const ClassificationReport report = classify(spec);

            std::string name;
            for (size_t a = 0; a < axes.size(); ++a) {
                if (a) name += '_';
                name += axes[a].text + "=" + fmt_double(coords[a]);
            }
            if (name.empty()) name = "point";
            write_text_file((fs::path(out_dir) / (name + ".json")).string(),
                            classification_json(report));

            std::string row;
            for (double c : coords) row += fmt_double(c) + ',';
            row += std::string(verdict_name(report.verdict)) + ',' + fmt_double(report.b) +
                   ',' + std::to_string(report.dominant_modes.size());
            summary_rows[point] = std::move(row);
        } catch (const Error& e) {
            failures[point] = e.what();
        }
    });
    for (const std::string& message : failures)
        if (!message.empty()) throw Error("sweep point failed: " + message);

    std::string summary;
    for (const SweepAxis& axis : axes) summary += axis.text + ',';
    summary += "verdict,b,dominant_mode_count\n";
    for (const std::string& row : summary_rows) {
        summary += row;
        summary += '\n';
    }
    write_text_file((fs::path(out_dir) / "summary.csv").string(), summary);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mode-matrix spectra, instability classification, and exact Fourier "
                 "evolution for linear transport-reaction systems on the torus"};
    app.require_subcommand(1);

    std::string model_path, out, semigroup_out, profile, ic_path, sweep_path;
    std::string rescale = "0";
    int kmax = 0, order = 3, nx = 0;
    double tol = 1e-9;
    double time_value = 0.0;
    std::uint64_t seed = 0;
    double amplitude = 1e-4;
    std::vector<double> times;
    bool strict = false, gnuplot = false;

    CLI::App* sp = app.add_subcommand("spectrum", "Eigenvalues of the mode matrices on a window");
    sp->add_option("--model", model_path, "model JSON file")->required();
    sp->add_option("--kmax", kmax, "mode window half-width (0 = reaction matrix only)")
        ->required()
        ->check(CLI::NonNegativeNumber);
    sp->add_option("--out", out, "output CSV path")->required();
    auto* sp_time =
        sp->add_option("--time", time_value, "also write the semigroup spectrum exp(t lambda)");
    sp->add_option("--semigroup-out", semigroup_out, "path for the semigroup CSV");
    sp->add_flag("--gnuplot", gnuplot, "write a companion plot script");

    CLI::App* cl = app.add_subcommand("classify", "Stability verdict for a model");
    cl->add_option("--model", model_path, "model JSON file")->required();
    cl->add_option("--kmax", kmax, "sampling window (0 = automatic)")
        ->check(CLI::NonNegativeNumber);
    cl->add_option("--tol", tol, "relative tolerance for the verdict thresholds");
    cl->add_flag("--strict", strict, "exit 3 when the verdict is Indeterminate");
    cl->add_option("--out", out, "write the JSON report here instead of stdout");
    cl->add_option("--profile", profile, "write the sampled growth-rate profile CSV here");
    cl->add_flag("--gnuplot", gnuplot, "write a companion plot script for --profile");

    CLI::App* co = app.add_subcommand("coeffs", "Large-mode correction coefficients per branch");
    co->add_option("--model", model_path, "model JSON file")->required();
    co->add_option("--order", order, "highest coefficient order to report")
        ->check(CLI::Range(1, 6));
    co->add_option("--out", out, "write the JSON report here instead of stdout");

    CLI::App* si = app.add_subcommand("simulate", "Evolve an initial state and write trajectories");
    si->add_option("--model", model_path, "model JSON file")->required();
    si->add_option("--t", times, "sample times, ascending")->required()->delimiter(',');
    auto* si_ic = si->add_option("--ic", ic_path, "initial coefficients JSON file");
    si->add_option("--kmax", kmax, "random initial data cutoff")->excludes(si_ic);
    si->add_option("--seed", seed, "random initial data seed");
    si->add_option("--amplitude", amplitude, "random initial data amplitude");
    si->add_option("--nx", nx, "grid points per axis (0 = automatic)");
    si->add_option("--rescale", rescale, "'auto' or an explicit rate c; output is exp(-ct) u(t)");
    si->add_option("--out", out, "output directory")->required();
    si->add_flag("--gnuplot", gnuplot, "write a companion plot script");

    CLI::App* sw = app.add_subcommand("sweep", "Classify a model family over parameter axes");
    sw->add_option("--sweep", sweep_path, "sweep description JSON file")->required();
    sw->add_option("--out", out, "output directory (overrides the sweep file)");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(sp)) {
            std::optional<double> time;
            if (sp_time->count() > 0) time = time_value;
            return run_spectrum(model_path, kmax, out, time, semigroup_out, gnuplot);
        }
        if (app.got_subcommand(cl))
            return run_classify(model_path, kmax, tol, strict, out, profile, gnuplot);
        if (app.got_subcommand(co)) return run_coeffs(model_path, order, out);
        if (app.got_subcommand(si))
            return run_simulate(model_path, times, kmax, nx, seed, amplitude, ic_path,
                                rescale, out, gnuplot);
        if (app.got_subcommand(sw)) return run_sweep(sweep_path, out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const DegenerateVelocities& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
