#pragma once

#include <string>
#include <vector>

#include "trspec/classify.hpp"
#include "trspec/modes.hpp"
#include "trspec/perturb.hpp"
#include "trspec/simulate.hpp"

namespace trspec {

// Shortest decimal representation that parses back to the same double.
std::string fmt_double(double x);

// Header k0,..,k{d-1},branch,re,im; one row per (mode, branch) in table order.
std::string spectrum_csv(const SpectrumTable& table);

// Same layout with the eigenvalues mapped through exp(t * lambda).
std::string semigroup_csv(const SpectrumTable& table, double t);

// Header k,sigma from the sampled growth-rate profile of a classification.
std::string sigma_profile_csv(const ClassificationReport& report);

// Full classification report. profile_path, when nonempty, records where the
// companion sigma-profile CSV was written.
std::string classification_json(const ClassificationReport& report,
                                const std::string& profile_path = "");

// One object per branch: branch (1-based), coeffs, n_star, direction as
// "inc" | "dec" | "const", K_pert, warnings.
std::string monotonicity_json(const std::vector<MonotonicityReport>& reports);

// Header t,x0,..,x{d-1},component,value across all frames; grid coordinates
// are scaled by L back to the physical torus.
std::string trajectory_csv(const std::vector<Frame>& frames, double L);

// Header t,l2,min,avg0..,min0..,max0.. with one row per sample time.
std::string observables_csv(const std::vector<Observables>& rows);

// Parses {"K": int, "entries": [{"k": int | [ints], "component": int,
// "re": x, "im": y}, ...]} into a state for the given model shape, filling
// unlisted coefficients with zero. Rejects data that breaks the conjugate
// pairing of a real field.
FourierState load_ic(const std::string& json_text, const ModelSpec& spec);

// Gnuplot companion scripts referencing already-written data files.
std::string gnuplot_spectrum(const std::string& csv_path);
std::string gnuplot_profile(const std::string& csv_path);
std::string gnuplot_trajectory(const std::string& csv_path, int components,
                               const std::vector<double>& times);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace trspec
