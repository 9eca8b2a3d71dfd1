#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace ddlab {

// A named experiment run: defaults plus a flat override map. Unknown
// override keys are rejected with a ConfigError naming the key.
struct ExperimentConfig {
  std::string name;  // fig2 | fig3 | appendix_a
  nlohmann::json overrides = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
};

// Reads {"name": ..., "seed": ..., "out_dir": ..., "overrides": {...}};
// every field is optional except that overrides must be an object.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

// Two-feature closed-form study: per-feature U-curves under a constant
// stepsize, the same curves after aligning both minima at the grid argmin
// of the first curve, and double-descent reports for both sums.
// Writes u1.csv, u2.csv, sum.csv, u2_aligned.csv, sum_aligned.csv,
// report.txt.
void run_fig2(const ExperimentConfig& config);

// Two-layer network study: trains the network for three initialization
// scale pairs under a shared stepsize and under a smaller second-layer
// stepsize, and splits the init Jacobian spectrum by layer.
// Writes risk_{same,diff}[ _w*_v* ].csv, jac_split_w*_v*.csv, report.txt.
void run_fig3(const ExperimentConfig& config);

// Linear-model validation at scale: Monte-Carlo risk against the closed
// form at n = 5d and n = 10d. The `scale` override shrinks d ( = 700 *
// scale, rounded to a multiple of 7).
// Writes risk_n5d.csv, risk_n10d.csv, report.txt.
void run_appendix_a(const ExperimentConfig& config);

void run_experiment(const ExperimentConfig& config);

}  // namespace ddlab
