#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bandchol/simulate.hpp"

namespace bandchol {

/// Numeric CSV, one matrix row per line. Parse errors carry 1-based line numbers.
MatrixXd read_matrix_csv(std::istream& in, bool header = false);
MatrixXd read_matrix_csv(const std::string& path, bool header = false);

/// Writes with 17 significant digits so values re-parse exactly.
void write_matrix_csv(std::ostream& out, const MatrixXd& m);
void write_matrix_csv(const std::string& path, const MatrixXd& m);

/// Formats a double with 17 significant digits.
std::string format_real(double x);

/// Parses an experiment configuration; errors name the offending field path.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// Per-replication CSV (one row per rep). Wall times are written only when requested.
void write_reps_csv(std::ostream& out, const ExperimentResult& result, bool include_timings = false);
/// Configuration echo plus mean/sd keyed by estimator then loss.
nlohmann::json summary_json(const ExperimentResult& result);

}  // namespace bandchol
