#pragma once

// File formats: CSV datasets, JSON run configs, the MSE table, the run
// metadata sidecar and SVG line charts.

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rprior/model.hpp"
#include "rprior/simulation.hpp"

namespace rprior {

struct LoadedDataset {
  Dataset data;
  Eigen::MatrixXd design;                   // columns x1..xK
  std::vector<std::string> predictor_names;  // "x1", "x2", ...
};

/// Parses a comma-separated table with header. Required column `y`, predictor
/// columns x1..xK without gaps, optional `sigma` (> 0) and `c`. Any other
/// column, a non-numeric cell or a ragged row is an InputError that names the
/// row and column.
LoadedDataset parse_dataset(std::istream& in, const std::string& source = "<input>");
LoadedDataset load_dataset(const std::string& path);

/// Run config as a JSON object whose keys are SimConfig field names. Unknown
/// keys and wrongly typed values are InputErrors; the result is validated.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::string& path);
std::string config_to_json(const SimConfig& config);

/// Formats with 17 significant digits; NaN prints as "nan".
std::string format_number(double x);

/// Columns k_true, scheme, mean_mse, std_err, reps.
void write_mse_table(const ExperimentReport& report, std::ostream& out);
std::vector<ReportRow> read_mse_table(std::istream& in);

/// Config echo, wall time, threads, failure counts and mean selected sizes.
std::string metadata_json(const ExperimentReport& report);

/// Mean MSE against K_true per scheme, or the difference to the Oracle.
std::string mse_chart_svg(const ExperimentReport& report, bool minus_oracle);

/// Writes a string to a file, throwing InputError when it cannot be opened.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rprior
