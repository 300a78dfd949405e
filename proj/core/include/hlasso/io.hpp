#pragma once

#include <map>
#include <string>
#include <vector>

#include <hlasso/engine.hpp>
#include <hlasso/group_structure.hpp>
#include <hlasso/logistic.hpp>
#include <hlasso/lrt.hpp>
#include <hlasso/simbench.hpp>
#include <hlasso/tuning.hpp>
#include <hlasso/types.hpp>

namespace hlasso::io {

/// Numeric CSV with a header row of variable names.
struct DataTable
{
    std::vector<std::string> names;  ///< Predictor names, in column order.
    Matrix X;
    Vector y;
    std::string response;
};

/// Reads a comma-separated file. The column named `response` is the outcome;
/// every other column is a predictor. Throws InputError naming the offending
/// column on malformed or non-finite cells.
DataTable read_data_csv(const std::string& path, const std::string& response = "y");
DataTable parse_data_csv(const std::string& text, const std::string& response = "y",
                         const std::string& source = "<memory>");

/// Group map: a two-column CSV (variable_name,group_id; header optional), or,
/// for paths ending in .json, a JSON list of lists of variable names or
/// 0-based indices. Groups keep their first-seen order.
GroupStructure read_group_map(const std::string& path, const std::vector<std::string>& names);
GroupStructure parse_group_csv(const std::string& text, const std::vector<std::string>& names);
GroupStructure parse_group_json(const std::string& text, const std::vector<std::string>& names);

/// GMT gene sets: one set per line, tab-separated name, description, members.
/// Members not present in `names` are skipped; sets left empty are dropped.
GroupStructure read_gmt(const std::string& path, const std::vector<std::string>& names);
GroupStructure parse_gmt(const std::string& text, const std::vector<std::string>& names);

/// Flat key = value file; '#' starts a comment.
std::map<std::string, std::string> parse_key_value(const std::string& text);
std::map<std::string, std::string> read_key_value(const std::string& path);

/// Recognized keys: case, method, reps, grid (min:max:count), grid_count,
/// grid_ratio, seed, jobs, n_train, n_valid, n_test, gamma, sigma, sigma_mc_n.
/// Unknown keys throw InputError.
sim::BenchConfig bench_config_from(const std::map<std::string, std::string>& kv, sim::BenchConfig base = {});

/// Round-trip text for a double: 17 significant digits.
std::string format_double(double x);

/// JSON text; `config_json` must be a JSON object and is embedded verbatim
/// under "config".
std::string fit_json(const HLassoFit& fit, const StandardizedDataset& ds, const GroupStructure& g,
                     const std::vector<std::string>& names, const std::string& config_json);
std::string fit_json(const LogisticHLassoFit& fit, const StandardizedDataset& ds, const GroupStructure& g,
                     const std::vector<std::string>& names, const std::string& config_json);

/// One row per fit: lambda, converged, iterations, objective, then beta on
/// the original scale.
std::string path_csv(const std::vector<HLassoFit>& fits, const StandardizedDataset& ds,
                     const std::vector<std::string>& names);
std::string path_csv(const std::vector<LogisticHLassoFit>& fits, const StandardizedDataset& ds,
                     const std::vector<std::string>& names);

std::string sim_reps_csv(const sim::SimReport& report);
std::string sim_summary_json(const sim::SimReport& report, const std::string& config_json);

std::string tune_json(const TuneResult& result, const std::string& config_json);
std::string lrt_json(const LrtResult& result, const std::vector<std::string>& null_names,
                     const std::string& config_json);

/// Per-sample misclassification report: index, observed class, predicted
/// probability, predicted class, error flag.
std::string misclassification_csv(const Vector& y, const Vector& prob, double threshold = 0.5);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

} // namespace hlasso::io
