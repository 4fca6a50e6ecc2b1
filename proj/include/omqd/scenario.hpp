#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "omqd/covariance.hpp"
#include "omqd/entanglement.hpp"
#include "omqd/meanfield.hpp"
#include "omqd/params.hpp"
#include "omqd/perturbative.hpp"

namespace omqd {

inline constexpr const char* kVersion = "0.1.0";

enum class OutputKind { meanfield, perturbative, fluctuations, entanglement };

std::string to_string(OutputKind kind);
OutputKind output_kind_from_string(const std::string& name);

struct ScenarioSpec {
    std::string name;
    std::string description;
    SystemParams params;
    double t_end = 0.0;
    double dt = 0.0;
    std::set<OutputKind> outputs{OutputKind::meanfield};
    std::filesystem::path output_dir = "out";
    int stride = 10;  // CSV decimation
    RecursionVariant variant = RecursionVariant::harmonic;
    int n_max = 3;
    int j_max = 4;
};

enum class Reduce { max, mean_last_5_periods };

std::string to_string(Reduce reduce);

struct SweepSpec {
    ScenarioSpec base;
    std::string axis;              // SystemParams field name
    std::vector<double> values;    // nonempty, finite
    Reduce reduce = Reduce::mean_last_5_periods;
    std::vector<std::string> columns;  // named output columns to reduce
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses and fully validates a scenario or sweep config (JSON).
/// dt may be given directly or as steps_per_period; it must divide the
/// modulation period to 1e-9 relative ("incommensurate step" otherwise)
/// and is snapped to an exact divisor.
std::variant<ScenarioSpec, SweepSpec> load_config(const std::filesystem::path& path);

/// In-memory products of one scenario run.
struct ScenarioResult {
    MeanFieldTrajectory meanfield;
    std::optional<FourierExpansion> expansion;
    std::vector<CovarianceState> covariance;
    std::vector<EntanglementReport> entanglement;
};

/// Pure compute path shared by run_scenario and sweeps.
ScenarioResult compute_scenario(const ScenarioSpec& spec);

/// Runs the scenario and writes the requested CSVs plus a JSON run manifest
/// recording every parameter and the code version.  Returns the files
/// written.  Outputs are byte-identical across reruns of the same spec.
std::vector<std::filesystem::path> run_scenario(const ScenarioSpec& spec);

/// Runs the sweep (concurrently up to `workers`), writing a summary CSV with
/// one row per axis value; per-value failures land in the error column and
/// do not abort the remaining values.  Rows are ordered by axis position.
std::filesystem::path run_sweep(const SweepSpec& spec, int workers = 1);

struct CatalogEntry {
    std::string name;
    std::string description;
    std::filesystem::path file;
    bool is_sweep = false;
};

/// Enumerates the manifests shipped in a scenario directory, sorted by name;
/// names must be unique.
std::vector<CatalogEntry> list_scenarios(const std::filesystem::path& scenarios_dir);

/// Applies a named-axis value to a parameter set ("sweep axis names an
/// existing SystemParams field").
void set_param_field(SystemParams& params, const std::string& field, double value);
double get_param_field(const SystemParams& params, const std::string& field);

}  // namespace omqd
