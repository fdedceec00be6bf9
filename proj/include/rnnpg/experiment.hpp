#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rnnpg/assembly.hpp"
#include "rnnpg/lstsq.hpp"
#include "rnnpg/metrics.hpp"

namespace rnnpg {

/// One fully specified run: a single point of an experiment sweep.
struct RunSpec {
  ExampleId example = ExampleId::ex1;
  FormulationId formulation = FormulationId::primal;
  int n1 = 100;
  std::optional<int> n1_sigma;  // defaults to n1
  int hidden_layers = 1;
  double init_radius = 1.0;
  int cells_per_axis = 16;      // 1/h of the test mesh
  int quadrature_order = 5;
  int boundary_quadrature_order = 5;
  int boundary_points = 100;    // random collocation points per side
  DerivativeOptions derivatives;
  double rcond = kDefaultRcond;
  double collocation_weight = 1.0;
  TestPairing pairing = TestPairing::separate;
  bool mixed3_collocate_neumann = true;
  ProblemParams problem;        // nu lives here for ex3
  int eval_cells_per_axis = 32;
  int eval_quadrature_order = 5;
  std::uint64_t seed = 0;

  double h() const { return 1.0 / cells_per_axis; }
  int width_sigma() const { return n1_sigma.value_or(n1); }
  Eigen::Index dof() const;
  /// Stable identifier, also the file stem of the run's record.
  std::string id() const;
  nlohmann::json to_json() const;
  static RunSpec from_json(const nlohmann::json& j);
};

/// A sweep: every list field is crossed with every other.
struct ExperimentConfig {
  RunSpec base;
  std::vector<FormulationId> formulations;
  std::vector<int> n1_values;
  std::vector<int> cells_per_axis_values;
  std::vector<double> nu_values;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir;

  void validate() const;
  std::vector<RunSpec> expand() const;

  /// Parses the JSON config; unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
};

/// Named reference sweeps:
/// table1a, table2, table3a, table4a.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct RunTimings {
  double assembly_s = 0.0;
  double solve_s = 0.0;
  double eval_s = 0.0;
};

struct RunRecord {
  RunSpec spec;
  ErrorReport errors;
  LstsqReport lstsq;  // coefficients retained
  ConditionSummary condition;
  Eigen::Index rows = 0;
  Eigen::Index dof = 0;
  RunTimings timings;
  std::string version;
  std::string timestamp;
  std::shared_ptr<const DiscreteSolution> solution;

  nlohmann::json to_json() const;
};

/// Builds networks, test spaces, assembles, solves, and measures errors.
RunRecord run_single(const RunSpec& spec);

/// Planned system shape without assembling anything.
struct RunPlan {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};
RunPlan plan(const RunSpec& spec);

/// Runs every spec, at most `workers` at a time. `on_record` is called
/// under a lock, one record at a time.
std::vector<RunRecord> run_all(const std::vector<RunSpec>& specs, int workers,
                               const std::function<void(const RunRecord&)>& on_record = {});

/// Fixed CSV schema of runs.csv.
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const RunRecord& record);
/// Appends rows, writing the header first if the file is new or empty.
void append_csv(const std::string& path, const std::vector<RunRecord>& records);

using CsvRow = std::map<std::string, std::string>;
std::vector<CsvRow> read_csv(std::istream& in);

/// Table-1a style label: "RNN-PG method", "M-RNN-PG method-k".
std::string scheme_label(FormulationId f);

/// Groups rows by the given columns ("scheme" maps to the formulation
/// label) and reports count plus median/min/max of every error, rank and
/// timing column. Group order follows first appearance.
std::string summarize_table(const std::vector<CsvRow>& rows,
                            const std::vector<std::string>& group_by);

enum class DumpField { u1, u2, u3, s11, s12, s13, s22, s23, s33, error };
DumpField dump_field_from_string(const std::string& name);

/// Samples the field on a resolution^d grid of the closed unit box
/// (resolution 2 gives the corners) and writes "x y [z] value" lines.
/// `error` is |u - u_rho| at each node.
void field_dump(const DiscreteSolution& solution, const ManufacturedProblem& problem,
                DumpField field, int resolution, std::ostream& out);

ManufacturedProblem make_problem(const RunSpec& spec);

std::string version_stamp();

}  // namespace rnnpg
