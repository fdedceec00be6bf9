#include "rnnpg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifndef RNNPG_VERSION
#define RNNPG_VERSION "0.1.0"
#endif
#ifndef RNNPG_GIT_REVISION
#define RNNPG_GIT_REVISION "unknown"
#endif

namespace rnnpg {

using nlohmann::json;

std::string version_stamp() { return std::string(RNNPG_VERSION) + "+" + RNNPG_GIT_REVISION; }

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(h & 0xffffffffull));
  return buf;
}

std::string derivative_name(DerivativeMode m) {
  return m == DerivativeMode::analytic ? "analytic" : "central_difference";
}

DerivativeMode derivative_from_string(const std::string& s) {
  if (s == "analytic") return DerivativeMode::analytic;
  if (s == "central_difference") return DerivativeMode::central_difference;
  throw std::invalid_argument("unknown derivative mode '" + s +
                              "' (expected analytic or central_difference)");
}

std::string boundary_kind_name(BoundaryKind k) {
  return k == BoundaryKind::dirichlet ? "dirichlet" : "neumann";
}

BoundaryKind boundary_kind_from_string(const std::string& s) {
  if (s == "dirichlet") return BoundaryKind::dirichlet;
  if (s == "neumann") return BoundaryKind::neumann;
  throw std::invalid_argument("unknown boundary kind '" + s + "' (expected dirichlet or neumann)");
}

// Keys shared by RunSpec and ExperimentConfig.
const std::set<std::string>& spec_keys() {
  static const std::set<std::string> keys = {
      "example", "formulation", "n1", "n1_sigma", "hidden_layers", "init_radius",
      "cells_per_axis", "h", "quadrature_order", "boundary_quadrature_order",
      "boundary_points", "derivative", "fd_spacing", "rcond", "collocation_weight",
      "pairing", "mixed3_collocate_neumann", "mu", "lambda", "E", "nu", "Q", "boundary",
      "eval_cells_per_axis", "eval_quadrature_order", "seed"};
  return keys;
}

int cells_from_h(double h) {
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("h must lie in (0, 1]");
  const double n = 1.0 / h;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * r) throw std::invalid_argument("1/h must be an integer");
  return static_cast<int>(r);
}

// Reads the scalar (non-list) keys into `spec`.
void read_scalars(const json& j, RunSpec& spec) {
  auto get = [&](const char* key, auto& out) {
    if (j.contains(key) && !j.at(key).is_array()) j.at(key).get_to(out);
  };
  if (j.contains("example")) spec.example = example_from_string(j.at("example").get<std::string>());
  if (j.contains("formulation") && j.at("formulation").is_string())
    spec.formulation = formulation_from_string(j.at("formulation").get<std::string>());
  get("n1", spec.n1);
  if (j.contains("n1_sigma")) spec.n1_sigma = j.at("n1_sigma").get<int>();
  get("hidden_layers", spec.hidden_layers);
  get("init_radius", spec.init_radius);
  if (j.contains("h") && !j.at("h").is_array())
    spec.cells_per_axis = cells_from_h(j.at("h").get<double>());
  get("cells_per_axis", spec.cells_per_axis);
  get("quadrature_order", spec.quadrature_order);
  get("boundary_quadrature_order", spec.boundary_quadrature_order);
  get("boundary_points", spec.boundary_points);
  if (j.contains("derivative"))
    spec.derivatives.mode = derivative_from_string(j.at("derivative").get<std::string>());
  get("fd_spacing", spec.derivatives.spacing);
  get("rcond", spec.rcond);
  get("collocation_weight", spec.collocation_weight);
  if (j.contains("pairing")) spec.pairing = pairing_from_string(j.at("pairing").get<std::string>());
  get("mixed3_collocate_neumann", spec.mixed3_collocate_neumann);
  if (j.contains("mu")) spec.problem.mu = j.at("mu").get<double>();
  if (j.contains("lambda")) spec.problem.lambda = j.at("lambda").get<double>();
  if (j.contains("E")) spec.problem.E = j.at("E").get<double>();
  if (j.contains("nu") && !j.at("nu").is_array()) spec.problem.nu = j.at("nu").get<double>();
  get("Q", spec.problem.Q);
  if (j.contains("boundary")) {
    spec.problem.boundary.clear();
    for (const auto& [side, kind] : j.at("boundary").items())
      spec.problem.boundary.emplace_back(Side::from_name(side),
                                         boundary_kind_from_string(kind.get<std::string>()));
  }
  get("eval_cells_per_axis", spec.eval_cells_per_axis);
  get("eval_quadrature_order", spec.eval_quadrature_order);
  get("seed", spec.seed);
}

void validate_spec(const RunSpec& s) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(s.n1 >= 1, "n1 must be >= 1");
  require(!s.n1_sigma || *s.n1_sigma >= 1, "n1_sigma must be >= 1");
  require(s.hidden_layers >= 1, "hidden_layers must be >= 1");
  require(s.init_radius > 0.0, "init_radius must be positive");
  require(s.cells_per_axis >= 1, "cells_per_axis must be >= 1");
  require(s.quadrature_order >= 1 && s.quadrature_order <= 16,
          "quadrature_order must lie in [1, 16]");
  require(s.boundary_quadrature_order >= 1 && s.boundary_quadrature_order <= 16,
          "boundary_quadrature_order must lie in [1, 16]");
  require(s.boundary_points >= 1, "boundary_points must be >= 1");
  require(s.derivatives.spacing > 0.0, "fd_spacing must be positive");
  require(s.rcond >= 0.0 && s.rcond < 1.0, "rcond must lie in [0, 1)");
  require(s.collocation_weight > 0.0, "collocation_weight must be positive");
  require(s.eval_cells_per_axis >= 1, "eval_cells_per_axis must be >= 1");
  require(s.eval_quadrature_order >= 5 && s.eval_quadrature_order <= 16,
          "eval_quadrature_order must lie in [5, 16]");
  // Surfaces material errors (e.g. nu >= 0.5) before any work is done.
  (void)make_problem(s);
}

}  // namespace

Eigen::Index RunSpec::dof() const {
  const int d = example == ExampleId::ex4 ? 3 : 2;
  return unknown_count(formulation, d, n1, width_sigma());
}

std::string RunSpec::id() const {
  std::ostringstream os;
  os << to_string(example) << '_' << to_string(formulation) << "_n" << n1;
  if (n1_sigma && *n1_sigma != n1) os << "-" << *n1_sigma;
  os << "_c" << cells_per_axis;
  if (problem.nu) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *problem.nu);
    os << "_nu" << buf;
  }
  os << "_s" << seed << '_' << fnv1a_hex(to_json().dump());
  return os.str();
}

json RunSpec::to_json() const {
  json j;
  j["example"] = to_string(example);
  j["formulation"] = to_string(formulation);
  j["n1"] = n1;
  if (n1_sigma) j["n1_sigma"] = *n1_sigma;
  j["hidden_layers"] = hidden_layers;
  j["init_radius"] = init_radius;
  j["cells_per_axis"] = cells_per_axis;
  j["quadrature_order"] = quadrature_order;
  j["boundary_quadrature_order"] = boundary_quadrature_order;
  j["boundary_points"] = boundary_points;
  j["derivative"] = derivative_name(derivatives.mode);
  j["fd_spacing"] = derivatives.spacing;
  j["rcond"] = rcond;
  j["collocation_weight"] = collocation_weight;
  j["pairing"] = to_string(pairing);
  j["mixed3_collocate_neumann"] = mixed3_collocate_neumann;
  if (problem.mu) j["mu"] = *problem.mu;
  if (problem.lambda) j["lambda"] = *problem.lambda;
  if (problem.E) j["E"] = *problem.E;
  if (problem.nu) j["nu"] = *problem.nu;
  j["Q"] = problem.Q;
  if (!problem.boundary.empty()) {
    json b = json::object();
    for (const auto& [side, kind] : problem.boundary) b[side.name()] = boundary_kind_name(kind);
    j["boundary"] = b;
  }
  j["eval_cells_per_axis"] = eval_cells_per_axis;
  j["eval_quadrature_order"] = eval_quadrature_order;
  j["seed"] = seed;
  return j;
}

RunSpec RunSpec::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("run spec must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!spec_keys().count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  RunSpec spec;
  read_scalars(j, spec);
  validate_spec(spec);
  return spec;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("seeds must not be empty");
  for (const auto& spec : expand()) validate_spec(spec);
}

std::vector<RunSpec> ExperimentConfig::expand() const {
  const auto forms = formulations.empty() ? std::vector<FormulationId>{base.formulation}
                                          : formulations;
  const auto widths = n1_values.empty() ? std::vector<int>{base.n1} : n1_values;
  const auto cells = cells_per_axis_values.empty() ? std::vector<int>{base.cells_per_axis}
                                                   : cells_per_axis_values;
  std::vector<std::optional<double>> nus;
  if (nu_values.empty()) nus.push_back(base.problem.nu);
  for (double v : nu_values) nus.emplace_back(v);

  std::vector<RunSpec> out;
  for (const auto& nu : nus)
    for (int c : cells)
      for (auto f : forms)
        for (int n : widths)
          for (auto seed : seeds) {
            RunSpec s = base;
            s.formulation = f;
            s.n1 = n;
            s.cells_per_axis = c;
            s.problem.nu = nu;
            s.seed = seed;
            out.push_back(std::move(s));
          }
  return out;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!spec_keys().count(key) && key != "seeds" && key != "output_dir")
      throw std::invalid_argument("unknown config key '" + key + "'");
  ExperimentConfig cfg;
  read_scalars(j, cfg.base);
  if (j.contains("formulation") && j.at("formulation").is_array())
    for (const auto& f : j.at("formulation"))
      cfg.formulations.push_back(formulation_from_string(f.get<std::string>()));
  if (j.contains("n1") && j.at("n1").is_array()) cfg.n1_values = j.at("n1").get<std::vector<int>>();
  if (j.contains("cells_per_axis") && j.at("cells_per_axis").is_array())
    cfg.cells_per_axis_values = j.at("cells_per_axis").get<std::vector<int>>();
  if (j.contains("h") && j.at("h").is_array())
    for (const auto& h : j.at("h")) cfg.cells_per_axis_values.push_back(cells_from_h(h.get<double>()));
  if (j.contains("nu") && j.at("nu").is_array()) cfg.nu_values = j.at("nu").get<std::vector<double>>();
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  else if (j.contains("seed")) cfg.seeds = {cfg.base.seed};
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j = base.to_json();
  j.erase("seed");
  if (!formulations.empty()) {
    j["formulation"] = json::array();
    for (auto f : formulations) j["formulation"].push_back(to_string(f));
  }
  if (!n1_values.empty()) j["n1"] = n1_values;
  if (!cells_per_axis_values.empty()) j["cells_per_axis"] = cells_per_axis_values;
  if (!nu_values.empty()) j["nu"] = nu_values;
  j["seeds"] = seeds;
  if (!output_dir.empty()) j["output_dir"] = output_dir;
  return j;
}

std::vector<std::string> preset_names() { return {"table1a", "table2", "table3a", "table4a"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.seeds = {0, 1, 2, 3, 4};
  const std::vector<FormulationId> all = {FormulationId::primal, FormulationId::mixed1,
                                          FormulationId::mixed2, FormulationId::mixed3,
                                          FormulationId::mixed4};
  if (name == "table1a" || name == "table2") {
    cfg.base.example = name == "table1a" ? ExampleId::ex1 : ExampleId::ex2;
    cfg.formulations = all;
    cfg.n1_values = {100, 200, 400};
    cfg.base.cells_per_axis = 16;
    cfg.base.derivatives = {DerivativeMode::central_difference, 1e-6};
  } else if (name == "table3a") {
    cfg.base.example = ExampleId::ex3;
    cfg.formulations = {FormulationId::mixed1, FormulationId::mixed2, FormulationId::mixed3,
                        FormulationId::mixed4};
    cfg.n1_values = {100, 200, 400, 800};
    cfg.nu_values = {0.49, 0.4999, 0.499999};
    cfg.base.cells_per_axis = 32;
    cfg.base.derivatives = {DerivativeMode::central_difference, 1e-8};
  } else if (name == "table4a") {
    cfg.base.example = ExampleId::ex4;
    cfg.base.formulation = FormulationId::primal;
    cfg.n1_values = {100, 200, 400, 800};
    cfg.cells_per_axis_values = {4, 8, 16};
    cfg.base.eval_cells_per_axis = 16;
  } else {
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected table1a, table2, table3a, table4a)");
  }
  cfg.validate();
  return cfg;
}

ManufacturedProblem make_problem(const RunSpec& spec) { return make_problem(spec.example, spec.problem); }

namespace {

NetworkConfig network_config(const RunSpec& spec, int dim, int width) {
  NetworkConfig c;
  c.input_dim = dim;
  c.hidden_widths.assign(spec.hidden_layers, width);
  c.init_radius = spec.init_radius;
  c.seed = spec.seed;
  return c;
}

AssemblyOptions assembly_options(const RunSpec& spec) {
  AssemblyOptions o;
  o.quadrature_order = spec.quadrature_order;
  o.boundary_quadrature_order = spec.boundary_quadrature_order;
  o.derivatives = spec.derivatives;
  o.collocation_weight = spec.collocation_weight;
  o.mixed3_collocate_neumann = spec.mixed3_collocate_neumann;
  o.pairing = spec.pairing;
  return o;
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

RunPlan plan(const RunSpec& spec) {
  validate_spec(spec);
  const auto problem = make_problem(spec);
  const int d = problem.dim();
  const StructuredMesh mesh(problem.domain(), spec.cells_per_axis);
  const auto masks = required_masks(spec.formulation, problem);
  const auto opts = assembly_options(spec);
  RunPlan p;
  p.cols = spec.dof();
  const Eigen::Index nv = NodalBasis(mesh, masks.displacement).size();
  p.rows = d * nv;
  if (is_mixed(spec.formulation)) {
    p.rows += sym_size(d) * NodalBasis(mesh, masks.stress).size();
    if (spec.pairing == TestPairing::all_pairs) p.rows += 1;
  }
  const auto per_side = static_cast<Eigen::Index>(spec.boundary_points) * d;
  if (needs_dirichlet_collocation(spec.formulation))
    p.rows += per_side * static_cast<Eigen::Index>(problem.dirichlet_sides().size());
  if (needs_neumann_collocation(spec.formulation, opts))
    p.rows += per_side * static_cast<Eigen::Index>(problem.neumann_sides().size());
  return p;
}

RunRecord run_single(const RunSpec& spec) {
  validate_spec(spec);
  const auto problem = make_problem(spec);
  const int d = problem.dim();
  RunRecord rec;
  rec.spec = spec;
  rec.version = version_stamp();
  rec.timestamp = utc_timestamp();

  auto start = std::chrono::steady_clock::now();
  auto net_u = std::make_shared<RandomFeatureNet>(
      build_network(network_config(spec, d, spec.n1), Stream::displacement_net));
  std::shared_ptr<RandomFeatureNet> net_s;
  if (is_mixed(spec.formulation))
    net_s = std::make_shared<RandomFeatureNet>(
        build_network(network_config(spec, d, spec.width_sigma()), Stream::stress_net));
  const StructuredMesh mesh(problem.domain(), spec.cells_per_axis);
  const auto masks = required_masks(spec.formulation, problem);
  const auto colloc = sample_collocation_points(problem, spec.boundary_points, spec.seed);
  const auto opts = assembly_options(spec);
  const NodalBasis v_space(mesh, masks.displacement);
  LinearSystem sys =
      is_mixed(spec.formulation)
          ? assemble_mixed(spec.formulation, problem, *net_u, *net_s,
                           NodalBasis(mesh, masks.stress), v_space, colloc, opts)
          : assemble_primal(problem, *net_u, v_space, colloc, opts);
  rec.timings.assembly_s = seconds_since(start);
  rec.rows = sys.rows();
  rec.dof = sys.cols();

  start = std::chrono::steady_clock::now();
  rec.lstsq = solve(sys, spec.rcond);
  rec.timings.solve_s = seconds_since(start);
  rec.condition = diagnostics(sys, rec.lstsq);

  start = std::chrono::steady_clock::now();
  rec.solution = std::make_shared<DiscreteSolution>(spec.formulation, problem.material(), net_u,
                                                    net_s, rec.lstsq.coefficients);
  rec.errors = l2_errors(*rec.solution, problem,
                         {spec.eval_cells_per_axis, spec.eval_quadrature_order});
  rec.timings.eval_s = seconds_since(start);
  return rec;
}

json RunRecord::to_json() const {
  json j;
  j["id"] = spec.id();
  j["spec"] = spec.to_json();
  j["version"] = version;
  j["timestamp"] = timestamp;
  j["rows"] = rows;
  j["dof"] = dof;
  json e;
  e["abs_l2_u"] = errors.abs_l2_u;
  e["abs_l2_sigma"] = errors.abs_l2_sigma;
  e["rel_l2_u"] = errors.rel_l2_u ? json(*errors.rel_l2_u) : json(nullptr);
  e["rel_l2_sigma"] = errors.rel_l2_sigma ? json(*errors.rel_l2_sigma) : json(nullptr);
  e["norm_u"] = errors.norm_u;
  e["norm_sigma"] = errors.norm_sigma;
  e["eval_cells_per_axis"] = errors.eval_cells_per_axis;
  e["eval_quadrature_order"] = errors.eval_quadrature_order;
  j["errors"] = e;
  json l;
  l["residual_norm"] = lstsq.residual_norm;
  l["effective_rank"] = lstsq.effective_rank;
  l["sigma_max"] = lstsq.sigma_max;
  l["sigma_min_kept"] = lstsq.sigma_min_kept;
  l["rcond"] = lstsq.rcond_used;
  l["condition"] = condition.condition;
  l["rank_profile"] = condition.rank_profile;
  json split = json::object();
  for (const auto& [kind, r] : condition.residual_by_kind) split[to_string(kind)] = r;
  l["residual_by_kind"] = split;
  j["lstsq"] = l;
  j["timings"] = {{"assembly_s", timings.assembly_s},
                  {"solve_s", timings.solve_s},
                  {"eval_s", timings.eval_s}};
  if (spec.example == ExampleId::ex3) {
    const auto problem = make_problem(spec);
    j["material"] = {{"E", problem.youngs_modulus.value_or(0.0)},
                     {"nu", problem.poisson_ratio.value_or(0.0)},
                     {"mu", problem.material().mu},
                     {"lambda", problem.material().lambda}};
  }
  return j;
}

std::vector<RunRecord> run_all(const std::vector<RunSpec>& specs, int workers,
                               const std::function<void(const RunRecord&)>& on_record) {
  std::vector<RunRecord> records(specs.size());
  std::atomic<std::size_t> next{0};
  std::mutex writer;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      try {
        records[i] = run_single(specs[i]);
        if (on_record) {
          std::lock_guard lock(writer);
          on_record(records[i]);
        }
      } catch (...) {
        std::lock_guard lock(writer);
        if (!failure) failure = std::current_exception();
        next = specs.size();
        return;
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(specs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "example", "formulation", "n1", "h", "nu", "seed", "dof", "rows", "rel_l2_u",
      "rel_l2_sigma", "abs_l2_u", "abs_l2_sigma", "rank", "cond", "assembly_s", "solve_s"};
  return cols;
}

std::string csv_header() {
  std::string s;
  for (const auto& c : csv_columns()) s += (s.empty() ? "" : ",") + c;
  return s;
}

std::string csv_row(const RunRecord& r) {
  std::ostringstream os;
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : ""; };
  char cond[32], ta[32], ts[32];
  std::snprintf(cond, sizeof cond, "%.6e", r.condition.condition);
  std::snprintf(ta, sizeof ta, "%.3f", r.timings.assembly_s);
  std::snprintf(ts, sizeof ts, "%.3f", r.timings.solve_s);
  os << to_string(r.spec.example) << ',' << to_string(r.spec.formulation) << ',' << r.spec.n1
     << ',' << format_double(r.spec.h()) << ',' << opt(r.spec.problem.nu) << ',' << r.spec.seed
     << ',' << r.dof << ',' << r.rows << ',' << opt(r.errors.rel_l2_u) << ','
     << opt(r.errors.rel_l2_sigma) << ',' << format_double(r.errors.abs_l2_u) << ','
     << format_double(r.errors.abs_l2_sigma) << ',' << r.condition.effective_rank << ',' << cond
     << ',' << ta << ',' << ts;
  return os.str();
}

void append_csv(const std::string& path, const std::vector<RunRecord>& records) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (fresh) out << csv_header() << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split_csv_line(line);
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) +
                                  " cells, header has " + std::to_string(header.size()));
    CsvRow row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string scheme_label(FormulationId f) {
  switch (f) {
    case FormulationId::primal: return "RNN-PG method";
    case FormulationId::mixed1: return "M-RNN-PG method-1";
    case FormulationId::mixed2: return "M-RNN-PG method-2";
    case FormulationId::mixed3: return "M-RNN-PG method-3";
    case FormulationId::mixed4: return "M-RNN-PG method-4";
  }
  return "?";
}

std::string summarize_table(const std::vector<CsvRow>& rows,
                            const std::vector<std::string>& group_by) {
  static const std::vector<std::string> metrics = {
      "dof", "rows", "rel_l2_u", "rel_l2_sigma", "abs_l2_u", "abs_l2_sigma",
      "rank", "cond", "assembly_s", "solve_s"};
  for (const auto& g : group_by)
    if (g != "scheme" && std::find(csv_columns().begin(), csv_columns().end(), g) ==
                             csv_columns().end())
      throw std::invalid_argument("unknown group-by column '" + g + "'");

  auto key_of = [&](const CsvRow& r) {
    std::vector<std::string> k;
    for (const auto& g : group_by) {
      if (g == "scheme") k.push_back(scheme_label(formulation_from_string(r.at("formulation"))));
      else k.push_back(r.at(g));
    }
    return k;
  };
  std::vector<std::vector<std::string>> order;
  std::map<std::vector<std::string>, std::vector<const CsvRow*>> groups;
  for (const auto& r : rows) {
    auto k = key_of(r);
    if (!groups.count(k)) order.push_back(k);
    groups[k].push_back(&r);
  }

  std::ostringstream os;
  for (const auto& g : group_by) os << g << ',';
  os << "count";
  for (const auto& m : metrics) os << ',' << m << "_median," << m << "_min," << m << "_max";
  os << '\n';
  for (const auto& k : order) {
    const auto& members = groups[k];
    for (const auto& v : k) os << v << ',';
    os << members.size();
    for (const auto& m : metrics) {
      std::vector<double> vals;
      for (const CsvRow* r : members) {
        const auto it = r->find(m);
        if (it != r->end() && !it->second.empty()) vals.push_back(std::stod(it->second));
      }
      if (vals.empty()) {
        os << ",,,";
        continue;
      }
      std::sort(vals.begin(), vals.end());
      const std::size_t n = vals.size();
      const double median = n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
      os << ',' << format_double(median) << ',' << format_double(vals.front()) << ','
         << format_double(vals.back());
    }
    os << '\n';
  }
  return os.str();
}

DumpField dump_field_from_string(const std::string& name) {
  static const std::map<std::string, DumpField> names = {
      {"u1", DumpField::u1},   {"u2", DumpField::u2},   {"u3", DumpField::u3},
      {"s11", DumpField::s11}, {"s12", DumpField::s12}, {"s13", DumpField::s13},
      {"s22", DumpField::s22}, {"s23", DumpField::s23}, {"s33", DumpField::s33},
      {"error", DumpField::error}};
  const auto it = names.find(name);
  if (it == names.end()) throw std::invalid_argument("unknown field '" + name + "'");
  return it->second;
}

void field_dump(const DiscreteSolution& solution, const ManufacturedProblem& problem,
                DumpField field, int resolution, std::ostream& out) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  const int d = problem.dim();
  int u_comp = -1, s_comp = -1;
  switch (field) {
    case DumpField::u1: u_comp = 0; break;
    case DumpField::u2: u_comp = 1; break;
    case DumpField::u3: u_comp = 2; break;
    case DumpField::s11: s_comp = sym_index(0, 0, d); break;
    case DumpField::s12: s_comp = sym_index(0, 1, d); break;
    case DumpField::s22: s_comp = sym_index(1, 1, d); break;
    case DumpField::s13:
    case DumpField::s23:
    case DumpField::s33:
      if (d < 3) throw std::invalid_argument("field needs a 3D problem");
      s_comp = field == DumpField::s13   ? sym_index(0, 2, d)
               : field == DumpField::s23 ? sym_index(1, 2, d)
                                         : sym_index(2, 2, d);
      break;
    case DumpField::error: break;
  }
  if (u_comp >= d) throw std::invalid_argument("field needs a 3D problem");

  Eigen::Index total = 1;
  for (int a = 0; a < d; ++a) total *= resolution;
  PointSet grid(d, total);
  for (Eigen::Index k = 0; k < total; ++k) {
    Eigen::Index rem = k;
    for (int a = 0; a < d; ++a) {
      grid(a, k) = static_cast<double>(rem % resolution) / (resolution - 1);
      rem /= resolution;
    }
  }
  const Eigen::MatrixXd u = solution.eval_u(grid);
  Eigen::MatrixXd s;
  if (s_comp >= 0) s = solution.eval_sigma(grid);

  out << std::setprecision(17);
  for (Eigen::Index k = 0; k < total; ++k) {
    for (int a = 0; a < d; ++a) out << grid(a, k) << ' ';
    double v;
    if (u_comp >= 0) v = u(u_comp, k);
    else if (s_comp >= 0) v = s(s_comp, k);
    else v = (problem.exact_u(grid.col(k)) - u.col(k)).norm();
    out << v << '\n';
  }
}

}  // namespace rnnpg
