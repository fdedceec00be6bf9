// rnnpg: run elasticity experiments, summarize them, and dump fields.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "rnnpg/experiment.hpp"

namespace fs = std::filesystem;
using namespace rnnpg;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("RNNPG_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

std::string default_out_dir() {
  const char* env = std::getenv("RNNPG_OUT");
  return env && *env ? env : "out";
}

void log_record(const RunRecord& r) {
  const auto opt = [](const std::optional<double>& v) {
    char buf[32];
    if (!v) return std::string("-");
    std::snprintf(buf, sizeof buf, "%.3e", *v);
    return std::string(buf);
  };
  std::fprintf(stderr,
               "[rnnpg] %s  %lldx%lld  rank %lld  cond %.2e  rel_u %s  rel_sigma %s  "
               "assembly %.2fs  solve %.2fs  eval %.2fs\n",
               r.spec.id().c_str(), static_cast<long long>(r.rows),
               static_cast<long long>(r.dof), static_cast<long long>(r.lstsq.effective_rank),
               r.condition.condition, opt(r.errors.rel_l2_u).c_str(),
               opt(r.errors.rel_l2_sigma).c_str(), r.timings.assembly_s, r.timings.solve_s,
               r.timings.eval_s);
}

int cmd_run(const std::string& config_path, const std::string& preset_name,
            const std::string& seeds, std::string out_dir, bool dry_run) {
  if (config_path.empty() == preset_name.empty())
    throw std::invalid_argument("give exactly one of --config or --preset");
  ExperimentConfig cfg = preset_name.empty() ? ExperimentConfig::load(config_path)
                                             : preset(preset_name);
  if (!seeds.empty()) {
    cfg.seeds.clear();
    for (const auto& s : split_list(seeds)) cfg.seeds.push_back(std::stoull(s));
    cfg.validate();
  }
  if (out_dir.empty()) out_dir = cfg.output_dir.empty() ? default_out_dir() : cfg.output_dir;
  const auto specs = cfg.expand();

  if (dry_run) {
    std::printf("%s\n", cfg.to_json().dump(2).c_str());
    for (const auto& s : specs) {
      const auto p = plan(s);
      std::printf("%s rows=%lld cols=%lld\n", s.id().c_str(), static_cast<long long>(p.rows),
                  static_cast<long long>(p.cols));
    }
    std::printf("%zu runs\n", specs.size());
    return 0;
  }

  fs::create_directories(fs::path(out_dir) / "runs");
  const std::string csv = (fs::path(out_dir) / "runs.csv").string();
  run_all(specs, worker_count(), [&](const RunRecord& r) {
    log_record(r);
    append_csv(csv, {r});
    std::ofstream(fs::path(out_dir) / "runs" / (r.spec.id() + ".json")) << r.to_json().dump(2)
                                                                         << '\n';
  });
  std::fprintf(stderr, "[rnnpg] %zu runs written to %s\n", specs.size(), csv.c_str());
  return 0;
}

int cmd_table(const std::string& in_path, const std::string& group_by) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open '" + in_path + "'");
  std::cout << summarize_table(read_csv(in), split_list(group_by));
  return 0;
}

int cmd_dump(const std::string& run_id, std::string out_dir, const std::string& field,
             int resolution) {
  if (out_dir.empty()) out_dir = default_out_dir();
  fs::path record = run_id;
  if (!fs::exists(record)) record = fs::path(out_dir) / "runs" / (run_id + ".json");
  std::ifstream in(record);
  if (!in) throw std::runtime_error("no run record found for '" + run_id + "'");
  nlohmann::json j;
  in >> j;
  const RunSpec spec = RunSpec::from_json(j.at("spec"));
  const DumpField f = dump_field_from_string(field);
  const RunRecord r = run_single(spec);
  field_dump(*r.solution, make_problem(spec), f, resolution, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized neural network Petrov-Galerkin solver for linear elasticity"};
  app.set_version_flag("--version", version_stamp());
  app.require_subcommand(1);

  std::string config, preset_name, seeds, out_dir;
  bool dry_run = false;
  auto* run = app.add_subcommand("run", "Run an experiment sweep");
  run->add_option("--config", config, "JSON config file");
  std::string presets;
  for (const auto& p : preset_names()) presets += (presets.empty() ? "" : ", ") + p;
  run->add_option("--preset", preset_name, "Built-in sweep: " + presets);
  run->add_option("--seeds", seeds, "Comma-separated seeds, overriding the config");
  run->add_option("--out", out_dir, "Output directory (default $RNNPG_OUT or ./out)");
  run->add_flag("--dry-run", dry_run, "Print the resolved config and planned system shapes");

  std::string in_path, group_by = "scheme,n1";
  auto* table = app.add_subcommand("table", "Summarize runs.csv");
  table->add_option("--in", in_path, "runs.csv path")->required();
  table->add_option("--group-by", group_by, "Comma-separated columns; 'scheme' is allowed");

  std::string run_id, field = "u1";
  int resolution = 101;
  auto* dump = app.add_subcommand("dump", "Re-run a recorded run and sample a field on a grid");
  dump->add_option("--run", run_id, "Run id or path to its JSON record")->required();
  dump->add_option("--out", out_dir, "Output directory holding runs/");
  dump->add_option("--field", field, "u1,u2,u3,s11,s12,s13,s22,s23,s33,error");
  dump->add_option("--res", resolution, "Grid points per axis")->check(CLI::Range(2, 100000));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, preset_name, seeds, out_dir, dry_run);
    if (*table) return cmd_table(in_path, group_by);
    if (*dump) return cmd_dump(run_id, out_dir, field, resolution);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rnnpg: error: %s\n", e.what());
    return 2;
  }
  return 0;
}
