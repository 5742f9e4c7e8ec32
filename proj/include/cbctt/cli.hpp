#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbctt/annealer.hpp"
#include "cbctt/brute_force.hpp"
#include "cbctt/features.hpp"
#include "cbctt/hammersley.hpp"
#include "cbctt/instance.hpp"
#include "cbctt/parallel.hpp"
#include "cbctt/solution_io.hpp"
#include "cbctt/toy.hpp"
#include "cbctt/tuning.hpp"

namespace cbctt {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Records and serialization
// ---------------------------------------------------------------------------

struct RunRecord {
  std::string instance;
  int config_id = 0;
  SAParams params;
  std::uint64_t seed = 0;
  long long iterations = 0;
  CostBreakdown best;
  double wall_time_s = 0.0;
  std::string timestamp;
};

inline json params_to_json(const SAParams& p) {
  return {{"T0", p.t0},         {"T_min", p.t_min},   {"cr", p.cooling_rate},
          {"rho", p.accepted_ratio}, {"sr", p.swap_rate}, {"w_hard", p.w_hard},
          {"iter_max", p.iter_max}};
}

inline SAParams params_from_json(const json& j) {
  SAParams p;
  p.t0 = j.at("T0").get<double>();
  p.t_min = j.at("T_min").get<double>();
  p.cooling_rate = j.at("cr").get<double>();
  p.accepted_ratio = j.at("rho").get<double>();
  p.swap_rate = j.at("sr").get<double>();
  p.w_hard = j.at("w_hard").get<long long>();
  p.iter_max = j.at("iter_max").get<long long>();
  return p;
}

inline json breakdown_to_json(const CostBreakdown& c) {
  return {{"conflicts", c.conflicts},
          {"room_occupancy", c.room_occupancy},
          {"room_capacity", c.room_capacity},
          {"min_working_days", c.min_working_days},
          {"isolated_lectures", c.isolated_lectures},
          {"room_stability", c.room_stability},
          {"w_hard", c.w_hard},
          {"total", c.total}};
}

inline CostBreakdown breakdown_from_json(const json& j) {
  CostBreakdown c;
  c.conflicts = j.at("conflicts").get<long long>();
  c.room_occupancy = j.at("room_occupancy").get<long long>();
  c.room_capacity = j.at("room_capacity").get<long long>();
  c.min_working_days = j.at("min_working_days").get<long long>();
  c.isolated_lectures = j.at("isolated_lectures").get<long long>();
  c.room_stability = j.at("room_stability").get<long long>();
  c.w_hard = j.at("w_hard").get<long long>();
  c.total = j.at("total").get<long long>();
  return c;
}

inline json record_to_json(const RunRecord& r) {
  return {{"instance", r.instance},       {"config_id", r.config_id},
          {"params", params_to_json(r.params)}, {"seed", r.seed},
          {"iterations", r.iterations},   {"best_total", r.best.total},
          {"breakdown", breakdown_to_json(r.best)}, {"wall_time_s", r.wall_time_s},
          {"timestamp", r.timestamp}};
}

inline RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.instance = j.at("instance").get<std::string>();
  r.config_id = j.at("config_id").get<int>();
  r.params = params_from_json(j.at("params"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.iterations = j.at("iterations").get<long long>();
  r.best = breakdown_from_json(j.at("breakdown"));
  r.wall_time_s = j.at("wall_time_s").get<double>();
  r.timestamp = j.at("timestamp").get<std::string>();
  return r;
}

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  std::vector<std::string> warnings;
  Instance inst = parse_ctt(in, &warnings);
  for (const std::string& w : warnings) std::cerr << path << ": warning: " << w << "\n";
  return inst;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline int env_jobs() {
  const char* env = std::getenv("CBCTT_JOBS");
  if (env == nullptr) return default_worker_count();
  const int n = std::atoi(env);
  return n >= 1 ? n : default_worker_count();
}

/// Streams one JSON object per cooling step.
class JsonlObserver final : public AnnealObserver {
 public:
  explicit JsonlObserver(std::ostream& out) : out_(out) {}

  void on_level(long long iteration, double temperature, long long current_cost,
                long long best_cost) override {
    out_ << json{{"iteration", iteration},
                 {"temperature", temperature},
                 {"current_cost", current_cost},
                 {"best_cost", best_cost}}
                .dump()
         << "\n";
  }

  void on_finish(const SearchResult& result) override {
    out_ << json{{"final", true},
                 {"iterations_used", result.iterations_used},
                 {"best_total", result.best_cost.total},
                 {"breakdown", breakdown_to_json(result.best_cost)},
                 {"feasible", result.feasible},
                 {"seed", result.seed}}
                .dump()
         << "\n";
  }

 private:
  std::ostream& out_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment harness: the (instance x config x seed) grid with a resumable
// JSONL log.
// ---------------------------------------------------------------------------

struct ExperimentOptions {
  std::vector<std::string> instance_paths;
  std::vector<ConfigPoint> configs;
  int n_seeds = 2;
  long long iter_max = 100'000;
  std::string log_path = "runs.jsonl";
  int jobs = 1;
};

/// Runs every missing (instance, config, seed) triple and appends its
/// RunRecord to the log; completed triples found in an existing log are
/// skipped, which makes interrupted grids resumable. Returns all records
/// (old and new) in a deterministic order.
inline std::vector<RunRecord> run_experiment_grid(const ExperimentOptions& options,
                                                  std::ostream* progress = nullptr) {
  std::vector<std::pair<std::string, Instance>> instances;
  for (const std::string& path : options.instance_paths) {
    Instance inst = detail::load_instance(path);
    std::string name = inst.name;
    instances.emplace_back(std::move(name), std::move(inst));
  }

  std::vector<RunRecord> existing;
  std::set<std::tuple<std::string, int, std::uint64_t>> done;
  if (std::filesystem::exists(options.log_path)) {
    std::ifstream in(options.log_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const RunRecord r = record_from_json(json::parse(line));
      done.insert({r.instance, r.config_id, r.seed});
      existing.push_back(r);
    }
  }

  struct Job {
    std::size_t instance_index;
    int config_id;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t c = 0; c < options.configs.size(); ++c) {
      for (int s = 1; s <= options.n_seeds; ++s) {
        if (!done.count({instances[i].first, static_cast<int>(c), static_cast<std::uint64_t>(s)})) {
          jobs.push_back({i, static_cast<int>(c), static_cast<std::uint64_t>(s)});
        }
      }
    }
  }

  std::ofstream log(options.log_path, std::ios::app);
  if (!log) throw std::runtime_error("cannot open run log " + options.log_path);
  std::mutex log_mutex;
  std::vector<RunRecord> fresh(jobs.size());

  parallel_for(jobs.size(), options.jobs, [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto& [name, inst] = instances[job.instance_index];
    SAParams params = to_sa_params(options.configs[job.config_id]);
    params.iter_max = options.iter_max;

    const auto started = std::chrono::steady_clock::now();
    const SearchResult result = anneal(inst, params, job.seed);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

    RunRecord record{name,
                     job.config_id,
                     params,
                     job.seed,
                     result.iterations_used,
                     result.best_cost,
                     elapsed.count(),
                     detail::utc_timestamp()};
    fresh[j] = record;
    std::lock_guard<std::mutex> lock(log_mutex);
    log << record_to_json(record).dump() << "\n";
    log.flush();
    if (progress != nullptr) {
      *progress << name << " config " << job.config_id << " seed " << job.seed << " -> "
                << record.best.total << "\n";
    }
  });

  std::vector<RunRecord> all = std::move(existing);
  all.insert(all.end(), fresh.begin(), fresh.end());
  return all;
}

/// Groups run records into per-instance, per-config cost samples. Row order
/// follows first appearance; config columns are the 0..max ids seen. Rows
/// with any missing or underfilled cell are dropped with a note.
inline std::tuple<std::vector<std::string>, std::vector<std::string>,
                  std::vector<InstanceResults>>
group_records(const std::vector<RunRecord>& records, std::ostream& diagnostics) {
  std::vector<std::string> instance_ids;
  std::map<std::string, std::size_t> row_of;
  int max_config = -1;
  for (const RunRecord& r : records) {
    if (!row_of.count(r.instance)) {
      row_of[r.instance] = instance_ids.size();
      instance_ids.push_back(r.instance);
    }
    max_config = std::max(max_config, r.config_id);
  }
  const int n_configs = max_config + 1;
  std::vector<InstanceResults> cells(instance_ids.size(), InstanceResults(n_configs));
  for (const RunRecord& r : records) {
    cells[row_of[r.instance]][r.config_id].push_back(static_cast<double>(r.best.total));
  }

  std::vector<std::string> kept_ids;
  std::vector<InstanceResults> kept_cells;
  for (std::size_t i = 0; i < instance_ids.size(); ++i) {
    bool complete = true;
    for (const Sample& cell : cells[i]) {
      if (cell.size() < 2) {
        complete = false;
        break;
      }
    }
    if (complete) {
      kept_ids.push_back(instance_ids[i]);
      kept_cells.push_back(std::move(cells[i]));
    } else {
      diagnostics << "note: instance " << instance_ids[i]
                  << " has underfilled cells (need >= 2 runs per config); row dropped\n";
    }
  }
  std::vector<std::string> config_ids;
  for (int c = 0; c < n_configs; ++c) config_ids.push_back(std::to_string(c));
  return {std::move(kept_ids), std::move(config_ids), std::move(kept_cells)};
}

// ---------------------------------------------------------------------------
// Model bundle: per-config forests plus everything predict needs.
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

struct ModelBundle {
  std::vector<std::string> feature_names;
  std::vector<ConfigPoint> configs;
  std::vector<double> success_rates;
  std::vector<Forest> forests;
};

inline json model_to_json(const ModelBundle& model) {
  json configs = json::array();
  for (const ConfigPoint& cfg : model.configs) {
    configs.push_back({{"names", cfg.names}, {"values", cfg.values}});
  }
  json forests = json::array();
  for (const Forest& f : model.forests) forests.push_back(forest_to_json(f));
  return {{"format_version", kModelFormatVersion},
          {"feature_names", model.feature_names},
          {"configs", std::move(configs)},
          {"success_rates", model.success_rates},
          {"forests", std::move(forests)}};
}

inline ModelBundle model_from_json(const json& j) {
  if (j.at("format_version").get<int>() != kModelFormatVersion) {
    throw std::invalid_argument("unsupported model format version");
  }
  ModelBundle model;
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& cfg_json : j.at("configs")) {
    ConfigPoint cfg;
    cfg.names = cfg_json.at("names").get<std::vector<std::string>>();
    cfg.values = cfg_json.at("values").get<std::vector<double>>();
    model.configs.push_back(std::move(cfg));
  }
  model.success_rates = j.at("success_rates").get<std::vector<double>>();
  for (const auto& forest_json : j.at("forests")) {
    model.forests.push_back(forest_from_json(forest_json));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

inline void emit(const json& j, const std::string& output_path) {
  const std::string text = j.dump(2) + "\n";
  if (!output_path.empty()) {
    write_text_file(output_path, text);
  }
  std::cout << text;
}

inline json features_to_json(const FeatureVector& f) {
  return {{"Le", f.lectures},
          {"Cu", f.curricula},
          {"RO", f.room_occupation},
          {"Co", f.conflicts},
          {"Av", f.availability},
          {"RS", f.room_suitability},
          {"DL", f.daily_lectures_per_curriculum}};
}

inline int cmd_solve(const std::string& instance_path, SAParams params, std::uint64_t seed,
                     const std::string& solution_path, const std::string& report_path,
                     const std::string& run_log_path, double max_seconds) {
  const Instance inst = load_instance(instance_path);
  for (const Finding& f : validate_instance(inst)) std::cerr << "warning: " << f.message << "\n";

  std::ofstream run_log;
  std::optional<JsonlObserver> observer;
  if (!run_log_path.empty()) {
    run_log.open(run_log_path);
    if (!run_log) throw std::runtime_error("cannot write run log " + run_log_path);
    observer.emplace(run_log);
  }

  const auto started = std::chrono::steady_clock::now();
  const SearchResult result =
      anneal(inst, params, seed, observer ? &*observer : nullptr, max_seconds);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

  std::string out_path = solution_path;
  if (out_path.empty()) {
    out_path = std::filesystem::path(instance_path).stem().string() + ".sol";
  }
  write_text_file(out_path, format_solution(inst, result.best_timetable));

  RunRecord record{inst.name,        0,    params,         seed, result.iterations_used,
                   result.best_cost, elapsed.count(), utc_timestamp()};
  json report = record_to_json(record);
  report["solution"] = out_path;
  report["feasible"] = result.feasible;
  emit(report, report_path);
  return result.feasible ? 0 : 2;
}

inline int cmd_validate(const std::string& instance_path, const std::string& solution_path,
                        long long w_hard, const std::string& output_path) {
  const Instance inst = load_instance(instance_path);
  std::ifstream sol(solution_path);
  if (!sol) throw std::runtime_error("cannot open solution file " + solution_path);
  const Timetable tt = parse_solution(inst, sol);
  const CostBreakdown cost = full_cost(inst, tt, w_hard);
  json report = breakdown_to_json(cost);
  report["instance"] = inst.name;
  report["feasible"] = cost.feasible();
  emit(report, output_path);
  return cost.feasible() ? 0 : 2;
}

inline int cmd_features(const std::string& instance_path, const std::string& output_path) {
  const Instance inst = load_instance(instance_path);
  emit(features_to_json(extract_features(inst)), output_path);
  return 0;
}

inline int cmd_sample_configs(int count, const std::string& space,
                              const std::string& output_path) {
  std::vector<ParamRange> ranges;
  std::vector<ParamRange> fixed;
  if (space == "refined") {
    ranges = refined_ranges();
    const SAParams defaults;
    fixed = {{"cr", defaults.cooling_rate, defaults.cooling_rate},
             {"w_hard", static_cast<double>(defaults.w_hard), static_cast<double>(defaults.w_hard)},
             {"sr", defaults.swap_rate, defaults.swap_rate}};
  } else if (space == "wide") {
    ranges = wide_ranges();
  } else {
    throw std::runtime_error("unknown parameter space '" + space + "' (use refined or wide)");
  }

  const auto points = hammersley_points(count, static_cast<int>(ranges.size()));
  std::vector<ConfigPoint> configs = scale_to_ranges(points, ranges);
  for (ConfigPoint& cfg : configs) {
    for (const ParamRange& f : fixed) {
      cfg.names.push_back(f.name);
      cfg.values.push_back(f.lo);
    }
  }

  if (output_path.empty()) {
    write_configs_csv(std::cout, configs);
  } else {
    std::ofstream out(output_path);
    if (!out) throw std::runtime_error("cannot write " + output_path);
    write_configs_csv(out, configs);
    std::cout << "wrote " << configs.size() << " configurations to " << output_path << "\n";
  }
  return 0;
}

inline int cmd_race(const std::vector<std::string>& instance_paths,
                    const std::string& configs_path, int runs_per_step, double confidence,
                    long long budget, long long iter_max, std::uint64_t seed, int jobs,
                    const std::string& output_path) {
  std::vector<Instance> instances;
  for (const std::string& path : instance_paths) instances.push_back(load_instance(path));
  std::ifstream cfg_in(configs_path);
  if (!cfg_in) throw std::runtime_error("cannot open configuration CSV " + configs_path);
  const std::vector<ConfigPoint> configs = read_configs_csv(cfg_in);

  const RaceSolver solver = [&](int instance, int config, std::uint64_t run_seed) {
    SAParams params = to_sa_params(configs[config]);
    params.iter_max = iter_max;
    return static_cast<double>(anneal(instances[instance], params, run_seed).best_cost.total);
  };
  const RaceResult result =
      f_race(static_cast<int>(instances.size()), static_cast<int>(configs.size()), runs_per_step,
             confidence, budget, solver, seed, jobs);

  json survivors = json::array();
  for (std::size_t i = 0; i < result.survivors.size(); ++i) {
    const int c = result.survivors[i];
    survivors.push_back({{"config_id", c},
                         {"mean_rank", result.mean_ranks[i]},
                         {"params", params_to_json(to_sa_params(configs[c]))}});
  }
  emit(json{{"survivors", survivors},
            {"blocks_run", result.blocks_run},
            {"runs_used", result.runs_used}},
       output_path);
  return 0;
}

inline int cmd_experiment(const ExperimentOptions& options, const std::string& matrix_path,
                          double fdr_q, double screen_alpha, bool screen) {
  const std::vector<RunRecord> records = run_experiment_grid(options, &std::cout);
  auto [instance_ids, config_ids, cells] = group_records(records, std::cerr);
  if (instance_ids.empty()) {
    std::cerr << "no complete rows yet; matrix not written\n";
    return 0;
  }
  if (screen) {
    const std::vector<char> keep = screen_instances(cells, screen_alpha);
    std::vector<std::string> ids;
    std::vector<InstanceResults> kept;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (keep[i]) {
        ids.push_back(instance_ids[i]);
        kept.push_back(std::move(cells[i]));
      }
    }
    std::cout << "screening kept " << ids.size() << " of " << instance_ids.size()
              << " instances\n";
    instance_ids = std::move(ids);
    cells = std::move(kept);
  }
  if (instance_ids.empty()) {
    std::cerr << "screening removed every instance; matrix not written\n";
    return 0;
  }
  const PerformanceMatrix matrix =
      build_performance_matrix(instance_ids, config_ids, cells, fdr_q);
  std::ofstream out(matrix_path);
  if (!out) throw std::runtime_error("cannot write " + matrix_path);
  write_matrix_csv(out, matrix);
  std::cout << "matrix " << matrix.n_rows() << " x " << matrix.n_cols() << " written to "
            << matrix_path << "\n";
  return 0;
}

inline int cmd_build_matrix(const std::string& log_path, const std::string& matrix_path,
                            double fdr_q, double screen_alpha, bool screen) {
  std::ifstream in(log_path);
  if (!in) throw std::runtime_error("cannot open run log " + log_path);
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) records.push_back(record_from_json(json::parse(line)));
  }
  if (records.empty()) throw std::runtime_error("run log is empty");

  auto [instance_ids, config_ids, cells] = group_records(records, std::cerr);
  if (screen) {
    const std::vector<char> keep = screen_instances(cells, screen_alpha);
    std::vector<std::string> ids;
    std::vector<InstanceResults> kept;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (keep[i]) {
        ids.push_back(instance_ids[i]);
        kept.push_back(std::move(cells[i]));
      }
    }
    instance_ids = std::move(ids);
    cells = std::move(kept);
  }
  if (instance_ids.empty()) throw std::runtime_error("no rows left for the matrix");
  const PerformanceMatrix matrix =
      build_performance_matrix(instance_ids, config_ids, cells, fdr_q);
  std::ofstream out(matrix_path);
  if (!out) throw std::runtime_error("cannot write " + matrix_path);
  write_matrix_csv(out, matrix);
  std::cout << "matrix " << matrix.n_rows() << " x " << matrix.n_cols() << " written to "
            << matrix_path << "\n";
  return 0;
}

inline int cmd_train(const std::string& matrix_path, const std::string& configs_path,
                     const std::vector<std::string>& instance_paths,
                     const std::string& output_path, ForestTrainingOptions options,
                     std::uint64_t seed) {
  std::ifstream matrix_in(matrix_path);
  if (!matrix_in) throw std::runtime_error("cannot open matrix CSV " + matrix_path);
  const PerformanceMatrix matrix = read_matrix_csv(matrix_in);
  std::ifstream cfg_in(configs_path);
  if (!cfg_in) throw std::runtime_error("cannot open configuration CSV " + configs_path);
  const std::vector<ConfigPoint> configs = read_configs_csv(cfg_in);
  if (configs.size() != matrix.n_cols()) {
    throw std::runtime_error("configuration count does not match matrix columns");
  }

  std::map<std::string, FeatureVector> features_by_name;
  for (const std::string& path : instance_paths) {
    const Instance inst = load_instance(path);
    features_by_name[inst.name] = extract_features(inst);
  }
  FeatureMatrix x;
  for (const std::string& id : matrix.instance_ids) {
    auto it = features_by_name.find(id);
    if (it == features_by_name.end()) {
      throw std::runtime_error("matrix row " + id + " has no matching instance file");
    }
    const auto row = it->second.as_row();
    x.emplace_back(row.begin(), row.end());
  }

  ModelBundle model;
  const auto& names = FeatureVector::names();
  model.feature_names.assign(names.begin(), names.end());
  model.configs = configs;
  model.success_rates = matrix.success_rates();
  model.forests = train_config_forests(x, matrix.good, options, seed);

  write_text_file(output_path, model_to_json(model).dump());
  std::cout << "trained " << model.forests.size() << " classifiers on " << x.size()
            << " instances -> " << output_path << "\n";
  return 0;
}

inline int cmd_predict(const std::string& model_path, const std::string& instance_path,
                       const std::string& output_path) {
  std::ifstream in(model_path);
  if (!in) throw std::runtime_error("cannot open model " + model_path);
  const ModelBundle model = model_from_json(json::parse(in));

  const Instance inst = load_instance(instance_path);
  const auto row = extract_features(inst).as_row();
  const std::vector<double> features(row.begin(), row.end());

  std::vector<double> probabilities;
  probabilities.reserve(model.forests.size());
  for (const Forest& f : model.forests) probabilities.push_back(f.predict_proba(features));
  const std::size_t chosen = select_config_by_probability(probabilities, model.success_rates);

  emit(json{{"instance", inst.name},
            {"config_id", chosen},
            {"params", params_to_json(to_sa_params(model.configs[chosen]))},
            {"probability", probabilities[chosen]},
            {"success_rate", model.success_rates[chosen]},
            {"probabilities", probabilities}},
       output_path);
  return 0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"curriculum-based course timetabling: annealing solver and tuning pipeline"};
  app.require_subcommand(1);
  const SAParams defaults;

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance with simulated annealing");
  std::string solve_instance;
  SAParams solve_params;
  std::uint64_t solve_seed = 1;
  std::string solve_solution, solve_report, solve_run_log;
  double solve_max_seconds = 0.0;
  solve->add_option("instance", solve_instance, "instance file (.ctt)")->required();
  solve->add_option("--seed", solve_seed, "random seed");
  solve->add_option("--max-iterations", solve_params.iter_max, "iteration budget");
  solve->add_option("--t0", solve_params.t0, "starting temperature");
  solve->add_option("--t-min", solve_params.t_min, "expected minimum temperature");
  solve->add_option("--rho", solve_params.accepted_ratio, "accepted-ratio cutoff");
  solve->add_option("--cr", solve_params.cooling_rate, "cooling rate");
  solve->add_option("--sr", solve_params.swap_rate, "swap rate");
  solve->add_option("--w-hard", solve_params.w_hard, "hard-constraint weight");
  solve->add_option("--solution", solve_solution, "solution output path");
  solve->add_option("--report", solve_report, "JSON report output path");
  solve->add_option("--run-log", solve_run_log, "JSONL per-level run log");
  solve->add_option("--max-seconds", solve_max_seconds, "wall-clock cap (0 = none)");

  // validate
  auto* validate = app.add_subcommand("validate", "evaluate a solution file");
  std::string validate_instance_path, validate_solution, validate_output;
  long long validate_w_hard = defaults.w_hard;
  validate->add_option("instance", validate_instance_path, "instance file")->required();
  validate->add_option("solution", validate_solution, "solution file")->required();
  validate->add_option("--w-hard", validate_w_hard, "hard-constraint weight");
  validate->add_option("--output", validate_output, "JSON report output path");

  // features
  auto* features = app.add_subcommand("features", "extract instance features");
  std::string features_instance, features_output;
  features->add_option("instance", features_instance, "instance file")->required();
  features->add_option("--output", features_output, "JSON output path");

  // sample-configs
  auto* sample = app.add_subcommand("sample-configs", "low-discrepancy configuration sample");
  int sample_count = 20;
  std::string sample_space = "refined";
  std::string sample_output;
  sample->add_option("--count", sample_count, "number of configurations");
  sample->add_option("--space", sample_space, "parameter space: refined or wide");
  sample->add_option("--output", sample_output, "CSV output path");

  // race
  auto* race = app.add_subcommand("race", "race configurations over instances");
  std::vector<std::string> race_instances;
  std::string race_configs, race_output;
  int race_runs_per_step = 1;
  double race_confidence = 0.95;
  long long race_budget = 1000;
  long long race_iter = 100'000;
  std::uint64_t race_seed = 1;
  int race_jobs = detail::env_jobs();
  race->add_option("--instances", race_instances, "instance files")->required();
  race->add_option("--configs", race_configs, "configuration CSV")->required();
  race->add_option("--runs-per-step", race_runs_per_step, "runs per config per block");
  race->add_option("--confidence", race_confidence, "race confidence level");
  race->add_option("--budget", race_budget, "max solver runs");
  race->add_option("--max-iterations", race_iter, "iteration budget per run");
  race->add_option("--seed", race_seed, "race seed");
  race->add_option("--jobs", race_jobs, "parallel workers");
  race->add_option("--output", race_output, "JSON output path");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run the full tuning grid");
  ExperimentOptions exp_options;
  exp_options.jobs = detail::env_jobs();
  std::string exp_configs;
  std::string exp_matrix = "matrix.csv";
  double exp_fdr = 0.10;
  double exp_screen_alpha = 0.10;
  bool exp_no_screen = false;
  experiment->add_option("--instances", exp_options.instance_paths, "instance files")->required();
  experiment->add_option("--configs", exp_configs, "configuration CSV")->required();
  experiment->add_option("--seeds", exp_options.n_seeds, "independent runs per cell");
  experiment->add_option("--max-iterations", exp_options.iter_max, "iteration budget per run");
  experiment->add_option("--log", exp_options.log_path, "JSONL run log (resumable)");
  experiment->add_option("--matrix", exp_matrix, "performance matrix CSV output");
  experiment->add_option("--fdr-q", exp_fdr, "FDR level for the matrix");
  experiment->add_option("--screen-alpha", exp_screen_alpha, "instance screening level");
  experiment->add_flag("--no-screen", exp_no_screen, "skip instance screening");
  experiment->add_option("--jobs", exp_options.jobs, "parallel workers");

  // build-matrix
  auto* build = app.add_subcommand("build-matrix", "performance matrix from a run log");
  std::string build_log, build_matrix_path = "matrix.csv";
  double build_fdr = 0.10;
  double build_screen_alpha = 0.10;
  bool build_no_screen = false;
  build->add_option("--log", build_log, "JSONL run log")->required();
  build->add_option("--output", build_matrix_path, "matrix CSV output");
  build->add_option("--fdr-q", build_fdr, "FDR level");
  build->add_option("--screen-alpha", build_screen_alpha, "instance screening level");
  build->add_flag("--no-screen", build_no_screen, "skip instance screening");

  // train
  auto* train = app.add_subcommand("train", "train per-config classifiers");
  std::string train_matrix, train_configs, train_output = "model.json";
  std::vector<std::string> train_instances;
  ForestTrainingOptions train_options;
  std::uint64_t train_seed = 1;
  train->add_option("--matrix", train_matrix, "performance matrix CSV")->required();
  train->add_option("--configs", train_configs, "configuration CSV")->required();
  train->add_option("--instances", train_instances, "instance files for features")->required();
  train->add_option("--output", train_output, "model JSON output");
  train->add_option("--trees", train_options.n_trees, "trees per forest");
  train->add_option("--mtry", train_options.m_try, "features tried per split");
  train->add_option("--min-node-size", train_options.min_node_size, "minimum node size");
  train->add_option("--seed", train_seed, "training seed");

  // predict
  auto* predict = app.add_subcommand("predict", "pick a configuration for an instance");
  std::string predict_model, predict_instance, predict_output;
  predict->add_option("--model", predict_model, "model JSON from train")->required();
  predict->add_option("instance", predict_instance, "instance file")->required();
  predict->add_option("--output", predict_output, "JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      return detail::cmd_solve(solve_instance, solve_params, solve_seed, solve_solution,
                               solve_report, solve_run_log, solve_max_seconds);
    }
    if (validate->parsed()) {
      return detail::cmd_validate(validate_instance_path, validate_solution, validate_w_hard,
                                  validate_output);
    }
    if (features->parsed()) return detail::cmd_features(features_instance, features_output);
    if (sample->parsed()) {
      return detail::cmd_sample_configs(sample_count, sample_space, sample_output);
    }
    if (race->parsed()) {
      return detail::cmd_race(race_instances, race_configs, race_runs_per_step, race_confidence,
                              race_budget, race_iter, race_seed, race_jobs, race_output);
    }
    if (experiment->parsed()) {
      std::ifstream cfg_in(exp_configs);
      if (!cfg_in) throw std::runtime_error("cannot open configuration CSV " + exp_configs);
      exp_options.configs = read_configs_csv(cfg_in);
      return detail::cmd_experiment(exp_options, exp_matrix, exp_fdr, exp_screen_alpha,
                                    !exp_no_screen);
    }
    if (build->parsed()) {
      return detail::cmd_build_matrix(build_log, build_matrix_path, build_fdr,
                                      build_screen_alpha, !build_no_screen);
    }
    if (train->parsed()) {
      return detail::cmd_train(train_matrix, train_configs, train_instances, train_output,
                               train_options, train_seed);
    }
    if (predict->parsed()) {
      return detail::cmd_predict(predict_model, predict_instance, predict_output);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

inline int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> with_program = args;
  with_program.insert(with_program.begin(), "cbctt");
  std::vector<const char*> argv;
  argv.reserve(with_program.size());
  for (const std::string& a : with_program) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace cbctt
