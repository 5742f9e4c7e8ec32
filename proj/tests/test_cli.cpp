#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cbctt/cli.hpp"
#include "cbctt/toy.hpp"

using namespace cbctt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cbctt-test-" + std::to_string(splitmix64(std::random_device{}())));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string write_toy(const TempDir& dir, const std::string& name, const ToySpec& spec,
                      std::uint64_t seed) {
  const std::string path = dir.file(name);
  std::ofstream out(path);
  out << format_ctt(generate_toy_instance(spec, seed));
  return path;
}

ToySpec default_toy_spec() {
  ToySpec spec;
  spec.days = 2;
  spec.periods_per_day = 3;
  spec.rooms = 2;
  spec.courses = 4;
  spec.curricula = 2;
  spec.max_lectures_per_course = 2;
  return spec;
}

long count_lines(const std::string& text) {
  return std::count(text.begin(), text.end(), '\n');
}

}  // namespace

TEST_CASE("solve writes a solution that validates at the reported cost", "[cli]") {
  TempDir dir;
  const std::string instance = write_toy(dir, "toy.ctt", default_toy_spec(), 5);
  const std::string solution = dir.file("toy.sol");
  const std::string report = dir.file("report.json");

  const int code = run_cli({"solve", instance, "--seed", "1", "--max-iterations", "20000",
                            "--solution", solution, "--report", report});
  REQUIRE(code == 0);

  const json report_json = json::parse(read_file(report));
  CHECK(report_json.at("feasible").get<bool>());
  const long long reported_total = report_json.at("best_total").get<long long>();

  const std::string validation = dir.file("validation.json");
  REQUIRE(run_cli({"validate", instance, solution, "--output", validation}) == 0);
  const json validation_json = json::parse(read_file(validation));
  CHECK(validation_json.at("total").get<long long>() == reported_total);
  CHECK(validation_json.at("feasible").get<bool>());

  // Breakdown satisfies the total identity.
  const CostBreakdown breakdown = breakdown_from_json(report_json.at("breakdown"));
  CHECK(breakdown.total == breakdown.recompute_total());
}

TEST_CASE("solve is byte-deterministic for a fixed seed", "[cli]") {
  TempDir dir;
  const std::string instance = write_toy(dir, "toy.ctt", default_toy_spec(), 6);
  const std::string first = dir.file("a.sol");
  const std::string second = dir.file("b.sol");
  REQUIRE(run_cli({"solve", instance, "--seed", "3", "--max-iterations", "5000", "--solution",
                   first}) == 0);
  REQUIRE(run_cli({"solve", instance, "--seed", "3", "--max-iterations", "5000", "--solution",
                   second}) == 0);
  CHECK(read_file(first) == read_file(second));
}

TEST_CASE("solve reports usage and file errors with exit 1", "[cli]") {
  TempDir dir;
  CHECK(run_cli({"solve", dir.file("missing.ctt"), "--max-iterations", "10"}) == 1);
  CHECK(run_cli({"no-such-command"}) == 1);
  CHECK(run_cli({}) == 1);

  const std::string garbled = dir.file("bad.ctt");
  std::ofstream(garbled) << "Name only\n";
  CHECK(run_cli({"solve", garbled, "--max-iterations", "10"}) == 1);
}

TEST_CASE("solve run log traces cooling steps", "[cli]") {
  TempDir dir;
  const std::string instance = write_toy(dir, "toy.ctt", default_toy_spec(), 7);
  const std::string log = dir.file("run.jsonl");
  REQUIRE(run_cli({"solve", instance, "--seed", "2", "--max-iterations", "20000", "--solution",
                   dir.file("t.sol"), "--run-log", log}) == 0);
  std::ifstream in(log);
  std::string line;
  long long previous_iteration = 0;
  bool saw_final = false;
  while (std::getline(in, line)) {
    const json entry = json::parse(line);
    if (entry.contains("final")) {
      saw_final = true;
      CHECK(entry.at("iterations_used").get<long long>() == 20000);
    } else {
      const long long iteration = entry.at("iteration").get<long long>();
      CHECK(iteration > previous_iteration);
      previous_iteration = iteration;
      CHECK(entry.at("best_cost").get<long long>() >= 0);
    }
  }
  CHECK(saw_final);
}

TEST_CASE("validate counts a hand-built capacity violation", "[cli]") {
  TempDir dir;
  Instance inst;
  inst.name = "cap";
  inst.n_days = 1;
  inst.periods_per_day = 2;
  inst.courses.push_back({"c1", "t1", 1, 1, 7});
  inst.rooms.push_back({"big", 20});
  inst.rooms.push_back({"tiny", 5});
  inst.finalize();
  const std::string instance = dir.file("cap.ctt");
  std::ofstream(instance) << format_ctt(inst);
  const std::string solution = dir.file("cap.sol");
  std::ofstream(solution) << "c1 tiny 0 0\n";

  const std::string report = dir.file("cap.json");
  REQUIRE(run_cli({"validate", instance, solution, "--output", report}) == 0);
  const json j = json::parse(read_file(report));
  CHECK(j.at("room_capacity").get<long long>() == 2);
  CHECK(j.at("total").get<long long>() == 2);
}

TEST_CASE("validate rejects an incomplete solution with exit 1", "[cli]") {
  TempDir dir;
  ToySpec spec = default_toy_spec();
  const std::string instance = write_toy(dir, "toy.ctt", spec, 8);
  const std::string solution = dir.file("short.sol");
  REQUIRE(run_cli({"solve", instance, "--seed", "1", "--max-iterations", "2000", "--solution",
                   solution}) == 0);
  std::string text = read_file(solution);
  text = text.substr(0, text.rfind('\n', text.size() - 2) + 1);  // drop last lecture
  std::ofstream(solution) << text;
  CHECK(run_cli({"validate", instance, solution}) == 1);
}

TEST_CASE("features emits the flat JSON vector", "[cli]") {
  TempDir dir;
  const std::string instance = write_toy(dir, "toy.ctt", default_toy_spec(), 9);
  const std::string out = dir.file("features.json");
  REQUIRE(run_cli({"features", instance, "--output", out}) == 0);
  const json j = json::parse(read_file(out));
  for (const char* key : {"Le", "Cu", "RO", "Co", "Av", "RS", "DL"}) {
    REQUIRE(j.contains(key));
  }
  CHECK(j.at("Le").get<int>() > 0);
  CHECK(j.at("RO").get<double>() <= 100.0);
}

TEST_CASE("sample-configs writes in-range CSV rows", "[cli]") {
  TempDir dir;
  const std::string out = dir.file("configs.csv");
  REQUIRE(run_cli({"sample-configs", "--count", "20", "--space", "refined", "--output", out}) ==
          0);
  std::ifstream in(out);
  const auto configs = read_configs_csv(in);
  REQUIRE(configs.size() == 20);
  for (const auto& cfg : configs) {
    CHECK(cfg.value("T0") >= 1.0);
    CHECK(cfg.value("T0") <= 40.0);
    CHECK(cfg.value("w_hard") == 100.0);
    CHECK(cfg.value("sr") == 0.43);
    CHECK(cfg.value("cr") == 0.99);
  }
  CHECK(run_cli({"sample-configs", "--space", "bogus", "--output", out}) == 1);
}

TEST_CASE("experiment runs the grid, resumes, and emits the matrix", "[cli]") {
  TempDir dir;
  ToySpec spec = default_toy_spec();
  const std::string inst_a = write_toy(dir, "a.ctt", spec, 11);
  const std::string inst_b = write_toy(dir, "b.ctt", spec, 12);
  const std::string configs = dir.file("configs.csv");
  REQUIRE(run_cli({"sample-configs", "--count", "2", "--output", configs}) == 0);

  const std::string log = dir.file("runs.jsonl");
  const std::string matrix = dir.file("matrix.csv");
  REQUIRE(run_cli({"experiment", "--instances", inst_a, inst_b, "--configs", configs, "--seeds",
                   "2", "--max-iterations", "2000", "--log", log, "--matrix", matrix,
                   "--no-screen", "--jobs", "2"}) == 0);

  // 2 instances x 2 configs x 2 seeds.
  const std::string log_text = read_file(log);
  CHECK(count_lines(log_text) == 8);

  std::ifstream matrix_in(matrix);
  const PerformanceMatrix m = read_matrix_csv(matrix_in);
  CHECK(m.n_rows() == 2);
  CHECK(m.n_cols() == 2);

  SECTION("a rerun with a larger grid only adds the missing triples") {
    REQUIRE(run_cli({"experiment", "--instances", inst_a, inst_b, "--configs", configs,
                     "--seeds", "3", "--max-iterations", "2000", "--log", log, "--matrix",
                     matrix, "--no-screen"}) == 0);
    CHECK(count_lines(read_file(log)) == 12);  // 4 cells x 1 new seed
    REQUIRE(run_cli({"experiment", "--instances", inst_a, inst_b, "--configs", configs,
                     "--seeds", "3", "--max-iterations", "2000", "--log", log, "--matrix",
                     matrix, "--no-screen"}) == 0);
    CHECK(count_lines(read_file(log)) == 12);  // nothing to do
  }
}

TEST_CASE("an interrupted grid resumes exactly where it stopped", "[cli]") {
  TempDir dir;
  ToySpec spec = default_toy_spec();
  const std::string instance = write_toy(dir, "a.ctt", spec, 13);
  const std::string configs = dir.file("configs.csv");
  REQUIRE(run_cli({"sample-configs", "--count", "2", "--output", configs}) == 0);
  const std::string log = dir.file("runs.jsonl");

  // 1 instance x 2 configs x 4 seeds = 8 records.
  REQUIRE(run_cli({"experiment", "--instances", instance, "--configs", configs, "--seeds", "4",
                   "--max-iterations", "1500", "--log", log, "--no-screen"}) == 0);
  std::vector<std::string> lines;
  {
    std::ifstream in(log);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) lines.push_back(line);
    }
  }
  REQUIRE(lines.size() == 8);

  // Keep 5 records, as if the run had been interrupted.
  {
    std::ofstream out(log);
    for (int i = 0; i < 5; ++i) out << lines[i] << "\n";
  }
  REQUIRE(run_cli({"experiment", "--instances", instance, "--configs", configs, "--seeds", "4",
                   "--max-iterations", "1500", "--log", log, "--no-screen"}) == 0);
  CHECK(count_lines(read_file(log)) == 8);  // exactly 3 new records
}

TEST_CASE("build-matrix, train and predict close the loop", "[cli]") {
  TempDir dir;
  ToySpec spec = default_toy_spec();
  std::vector<std::string> instance_args;
  for (int i = 0; i < 4; ++i) {
    instance_args.push_back(
        write_toy(dir, "i" + std::to_string(i) + ".ctt", spec, 20 + i));
  }
  const std::string configs = dir.file("configs.csv");
  REQUIRE(run_cli({"sample-configs", "--count", "2", "--output", configs}) == 0);
  const std::string log = dir.file("runs.jsonl");

  std::vector<std::string> experiment_args = {"experiment", "--instances"};
  experiment_args.insert(experiment_args.end(), instance_args.begin(), instance_args.end());
  for (const std::string& arg :
       {std::string("--configs"), configs, std::string("--seeds"), std::string("2"),
        std::string("--max-iterations"), std::string("1200"), std::string("--log"), log,
        std::string("--no-screen")}) {
    experiment_args.push_back(arg);
  }
  REQUIRE(run_cli(experiment_args) == 0);

  const std::string matrix = dir.file("matrix.csv");
  REQUIRE(run_cli({"build-matrix", "--log", log, "--output", matrix, "--no-screen"}) == 0);
  std::ifstream matrix_in(matrix);
  const PerformanceMatrix m = read_matrix_csv(matrix_in);
  CHECK(m.n_rows() == 4);
  CHECK(m.n_cols() == 2);

  const std::string model = dir.file("model.json");
  std::vector<std::string> train_args = {"train",   "--matrix", matrix, "--configs",
                                         configs,   "--output", model,  "--trees",
                                         "20",      "--instances"};
  train_args.insert(train_args.end(), instance_args.begin(), instance_args.end());
  REQUIRE(run_cli(train_args) == 0);

  const std::string prediction = dir.file("prediction.json");
  REQUIRE(run_cli({"predict", "--model", model, instance_args[0], "--output", prediction}) == 0);
  const json p = json::parse(read_file(prediction));
  const int chosen = p.at("config_id").get<int>();
  CHECK(chosen >= 0);
  CHECK(chosen < 2);
  REQUIRE(p.contains("params"));
  CHECK(p.at("params").contains("T0"));
  CHECK(p.at("probabilities").size() == 2);
}

TEST_CASE("race eliminates a crippled configuration end to end", "[cli]") {
  TempDir dir;
  ToySpec spec = default_toy_spec();
  std::vector<std::string> instance_args;
  for (int i = 0; i < 3; ++i) {
    instance_args.push_back(write_toy(dir, "r" + std::to_string(i) + ".ctt", spec, 30 + i));
  }

  // Config 1 barely searches at all (tiny budget comes from --max-iterations,
  // but its frozen temperature floor keeps it near the random start).
  const std::string configs = dir.file("race-configs.csv");
  {
    std::vector<ConfigPoint> rows;
    ConfigPoint good{{"T0", "T_min", "rho"}, {30.25, 0.1567, 0.0364}};
    ConfigPoint bad{{"T0", "T_min", "rho"}, {30.25, 30.2, 0.0364}};  // never cools below T0
    rows.push_back(good);
    rows.push_back(bad);
    std::ofstream out(configs);
    write_configs_csv(out, rows);
  }

  const std::string result_path = dir.file("race.json");
  REQUIRE(run_cli({"race", "--instances", instance_args[0], instance_args[1], instance_args[2],
                   "--configs", configs, "--runs-per-step", "2", "--budget", "200",
                   "--max-iterations", "4000", "--seed", "5", "--output", result_path}) == 0);
  const json race = json::parse(read_file(result_path));
  REQUIRE(race.at("survivors").size() >= 1);
  CHECK(race.at("survivors")[0].at("config_id").get<int>() == 0);
}
