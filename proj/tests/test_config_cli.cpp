#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "acql/cli.hpp"
#include "acql/config.hpp"
#include "acql/hoa.hpp"
#include "acql/translate.hpp"

using namespace acql;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "acql-tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p;
}

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"acql"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

const char* kTask3 = R"(# obstacle navigation
[task]
template = 3
[env]
size = 10
horizon = 100
[train]
total_steps = 3000
log_interval = 500
seed = 4
[eval]
episodes = 2
episode_length = 50
[output]
dir = OUTDIR
)";

std::string with_outdir(const std::string& text, const fs::path& dir) {
  std::string out = text;
  out.replace(out.find("OUTDIR"), 6, dir.string());
  return out;
}

}  // namespace

TEST_CASE("config parsing: sections, defaults and validation") {
  const RunConfig cfg = load_config_text(
      "[task]\ntemplate = 3\n[env]\nsize = 8\nslip = 0.1\n[train]\ngamma = 0.95\nseed = 7\n");
  CHECK(cfg.template_id == 3);
  CHECK(cfg.size == 8);
  CHECK(cfg.slip == 0.1);
  CHECK(cfg.train.gamma == 0.95);
  CHECK(cfg.train.seed == 7);
  CHECK(cfg.train.gamma_c0 == 0.85);  // default
  CHECK(cfg.eval_episodes == 16);     // default

  CHECK_THROWS_AS(load_config_text("[task]\ntemplate = 3\nnonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config_text("[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config_text("[task]\ntemplate = 9\n"), ConfigError);
  CHECK_THROWS_AS(load_config_text("[env]\nsize = 10\n"), ConfigError);  // no task source
  CHECK_THROWS_AS(load_config_text("[task]\ntemplate = 1\nformula = F g1\n"), ConfigError);
  CHECK_THROWS_AS(load_config_text("[task]\nformula = F g1\n"), ConfigError);  // no props
  CHECK_THROWS_AS(load_config_text("[task]\ntemplate = 3\n[train]\ngamma = 2\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_config_text("key = 1\n"), ConfigError);  // outside any section
  CHECK_THROWS_AS(load_config_text("[task]\ntemplate three\n"), ConfigError);
}

TEST_CASE("explicit formula tasks build with their proposition table") {
  const RunConfig cfg = load_config_text(
      "[task]\nformula = F g1 & G !o1\n"
      "prop.g1 = subgoal 8.5 8.5 1.0\nprop.o1 = region 5 5 1.5\n"
      "[env]\nsize = 10\n");
  const TaskBundle bundle = build_task(cfg);
  CHECK(bundle.task->dba.num_states == 3);
  CHECK(bundle.task->props.find("o1") >= 0);
  CHECK_FALSE(bundle.task->loop);
}

TEST_CASE("config start cells override the layout default") {
  RunConfig cfg = load_config_text("[task]\ntemplate = 1\n[env]\nsize = 10\nstart = 4 4\n");
  const TaskBundle bundle = build_task(cfg);
  CHECK(bundle.env.start_cells.size() == 1);
  CHECK(bundle.env.start_cells[0] == Cell{4, 4});
  CHECK_THROWS_AS(
      build_task(load_config_text("[task]\ntemplate = 1\n[env]\nsize = 10\nstart = 40 4\n")),
      ConfigError);
}

TEST_CASE("hoa import feeds the pipeline") {
  // Emit template 3, reload it through the task config.
  RunConfig direct;
  direct.template_id = 3;
  direct.size = 10;
  const TaskBundle built = build_task(direct);
  const fs::path hoa = write_temp("task3.hoa", emit_hoa(built.task->dba, built.task->props));

  const RunConfig cfg = load_config_text(
      "[task]\nhoa = " + hoa.string() +
      "\nprop.g1 = subgoal 8.5 8.5 1.0\nprop.g2 = subgoal 1.5 1.5 1.0\nprop.o1 = region 5 5 1.5\n"
      "[env]\nsize = 10\n");
  const TaskBundle bundle = build_task(cfg);
  CHECK(bundle.task->dba.num_states == built.task->dba.num_states);
  CHECK_FALSE(bundle.task->has_formula);
}

TEST_CASE("cli train/eval/monitor/oracle work end to end") {
  const fs::path outdir = fs::temp_directory_path() / "acql-tests" / "run3";
  fs::remove_all(outdir);
  const fs::path cfg = write_temp("t3.cfg", with_outdir(kTask3, outdir));

  CHECK(run_cli({"train", "-c", cfg.string()}) == 0);
  CHECK(fs::exists(outdir / "metrics.jsonl"));
  CHECK(fs::exists(outdir / "checkpoint.json"));
  CHECK(fs::exists(outdir / "summary.csv"));

  // metrics line count = total steps / interval
  std::ifstream metrics(outdir / "metrics.jsonl");
  int lines = 0;
  std::string line;
  while (std::getline(metrics, line)) ++lines;
  CHECK(lines == 6);

  CHECK(run_cli({"eval", "-c", cfg.string()}) == 0);
  CHECK(fs::exists(outdir / "eval.csv"));
  std::ifstream eval_csv(outdir / "eval.csv");
  std::getline(eval_csv, line);
  CHECK(line == "task,seed,mean_reward,success_rate,violations");

  CHECK(run_cli({"oracle", "-c", cfg.string()}) == 0);
  CHECK(fs::exists(outdir / "oracle.csv"));

  CHECK(run_cli({"demo", "-c", cfg.string()}) == 0);
  CHECK(run_cli({"analyze", "-c", cfg.string(), "--json",
                 (outdir / "structure.json").string()}) == 0);
  CHECK(fs::exists(outdir / "structure.json"));

  CHECK(run_cli({"translate", "-c", cfg.string(), "-o", (outdir / "task.hoa").string()}) == 0);
  CHECK(fs::exists(outdir / "task.hoa"));

  // Monitor a dumped trajectory produced by the product itself.
  RunConfig rc = load_config_text(with_outdir(kTask3, outdir));
  const TaskBundle bundle = build_task(rc);
  ProductEnv product(bundle.env, bundle.task, bundle.options, 3);
  Rng rng(4);
  const EpisodeTrace trace = rollout(
      product, [&](const AugmentedState&) { return static_cast<int>(rng.below(kNumActions)); },
      50);
  const fs::path traj = write_temp("traj.csv", trace_to_csv(trace));
  CHECK(run_cli({"monitor", "-c", cfg.string(), "-t", traj.string()}) == 0);
}

TEST_CASE("cli exit codes: config error and unsupported formula") {
  CHECK(run_cli({"train", "-c", "/nonexistent/path.cfg"}) == 2);

  const fs::path bad = write_temp("bad.cfg", "[task]\ntemplate = 3\nwhat = 1\n");
  CHECK(run_cli({"train", "-c", bad.string()}) == 2);

  const fs::path non_dba = write_temp(
      "fgp.cfg", "[task]\nformula = F (G p)\nprop.p = region 5 5 1\n[env]\nsize = 10\n");
  CHECK(run_cli({"translate", "-c", non_dba.string()}) == 3);
}

TEST_CASE("determinism: identical configs give byte-identical metrics") {
  const fs::path out_a = fs::temp_directory_path() / "acql-tests" / "det-a";
  const fs::path out_b = fs::temp_directory_path() / "acql-tests" / "det-b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  const fs::path cfg_a = write_temp("det-a.cfg", with_outdir(kTask3, out_a));
  const fs::path cfg_b = write_temp("det-b.cfg", with_outdir(kTask3, out_b));
  REQUIRE(run_cli({"train", "-c", cfg_a.string()}) == 0);
  REQUIRE(run_cli({"train", "-c", cfg_b.string()}) == 0);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string ma = slurp(out_a / "metrics.jsonl");
  CHECK(!ma.empty());
  CHECK(ma == slurp(out_b / "metrics.jsonl"));
  CHECK(slurp(out_a / "checkpoint.json") == slurp(out_b / "checkpoint.json"));
}

TEST_CASE("environment variable overrides the output directory") {
  const fs::path outdir = fs::temp_directory_path() / "acql-tests" / "env-dir";
  const fs::path ignored = fs::temp_directory_path() / "acql-tests" / "ignored";
  fs::remove_all(outdir);
  fs::remove_all(ignored);
  const fs::path cfg = write_temp("envdir.cfg", with_outdir(kTask3, ignored));
  setenv("ACQL_OUTPUT_DIR", outdir.string().c_str(), 1);
  const int code = run_cli({"train", "-c", cfg.string()});
  unsetenv("ACQL_OUTPUT_DIR");
  CHECK(code == 0);
  CHECK(fs::exists(outdir / "metrics.jsonl"));
  CHECK_FALSE(fs::exists(ignored / "metrics.jsonl"));
}
