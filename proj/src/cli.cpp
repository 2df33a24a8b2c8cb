#include "acql/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "acql/config.hpp"
#include "acql/hoa.hpp"
#include "acql/parser.hpp"
#include "acql/translate.hpp"

namespace acql::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitRuntime = 4;

std::string output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("ACQL_OUTPUT_DIR")) return env;
  return cfg.output_dir;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

int cmd_translate(const RunConfig& cfg, const std::string& out_path) {
  const TaskBundle bundle = build_task(cfg);
  const std::string hoa = emit_hoa(bundle.task->dba, bundle.task->props);
  if (out_path.empty() || out_path == "-") {
    std::cout << hoa;
  } else {
    write_file(out_path, hoa);
  }
  return kExitOk;
}

nlohmann::json structure_json(const Task& task) {
  nlohmann::json doc;
  doc["states"] = task.dba.num_states;
  doc["initial"] = task.dba.initial;
  doc["loop_task"] = task.loop;
  doc["pad_len"] = task.structure.pad_len;
  nlohmann::json per_state = nlohmann::json::array();
  for (int q = 0; q < task.dba.num_states; ++q) {
    nlohmann::json row;
    row["q"] = q;
    row["accepting"] = task.dba.is_accepting(q);
    row["unsafe"] = static_cast<bool>(task.structure.unsafe[q]);
    row["safety"] = task.structure.safety[q].to_string(task.props);
    row["liveness"] = task.structure.liveness[q].to_string(task.props);
    nlohmann::json goals = nlohmann::json::array();
    for (const GoalSlot& g : task.structure.subgoals[q]) {
      if (g.has_value()) {
        goals.push_back({{"prop", task.props[g->prop].id},
                         {"center", {g->center.x, g->center.y}},
                         {"radius", g->radius}});
      } else {
        goals.push_back(nullptr);
      }
    }
    row["subgoals"] = goals;
    per_state.push_back(row);
  }
  doc["structure"] = per_state;
  return doc;
}

int cmd_analyze(const RunConfig& cfg, const std::string& json_path) {
  const TaskBundle bundle = build_task(cfg);
  const Task& task = *bundle.task;
  std::cout << "automaton: " << task.dba.num_states << " states, initial " << task.dba.initial
            << (task.loop ? ", loop acceptance\n" : "\n");
  std::cout << "q  acc unsafe  S(q)                 O(q)                 G(q)\n";
  for (int q = 0; q < task.dba.num_states; ++q) {
    std::string goals;
    for (const GoalSlot& g : task.structure.subgoals[q]) {
      if (!goals.empty()) goals += ", ";
      goals += g.has_value() ? task.props[g->prop].id : "-";
    }
    char line[256];
    std::snprintf(line, sizeof(line), "%-2d %-3s %-7s %-20s %-20s [%s]\n", q,
                  task.dba.is_accepting(q) ? "*" : "",
                  task.structure.unsafe[q] ? "trap" : "",
                  task.structure.safety[q].to_string(task.props).c_str(),
                  task.structure.liveness[q].to_string(task.props).c_str(), goals.c_str());
    std::cout << line;
  }
  if (!json_path.empty()) {
    const std::string text = structure_json(task).dump(2) + "\n";
    if (json_path == "-") {
      std::cout << text;
    } else {
      write_file(json_path, text);
    }
  }
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  const TaskBundle bundle = build_task(cfg);
  const fs::path dir = output_dir(cfg);
  fs::create_directories(dir);

  std::ofstream metrics(dir / "metrics.jsonl", std::ios::binary);
  if (!metrics) throw std::runtime_error("cannot write metrics file");
  const TrainResult result =
      train(*bundle.task, bundle.env, bundle.options, cfg.train,
            [&](const MetricsRecord& rec) { metrics << rec.to_json_line() << "\n"; });
  metrics.close();

  write_file(dir / "checkpoint.json", save_critics(result.critics, cfg.train));

  const EvalSummary summary =
      evaluate(*bundle.task, bundle.env, bundle.options, result.critics, cfg.train,
               cfg.eval_episodes, cfg.eval_episode_len, cfg.train.seed);
  std::string csv = "task,seed,mean_reward,success_rate,violations\n";
  const std::string task_name =
      cfg.template_id != 0 ? "template" + std::to_string(cfg.template_id) : "custom";
  csv += task_name + "," + std::to_string(cfg.train.seed) + "," + fmt(summary.mean_reward) +
         "," + fmt(summary.success_rate) + "," + std::to_string(summary.violations) + "\n";
  write_file(dir / "summary.csv", csv);

  std::cout << "trained " << cfg.train.total_steps << " steps, " << result.episodes
            << " episodes, " << result.violations << " training violations\n";
  std::cout << "eval: mean_reward=" << fmt(summary.mean_reward)
            << " success_rate=" << fmt(summary.success_rate)
            << " violations=" << summary.violations << "\n";
  std::cout << "artifacts in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path) {
  const TaskBundle bundle = build_task(cfg);
  const fs::path dir = output_dir(cfg);
  fs::path ckpt = checkpoint_path.empty() ? dir / "checkpoint.json" : fs::path(checkpoint_path);
  std::ifstream in(ckpt, std::ios::binary);
  if (!in) throw ConfigError("cannot read checkpoint '" + ckpt.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const CriticPair critics = load_critics(buf.str(), cfg.train);

  const std::string task_name =
      cfg.template_id != 0 ? "template" + std::to_string(cfg.template_id) : "custom";
  std::string csv = "task,seed,mean_reward,success_rate,violations\n";
  for (uint64_t seed : cfg.eval_seeds) {
    const EvalSummary summary = evaluate(*bundle.task, bundle.env, bundle.options, critics,
                                         cfg.train, cfg.eval_episodes, cfg.eval_episode_len, seed);
    csv += task_name + "," + std::to_string(seed) + "," + fmt(summary.mean_reward) + "," +
           fmt(summary.success_rate) + "," + std::to_string(summary.violations) + "\n";
  }
  std::cout << csv;
  fs::create_directories(dir);
  write_file(dir / "eval.csv", csv);
  return kExitOk;
}

int cmd_monitor(const RunConfig& cfg, const std::string& trajectory_path) {
  const TaskBundle bundle = build_task(cfg);
  const Task& task = *bundle.task;
  if (!task.has_formula) {
    throw ConfigError("monitor needs a formula (template or formula task, not HOA import)");
  }
  std::ifstream in(trajectory_path, std::ios::binary);
  if (!in) throw ConfigError("cannot read trajectory '" + trajectory_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::vector<Vec2> signal = signal_from_csv(buf.str());

  const double rho =
      robustness_signal(task.formula, task.props, signal, {bundle.options.rho_max});
  const RunResult run_result = run(task.dba, signal, task.props);

  std::cout << "formula: " << task.formula.to_string(task.props) << "\n";
  std::cout << "robustness: " << fmt(rho) << "\n";
  std::cout << "automaton run:";
  for (int q : run_result.states) std::cout << ' ' << q;
  std::cout << "\naccepting visits: " << run_result.accepting_visits << "\n";
  bool trapped = false;
  std::cout << "safety trace (t, q, rho(S(q), s_t)):\n";
  for (size_t t = 0; t < signal.size(); ++t) {
    const int q = run_result.states[t + 1];
    const double c = robustness_state(task.structure.safety[q], task.props, signal[t],
                                      {bundle.options.rho_max});
    std::cout << "  " << t << " " << q << " " << fmt(c) << "\n";
    if (task.structure.unsafe[q]) trapped = true;
  }
  std::cout << "trap entered: " << (trapped ? "yes" : "no") << "\n";
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg) {
  const TaskBundle bundle = build_task(cfg);
  if (bundle.env.slip != 0.0) {
    throw ConfigError("oracle requires slip = 0 (deterministic dynamics)");
  }
  const FiniteProduct fp = build_finite_product(bundle.env, *bundle.task, cfg.train.rho_max);
  if (fp.n_states() > 10000) {
    throw ConfigError("oracle limited to 10000 augmented states, got " +
                      std::to_string(fp.n_states()));
  }
  const std::vector<bool> safe = max_safe_set(fp, cfg.train.limit);
  const std::vector<double> qc = qc_star(fp, cfg.train.rho_max);
  const QrStarResult qr = qr_star_safe(fp, safe, cfg.train.gamma);

  std::string csv = "x,y,q,action,qc_star,qr_star_safe,safe\n";
  for (int ci = 0; ci < fp.n_cells; ++ci) {
    const Cell cell = bundle.env.cell_at(ci);
    for (int q = 0; q < fp.n_q; ++q) {
      for (int a = 0; a < fp.n_actions; ++a) {
        const int idx = fp.sa(fp.state_of(ci, q), a);
        csv += std::to_string(cell.x) + "," + std::to_string(cell.y) + "," + std::to_string(q) +
               "," + std::to_string(a) + "," + fmt(qc[idx]) + "," + fmt(qr.values[idx]) + "," +
               (safe[idx] ? "1" : "0") + "\n";
      }
    }
  }
  const fs::path dir = output_dir(cfg);
  fs::create_directories(dir);
  write_file(dir / "oracle.csv", csv);
  std::cout << "oracle tables for " << fp.n_states() << " augmented states written to "
            << (dir / "oracle.csv").string() << "\n";
  if (!qr.excluded_states.empty()) {
    std::cout << qr.excluded_states.size() << " states have no safe action\n";
  }
  return kExitOk;
}

int cmd_demo(const RunConfig& cfg) {
  if (cfg.template_id == 0) {
    throw ConfigError("demo renders template tasks; set [task] template = 1..5");
  }
  const TaskLayout layout = make_layout(cfg.template_id, cfg.size);
  const TaskBundle bundle = build_task(cfg);
  std::cout << "template " << cfg.template_id << ": " << layout.formula_text << "\n";
  std::cout << render_layout(layout);
  std::cout << "automaton: " << bundle.task->dba.num_states << " states"
            << (bundle.task->loop ? " (loop acceptance)" : "") << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"automaton-constrained Q-learning on gridworld tasks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string json_path;
  std::string checkpoint_path;
  std::string trajectory_path;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "run configuration file")->required();
  };

  CLI::App* translate = app.add_subcommand("translate", "formula -> HOA automaton");
  add_config(translate);
  translate->add_option("-o,--output", out_path, "output file ('-' for stdout)");

  CLI::App* analyze = app.add_subcommand("analyze", "safety/liveness/subgoal structure");
  add_config(analyze);
  analyze->add_option("--json", json_path, "also write the structure as JSON ('-' for stdout)");

  CLI::App* train = app.add_subcommand("train", "train the constrained Q-learner");
  add_config(train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a trained checkpoint");
  add_config(eval);
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file (default <out>/checkpoint.json)");

  CLI::App* monitor = app.add_subcommand("monitor", "robustness report for a trajectory");
  add_config(monitor);
  monitor->add_option("-t,--trajectory", trajectory_path, "trajectory CSV")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force value tables");
  add_config(oracle);

  CLI::App* demo = app.add_subcommand("demo", "render the task layout");
  add_config(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig cfg = load_config_file(config_path);
    if (translate->parsed()) return cmd_translate(cfg, out_path);
    if (analyze->parsed()) return cmd_analyze(cfg, json_path);
    if (train->parsed()) return cmd_train(cfg);
    if (eval->parsed()) return cmd_eval(cfg, checkpoint_path);
    if (monitor->parsed()) return cmd_monitor(cfg, trajectory_path);
    if (oracle->parsed()) return cmd_oracle(cfg);
    if (demo->parsed()) return cmd_demo(cfg);
    return kExitRuntime;
  } catch (const UnsupportedFormula& e) {
    std::cerr << "UnsupportedFormula: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "formula error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HoaError& e) {
    std::cerr << "HOA error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace acql::cli
