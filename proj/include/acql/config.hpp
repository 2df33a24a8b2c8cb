#pragma once

#include <memory>
#include <string>
#include <vector>

#include "acql/trainer.hpp"

namespace acql {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Sectioned key=value run configuration; the full key list lives in
// docs/config.md. Unknown sections or keys are rejected.
struct RunConfig {
  // [task]
  int template_id = 0;  // 1..5; 0 means an explicit formula or HOA import
  std::string formula_text;
  std::string hoa_path;
  PropTable props;

  // [env]
  int size = 10;
  double slip = 0.0;
  int horizon = 200;
  bool trap_terminates = true;
  std::vector<Cell> start_cells;  // empty -> template default or (0,0)

  // [train]
  TrainConfig train;

  // [eval]
  int eval_episodes = 16;
  int eval_episode_len = 1000;
  std::vector<uint64_t> eval_seeds = {1, 2, 3};

  // [output]
  std::string output_dir = "out";
};

RunConfig load_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

struct TaskBundle {
  std::shared_ptr<const Task> task;
  GridEnv env;
  ProductOptions options;
};

// Resolves the configured task into automaton + structure + environment.
// Throws UnsupportedFormula / ConfigError / HoaError.
TaskBundle build_task(const RunConfig& cfg);

}  // namespace acql
