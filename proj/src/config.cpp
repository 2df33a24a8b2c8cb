#include "acql/config.hpp"

#include <fstream>
#include <sstream>

#include "acql/hoa.hpp"
#include "acql/parser.hpp"
#include "acql/translate.hpp"

namespace acql {

namespace {

struct KeyValue {
  std::string section;
  std::string key;
  std::string value;
  size_t line = 0;
};

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(size_t line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::vector<KeyValue> tokenize(const std::string& text) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const size_t comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "task" && section != "env" && section != "train" && section != "eval" &&
          section != "output") {
        fail(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value, got '" + line + "'");
    if (section.empty()) fail(line_no, "key outside of any section");
    out.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
  }
  return out;
}

double parse_double(const KeyValue& kv) {
  try {
    size_t used = 0;
    const double v = std::stod(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument(kv.value);
    return v;
  } catch (const std::exception&) {
    fail(kv.line, "key '" + kv.key + "' expects a number, got '" + kv.value + "'");
  }
}

long long parse_int(const KeyValue& kv) {
  try {
    size_t used = 0;
    const long long v = std::stoll(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument(kv.value);
    return v;
  } catch (const std::exception&) {
    fail(kv.line, "key '" + kv.key + "' expects an integer, got '" + kv.value + "'");
  }
}

bool parse_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "yes") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "no") return false;
  fail(kv.line, "key '" + kv.key + "' expects true/false, got '" + kv.value + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void apply_task(RunConfig& cfg, const KeyValue& kv) {
  if (kv.key == "template") {
    cfg.template_id = static_cast<int>(parse_int(kv));
  } else if (kv.key == "formula") {
    cfg.formula_text = kv.value;
  } else if (kv.key == "hoa") {
    cfg.hoa_path = kv.value;
  } else if (kv.key.rfind("prop.", 0) == 0) {
    const std::string name = kv.key.substr(5);
    const auto parts = split_ws(kv.value);
    if (parts.size() != 4 || (parts[0] != "subgoal" && parts[0] != "region")) {
      fail(kv.line, "prop entries look like: prop.g1 = subgoal <cx> <cy> <radius>");
    }
    try {
      AtomicProp p;
      p.id = name;
      p.kind = parts[0] == "subgoal" ? PropKind::Subgoal : PropKind::Region;
      p.center = {std::stod(parts[1]), std::stod(parts[2])};
      p.radius = std::stod(parts[3]);
      cfg.props.add(p);
    } catch (const std::exception& e) {
      fail(kv.line, std::string("bad proposition: ") + e.what());
    }
  } else {
    fail(kv.line, "unknown [task] key '" + kv.key + "'");
  }
}

void apply_env(RunConfig& cfg, const KeyValue& kv) {
  if (kv.key == "size") {
    cfg.size = static_cast<int>(parse_int(kv));
  } else if (kv.key == "slip") {
    cfg.slip = parse_double(kv);
    if (cfg.slip < 0.0 || cfg.slip >= 1.0) fail(kv.line, "slip must lie in [0, 1)");
  } else if (kv.key == "horizon") {
    cfg.horizon = static_cast<int>(parse_int(kv));
  } else if (kv.key == "trap_terminates") {
    cfg.trap_terminates = parse_bool(kv);
  } else if (kv.key == "start") {
    const auto parts = split_ws(kv.value);
    if (parts.empty() || parts.size() % 2 != 0) {
      fail(kv.line, "start expects pairs of cell coordinates, e.g. 'start = 0 0'");
    }
    cfg.start_cells.clear();
    for (size_t i = 0; i < parts.size(); i += 2) {
      try {
        cfg.start_cells.push_back({std::stoi(parts[i]), std::stoi(parts[i + 1])});
      } catch (const std::exception&) {
        fail(kv.line, "start coordinates must be integers");
      }
    }
  } else {
    fail(kv.line, "unknown [env] key '" + kv.key + "'");
  }
}

void apply_train(RunConfig& cfg, const KeyValue& kv) {
  TrainConfig& t = cfg.train;
  if (kv.key == "total_steps") t.total_steps = parse_int(kv);
  else if (kv.key == "gamma") t.gamma = parse_double(kv);
  else if (kv.key == "gamma_c0") t.gamma_c0 = parse_double(kv);
  else if (kv.key == "tau_g") t.tau_g = parse_double(kv);
  else if (kv.key == "lambda") t.lambda = parse_double(kv);
  else if (kv.key == "limit") t.limit = parse_double(kv);
  else if (kv.key == "eps_start") t.eps_start = parse_double(kv);
  else if (kv.key == "eps_end") t.eps_end = parse_double(kv);
  else if (kv.key == "eps_fraction") t.eps_fraction = parse_double(kv);
  else if (kv.key == "her_k") t.her_k = static_cast<int>(parse_int(kv));
  else if (kv.key == "no_her") t.no_her = parse_bool(kv);
  else if (kv.key == "sum_cost") t.sum_cost = parse_bool(kv);
  else if (kv.key == "sum_cost_limit") t.sum_cost_limit = parse_double(kv);
  else if (kv.key == "step_sizes") {
    if (kv.value == "constant") t.step_sizes = StepSizeMode::Constant;
    else if (kv.value == "three_timescale") t.step_sizes = StepSizeMode::ThreeTimescale;
    else fail(kv.line, "step_sizes must be 'constant' or 'three_timescale'");
  }
  else if (kv.key == "alpha_r") t.alpha_r = parse_double(kv);
  else if (kv.key == "alpha_c") t.alpha_c = parse_double(kv);
  else if (kv.key == "n_step") t.n_step = static_cast<int>(parse_int(kv));
  else if (kv.key == "buffer_capacity") t.buffer_capacity = parse_int(kv);
  else if (kv.key == "batch_size") t.batch_size = static_cast<int>(parse_int(kv));
  else if (kv.key == "updates_per_step") t.updates_per_step = static_cast<int>(parse_int(kv));
  else if (kv.key == "learn_start") t.learn_start = parse_int(kv);
  else if (kv.key == "safe_exploration") t.safe_exploration = parse_bool(kv);
  else if (kv.key == "log_interval") t.log_interval = parse_int(kv);
  else if (kv.key == "seed") t.seed = static_cast<uint64_t>(parse_int(kv));
  else if (kv.key == "rho_max") t.rho_max = parse_double(kv);
  else fail(kv.line, "unknown [train] key '" + kv.key + "'");
}

void apply_eval(RunConfig& cfg, const KeyValue& kv) {
  if (kv.key == "episodes") {
    cfg.eval_episodes = static_cast<int>(parse_int(kv));
  } else if (kv.key == "episode_length") {
    cfg.eval_episode_len = static_cast<int>(parse_int(kv));
  } else if (kv.key == "seeds") {
    cfg.eval_seeds.clear();
    for (const std::string& s : split_ws(kv.value)) {
      try {
        cfg.eval_seeds.push_back(std::stoull(s));
      } catch (const std::exception&) {
        fail(kv.line, "seeds must be integers");
      }
    }
    if (cfg.eval_seeds.empty()) fail(kv.line, "seeds must not be empty");
  } else {
    fail(kv.line, "unknown [eval] key '" + kv.key + "'");
  }
}

void apply_output(RunConfig& cfg, const KeyValue& kv) {
  if (kv.key == "dir") {
    cfg.output_dir = kv.value;
  } else {
    fail(kv.line, "unknown [output] key '" + kv.key + "'");
  }
}

}  // namespace

RunConfig load_config_text(const std::string& text) {
  RunConfig cfg;
  for (const KeyValue& kv : tokenize(text)) {
    if (kv.section == "task") apply_task(cfg, kv);
    else if (kv.section == "env") apply_env(cfg, kv);
    else if (kv.section == "train") apply_train(cfg, kv);
    else if (kv.section == "eval") apply_eval(cfg, kv);
    else apply_output(cfg, kv);
  }
  if (cfg.template_id != 0 && (cfg.template_id < 1 || cfg.template_id > 5)) {
    throw ConfigError("task template must lie in 1..5");
  }
  const int sources = (cfg.template_id != 0) + !cfg.formula_text.empty() + !cfg.hoa_path.empty();
  if (sources == 0) {
    throw ConfigError("[task] needs one of: template, formula, hoa");
  }
  if (sources > 1) {
    throw ConfigError("[task] keys template/formula/hoa are mutually exclusive");
  }
  if (cfg.template_id == 0 && cfg.props.size() == 0) {
    throw ConfigError("[task] explicit formula/hoa requires prop.* entries");
  }
  if (cfg.eval_episodes <= 0 || cfg.eval_episode_len <= 0) {
    throw ConfigError("[eval] episodes and episode_length must be positive");
  }
  cfg.train.check();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str());
}

TaskBundle build_task(const RunConfig& cfg) {
  TaskBundle bundle;
  auto task = std::make_shared<Task>();

  std::vector<Cell> starts = cfg.start_cells;
  if (cfg.template_id != 0) {
    const TaskLayout layout = make_layout(cfg.template_id, cfg.size);
    task->props = layout.props;
    task->formula = parse_formula(layout.formula_text, task->props);
    task->has_formula = true;
    if (starts.empty()) starts = layout.start_cells;
  } else {
    task->props = cfg.props;
    if (!cfg.formula_text.empty()) {
      task->formula = parse_formula(cfg.formula_text, task->props);
      task->has_formula = true;
    }
  }
  if (starts.empty()) starts = {{0, 0}};

  if (!cfg.hoa_path.empty()) {
    std::ifstream in(cfg.hoa_path);
    if (!in) throw ConfigError("cannot read HOA file '" + cfg.hoa_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    task->dba = parse_hoa(buf.str(), task->props);
  } else {
    task->dba = translate(task->formula, task->props);
  }
  task->structure = analyze(task->dba, task->props);
  task->loop = is_loop_task(task->dba, task->props);

  bundle.task = task;
  bundle.env.size = cfg.size;
  bundle.env.slip = cfg.slip;
  bundle.env.start_cells = starts;
  for (const Cell& c : starts) {
    if (!bundle.env.in_bounds(c)) throw ConfigError("start cell out of bounds");
  }
  bundle.options.rho_max = cfg.train.rho_max;
  bundle.options.horizon = cfg.horizon;
  bundle.options.trap_terminates = cfg.trap_terminates;
  return bundle;
}

}  // namespace acql
