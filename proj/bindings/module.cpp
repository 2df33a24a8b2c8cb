#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acql/config.hpp"
#include "acql/hoa.hpp"
#include "acql/parser.hpp"
#include "acql/translate.hpp"

namespace py = pybind11;
using namespace acql;

namespace {

PropTable props_from_dict(const py::dict& d) {
  PropTable table;
  for (const auto& item : d) {
    const auto name = item.first.cast<std::string>();
    const auto spec = item.second.cast<py::tuple>();
    if (spec.size() != 4) {
      throw std::invalid_argument("prop spec is (kind, cx, cy, radius)");
    }
    const auto kind = spec[0].cast<std::string>();
    if (kind != "subgoal" && kind != "region") {
      throw std::invalid_argument("prop kind must be 'subgoal' or 'region'");
    }
    table.add({name, kind == "subgoal" ? PropKind::Subgoal : PropKind::Region,
               {spec[1].cast<double>(), spec[2].cast<double>()}, spec[3].cast<double>()});
  }
  return table;
}

std::vector<Vec2> signal_from_list(const std::vector<std::pair<double, double>>& pts) {
  std::vector<Vec2> w;
  w.reserve(pts.size());
  for (const auto& [x, y] : pts) w.push_back({x, y});
  return w;
}

struct PyTask {
  std::shared_ptr<const Task> task;
};

PyTask build_from_config(const std::string& text) {
  const RunConfig cfg = load_config_text(text);
  return {build_task(cfg).task};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "automaton-constrained Q-learning core";

  py::register_exception<ParseError>(m, "FormulaParseError", PyExc_ValueError);
  py::register_exception<UnsupportedFormula>(m, "UnsupportedFormulaError", PyExc_ValueError);
  py::register_exception<HoaError>(m, "HoaFormatError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigurationError", PyExc_ValueError);

  py::class_<PyTask>(m, "Task")
      .def_property_readonly("num_states",
                             [](const PyTask& t) { return t.task->dba.num_states; })
      .def_property_readonly("initial", [](const PyTask& t) { return t.task->dba.initial; })
      .def_property_readonly("loop", [](const PyTask& t) { return t.task->loop; })
      .def_property_readonly("accepting",
                             [](const PyTask& t) {
                               std::vector<int> acc;
                               for (int q = 0; q < t.task->dba.num_states; ++q) {
                                 if (t.task->dba.is_accepting(q)) acc.push_back(q);
                               }
                               return acc;
                             })
      .def_property_readonly("unsafe",
                             [](const PyTask& t) {
                               std::vector<int> out;
                               for (int q = 0; q < t.task->dba.num_states; ++q) {
                                 if (t.task->structure.unsafe[q]) out.push_back(q);
                               }
                               return out;
                             })
      .def("safety",
           [](const PyTask& t, int q) {
             return t.task->structure.safety.at(q).to_string(t.task->props);
           })
      .def("liveness",
           [](const PyTask& t, int q) {
             return t.task->structure.liveness.at(q).to_string(t.task->props);
           })
      .def("subgoals",
           [](const PyTask& t, int q) {
             std::vector<std::string> names;
             for (const GoalSlot& g : t.task->structure.subgoals.at(q)) {
               names.push_back(g.has_value() ? t.task->props[g->prop].id : "");
             }
             return names;
           })
      .def("step",
           [](const PyTask& t, int q, double x, double y) {
             return step(t.task->dba, q, {x, y}, t.task->props);
           })
      .def("run",
           [](const PyTask& t, const std::vector<std::pair<double, double>>& pts) {
             const auto r = run(t.task->dba, signal_from_list(pts), t.task->props);
             return py::make_tuple(r.states, r.accepting_visits);
           })
      .def("to_hoa", [](const PyTask& t) { return emit_hoa(t.task->dba, t.task->props); });

  m.def("parse", [](const std::string& text, const py::dict& props) {
    const PropTable table = props_from_dict(props);
    return parse_formula(text, table).to_string(table);
  },
        py::arg("text"), py::arg("props"), "Parse a formula; returns its normalized text.");

  m.def("robustness", [](const std::string& text, const py::dict& props,
                         const std::vector<std::pair<double, double>>& signal, double rho_max) {
    const PropTable table = props_from_dict(props);
    const Formula f = parse_formula(text, table);
    return robustness_signal(f, table, signal_from_list(signal), {rho_max});
  },
        py::arg("text"), py::arg("props"), py::arg("signal"), py::arg("rho_max") = 1.0,
        "Quantitative verdict of a formula over a finite signal.");

  m.def("build_task", &build_from_config, py::arg("config_text"),
        "Build automaton + task structure from a run configuration string.");

  m.def("train", [](const std::string& config_text) {
    const RunConfig cfg = load_config_text(config_text);
    const TaskBundle bundle = build_task(cfg);
    const TrainResult result = train(*bundle.task, bundle.env, bundle.options, cfg.train);
    const EvalSummary summary =
        evaluate(*bundle.task, bundle.env, bundle.options, result.critics, cfg.train,
                 cfg.eval_episodes, cfg.eval_episode_len, cfg.train.seed);
    py::dict out;
    out["episodes"] = result.episodes;
    out["training_violations"] = result.violations;
    out["mean_reward"] = summary.mean_reward;
    out["success_rate"] = summary.success_rate;
    out["eval_violations"] = summary.violations;
    return out;
  },
        py::arg("config_text"), "Train per configuration and return evaluation summary.");
}
