#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modecause/citest.hpp"
#include "modecause/cli.hpp"
#include "modecause/dataset.hpp"
#include "modecause/discovery.hpp"
#include "modecause/effects.hpp"
#include "modecause/explain.hpp"
#include "modecause/graph.hpp"
#include "modecause/predictor.hpp"
#include "modecause/scm.hpp"
#include "modecause/version.hpp"

namespace py = pybind11;
using namespace modecause;

namespace {

CodedDataset dataset_from_rows(const Codebook& cb, const std::vector<std::string>& columns,
                               const std::vector<std::vector<int>>& rows) {
  std::vector<int> cells;
  for (const auto& r : rows) {
    if (r.size() != columns.size())
      throw std::invalid_argument("row width does not match column count");
    cells.insert(cells.end(), r.begin(), r.end());
  }
  return CodedDataset(std::make_shared<Codebook>(cb), columns, std::move(cells));
}

std::vector<std::vector<int>> dataset_rows(const CodedDataset& d) {
  std::vector<std::vector<int>> rows(d.n_rows());
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    const auto row = d.row(r);
    rows[r].assign(row.begin(), row.end());
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = kVersion;

  py::class_<Codebook>(m, "Codebook")
      .def_static("from_json", &Codebook::from_json)
      .def_static("table1", &table1_codebook)
      .def("to_json", &Codebook::to_json)
      .def("variable_names", [](const Codebook& cb) {
        std::vector<std::string> names;
        for (const auto& v : cb.variables()) names.push_back(v.name);
        return names;
      });

  py::class_<CodedDataset>(m, "CodedDataset")
      .def_static("from_rows", &dataset_from_rows, py::arg("codebook"), py::arg("columns"),
                  py::arg("rows"))
      .def_property_readonly("n_rows", &CodedDataset::n_rows)
      .def_property_readonly("columns", &CodedDataset::columns)
      .def_property_readonly("codebook",
                             [](const CodedDataset& d) { return d.codebook(); })
      .def("rows", &dataset_rows)
      .def("column",
           [](const CodedDataset& d, const std::string& name) {
             return d.column(d.column_index(name));
           })
      .def("select_columns", &CodedDataset::select_columns);

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("codebook"));
  m.def("parse_dataset_csv", &parse_dataset_csv, py::arg("text"), py::arg("codebook"));
  m.def("clean", &clean);
  m.def(
      "stratified_split",
      [](const CodedDataset& d, const std::vector<std::pair<std::string, double>>& fractions,
         const std::string& stratify_on, std::uint64_t seed) {
        SplitSpec spec{fractions, stratify_on, seed};
        return stratified_split(d, spec);
      },
      py::arg("data"), py::arg("fractions"), py::arg("stratify_on"), py::arg("seed"));
  m.def("smote", &smote, py::arg("data"), py::arg("class_var"), py::arg("k"), py::arg("seed"));
  m.def("collapse_binary_classes", &collapse_binary_classes, py::arg("data"),
        py::arg("class_vars"), py::arg("target_name"));

  py::class_<MixedGraph>(m, "MixedGraph")
      .def(py::init<std::vector<std::string>>())
      .def("add_directed_edge", &MixedGraph::add_directed_edge)
      .def("add_undirected_edge", &MixedGraph::add_undirected_edge)
      .def("nodes", &MixedGraph::nodes)
      .def("parents", &MixedGraph::parents)
      .def("directed_edges", &MixedGraph::directed_edges)
      .def("undirected_edges", &MixedGraph::undirected_edges)
      .def("is_acyclic", &MixedGraph::is_acyclic)
      .def("structure_equals", &MixedGraph::structure_equals)
      .def("to_dot", &MixedGraph::to_dot)
      .def_static("from_dot", &MixedGraph::from_dot);

  py::class_<Dag>(m, "Dag")
      .def(py::init<MixedGraph>())
      .def("graph", &Dag::graph, py::return_value_policy::reference_internal);

  m.def("d_separated", &d_separated, py::arg("dag"), py::arg("a"), py::arg("b"), py::arg("z"));
  m.def("path_blocked", &path_blocked, py::arg("dag"), py::arg("path"), py::arg("z"));
  m.def("cpdag_of", &cpdag_of);

  py::class_<CiResult>(m, "CiResult")
      .def_readonly("statistic", &CiResult::statistic)
      .def_readonly("dof", &CiResult::dof)
      .def_readonly("p_value", &CiResult::p_value)
      .def_readonly("independent", &CiResult::independent)
      .def_readonly("informative", &CiResult::informative);

  m.def("chi_square_ci", &chi_square_ci, py::arg("data"), py::arg("x"), py::arg("y"),
        py::arg("z"), py::arg("alpha"));

  py::class_<Knowledge>(m, "Knowledge")
      .def(py::init<>())
      .def_static("from_json", &Knowledge::from_json)
      .def_static("table1_default", &Knowledge::table1_default)
      .def_readwrite("sinks", &Knowledge::sinks)
      .def_readwrite("sources", &Knowledge::sources)
      .def_readwrite("required_orientations", &Knowledge::required_orientations)
      .def("to_json", &Knowledge::to_json);

  m.def("discover", &discover, py::arg("data"), py::arg("alpha"),
        py::arg("knowledge") = Knowledge{});

  py::class_<DiscreteSCM>(m, "DiscreteSCM")
      .def_static("from_json", &DiscreteSCM::from_json)
      .def("to_json", &DiscreteSCM::to_json)
      .def("dag", &DiscreteSCM::dag, py::return_value_policy::reference_internal)
      .def("codebook", &DiscreteSCM::codebook);

  m.def("make_survey_scm", &make_survey_scm);
  m.def("make_canonical_scm", &make_canonical_scm);
  m.def("sample", &sample, py::arg("scm"), py::arg("n"), py::arg("seed"));
  m.def("true_ate", &true_ate, py::arg("scm"), py::arg("treatment"), py::arg("outcome"),
        py::arg("t1"), py::arg("t0"));

  py::class_<DmlConfig>(m, "DmlConfig")
      .def(py::init<>())
      .def_readwrite("n_folds", &DmlConfig::n_folds)
      .def_readwrite("gb_stages", &DmlConfig::gb_stages)
      .def_readwrite("gb_depth", &DmlConfig::gb_depth)
      .def_readwrite("gb_rate", &DmlConfig::gb_rate)
      .def_readwrite("lasso_lambda", &DmlConfig::lasso_lambda)
      .def_readwrite("seed", &DmlConfig::seed);

  m.def("adjustment_set", &adjustment_set, py::arg("graph"), py::arg("treatment"),
        py::arg("outcome"));
  m.def("lasso_fit", &lasso_fit, py::arg("x"), py::arg("y"), py::arg("lambda_"));
  m.def("dml_ate", &dml_ate, py::arg("data"), py::arg("treatment"), py::arg("outcome"),
        py::arg("z"), py::arg("config"));

  py::class_<EffectsTable>(m, "EffectsTable")
      .def_readonly("variables", &EffectsTable::variables)
      .def_readonly("values", &EffectsTable::values)
      .def("at", &EffectsTable::at)
      .def("to_csv", &EffectsTable::to_csv, py::arg("decimals") = 2);

  m.def("total_effects_table", &total_effects_table, py::arg("graph"), py::arg("data"),
        py::arg("config"));

  py::class_<MlpConfig>(m, "MlpConfig")
      .def(py::init<>())
      .def_readwrite("hidden_units", &MlpConfig::hidden_units)
      .def_readwrite("learning_rate", &MlpConfig::learning_rate)
      .def_readwrite("batch_size", &MlpConfig::batch_size)
      .def_readwrite("max_epochs", &MlpConfig::max_epochs)
      .def_readwrite("patience", &MlpConfig::patience)
      .def_readwrite("seed", &MlpConfig::seed);

  py::class_<MlpModel>(m, "MlpModel")
      .def("class_labels", &MlpModel::class_labels)
      .def("feature_names", &MlpModel::feature_names)
      .def("train_loss_history", &MlpModel::train_loss_history)
      .def("forward", [](const MlpModel& model, const std::vector<double>& features) {
        return model.forward(features);
      });

  m.def("selu", &selu);
  m.def("train_mlp", &train_mlp, py::arg("train"), py::arg("val"), py::arg("target_var"),
        py::arg("config"));
  m.def("predict", &predict, py::arg("model"), py::arg("data"));
  m.def("predict_classes", &predict_classes, py::arg("model"), py::arg("data"));
  m.def("accuracy", &accuracy);
  m.def("cross_validate", &cross_validate, py::arg("data"), py::arg("target_var"), py::arg("k"),
        py::arg("smote_k"), py::arg("config"));

  m.def("shapley_weight", &shapley_weight);
  m.def(
      "exact_shap",
      [](const MlpModel& model, const std::vector<int>& instance, const CodedDataset& background,
         int class_index) {
        return exact_shap(mlp_score_fn(model), instance, background, class_index);
      },
      py::arg("model"), py::arg("instance"), py::arg("background"), py::arg("class_index"));
  m.def(
      "mean_abs_shap",
      [](const MlpModel& model, const CodedDataset& data, const CodedDataset& background) {
        const auto s = mean_abs_shap(mlp_score_fn(model), model.classes(), data, background);
        return py::make_tuple(s.feature_names, s.mean_abs, s.ranking);
      },
      py::arg("model"), py::arg("data"), py::arg("background"));

  m.def("run_cli", &cli::run, py::arg("args"),
        "Run a CLI subcommand in-process; returns the exit code.");
}
