#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "bddlearn/bdd.hpp"
#include "bddlearn/cnf.hpp"
#include "bddlearn/data.hpp"
#include "bddlearn/encode.hpp"
#include "bddlearn/errors.hpp"
#include "bddlearn/postprocess.hpp"
#include "bddlearn/sat_solver.hpp"
#include "bddlearn/search.hpp"
#include "bddlearn/serialize.hpp"
#include "bddlearn/version.hpp"

namespace py = pybind11;
using namespace bddlearn;

namespace {

data::Dataset make_dataset(const std::vector<std::vector<std::uint8_t>> &rows,
                           const std::vector<std::uint8_t> &labels,
                           std::vector<std::string> names) {
  return data::Dataset::from_rows(rows, labels, std::move(names));
}

std::vector<std::vector<std::uint8_t>> rows_of(const data::Dataset &d) {
  std::vector<std::vector<std::uint8_t>> out;
  for (std::size_t q = 0; q < d.size(); ++q) {
    const auto r = d.row(q);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

} // namespace

PYBIND11_MODULE(_bddlearn, m) {
  m.doc() = "Optimal ordered reduced BDD classifiers via SAT and MaxSAT";
  m.attr("__version__") = version;

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<LearnError>(m, "LearnError", PyExc_RuntimeError);
  py::register_exception<SolverIntegrationError>(m, "SolverIntegrationError",
                                                 PyExc_RuntimeError);

  py::class_<data::Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("rows"), py::arg("labels"),
           py::arg("feature_names") = std::vector<std::string>{})
      .def("__len__", &data::Dataset::size)
      .def_property_readonly("num_features", &data::Dataset::num_features)
      .def_property_readonly("feature_names", &data::Dataset::feature_names)
      .def_property_readonly("labels", &data::Dataset::labels)
      .def_property_readonly("label_values", &data::Dataset::label_values)
      .def_property_readonly("rows", &rows_of)
      .def("subset",
           [](const data::Dataset &d, const std::vector<std::size_t> &idx) {
             return d.subset(idx);
           })
      .def("conflicts", &data::check_consistency);

  m.def(
      "load_csv",
      [](const std::filesystem::path &path, const std::string &label) {
        return data::one_hot_binarize(data::load_csv(path, label));
      },
      py::arg("path"), py::arg("label"),
      "Read a CSV file and one-hot binarize it.");

  m.def("beads", [](const std::string &table) {
    return bdd::beads(bdd::TruthTable(table));
  });

  py::class_<bdd::Bdd>(m, "Bdd")
      .def_property_readonly("root", &bdd::Bdd::root)
      .def_property_readonly("node_count", &bdd::Bdd::node_count)
      .def_property_readonly("branch_count", &bdd::Bdd::branch_count)
      .def_property_readonly("ordering",
                             [](const bdd::Bdd &b) { return b.ordering().features(); })
      .def("classify",
           [](const bdd::Bdd &b, const std::vector<std::uint8_t> &x) {
             return bdd::classify(b, x);
           })
      .def("audit", &bdd::audit)
      .def("to_dot",
           [](const bdd::Bdd &b, const std::vector<std::string> &names) {
             std::ostringstream s;
             bdd::export_dot(b, s, names);
             return s.str();
           },
           py::arg("feature_names") = std::vector<std::string>{})
      .def("to_json", [](const bdd::Bdd &b) { return io::to_json(b).dump(); });

  m.def(
      "gen_bdd",
      [](const std::string &table, const std::vector<std::size_t> &ordering) {
        return bdd::gen_bdd(bdd::TruthTable(table), bdd::FeatureOrdering(ordering));
      },
      py::arg("table"), py::arg("ordering"));

  m.def(
      "literal_count",
      [](const data::Dataset &d, std::size_t depth, const std::string &model) {
        const auto v = io::parse_variant(model);
        const auto e = v == encode::Variant::bdd1   ? encode::encode_bdd1(d, depth)
                       : v == encode::Variant::bdd2 ? encode::encode_bdd2(d, depth)
                                                    : encode::encode_maxsat(d, depth);
        return cnf::literal_count(e.formula);
      },
      py::arg("data"), py::arg("depth"), py::arg("model") = "bdd2");

  py::class_<search::LearnedModel>(m, "Model")
      .def_property_readonly("ordering",
                             [](const search::LearnedModel &mm) {
                               return mm.ordering.features();
                             })
      .def_property_readonly("table",
                             [](const search::LearnedModel &mm) {
                               return mm.table.cells();
                             })
      .def_readonly("solver_table", &search::LearnedModel::solver_table)
      .def_readonly("bdd", &search::LearnedModel::bdd)
      .def_readonly("train_accuracy", &search::LearnedModel::train_accuracy)
      .def_readonly("optimal", &search::LearnedModel::optimal)
      .def_readonly("literal_count", &search::LearnedModel::literal_count)
      .def("predict",
           [](const search::LearnedModel &mm, const std::vector<std::uint8_t> &x) {
             return bdd::classify(mm.bdd, x);
           })
      .def("to_json",
           [](const search::LearnedModel &mm) { return io::to_json(mm).dump(2); });

  m.def("model_from_json", [](const std::string &text) {
    return io::model_from_json(io::json::parse(text));
  });

  m.def(
      "learn",
      [](const data::Dataset &d, std::size_t depth, const std::string &mode,
         const std::string &bias, bool preselect, double budget,
         std::uint64_t seed, const std::string &solver) {
        search::LearnConfig cfg;
        cfg.depth = depth;
        cfg.mode = io::parse_mode(mode);
        cfg.bias = post::parse_bias(bias);
        cfg.preselect.enabled = preselect;
        cfg.budget_seconds = budget;
        cfg.seed = seed;
        if (solver != "embedded")
          cfg.solver.external_command = solver;
        py::gil_scoped_release release;
        return search::learn(d, cfg);
      },
      py::arg("data"), py::arg("depth"), py::arg("mode") = "maxsat",
      py::arg("bias") = "S", py::arg("preselect") = false,
      py::arg("budget") = 900.0, py::arg("seed") = 0,
      py::arg("solver") = "embedded");

  m.def("evaluate", &search::evaluate, py::arg("model"), py::arg("test"));

  m.def(
      "min_depth",
      [](const data::Dataset &d, std::size_t h0, double budget) {
        search::LearnConfig cfg;
        cfg.mode = search::Mode::sat;
        cfg.budget_seconds = budget;
        search::MinDepthResult r;
        {
          py::gil_scoped_release release;
          r = search::min_depth(d, h0, cfg);
        }
        return py::make_tuple(r.depth, r.witness);
      },
      py::arg("data"), py::arg("h0") = 1, py::arg("budget") = 900.0);

  m.def("preselect_features", &search::preselect_features, py::arg("data"),
        py::arg("max_depth"), py::arg("min_leaf") = 1);
}
