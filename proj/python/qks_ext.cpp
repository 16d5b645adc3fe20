#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qks/core.hpp"
#include "qks/error.hpp"
#include "qks/estimator.hpp"
#include "qks/experiment.hpp"
#include "qks/oracle.hpp"
#include "qks/sampler.hpp"
#include "qks/scheme.hpp"
#include "qks/weight_tree.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<qks::Point> to_points(const Array& a) {
  if (a.ndim() == 1) {
    std::vector<qks::Point> out;
    for (py::ssize_t i = 0; i < a.shape(0); ++i) out.push_back({a.at(i)});
    return out;
  }
  if (a.ndim() != 2) throw py::value_error("expected an (N, d) array");
  const auto rows = a.unchecked<2>();
  std::vector<qks::Point> out(static_cast<std::size_t>(rows.shape(0)));
  for (py::ssize_t i = 0; i < rows.shape(0); ++i) {
    for (py::ssize_t j = 0; j < rows.shape(1); ++j) out[i].push_back(rows(i, j));
  }
  return out;
}

Array to_array(std::span<const double> flat, std::size_t rows, std::size_t cols) {
  Array out({rows, cols});
  std::copy(flat.begin(), flat.end(), out.mutable_data());
  return out;
}

qks::CenterSet to_centers(const Array& a) { return qks::CenterSet(to_points(a)); }

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json py_to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_qks, m) {
  m.doc() = "k-means approximation scheme with emulated noisy distance oracles";

  py::register_exception<qks::Error>(m, "QksError", PyExc_RuntimeError);

  py::class_<qks::Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", py::overload_cast<>(&qks::Rng::uniform))
      .def("index", &qks::Rng::index)
      .def_property_readonly("seed", &qks::Rng::seed);

  py::enum_<qks::OracleMode>(m, "OracleMode")
      .value("exact", qks::OracleMode::exact)
      .value("deterministic_delta", qks::OracleMode::deterministic_delta)
      .value("stochastic", qks::OracleMode::stochastic);

  py::class_<qks::OracleConfig>(m, "OracleConfig")
      .def(py::init<>())
      .def_readwrite("mode", &qks::OracleConfig::mode)
      .def_readwrite("eps_rel", &qks::OracleConfig::eps_rel)
      .def_readwrite("delta_fail", &qks::OracleConfig::delta_fail)
      .def_readwrite("oracle_seed", &qks::OracleConfig::oracle_seed)
      .def("validate", &qks::OracleConfig::validate)
      .def_static("exact", &qks::OracleConfig::exact)
      .def_static("deterministic_delta", &qks::OracleConfig::deterministic_delta, py::arg("delta"),
                  py::arg("seed") = 0)
      .def_static("stochastic", &qks::OracleConfig::stochastic, py::arg("eps_rel"), py::arg("delta_fail"),
                  py::arg("seed") = 0);

  py::class_<qks::Dataset>(m, "Dataset")
      .def_property_readonly("n", &qks::Dataset::size)
      .def_property_readonly("dim", &qks::Dataset::dim)
      .def_property_readonly("eta", &qks::Dataset::eta)
      .def_property_readonly("scale", &qks::Dataset::scale)
      .def_property_readonly("points",
                             [](const qks::Dataset& d) { return to_array(d.coords(), d.size(), d.dim()); });

  m.def("normalize_dataset", [](const Array& raw) { return qks::normalize_dataset(to_points(raw)); },
        py::arg("points"));
  m.def("aspect_ratio", &qks::aspect_ratio);
  m.def("euclidean_distance",
        [](const std::vector<double>& p, const std::vector<double>& q) { return qks::euclidean_distance(p, q); });
  m.def("centroid", [](const Array& pts) { return qks::centroid(to_points(pts)); });
  m.def("exact_cost", [](const qks::Dataset& d, const Array& c) { return qks::exact_cost(d, to_centers(c)); },
        py::arg("data"), py::arg("centers"));

  py::class_<qks::WeightTree>(m, "WeightTree")
      .def(py::init([](const std::vector<double>& w) { return qks::WeightTree(w); }), py::arg("weights"))
      .def("update", &qks::WeightTree::update)
      .def("sample", &qks::WeightTree::sample)
      .def("leaf_probability", &qks::WeightTree::leaf_probability)
      .def("weight", &qks::WeightTree::weight)
      .def_property_readonly("total", &qks::WeightTree::total)
      .def("__len__", &qks::WeightTree::size);

  m.def(
      "d2_distribution",
      [](const qks::Dataset& d, const Array& centers, const qks::OracleConfig& cfg, qks::Rng& rng) {
        const qks::DistanceOracle oracle(cfg, d.eta());
        qks::CenterSet c = centers.size() == 0 ? qks::CenterSet(d.dim()) : to_centers(centers);
        return qks::d2_distribution(d, c, oracle, rng).probs;
      },
      py::arg("data"), py::arg("centers"), py::arg("oracle"), py::arg("rng"));

  m.def(
      "pseudo_approx_seed",
      [](const qks::Dataset& d, std::size_t k, const qks::OracleConfig& cfg, qks::Rng& rng) {
        const qks::DistanceOracle oracle(cfg, d.eta());
        const auto r = qks::pseudo_approx_seed(d, k, oracle, rng);
        py::dict out;
        out["centers"] = to_array(r.centers.coords(), r.centers.size(), d.dim());
        out["indices"] = r.indices;
        out["proposals"] = r.proposals;
        return out;
      },
      py::arg("data"), py::arg("k"), py::arg("oracle"), py::arg("rng"));

  m.def("sample_count_m", &qks::sample_count_m, py::arg("eta"), py::arg("list_size"), py::arg("eps"));
  m.def(
      "estimate_cost",
      [](const qks::Dataset& d, const Array& centers, std::uint64_t m_samples, const qks::OracleConfig& cfg,
         qks::Rng& rng) {
        const qks::DistanceOracle oracle(cfg, d.eta());
        return qks::estimate_cost(d, to_centers(centers), m_samples, oracle, rng).alpha_m;
      },
      py::arg("data"), py::arg("centers"), py::arg("m"), py::arg("oracle"), py::arg("rng"));

  m.def("count_disjoint_tuples", &qks::count_disjoint_tuples, py::arg("n"), py::arg("k"), py::arg("tau"));
  m.def(
      "enumerate_disjoint_tuples",
      [](std::size_t n, std::size_t k, std::size_t tau) {
        std::vector<std::vector<std::size_t>> out;
        qks::enumerate_disjoint_tuples(n, k, tau, [&](std::span<const std::size_t> members) {
          out.emplace_back(members.begin(), members.end());
        });
        return out;
      },
      py::arg("n"), py::arg("k"), py::arg("tau"));

  m.def(
      "brute_force_opt",
      [](const qks::Dataset& d, std::size_t k, double max_partitions) {
        const auto r = qks::brute_force_opt(d, k, {max_partitions});
        py::dict out;
        out["cost"] = r.cost;
        out["centers"] = to_array(r.centers.coords(), r.centers.size(), d.dim());
        out["assignment"] = r.assignment;
        return out;
      },
      py::arg("data"), py::arg("k"), py::arg("max_partitions") = 2.0e7);

  m.def(
      "solve",
      [](const qks::Dataset& d, std::size_t k, double eps, const qks::OracleConfig& cfg, std::uint64_t seed,
         const std::string& preset) {
        const auto params = qks::SchemeParams::from_preset(qks::parse_preset(preset), k, eps);
        const auto r = qks::solve(d, params, cfg, seed);
        py::dict report;
        report["final_cost"] = r.report.final_cost;
        report["best_list_cost"] = r.report.best_list_cost;
        report["list_size"] = r.report.list_size;
        report["m"] = r.report.m;
        report["selected_index"] = r.report.selected_index;
        report["seed_indices"] = r.report.seed_indices;
        return py::make_tuple(to_array(r.centers.coords(), r.centers.size(), d.dim()), report);
      },
      py::arg("data"), py::arg("k"), py::arg("eps"), py::arg("oracle"), py::arg("seed"),
      py::arg("preset") = "desk");

  m.def(
      "run_experiment",
      [](const py::object& config) { return json_to_py(qks::run_experiment(py_to_json(config).get<qks::RunConfig>())); },
      py::arg("config"));
}
