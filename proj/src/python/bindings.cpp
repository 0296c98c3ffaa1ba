#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phylomst/cli_io.hpp"
#include "phylomst/cost_oracle.hpp"
#include "phylomst/errors.hpp"
#include "phylomst/exact_oracle.hpp"
#include "phylomst/geo_rw.hpp"
#include "phylomst/steiner_mst.hpp"
#include "phylomst/substitution.hpp"
#include "phylomst/synth.hpp"

namespace py = pybind11;
using namespace phylomst;

namespace {

auto to_python(const nlohmann::json& value) -> py::object {
  return py::module_::import("json").attr("loads")(value.dump());
}

auto rows(const std::vector<double>& flat, std::size_t k) -> std::vector<std::vector<double>> {
  auto out = std::vector<std::vector<double>>(k);
  for (auto i = std::size_t{0}; i < k; ++i) out[i].assign(flat.begin() + i * k, flat.begin() + (i + 1) * k);
  return out;
}

auto parse_mode(const std::string& mode) -> EdgeMode {
  if (mode == "independent") return EdgeMode::independent;
  if (mode == "shared-t" || mode == "shared_t") return EdgeMode::shared_t;
  fail(ErrorKind::parse, "mode must be 'independent' or 'shared-t'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Likelihood-derived tree costs and minimum-spanning-tree phylogeny inference";
  m.attr("__version__") = k_version;

  static py::exception<Error> error_type(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, (std::string{to_string(e.kind())} + ": " + e.what()).c_str());
    }
  });

  py::enum_<EdgeMode>(m, "EdgeMode")
      .value("independent", EdgeMode::independent)
      .value("shared_t", EdgeMode::shared_t);
  py::enum_<GeoPrecision>(m, "GeoPrecision")
      .value("estimated", GeoPrecision::estimated)
      .value("exact_scan", GeoPrecision::exact_scan);

  py::class_<SiteModel>(m, "SiteModel")
      .def_static("binary_symmetric", &SiteModel::binary_symmetric, py::arg("mu") = 1.0)
      .def_static("jc69", &SiteModel::jc69, py::arg("mu") = 1.0)
      .def_static("gtr", &SiteModel::gtr, py::arg("pi"), py::arg("exchangeability"),
                  "GTR model; `exchangeability` is the m x m matrix flattened row-major")
      .def_property_readonly("name", &SiteModel::name)
      .def_property_readonly("mu", &SiteModel::mu)
      .def_property_readonly("states", &SiteModel::states)
      .def_property_readonly("alphabet", &SiteModel::alphabet)
      .def_property_readonly("stationary", &SiteModel::stationary)
      .def_property_readonly("relaxation_rate", &SiteModel::relaxation_rate)
      .def("transition_prob", &SiteModel::transition_prob, py::arg("a"), py::arg("b"), py::arg("t"))
      .def("transition_matrix",
           [](const SiteModel& s, double t) { return rows(s.transition_matrix(t), s.states()); }, py::arg("t"))
      .def("__repr__", [](const SiteModel& s) { return "<SiteModel " + s.name() + ">"; });

  m.def(
      "sup_seq_loglik",
      [](const SiteModel& model, const std::string& x, const std::string& y) {
        const auto r = sup_seq_loglik(model, count_pairs(model.states(), model.encode(x), model.encode(y)));
        return py::make_tuple(r.t_star, r.cost);
      },
      py::arg("model"), py::arg("x"), py::arg("y"),
      "(t_star, cost) of the best duration between two aligned sequences; t_star is inf for limits");

  py::class_<GeoGraph>(m, "GeoGraph")
      .def(py::init([](int node_count, const std::vector<std::tuple<int, int, double>>& edges) {
             auto list = std::vector<GeoEdge>{};
             for (const auto& [u, v, w] : edges) list.push_back({u, v, w});
             return GeoGraph{node_count, list};
           }),
           py::arg("node_count"), py::arg("edges"))
      .def_property_readonly("node_count", &GeoGraph::node_count)
      .def_property_readonly("volume", &GeoGraph::volume)
      .def("degree", &GeoGraph::degree)
      .def_property_readonly("edges", [](const GeoGraph& g) {
        auto out = std::vector<std::tuple<int, int, double>>{};
        for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.weight);
        return out;
      });

  py::class_<SpectralInfo>(m, "SpectralInfo")
      .def_readonly("pi", &SpectralInfo::pi)
      .def_readonly("lambda_", &SpectralInfo::lambda)
      .def_readonly("ratio", &SpectralInfo::ratio);
  py::class_<GeoBounds>(m, "GeoBounds")
      .def(py::init([](double lower, double upper) { return GeoBounds{lower, upper}; }), py::arg("lower"),
           py::arg("upper"))
      .def_readonly("lower", &GeoBounds::lower)
      .def_readonly("upper", &GeoBounds::upper);

  py::class_<RandomWalk, std::shared_ptr<RandomWalk>>(m, "RandomWalk")
      .def(py::init<GeoGraph>(), py::arg("graph"))
      .def_property_readonly("spectral", &RandomWalk::spectral)
      .def_property_readonly("node_count", &RandomWalk::node_count)
      .def("stationary", &RandomWalk::stationary)
      .def("step_prob", &RandomWalk::step_prob)
      .def("scan", &RandomWalk::scan, py::arg("x"), py::arg("y"), py::arg("t_max"));

  m.def("rw_stationary", &rw_stationary);
  m.def("mixing_lambda", &mixing_lambda);
  m.def("cutoff_time", &cutoff_time, py::arg("spectral"), py::arg("eps1"), py::arg("b"));
  m.def("derive_bounds", &derive_bounds);
  m.def("sup_rw_additive", &sup_rw_additive, py::arg("walk"), py::arg("x"), py::arg("y"), py::arg("eps1"));
  m.def("sup_rw_multiplicative", &sup_rw_multiplicative, py::arg("walk"), py::arg("x"), py::arg("y"),
        py::arg("eps2"));
  m.def("neg_log_sup_rw", &neg_log_sup_rw, py::arg("walk"), py::arg("x"), py::arg("y"), py::arg("eps3"),
        py::arg("bounds"));
  m.def("neg_log_sup_rw_scan", &neg_log_sup_rw_scan, py::arg("walk"), py::arg("x"), py::arg("y"),
        py::arg("rel_tol") = 1e-13);
  m.def(
      "brute_force_sup_rw",
      [](const RandomWalk& walk, NodeId x, NodeId y, int t_max) {
        const auto r = brute_force_sup_rw(walk, x, y, t_max);
        return py::make_tuple(r.scan_max, r.zeta, r.tail_bound);
      },
      py::arg("walk"), py::arg("x"), py::arg("y"), py::arg("t_max"));

  py::class_<Sample>(m, "Sample")
      .def(py::init<std::string, std::string, std::optional<NodeId>>(), py::arg("id"), py::arg("sequence"),
           py::arg("location") = std::nullopt)
      .def_readwrite("id", &Sample::id)
      .def_readwrite("sequence", &Sample::sequence)
      .def_readwrite("location", &Sample::location)
      .def("__repr__", [](const Sample& s) { return "<Sample " + s.id + ">"; });

  py::class_<Geography>(m, "Geography")
      .def_readonly("bounds", &Geography::bounds)
      .def_readwrite("eps3", &Geography::eps3)
      .def_readwrite("precision", &Geography::precision);
  m.def("make_geography", &make_geography, py::arg("graph"), py::arg("eps3"),
        py::arg("precision") = GeoPrecision::estimated);

  py::class_<CostModel>(m, "CostModel")
      .def(py::init([](SiteModel site, std::optional<Geography> geo, EdgeMode mode) {
             return CostModel{std::move(site), std::move(geo), mode};
           }),
           py::arg("site"), py::arg("geo") = std::nullopt, py::arg("mode") = EdgeMode::independent)
      .def_readonly("site", &CostModel::site)
      .def_readonly("geo", &CostModel::geo)
      .def_readonly("mode", &CostModel::mode);

  py::class_<EdgeCost>(m, "EdgeCost")
      .def_readonly("phi", &EdgeCost::phi)
      .def_readonly("t_star", &EdgeCost::t_star)
      .def_readonly("sequence_part", &EdgeCost::sequence_part)
      .def_readonly("geo_part", &EdgeCost::geo_part);

  m.def("node_cost", py::overload_cast<const Sample&, const CostModel&>(&node_cost), py::arg("sample"),
        py::arg("model"));
  m.def("edge_cost", py::overload_cast<const Sample&, const Sample&, const CostModel&>(&edge_cost), py::arg("u"),
        py::arg("v"), py::arg("model"));

  py::class_<CostMatrix>(m, "CostMatrix")
      .def_readonly("ids", &CostMatrix::ids)
      .def_readonly("node_costs", &CostMatrix::node_costs)
      .def_property_readonly("weights", [](const CostMatrix& c) { return rows(c.weights, c.size()); })
      .def("weight", &CostMatrix::weight)
      .def("diagnostic", &CostMatrix::diagnostic)
      .def("__len__", &CostMatrix::size);
  m.def("build_cost_matrix", &build_cost_matrix, py::arg("samples"), py::arg("model"));

  py::class_<PhyloTree>(m, "PhyloTree")
      .def_readonly("ids", &PhyloTree::ids)
      .def_readonly("root", &PhyloTree::root)
      .def_readonly("parent", &PhyloTree::parent)
      .def_property_readonly("edges", [](const PhyloTree& t) {
        auto out = std::vector<std::pair<std::string, std::string>>{};
        for (const auto& e : t.edges) out.emplace_back(t.ids[e.u], t.ids[e.v]);
        return out;
      });

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("costs", &RunResult::costs)
      .def_readonly("tree", &RunResult::tree)
      .def_readonly("total_weight", &RunResult::total_weight)
      .def_readonly("tree_cost_directed", &RunResult::tree_cost_directed)
      .def_readonly("tree_cost_symmetric", &RunResult::tree_cost_symmetric)
      .def_readonly("newick", &RunResult::newick)
      .def_readonly("edges_tsv", &RunResult::edges_tsv)
      .def_property_readonly("report", [](const RunResult& r) { return to_python(r.report); });

  m.def("infer_tree", &infer_tree, py::arg("samples"), py::arg("model"), py::arg("root") = std::nullopt,
        "Build the cost matrix, take its minimum spanning tree and root it");

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& fasta, const std::string& model, double mu, const std::string& mode, double eps,
         std::optional<std::filesystem::path> locations, std::optional<std::filesystem::path> geo_graph,
         std::optional<std::string> root, std::optional<std::filesystem::path> out_newick,
         std::optional<std::filesystem::path> out_edges, std::optional<std::filesystem::path> out_report,
         std::uint64_t seed) {
        auto config = RunConfig{};
        config.fasta = fasta;
        config.model = parse_model_arg(model, mu);
        config.mode = parse_mode(mode);
        config.eps = eps;
        config.locations = std::move(locations);
        config.geo_graph = std::move(geo_graph);
        config.root = std::move(root);
        config.out_newick = std::move(out_newick);
        config.out_edges = std::move(out_edges);
        config.out_report = std::move(out_report);
        config.seed = seed;
        return run_pipeline(config);
      },
      py::arg("fasta"), py::kw_only(), py::arg("model") = "jc69", py::arg("mu") = 1.0,
      py::arg("mode") = "independent", py::arg("eps") = 0.1, py::arg("locations") = std::nullopt,
      py::arg("geo_graph") = std::nullopt, py::arg("root") = std::nullopt, py::arg("out_newick") = std::nullopt,
      py::arg("out_edges") = std::nullopt, py::arg("out_report") = std::nullopt, py::arg("seed") = 0);

  py::class_<Simulation>(m, "Simulation")
      .def_readonly("leaves", &Simulation::leaves)
      .def_property_readonly("internal", [](const Simulation& s) { return s.truth.labels(); })
      .def_property_readonly("truth", [](const Simulation& s) { return to_python(truth_json(s.truth)); });
  m.def(
      "simulate",
      [](int k, int sites, const SiteModel& model, std::shared_ptr<RandomWalk> walk, double duration_min,
         double duration_max, std::uint64_t seed) {
        return simulate(k, sites, model, walk.get(), {duration_min, duration_max}, seed);
      },
      py::arg("k"), py::arg("n"), py::arg("model"), py::arg("walk") = nullptr, py::arg("duration_min") = 0.1,
      py::arg("duration_max") = 1.0, py::arg("seed") = 1);
}
