#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qurate/commands.hpp"
#include "qurate/config.hpp"
#include "qurate/demo.hpp"
#include "qurate/evaluation.hpp"
#include "qurate/qubo.hpp"
#include "qurate/reliability.hpp"
#include "qurate/textfeat.hpp"

namespace py = pybind11;
using namespace qurate;

namespace {

textfeat::SparseVector sparse_from_pairs(
    const std::vector<std::pair<size_t, double>>& entries, size_t dimension) {
  textfeat::SparseVector v;
  v.entries = entries;
  v.dimension = dimension;
  return v;
}

qubo::FrameCandidates frame_from_dense(
    const std::string& name, const std::vector<std::string>& ids,
    const std::vector<double>& reliabilities,
    const std::vector<std::vector<double>>& similarity) {
  qubo::FrameCandidates fc;
  fc.frame = name;
  fc.ids = ids;
  fc.reliabilities = reliabilities;
  fc.similarity = textfeat::SimilarityMatrix(similarity.size());
  for (size_t i = 0; i < similarity.size(); ++i) {
    if (similarity[i].size() != similarity.size())
      throw std::invalid_argument("similarity matrix must be square");
    for (size_t j = 0; j < similarity.size(); ++j) {
      fc.similarity.set(i, j, similarity[i][j]);
    }
  }
  return fc;
}

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, long long seed, unsigned workers,
                bool mock, const std::string& method) {
  cli::RunConfig config = config_path.empty() ? cli::default_config()
                                              : cli::load_config(config_path);
  if (seed >= 0) config.seed = uint64_t(seed);
  if (workers > 0) config.workers = workers;
  if (mock) config.mock.enabled = true;
  if (command == "demo") return cli::cmd_demo(config, out_dir);
  if (command == "annotate") return cli::cmd_annotate(config, out_dir);
  if (command == "score") return cli::cmd_score(config, out_dir);
  if (command == "select") {
    auto m = method == "distmatch" ? eval::Method::distmatch
                                   : eval::Method::qubo;
    return cli::cmd_select(config, out_dir, m);
  }
  if (command == "sweep") return cli::cmd_sweep(config, out_dir);
  if (command == "transfer") return cli::cmd_transfer(config, out_dir);
  throw std::invalid_argument("unknown command: " + command);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reliability-guided curation of weakly annotated text via "
            "per-frame QUBO subset selection";

  // text features
  m.def("tokenize", &textfeat::tokenize, py::arg("text"));

  py::class_<textfeat::Vocabulary>(m, "Vocabulary")
      .def_readonly("tokens", &textfeat::Vocabulary::tokens)
      .def_readonly("doc_frequency", &textfeat::Vocabulary::doc_frequency)
      .def_readonly("idf", &textfeat::Vocabulary::idf)
      .def_readonly("doc_count", &textfeat::Vocabulary::doc_count)
      .def("__len__", &textfeat::Vocabulary::size);

  py::class_<textfeat::SparseVector>(m, "SparseVector")
      .def(py::init(&sparse_from_pairs), py::arg("entries"),
           py::arg("dimension"))
      .def_readonly("entries", &textfeat::SparseVector::entries)
      .def_readonly("dimension", &textfeat::SparseVector::dimension)
      .def("norm", &textfeat::SparseVector::norm)
      .def("dot", &textfeat::SparseVector::dot);

  py::class_<textfeat::SimilarityMatrix>(m, "SimilarityMatrix")
      .def("__len__", &textfeat::SimilarityMatrix::size)
      .def("at", &textfeat::SimilarityMatrix::at);

  m.def("fit_tfidf", &textfeat::fit_tfidf, py::arg("corpus"),
        py::arg("min_df") = 1, py::arg("max_features") = 20000);
  m.def("transform", &textfeat::transform, py::arg("vocab"),
        py::arg("tokens"));
  m.def("bow_features", &textfeat::bow_features, py::arg("vocab"),
        py::arg("tokens"));
  m.def("cosine_matrix", &textfeat::cosine_matrix, py::arg("vectors"));
  m.def("mean_pairwise_similarity", &textfeat::mean_pairwise_similarity,
        py::arg("matrix"), py::arg("subset"));

  // QUBO selection
  py::class_<qubo::FrameCandidates>(m, "FrameCandidates")
      .def(py::init(&frame_from_dense), py::arg("frame"), py::arg("ids"),
           py::arg("reliabilities"), py::arg("similarity"))
      .def_readonly("frame", &qubo::FrameCandidates::frame)
      .def_readonly("ids", &qubo::FrameCandidates::ids)
      .def_readonly("reliabilities", &qubo::FrameCandidates::reliabilities)
      .def("__len__", &qubo::FrameCandidates::size);

  py::class_<qubo::QuboParams>(m, "QuboParams")
      .def(py::init([](double lambda_rel, double lambda_red, size_t budget) {
             return qubo::QuboParams{lambda_rel, lambda_red, budget};
           }),
           py::arg("lambda_rel") = 1.0, py::arg("lambda_red") = 1.0,
           py::arg("budget") = 50)
      .def_readwrite("lambda_rel", &qubo::QuboParams::lambda_rel)
      .def_readwrite("lambda_red", &qubo::QuboParams::lambda_red)
      .def_readwrite("budget", &qubo::QuboParams::budget);

  py::class_<qubo::AnnealSchedule>(m, "AnnealSchedule")
      .def(py::init([](double initial_temperature, double cooling_factor,
                       int64_t iterations, uint64_t seed, int64_t log_stride) {
             return qubo::AnnealSchedule{initial_temperature, cooling_factor,
                                         iterations, seed, log_stride};
           }),
           py::arg("initial_temperature") = 1.0,
           py::arg("cooling_factor") = 0.9995, py::arg("iterations") = 50000,
           py::arg("seed") = 0, py::arg("log_stride") = 100)
      .def_readwrite("initial_temperature",
                     &qubo::AnnealSchedule::initial_temperature)
      .def_readwrite("cooling_factor", &qubo::AnnealSchedule::cooling_factor)
      .def_readwrite("iterations", &qubo::AnnealSchedule::iterations)
      .def_readwrite("seed", &qubo::AnnealSchedule::seed)
      .def_readwrite("log_stride", &qubo::AnnealSchedule::log_stride);

  py::class_<qubo::TrajectoryPoint>(m, "TrajectoryPoint")
      .def_readonly("iteration", &qubo::TrajectoryPoint::iteration)
      .def_readonly("energy", &qubo::TrajectoryPoint::energy)
      .def_readonly("hamming_frac", &qubo::TrajectoryPoint::hamming_frac)
      .def_readonly("mean_reliability",
                    &qubo::TrajectoryPoint::mean_reliability)
      .def_readonly("mean_redundancy", &qubo::TrajectoryPoint::mean_redundancy)
      .def_readonly("temperature", &qubo::TrajectoryPoint::temperature);

  py::class_<qubo::SelectionState>(m, "SelectionState")
      .def_readonly("selected", &qubo::SelectionState::selected)
      .def_readonly("energy", &qubo::SelectionState::energy);

  py::class_<qubo::AnnealResult>(m, "AnnealResult")
      .def_readonly("best", &qubo::AnnealResult::best)
      .def_readonly("trajectory", &qubo::AnnealResult::trajectory)
      .def_readonly("hamming_frac", &qubo::AnnealResult::hamming_frac)
      .def_readonly("boundary_collapsed",
                    &qubo::AnnealResult::boundary_collapsed);

  m.def("energy", &qubo::energy, py::arg("selected"), py::arg("frame"),
        py::arg("params"));
  m.def("delta_energy_swap", &qubo::delta_energy_swap, py::arg("selected"),
        py::arg("frame"), py::arg("params"), py::arg("out_idx"),
        py::arg("in_idx"));
  m.def(
      "anneal",
      [](const qubo::FrameCandidates& frame, const qubo::QuboParams& p,
         const qubo::AnnealSchedule& schedule,
         const std::vector<size_t>& warm_start) {
        return qubo::anneal(frame, p, schedule, warm_start);
      },
      py::arg("frame"), py::arg("params"), py::arg("schedule"),
      py::arg("warm_start"));
  m.def("brute_force_select", &qubo::brute_force_select, py::arg("frame"),
        py::arg("params"), py::arg("enumeration_cap") = 2000000);

  // metrics
  m.def("macro_f1", &eval::macro_f1, py::arg("predictions"), py::arg("golds"),
        py::arg("classes"));
  m.def("pareto_frontier", &eval::pareto_frontier, py::arg("points"));

  // pipeline commands, mirroring the qurate CLI
  m.def("run_command", &run_command, py::arg("command"),
        py::arg("config") = std::string(), py::arg("out") = std::string(),
        py::arg("seed") = -1, py::arg("workers") = 0, py::arg("mock") = false,
        py::arg("method") = std::string("qubo"));
  m.def("default_config_json",
        [] { return cli::config_to_json(cli::default_config()); });

  m.attr("__version__") = qurate::cli::kVersion;
}
