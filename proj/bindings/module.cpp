#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sompca/errors.hpp"
#include "sompca/eval.hpp"
#include "sompca/io.hpp"
#include "sompca/trainer.hpp"
#include "sompca/tvp.hpp"

namespace py = pybind11;
using namespace sompca;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (M, I_1, ..., I_N) array -> M tensors. Row-major matches numpy C order.
std::vector<Tensor> tensors_from_array(const DoubleArray& samples) {
    if (samples.ndim() < 2)
        throw ArgumentError("samples must have shape (M, I_1, ..., I_N)");
    Shape shape;
    std::size_t per_sample = 1;
    for (py::ssize_t d = 1; d < samples.ndim(); ++d) {
        shape.push_back(static_cast<int>(samples.shape(d)));
        per_sample *= static_cast<std::size_t>(samples.shape(d));
    }
    const auto m = static_cast<std::size_t>(samples.shape(0));
    const double* src = samples.data();
    std::vector<Tensor> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> values(src + i * per_sample, src + (i + 1) * per_sample);
        out.emplace_back(shape, std::move(values));
    }
    return out;
}

py::array_t<double> array_from_samples(const std::vector<Tensor>& samples) {
    std::vector<py::ssize_t> dims;
    dims.push_back(static_cast<py::ssize_t>(samples.size()));
    for (int d : samples[0].shape()) dims.push_back(d);
    py::array_t<double> out(dims);
    double* dst = out.mutable_data();
    const std::size_t per_sample = samples[0].size();
    for (std::size_t i = 0; i < samples.size(); ++i)
        std::memcpy(dst + i * per_sample, samples[i].data(), per_sample * sizeof(double));
    return out;
}

TrainConfig make_config(const std::string& algo, int features, int iterations, int nu,
                        double epsilon) {
    const auto variant = variant_from_name(algo);
    if (!variant)
        throw ArgumentError("unknown algorithm '" + algo + "'");
    TrainConfig cfg;
    cfg.variant = *variant;
    cfg.features = features;
    cfg.iterations = iterations;
    cfg.nu = nu;
    cfg.convergence_epsilon = epsilon;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_sompca, m) {
    m.doc() = "Semi-orthogonal multilinear PCA: tensor-to-vector feature learning.";

    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<FileFormatError>(m, "FileFormatError", PyExc_IOError);

    py::class_<TvpModel>(m, "Model")
        .def_property_readonly("variant", [](const TvpModel& mdl) { return variant_name(mdl.variant); })
        .def_property_readonly("shape", [](const TvpModel& mdl) { return mdl.shape; })
        .def_property_readonly("nu", [](const TvpModel& mdl) { return mdl.nu; })
        .def_property_readonly("iterations", [](const TvpModel& mdl) { return mdl.iterations; })
        .def_property_readonly("num_features", &TvpModel::num_features)
        .def("scatters",
             [](const TvpModel& mdl) {
                 std::vector<double> out;
                 out.reserve(mdl.emps.size());
                 for (const auto& e : mdl.emps) out.push_back(e.scatter);
                 return out;
             },
             "Captured total scatter per feature, in training order.")
        .def("feature_order", &sort_features_by_scatter,
             "Feature indices sorted by captured scatter, descending.")
        .def("mode_vectors",
             [](const TvpModel& mdl, int p) {
                 if (p < 0 || p >= mdl.num_features())
                     throw ArgumentError("feature index out of range");
                 return mdl.emps[static_cast<std::size_t>(p)].vectors;
             },
             py::arg("p"), "Unit projection vectors of feature p, one per mode.")
        .def("project",
             [](const TvpModel& mdl, const DoubleArray& samples) {
                 const auto tensors = tensors_from_array(samples);
                 return Eigen::MatrixXd(tvp_project_all(tensors, mdl));
             },
             py::arg("samples"), "Project (M, I_1, ..., I_N) samples to an (M, P) feature matrix.")
        .def("save", [](const TvpModel& mdl, const std::string& path) { save_model(path, mdl); },
             py::arg("path"))
        .def_static("load", [](const std::string& path) { return load_model(path); },
                    py::arg("path"));

    m.def(
        "train",
        [](const DoubleArray& samples, const std::string& algo, int features, int iterations,
           int nu, double epsilon) {
            const auto tensors = tensors_from_array(samples);
            const TrainResult result =
                train(tensors, make_config(algo, features, iterations, nu, epsilon));
            py::list trace;
            for (const auto& e : result.trace.entries)
                trace.append(py::make_tuple(e.feature, e.sweep, e.scatter));
            return py::make_tuple(result.model, trace);
        },
        py::arg("samples"), py::arg("algo") = "so-mpca-rs", py::arg("features") = 0,
        py::arg("iterations") = 20, py::arg("nu") = 0, py::arg("epsilon") = 0.0,
        "Train a projection model; returns (model, trace) where trace rows are\n"
        "(feature, sweep, scatter). features=0 and nu=0 mean 'auto'.");

    m.def(
        "synth",
        [](int classes, int per_class, const Shape& shape, double separation, double noise,
           std::uint64_t seed) {
            const LabeledDataset data = data_synth(classes, per_class, shape, separation, noise, seed);
            py::array_t<int> labels(static_cast<py::ssize_t>(data.labels.size()));
            std::copy(data.labels.begin(), data.labels.end(), labels.mutable_data());
            return py::make_tuple(array_from_samples(data.samples), labels);
        },
        py::arg("classes"), py::arg("per_class"), py::arg("shape"), py::arg("separation") = 1.0,
        py::arg("noise") = 1.0, py::arg("seed") = 0,
        "Seeded synthetic labeled dataset; returns (samples, labels).");

    m.def("select_nu", &select_nu, py::arg("shape"),
          "Constrained mode: the highest-dimension mode, 1-based.");

    m.def(
        "max_features",
        [](const Shape& shape, const std::string& algo, std::optional<int> sample_count) {
            const auto variant = variant_from_name(algo);
            if (!variant)
                throw ArgumentError("unknown algorithm '" + algo + "'");
            return max_features(shape, *variant, sample_count);
        },
        py::arg("shape"), py::arg("algo"), py::arg("sample_count") = py::none(),
        "Upper bound on the number of extractable features.");

    m.def(
        "nn_classify",
        [](const Eigen::MatrixXd& gallery, const std::vector<int>& labels,
           const Eigen::VectorXd& query, int k) { return nn_classify(gallery, labels, query, k); },
        py::arg("gallery"), py::arg("labels"), py::arg("query"), py::arg("k") = 1,
        "Labels of the k nearest gallery rows by Euclidean distance.");

    m.def("recognition_rate", &recognition_rate, py::arg("predictions"), py::arg("truths"),
          py::arg("rank") = 1);

    m.def(
        "split_protocol",
        [](const DoubleArray& samples, const std::vector<int>& labels, const std::string& algo,
           int per_class_train, int repetitions, const std::vector<int>& feature_counts,
           const std::vector<int>& ranks, std::uint64_t seed, int iterations) {
            LabeledDataset data{tensors_from_array(samples), labels};
            TrainConfig cfg = make_config(algo, 0, iterations, 0, 0.0);
            const EvalReport report = run_split_protocol(data, cfg, per_class_train, repetitions,
                                                         feature_counts, ranks, seed);
            py::dict out;
            for (std::size_t pi = 0; pi < report.feature_counts.size(); ++pi)
                for (std::size_t ri = 0; ri < report.ranks.size(); ++ri) {
                    const RateCell& cell = report.cells[pi][ri];
                    py::dict entry;
                    entry["available"] = cell.available;
                    entry["mean"] = cell.mean;
                    entry["std"] = cell.stddev;
                    entry["per_rep"] = cell.per_rep;
                    out[py::make_tuple(report.feature_counts[pi], report.ranks[ri])] = entry;
                }
            return out;
        },
        py::arg("samples"), py::arg("labels"), py::arg("algo") = "so-mpca-rs",
        py::arg("per_class_train") = 1, py::arg("repetitions") = 10,
        py::arg("feature_counts") = std::vector<int>{1}, py::arg("ranks") = std::vector<int>{1},
        py::arg("seed") = 0, py::arg("iterations") = 20,
        "Random-split recognition rates keyed by (P, rank).");

    m.def("load_dataset",
          [](const std::string& path) {
              const LabeledDataset data = load_dataset(path);
              py::array_t<int> labels(static_cast<py::ssize_t>(data.labels.size()));
              std::copy(data.labels.begin(), data.labels.end(), labels.mutable_data());
              return py::make_tuple(array_from_samples(data.samples), labels);
          },
          py::arg("path"), "Read a TEN1 dataset; returns (samples, labels).");

    m.def("save_dataset",
          [](const std::string& path, const DoubleArray& samples, const std::vector<int>& labels) {
              save_dataset(path, LabeledDataset{tensors_from_array(samples), labels});
          },
          py::arg("path"), py::arg("samples"), py::arg("labels"));

    m.attr("__version__") = "0.1.0";
}
