// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sharpv/core_math.hpp"
#include "sharpv/error.hpp"
#include "sharpv/harness.hpp"
#include "sharpv/memory_pruner.hpp"
#include "sharpv/synthetic.hpp"
#include "sharpv/tensor_io.hpp"
#include "sharpv/visual_pruner.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    return {a.data(), a.data() + a.size()};
}

Array vector_array(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Array grid_array(const sharpv::ScoreGrid& g) {
    Array out({static_cast<py::ssize_t>(g.frames()), static_cast<py::ssize_t>(g.tokens_per_frame())});
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

sharpv::ScoreGrid array_grid(const Array& a) {
    if (a.ndim() != 2) {
        throw sharpv::ShapeError("expected a 2-D (frames, tokens) array");
    }
    return {static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)), to_vector(a)};
}

sharpv::VideoTokens array_video(const Array& a) {
    if (a.ndim() != 3) {
        throw sharpv::ShapeError("expected a 3-D (frames, tokens, dim) array");
    }
    const auto n = static_cast<std::size_t>(a.shape(0));
    const auto f = static_cast<std::size_t>(a.shape(1));
    const auto d = static_cast<std::size_t>(a.shape(2));
    return {n, f, sharpv::Mat(n * f, d, to_vector(a))};
}

Array video_array(const sharpv::VideoTokens& v) {
    Array out({static_cast<py::ssize_t>(v.frames()), static_cast<py::ssize_t>(v.tokens_per_frame()),
               static_cast<py::ssize_t>(v.dim())});
    std::copy(v.data().values().begin(), v.data().values().end(), out.mutable_data());
    return out;
}

Array mat_array(const sharpv::Mat& m) {
    Array out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

sharpv::Mat array_mat(const Array& a) {
    if (a.ndim() != 2) {
        throw sharpv::ShapeError("expected a 2-D array");
    }
    return {static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)), to_vector(a)};
}

py::object json_to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json python_to_json(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_sharpv, m) {
    m.doc() = "Training-free visual token and KV-cache pruning";

    py::register_exception<sharpv::ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<sharpv::ValueError>(m, "ValueError", PyExc_ValueError);
    py::register_exception<sharpv::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<sharpv::InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    py::register_exception<sharpv::IoError>(m, "IoError", PyExc_IOError);
    py::register_exception<sharpv::TensorIoError>(m, "TensorIoError", PyExc_IOError);

    py::enum_<sharpv::PruneMode>(m, "PruneMode")
        .value("adaptive", sharpv::PruneMode::adaptive)
        .value("manual", sharpv::PruneMode::manual);

    py::class_<sharpv::DecoderConfig>(m, "DecoderConfig")
        .def(py::init<>())
        .def_readwrite("layers", &sharpv::DecoderConfig::layers)
        .def_readwrite("model_dim", &sharpv::DecoderConfig::model_dim)
        .def_readwrite("heads", &sharpv::DecoderConfig::heads)
        .def_readwrite("mlp_dim", &sharpv::DecoderConfig::mlp_dim)
        .def_readwrite("vocab", &sharpv::DecoderConfig::vocab)
        .def_readwrite("max_positions", &sharpv::DecoderConfig::max_positions)
        .def_readwrite("seed", &sharpv::DecoderConfig::seed)
        .def_readwrite("residual_scale", &sharpv::DecoderConfig::residual_scale);

    m.def("l2_normalize", [](const Array& v) { return vector_array(sharpv::l2_normalize(to_vector(v)).values()); });
    m.def("dissim", [](const Array& a, const Array& b) { return sharpv::dissim(to_vector(a), to_vector(b)); });
    m.def("cosine_sim", [](const Array& a, const Array& b) { return sharpv::cosine_sim(to_vector(a), to_vector(b)); });

    m.def("spatial_importance", [](const Array& video) { return grid_array(sharpv::spatial_importance(array_video(video))); },
          py::arg("video"));
    m.def("temporal_importance",
          [](const Array& video) { return grid_array(sharpv::temporal_importance(array_video(video))); },
          py::arg("video"));
    m.def("frame_thresholds",
          [](const Array& spatial, const Array& temporal) {
              return vector_array(sharpv::frame_thresholds(array_grid(spatial), array_grid(temporal)));
          },
          py::arg("spatial"), py::arg("temporal"));
    m.def("select_topk", [](const Array& scores, std::size_t k) { return sharpv::select_topk(to_vector(scores), k); },
          py::arg("scores"), py::arg("keep_count"));

    m.def(
        "prune_video",
        [](const Array& video, double w, const std::string& mode, double k) {
            sharpv::PruneConfig config;
            config.w = w;
            config.k = k;
            if (mode == "adaptive") {
                config.mode = sharpv::PruneMode::adaptive;
            } else if (mode == "manual") {
                config.mode = sharpv::PruneMode::manual;
            } else {
                throw sharpv::ConfigError("mode must be 'adaptive' or 'manual'");
            }
            const sharpv::PruneResult r = sharpv::prune_video(array_video(video), config);
            py::list origin;
            for (const auto& o : r.pruned.origin) {
                origin.append(py::make_tuple(o.frame, o.index));
            }
            py::dict out;
            out["tokens"] = mat_array(r.pruned.tokens);
            out["origin"] = origin;
            out["vr"] = r.pruned.vr;
            out["thresholds"] = r.plan.thresholds;
            out["keep_counts"] = r.plan.keep_counts;
            out["kept_indices"] = r.plan.kept_indices;
            out["spatial"] = grid_array(r.importance.spatial);
            out["temporal"] = grid_array(r.importance.temporal);
            out["combined"] = grid_array(r.importance.combined);
            return out;
        },
        py::arg("video"), py::arg("w") = 1.0, py::arg("mode") = "adaptive", py::arg("k") = 1.6);

    m.def(
        "gen_synthetic_video",
        [](std::size_t n, std::size_t f, std::size_t d, const std::string& pattern, double rate,
           const std::vector<std::size_t>& burst_frames, std::uint64_t seed) {
            sharpv::SyntheticVideoSpec spec;
            spec.frames = n;
            spec.tokens_per_frame = f;
            spec.dim = d;
            spec.seed = seed;
            spec.pattern = sharpv::parse_pattern(pattern, rate, burst_frames, n);
            return video_array(sharpv::gen_synthetic_video(spec));
        },
        py::arg("n"), py::arg("f"), py::arg("d"), py::arg("pattern") = "static", py::arg("rate") = 0.1,
        py::arg("burst_frames") = std::vector<std::size_t>{}, py::arg("seed") = 42);

    m.def(
        "degradation_profile",
        [](const Array& trace, const Array& original, std::size_t system_len, std::size_t visual_len,
           std::size_t instruction_len) {
            if (trace.ndim() != 3) {
                throw sharpv::ShapeError("trace must be (layers, total_len, dim)");
            }
            const auto layers = static_cast<std::size_t>(trace.shape(0));
            const auto rows = static_cast<std::size_t>(trace.shape(1));
            const auto cols = static_cast<std::size_t>(trace.shape(2));
            std::vector<sharpv::Mat> mats;
            for (std::size_t l = 0; l < layers; ++l) {
                const double* p = trace.data() + l * rows * cols;
                mats.emplace_back(rows, cols, std::vector<double>(p, p + rows * cols));
            }
            const auto spans = sharpv::SegmentedSequence::from_lengths(system_len, visual_len, instruction_len);
            return sharpv::degradation_profile(mats, array_mat(original), spans).per_layer_sim;
        },
        py::arg("trace"), py::arg("original"), py::arg("system_len"), py::arg("visual_len"),
        py::arg("instruction_len"));

    m.def(
        "discard_decision",
        [](const std::vector<double>& profile, double threshold) {
            return sharpv::discard_decision({profile}, threshold).per_layer;
        },
        py::arg("profile"), py::arg("m"));

    m.def(
        "run",
        [](const py::object& config) {
            sharpv::HarnessConfig cfg;
            if (!config.is_none()) {
                sharpv::apply_json(cfg, python_to_json(config));
            }
            const sharpv::PipelineOutput out = sharpv::run_harness(cfg);
            return json_to_python(sharpv::report_to_json(out, cfg));
        },
        py::arg("config") = py::none(),
        "Run the full pipeline from a config dict (same keys as the CLI JSON config); returns the report dict.");

    m.def("read_tensor", [](const std::string& path) { return video_array(sharpv::read_tensor_file(path)); },
          py::arg("path"));
    m.def("write_tensor",
          [](const std::string& path, const Array& video) { sharpv::write_tensor_file(path, array_video(video)); },
          py::arg("path"), py::arg("video"));
}
