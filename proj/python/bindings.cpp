#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsenav/analysis.hpp"
#include "sparsenav/config.hpp"
#include "sparsenav/errors.hpp"
#include "sparsenav/harness.hpp"
#include "sparsenav/io.hpp"
#include "sparsenav/memory.hpp"
#include "sparsenav/steering.hpp"
#include "sparsenav/version.hpp"

namespace py = pybind11;
using namespace sparsenav;

namespace {

using Pixels = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

InputVector to_input(const Pixels& a) {
  const auto* p = a.data();
  return InputVector(p, p + a.size());
}

// Bits unpacked to a 0/1 uint8 array, pixels copied as they are.
py::array_t<std::uint8_t> to_numpy(const HashVector& h) {
  if (const auto* bits = std::get_if<BitVector>(&h)) {
    py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(bits->size()));
    auto* p = out.mutable_data();
    for (std::size_t i = 0; i < bits->size(); ++i) p[i] = bits->test(i) ? 1 : 0;
    return out;
  }
  const auto& px = std::get<InputVector>(h);
  py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(px.size()));
  std::copy(px.begin(), px.end(), out.mutable_data());
  return out;
}

HashVector from_numpy(const Pixels& a, Metric metric) {
  if (metric == Metric::Euclidean) return to_input(a);
  BitVector bits(static_cast<std::size_t>(a.size()));
  const auto* p = a.data();
  for (py::ssize_t i = 0; i < a.size(); ++i) {
    if (p[i] != 0) bits.set(static_cast<std::size_t>(i));
  }
  return bits;
}

template <typename Array>
py::array_t<std::uint8_t> image(const Array& a, py::ssize_t side) {
  py::array_t<std::uint8_t> out({side, side});
  std::copy(a.begin(), a.end(), out.mutable_data());
  return out;
}

py::dict record_dict(const TrialRecord& rec) {
  auto poses = [](const std::vector<TimedPose>& tr) {
    py::array_t<double> out({static_cast<py::ssize_t>(tr.size()), py::ssize_t{4}});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const auto r = static_cast<py::ssize_t>(i);
      m(r, 0) = tr[i].t;
      m(r, 1) = tr[i].pose.x;
      m(r, 2) = tr[i].pose.y;
      m(r, 3) = tr[i].pose.heading;
    }
    return out;
  };
  py::dict d;
  d["final_distance"] = rec.final_distance;
  d["success"] = rec.success;
  d["collided"] = rec.collided;
  d["seed"] = rec.seed;
  d["train_trajectory"] = poses(rec.train_trajectory);
  d["test_trajectory"] = poses(rec.test_trajectory);
  d["ops"] = rec.ops;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse-hash visual route following: encoders, analysis and the simulated trial harness";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);

  py::enum_<Model>(m, "Model")
      .value("FlyHash", Model::FlyHash)
      .value("ConvLSH", Model::ConvLSH)
      .value("PerfectMemory", Model::PerfectMemory);
  m.def("parse_model", [](const std::string& s) { return parse_model(s); });

  py::class_<OpCounts>(m, "OpCounts")
      .def(py::init<>())
      .def_readonly("encode_mults", &OpCounts::encode_mults)
      .def_readonly("encode_adds", &OpCounts::encode_adds)
      .def_readonly("encode_kwta", &OpCounts::encode_kwta)
      .def_readonly("eval_xor", &OpCounts::eval_xor)
      .def_readonly("eval_square_mults", &OpCounts::eval_square_mults)
      .def_readonly("eval_adds", &OpCounts::eval_adds)
      .def(py::self == py::self)
      .def("__repr__", [](const OpCounts& o) {
        return "OpCounts(encode_mults=" + std::to_string(o.encode_mults) + ", encode_adds=" +
               std::to_string(o.encode_adds) + ", encode_kwta=" + std::to_string(o.encode_kwta) +
               ", eval_xor=" + std::to_string(o.eval_xor) + ", eval_square_mults=" +
               std::to_string(o.eval_square_mults) + ", eval_adds=" + std::to_string(o.eval_adds) + ")";
      });

  py::class_<EncoderConfig>(m, "EncoderConfig")
      .def(py::init([](Model model, std::size_t n_pn, std::size_t n_kc, double kappa, double theta,
                       std::uint64_t seed, bool fixed_fanout) {
             EncoderConfig c{model, n_pn, n_kc, kappa, theta, seed, fixed_fanout};
             c.validate();
             return c;
           }),
           py::arg("model") = Model::FlyHash, py::arg("n_pn") = 726, py::arg("n_kc") = 2000,
           py::arg("kappa") = 0.1, py::arg("theta") = 10.0 / 726.0, py::arg("seed") = 0,
           py::arg("fixed_fanout") = false)
      .def_readonly("model", &EncoderConfig::model)
      .def_readonly("n_pn", &EncoderConfig::n_pn)
      .def_readonly("n_kc", &EncoderConfig::n_kc)
      .def_readonly("kappa", &EncoderConfig::kappa)
      .def_readonly("theta", &EncoderConfig::theta)
      .def_readonly("seed", &EncoderConfig::seed)
      .def_readonly("fixed_fanout", &EncoderConfig::fixed_fanout)
      .def_property_readonly("k", &EncoderConfig::k)
      .def_property_readonly("output_dim", &EncoderConfig::output_dim);

  py::class_<Encoder>(m, "Encoder")
      .def(py::init<EncoderConfig>())
      .def_property_readonly("config", &Encoder::config)
      .def("encode", [](const Encoder& e, const Pixels& x) { return to_numpy(e.encode(to_input(x))); },
           py::arg("x"))
      .def("encode_counted",
           [](const Encoder& e, const Pixels& x) {
             OpCounts ops;
             auto code = to_numpy(e.encode(to_input(x), &ops));
             return py::make_tuple(code, ops);
           },
           py::arg("x"))
      .def("save_matrix", [](const Encoder& e, const std::string& path) { save_matrix(path, e.matrix()); });

  m.def(
      "dissimilarity",
      [](const Pixels& a, const Pixels& b, Model model) {
        const Metric metric = metric_for(model);
        return dissimilarity(from_numpy(a, metric), from_numpy(b, metric), metric);
      },
      py::arg("a"), py::arg("b"), py::arg("model"));
  m.def(
      "novelty",
      [](const Encoder& e, const std::vector<Pixels>& memories, const Pixels& x) {
        const EncoderConfig& c = e.config();
        MemoryStore store(metric_for(c.model), c.output_dim());
        for (const Pixels& p : memories) store.store_item(e.encode(to_input(p)));
        const NoveltyResult r = evaluate_novelty(store, to_input(x), e);
        return py::make_tuple(r.d, r.argmin_index);
      },
      py::arg("encoder"), py::arg("memories"), py::arg("x"),
      "Encodes the memories and the query, returns (d, argmin index).");

  m.def(
      "compute_turn",
      [](double dl, double dr, double alpha) { return compute_turn(dl, dr, {alpha, 0.2}).omega; },
      py::arg("d_left"), py::arg("d_right"), py::arg("alpha") = 1.0);

  m.def("bernoulli_entropy", &bernoulli_entropy, py::arg("kappa"));
  m.def("compression_lower_bound", &compression_lower_bound, py::arg("n_kc"), py::arg("kappa"));
  m.def("memory_capacity", &memory_capacity, py::arg("n_kc"), py::arg("kappa"), py::arg("p_error"));
  m.def("csr_bits", &csr_bits, py::arg("n_kc"));
  m.def(
      "storage_size",
      [](Model model, std::size_t n_pn, std::size_t n_kc, std::size_t n_items) {
        const StorageReport r = storage_size(model, n_pn, n_kc, n_items);
        py::dict d;
        d["w_bits"] = r.w_bits;
        d["y_bits"] = r.y_bits;
        d["n_items"] = r.n_items;
        d["total_bits"] = r.total_bits;
        return d;
      },
      py::arg("model"), py::arg("n_pn"), py::arg("n_kc"), py::arg("n_items") = 1);
  m.def("op_counts", &op_counts, py::arg("model"), py::arg("n_pn"), py::arg("n_kc"), py::arg("kappa"),
        py::arg("fanout") = 10);

  m.def(
      "render_reference",
      [](double x, double y, double heading) {
        const RawView raw = render(reference_arena(), {x, y, heading});
        const ProcessedView view = preprocess(raw);
        py::dict d;
        d["raw"] = image(raw.pixels, kRawSize);
        d["full"] = image(view.full, kViewSize);
        auto crop = [](const InputVector& v) {
          py::array_t<std::uint8_t> out({py::ssize_t{kViewSize}, py::ssize_t{kCropWidth}});
          std::copy(v.begin(), v.end(), out.mutable_data());
          return out;
        };
        d["left"] = crop(view.left);
        d["middle"] = crop(view.middle);
        d["right"] = crop(view.right);
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("heading"),
      "Raw 99x99 frame, 33x33 processed view and the three 33x22 crops in the reference arena.");

  m.def(
      "run_trial",
      [](const std::string& config_json, std::optional<std::uint64_t> seed) {
        const RunConfig cfg = parse_run_config(config_json);
        TrialConfig tc = cfg.trial;
        tc.seed = seed.value_or(cfg.seed);
        TrialRecord rec;
        {
          py::gil_scoped_release release;
          rec = run_trial(cfg.load_arena(), cfg.load_route(), tc);
        }
        return record_dict(rec);
      },
      py::arg("config_json") = "{}", py::arg("seed") = py::none(),
      "Runs one train/test trial from a run-config JSON string.");
}
