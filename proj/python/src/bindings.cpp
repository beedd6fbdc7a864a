// Copyright 2026 The idxqual Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings: tokenizer, metrics, sweeps, the CLI commands and bundles.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "idxqual/bundle.hpp"
#include "idxqual/commands.hpp"
#include "idxqual/error.hpp"
#include "idxqual/eval.hpp"
#include "idxqual/textproc.hpp"

namespace py = pybind11;
using namespace idxqual;

namespace {

CommandOptions options(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out,
                       std::optional<std::uint64_t> seed, std::optional<int> threads) {
  CommandOptions o;
  o.config = config;
  o.out = out;
  o.seed = seed;
  o.threads = threads;
  return o;
}

// Runs a command without the GIL and returns its log.
template <typename F>
std::string logged(F&& f) {
  std::ostringstream log;
  {
    py::gil_scoped_release release;
    f(log);
  }
  return log.str();
}

py::dict result_dict(const ModelBundle& bundle, const DocumentResult& r) {
  py::list concepts;
  for (const auto& a : r.prediction.assigned)
    concepts.append(py::make_tuple(bundle.indexing.vocabulary->concept_at(a.concept_index).id, a.confidence));
  py::dict precision;
  precision["mean"] = r.estimate.precision.mean;
  precision["product"] = r.estimate.precision.product;
  precision["median"] = r.estimate.precision.median;
  precision["min"] = r.estimate.precision.min;
  py::dict out;
  out["id"] = r.estimate.doc_id;
  out["concepts"] = concepts;
  out["recall_hat"] = r.estimate.recall_hat;
  out["precision"] = precision;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quality estimation for automatic subject indexing";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<BundleError>(m, "BundleError", error);

  m.def(
      "tokenize",
      [](std::string_view text) {
        auto t = tokenize(text);
        return py::make_tuple(t.tokens, t.char_count);
      },
      py::arg("text"), "Lowercased tokens and the character count of the raw text.");

  m.def("pearson", [](std::vector<double> x, std::vector<double> y) { return pearson(x, y); }, py::arg("x"), py::arg("y"));
  m.def("mse", [](std::vector<double> p, std::vector<double> t) { return mse(p, t); }, py::arg("predictions"),
        py::arg("truths"));
  m.def("doc_recall", &doc_recall<std::string>, py::arg("gold"), py::arg("predicted"));
  m.def("doc_precision", &doc_precision<std::string>, py::arg("gold"), py::arg("predicted"));
  m.def("default_thresholds", &default_thresholds);
  m.def("parse_mask", [](std::string_view text) { return GroupMask::parse(text).to_string(); }, py::arg("text"));

  m.def(
      "threshold_sweep",
      [](std::vector<double> estimates, std::vector<std::optional<double>> recall, std::vector<double> precision,
         std::optional<std::vector<double>> thresholds) {
        const auto rows = threshold_sweep(estimates, recall, precision, thresholds.value_or(default_thresholds()));
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["threshold"] = r.threshold;
          d["coverage"] = r.coverage;
          d["mean_recall"] = r.mean_recall;
          d["mean_precision"] = r.mean_precision;
          d["recall_gain"] = r.recall_gain;
          d["n_selected"] = r.n_selected;
          out.append(d);
        }
        return out;
      },
      py::arg("estimates"), py::arg("true_recall"), py::arg("true_precision"), py::arg("thresholds") = py::none());

  auto command = [&m](const char* name, void (*fn)(const CommandOptions&, std::ostream&)) {
    m.def(
        name,
        [fn](const std::filesystem::path& config, std::optional<std::filesystem::path> out,
             std::optional<std::uint64_t> seed, std::optional<int> threads) {
          const auto o = options(config, out, seed, threads);
          return logged([&](std::ostream& log) { fn(o, log); });
        },
        py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(), py::arg("threads") = py::none());
  };
  command("synth", &cmd_synth);
  command("run", &cmd_run);
  command("ablate", &cmd_ablate);
  command("train", &cmd_train);

  m.def(
      "sweep",
      [](const std::filesystem::path& estimates, const std::filesystem::path& out,
         std::optional<std::filesystem::path> config) {
        return logged([&](std::ostream& log) { cmd_sweep(estimates, config, out, log); });
      },
      py::arg("estimates"), py::arg("out"), py::arg("config") = py::none());
  m.def(
      "predict",
      [](const std::filesystem::path& model, const std::filesystem::path& corpus, const std::filesystem::path& out) {
        return logged([&](std::ostream& log) { cmd_predict(model, corpus, out, log); });
      },
      py::arg("model"), py::arg("corpus"), py::arg("out"));

  py::class_<ModelBundle>(m, "Bundle")
      .def_static("load", &load_bundle, py::arg("path"))
      .def("save", [](const ModelBundle& b, const std::filesystem::path& p) { save_bundle(b, p); }, py::arg("path"))
      .def_property_readonly("version", [](const ModelBundle& b) { return b.version; })
      .def_property_readonly("mask", [](const ModelBundle& b) { return b.recall.mask.to_string(); })
      .def_property_readonly("concept_count", [](const ModelBundle& b) { return b.indexing.vocabulary->size(); })
      .def(
          "predict",
          [](const ModelBundle& b, const std::string& doc_id, std::string_view text) {
            return result_dict(b, apply_bundle(b, doc_id, text));
          },
          py::arg("doc_id"), py::arg("text"));
}
