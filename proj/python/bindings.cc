//
// Copyright 2026 The secfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "secfl/accountant.h"
#include "secfl/errors.h"
#include "secfl/experiment.h"

namespace py = pybind11;

namespace {

py::dict RowToDict(const secfl::MetricsRow& r) {
  py::dict d;
  d["round"] = r.round;
  d["main_acc"] = r.main_acc;
  d["backdoor_acc"] = r.backdoor_acc;
  d["eps_server"] = r.eps_server;
  d["eps_client"] = r.eps_client;
  d["max_t_i"] = r.max_t_i;
  d["bytes_clients"] = r.bytes_sent[0];
  d["bytes_server_a"] = r.bytes_sent[1];
  d["bytes_server_b"] = r.bytes_sent[2];
  d["wall_ms"] = r.wall_ms;
  return d;
}

secfl::ExperimentConfig ParseAndValidate(const std::string& json_text) {
  secfl::ExperimentConfig cfg = secfl::ParseExperimentConfig(json_text);
  secfl::ValidateExperimentConfig(cfg);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_secfl, m) {
  m.doc() = "Two-server private and robust federated learning simulator";

  static py::exception<secfl::ConfigError> config_error(m, "ConfigError",
                                                        PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const secfl::ConfigError& e) {
      py::set_error(config_error, e.what());
    }
  });

  m.def("mu_record_server_corrupted",
        [](double p_i, double T_i, double sigma) {
          return secfl::MuRecordServerCorrupted(p_i, T_i, sigma).mu;
        },
        py::arg("p_i"), py::arg("T_i"), py::arg("sigma"));
  m.def("mu_record_clients_only",
        [](double q, double p_i, double T, double sigma) {
          return secfl::MuRecordClientsOnly(q, p_i, T, sigma).mu;
        },
        py::arg("q"), py::arg("p_i"), py::arg("T"), py::arg("sigma"));
  m.def("mu_client_level",
        [](double q, double T, double sigma, double R, double C) {
          return secfl::MuClientLevel(q, T, sigma, R, C).mu;
        },
        py::arg("q"), py::arg("T"), py::arg("sigma"), py::arg("R"),
        py::arg("C"));
  m.def("gdp_to_dp_delta",
        [](double mu, double eps) {
          return secfl::GdpToDpDelta(secfl::GdpMu(mu), eps);
        },
        py::arg("mu"), py::arg("eps"));
  m.def("eps_for_delta",
        [](double mu, double delta) {
          return secfl::EpsForDelta(secfl::GdpMu(mu), delta);
        },
        py::arg("mu"), py::arg("delta"));
  m.def("robustness_bounds",
        [](double L, double B, int K, double mu) {
          const secfl::RobustnessBounds b =
              secfl::ComputeRobustnessBounds({L, B, K, secfl::GdpMu(mu)});
          return py::make_tuple(b.lower, b.upper);
        },
        py::arg("L"), py::arg("B"), py::arg("K"), py::arg("mu"));

  m.def("accountant",
        [](double q, double p_i, long T, double sigma, double R, double C,
           double delta, double L, double B, int K,
           std::optional<double> T_i) {
          secfl::AccountantQuery query;
          query.params = {q, p_i, T, T_i, sigma, R, C};
          query.delta = delta;
          query.L = L;
          query.B = B;
          query.K = K;
          const secfl::AccountantAnswer a = secfl::RunAccountant(query);
          py::dict d;
          d["mu_server"] = a.mu_server;
          d["mu_client"] = a.mu_client;
          d["eps_server"] = a.eps_server;
          d["eps_client"] = a.eps_client;
          d["robust_lower"] = a.robust_lower;
          d["robust_upper"] = a.robust_upper;
          return d;
        },
        py::arg("q") = 0.1, py::arg("p_i") = 0.05, py::arg("T") = 100,
        py::arg("sigma") = 1.0, py::arg("R") = 2.0, py::arg("C") = 30.0,
        py::arg("delta") = 1e-5, py::arg("L") = 0.5, py::arg("B") = 1.0,
        py::arg("K") = 0, py::arg("T_i") = py::none());

  m.def("normalize_config",
        [](const std::string& json_text) {
          return secfl::ExperimentConfigToJson(ParseAndValidate(json_text));
        },
        py::arg("json_text"),
        "Parses, validates and returns the config with every default filled "
        "in.");

  m.def("simulate",
        [](const std::string& json_text, std::optional<std::string> out) {
          const secfl::ExperimentConfig cfg = ParseAndValidate(json_text);
          std::optional<std::filesystem::path> dir;
          if (out) dir = *out;
          secfl::ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = secfl::RunExperiment(cfg, dir);
          }
          py::list rows;
          for (const secfl::MetricsRow& row : r.mean) rows.append(RowToDict(row));
          return rows;
        },
        py::arg("json_text") = "{}", py::arg("out") = py::none(),
        "Runs every seed of the experiment and returns the mean metric rows.");

  m.def("validate_bench",
        [](const std::vector<size_t>& dims, size_t iters, double C,
           uint64_t seed) {
          py::list rows;
          for (const secfl::BenchRow& b :
               secfl::ValidateBench(dims, iters, C, seed)) {
            py::dict d;
            d["d"] = b.d;
            d["mean_ms"] = b.mean_ms;
            d["verdict_error_count"] = b.verdict_error_count;
            rows.append(d);
          }
          return rows;
        },
        py::arg("dims"), py::arg("iters") = 10, py::arg("C") = 5.0,
        py::arg("seed") = 1);
}
