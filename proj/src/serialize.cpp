// Copyright 2026 the iterlap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "iterlap/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iterlap {

namespace {

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

StopKind stop_kind_from_string(const std::string& s) {
  if (s == "MaxErrorMet") return StopKind::MaxErrorMet;
  if (s == "ZConverged") return StopKind::ZConverged;
  if (s == "NoImprovementFound") return StopKind::NoImprovementFound;
  if (s == "MaxComponentsReached") return StopKind::MaxComponentsReached;
  throw std::runtime_error("unknown stop reason '" + s + "'");
}

}  // namespace

nlohmann::json mixture_to_json(const Mixture& m) {
  nlohmann::json components = nlohmann::json::array();
  for (const auto& c : m.components()) {
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index i = 0; i < c.dim(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < c.dim(); ++j) row.push_back(c.cov()(i, j));
      cov.push_back(std::move(row));
    }
    components.push_back({{"mean", to_vector(c.mean())}, {"cov", std::move(cov)}});
  }
  return nlohmann::json{{"dim", m.dim()},
                        {"weights", to_vector(m.weights())},
                        {"components", std::move(components)},
                        {"Z", m.Z()}};
}

Mixture mixture_from_json(const nlohmann::json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  const Eigen::VectorXd weights = vector_from_json(j.at("weights"));
  std::vector<GaussComponent> components;
  for (const auto& cj : j.at("components")) {
    const Eigen::VectorXd mean = vector_from_json(cj.at("mean"));
    if (mean.size() != dim) throw std::runtime_error("mixture_from_json: mean size != dim");
    const auto& cov_json = cj.at("cov");
    Eigen::MatrixXd cov(dim, dim);
    if (static_cast<Eigen::Index>(cov_json.size()) != dim)
      throw std::runtime_error("mixture_from_json: cov row count != dim");
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (static_cast<Eigen::Index>(cov_json[i].size()) != dim)
        throw std::runtime_error("mixture_from_json: cov is not square");
      for (Eigen::Index k = 0; k < dim; ++k) cov(i, k) = cov_json[i][k].get<double>();
    }
    components.emplace_back(mean, cov);
  }
  return Mixture(weights, std::move(components));
}

nlohmann::json result_to_json(const IterLapResult& r) {
  return nlohmann::json{{"mixture", mixture_to_json(r.mixture)},
                        {"logM", r.logM},
                        {"Z_history", r.Z_history},
                        {"stop_reason", to_string(r.stop_reason.kind)},
                        {"n_evals", r.n_evals},
                        {"components_added_order", r.components_added_order}};
}

IterLapResult result_from_json(const nlohmann::json& j) {
  IterLapResult r{mixture_from_json(j.at("mixture"))};
  r.logM = j.at("logM").get<double>();
  r.Z_history = j.at("Z_history").get<std::vector<double>>();
  r.stop_reason.kind = stop_kind_from_string(j.at("stop_reason").get<std::string>());
  r.n_evals = j.at("n_evals").get<long long>();
  r.components_added_order = j.at("components_added_order").get<std::vector<int>>();
  return r;
}

nlohmann::json diagnostics_to_json(const McDiagnostics& d) {
  return nlohmann::json{{"ness", d.ness},
                        {"z_hat", d.z_hat},
                        {"log_z_hat", d.log_z_hat},
                        {"mean", to_vector(d.mean)},
                        {"sd", to_vector(d.sd)}};
}

std::string sample_to_csv(const ImportanceSample& s) {
  std::ostringstream out;
  const Eigen::Index p = s.draws.cols();
  for (Eigen::Index d = 0; d < p; ++d) out << 'x' << (d + 1) << ',';
  out << "log_weight\n";
  for (Eigen::Index i = 0; i < s.draws.rows(); ++i) {
    for (Eigen::Index d = 0; d < p; ++d) out << fmt_full(s.draws(i, d)) << ',';
    out << fmt_full(s.log_w[i]) << '\n';
  }
  return out.str();
}

std::string grid_to_csv(const Eigen::MatrixXd& points) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
      if (d) out << ',';
      out << fmt_full(points(i, d));
    }
    out << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace iterlap
