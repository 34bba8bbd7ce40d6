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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iterlap/serialize.hpp"

#include <random>

using namespace iterlap;

namespace {

Mixture random_mixture(std::uint64_t seed, int p = 3, int J = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  std::vector<GaussComponent> comps;
  Eigen::VectorXd w(J);
  for (int j = 0; j < J; ++j) {
    Eigen::VectorXd mean(p);
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i) {
      mean[i] = 3.0 * dist(rng);
      for (int k = 0; k < p; ++k) a(i, k) = dist(rng);
    }
    comps.emplace_back(mean, Eigen::MatrixXd(a * a.transpose() +
                                             0.2 * Eigen::MatrixXd::Identity(p, p)));
    w[j] = unif(rng);
  }
  w[1] = 0.0;  // keep a zero-weight column in play
  return Mixture(w, std::move(comps));
}

}  // namespace

TEST_CASE("mixture JSON round trip is exact") {
  const Mixture m = random_mixture(11);
  const nlohmann::json j = mixture_to_json(m);
  const Mixture back = mixture_from_json(j);

  CHECK(back.dim() == m.dim());
  CHECK(back.n_components() == m.n_components());
  CHECK((back.weights().array() == m.weights().array()).all());
  for (Eigen::Index c = 0; c < m.n_components(); ++c) {
    CHECK((back.component(c).mean().array() == m.component(c).mean().array()).all());
    CHECK((back.component(c).cov().array() == m.component(c).cov().array()).all());
  }
  CHECK(back.Z() == m.Z());

  // Round trip through text as the CLI does.
  const Mixture again = mixture_from_json(nlohmann::json::parse(j.dump()));
  CHECK((again.weights().array() == m.weights().array()).all());
  for (Eigen::Index c = 0; c < m.n_components(); ++c)
    CHECK((again.component(c).cov().array() == m.component(c).cov().array()).all());
}

TEST_CASE("density values survive the round trip bit for bit") {
  const Mixture m = random_mixture(13);
  const Mixture back = mixture_from_json(nlohmann::json::parse(mixture_to_json(m).dump()));
  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist;
  for (int i = 0; i < 25; ++i) {
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) x[d] = 4.0 * dist(rng);
    CHECK(mixture_logpdf(m, x) == mixture_logpdf(back, x));
  }
}

TEST_CASE("result JSON round trip") {
  IterLapResult r{random_mixture(19)};
  r.logM = -123.456789012345;
  r.Z_history = {0.5, 0.75, 0.8125};
  r.stop_reason = StopReason{StopKind::ZConverged};
  r.n_evals = 31415;
  r.components_added_order = {0, 1, 2, 3};

  const IterLapResult back = result_from_json(nlohmann::json::parse(result_to_json(r).dump()));
  CHECK(back.logM == r.logM);
  CHECK(back.Z_history == r.Z_history);
  CHECK(back.stop_reason.kind == StopKind::ZConverged);
  CHECK(back.n_evals == 31415);
  CHECK(back.components_added_order == r.components_added_order);
  CHECK((back.mixture.weights().array() == r.mixture.weights().array()).all());
}

TEST_CASE("malformed documents are rejected") {
  nlohmann::json j = mixture_to_json(random_mixture(23));
  j["components"][0]["cov"][0] = {1.0};  // wrong row length
  CHECK_THROWS(mixture_from_json(j));

  nlohmann::json j2 = mixture_to_json(random_mixture(23));
  j2["components"][0]["mean"] = {1.0};  // wrong mean size
  CHECK_THROWS(mixture_from_json(j2));
}

TEST_CASE("sample CSV layout") {
  ImportanceSample s;
  s.draws.resize(2, 3);
  s.draws << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  s.log_w = Eigen::Vector2d(-0.5, -1.5);
  s.w_norm = Eigen::Vector2d(0.7, 0.3);
  const std::string csv = sample_to_csv(s);
  CHECK(csv.substr(0, csv.find('\n')) == "x1,x2,x3,log_weight");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("-1.5") != std::string::npos);
}

TEST_CASE("grid CSV is headerless row-per-point") {
  Eigen::MatrixXd pts(2, 2);
  pts << 0.25, 0.5, 0.75, 1.0;
  const std::string csv = grid_to_csv(pts);
  CHECK(csv == "0.25,0.5\n0.75,1\n");
}

TEST_CASE("diagnostics JSON carries the documented fields") {
  McDiagnostics d;
  d.ness = 0.87;
  d.z_hat = 1.5;
  d.log_z_hat = std::log(1.5);
  d.mean = Eigen::Vector2d(0.1, 0.2);
  d.sd = Eigen::Vector2d(1.0, 2.0);
  const nlohmann::json j = diagnostics_to_json(d);
  CHECK(j.at("ness").get<double>() == 0.87);
  CHECK(j.at("z_hat").get<double>() == 1.5);
  CHECK(j.at("mean").size() == 2);
  CHECK(j.at("sd").size() == 2);
}

TEST_CASE("text file round trip") {
  const std::string path = "/tmp/iterlap_serialize_test.txt";
  write_text_file(path, "hello\nworld\n");
  CHECK(read_text_file(path) == "hello\nworld\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file("/tmp/definitely_missing_file_xyz"), std::runtime_error);
}
