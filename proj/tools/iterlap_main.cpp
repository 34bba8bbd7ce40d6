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

#include "iterlap/benchmark.hpp"
#include "iterlap/serialize.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace iterlap;

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  std::string token;
  std::istringstream ss(text);
  while (std::getline(ss, token, ',')) values.push_back(std::stod(token));
  return Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
}

void write_or_print(const std::optional<std::string>& path, const std::string& content) {
  if (path) {
    write_text_file(*path, content);
  } else {
    std::cout << content;
  }
}

struct CommonFlags {
  int grid_n = 0;
  double delta = 0.01;
  double eps = 0.005;
  int max_components = 20;
  std::uint64_t seed = 1;

  IterLapConfig config() const {
    IterLapConfig cfg;
    cfg.grid_n = grid_n;
    cfg.delta = delta;
    cfg.eps = eps;
    cfg.max_components = max_components;
    cfg.seed = seed;
    return cfg;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--grid-n", grid_n, "grid points per component (0 = 50 p^1.25)");
    cmd->add_option("--delta", delta, "max-error stopping tolerance");
    cmd->add_option("--eps", eps, "normalization-constant stopping tolerance");
    cmd->add_option("--max-components", max_components, "component budget");
    cmd->add_option("--seed", seed, "random seed");
  }
};

TargetDensity resolve_target(const std::string& case_name, const std::string& data_path) {
  if (case_name == "enso") return make_enso_posterior(load_enso(data_path));
  return make_bench_target(bench_case_from_string(case_name));
}

int run_approximate(const std::string& case_name, const CommonFlags& flags,
                    const std::vector<std::string>& start_flags, const std::string& data_path,
                    const std::string& start_path, const std::optional<std::string>& out) {
  const TargetDensity target = resolve_target(case_name, data_path);
  std::vector<Eigen::VectorXd> starts;
  for (const auto& s : start_flags) starts.push_back(parse_vector(s));
  if (starts.empty()) {
    if (case_name == "enso") {
      starts.push_back(load_enso_start(start_path));
    } else {
      starts.push_back(Eigen::VectorXd::Zero(target.dim()));
    }
  }
  const IterLapResult result = run_iterlap(target, starts, flags.config());
  write_or_print(out, result_to_json(result).dump(2) + "\n");
  return 0;
}

int run_sample(const std::string& from_file, const std::string& case_name, int n_samples,
               double df, std::uint64_t seed, const std::string& data_path,
               const std::optional<std::string>& out, const std::optional<std::string>& diag_out) {
  const TargetDensity target = resolve_target(case_name, data_path);
  const nlohmann::json j = nlohmann::json::parse(read_text_file(from_file));
  const IterLapResult result = result_from_json(j);

  RandomStream rng(seed);
  ImportanceSample s = [&] {
    if (df > 0.0) {
      const StudentMixture proposal = mixture_to_student(result.mixture, df);
      return importance_sample(target, proposal, n_samples, rng);
    }
    return importance_sample(target, result.mixture, n_samples, rng);
  }();

  const McDiagnostics diag = diagnose(s);
  write_or_print(out, sample_to_csv(s));
  write_or_print(diag_out, diagnostics_to_json(diag).dump(2) + "\n");
  return 0;
}

int run_benchmark_cmd(const std::string& case_name, const std::string& method, int reps,
                      int n_samples, bool paper_scale, const CommonFlags& flags,
                      const std::string& format, const std::optional<std::string>& out) {
  const IterLapConfig cfg = flags.config();
  const BenchmarkReport report =
      run_benchmark(bench_case_from_string(case_name), method_from_string(method),
                    paper_scale ? 100 : reps, n_samples, flags.seed, &cfg);
  write_or_print(out, emit_report(report, format_from_string(format)));
  return 0;
}

int run_enso_cmd(const std::string& data_path, const std::string& start_path, int n_samples,
                 double df, const CommonFlags& flags, const std::optional<std::string>& out) {
  const IterLapConfig cfg = flags.config();
  const EnsoReport report =
      run_enso(data_path, start_path, flags.seed, n_samples, n_samples, df, &cfg);
  write_or_print(out, enso_report_to_json(report).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iterated Laplace approximation of unnormalized densities"};
  app.require_subcommand(1);

  std::string case_name = "f2", method = "iterlap", format = "json";
  std::string data_path = "data/enso.csv", start_path = "data/enso_start.json";
  std::string from_file;
  std::vector<std::string> start_flags;
  std::optional<std::string> out, diag_out;
  int reps = 20, n_samples = 10000, enso_samples = 5000;
  double df = 0.0;
  bool paper_scale = false;
  CommonFlags flags;

  auto* approx = app.add_subcommand("approximate", "build a mixture approximation");
  approx->add_option("--case", case_name, "f1|f2|f3|illustration1d|enso")->required();
  approx->add_option("--start", start_flags, "starting point, comma-separated coordinates");
  approx->add_option("--data", data_path, "ENSO CSV path (case enso)");
  approx->add_option("--start-file", start_path, "ENSO starting-value JSON (case enso)");
  approx->add_option("--out", out, "output path (default stdout)");
  flags.attach(approx);

  auto* sample = app.add_subcommand("sample", "importance-sample a stored approximation");
  sample->add_option("--from-file", from_file, "approximation JSON from 'approximate'")
      ->required();
  sample->add_option("--case", case_name, "target density the mixture approximates")->required();
  sample->add_option("--samples", n_samples, "number of draws");
  sample->add_option("--df", df, "t-mixture degrees of freedom (0 = Gaussian proposal)");
  sample->add_option("--seed", flags.seed, "random seed");
  sample->add_option("--data", data_path, "ENSO CSV path (case enso)");
  sample->add_option("--out", out, "draws CSV path (default stdout)");
  sample->add_option("--diag", diag_out, "diagnostics JSON path (default stdout)");

  auto* bench = app.add_subcommand("benchmark", "NESS and moment-error comparison");
  bench->add_option("--case", case_name, "f1|f2|f3|illustration1d")->required();
  bench->add_option("--method", method, "laplace|iterlap");
  bench->add_option("--reps", reps, "importance-sampling repetitions");
  bench->add_option("--samples", n_samples, "draws per repetition");
  bench->add_flag("--paper-scale", paper_scale, "use 100 repetitions");
  bench->add_option("--format", format, "json|csv|table");
  bench->add_option("--out", out, "output path (default stdout)");
  flags.attach(bench);

  auto* enso = app.add_subcommand("enso", "pressure-regression posterior pipeline");
  enso->add_option("--data", data_path, "ENSO CSV path");
  enso->add_option("--start-file", start_path, "starting-value JSON");
  enso->add_option("--samples", enso_samples, "importance-sampling / resampling size");
  enso->add_option("--df", df, "t-mixture degrees of freedom")->default_val(10.0);
  enso->add_option("--out", out, "output path (default stdout)");
  flags.attach(enso);

  try {
    app.parse(argc, argv);
    if (*approx) return run_approximate(case_name, flags, start_flags, data_path, start_path, out);
    if (*sample) return run_sample(from_file, case_name, n_samples, df, flags.seed, data_path,
                                   out, diag_out);
    if (*bench)
      return run_benchmark_cmd(case_name, method, reps, n_samples, paper_scale, flags, format,
                               out);
    if (*enso) return run_enso_cmd(data_path, start_path, enso_samples, df, flags, out);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
