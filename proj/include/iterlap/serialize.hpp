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

#pragma once

#include "iterlap/iterlap.hpp"
#include "iterlap/montecarlo.hpp"

#include <json.hpp>

#include <string>

namespace iterlap {

/// {dim, weights[], components:[{mean[], cov[][]}], Z}
nlohmann::json mixture_to_json(const Mixture& m);
Mixture mixture_from_json(const nlohmann::json& j);

/// {mixture, logM, Z_history[], stop_reason, n_evals, components_added_order[]}
nlohmann::json result_to_json(const IterLapResult& r);
IterLapResult result_from_json(const nlohmann::json& j);

nlohmann::json diagnostics_to_json(const McDiagnostics& d);

/// One coordinate column per dimension plus a log_weight column.
std::string sample_to_csv(const ImportanceSample& s);

/// Row-per-point dump, no header.
std::string grid_to_csv(const Eigen::MatrixXd& points);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace iterlap
