// Copyright 2026 The teebound Authors
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


#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "teebound/io.hpp"
#include "teebound/tee.hpp"

namespace teebound {

enum class ExperimentKind { bound, audit, mixture, deformation, appendix_e, markov, gamma_min, lemma1 };
const char* to_string(ExperimentKind k);

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitConfig = 4;

struct SweepPoint {
  int size = 12;
  int depth = 1;
  int width = 3;
};

struct Tolerances {
  double margin = 1e-8;
  double markov = 1e-7;
  double lemma_premise = 1e-7;
  double lemma_conclusion = 1e-6;
  double moves = 1e-6;
};

struct OutputPaths {
  std::string dir = ".";
  std::string csv = "runs.csv";
  std::string jsonl = "runs.jsonl";
  std::string report = "report.json";
  std::string summary = "summary.txt";
};

struct RunConfig {
  ExperimentKind kind = ExperimentKind::bound;
  Engine engine = Engine::stabilizer;
  ReferenceDescriptor reference = ReferenceDescriptor::toric_code(12, 12);

  /// Annulus parameters, used unless `regions` gives the sectors explicitly.
  Site center{5, 5};
  int inner_radius = 1;
  int outer_radius = 4;
  double rotation = 0;
  std::optional<AnnulusPartition> regions;

  /// Bound sweeps: seed s runs point s mod size(). Center and rotation follow the seed.
  std::vector<SweepPoint> sweep;
  /// Dense bound runs on the certified reductions of the thin 6x6 ring.
  bool thin_ring = false;

  CircuitSpec circuit;
  std::optional<std::string> circuit_file;

  std::vector<std::uint64_t> seeds{0};
  Tolerances tolerances;
  int dense_limit = kDefaultDenseLimit;
  int threads = 0;

  std::array<double, 4> mixture_probs{0.25, 0.25, 0.25, 0.25};
  std::optional<MixtureGeometry> mixture_geometry;
  int audit_partitions = 5;
  std::string markov_state;
  std::string markov_blocks;
  int gamma_v_depth = 2;
  std::vector<int> gamma_outer_radii{4, 5};
  int lemma_count = 20;
  bool lemma_appendix_e = true;
  bool p_next_to_gate = false;

  OutputPaths output;
};

/// Validates against the schema; unknown keys and type errors name the offending path.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);

/// Parses "0..99", "3" or "1,4,7".
std::vector<std::uint64_t> parse_seeds(const std::string& s);

/// Runs the experiment, writes artifacts under output.dir and returns the exit code.
int run(const RunConfig& config, std::ostream& log);

/// Recomputes a bound record from its JSON-lines form.
ExperimentRecord replay_record(const json& record);

json reference_to_json(const ReferenceDescriptor& ref);
ReferenceDescriptor reference_from_json(const json& j);

}  // namespace teebound
