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

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "teebound/circuits.hpp"
#include "teebound/lattice.hpp"
#include "teebound/markov.hpp"
#include "teebound/tee.hpp"

namespace teebound {

using json = nlohmann::json;

json region_to_json(const Region& r);
Region region_from_json(const json& j);

/// {lattice: {rows, cols, topology}, regions: [A, B1, B2, C], center, radii, rotation}.
json partition_to_json(const Lattice& lat, const AnnulusPartition& p);
AnnulusPartition partition_from_json(const json& j);
Lattice lattice_from_json(const json& j);

/// List of layers; each gate is {kind, support, clifford_index?, matrix?}.
json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const json& j);
Circuit load_circuit_file(const std::string& path);

json markov_report_to_json(const MarkovReport& r, const std::vector<Labels>& blocks);

/// Fixed CSV schema for ExperimentRecord rows.
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const ExperimentRecord& r);

/// Full record with regions and circuit, for replay. Wall time is left out.
json record_to_json(const ExperimentRecord& r, const AnnulusPartition& p, const Lattice& lat, const Circuit& c);

struct SummaryRow {
  int depth = 0;
  int width = 0;
  std::size_t runs = 0;
  double min_margin = 0;
  double mean_margin = 0;
};

/// Groups result rows by (depth, width). Throws ConfigError naming file and line on bad rows.
std::vector<SummaryRow> summarize(const std::vector<std::string>& csv_paths);
void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Round-trip exact decimal form of a double.
std::string format_double(double x);

}  // namespace teebound
