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


#include "teebound/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "teebound/errors.hpp"

namespace teebound {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json region_to_json(const Region& r) { return {{"label", r.label()}, {"qubits", r.qubits()}}; }

Region region_from_json(const json& j) {
  try {
    return Region(j.value("label", std::string{}), j.at("qubits").get<std::vector<int>>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("region: ") + e.what());
  }
}

Lattice lattice_from_json(const json& j) {
  try {
    return Lattice(j.at("rows").get<int>(), j.at("cols").get<int>(),
                   topology_from_string(j.value("topology", std::string("torus"))));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("lattice: ") + e.what());
  }
}

json partition_to_json(const Lattice& lat, const AnnulusPartition& p) {
  return {{"lattice", {{"rows", lat.rows()}, {"cols", lat.cols()}, {"topology", to_string(lat.topology())}}},
          {"regions", json::array({region_to_json(p.A.with_label("A")), region_to_json(p.B1.with_label("B1")),
                                   region_to_json(p.B2.with_label("B2")), region_to_json(p.C.with_label("C"))})},
          {"center", {p.center.r, p.center.c}},
          {"inner_radius", p.inner_radius},
          {"outer_radius", p.outer_radius},
          {"rotation", p.rotation}};
}

AnnulusPartition partition_from_json(const json& j) {
  AnnulusPartition p;
  std::map<std::string, Region*> slots{{"A", &p.A}, {"B1", &p.B1}, {"B2", &p.B2}, {"C", &p.C}};
  try {
    for (const auto& rj : j.at("regions")) {
      Region r = region_from_json(rj);
      const auto it = slots.find(r.label());
      if (it == slots.end()) throw ConfigError("partition: unknown region label '" + r.label() + "'");
      *it->second = std::move(r);
    }
    if (j.contains("center")) p.center = Site{j["center"].at(0).get<int>(), j["center"].at(1).get<int>()};
    p.inner_radius = j.value("inner_radius", 0);
    p.outer_radius = j.value("outer_radius", 0);
    p.rotation = j.value("rotation", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("partition: ") + e.what());
  }
  for (const auto& [name, r] : slots)
    if (r->empty()) throw ConfigError("partition: region " + name + " missing or empty");
  return p;
}

json circuit_to_json(const Circuit& c) {
  json layers = json::array();
  for (const auto& layer : c.layers()) {
    json lj = json::array();
    for (const auto& g : layer) {
      json gj = {{"kind", gate_kind_name(g.kind)}, {"support", g.support}};
      if (g.kind == GateKind::Clifford2) gj["clifford_index"] = g.clifford_index;
      if (g.kind == GateKind::Dense) {
        json m = json::array();
        for (Eigen::Index r = 0; r < g.matrix.rows(); ++r) {
          json row = json::array();
          for (Eigen::Index k = 0; k < g.matrix.cols(); ++k) row.push_back({g.matrix(r, k).real(), g.matrix(r, k).imag()});
          m.push_back(std::move(row));
        }
        gj["matrix"] = std::move(m);
      }
      lj.push_back(std::move(gj));
    }
    layers.push_back(std::move(lj));
  }
  return layers;
}

Circuit circuit_from_json(const json& j) {
  Circuit c;
  try {
    std::size_t li = 0;
    for (const auto& lj : j) {
      Layer layer;
      std::size_t gi = 0;
      for (const auto& gj : lj) {
        const std::string where = "circuit[" + std::to_string(li) + "][" + std::to_string(gi++) + "]";
        const GateKind kind = gate_kind_from_name(gj.at("kind").get<std::string>());
        auto support = gj.at("support").get<std::vector<int>>();
        if (kind == GateKind::Clifford2) {
          if (support.size() != 2) throw ConfigError(where + ".support: two qubits expected");
          layer.push_back(Gate::clifford2(gj.at("clifford_index").get<int>(), support[0], support[1]));
        } else if (kind == GateKind::Dense) {
          const auto& m = gj.at("matrix");
          const auto dim = static_cast<Eigen::Index>(m.size());
          Eigen::MatrixXcd u(dim, dim);
          for (Eigen::Index r = 0; r < dim; ++r) {
            if (m[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(dim)) {
              throw ConfigError(where + ".matrix: not square");
            }
            for (Eigen::Index k = 0; k < dim; ++k) {
              const auto& e = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
              u(r, k) = {e.at(0).get<double>(), e.at(1).get<double>()};
            }
          }
          layer.push_back(Gate::dense(std::move(support), std::move(u)));
        } else {
          layer.push_back(Gate::named(kind, std::move(support)));
        }
      }
      c.add_layer(std::move(layer));
      ++li;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError(std::string("circuit: ") + e.what());
  }
  return c;
}

Circuit load_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open circuit file '" + path + "'");
  try {
    return circuit_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json markov_report_to_json(const MarkovReport& r, const std::vector<Labels>& blocks) {
  const auto span = [&](std::size_t i, std::size_t j) {
    Labels out;
    for (std::size_t k = i; k < j; ++k) out.insert(out.end(), blocks[k].begin(), blocks[k].end());
    return out;
  };
  json parts = json::array();
  for (const auto& t : r.table) {
    parts.push_back({{"A", span(t.parts.a, t.parts.b)},
                     {"B", span(t.parts.b, t.parts.c)},
                     {"C", span(t.parts.c, t.parts.d)},
                     {"cmi", t.cmi},
                     {"full_cover", t.full_cover}});
  }
  json j = {{"tripartitions", parts},
            {"flags", {{"locally_markov", r.is_locally_markov}, {"markov", r.is_markov}}},
            {"tolerances", {{"cmi", r.tolerance}}}};
  if (r.global_cmi_constant) j["flags"]["global_cmi_constant"] = *r.global_cmi_constant;
  return j;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "seed",  "rows",   "cols",   "center_r", "center_c",  "inner_radius", "outer_radius", "width",
      "depth", "gates",  "support", "engine",  "precondition_ok", "s_ab",    "s_bc",         "s_b",
      "s_abc", "cmi",    "bound",  "margin",   "cmi_log2",  "bound_log2",   "margin_log2"};
  return cols;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string csv_row(const ExperimentRecord& r) {
  const double l2 = std::log(2.0);
  std::ostringstream s;
  s << r.seed << ',' << r.rows << ',' << r.cols << ',' << r.center.r << ',' << r.center.c << ',' << r.inner_radius
    << ',' << r.outer_radius << ',' << r.width << ',' << r.depth << ',' << r.gate_count << ',' << r.support_size
    << ',' << to_string(r.engine) << ',' << (r.precondition_ok ? 1 : 0);
  const double cmi2 = r.cmi / l2, bound2 = r.bound / l2;
  for (double x : {r.s_ab, r.s_bc, r.s_b, r.s_abc, r.cmi, r.bound, r.margin, cmi2, bound2, cmi2 - bound2})
    s << ',' << format_double(x);
  return s.str();
}

json record_to_json(const ExperimentRecord& r, const AnnulusPartition& p, const Lattice& lat, const Circuit& c) {
  return {{"seed", r.seed},
          {"engine", to_string(r.engine)},
          {"depth", r.depth},
          {"width", r.width},
          {"precondition_ok", r.precondition_ok},
          {"entropies", {{"s_ab", r.s_ab}, {"s_bc", r.s_bc}, {"s_b", r.s_b}, {"s_abc", r.s_abc}}},
          {"cmi", r.cmi},
          {"bound", r.bound},
          {"margin", r.margin},
          {"partition", partition_to_json(lat, p)},
          {"circuit", circuit_to_json(c)}};
}

std::vector<SummaryRow> summarize(const std::vector<std::string>& csv_paths) {
  const auto& cols = csv_columns();
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
  };
  const std::size_t i_depth = col("depth"), i_width = col("width"), i_margin = col("margin");
  struct Acc {
    std::size_t n = 0;
    double min = 0, sum = 0;
  };
  std::map<std::pair<int, int>, Acc> groups;
  for (const auto& path : csv_paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open results file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (lineno == 1) {
        if (line != csv_header()) throw ConfigError(path + ":1: unexpected header");
        continue;
      }
      std::vector<std::string> fields;
      std::stringstream ss(line);
      for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
      if (fields.size() != cols.size()) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) +
                          " fields, found " + std::to_string(fields.size()));
      }
      int depth = 0, width = 0;
      double margin = 0;
      try {
        std::size_t u1 = 0, u2 = 0, u3 = 0;
        depth = std::stoi(fields[i_depth], &u1);
        width = std::stoi(fields[i_width], &u2);
        margin = std::stod(fields[i_margin], &u3);
        if (u1 != fields[i_depth].size() || u2 != fields[i_width].size() || u3 != fields[i_margin].size()) {
          throw std::invalid_argument("trailing characters");
        }
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed number");
      }
      Acc& a = groups[{depth, width}];
      a.min = a.n == 0 ? margin : std::min(a.min, margin);
      a.sum += margin;
      ++a.n;
    }
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, a] : groups)
    out.push_back({key.first, key.second, a.n, a.min, a.sum / static_cast<double>(a.n)});
  return out;
}

void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  const double l2 = std::log(2.0);
  out << "depth width runs  min_margin  mean_margin  min_margin_log2  mean_margin_log2\n";
  for (const auto& r : rows) {
    out << std::setw(5) << r.depth << std::setw(6) << r.width << std::setw(5) << r.runs << std::fixed
        << std::setprecision(6) << std::setw(12) << r.min_margin << std::setw(13) << r.mean_margin << std::setw(17)
        << r.min_margin / l2 << std::setw(18) << r.mean_margin / l2 << '\n';
    out.unsetf(std::ios::fixed);
  }
}

}  // namespace teebound
