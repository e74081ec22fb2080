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


#include "teebound/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string_view>
#include <thread>

#include "teebound/errors.hpp"

namespace teebound {

namespace fs = std::filesystem;

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::bound: return "bound";
    case ExperimentKind::audit: return "audit";
    case ExperimentKind::mixture: return "mixture";
    case ExperimentKind::deformation: return "deform";
    case ExperimentKind::appendix_e: return "appendix-e";
    case ExperimentKind::markov: return "markov";
    case ExperimentKind::gamma_min: return "gamma-min";
    case ExperimentKind::lemma1: return "lemma1";
  }
  return "?";
}

namespace {

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::bound, ExperimentKind::audit, ExperimentKind::mixture, ExperimentKind::deformation,
                 ExperimentKind::appendix_e, ExperimentKind::markov, ExperimentKind::gamma_min,
                 ExperimentKind::lemma1})
    if (s == to_string(k)) return k;
  if (s == "deformation") return ExperimentKind::deformation;
  throw ConfigError("unknown experiment '" + s + "'");
}

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  else if constexpr (std::is_integral_v<T>) return "an integer";
  else if constexpr (std::is_floating_point_v<T>) return "a number";
  else if constexpr (std::is_same_v<T, std::string>) return "a string";
  else return "an array";
}

template <class T>
bool matches(const json& j) {
  if constexpr (std::is_same_v<T, bool>) return j.is_boolean();
  else if constexpr (std::is_integral_v<T>) return j.is_number_integer();
  else if constexpr (std::is_floating_point_v<T>) return j.is_number();
  else if constexpr (std::is_same_v<T, std::string>) return j.is_string();
  else return j.is_array();
}

/// Object reader that remembers which keys were consumed.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  std::string path(const std::string& key) const { return path_ + "." + key; }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    out = get<T>(key);
  }

  template <class T>
  T get(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(path(key) + ": required");
    const json& v = j_.at(key);
    if (!matches<T>(v)) throw ConfigError(path(key) + ": expected " + type_name<T>());
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path(key) + ": expected " + type_name<T>());
    }
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Node child(const std::string& key) { return Node(raw(key), path(key)); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(path(k) + ": unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T>
T positive(T v, const std::string& where) {
  if (v <= 0) throw ConfigError(where + ": must be positive");
  return v;
}

std::vector<Site> sites_from_json(const json& j, const std::string& where) {
  std::vector<Site> out;
  if (!j.is_array()) throw ConfigError(where + ": expected an array of [row, col]");
  for (const auto& s : j) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer()) {
      throw ConfigError(where + ": expected an array of [row, col]");
    }
    out.push_back({s[0].get<int>(), s[1].get<int>()});
  }
  return out;
}

template <class F>
auto wrap_config(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    if (std::string_view(e.what()).starts_with("config")) throw;
    throw ConfigError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  const auto num = [&](const std::string& t) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size() || t[0] == '-') throw ConfigError("seeds: bad seed '" + t + "'");
    return static_cast<std::uint64_t>(v);
  };
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const auto lo = num(s.substr(0, dots)), hi = num(s.substr(dots + 2));
    if (hi < lo) throw ConfigError("seeds: empty range '" + s + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');) out.push_back(num(t));
  if (out.empty()) throw ConfigError("seeds: empty");
  return out;
}

json reference_to_json(const ReferenceDescriptor& ref) {
  json j = {{"kind", to_string(ref.kind)},
            {"rows", ref.rows},
            {"cols", ref.cols},
            {"sector", {ref.sector.z1, ref.sector.z2}},
            {"gamma0", ref.gamma0}};
  if (!ref.path.empty()) j["path"] = ref.path;
  return j;
}

namespace {

ReferenceDescriptor parse_reference(Node n) {
  std::string kind = "toric_code";
  int rows = 12, cols = 12;
  n.read("kind", kind);
  n.read("rows", rows);
  n.read("cols", cols);
  positive(rows, n.path("rows"));
  positive(cols, n.path("cols"));
  const ReferenceKind k = wrap_config(n.path("kind"), [&] { return reference_kind_from_string(kind); });
  ReferenceDescriptor ref;
  if (k == ReferenceKind::toric_code) {
    LogicalSector sector;
    if (n.has("sector")) {
      const auto v = n.get<std::vector<int>>("sector");
      if (v.size() != 2 || std::abs(v[0]) != 1 || std::abs(v[1]) != 1) {
        throw ConfigError(n.path("sector") + ": expected [+-1, +-1]");
      }
      sector = {v[0], v[1]};
    }
    ref = ReferenceDescriptor::toric_code(rows, cols, sector);
  } else if (k == ReferenceKind::product) {
    ref = ReferenceDescriptor::product(rows, cols);
  } else {
    ref = ReferenceDescriptor::external(rows, cols, n.get<std::string>("path"), n.get<double>("gamma0"));
  }
  if (k != ReferenceKind::external_file) n.read("gamma0", ref.gamma0);
  n.finish();
  return ref;
}

}  // namespace

ReferenceDescriptor reference_from_json(const json& j) { return parse_reference(Node(j, "reference")); }

RunConfig parse_config(const json& j) {
  Node root(j, "config");
  RunConfig c;
  c.kind = wrap_config("config.experiment",
                       [&] { return experiment_kind_from_string(root.get<std::string>("experiment")); });
  if (root.has("engine")) {
    c.engine = wrap_config("config.engine", [&] { return engine_from_string(root.get<std::string>("engine")); });
  }
  if (root.has("reference")) c.reference = parse_reference(root.child("reference"));

  if (root.has("partition")) {
    Node p = root.child("partition");
    if (p.has("center")) {
      const auto v = p.get<std::vector<int>>("center");
      if (v.size() != 2) throw ConfigError(p.path("center") + ": expected [row, col]");
      c.center = {v[0], v[1]};
    }
    p.read("inner_radius", c.inner_radius);
    p.read("outer_radius", c.outer_radius);
    p.read("rotation", c.rotation);
    if (p.has("regions")) {
      p.has("lattice");
      c.regions = wrap_config(p.path("regions"), [&] { return partition_from_json(root.raw("partition")); });
      c.regions->center = c.center;
    }
    p.finish();
  }

  if (root.has("sweep")) {
    const json& sw = root.raw("sweep");
    if (!sw.is_array()) throw ConfigError("config.sweep: expected an array");
    for (std::size_t i = 0; i < sw.size(); ++i) {
      Node pt(sw[i], "config.sweep[" + std::to_string(i) + "]");
      SweepPoint s;
      pt.read("size", s.size);
      pt.read("depth", s.depth);
      pt.read("width", s.width);
      positive(s.size, pt.path("size"));
      positive(s.width, pt.path("width"));
      if (s.depth < 0) throw ConfigError(pt.path("depth") + ": must be nonnegative");
      pt.finish();
      c.sweep.push_back(s);
    }
  }
  root.read("thin_ring", c.thin_ring);

  if (root.has("circuit")) {
    Node n = root.child("circuit");
    if (n.has("family")) {
      c.circuit.family = wrap_config(n.path("family"),
                                     [&] { return circuit_family_from_string(n.get<std::string>("family")); });
    }
    n.read("depth", c.circuit.depth);
    if (c.circuit.depth < 0) throw ConfigError(n.path("depth") + ": must be nonnegative");
    n.read("within_annulus", c.circuit.within_annulus);
    if (n.has("collar")) c.circuit.collar = n.get<int>("collar");
    if (n.has("file")) c.circuit_file = n.get<std::string>("file");
    n.finish();
  }

  if (root.has("seeds")) {
    const json& s = root.raw("seeds");
    if (s.is_string()) {
      c.seeds = parse_seeds(s.get<std::string>());
    } else if (s.is_array()) {
      c.seeds.clear();
      for (const auto& v : s) {
        if (!v.is_number_unsigned()) throw ConfigError("config.seeds: expected nonnegative integers");
        c.seeds.push_back(v.get<std::uint64_t>());
      }
      if (c.seeds.empty()) throw ConfigError("config.seeds: empty");
    } else {
      throw ConfigError("config.seeds: expected a range string or an array");
    }
  }

  if (root.has("tolerances")) {
    Node n = root.child("tolerances");
    n.read("margin", c.tolerances.margin);
    n.read("markov", c.tolerances.markov);
    n.read("lemma_premise", c.tolerances.lemma_premise);
    n.read("lemma_conclusion", c.tolerances.lemma_conclusion);
    n.read("moves", c.tolerances.moves);
    n.finish();
  }
  root.read("dense_limit", c.dense_limit);
  positive(c.dense_limit, "config.dense_limit");
  root.read("threads", c.threads);

  if (root.has("mixture")) {
    Node n = root.child("mixture");
    if (n.has("probs")) {
      const auto v = n.get<std::vector<double>>("probs");
      if (v.size() != 4) throw ConfigError(n.path("probs") + ": expected four probabilities");
      std::copy(v.begin(), v.end(), c.mixture_probs.begin());
    }
    if (n.has("geometry")) {
      Node g = n.child("geometry");
      MixtureGeometry mg;
      mg.paths.primal = sites_from_json(g.raw("primal_path"), g.path("primal_path"));
      mg.paths.dual = sites_from_json(g.raw("dual_path"), g.path("dual_path"));
      mg.primal_loop = sites_from_json(g.raw("primal_loop"), g.path("primal_loop"));
      mg.dual_loop = sites_from_json(g.raw("dual_loop"), g.path("dual_loop"));
      g.finish();
      c.mixture_geometry = std::move(mg);
    }
    n.finish();
  }
  if (root.has("audit")) {
    Node n = root.child("audit");
    n.read("partitions", c.audit_partitions);
    positive(c.audit_partitions, n.path("partitions"));
    n.finish();
  }
  if (root.has("markov")) {
    Node n = root.child("markov");
    c.markov_state = n.get<std::string>("state");
    c.markov_blocks = n.get<std::string>("blocks");
    n.finish();
  }
  if (root.has("gamma_min")) {
    Node n = root.child("gamma_min");
    n.read("v_depth", c.gamma_v_depth);
    n.read("outer_radii", c.gamma_outer_radii);
    n.finish();
  }
  if (root.has("lemma1")) {
    Node n = root.child("lemma1");
    n.read("count", c.lemma_count);
    positive(c.lemma_count, n.path("count"));
    n.read("appendix_e", c.lemma_appendix_e);
    n.finish();
  }
  if (root.has("appendix_e")) {
    Node n = root.child("appendix_e");
    n.read("p_next_to_gate", c.p_next_to_gate);
    n.finish();
  }
  if (root.has("output")) {
    Node n = root.child("output");
    n.read("dir", c.output.dir);
    n.read("csv", c.output.csv);
    n.read("jsonl", c.output.jsonl);
    n.read("report", c.output.report);
    n.read("summary", c.output.summary);
    n.finish();
  }
  root.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

namespace {

/// Runs job(i) for i in [0, n) on a bounded pool; results keep index order.
template <class R>
std::vector<R> parallel_map(std::size_t n, int threads, const std::function<R(std::size_t)>& job) {
  std::vector<R> out(n);
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::atomic<std::size_t> next{0};
  const auto loop = [&] {
    for (std::size_t i; (i = next++) < n;) out[i] = job(i);
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  return out;
}

struct Assertions {
  std::vector<std::pair<std::string, bool>> items;
  std::vector<std::string> precondition_errors;

  void check(std::string name, bool ok) { items.emplace_back(std::move(name), ok); }
  bool failed() const {
    return std::any_of(items.begin(), items.end(), [](const auto& a) { return !a.second; });
  }
  int exit_code() const {
    if (failed()) return kExitAssertion;
    return precondition_errors.empty() ? kExitOk : kExitPrecondition;
  }
};

class Artifacts {
 public:
  explicit Artifacts(const OutputPaths& paths) : paths_(paths) {
    if (const char* env = std::getenv("TEEBOUND_OUT_DIR"); env && *env) paths_.dir = env;
    fs::create_directories(paths_.dir);
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(fs::path(paths_.dir) / name);
    if (!f) throw ConfigError("cannot write '" + (fs::path(paths_.dir) / name).string() + "'");
    return f;
  }

  const OutputPaths& paths() const { return paths_; }

 private:
  OutputPaths paths_;
};

AnnulusPartition configured_partition(const RunConfig& c, const Lattice& lat) {
  if (c.regions) return *c.regions;
  return build_annulus_partition(lat, c.center, c.inner_radius, c.outer_radius, ArcSpec::rotated(c.rotation));
}

Circuit configured_circuit(const RunConfig& c, const Lattice& lat, const AnnulusPartition& p, std::uint64_t seed,
                           int depth) {
  if (c.circuit_file) return load_circuit_file(*c.circuit_file);
  CircuitSpec spec = c.circuit;
  spec.depth = depth;
  return make_circuit(lat, spec, p, seed);
}

struct BoundJob {
  std::optional<ExperimentRecord> record;
  json line;
  std::string error;
};

void run_bound(const RunConfig& c, const Artifacts& out, Assertions& as, std::ostream& log, json& timing) {
  std::vector<CollarReduction> reductions;
  ReferenceDescriptor thin_ref = c.reference;
  if (c.thin_ring) {
    thin_ref.rows = thin_ref.cols = 6;
    reductions = thin_ring_reductions(thin_ref);
    log << "thin ring: " << reductions.size() << " certified reductions\n";
  }
  const auto jobs = parallel_map<BoundJob>(c.seeds.size(), c.threads, [&](std::size_t i) {
    const std::uint64_t seed = c.seeds[i];
    BoundJob job;
    try {
      ReferenceDescriptor ref = c.reference;
      AnnulusPartition p;
      Circuit u;
      if (c.thin_ring) {
        ref = thin_ref;
        const CollarReduction& r = reductions[seed % reductions.size()];
        p = r.partition;
        u = c.circuit_file ? load_circuit_file(*c.circuit_file)
                           : collar_circuit(ref.lattice(), r, c.circuit.family, seed);
      } else if (!c.sweep.empty()) {
        const SweepPoint& pt = c.sweep[seed % c.sweep.size()];
        ref.rows = ref.cols = pt.size;
        const Lattice lat = ref.lattice();
        std::mt19937_64 rng(seed);
        const Site centre{static_cast<int>(rng() % static_cast<std::uint64_t>(pt.size)),
                          static_cast<int>(rng() % static_cast<std::uint64_t>(pt.size))};
        const double rot = 15.0 * static_cast<double>(rng() % 6);
        p = build_annulus_partition(lat, centre, c.inner_radius, c.inner_radius + pt.width, ArcSpec::rotated(rot));
        u = configured_circuit(c, lat, p, seed, pt.depth);
      } else {
        const Lattice lat = ref.lattice();
        p = configured_partition(c, lat);
        u = configured_circuit(c, lat, p, seed, c.circuit.depth);
      }
      job.record = tee_bound_experiment(ref, u, p, seed, c.engine, c.dense_limit);
      job.line = record_to_json(*job.record, p, ref.lattice(), u);
      job.line["reference"] = reference_to_json(ref);
      job.line["dense_limit"] = c.dense_limit;
    } catch (const GeometryError& e) {
      job.error = e.what();
    } catch (const ResourceError& e) {
      job.error = e.what();
    }
    return job;
  });

  auto csv = out.open(out.paths().csv);
  auto jsonl = out.open(out.paths().jsonl);
  csv << csv_header() << '\n';
  bool margins_ok = true, quantized = true;
  std::size_t flagged = 0, rows = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& job = jobs[i];
    if (!job.record) {
      as.precondition_errors.push_back("seed " + std::to_string(c.seeds[i]) + ": " + job.error);
      continue;
    }
    const auto& r = *job.record;
    ++rows;
    csv << csv_row(r) << '\n';
    jsonl << job.line.dump() << '\n';
    timing["seeds"].push_back({{"seed", r.seed}, {"wall_time", r.wall_time}});
    if (!r.precondition_ok) {
      ++flagged;
      continue;
    }
    margins_ok = margins_ok && r.margin >= -c.tolerances.margin;
    if (c.engine == Engine::stabilizer) {
      const double k = r.margin / std::log(2.0);
      quantized = quantized && std::abs(k - std::round(k)) < 1e-9;
    }
  }
  if (flagged > 0) {
    as.precondition_errors.push_back(std::to_string(flagged) + " rows violate the depth/width precondition");
  }
  log << rows << " rows written, " << flagged << " flagged\n";
  as.check("margin nonnegative on every row meeting the preconditions", margins_ok);
  if (c.engine == Engine::stabilizer) as.check("margins are integer multiples of log 2", quantized);
}

void run_audit(const RunConfig& c, const Artifacts& out, Assertions& as, std::ostream& log) {
  const Lattice lat = c.reference.lattice();
  const auto parts = c.regions ? std::vector<AnnulusPartition>{*c.regions}
                               : sample_partitions(lat, c.audit_partitions, c.seeds.front());
  const AuditReport rep = reference_state_audit(c.reference, parts);
  json j = {{"reference", reference_to_json(c.reference)}, {"gamma0_observed", rep.gamma0_observed}};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& e = rep.partitions[i];
    json pj = partition_to_json(lat, parts[i]);
    pj["cmi_bits"] = e.cmi_bits;
    pj["cmi"] = e.cmi;
    pj["mi_bits"] = {{rep.mutual_informations[2 * i].pair, rep.mutual_informations[2 * i].bits},
                     {rep.mutual_informations[2 * i + 1].pair, rep.mutual_informations[2 * i + 1].bits}};
    j["partitions"].push_back(std::move(pj));
  }
  out.open(out.paths().report) << j.dump(2) << '\n';
  log << parts.size() << " partitions, observed gamma " << format_double(rep.gamma0_observed) << " nats\n";
  as.check("CMI identical on every partition", rep.cmi_constant);
  as.check("non-adjacent mutual informations vanish", rep.mi_zero);
  as.check("observed gamma matches the reference descriptor", rep.matches_descriptor);
}

void run_mixture(const RunConfig& c, const Artifacts& out, Assertions& as, std::ostream& log) {
  const Lattice lat = c.reference.lattice();
  const AnnulusPartition p = configured_partition(c, lat);
  auto jsonl = out.open(out.paths().jsonl);
  bool orth = true, equal = true, gain = true, lower = true;
  for (std::uint64_t seed : c.seeds) {
    const Circuit u = configured_circuit(c, lat, p, seed, c.circuit.depth);
    const MixtureReport r = anyon_mixture_check(c.reference, p, u, c.mixture_probs, c.engine, c.mixture_geometry);
    jsonl << json{{"seed", seed},
                  {"engine", to_string(r.engine)},
                  {"probs", r.probs},
                  {"witness", r.witness},
                  {"max_overlap", r.max_overlap},
                  {"max_entropy_deviation", r.max_entropy_deviation},
                  {"entropy_difference", r.entropy_difference},
                  {"shannon", r.shannon},
                  {"cmi_sigma_tilde", r.cmi_sigma_tilde}}
                 .dump()
          << '\n';
    orth = orth && r.orthogonal;
    equal = equal && r.max_entropy_deviation <= 1e-9;
    gain = gain && r.eq10;
    lower = lower && r.eq11;
    log << "seed " << seed << ": entropy gain " << format_double(r.entropy_difference) << ", Shannon "
        << format_double(r.shannon) << ", CMI " << format_double(r.cmi_sigma_tilde) << '\n';
  }
  as.check("mixture components mutually orthogonal on ABC", orth);
  as.check("component entropies equal", equal);
  as.check("entropy gain equals the Shannon entropy of the mixture", gain);
  as.check("CMI at least the Shannon entropy", lower);
}

void run_deformation(const RunConfig& c, const Artifacts& out, Assertions& as, std::ostream& log) {
  const Lattice lat = c.reference.lattice();
  const AnnulusPartition p = configured_partition(c, lat);
  auto jsonl = out.open(out.paths().jsonl);
  bool e12 = true, e13 = true, e14 = true, margin = true;
  for (std::uint64_t seed : c.seeds) {
    const Circuit u = configured_circuit(c, lat, p, seed, c.circuit.depth);
    try {
      const DeformationReport r = deformation_chain_check(c.reference, u, p);
      jsonl << json{{"seed", seed},
                    {"degenerate", r.degenerate},
                    {"removed_first", r.removed_first},
                    {"removed_second", r.removed_second},
                    {"cmi_u", r.cmi_u},
                    {"cmi_u1", r.cmi_u1},
                    {"cmi_u1_shrunk", r.cmi_u1_shrunk},
                    {"cmi_u2", r.cmi_u2},
                    {"margin", r.margin()}}
                   .dump()
            << '\n';
      e12 = e12 && r.eq12;
      e13 = e13 && r.eq13;
      e14 = e14 && r.eq14;
      margin = margin && r.margin() >= -c.tolerances.margin;
    } catch (const PreconditionError& e) {
      as.precondition_errors.push_back("seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  log << c.seeds.size() - as.precondition_errors.size() << " seeds completed\n";
  as.check("CMI unchanged when gates in the hole are dropped", e12);
  as.check("shrinking A does not increase CMI", e13);
  as.check("CMI unchanged when collar gates of A' are dropped", e14);
  as.check("final margin nonnegative", margin);
}

void run_appendix_e(const RunConfig& c, const Artifacts& out, Assertions& as, std::ostream& log) {
  auto jsonl = out.open(out.paths().jsonl);
  const double tol = c.tolerances.markov;
  bool gap = true, marg = true, petz = true, key = true, refc = true, decomp = true, engines = true, lemma = true;
  for (std::uint64_t seed : c.seeds) {
    ReferenceDescriptor ref = c.reference;
    ref.rows = ref.cols = 6;
    const ThinAnnulusReport r = appendix_e_fact_checks(ref, thin_annulus_geometry(seed, c.p_next_to_gate), tol,
                                                     c.dense_limit);
    jsonl << json{{"seed", seed},
                  {"Y", r.Y.qubits()},
                  {"u_bar", r.u_bar.qubits()},
                  {"v", r.v.qubits()},
                  {"entropy_gap", r.fact_first},
                  {"marginal_p", r.fact_second_p},
                  {"marginal_q", r.fact_second_q},
                  {"petz_lambda", r.fact_third_lambda},
                  {"petz_sigma", r.fact_third_sigma},
                  {"cmi_key", r.cmi_fact_key},
                  {"cmi_reference", r.cmi_reference},
                  {"decomposition_residual", r.eq6_residual},
                  {"lemma_difference", r.lemma.entropy_difference},
                  {"lemma_recovered", r.lemma.recovered_entropy_difference}}
                 .dump()
          << '\n';
    gap = gap && r.premise_locally_markov && std::abs(r.fact_first - 2 * r.gamma0) <= tol;
    marg = marg && r.fact_second_p <= tol && r.fact_second_q <= tol;
    petz = petz && r.fact_third_lambda <= tol && r.fact_third_sigma <= tol;
    key = key && std::abs(r.cmi_fact_key) <= tol;
    refc = refc && std::abs(r.cmi_reference) <= tol;
    decomp = decomp && std::abs(r.eq6_residual) <= tol;
    engines = engines && std::abs(r.stab_entropy_y - r.dense_entropy_y) <= 1e-10;
    lemma = lemma && r.lemma.premises_hold && r.lemma.conclusion_holds;
    log << "seed " << seed << ": |Y| = " << r.Y.size() << ", entropy gap " << format_double(r.fact_first) << '\n';
  }
  as.check("maximum-entropy state exceeds the reference by 2 gamma0", gap);
  as.check("circuit images agree on P and on Q", marg);
  as.check("Petz recovery of the collar is exact", petz);
  as.check("collar CMI against Q vanishes", key);
  as.check("collar CMI against the rest of ABC vanishes", refc);
  as.check("CMI decomposes into canonical CMI plus entropy gap", decomp);
  as.check("stabilizer and dense entropies of Y agree", engines);
  as.check("entropy difference survives the recovery channels", lemma);
}

std::vector<Labels> parse_blocks(const std::string& spec, const Labels& labels) {
  std::vector<Labels> out;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ',');) {
    const auto dash = part.find('-');
    std::size_t lo = 0, hi = 0;
    try {
      lo = std::stoul(part.substr(0, dash));
      hi = dash == std::string::npos ? lo : std::stoul(part.substr(dash + 1));
    } catch (const std::exception&) {
      throw ConfigError("markov.blocks: bad block '" + part + "'");
    }
    if (hi < lo || hi >= labels.size()) throw ConfigError("markov.blocks: block '" + part + "' out of range");
    Labels b;
    for (std::size_t k = lo; k <= hi; ++k) b.push_back(labels[k]);
    out.push_back(std::move(b));
  }
  return out;
}

void run_markov(const RunConfig& c, const Artifacts& out, Assertions& as, std::ostream& log) {
  if (c.markov_state.empty()) throw ConfigError("config.markov.state: required");
  const DensityMatrix rho = wrap_config("config.markov.state", [&] { return load_binary(c.markov_state); });
  const auto blocks = parse_blocks(c.markov_blocks, rho.labels());
  const OrderedChain chain(rho, blocks);
  const double tol = c.tolerances.markov;
  const MarkovReport full = is_markov_chain(chain, tol);
  json j = markov_report_to_json(full, blocks);
  if (blocks.size() >= 4) {
    const MarkovReport local = is_locally_markov(chain, tol);
    const ConstancyScan scan = cmi_constancy_scan(chain);
    j["flags"]["locally_markov"] = local.is_locally_markov;
    j["full_cover_spread"] = scan.spread;
    as.check("local Markov property agrees with constant full-cover CMI",
             local.is_locally_markov == (scan.spread <= tol));
    log << "locally Markov: " << local.is_locally_markov << ", full-cover CMI spread " << format_double(scan.spread)
        << '\n';
  }
  log << "Markov chain: " << full.is_markov << '\n';
  out.open(out.paths().report) << j.dump(2) << '\n';
}

void run_gamma_min(const RunConfig& c, const Artifacts& out, Assertions& as, std::ostream& log) {
  const Lattice lat = c.reference.lattice();
  std::vector<AnnulusPartition> ladder;
  for (int r : c.gamma_outer_radii) {
    if (r - c.inner_radius < c.gamma_v_depth + 1) {
      as.precondition_errors.push_back("R = " + std::to_string(r) + ": width " + std::to_string(r - c.inner_radius) +
                                       " below depth + 1");
      continue;
    }
    ladder.push_back(build_annulus_partition(lat, c.center, c.inner_radius, r, ArcSpec::rotated(c.rotation)));
  }
  if (ladder.empty()) throw PreconditionError("no outer radius leaves width depth + 1");
  auto jsonl = out.open(out.paths().jsonl);
  bool attained = true, none_below = true;
  for (std::uint64_t seed : c.seeds) {
    const Circuit v = random_shallow_clifford(lat, c.gamma_v_depth, seed);
    const GammaMinReport r = gamma_min_estimate(c.reference, v, {Circuit{}, invert(v)}, ladder);
    json rows = json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"outer_radius", row.outer_radius}, {"gammas", row.gammas}, {"minimum", row.minimum}});
    jsonl << json{{"seed", seed}, {"rows", rows}}.dump() << '\n';
    attained = attained && r.inverse_achieves_gamma0;
    none_below = none_below && r.none_below_gamma0;
    log << "seed " << seed << ": minimum " << format_double(r.rows.front().minimum) << " nats at R = "
        << r.rows.front().outer_radius << '\n';
  }
  as.check("inverse circuit attains gamma0 at every radius", attained);
  as.check("no candidate falls below gamma0", none_below);
}

void run_lemma1(const RunConfig& c, const Artifacts& out, Assertions& as, std::ostream& log) {
  const auto instances = lemma1_instances(c.lemma_count, c.seeds.front(), c.lemma_appendix_e);
  LemmaTolerances tol;
  tol.premise_marginal = c.tolerances.lemma_premise;
  tol.premise_roundtrip = c.tolerances.lemma_premise;
  tol.conclusion = c.tolerances.lemma_conclusion;
  auto jsonl = out.open(out.paths().jsonl);
  bool premises = true, conclusion = true;
  for (const auto& inst : instances) {
    const LemmaReport r = entropy_difference_lemma_check(inst.rho, inst.rho_prime, inst.P, inst.Q, inst.R, inst.T, tol);
    jsonl << json{{"instance", inst.name},
                  {"marginal_p", r.marginal_p},
                  {"marginal_q", r.marginal_q},
                  {"roundtrip_rho", r.roundtrip_rho},
                  {"roundtrip_rho_prime", r.roundtrip_rho_prime},
                  {"entropy_difference", r.entropy_difference},
                  {"recovered_entropy_difference", r.recovered_entropy_difference}}
                 .dump()
          << '\n';
    premises = premises && r.premises_hold;
    conclusion = conclusion && r.conclusion_holds;
  }
  log << instances.size() << " instances\n";
  as.check("premises hold on every instance", premises);
  as.check("entropy difference preserved on every instance", conclusion);
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  Assertions as;
  json timing = {{"experiment", to_string(config.kind)}};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Artifacts out(config.output);
    switch (config.kind) {
      case ExperimentKind::bound: run_bound(config, out, as, log, timing); break;
      case ExperimentKind::audit: run_audit(config, out, as, log); break;
      case ExperimentKind::mixture: run_mixture(config, out, as, log); break;
      case ExperimentKind::deformation: run_deformation(config, out, as, log); break;
      case ExperimentKind::appendix_e: run_appendix_e(config, out, as, log); break;
      case ExperimentKind::markov: run_markov(config, out, as, log); break;
      case ExperimentKind::gamma_min: run_gamma_min(config, out, as, log); break;
      case ExperimentKind::lemma1: run_lemma1(config, out, as, log); break;
    }
    timing["total_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.open("timing.json") << timing.dump(2) << '\n';

    auto summary = out.open(out.paths().summary);
    for (auto* s : {&log, static_cast<std::ostream*>(&summary)}) {
      for (const auto& [name, ok] : as.items) *s << (ok ? "PASS " : "FAIL ") << name << '\n';
      for (const auto& e : as.precondition_errors) *s << "PRECONDITION " << e << '\n';
    }
    return as.exit_code();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const GeometryError& e) {
    log << (dynamic_cast<const PreconditionError*>(&e) ? "precondition error: " : "geometry error: ") << e.what()
        << '\n';
    return kExitPrecondition;
  } catch (const ResourceError& e) {
    log << "resource error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    log << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  }
}

ExperimentRecord replay_record(const json& record) {
  try {
    const ReferenceDescriptor ref = reference_from_json(record.at("reference"));
    const AnnulusPartition p = partition_from_json(record.at("partition"));
    const Circuit u = circuit_from_json(record.at("circuit"));
    return tee_bound_experiment(ref, u, p, record.at("seed").get<std::uint64_t>(),
                                engine_from_string(record.at("engine").get<std::string>()),
                                record.value("dense_limit", kDefaultDenseLimit));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("record: ") + e.what());
  }
}

}  // namespace teebound
