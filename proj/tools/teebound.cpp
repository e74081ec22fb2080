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


#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "teebound/dense.hpp"
#include "teebound/errors.hpp"
#include "teebound/io.hpp"
#include "teebound/runner.hpp"
#include "teebound/stab.hpp"

namespace {

using teebound::json;

struct Flags {
  std::string config;
  std::string engine, reference, state_file, seeds, family, circuit_file, out_dir, csv, jsonl, report, summary;
  std::string blocks, markov_state;
  int rows = 0, cols = 0, depth = -1, inner = -1, outer = -1, collar = -1, threads = -1, dense_limit = 0;
  int partitions = 0, count = 0, v_depth = 0;
  double gamma0 = -1, rotation = -1;
  std::vector<int> center, outer_radii;
  std::vector<double> probs;
  bool within_annulus = false, thin_ring = false, p_next_to_gate = false, no_appendix_e = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("-c,--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--engine", f.engine, "stabilizer or dense");
  app->add_option("--reference", f.reference, "toric_code, product or external_file");
  app->add_option("--state-file", f.state_file, "stabilizer dump for external references");
  app->add_option("--gamma0", f.gamma0, "expected gamma of an external reference (nats)");
  app->add_option("--rows", f.rows, "lattice rows");
  app->add_option("--cols", f.cols, "lattice columns");
  app->add_option("--L", f.rows, "square lattice size");
  app->add_option("--seeds", f.seeds, "seed range a..b or list a,b,c");
  app->add_option("--center", f.center, "annulus centre plaquette row col")->expected(2);
  app->add_option("--inner-radius", f.inner, "inner Chebyshev radius");
  app->add_option("--outer-radius", f.outer, "outer Chebyshev radius");
  app->add_option("--rotation", f.rotation, "arc rotation in degrees");
  app->add_option("--family", f.family, "identity, clifford or haar");
  app->add_option("--depth", f.depth, "circuit depth");
  app->add_option("--collar", f.collar, "keep gates within this distance of B and C");
  app->add_flag("--within-annulus", f.within_annulus, "keep gates inside ABC only");
  app->add_option("--circuit-file", f.circuit_file, "JSON circuit replacing the generated one")
      ->check(CLI::ExistingFile);
  app->add_option("--dense-limit", f.dense_limit, "largest region handed to the dense engine");
  app->add_option("--threads", f.threads, "worker threads, 0 for all cores");
  app->add_option("--out", f.out_dir, "output directory");
  app->add_option("--csv", f.csv, "CSV file name");
  app->add_option("--jsonl", f.jsonl, "JSON-lines file name");
  app->add_option("--report", f.report, "JSON report file name");
  app->add_option("--summary", f.summary, "summary file name");
}

json overrides(const std::string& experiment, const Flags& f) {
  json j;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw teebound::ConfigError(f.config + ": " + e.what());
    }
    if (!j.is_object()) throw teebound::ConfigError(f.config + ": expected an object");
  }
  j["experiment"] = experiment;
  if (!f.engine.empty()) j["engine"] = f.engine;
  if (!f.reference.empty()) j["reference"]["kind"] = f.reference;
  if (!f.state_file.empty()) j["reference"]["path"] = f.state_file;
  if (f.gamma0 >= 0) j["reference"]["gamma0"] = f.gamma0;
  if (f.rows > 0) {
    j["reference"]["rows"] = f.rows;
    j["reference"]["cols"] = f.cols > 0 ? f.cols : f.rows;
  } else if (f.cols > 0) {
    j["reference"]["cols"] = f.cols;
  }
  if (!f.seeds.empty()) j["seeds"] = f.seeds;
  if (!f.center.empty()) j["partition"]["center"] = f.center;
  if (f.inner >= 0) j["partition"]["inner_radius"] = f.inner;
  if (f.outer >= 0) j["partition"]["outer_radius"] = f.outer;
  if (f.rotation >= 0) j["partition"]["rotation"] = f.rotation;
  if (!f.family.empty()) j["circuit"]["family"] = f.family;
  if (f.depth >= 0) j["circuit"]["depth"] = f.depth;
  if (f.collar >= 0) j["circuit"]["collar"] = f.collar;
  if (f.within_annulus) j["circuit"]["within_annulus"] = true;
  if (!f.circuit_file.empty()) j["circuit"]["file"] = f.circuit_file;
  if (f.thin_ring) j["thin_ring"] = true;
  if (f.dense_limit > 0) j["dense_limit"] = f.dense_limit;
  if (f.threads >= 0) j["threads"] = f.threads;
  if (!f.out_dir.empty()) j["output"]["dir"] = f.out_dir;
  if (!f.csv.empty()) j["output"]["csv"] = f.csv;
  if (!f.jsonl.empty()) j["output"]["jsonl"] = f.jsonl;
  if (!f.report.empty()) j["output"]["report"] = f.report;
  if (!f.summary.empty()) j["output"]["summary"] = f.summary;
  if (!f.probs.empty()) j["mixture"]["probs"] = f.probs;
  if (f.partitions > 0) j["audit"]["partitions"] = f.partitions;
  if (!f.markov_state.empty()) j["markov"]["state"] = f.markov_state;
  if (!f.blocks.empty()) j["markov"]["blocks"] = f.blocks;
  if (f.v_depth > 0) j["gamma_min"]["v_depth"] = f.v_depth;
  if (!f.outer_radii.empty()) j["gamma_min"]["outer_radii"] = f.outer_radii;
  if (f.count > 0) j["lemma1"]["count"] = f.count;
  if (f.no_appendix_e) j["lemma1"]["appendix_e"] = false;
  if (f.p_next_to_gate) j["appendix_e"]["p_next_to_gate"] = true;
  return j;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');)
    if (!t.empty()) out.push_back(t);
  return out;
}

// "3,4,7-9" or a JSON region file.
teebound::Region parse_region(const std::string& spec) {
  if (std::ifstream in(spec); in) {
    try {
      return teebound::region_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw teebound::ConfigError(spec + ": " + e.what());
    }
  }
  std::vector<int> qs;
  for (const auto& t : split(spec)) {
    try {
      const auto dash = t.find('-');
      const int lo = std::stoi(t.substr(0, dash));
      const int hi = dash == std::string::npos ? lo : std::stoi(t.substr(dash + 1));
      for (int q = lo; q <= hi; ++q) qs.push_back(q);
    } catch (const std::exception&) {
      throw teebound::ConfigError("region: bad entry '" + t + "'");
    }
  }
  if (qs.empty()) throw teebound::ConfigError("region: empty");
  return teebound::Region("region", qs);
}

int stab_entropy(const std::string& state_path, const std::string& region) {
  std::ifstream in(state_path);
  if (!in) throw teebound::ConfigError("cannot open '" + state_path + "'");
  const auto s = teebound::StabilizerState::load(in);
  const auto r = parse_region(region);
  for (int q : r.qubits())
    if (q < 0 || static_cast<std::size_t>(q) >= s.num_qubits())
      throw teebound::ConfigError("region: qubit " + std::to_string(q) + " outside the state");
  const int bits = teebound::entropy_bits(s, r);
  std::cout << "bits " << bits << "\nnats " << teebound::format_double(teebound::entropy(s, r)) << '\n';
  return teebound::kExitOk;
}

int dense_entropy(const std::string& path, const std::string& keep) {
  const auto rho = teebound::load_binary(path);
  const auto labels = keep.empty() ? rho.labels() : split(keep);
  for (const auto& l : labels)
    if (!rho.has_label(l)) throw teebound::ConfigError("keep: no factor '" + l + "'");
  const double s = teebound::entropy(rho, labels);
  std::cout << "nats " << teebound::format_double(s) << "\nlog2 " << teebound::format_double(s / std::log(2.0))
            << '\n';
  return teebound::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spurious topological entanglement entropy bound experiments"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::string> summary_paths;

  const std::vector<std::pair<std::string, std::string>> kinds{
      {"audit", "check a reference state on sampled annuli"},
      {"bound", "CMI margins after shallow circuits"},
      {"mixture", "anyon mixture entropy and CMI checks"},
      {"deform", "deformation chain from the circuit to a collar circuit"},
      {"appendix-e", "facts of the thin-annulus construction"},
      {"markov", "Markov chain scans of a dense state"},
      {"gamma-min", "minimum over candidate circuits of half the CMI"},
      {"lemma1", "entropy difference under recovery channels"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : kinds) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, f);
    subs.push_back(sub);
  }
  subs[1]->add_flag("--thin-ring", f.thin_ring, "use certified reductions of the thin 6x6 ring");
  subs[2]->add_option("--probs", f.probs, "probabilities of 1, e, m, epsilon")->expected(4);
  subs[0]->add_option("--partitions", f.partitions, "number of sampled annuli");
  subs[5]->add_option("--state", f.markov_state, "binary density matrix dump")->check(CLI::ExistingFile);
  subs[5]->add_option("--blocks", f.blocks, "factor index ranges, e.g. 0-1,2-3,4-5,6-7");
  subs[6]->add_option("--v-depth", f.v_depth, "depth of the preparing circuit");
  subs[6]->add_option("--outer-radii", f.outer_radii, "outer radii of the annulus ladder");
  subs[7]->add_option("--count", f.count, "number of instances");
  subs[7]->add_flag("--no-appendix-e", f.no_appendix_e, "skip the thin-annulus instance");
  subs[4]->add_flag("--p-next-to-gate", f.p_next_to_gate, "place P next to the collar gate");

  auto* summarize = app.add_subcommand("summarize", "min and mean margin per depth and width");
  summarize->add_option("paths", summary_paths, "result CSV files");

  std::string state_path, region, keep;
  auto* stab = app.add_subcommand("stab", "stabilizer state utilities");
  stab->require_subcommand(1);
  auto* stab_s = stab->add_subcommand("entropy", "entropy of a region of a dumped stabilizer state");
  stab_s->add_option("--state", state_path, "tableau dump")->required()->check(CLI::ExistingFile);
  stab_s->add_option("--region", region, "qubits as 3,4,7-9 or a JSON region file")->required();
  auto* dense = app.add_subcommand("dense", "dense state utilities");
  dense->require_subcommand(1);
  auto* dense_s = dense->add_subcommand("entropy", "entropy of a marginal of a binary density matrix");
  dense_s->add_option("--in", state_path, "binary dump")->required()->check(CLI::ExistingFile);
  dense_s->add_option("--keep", keep, "factor labels to keep, comma separated (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : teebound::kExitConfig;
  }

  try {
    if (stab_s->parsed()) return stab_entropy(state_path, region);
    if (dense_s->parsed()) return dense_entropy(state_path, keep);
    if (summarize->parsed()) {
      teebound::print_summary(std::cout, teebound::summarize(summary_paths));
      return teebound::kExitOk;
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const auto config = teebound::parse_config(overrides(kinds[i].first, f));
      return teebound::run(config, std::cout);
    }
  } catch (const teebound::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return teebound::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return teebound::kExitConfig;
  }
  return teebound::kExitConfig;
}
