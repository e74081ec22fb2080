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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "teebound/errors.hpp"
#include "teebound/io.hpp"
#include "teebound/runner.hpp"
#include "teebound/stab.hpp"

namespace teebound {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("teebound_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(TEEBOUND_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsAndFields) {
  const auto c = parse_config(json::parse(R"({"experiment": "bound", "seeds": [3, 7],
      "partition": {"center": [4, 6], "inner_radius": 2, "outer_radius": 5},
      "circuit": {"family": "haar", "depth": 2}, "engine": "dense"})"));
  EXPECT_EQ(c.kind, ExperimentKind::bound);
  EXPECT_EQ(c.engine, Engine::dense);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 7}));
  EXPECT_EQ(c.center, (Site{4, 6}));
  EXPECT_EQ(c.inner_radius, 2);
  EXPECT_EQ(c.outer_radius, 5);
  EXPECT_EQ(c.circuit.family, CircuitFamily::haar);
  EXPECT_EQ(c.circuit.depth, 2);
  EXPECT_DOUBLE_EQ(c.tolerances.margin, 1e-8);
}

TEST(Config, UnknownKeysNameTheirPath) {
  EXPECT_EQ(config_error(json::parse(R"({"experiment": "bound", "circuit": {"depht": 2}})")),
            "config.circuit.depht: unknown key");
  EXPECT_EQ(config_error(json::parse(R"({"experiment": "bound", "colour": 1})")), "config.colour: unknown key");
  EXPECT_NE(config_error(json::parse(R"({"experiment": "bound", "sweep": [{"size": 12, "deep": 1}]})"))
                .find("config.sweep[0].deep"),
            std::string::npos);
}

TEST(Config, BadValues) {
  EXPECT_NE(config_error(json::parse(R"({"experiment": "nope"})")).find("config.experiment"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({})")).find("experiment"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"experiment": "bound", "circuit": {"depth": -1}})")).find("depth"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"experiment": "bound", "engine": "gpu"})")).find("config.engine"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"experiment": "mixture", "mixture": {"probs": [1, 0]}})")).find("probs"),
            std::string::npos);
  EXPECT_FALSE(config_error(json::parse(R"({"experiment": "bound", "seeds": [-1]})")).empty());
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, Seeds) {
  EXPECT_EQ(parse_seeds("2..5"), (std::vector<std::uint64_t>{2, 3, 4, 5}));
  EXPECT_EQ(parse_seeds("9,1,4"), (std::vector<std::uint64_t>{9, 1, 4}));
  EXPECT_EQ(parse_seeds("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_THROW(parse_seeds("5..2"), ConfigError);
  EXPECT_THROW(parse_seeds("a..3"), ConfigError);
  EXPECT_THROW(parse_seeds("1,,2"), ConfigError);
  EXPECT_THROW(parse_seeds(""), ConfigError);
  EXPECT_THROW(parse_seeds("-3"), ConfigError);
}

TEST(Csv, ColumnsAndFormatting) {
  EXPECT_EQ(csv_columns().size(), 23u);
  EXPECT_EQ(csv_header().substr(0, 10), "seed,rows,");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(std::log(2.0))), std::log(2.0));
}

TEST(Csv, GoldenFileIsReproduced) {
  const fs::path data = TEEBOUND_TEST_DATA;
  RunConfig c = load_config((data / "golden_config.json").string());
  c.output.dir = scratch("golden").string();
  std::ostringstream log;
  ASSERT_EQ(run(c, log), kExitOk) << log.str();
  EXPECT_EQ(slurp(fs::path(c.output.dir) / "runs.csv"), slurp(data / "golden_runs.csv"));
}

TEST(Jsonl, ReplayIsBitIdenticalAndRunsAreDeterministic) {
  const fs::path data = TEEBOUND_TEST_DATA;
  RunConfig c = load_config((data / "golden_config.json").string());
  c.seeds = {11, 12, 13};
  const fs::path a = scratch("replay_a"), b = scratch("replay_b");
  std::ostringstream log;
  c.output.dir = a.string();
  ASSERT_EQ(run(c, log), kExitOk);
  c.output.dir = b.string();
  c.threads = 1;
  ASSERT_EQ(run(c, log), kExitOk);
  for (const char* f : {"runs.csv", "runs.jsonl", "summary.txt"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

  std::ifstream in(a / "runs.jsonl");
  std::size_t n = 0;
  for (std::string line; std::getline(in, line); ++n) {
    const json rec = json::parse(line);
    const auto r = replay_record(rec);
    EXPECT_EQ(r.s_ab, rec.at("entropies").at("s_ab").get<double>());
    EXPECT_EQ(r.s_bc, rec.at("entropies").at("s_bc").get<double>());
    EXPECT_EQ(r.s_b, rec.at("entropies").at("s_b").get<double>());
    EXPECT_EQ(r.s_abc, rec.at("entropies").at("s_abc").get<double>());
    EXPECT_EQ(r.cmi, rec.at("cmi").get<double>());
  }
  EXPECT_EQ(n, 3u);
}

TEST(Circuits, JsonRoundTrip) {
  const Lattice lat(6, 6);
  Circuit c = random_shallow_clifford(lat, 2, 4);
  const Circuit haar = random_shallow_unitary(lat, 1, 5);
  for (const auto& layer : haar.layers()) c.add_layer(layer);
  const Circuit back = circuit_from_json(json::parse(circuit_to_json(c).dump()));
  EXPECT_EQ(back, c);
  EXPECT_THROW(circuit_from_json(json::parse(R"([[{"kind": "warp", "support": [0]}]])")), std::exception);
}

TEST(Partition, JsonRoundTrip) {
  const Lattice lat(12, 12);
  const auto p = build_annulus_partition(lat, {5, 6}, 1, 4, ArcSpec::rotated(30));
  const auto back = partition_from_json(json::parse(partition_to_json(lat, p).dump()));
  EXPECT_EQ(back.A, p.A);
  EXPECT_EQ(back.B1, p.B1);
  EXPECT_EQ(back.B2, p.B2);
  EXPECT_EQ(back.C, p.C);
  EXPECT_EQ(back.inner_radius, 1);
  EXPECT_EQ(back.outer_radius, 4);
  EXPECT_DOUBLE_EQ(back.rotation, 30);
}

const char* kHeader =
    "seed,rows,cols,center_r,center_c,inner_radius,outer_radius,width,depth,gates,support,engine,"
    "precondition_ok,s_ab,s_bc,s_b,s_abc,cmi,bound,margin,cmi_log2,bound_log2,margin_log2\n";

TEST(Summarize, EmptySingleAndGrouped) {
  const fs::path dir = scratch("summary");
  write(dir / "empty.csv", kHeader);
  EXPECT_TRUE(summarize({(dir / "empty.csv").string()}).empty());

  write(dir / "one.csv", std::string(kHeader) +
                             "1,12,12,5,5,1,4,3,2,9,9,stabilizer,1,1,1,1,1,2,1.5,0.5,3,2,1\n");
  const auto one = summarize({(dir / "one.csv").string()});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].depth, 2);
  EXPECT_EQ(one[0].width, 3);
  EXPECT_EQ(one[0].runs, 1u);
  EXPECT_DOUBLE_EQ(one[0].min_margin, 0.5);

  const auto two = summarize({(dir / "one.csv").string(), (fs::path(TEEBOUND_TEST_DATA) / "golden_runs.csv").string()});
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].runs, 7u);
  EXPECT_DOUBLE_EQ(two[0].min_margin, 0);
  std::ostringstream out;
  print_summary(out, two);
  EXPECT_NE(out.str().find("7"), std::string::npos);
}

TEST(Summarize, MalformedLineIsReported) {
  const fs::path dir = scratch("malformed");
  write(dir / "bad.csv", std::string(kHeader) +
                             "1,12,12,5,5,1,4,3,2,9,9,stabilizer,1,1,1,1,1,2,1.5,0.5,3,2,1\n"
                             "2,12,12,5,5,1,4,3,2,9,9,stabilizer,1,1,1,1,1,2,1.5,oops,3,2,1\n");
  try {
    summarize({(dir / "bad.csv").string()});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(summarize({(dir / "missing.csv").string()}), ConfigError);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(cli("bound --L 12 --seeds 0..2 --depth 1" + out, dir / "ok.log"), 0) << slurp(dir / "ok.log");
  EXPECT_TRUE(fs::exists(dir / "runs.csv"));

  // Depth above the annulus width: rows are written but flagged.
  EXPECT_EQ(cli("bound --L 12 --seeds 0..1 --depth 3 --inner-radius 1 --outer-radius 3" + out, dir / "pre.log"), 3)
      << slurp(dir / "pre.log");
  EXPECT_NE(slurp(dir / "pre.log").find("PRECONDITION"), std::string::npos);

  write(dir / "typo.json", R"({"experiment": "bound", "circuit": {"depht": 2}})");
  EXPECT_EQ(cli("bound -c " + (dir / "typo.json").string() + out, dir / "typo.log"), 4);
  EXPECT_NE(slurp(dir / "typo.log").find("config.circuit.depht"), std::string::npos);

  EXPECT_EQ(cli("bound --family haar --L 12 --seeds 0" + out, dir / "engine.log"), 4);
  EXPECT_EQ(cli("appendix-e --seeds 1 --p-next-to-gate" + out, dir / "p.log"), 3);
  EXPECT_EQ(cli("bound --engine dense --dense-limit 10 --L 12 --seeds 0 --family identity" + out, dir / "res.log"), 3);
  EXPECT_EQ(cli("summarize " + (dir / "runs.csv").string(), dir / "sum.log"), 0) << slurp(dir / "sum.log");
}

TEST(Cli, MarkovScanOfADumpedState) {
  const fs::path dir = scratch("markov");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
  psi(0) = psi(15) = 1 / std::sqrt(2.0);
  std::vector<std::string> labels = {"a", "b", "c", "d"};
  save_binary(DensityMatrix::pure(qubit_factors(labels), psi), (dir / "ghz.bin").string());
  EXPECT_EQ(cli("markov --state " + (dir / "ghz.bin").string() + " --blocks 0,1,2,3 --out " + dir.string(),
                dir / "m.log"),
            0)
      << slurp(dir / "m.log");
  const json rep = json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(rep.at("flags").at("locally_markov").get<bool>());
  EXPECT_EQ(cli("markov --state " + (dir / "ghz.bin").string() + " --blocks 0,1,7 --out " + dir.string(),
                dir / "bad.log"),
            4);
}

TEST(Cli, EntropyUtilities) {
  const fs::path dir = scratch("entropy");
  const Lattice lat(6, 6);
  const auto s = toric_code_ground_state(lat);
  write(dir / "toric.stab", s.dump());
  save_binary(reduced_density_matrix(s, Region("p", {14, 20, 50, 51})), (dir / "plaq.bin").string());
  EXPECT_EQ(cli("stab entropy --state " + (dir / "toric.stab").string() + " --region 14,20,50-51", dir / "s.log"), 0);
  EXPECT_NE(slurp(dir / "s.log").find("bits 3"), std::string::npos) << slurp(dir / "s.log");
  EXPECT_EQ(cli("dense entropy --in " + (dir / "plaq.bin").string() + " --keep q14,q20", dir / "d.log"), 0);
  EXPECT_NE(slurp(dir / "d.log").find("log2 2"), std::string::npos) << slurp(dir / "d.log");
  EXPECT_EQ(cli("dense entropy --in " + (dir / "plaq.bin").string() + " --keep q99", dir / "bad.log"), 4);
  EXPECT_EQ(cli("stab entropy --state " + (dir / "toric.stab").string() + " --region 500", dir / "bad2.log"), 4);
}

}  // namespace
}  // namespace teebound
