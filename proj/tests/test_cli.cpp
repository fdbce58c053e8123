#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "zecmac/cli.hpp"
#include "zecmac/errors.hpp"
#include "zecmac/io.hpp"

namespace zecmac {
namespace {

namespace fs = std::filesystem;
using io::Json;

const fs::path kConfigs = ZECMAC_CONFIGS;

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("zecmac_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string cfg(const char* name) { return (kConfigs / name).string(); }

TEST(Info, Fixtures) {
  auto r = run({"info", "--config", cfg("five_tuple.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["I_star"], 1.0);
  EXPECT_EQ(j["blocks"], 2);
  EXPECT_EQ(j["partition"], Json::parse(R"([["0","1","2"],["3"]])"));
  EXPECT_EQ(j["partition_y"], Json::parse(R"([["a","b"],["c"]])"));

  j = Json::parse(run({"info", "--config", cfg("identity.json")}).out);
  EXPECT_EQ(j["I_star"], 2.0);
  j = Json::parse(run({"info", "--config", cfg("product.json")}).out);
  EXPECT_EQ(j["I_star"], 0.0);
  EXPECT_EQ(j["unrelated"], true);
}

TEST(Info, ConditionalAndOut) {
  const auto dir = scratch("info");
  fs::create_directories(dir);
  // Y copies X when W = 0 and is constant when W = 1
  io::write_text(dir / "xyw.json", R"({"variables": ["X", "Y", "W"],
    "alphabets": {"X": [0, 1], "Y": [0, 1], "W": [0, 1]},
    "support": [[0, 0, 0], [1, 1, 0], [0, 0, 1], [1, 0, 1]]})");
  const auto r = run({"info", "--config", (dir / "xyw.json").string(), "--x", "X", "--y", "Y", "--given", "W",
                      "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::read_json(dir / "info.json");
  EXPECT_EQ(j["conditional"]["blocks"], 1);
  EXPECT_EQ(j["conditional"]["slices"].size(), 2u);
  EXPECT_EQ(j["conditional"]["slices"][0]["blocks"], 2);
  EXPECT_EQ(j["conditional"]["markov"], false);
  EXPECT_EQ(run({"info", "--config", cfg("five_tuple.json"), "--given", "Y"}).code, cli::kConfig);
  EXPECT_EQ(j["manifest"], io::read_json(dir / "manifest.json")["hash"]);
  EXPECT_EQ(run({"info", "--config", cfg("five_tuple.json"), "--x", "Q"}).code, cli::kConfig);
}

TEST(Region, AdderBothIsEmptyDiff) {
  const auto dir = scratch("region1");
  const auto r = run({"region", "--config", cfg("adder.json"), "--n", "1", "--method", "both", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("diff: empty"), std::string::npos);
  EXPECT_EQ(io::read_json(dir / "diff.json")["empty"], true);
  const auto pts = io::read_region_csv(io::read_text(dir / "region.csv"));
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[2].rate_string(0), "log2(3)");
  EXPECT_EQ(pts[5].source, "bruteforce");
  const auto hull = io::hull_from_json(io::read_json(dir / "hull.json"));
  EXPECT_EQ(hull.size(), 3u);
  const auto codes = io::read_json(dir / "codes.json");
  const auto m = io::mac_from_json(codes["mac"]);
  for (std::size_t i = 0; i < codes["codes"].size(); ++i)
    EXPECT_TRUE(zec::is_zero_error(io::code_from_file_json(codes, i), m));
}

TEST(Region, FullNoiseXorIsOrigin) {
  const auto dir = scratch("xor");
  ASSERT_EQ(run({"region", "--config", cfg("xor_noise.json"), "--out", dir.string()}).code, 0);
  const auto pts = io::read_region_csv(io::read_text(dir / "region.csv"));
  ASSERT_EQ(pts.size(), 1u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(pts[0].rate(i), 0.0);
}

TEST(Region, AdderBlocklengthTwo) {
  const auto dir = scratch("region2");
  ASSERT_EQ(run({"region", "--config", cfg("adder.json"), "--n", "2", "--out", dir.string()}).code, 0);
  const auto pts = io::read_region_csv(io::read_text(dir / "region.csv"));
  bool found = false;
  const auto target = rates::make_point(2, {1, 2, 3});  // (0, 1/2, log2(3)/2)
  for (const auto& p : pts) {
    found = found || rates::same_rates(p, target);
    // (0, 1, 1/2) needs 4 and 2 codewords with disjoint sums, impossible
    EXPECT_FALSE(rates::dominates(p, rates::make_point(2, {1, 4, 2})));
  }
  EXPECT_TRUE(found);
}

TEST(Region, ExitCodes) {
  const auto dir = scratch("codes");
  auto r = run({"region", "--config", cfg("adder.json"), "--n", "5", "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kCap);
  EXPECT_NE(r.err.find("limit-n"), std::string::npos);
  r = run({"region", "--config", cfg("mod3.json"), "--n", "4", "--limit-n", "4", "--method", "bruteforce", "--out",
           dir.string()});
  EXPECT_EQ(r.code, cli::kCap);
  EXPECT_NE(r.err.find("candidates"), std::string::npos);
  r = run({"region", "--config", cfg("adder.json"), "--method", "fast"});
  EXPECT_EQ(r.code, cli::kConfig);
  r = run({"region", "--config", (kConfigs / "nope.json").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kConfig);
  r = run({"frobnicate"});
  EXPECT_EQ(r.code, cli::kConfig);

  const auto bad = dir / "bad.json";
  fs::create_directories(dir);
  io::write_text(bad, "{\n  \"users\": 2,\n  \"inputs\": [[0,1] [0,1]]\n}\n");
  r = run({"region", "--config", bad.string(), "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kConfig);
  EXPECT_NE(r.err.find("bad.json:3:"), std::string::npos) << r.err;

  EXPECT_EQ(cli::exit_code(InvariantError("x")), cli::kInvariant);
  EXPECT_EQ(cli::exit_code(ChannelContractError("x")), cli::kInvariant);
  EXPECT_EQ(cli::exit_code(CapError("x")), cli::kCap);
  EXPECT_EQ(cli::exit_code(PreconditionError("x")), cli::kConfig);
}

TEST(Region, DeterministicAndManifestCited) {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const auto dir = scratch("det");
  const std::vector<std::string> args{"region",   "--config", cfg("mod3.json"), "--n",  "2", "--method",
                                      "both",     "--out",    dir.string()};
  ASSERT_EQ(run(args).code, 0);
  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(dir)) first[e.path().filename()] = io::read_text(e.path());
  ::setenv("ZECMAC_THREADS", "1", 1);
  ASSERT_EQ(run(args).code, 0);
  ::unsetenv("ZECMAC_THREADS");
  for (const auto& [name, body] : first) EXPECT_EQ(io::read_text(dir / name), body) << name;

  auto manifest = io::read_json(dir / "manifest.json");
  EXPECT_EQ(manifest["timestamp"], "2023-11-14T22:13:20Z");
  const std::string hash = manifest["hash"];
  manifest.erase("hash");
  EXPECT_EQ(cli::manifest_hash(manifest), hash);
  EXPECT_EQ(manifest["caps"]["cap_u"], 4);
  EXPECT_EQ(manifest["cap_u_default"], true);
  for (const char* f : {"hull.json", "codes.json", "diff.json"}) EXPECT_EQ(io::read_json(dir / f)["manifest"], hash);
  EXPECT_EQ(io::read_text(dir / "region.csv").rfind("# manifest " + hash, 0), 0u);
  ::unsetenv("SOURCE_DATE_EPOCH");
}

TEST(Simulate, ZeroNoise) {
  const auto dir = scratch("zero");
  const auto r = run({"simulate", "--config", cfg("zero_noise.json"), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = io::read_json(dir / "summary.json");
  for (const auto& p : s["plants"]) EXPECT_EQ(p["sup_error"], 0.0);
  for (const auto& row : io::read_trace_csv(io::read_text(dir / "trace.csv")))
    for (double e : row.error) EXPECT_EQ(e, 0.0);
}

TEST(Simulate, FeasibleIsInteriorAndBounded) {
  const auto dir = scratch("feasible");
  const auto r = run({"simulate", "--config", cfg("feasible.json"), "--seeds", "0-2", "--horizon", "3000", "--out",
                      dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = io::read_json(dir / "summary.json");
  EXPECT_EQ(s["feasibility"]["verdict"], "interior");
  EXPECT_EQ(s["bounded"], true);
  EXPECT_EQ(s["boxes_in_sync"], true);
  EXPECT_EQ(s["runs"].size(), 3u);
  EXPECT_EQ(s["horizon"], 3000);
  const auto rows = io::read_trace_csv(io::read_text(dir / "trace.csv"));
  EXPECT_EQ(rows.size(), 9000u);
  const auto manifest = io::read_json(dir / "manifest.json");
  EXPECT_EQ(s["manifest"], manifest["hash"]);
  EXPECT_EQ(manifest["configs"].size(), 5u);
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const auto dir = scratch("simdet");
  const std::vector<std::string> args{"simulate", "--config", cfg("feasible.json"), "--seeds", "4-8",
                                      "--horizon", "600", "--out", dir.string()};
  ::setenv("ZECMAC_THREADS", "3", 1);
  ASSERT_EQ(run(args).code, 0);
  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(dir)) first[e.path().filename()] = io::read_text(e.path());
  ::setenv("ZECMAC_THREADS", "1", 1);
  ASSERT_EQ(run(args).code, 0);
  ::unsetenv("ZECMAC_THREADS");
  ::unsetenv("SOURCE_DATE_EPOCH");
  EXPECT_EQ(first.size(), 3u);
  for (const auto& [name, body] : first) EXPECT_EQ(io::read_text(dir / name), body) << name;
}

TEST(Simulate, StarvedDiverges) {
  const auto dir = scratch("starved");
  const auto r = run({"simulate", "--config", cfg("starved.json"), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = io::read_json(dir / "summary.json");
  EXPECT_EQ(s["plants"][1]["bounded"], false);
  const double g = s["plants"][1]["growth_ratio_max"];
  EXPECT_GE(g, 1.9);
  EXPECT_LE(g, 2.1);
  EXPECT_EQ(s["feasibility"]["verdict"], "outside");
  EXPECT_EQ(s["notes"].size(), 2u);
}

TEST(Simulate, AssumptionViolationsAreLabelled) {
  const auto dir = scratch("assume");
  fs::create_directories(dir);
  auto j = io::read_json(kConfigs / "zero_noise.json");
  j["mac"] = cfg("adder.json");
  j["code"]["timeshare"][0]["path"] = cfg("adder_units.codes.json");
  j["code"]["timeshare"][1]["path"] = cfg("adder_units.codes.json");
  j["code"]["timeshare"][2]["path"] = cfg("adder_units.codes.json");
  j["plants"][1]["C"] = Json::parse("[[0.0]]");
  io::write_text(dir / "sim.json", j.dump());
  auto r = run({"simulate", "--config", (dir / "sim.json").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kConfig);
  EXPECT_NE(r.err.find("A1"), std::string::npos) << r.err;

  j["plants"][1]["C"] = Json::parse("[[1.0]]");
  j["plants"][1]["A"] = Json::parse("[[0.5]]");
  io::write_text(dir / "sim.json", j.dump());
  r = run({"simulate", "--config", (dir / "sim.json").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kConfig);
  EXPECT_NE(r.err.find("A5"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace zecmac
