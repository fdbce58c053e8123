#include "zecmac/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "zecmac/errors.hpp"
#include "zecmac/parallel.hpp"

namespace zecmac::cli {

namespace fs = std::filesystem;
using io::Json;

constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InvariantError("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) {
    try {
      t = static_cast<std::time_t>(std::stoll(e));
    } catch (const std::exception&) {
      throw ConfigError("SOURCE_DATE_EPOCH is not an integer");
    }
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_hash(const Json& manifest) {
  Json copy = manifest;
  copy.erase("timestamp");
  return sha256_hex(copy.dump());
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kConfig;
  if (dynamic_cast<const CapError*>(&e)) return kCap;
  return kInvariant;
}

namespace {

uv::VarList var_list(const std::string& s) {
  uv::VarList out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  return out;
}

Json blocks_json(const uv::JointRange& j, const uv::VarList& vars, const uv::OverlapPartition& p) {
  const auto idx = j.indices_of(vars);
  Json out = Json::array();
  for (const auto& b : p.blocks) {
    Json block = Json::array();
    for (const auto& t : b) block.push_back(j.format(idx, t));
    out.push_back(block);
  }
  return out;
}

Json config_entry(const fs::path& p) {
  Json e;
  e["path"] = p.generic_string();
  e["sha256"] = sha256_hex(io::read_text(p));
  return e;
}

Json base_manifest(const std::string& command, const std::vector<fs::path>& configs, const fs::path& out) {
  Json m;
  m["tool"] = "zecmac";
  m["version"] = kVersion;
  m["command"] = command;
  Json c = Json::array();
  for (const auto& p : configs) c.push_back(config_entry(p));
  m["configs"] = c;
  m["out"] = out.generic_string();
  return m;
}

std::string finish_manifest(Json& m, const fs::path& out) {
  m["timestamp"] = timestamp();
  const auto hash = manifest_hash(m);
  fs::create_directories(out);
  Json doc = m;
  doc["hash"] = hash;
  io::write_text(out / "manifest.json", doc.dump(2) + "\n");
  return hash;
}

Json caps_json(const zec::Caps& c) {
  Json j;
  j["cap_u"] = c.cap_u;
  j["cap_wmax"] = c.cap_wmax;
  j["limit_n"] = c.limit_n;
  j["max_search"] = c.max_search;
  return j;
}

struct InfoArgs {
  std::string config, x, y, given, out;
};

int cmd_info(const InfoArgs& a, std::ostream& out) {
  const auto j = io::joint_from_json(io::read_json(a.config));
  const auto& vars = j.variables();
  uv::VarList x = var_list(a.x), y = var_list(a.y), given = var_list(a.given);
  if (x.empty()) x = {vars.front()};
  if (y.empty()) {
    if (vars.size() < 2) throw ConfigError("info: need --y for a single-variable range");
    y = {vars.back()};
  }
  Json report = info_report(j, x, y, given);
  if (!a.out.empty()) {
    Json m = base_manifest("info", {a.config}, a.out);
    m["x"] = x;
    m["y"] = y;
    m["given"] = given;
    const auto hash = finish_manifest(m, a.out);
    Json doc;
    doc["manifest"] = hash;
    for (auto it = report.begin(); it != report.end(); ++it) doc[it.key()] = it.value();
    io::write_text(fs::path(a.out) / "info.json", doc.dump(2) + "\n");
  }
  out << report.dump(2) << "\n";
  return kOk;
}

struct RegionArgs {
  std::string config, method = "thm1", out = "zecmac_out";
  std::size_t n = 1;
  zec::Caps caps;
  bool cap_u_set = false;
};

int cmd_region(const RegionArgs& a, std::ostream& out, std::ostream& err) {
  const auto m = io::mac_from_json(io::read_json(a.config));
  const bool thm1 = a.method == "thm1" || a.method == "both";
  const bool brute = a.method == "bruteforce" || a.method == "both";

  // abort before any work if a requested enumeration cannot fit
  if (a.n > a.caps.limit_n)
    throw CapError("n = " + std::to_string(a.n) + " exceeds --limit-n " + std::to_string(a.caps.limit_n));
  if (brute) {
    const double size = zec::bruteforce_search_size(m, a.n, a.caps);
    if (size > static_cast<double>(a.caps.max_search)) {
      std::ostringstream os;
      os << "brute-force search would examine about " << std::setprecision(3) << size << " candidates (budget "
         << a.caps.max_search << ")";
      throw CapError(os.str());
    }
  }

  Json manifest = base_manifest("region", {a.config}, a.out);
  manifest["n"] = a.n;
  manifest["method"] = a.method;
  manifest["caps"] = caps_json(a.caps);
  manifest["cap_u_default"] = !a.cap_u_set;
  const auto hash = finish_manifest(manifest, a.out);
  const fs::path dir(a.out);

  std::optional<zec::Region> rt, rb;
  if (thm1) rt = zec::enumerate_region_thm1(m, a.n, a.caps);
  if (brute) rb = zec::enumerate_region_bruteforce(m, a.n, a.caps);
  const zec::Region& primary = rt ? *rt : *rb;

  std::vector<rates::RatePoint> rows;
  if (rt) rows.insert(rows.end(), rt->points.begin(), rt->points.end());
  if (rb) rows.insert(rows.end(), rb->points.begin(), rb->points.end());
  io::write_text(dir / "region.csv", io::region_csv(rows, "manifest " + hash));

  Json hull = io::hull_json(primary.hull);
  hull["manifest"] = hash;
  hull["source"] = rt ? "thm1" : "bruteforce";
  hull["warnings"] = primary.warnings;
  io::write_text(dir / "hull.json", hull.dump(2) + "\n");

  Json codes = io::codes_json(primary);
  codes["manifest"] = hash;
  codes["mac"] = io::to_json(m);
  io::write_text(dir / "codes.json", codes.dump(2) + "\n");

  for (const auto& w : primary.warnings) err << "warning: " << w << "\n";
  out << "region n=" << a.n << " method=" << a.method << ": " << primary.points.size() << " maximal points, "
      << primary.hull.size() << " hull vertices\n";
  for (const auto& p : primary.points) {
    out << "  (";
    for (std::size_t i = 0; i < p.dim(); ++i) out << (i ? ", " : "") << p.rate_string(i);
    out << ")\n";
  }

  if (rt && rb) {
    const auto d = zec::diff(*rt, *rb);
    Json dj = io::diff_json(d, "thm1", "bruteforce");
    dj["manifest"] = hash;
    io::write_text(dir / "diff.json", dj.dump(2) + "\n");
    if (!d.empty()) {
      err << "thm1 and bruteforce regions differ: " << d.only_a.size() << " points only in thm1, "
          << d.only_b.size() << " only in bruteforce\n";
      return kInvariant;
    }
    out << "diff: empty\n";
  }
  return kOk;
}

struct SimArgs {
  std::string config, seeds, out = "zecmac_out";
  std::optional<std::size_t> horizon;
};

std::vector<rates::RatePoint> feasibility_hull(const mac::MacSpec& m, std::size_t n_max, const zec::Caps& caps) {
  std::vector<rates::RatePoint> pts;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const auto r = zec::enumerate_region_thm1(m, n, caps);
    pts.insert(pts.end(), r.points.begin(), r.points.end());
  }
  return rates::convex_hull(rates::maximal_points(pts));
}

Json diagnosis_json(const est::PlantDiagnosis& d) {
  Json j;
  j["sup_error"] = d.sup_error;
  j["sup_error_after_transient"] = d.sup_error_after_transient;
  j["bounded"] = d.bounded;
  j["envelope_non_increasing"] = d.envelope_non_increasing;
  j["within_envelope"] = d.within_envelope;
  j["literal_non_increasing"] = d.literal_non_increasing;
  j["overflow_after_transient"] = d.overflow_after_transient;
  j["growth_ratio"] = d.growth_ratio;
  return j;
}

int cmd_simulate(const SimArgs& a, std::ostream& out) {
  const fs::path config(a.config);
  auto f = io::sim_from_json(io::read_json(config), config.parent_path());
  if (!a.seeds.empty()) f.sim.seeds = io::parse_seeds(a.seeds);
  if (a.horizon) {
    if (*a.horizon == 0) throw ConfigError("--horizon must be positive");
    f.sim.horizon = *a.horizon;
  }
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < 3; ++i) {
    auto n = est::check_assumptions(f.sim.plants[i], "plant " + std::to_string(i));
    notes.insert(notes.end(), n.begin(), n.end());
  }

  std::vector<fs::path> configs{config};
  configs.insert(configs.end(), f.inputs.begin(), f.inputs.end());
  Json manifest = base_manifest("simulate", configs, a.out);
  manifest["seeds"] = f.sim.seeds;
  manifest["horizon"] = f.sim.horizon;
  manifest["region"] = {{"n", f.region_n}, {"caps", caps_json(f.region_caps)}};
  const auto hash = finish_manifest(manifest, a.out);
  const fs::path dir(a.out);

  std::array<double, 3> h{};
  for (std::size_t i = 0; i < 3; ++i) h[i] = est::topological_entropy(f.sim.plants[i].A);
  const auto hull = feasibility_hull(f.mac, f.region_n, f.region_caps);
  const auto feas = rates::feasibility_check(rates::to_rational({h[0], h[1], h[2]}), hull);

  std::ofstream trace(dir / "trace.csv", std::ios::binary);
  if (!trace) throw ConfigError((dir / "trace.csv").string() + ": cannot write");
  io::write_trace_header(trace, f.sim.seeds, "manifest " + hash);

  Json runs = Json::array();
  std::array<bool, 3> bounded{true, true, true};
  std::array<double, 3> sup{}, worst_growth{};
  std::array<std::size_t, 3> overflow{};
  bool in_sync = true;
  const std::size_t chunk = std::max<std::size_t>(1, worker_count());
  for (std::size_t first = 0; first < f.sim.seeds.size(); first += chunk) {
    const std::size_t count = std::min(chunk, f.sim.seeds.size() - first);
    std::vector<est::SimTrace> batch(count);
    parallel_for(count, [&](std::size_t k) {
      batch[k] = est::run_simulation(f.sim, f.mac, f.code, f.sim.seeds[first + k]);
    });
    for (const auto& r : batch) {
      io::write_trace_rows(trace, r);
      const auto diag = est::diagnose(r, f.sim);
      Json run;
      run["seed"] = r.seed;
      run["boxes_in_sync"] = r.boxes_in_sync;
      in_sync = in_sync && r.boxes_in_sync;
      Json plants = Json::array();
      for (std::size_t i = 0; i < 3; ++i) {
        plants.push_back(diagnosis_json(diag[i]));
        bounded[i] = bounded[i] && diag[i].bounded;
        sup[i] = std::max(sup[i], diag[i].sup_error);
        worst_growth[i] = std::max(worst_growth[i], diag[i].growth_ratio);
        overflow[i] += diag[i].overflow_after_transient;
      }
      run["plants"] = plants;
      runs.push_back(run);
    }
  }
  trace.close();
  if (!trace) throw ConfigError((dir / "trace.csv").string() + ": write failed");

  Json summary;
  summary["manifest"] = hash;
  summary["horizon"] = f.sim.horizon;
  summary["seeds"] = f.sim.seeds;
  summary["window"] = f.sim.window ? f.sim.window : est::default_window(f.sim.horizon, f.code.n);
  Json code = io::point_json(f.code.rate_point());
  code.erase("source");
  summary["code"] = code;
  Json feasibility;
  feasibility["h"] = h;
  feasibility["verdict"] = rates::to_string(feas.verdict);
  feasibility["margin"] = feas.margin;
  feasibility["certified"] = feas.certified;
  feasibility["region_n"] = f.region_n;
  feasibility["hull"] = io::hull_json(hull)["vertices"];
  summary["feasibility"] = feasibility;
  Json plants = Json::array();
  for (std::size_t i = 0; i < 3; ++i) {
    Json p;
    p["h"] = h[i];
    p["bounded"] = bounded[i];
    p["sup_error"] = sup[i];
    p["overflow_after_transient"] = overflow[i];
    p["growth_ratio_max"] = worst_growth[i];
    plants.push_back(p);
  }
  summary["plants"] = plants;
  summary["bounded"] = bounded[0] && bounded[1] && bounded[2];
  summary["boxes_in_sync"] = in_sync;
  summary["notes"] = notes;
  summary["runs"] = runs;
  io::write_text(dir / "summary.json", summary.dump(2) + "\n");

  out << "feasibility: " << rates::to_string(feas.verdict) << " (h = " << h[0] << ", " << h[1] << ", " << h[2]
      << ")\n";
  for (std::size_t i = 0; i < 3; ++i)
    out << "plant " << i << ": bounded=" << (bounded[i] ? "true" : "false") << " sup_error=" << sup[i]
        << " growth_ratio=" << worst_growth[i] << "\n";
  for (const auto& n : notes) out << "note: " << n << "\n";
  return kOk;
}

}  // namespace

Json info_report(const uv::JointRange& j, const uv::VarList& x, const uv::VarList& y, const uv::VarList& given) {
  Json r;
  r["variables"] = j.variables();
  r["support_size"] = j.support().size();
  r["x"] = x;
  r["y"] = y;
  const auto part = uv::overlap_partition(uv::conditional_family(j, x, y));
  r["I_star"] = uv::nonstochastic_info(j, x, y);
  r["blocks"] = part.size();
  r["partition"] = blocks_json(j, x, part);
  const auto part_y = uv::overlap_partition(uv::conditional_family(j, y, x));
  r["partition_y"] = blocks_json(j, y, part_y);
  r["unrelated"] = uv::is_unrelated(j, {x, y});
  if (!given.empty()) {
    Json c;
    c["given"] = given;
    c["I_star"] = uv::conditional_nonstochastic_info(j, x, y, given);
    c["blocks"] = uv::conditional_overlap_count(j, x, y, given);
    Json slices = Json::array();
    const auto gidx = j.indices_of(given);
    for (const auto& s : uv::conditional_overlap_partitions(j, x, y, given)) {
      Json e;
      e["at"] = j.format(gidx, s.w);
      e["blocks"] = s.partition.size();
      e["partition"] = blocks_json(j, x, s.partition);
      slices.push_back(e);
    }
    c["slices"] = slices;
    c["markov"] = uv::is_markov(j, x, given, y);
    c["conditionally_unrelated"] = uv::is_conditionally_unrelated(j, {x, y}, given);
    r["conditional"] = c;
  }
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-error MAC codes, rate regions and distributed state estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  InfoArgs ia;
  auto* info = app.add_subcommand("info", "Nonstochastic information of a joint range");
  info->add_option("--config", ia.config, "JointRange JSON")->required();
  info->add_option("--x", ia.x, "comma-separated variables (default: first)");
  info->add_option("--y", ia.y, "comma-separated variables (default: last)");
  info->add_option("--given", ia.given, "conditioning variables");
  info->add_option("--out", ia.out, "also write info.json and manifest.json here");

  RegionArgs ra;
  std::optional<std::uint64_t> cap_u;
  auto* region = app.add_subcommand("region", "Zero-error rate region of a MAC at blocklength n");
  region->add_option("--config", ra.config, "MacSpec JSON")->required();
  region->add_option("--n", ra.n, "blocklength")->check(CLI::PositiveNumber);
  region->add_option("--cap-u", cap_u, "common message cap (default: --cap-wmax)")->check(CLI::PositiveNumber);
  region->add_option("--cap-wmax", ra.caps.cap_wmax, "private message cap")->check(CLI::PositiveNumber);
  region->add_option("--method", ra.method, "thm1, bruteforce or both")
      ->check(CLI::IsMember({"thm1", "bruteforce", "both"}));
  region->add_option("--limit-n", ra.caps.limit_n, "largest blocklength accepted")->check(CLI::PositiveNumber);
  region->add_option("--out", ra.out, "output directory");

  SimArgs sa;
  auto* sim = app.add_subcommand("simulate", "Distributed estimation over a zero-error code");
  sim->add_option("--config", sa.config, "simulation JSON")->required();
  sim->add_option("--seeds", sa.seeds, "seeds, e.g. 1,2,3 or 0-99 (overrides config)");
  sim->add_option("--horizon", sa.horizon, "steps (overrides config)");
  sim->add_option("--out", sa.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*info) return cmd_info(ia, out);
    if (*region) {
      ra.cap_u_set = cap_u.has_value();
      ra.caps.cap_u = cap_u.value_or(ra.caps.cap_wmax);
      return cmd_region(ra, out, err);
    }
    return cmd_simulate(sa, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariant;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"zecmac"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace zecmac::cli
