#pragma once

// JSON and CSV formats read and written by the command-line tool.
//
//   JointRange  {variables:[...], alphabets:{var:[symbols]}, support:[[symbols]...]}
//   MacSpec     {users, inputs:[[...]...], noise:[...], output:[...],
//                table:{"x1,...,xM,z": y}}
//   ZeCode      {n, w_max:[...], encoders:[[codeword index]...]}
//   codes file  {manifest, codes:[ZeCode + rates/exact/source]}
//   region CSV  n,R0..RM,w_max0..w_maxM,source
//   trace CSV   seed,t,err0..2,env0..2,overflow0..2
//
// Symbols are JSON strings or integers. Parse failures raise ConfigError
// naming the line (syntax) or the field path (structure).

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "zecmac/estimator.hpp"
#include "zecmac/mac_model.hpp"
#include "zecmac/rates.hpp"
#include "zecmac/uv_core.hpp"
#include "zecmac/zec.hpp"

namespace zecmac::io {

using Json = nlohmann::ordered_json;

Json parse_json(const std::string& text, const std::string& origin);
Json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

Json to_json(const uv::JointRange& j);
uv::JointRange joint_from_json(const Json& j);

Json to_json(const mac::MacSpec& m);
mac::MacSpec mac_from_json(const Json& j);

Json to_json(const zec::ZeCode& c);
zec::ZeCode code_from_json(const Json& j);

Json point_json(const rates::RatePoint& p);
rates::RatePoint point_from_json(const Json& j);

// One row per point; lines starting with '#' are comments.
std::string region_csv(const std::vector<rates::RatePoint>& pts, const std::string& comment = {});
std::vector<rates::RatePoint> read_region_csv(const std::string& text);

Json hull_json(const std::vector<rates::RatePoint>& hull);
std::vector<rates::RatePoint> hull_from_json(const Json& j);

Json codes_json(const zec::Region& r);
// Accepts a single code object or a codes file with an index.
zec::ZeCode code_from_file_json(const Json& j, std::size_t index);

Json diff_json(const zec::RegionDiff& d, const std::string& a, const std::string& b);

// Simulation config; relative paths inside resolve against `base`.
struct SimFile {
  est::SimConfig sim;
  mac::MacSpec mac;
  zec::ZeCode code;
  std::size_t region_n = 2;
  zec::Caps region_caps;
  std::vector<std::filesystem::path> inputs;  // files read, for the manifest
};
SimFile sim_from_json(const Json& j, const std::filesystem::path& base);

struct TraceRow {
  std::uint64_t seed = 0;
  std::size_t t = 0;
  std::array<double, 3> error{};
  std::array<double, 3> envelope{};
  std::array<int, 3> overflow{};
};
void write_trace_header(std::ostream& os, const std::vector<std::uint64_t>& seeds, const std::string& comment = {});
void write_trace_rows(std::ostream& os, const est::SimTrace& run);
void write_trace_csv(std::ostream& os, const std::vector<est::SimTrace>& runs, const std::string& comment = {});
std::vector<TraceRow> read_trace_csv(const std::string& text);

// Seeds as "3", "1,2,5" or "0-99"; ranges inclusive.
std::vector<std::uint64_t> parse_seeds(const std::string& spec);

}  // namespace zecmac::io
