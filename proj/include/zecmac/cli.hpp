#pragma once

// Command-line front end: `zecmac info|region|simulate`. Every command
// writes manifest.json into --out and cites the manifest hash in each file
// it produces.
//
// Exit codes: 0 success, 2 configuration error, 3 cap or size abort,
// 4 internal invariant failure (including a nonempty --method both diff).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "zecmac/io.hpp"

namespace zecmac::cli {

enum Exit { kOk = 0, kConfig = 2, kCap = 3, kInvariant = 4 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Maps the exception in flight to an exit code.
int exit_code(const std::exception& e);

std::string sha256_hex(const std::string& bytes);

// SOURCE_DATE_EPOCH when set, else the current time; ISO 8601 UTC.
std::string timestamp();

// Hash over the manifest without its timestamp.
std::string manifest_hash(const io::Json& manifest);

io::Json info_report(const uv::JointRange& j, const uv::VarList& x, const uv::VarList& y,
                     const uv::VarList& given);

}  // namespace zecmac::cli
