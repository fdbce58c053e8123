#include "zecmac/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "zecmac/errors.hpp"

namespace zecmac::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError((path.empty() ? std::string("config") : path) + ": " + what);
}

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& need(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(at(path, key), "missing field");
  return *it;
}

const Json* maybe(const Json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const Json& need_array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t count(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  fail(path, "expected a nonnegative integer");
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

uv::Symbol symbol(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  fail(path, "symbol must be a string or an integer");
}

Json symbol_json(const uv::Symbol& s) {
  if (const auto* i = std::get_if<std::int64_t>(&s)) return *i;
  return std::get<std::string>(s);
}

uv::Alphabet alphabet(const Json& j, const std::string& path) {
  need_array(j, path);
  uv::Alphabet out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(symbol(j[i], at(path, i)));
  return out;
}

Json alphabet_json(const uv::Alphabet& a) {
  Json out = Json::array();
  for (const auto& s : a) out.push_back(symbol_json(s));
  return out;
}

std::map<uv::Symbol, std::uint32_t> symbol_index(const uv::Alphabet& a, const std::string& path) {
  std::map<uv::Symbol, std::uint32_t> idx;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!idx.emplace(a[i], static_cast<std::uint32_t>(i)).second)
      fail(at(path, i), "duplicate symbol " + uv::to_string(a[i]));
  return idx;
}

Json big_json(const rates::BigInt& v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
  return v.str();
}

rates::BigInt big_from(const Json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return rates::BigInt(j.get<std::string>());
    } catch (const std::exception&) {
      fail(path, "expected an integer");
    }
  }
  return count(j, path);
}

est::Matrix matrix(const Json& j, const std::string& path) {
  if (j.is_number()) return est::Matrix::Constant(1, 1, j.get<double>());
  need_array(j, path);
  if (j.empty()) fail(path, "matrix has no rows");
  const std::size_t rows = j.size();
  const std::size_t cols = need_array(j[0], at(path, 0)).size();
  if (cols == 0) fail(path, "matrix has no columns");
  est::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = need_array(j[r], at(path, r));
    if (row.size() != cols) fail(at(path, r), "ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = number(row[c], at(at(path, r), c));
  }
  return m;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) fail(where, "not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) fail(where, "not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

}  // namespace

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path) { return parse_json(read_text(path), path.string()); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string() + ": cannot write");
  out << text;
  if (!out) throw ConfigError(path.string() + ": write failed");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

Json to_json(const uv::JointRange& j) {
  Json out;
  out["variables"] = j.variables();
  Json alph = Json::object();
  for (std::size_t v = 0; v < j.arity(); ++v) alph[j.variables()[v]] = alphabet_json(j.alphabet(v));
  out["alphabets"] = alph;
  Json support = Json::array();
  for (const auto& t : j.support()) {
    Json row = Json::array();
    for (std::size_t v = 0; v < t.size(); ++v) row.push_back(symbol_json(j.alphabet(v)[t[v]]));
    support.push_back(row);
  }
  out["support"] = support;
  return out;
}

uv::JointRange joint_from_json(const Json& j) {
  const auto& vars_json = need_array(need(j, "variables", ""), "variables");
  uv::VarList vars;
  for (std::size_t i = 0; i < vars_json.size(); ++i) vars.push_back(text(vars_json[i], at("variables", i)));
  const auto& alph = need(j, "alphabets", "");
  if (!alph.is_object()) fail("alphabets", "expected an object keyed by variable");
  std::vector<uv::Alphabet> alphabets;
  std::vector<std::map<uv::Symbol, std::uint32_t>> index;
  for (const auto& v : vars) {
    const std::string path = at("alphabets", v);
    auto it = alph.find(v);
    if (it == alph.end()) fail(path, "missing alphabet");
    alphabets.push_back(alphabet(*it, path));
    index.push_back(symbol_index(alphabets.back(), path));
  }
  for (auto it = alph.begin(); it != alph.end(); ++it)
    if (std::find(vars.begin(), vars.end(), it.key()) == vars.end())
      fail(at("alphabets", it.key()), "not a listed variable");
  const auto& sup = need_array(need(j, "support", ""), "support");
  std::vector<uv::Tuple> support;
  for (std::size_t r = 0; r < sup.size(); ++r) {
    const std::string path = at("support", r);
    const auto& row = need_array(sup[r], path);
    if (row.size() != vars.size()) fail(path, "tuple has " + std::to_string(row.size()) + " entries, expected " +
                                                  std::to_string(vars.size()));
    uv::Tuple t;
    for (std::size_t v = 0; v < row.size(); ++v) {
      const auto s = symbol(row[v], at(path, v));
      auto f = index[v].find(s);
      if (f == index[v].end()) fail(at(path, v), "symbol " + uv::to_string(s) + " not in alphabet of " + vars[v]);
      t.push_back(f->second);
    }
    support.push_back(std::move(t));
  }
  try {
    return uv::JointRange(std::move(vars), std::move(alphabets), std::move(support));
  } catch (const ConfigError& e) {
    fail("", e.what());
  }
}

Json to_json(const mac::MacSpec& m) {
  Json out;
  out["users"] = m.num_users();
  Json inputs = Json::array();
  for (std::size_t j = 0; j < m.num_users(); ++j) inputs.push_back(alphabet_json(m.input_alphabet(j)));
  out["inputs"] = inputs;
  out["noise"] = alphabet_json(m.noise_alphabet());
  out["output"] = alphabet_json(m.output_alphabet());
  Json table = Json::object();
  std::vector<std::uint32_t> x(m.num_users(), 0);
  for (std::size_t cell = 0; cell < m.table().size(); ++cell) {
    std::size_t rest = cell;
    const auto z = static_cast<std::uint32_t>(rest % m.noise_size());
    rest /= m.noise_size();
    for (std::size_t j = m.num_users(); j-- > 0;) {
      x[j] = static_cast<std::uint32_t>(rest % m.input_size(j));
      rest /= m.input_size(j);
    }
    std::string key;
    for (std::size_t j = 0; j < x.size(); ++j) key += uv::to_string(m.input_alphabet(j)[x[j]]) + ",";
    key += uv::to_string(m.noise_alphabet()[z]);
    table[key] = symbol_json(m.output_alphabet()[m.table()[cell]]);
  }
  out["table"] = table;
  return out;
}

mac::MacSpec mac_from_json(const Json& j) {
  const std::uint64_t users = count(need(j, "users", ""), "users");
  const auto& in = need_array(need(j, "inputs", ""), "inputs");
  if (users == 0) fail("users", "must be positive");
  if (in.size() != users) fail("inputs", "expected one alphabet per user (" + std::to_string(users) + ")");
  std::vector<uv::Alphabet> inputs;
  for (std::size_t u = 0; u < in.size(); ++u) inputs.push_back(alphabet(in[u], at("inputs", u)));
  auto noise = alphabet(need(j, "noise", ""), "noise");
  auto output = alphabet(need(j, "output", ""), "output");

  // keys are comma-joined symbol strings
  auto names = [](const uv::Alphabet& a, const std::string& path) {
    std::map<std::string, std::uint32_t> idx;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto s = uv::to_string(a[i]);
      if (s.find(',') != std::string::npos) fail(at(path, i), "symbol may not contain ','");
      if (!idx.emplace(s, static_cast<std::uint32_t>(i)).second) fail(at(path, i), "duplicate symbol " + s);
    }
    return idx;
  };
  std::vector<std::map<std::string, std::uint32_t>> idx;
  for (std::size_t u = 0; u < inputs.size(); ++u) idx.push_back(names(inputs[u], at("inputs", u)));
  idx.push_back(names(noise, "noise"));
  const auto out_idx = names(output, "output");

  std::size_t cells = noise.size();
  for (const auto& a : inputs) cells *= a.size();
  std::vector<std::uint32_t> table(cells);
  std::vector<bool> seen(cells, false);
  const auto& tab = need(j, "table", "");
  if (!tab.is_object()) fail("table", "expected an object keyed by \"x1,...,z\"");
  for (auto it = tab.begin(); it != tab.end(); ++it) {
    const std::string path = at("table", "\"" + it.key() + "\"");
    const auto parts = split(it.key(), ',');
    if (parts.size() != users + 1) fail(path, "key needs " + std::to_string(users + 1) + " symbols");
    std::size_t cell = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      auto f = idx[k].find(parts[k]);
      if (f == idx[k].end())
        fail(path, "symbol '" + parts[k] + "' not in " + (k < users ? "inputs[" + std::to_string(k) + "]" : "noise"));
      const std::size_t radix = k < users ? inputs[k].size() : noise.size();
      cell = cell * radix + f->second;
    }
    if (seen[cell]) fail(path, "duplicate cell");
    const auto y = uv::to_string(symbol(it.value(), path));
    auto f = out_idx.find(y);
    if (f == out_idx.end()) fail(path, "output '" + y + "' not in output alphabet");
    table[cell] = f->second;
    seen[cell] = true;
  }
  for (std::size_t c = 0; c < cells; ++c)
    if (!seen[c]) fail("table", "missing cell " + std::to_string(c) + " of " + std::to_string(cells));
  return mac::MacSpec(std::move(inputs), std::move(noise), std::move(output), std::move(table));
}

Json to_json(const zec::ZeCode& c) {
  Json out;
  out["n"] = c.n;
  out["w_max"] = c.w_max;
  out["encoders"] = c.encoders;
  return out;
}

zec::ZeCode code_from_json(const Json& j) {
  zec::ZeCode c;
  c.n = count(need(j, "n", ""), "n");
  if (c.n == 0) fail("n", "must be positive");
  const auto& w = need_array(need(j, "w_max", ""), "w_max");
  for (std::size_t i = 0; i < w.size(); ++i) {
    c.w_max.push_back(count(w[i], at("w_max", i)));
    if (c.w_max.back() == 0) fail(at("w_max", i), "must be positive");
  }
  if (c.w_max.size() < 2) fail("w_max", "needs a common and at least one private entry");
  const auto& enc = need_array(need(j, "encoders", ""), "encoders");
  if (enc.size() + 1 != c.w_max.size()) fail("encoders", "expected one table per user");
  for (std::size_t u = 0; u < enc.size(); ++u) {
    const std::string path = at("encoders", u);
    const auto& row = need_array(enc[u], path);
    if (row.size() != c.w_max[0] * c.w_max[u + 1])
      fail(path, "expected w_max[0]*w_max[" + std::to_string(u + 1) + "] = " +
                     std::to_string(c.w_max[0] * c.w_max[u + 1]) + " entries");
    std::vector<std::uint64_t> e;
    for (std::size_t k = 0; k < row.size(); ++k) e.push_back(count(row[k], at(path, k)));
    c.encoders.push_back(std::move(e));
  }
  return c;
}

Json point_json(const rates::RatePoint& p) {
  Json out;
  out["n"] = p.n;
  Json w = Json::array(), r = Json::array(), e = Json::array();
  for (std::size_t i = 0; i < p.dim(); ++i) {
    w.push_back(big_json(p.w[i]));
    r.push_back(p.rate(i));
    e.push_back(p.rate_string(i));
  }
  out["w_max"] = w;
  out["rates"] = r;
  out["exact"] = e;
  if (!p.source.empty()) out["source"] = p.source;
  return out;
}

rates::RatePoint point_from_json(const Json& j) {
  rates::RatePoint p;
  p.n = count(need(j, "n", ""), "n");
  if (p.n == 0) fail("n", "must be positive");
  const auto& w = need_array(need(j, "w_max", ""), "w_max");
  for (std::size_t i = 0; i < w.size(); ++i) {
    p.w.push_back(big_from(w[i], at("w_max", i)));
    if (p.w.back() < 1) fail(at("w_max", i), "must be positive");
  }
  if (const auto* s = maybe(j, "source")) p.source = text(*s, "source");
  return p;
}

std::string region_csv(const std::vector<rates::RatePoint>& pts, const std::string& comment) {
  std::ostringstream os;
  if (!comment.empty()) os << "# " << comment << "\n";
  const std::size_t d = pts.empty() ? 0 : pts.front().dim();
  os << "n";
  for (std::size_t i = 0; i < d; ++i) os << ",R" << i;
  for (std::size_t i = 0; i < d; ++i) os << ",w_max" << i;
  os << ",source\n";
  for (const auto& p : pts) {
    if (p.dim() != d) throw ConfigError("region points differ in dimension");
    os << p.n;
    for (std::size_t i = 0; i < d; ++i) os << "," << format_double(p.rate(i));
    for (std::size_t i = 0; i < d; ++i) os << "," << p.w[i].str();
    os << "," << p.source << "\n";
  }
  return os.str();
}

std::vector<rates::RatePoint> read_region_csv(const std::string& body) {
  const auto lines = data_lines(body);
  if (lines.empty()) fail("region csv", "missing header");
  const auto head = split(lines[0], ',');
  if (head.size() < 4 || head.front() != "n" || head.back() != "source" || (head.size() - 2) % 2 != 0)
    fail("region csv", "bad header");
  const std::size_t d = (head.size() - 2) / 2;
  for (std::size_t i = 0; i < d; ++i)
    if (head[1 + i] != "R" + std::to_string(i) || head[1 + d + i] != "w_max" + std::to_string(i))
      fail("region csv", "bad header column " + std::to_string(i));
  std::vector<rates::RatePoint> out;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = "region csv line " + std::to_string(r + 1);
    const auto cols = split(lines[r], ',');
    if (cols.size() != head.size()) fail(where, "wrong column count");
    rates::RatePoint p;
    p.n = parse_uint(cols[0], where);
    for (std::size_t i = 0; i < d; ++i) {
      try {
        p.w.emplace_back(cols[1 + d + i]);
      } catch (const std::exception&) {
        fail(where, "bad w_max" + std::to_string(i));
      }
    }
    p.source = cols.back();
    for (std::size_t i = 0; i < d; ++i) {
      const double r_col = parse_double(cols[1 + i], where);
      if (std::abs(r_col - p.rate(i)) > 1e-12 * (1 + std::abs(r_col)))
        fail(where, "R" + std::to_string(i) + " disagrees with w_max" + std::to_string(i));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Json hull_json(const std::vector<rates::RatePoint>& hull) {
  Json out;
  out["dimension"] = hull.empty() ? 0 : hull.front().dim();
  Json v = Json::array();
  for (const auto& p : hull) v.push_back(point_json(p));
  out["vertices"] = v;
  return out;
}

std::vector<rates::RatePoint> hull_from_json(const Json& j) {
  const auto& v = need_array(need(j, "vertices", ""), "vertices");
  std::vector<rates::RatePoint> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    try {
      out.push_back(point_from_json(v[i]));
    } catch (const ConfigError& e) {
      fail(at("vertices", i), e.what());
    }
  }
  return out;
}

Json codes_json(const zec::Region& r) {
  Json out;
  out["n"] = r.n_max;
  Json codes = Json::array();
  for (std::size_t i = 0; i < r.codes.size(); ++i) {
    Json c = to_json(r.codes[i]);
    const auto p = point_json(r.points[i]);
    c["rates"] = p["rates"];
    c["exact"] = p["exact"];
    c["source"] = r.points[i].source;
    codes.push_back(c);
  }
  out["codes"] = codes;
  return out;
}

zec::ZeCode code_from_file_json(const Json& j, std::size_t index) {
  if (const auto* codes = maybe(j, "codes")) {
    need_array(*codes, "codes");
    if (index >= codes->size())
      fail("codes", "index " + std::to_string(index) + " out of range (" + std::to_string(codes->size()) + " codes)");
    try {
      return code_from_json((*codes)[index]);
    } catch (const ConfigError& e) {
      fail(at("codes", index), e.what());
    }
  }
  if (index != 0) fail("", "code index given for a single-code file");
  return code_from_json(j);
}

Json diff_json(const zec::RegionDiff& d, const std::string& a, const std::string& b) {
  Json out;
  out["empty"] = d.empty();
  Json oa = Json::array(), ob = Json::array();
  for (const auto& p : d.only_a) oa.push_back(point_json(p));
  for (const auto& p : d.only_b) ob.push_back(point_json(p));
  out["only_" + a] = oa;
  out["only_" + b] = ob;
  return out;
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

zec::ZeCode load_code(const Json& spec, const std::string& path, const fs::path& base, SimFile& f) {
  auto from_ref = [&](const Json& ref, const std::string& rpath) {
    if (ref.is_string()) {
      const auto file = resolve(base, ref.get<std::string>());
      f.inputs.push_back(file);
      return code_from_file_json(read_json(file), 0);
    }
    if (const auto* p = maybe(ref, "path")) {
      const auto file = resolve(base, text(*p, at(rpath, "path")));
      std::size_t index = 0;
      if (const auto* i = maybe(ref, "index")) index = count(*i, at(rpath, "index"));
      f.inputs.push_back(file);
      try {
        return code_from_file_json(read_json(file), index);
      } catch (const ConfigError& e) {
        fail(rpath, std::string(file.string()) + ": " + e.what());
      }
    }
    return code_from_json(ref);
  };
  if (const auto* ts = maybe(spec, "timeshare")) {
    const std::string tpath = at(path, "timeshare");
    need_array(*ts, tpath);
    if (ts->empty()) fail(tpath, "needs at least one code");
    std::optional<zec::ZeCode> acc;
    for (std::size_t i = 0; i < ts->size(); ++i) {
      const std::string ipath = at(tpath, i);
      const auto code = from_ref((*ts)[i], ipath);
      std::uint64_t blocks = 1;
      if (const auto* b = maybe((*ts)[i], "blocks")) blocks = count(*b, at(ipath, "blocks"));
      if (blocks == 0) fail(at(ipath, "blocks"), "must be positive");
      acc = acc ? zec::time_share(f.mac, *acc, f.mac, code, 1, blocks)
                : zec::time_share(f.mac, code, f.mac, code, blocks, 0);
    }
    return *acc;
  }
  return from_ref(spec, path);
}

}  // namespace

SimFile sim_from_json(const Json& j, const fs::path& base) {
  const auto& mj = need(j, "mac", "");
  std::optional<mac::MacSpec> m;
  std::vector<fs::path> inputs;
  if (mj.is_string()) {
    const auto file = resolve(base, mj.get<std::string>());
    inputs.push_back(file);
    try {
      m = mac_from_json(read_json(file));
    } catch (const ConfigError& e) {
      fail("mac", file.string() + ": " + e.what());
    }
  } else {
    m = mac_from_json(mj);
  }
  SimFile f{{}, *m, {}, 2, {}, std::move(inputs)};
  f.code = load_code(need(j, "code", ""), "code", base, f);
  f.code.validate(f.mac);

  const auto& plants = need_array(need(j, "plants", ""), "plants");
  if (plants.size() != 3) fail("plants", "expected exactly 3 plants (common, private 1, private 2)");
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string path = at("plants", i);
    auto& p = f.sim.plants[i];
    p.A = matrix(need(plants[i], "A", path), at(path, "A"));
    p.C = matrix(need(plants[i], "C", path), at(path, "C"));
    if (p.A.rows() != p.A.cols()) fail(at(path, "A"), "must be square");
    if (p.C.cols() != p.A.rows()) fail(at(path, "C"), "column count must match A");
    p.v_bound = number(need(plants[i], "v_bound", path), at(path, "v_bound"));
    p.w_bound = number(need(plants[i], "w_bound", path), at(path, "w_bound"));
    p.l = number(need(plants[i], "l", path), at(path, "l"));
    if (p.v_bound < 0 || p.w_bound < 0 || p.l < 0) fail(path, "bounds must be nonnegative");
    if (const auto* d = maybe(plants[i], "degenerate_stable")) {
      if (!d->is_boolean()) fail(at(path, "degenerate_stable"), "expected true or false");
      p.degenerate_stable = d->get<bool>();
    }
    if (const auto* l = maybe(plants[i], "L")) p.L = matrix(*l, at(path, "L"));
  }
  if (const auto* obs = maybe(j, "observer")) {
    if (obs->is_string()) {
      if (obs->get<std::string>() != "auto") fail("observer", "expected \"auto\" or {L: [...]}");
    } else {
      const auto& ls = need_array(need(*obs, "L", "observer"), "observer.L");
      if (ls.size() != 3) fail("observer.L", "expected one entry per plant");
      for (std::size_t i = 0; i < 3; ++i) {
        if (ls[i].is_string() && ls[i].get<std::string>() == "auto") continue;
        f.sim.plants[i].L = matrix(ls[i], at("observer.L", i));
      }
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& p = f.sim.plants[i];
    if (p.L && (p.L->rows() != p.A.rows() || p.L->cols() != p.C.rows()))
      fail("plants[" + std::to_string(i) + "].L", "shape must be rows(A) x rows(C)");
  }

  const auto& q = need(j, "quantizer", "");
  const std::uint64_t qn = count(need(q, "n", "quantizer"), "quantizer.n");
  if (qn != f.code.n)
    fail("quantizer.n", "is " + std::to_string(qn) + " but the code has blocklength " + std::to_string(f.code.n));
  const auto& cells = need_array(need(q, "cells", "quantizer"), "quantizer.cells");
  if (cells.size() != 3) fail("quantizer.cells", "expected one entry per plant");
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string path = at("quantizer.cells", i);
    if (cells[i].is_array()) {
      for (std::size_t a = 0; a < cells[i].size(); ++a) f.sim.cells[i].push_back(count(cells[i][a], at(path, a)));
    } else {
      f.sim.cells[i].push_back(count(cells[i], path));
    }
    if (f.sim.cells[i].size() != static_cast<std::size_t>(f.sim.plants[i].A.rows()))
      fail(path, "expected one cell count per state dimension");
    for (auto c : f.sim.cells[i])
      if (c == 0) fail(path, "cell counts must be positive");
  }

  f.sim.horizon = count(need(j, "horizon", ""), "horizon");
  if (f.sim.horizon == 0) fail("horizon", "must be positive");
  const auto& seeds = need(j, "seeds", "");
  f.sim.seeds.clear();
  if (seeds.is_string()) {
    f.sim.seeds = parse_seeds(seeds.get<std::string>());
  } else {
    need_array(seeds, "seeds");
    for (std::size_t i = 0; i < seeds.size(); ++i) f.sim.seeds.push_back(count(seeds[i], at("seeds", i)));
  }
  if (f.sim.seeds.empty()) fail("seeds", "needs at least one seed");

  if (const auto* v = maybe(j, "inflate")) f.sim.inflate = number(*v, "inflate");
  if (f.sim.inflate < 1) fail("inflate", "must be at least 1");
  if (const auto* v = maybe(j, "transient_fraction")) f.sim.transient_fraction = number(*v, "transient_fraction");
  if (f.sim.transient_fraction < 0 || f.sim.transient_fraction >= 1) fail("transient_fraction", "must lie in [0, 1)");
  if (const auto* v = maybe(j, "window")) f.sim.window = count(*v, "window");
  if (const auto* v = maybe(j, "growth_guard")) f.sim.growth_guard = number(*v, "growth_guard");
  if (const auto* v = maybe(j, "rho0")) {
    need_array(*v, "rho0");
    if (v->size() != 3) fail("rho0", "expected one entry per plant");
    for (std::size_t i = 0; i < 3; ++i)
      if (!(*v)[i].is_null()) f.sim.rho0[i] = number((*v)[i], at("rho0", i));
  }
  if (const auto* r = maybe(j, "region")) {
    if (const auto* v = maybe(*r, "n")) f.region_n = count(*v, "region.n");
    if (const auto* v = maybe(*r, "cap_u")) f.region_caps.cap_u = count(*v, "region.cap_u");
    if (const auto* v = maybe(*r, "cap_wmax")) f.region_caps.cap_wmax = count(*v, "region.cap_wmax");
    if (f.region_n == 0) fail("region.n", "must be positive");
  }
  return f;
}

void write_trace_header(std::ostream& os, const std::vector<std::uint64_t>& seeds, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << "\n";
  os << "# seeds";
  for (auto s : seeds) os << " " << s;
  os << "\n";
  os << "seed,t,err0,err1,err2,env0,env1,env2,overflow0,overflow1,overflow2\n";
}

void write_trace_rows(std::ostream& os, const est::SimTrace& r) {
  const std::size_t T = r.plants[0].error.size();
  for (std::size_t t = 0; t < T; ++t) {
    os << r.seed << "," << t;
    for (const auto& p : r.plants) os << "," << format_double(p.error[t]);
    for (const auto& p : r.plants) os << "," << format_double(p.envelope[t]);
    for (const auto& p : r.plants) os << "," << static_cast<int>(p.overflow[t]);
    os << "\n";
  }
}

void write_trace_csv(std::ostream& os, const std::vector<est::SimTrace>& runs, const std::string& comment) {
  std::vector<std::uint64_t> seeds;
  for (const auto& r : runs) seeds.push_back(r.seed);
  write_trace_header(os, seeds, comment);
  for (const auto& r : runs) write_trace_rows(os, r);
}

std::vector<TraceRow> read_trace_csv(const std::string& body) {
  const auto lines = data_lines(body);
  if (lines.empty() || lines[0] != "seed,t,err0,err1,err2,env0,env1,env2,overflow0,overflow1,overflow2")
    fail("trace csv", "bad header");
  std::vector<TraceRow> out;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = "trace csv line " + std::to_string(r + 1);
    const auto c = split(lines[r], ',');
    if (c.size() != 11) fail(where, "wrong column count");
    TraceRow row;
    row.seed = parse_uint(c[0], where);
    row.t = parse_uint(c[1], where);
    for (std::size_t i = 0; i < 3; ++i) {
      row.error[i] = parse_double(c[2 + i], where);
      row.envelope[i] = parse_double(c[5 + i], where);
      row.overflow[i] = static_cast<int>(parse_uint(c[8 + i], where));
    }
    out.push_back(row);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(spec, ',')) {
    if (part.empty()) throw ConfigError("--seeds: empty entry in '" + spec + "'");
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_uint(part, "--seeds"));
      continue;
    }
    const auto lo = parse_uint(part.substr(0, dash), "--seeds");
    const auto hi = parse_uint(part.substr(dash + 1), "--seeds");
    if (hi < lo) throw ConfigError("--seeds: empty range '" + part + "'");
    if (hi - lo >= 1'000'000) throw ConfigError("--seeds: range '" + part + "' too long");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

}  // namespace zecmac::io
