#include "zecmac/zec.hpp"

#include <algorithm>
#include <boost/dynamic_bitset.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "zecmac/errors.hpp"
#include "zecmac/parallel.hpp"

namespace zecmac::zec {

using mac::SequenceSpace;
using uv::Tuple;

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw CapError(std::string(what) + " overflows 64 bits");
  return a * b;
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::ostringstream s;
  s << '(';
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  s << ')';
  return s.str();
}

uv::VarList input_vars(std::size_t users) {
  uv::VarList v;
  for (std::size_t j = 0; j < users; ++j) v.push_back(mac::input_var(j));
  return v;
}

}  // namespace

std::uint64_t ZeCode::total_messages() const {
  std::uint64_t t = 1;
  for (auto w : w_max) t = checked_mul(t, w, "message count");
  return t;
}

std::uint64_t ZeCode::codeword(std::size_t user, std::uint64_t w0, std::uint64_t wj) const {
  if (w0 >= w_max.at(0) || wj >= w_max.at(user + 1)) throw ConfigError("message out of range");
  return encoders.at(user).at(w0 * w_max[user + 1] + wj);
}

std::vector<std::uint64_t> ZeCode::encode(const Messages& w) const {
  if (w.size() != w_max.size()) throw ConfigError("message tuple has wrong length");
  std::vector<std::uint64_t> out;
  for (std::size_t j = 0; j < num_users(); ++j) out.push_back(codeword(j, w[0], w[j + 1]));
  return out;
}

rates::RatePoint ZeCode::rate_point(std::string source) const {
  return rates::make_point(n, w_max, std::move(source));
}

std::uint64_t ZeCode::message_id(const Messages& w) const {
  if (w.size() != w_max.size()) throw ConfigError("message tuple has wrong length");
  std::uint64_t id = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= w_max[i]) throw ConfigError("message out of range");
    id = id * w_max[i] + w[i];
  }
  return id;
}

Messages ZeCode::message_tuple(std::uint64_t id) const {
  Messages w(w_max.size());
  for (std::size_t i = w_max.size(); i-- > 0;) {
    w[i] = id % w_max[i];
    id /= w_max[i];
  }
  return w;
}

void ZeCode::validate(const MacSpec& m) const {
  if (n == 0) throw ConfigError("code blocklength must be positive");
  if (w_max.size() != m.num_users() + 1 || encoders.size() != m.num_users())
    throw ConfigError("code has " + std::to_string(encoders.size()) + " users, channel has " +
                      std::to_string(m.num_users()));
  for (auto w : w_max)
    if (w == 0) throw ConfigError("message cardinalities must be positive");
  for (std::size_t j = 0; j < encoders.size(); ++j) {
    if (encoders[j].size() != checked_mul(w_max[0], w_max[j + 1], "encoder table"))
      throw ConfigError("encoder table of " + mac::input_var(j) + " is not total");
    const SequenceSpace space(m.input_size(j), n);
    for (auto cw : encoders[j])
      if (cw >= space.size())
        throw ConfigError("codeword of " + mac::input_var(j) + " outside the input alphabet");
  }
}

namespace {

// Visits (message id, reachable outputs) for every message tuple; stops
// when visit returns false.
template <class Visit>
void for_each_output_set(const ZeCode& c, const MacSpec& m, Visit&& visit) {
  c.validate(m);
  const std::uint64_t total = c.total_messages();
  for (std::uint64_t id = 0; id < total; ++id) {
    const auto cw = c.encode(c.message_tuple(id));
    if (!visit(id, mac::output_indices(m, c.n, cw))) return;
  }
}

}  // namespace

bool is_zero_error(const ZeCode& c, const MacSpec& m) {
  std::map<std::uint64_t, std::uint64_t> owner;
  bool ok = true;
  for_each_output_set(c, m, [&](std::uint64_t id, const std::vector<std::uint64_t>& ys) {
    for (auto y : ys)
      if (!owner.emplace(y, id).second) {
        ok = false;
        return false;
      }
    return true;
  });
  return ok;
}

Decoder::Decoder(const ZeCode& c, const MacSpec& m)
    : code_(&c), n_(c.n), output_size_(m.output_size()) {
  for_each_output_set(c, m, [&](std::uint64_t id, const std::vector<std::uint64_t>& ys) {
    for (auto y : ys) {
      auto [it, fresh] = table_.emplace(y, id);
      if (!fresh)
        throw InvariantError("code is not zero-error: messages " + join(c.message_tuple(it->second)) +
                             " and " + join(c.message_tuple(id)) + " share output " +
                             std::to_string(y));
    }
    return true;
  });
}

Messages Decoder::decode(std::uint64_t y) const {
  auto it = table_.find(y);
  if (it == table_.end())
    throw ChannelContractError("output sequence " + std::to_string(y) + " is not produced by any codeword");
  Messages w = code_->message_tuple(it->second);
  if (code_->staged) {
    const auto& st = *code_->staged;
    Messages s(w.size());
    auto c = st.common_block.find(y);
    if (c == st.common_block.end()) throw InvariantError("staged decoder has no common block for output");
    s[0] = c->second;
    for (std::size_t j = 0; j < code_->num_users(); ++j) {
      const auto& tab = st.private_block.at(s[0]).at(j);
      auto p = tab.find(y);
      if (p == tab.end()) throw InvariantError("staged decoder has no private block for output");
      s[j + 1] = p->second;
    }
    if (s != w)
      throw InvariantError("staged decoder gave " + join(s) + ", table inversion gave " + join(w));
  }
  return w;
}

Messages Decoder::decode(const Block& y) const {
  return decode(SequenceSpace(output_size_, n_).index(y));
}

Messages decode(const ZeCode& c, const MacSpec& m, const Block& y) { return Decoder(c, m).decode(y); }

namespace {

struct Analysis {
  uv::JointRange ext;
  uv::OverlapPartition common;
  uv::CondFamily common_family;
  std::vector<std::vector<uv::SlicePartition>> slices;  // [user][u slice]
  std::vector<std::size_t> private_min;
};

Analysis analyse(const mac::InputProcess& p, const MacSpec& m) {
  if (!p.has_aux) throw PreconditionError("input structure has no auxiliary variable U");
  const auto xs = input_vars(m.num_users());
  if (xs.size() >= 2) {
    std::vector<uv::VarList> groups;
    for (const auto& x : xs) groups.push_back({x});
    if (!uv::is_conditionally_unrelated(p.joint, groups, {mac::kAuxVar}))
      throw PreconditionError("condition (i) failed: inputs are not conditionally unrelated given U");
  }
  Analysis a{mac::extend_joint(m, p), {}, {}, {}, {}};
  if (!uv::is_markov(a.ext, {mac::kAuxVar}, xs, {mac::kOutputVar}))
    throw PreconditionError("condition (ii) failed: U <-> X <-> Y is not a Markov chain");
  a.common_family = uv::conditional_family(a.ext, {mac::kAuxVar}, {mac::kOutputVar});
  a.common = uv::overlap_partition(a.common_family);
  for (const auto& x : xs) {
    a.slices.push_back(uv::conditional_overlap_partitions(a.ext, {x}, {mac::kOutputVar}, {mac::kAuxVar}));
    std::size_t lo = std::numeric_limits<std::size_t>::max();
    for (const auto& s : a.slices.back()) lo = std::min(lo, s.partition.size());
    a.private_min.push_back(lo);
  }
  return a;
}

}  // namespace

StructureInfo structure_info(const mac::InputProcess& p, const MacSpec& m) {
  const auto a = analyse(p, m);
  StructureInfo s;
  s.common_blocks = a.common.size();
  s.common_info = std::log2(static_cast<double>(s.common_blocks));
  s.private_blocks = a.private_min;
  for (auto b : a.private_min) s.private_info.push_back(std::log2(static_cast<double>(b)));
  return s;
}

ZeCode construct_code(const mac::InputProcess& p, const MacSpec& m) {
  const auto a = analyse(p, m);
  const std::size_t users = m.num_users();
  ZeCode c;
  c.n = p.blocklength;
  c.w_max.push_back(a.common.size());
  for (auto b : a.private_min) c.w_max.push_back(b);
  c.encoders.assign(users, {});

  const std::size_t ucol = a.ext.index_of(mac::kAuxVar);
  const std::size_t ycol = a.ext.index_of(mac::kOutputVar);
  StagedTables st;
  for (std::size_t i = 0; i < a.common_family.keys.size(); ++i)
    st.common_block[a.common_family.keys[i][0]] = a.common.block_of(a.common_family.sets[i].front());
  st.private_block.assign(c.w_max[0], std::vector<std::map<std::uint64_t, std::uint64_t>>(users));

  for (std::uint64_t w0 = 0; w0 < c.w_max[0]; ++w0) {
    // the smallest u of each ⟦U|Y⟧* block stands for that block
    const Tuple u = a.common.blocks[w0].front();
    for (std::size_t j = 0; j < users; ++j) {
      const auto& slices = a.slices[j];
      auto it = std::find_if(slices.begin(), slices.end(), [&](const auto& s) { return s.w == u; });
      if (it == slices.end()) throw InvariantError("no slice for a representative of U");
      const auto& part = it->partition;
      if (part.size() < c.w_max[j + 1]) throw InvariantError("slice has fewer blocks than the minimum");
      for (std::uint64_t wj = 0; wj < c.w_max[j + 1]; ++wj) c.encoders[j].push_back(part.blocks[wj].front()[0]);

      const std::size_t xcol = a.ext.index_of(mac::input_var(j));
      auto& tab = st.private_block[w0][j];
      for (const auto& row : a.ext.support()) {
        if (row[ucol] != u[0]) continue;
        const std::uint64_t b = part.block_of({row[xcol]});
        auto [pos, fresh] = tab.emplace(row[ycol], b);
        if (!fresh && pos->second != b) throw InvariantError("output lies in two private blocks");
      }
    }
  }
  c.staged = std::move(st);
  Decoder check(c, m);  // throws if the construction is not zero-error
  (void)check;
  return c;
}

ZeCode time_share(const MacSpec& ma, const ZeCode& a, const MacSpec& mb, const ZeCode& b,
                  std::uint64_t j, std::uint64_t k) {
  if (!(ma == mb)) throw ConfigError("time sharing needs both codes on the same channel");
  a.validate(ma);
  b.validate(mb);
  if (j + k == 0) throw ConfigError("time sharing needs at least one block");
  const std::size_t users = ma.num_users();

  ZeCode c;
  c.n = j * a.n + k * b.n;
  for (std::size_t i = 0; i <= users; ++i) {
    std::uint64_t w = 1;
    for (std::uint64_t t = 0; t < j; ++t) w = checked_mul(w, a.w_max[i], "composite message count");
    for (std::uint64_t t = 0; t < k; ++t) w = checked_mul(w, b.w_max[i], "composite message count");
    c.w_max.push_back(w);
  }
  constexpr std::uint64_t kMaxTable = 10'000'000;
  c.encoders.assign(users, {});
  for (std::size_t u = 0; u < users; ++u) {
    const std::uint64_t entries = checked_mul(c.w_max[0], c.w_max[u + 1], "encoder table");
    if (entries > kMaxTable) throw CapError("composite encoder table too large");
    const std::uint64_t ra = SequenceSpace(ma.input_size(u), a.n).size();
    const std::uint64_t rb = SequenceSpace(ma.input_size(u), b.n).size();
    SequenceSpace(ma.input_size(u), c.n);  // overflow check on the composite index
    // message digits, first block most significant
    auto digits = [&](std::uint64_t v, std::uint64_t wa, std::uint64_t wb) {
      std::vector<std::uint64_t> d(j + k);
      for (std::uint64_t t = j + k; t-- > 0;) {
        const std::uint64_t r = t < j ? wa : wb;
        d[t] = v % r;
        v /= r;
      }
      return d;
    };
    for (std::uint64_t w0 = 0; w0 < c.w_max[0]; ++w0) {
      const auto d0 = digits(w0, a.w_max[0], b.w_max[0]);
      for (std::uint64_t wj = 0; wj < c.w_max[u + 1]; ++wj) {
        const auto dj = digits(wj, a.w_max[u + 1], b.w_max[u + 1]);
        std::uint64_t idx = 0;
        for (std::uint64_t t = 0; t < j + k; ++t) {
          if (t < j) idx = idx * ra + a.codeword(u, d0[t], dj[t]);
          else idx = idx * rb + b.codeword(u, d0[t], dj[t]);
        }
        c.encoders[u].push_back(idx);
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Region enumeration

namespace {

using Mask = boost::dynamic_bitset<std::uint64_t>;

// All subsets of [0, universe) with 1..cap elements, sorted, size-major.
std::vector<std::vector<std::uint64_t>> small_subsets(std::uint64_t universe, std::uint64_t cap) {
  std::vector<std::vector<std::uint64_t>> out;
  for (std::uint64_t size = 1; size <= std::min(cap, universe); ++size) {
    std::vector<std::uint64_t> cur(size);
    for (std::uint64_t i = 0; i < size; ++i) cur[i] = i;
    for (;;) {
      out.push_back(cur);
      std::uint64_t i = size;
      while (i > 0 && cur[i - 1] == universe - size + (i - 1)) --i;
      if (i == 0) break;
      ++cur[i - 1];
      for (std::uint64_t t = i; t < size; ++t) cur[t] = cur[t - 1] + 1;
    }
  }
  return out;
}

double binom(double n, double k) {
  double r = 1;
  for (double i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

void check_n(const MacSpec& m, std::size_t n, const Caps& caps) {
  if (n == 0) throw ConfigError("blocklength must be positive");
  if (n > caps.limit_n)
    throw CapError("blocklength " + std::to_string(n) + " exceeds the limit " + std::to_string(caps.limit_n));
  if (caps.cap_u == 0 || caps.cap_wmax == 0) throw ConfigError("caps must be positive");
  (void)SequenceSpace(m.output_size(), n);
}

// Largest set of pairwise disjoint masks, at most `cap` of them.
std::vector<std::size_t> max_packing(const std::vector<Mask>& masks, std::uint64_t cap) {
  std::vector<std::size_t> best, cur;
  const std::size_t bits = masks.empty() ? 0 : masks.front().size();
  Mask used(bits);
  auto rec = [&](auto& self, std::size_t start) -> void {
    if (cur.size() > best.size()) best = cur;
    if (best.size() >= cap) return;
    if (cur.size() + (masks.size() - start) <= best.size()) return;
    for (std::size_t i = start; i < masks.size(); ++i) {
      if (masks[i].intersects(used)) continue;
      used |= masks[i];
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
      used ^= masks[i];
      if (best.size() >= cap) return;
    }
  };
  rec(rec, 0);
  return best;
}

// Drops duplicate masks and masks containing another one; a witness index
// into the original list is kept for each survivor.
std::vector<std::size_t> minimal_masks(const std::vector<Mask>& masks, const std::vector<std::size_t>& ids) {
  std::vector<std::size_t> order = ids;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = masks[a].count(), cb = masks[b].count();
    return ca != cb ? ca < cb : (masks[a] != masks[b] ? masks[a] < masks[b] : a < b);
  });
  std::vector<std::size_t> keep;
  for (auto i : order) {
    bool redundant = false;
    for (auto k : keep)
      if (masks[k].is_subset_of(masks[i])) {
        redundant = true;
        break;
      }
    if (!redundant) keep.push_back(i);
  }
  return keep;
}

struct Corner {
  rates::RatePoint point;
  ZeCode code;
};

Region finish(std::vector<Corner> corners, std::size_t n, const Caps& caps, std::vector<std::string> warnings,
              const char* source) {
  Region r;
  r.n_max = n;
  r.caps = caps;
  r.warnings = std::move(warnings);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < corners.size() && maximal; ++j) {
      if (i == j || !rates::dominates(corners[j].point, corners[i].point)) continue;
      if (!rates::same_rates(corners[i].point, corners[j].point) || j < i) maximal = false;
    }
    if (maximal) keep.push_back(i);
  }
  std::sort(keep.begin(), keep.end(),
            [&](std::size_t a, std::size_t b) { return rates::rate_less(corners[a].point, corners[b].point); });
  for (auto i : keep) {
    corners[i].point.source = source;
    r.points.push_back(corners[i].point);
    r.codes.push_back(std::move(corners[i].code));
  }
  if (r.points.empty()) throw InvariantError("region enumeration produced no points");
  r.hull = rates::convex_hull(r.points);
  return r;
}

}  // namespace

Region enumerate_region_thm1(const MacSpec& m, std::size_t n, const Caps& caps) {
  check_n(m, n, caps);
  const std::size_t users = m.num_users();
  const std::uint64_t ny = SequenceSpace(m.output_size(), n).size();

  std::vector<std::vector<std::vector<std::uint64_t>>> books(users);
  double count = 1;
  for (std::size_t j = 0; j < users; ++j) {
    books[j] = small_subsets(SequenceSpace(m.input_size(j), n).size(), caps.cap_wmax);
    count *= static_cast<double>(books[j].size());
  }
  if (count > static_cast<double>(caps.max_search))
    throw CapError("thm1 enumeration would examine " + std::to_string(static_cast<long double>(count)) +
                   " input slices (budget " + std::to_string(caps.max_search) + ")");
  const auto total = static_cast<std::size_t>(count);

  // Every product slice ⟦X^1|u⟧ x ... x ⟦X^M|u⟧ of a candidate structure:
  // its per-user block counts and the outputs it can produce.
  std::vector<std::vector<std::size_t>> pick(total, std::vector<std::size_t>(users));
  std::vector<std::vector<std::size_t>> blocks(total);
  std::vector<Mask> outputs(total);
  const auto xs = input_vars(users);
  parallel_for(total, [&](std::size_t s) {
    std::size_t rest = s;
    for (std::size_t j = users; j-- > 0;) {
      pick[s][j] = rest % books[j].size();
      rest /= books[j].size();
    }
    std::vector<Tuple> support{Tuple{0}};
    for (std::size_t j = 0; j < users; ++j) {
      std::vector<Tuple> next;
      for (const auto& t : support)
        for (auto cw : books[j][pick[s][j]]) {
          auto u = t;
          u.push_back(static_cast<std::uint32_t>(cw));
          next.push_back(std::move(u));
        }
      support = std::move(next);
    }
    const auto p = mac::make_input_process(m, n, true, 1, std::move(support));
    const auto ext = mac::extend_joint(m, p);
    for (const auto& x : xs)
      blocks[s].push_back(uv::conditional_overlap_count(ext, {x}, {mac::kOutputVar}, {mac::kAuxVar}));
    Mask mask(ny);
    for (const auto& y : uv::marginal_range(ext, {mac::kOutputVar})) mask.set(y[0]);
    outputs[s] = std::move(mask);
  });

  // For each threshold t on the private block counts, the common message
  // count is the largest family of slices meeting t with disjoint outputs.
  std::vector<std::vector<std::uint64_t>> thresholds{{}};
  for (std::size_t j = 0; j < users; ++j) {
    std::vector<std::vector<std::uint64_t>> next;
    for (const auto& t : thresholds)
      for (std::uint64_t v = 1; v <= caps.cap_wmax; ++v) {
        auto u = t;
        u.push_back(v);
        next.push_back(std::move(u));
      }
    thresholds = std::move(next);
  }
  struct Raw {
    std::vector<std::uint64_t> w;
    std::vector<std::size_t> slices;
  };
  std::vector<std::optional<Raw>> raw(thresholds.size());
  parallel_for(thresholds.size(), [&](std::size_t ti) {
    const auto& t = thresholds[ti];
    std::vector<std::size_t> ids;
    for (std::size_t s = 0; s < total; ++s) {
      bool ok = true;
      for (std::size_t j = 0; j < users && ok; ++j) ok = blocks[s][j] >= t[j];
      if (ok) ids.push_back(s);
    }
    if (ids.empty()) return;
    const auto cand = minimal_masks(outputs, ids);
    std::vector<Mask> masks;
    for (auto i : cand) masks.push_back(outputs[i]);
    const auto packing = max_packing(masks, caps.cap_u);
    Raw r;
    r.w.push_back(packing.size());
    r.w.insert(r.w.end(), t.begin(), t.end());
    for (auto i : packing) r.slices.push_back(cand[i]);
    raw[ti] = std::move(r);
  });

  std::vector<Corner> corners;
  std::vector<std::size_t> corner_slot;
  for (std::size_t ti = 0; ti < raw.size(); ++ti)
    if (raw[ti]) {
      corners.push_back({rates::make_point(n, raw[ti]->w), {}});
      corner_slot.push_back(ti);
    }

  std::vector<std::string> warnings;
  // Certify the maximal corners with a real structure and the constructor.
  std::vector<bool> maximal(corners.size(), true);
  for (std::size_t i = 0; i < corners.size(); ++i)
    for (std::size_t j = 0; j < corners.size() && maximal[i]; ++j)
      if (i != j && rates::dominates(corners[j].point, corners[i].point) &&
          (!rates::same_rates(corners[i].point, corners[j].point) || j < i))
        maximal[i] = false;
  std::vector<Corner> kept;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    if (!maximal[i]) continue;
    const Raw& r = *raw[corner_slot[i]];
    std::vector<Tuple> support;
    for (std::size_t u = 0; u < r.slices.size(); ++u) {
      std::vector<Tuple> rows{Tuple{static_cast<std::uint32_t>(u)}};
      for (std::size_t j = 0; j < users; ++j) {
        std::vector<Tuple> next;
        for (const auto& t : rows)
          for (auto cw : books[j][pick[r.slices[u]][j]]) {
            auto v = t;
            v.push_back(static_cast<std::uint32_t>(cw));
            next.push_back(std::move(v));
          }
        rows = std::move(next);
      }
      support.insert(support.end(), rows.begin(), rows.end());
    }
    const auto p = mac::make_input_process(m, n, true, static_cast<std::uint32_t>(r.slices.size()), support);
    ZeCode code = construct_code(p, m);
    if (!rates::same_rates(code.rate_point(), corners[i].point))
      throw InvariantError("constructed code " + join(code.w_max) + " misses its corner " + join(r.w));
    if (r.w[0] >= caps.cap_u)
      warnings.push_back("n=" + std::to_string(n) + ": common message count capped at cap_u=" +
                         std::to_string(caps.cap_u) + " for corner " + join(r.w));
    for (std::size_t j = 1; j < r.w.size(); ++j)
      if (r.w[j] >= caps.cap_wmax) {
        warnings.push_back("n=" + std::to_string(n) + ": private message count of " + mac::input_var(j - 1) +
                           " capped at cap_wmax=" + std::to_string(caps.cap_wmax) + " for corner " + join(r.w));
        break;
      }
    kept.push_back({corners[i].point, std::move(code)});
  }
  return finish(std::move(kept), n, caps, std::move(warnings), "thm1");
}

double bruteforce_search_size(const MacSpec& m, std::size_t n, const Caps& caps) {
  const std::size_t users = m.num_users();
  const double ny = static_cast<double>(SequenceSpace(m.output_size(), n).size());
  double total = 0;
  std::vector<std::uint64_t> w(users, 1);
  for (;;) {
    double prod = 1, slices = 1;
    for (std::size_t j = 0; j < users; ++j) {
      prod *= static_cast<double>(w[j]);
      slices *= binom(static_cast<double>(SequenceSpace(m.input_size(j), n).size()), static_cast<double>(w[j]));
    }
    if (prod <= ny) total += slices;
    std::size_t j = users;
    while (j > 0 && w[j - 1] == caps.cap_wmax) w[--j] = 1;
    if (j == 0) break;
    ++w[j - 1];
  }
  return total;
}

Region enumerate_region_bruteforce(const MacSpec& m, std::size_t n, const Caps& caps) {
  check_n(m, n, caps);
  const double size = bruteforce_search_size(m, n, caps);
  if (size > static_cast<double>(caps.max_search))
    throw CapError("brute-force search would examine about " + std::to_string(static_cast<long double>(size)) +
                   " candidate codebook tuples (budget " + std::to_string(caps.max_search) + ")");
  const std::size_t users = m.num_users();
  const std::uint64_t ny = SequenceSpace(m.output_size(), n).size();
  std::vector<std::uint64_t> nx(users);
  for (std::size_t j = 0; j < users; ++j) nx[j] = SequenceSpace(m.input_size(j), n).size();

  // every private cardinality tuple that fits in the output space
  std::vector<std::vector<std::uint64_t>> tuples;
  {
    std::vector<std::uint64_t> w(users, 1);
    for (;;) {
      std::uint64_t prod = 1;
      bool fits = true;
      for (std::size_t j = 0; j < users; ++j) {
        prod *= w[j];
        fits = fits && w[j] <= nx[j];
      }
      if (fits && prod <= ny) tuples.push_back(w);
      std::size_t j = users;
      while (j > 0 && w[j - 1] == caps.cap_wmax) w[--j] = 1;
      if (j == 0) break;
      ++w[j - 1];
    }
  }

  std::vector<std::optional<Corner>> found(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t ti) {
    const auto& w = tuples[ti];
    std::uint64_t prod = 1;
    for (auto v : w) prod *= v;
    // all codebook choices, one combination per user
    std::vector<std::vector<std::vector<std::uint64_t>>> combos(users);
    for (std::size_t j = 0; j < users; ++j)
      for (auto& s : small_subsets(nx[j], w[j]))
        if (s.size() == w[j]) combos[j].push_back(std::move(s));
    std::vector<std::vector<std::size_t>> valid;  // combo index per user
    std::vector<Mask> masks;
    std::vector<std::size_t> idx(users, 0);
    for (;;) {
      // the slice is usable iff every codeword tuple reaches outputs no
      // other tuple of the slice reaches
      Mask seen(ny);
      bool ok = true;
      std::vector<std::uint64_t> pos(users, 0), cw(users);
      for (std::uint64_t k = 0; k < prod && ok; ++k) {
        for (std::size_t j = 0; j < users; ++j) cw[j] = combos[j][idx[j]][pos[j]];
        for (auto y : mac::output_indices(m, n, cw)) {
          if (seen.test(y)) {
            ok = false;
            break;
          }
          seen.set(y);
        }
        for (std::size_t j = users; j-- > 0;) {
          if (++pos[j] < w[j]) break;
          pos[j] = 0;
        }
      }
      if (ok && std::find(masks.begin(), masks.end(), seen) == masks.end()) {
        masks.push_back(seen);
        valid.push_back(idx);
      }
      std::size_t j = users;
      while (j > 0 && idx[j - 1] + 1 == combos[j - 1].size()) idx[--j] = 0;
      if (j == 0) break;
      ++idx[j - 1];
    }
    if (masks.empty()) return;

    // largest number of slices with pairwise disjoint outputs
    const std::uint64_t limit = std::min<std::uint64_t>(caps.cap_u, ny / prod);
    std::vector<std::size_t> best, cur;
    Mask used(ny);
    auto search = [&](auto& self, std::size_t from) -> void {
      if (cur.size() > best.size()) best = cur;
      for (std::size_t i = from; i < masks.size() && best.size() < limit; ++i) {
        if ((masks[i] & used).any()) continue;
        used |= masks[i];
        cur.push_back(i);
        self(self, i + 1);
        cur.pop_back();
        used &= ~masks[i];
      }
    };
    search(search, 0);

    ZeCode code;
    code.n = n;
    code.w_max.push_back(best.size());
    code.w_max.insert(code.w_max.end(), w.begin(), w.end());
    code.encoders.assign(users, {});
    for (auto s : best)
      for (std::size_t j = 0; j < users; ++j) {
        const auto& book = combos[j][valid[s][j]];
        code.encoders[j].insert(code.encoders[j].end(), book.begin(), book.end());
      }
    found[ti] = Corner{code.rate_point(), std::move(code)};
  });

  std::vector<Corner> corners;
  for (auto& f : found)
    if (f) corners.push_back(std::move(*f));
  std::vector<std::string> warnings;
  for (const auto& c : corners) {
    if (!is_zero_error(c.code, m)) throw InvariantError("brute-force witness " + join(c.code.w_max) + " is not zero-error");
  }
  auto region = finish(std::move(corners), n, caps, {}, "bruteforce");
  for (const auto& p : region.points) {
    std::vector<std::uint64_t> w;
    for (const auto& v : p.w) w.push_back(static_cast<std::uint64_t>(v));
    if (w[0] >= caps.cap_u)
      warnings.push_back("n=" + std::to_string(n) + ": common message count capped at cap_u=" +
                         std::to_string(caps.cap_u) + " for corner " + join(w));
    for (std::size_t j = 1; j < w.size(); ++j)
      if (w[j] >= caps.cap_wmax) {
        warnings.push_back("n=" + std::to_string(n) + ": private message count of " + mac::input_var(j - 1) +
                           " capped at cap_wmax=" + std::to_string(caps.cap_wmax) + " for corner " + join(w));
        break;
      }
  }
  region.warnings = std::move(warnings);
  return region;
}

RegionDiff diff(const Region& a, const Region& b) {
  RegionDiff d;
  auto missing = [](const rates::RatePoint& p, const std::vector<rates::RatePoint>& in) {
    return std::none_of(in.begin(), in.end(), [&](const auto& q) { return rates::same_rates(p, q); });
  };
  for (const auto& p : a.points)
    if (missing(p, b.points)) d.only_a.push_back(p);
  for (const auto& p : b.points)
    if (missing(p, a.points)) d.only_b.push_back(p);
  return d;
}

}  // namespace zecmac::zec
