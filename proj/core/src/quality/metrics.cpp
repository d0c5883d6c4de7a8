// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/quality/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

#include "copygen/corpus/document.hpp"
#include "copygen/corpus/tokenizer.hpp"
#include "copygen/error.hpp"

namespace copygen::quality {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Tokens& tokens, std::size_t n) {
  NgramCounts out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (int n = 0; n < 4; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  candidate_length += o.candidate_length;
  reference_length += o.reference_length;
  return *this;
}

BleuStats bleu_stats(const Tokens& candidate, std::span<const Tokens> references) {
  if (references.empty()) throw Error("no_reference", "BLEU needs at least one reference");
  BleuStats s;
  s.candidate_length = candidate.size();
  std::size_t best = references[0].size();
  for (const auto& ref : references) {
    const auto diff = [&](std::size_t len) {
      return len > candidate.size() ? len - candidate.size() : candidate.size() - len;
    };
    if (diff(ref.size()) < diff(best) || (diff(ref.size()) == diff(best) && ref.size() < best)) best = ref.size();
  }
  s.reference_length = best;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand = ngrams(candidate, n);
    NgramCounts max_ref;
    for (const auto& ref : references)
      for (const auto& [g, c] : ngrams(ref, n)) max_ref[g] = std::max(max_ref[g], c);
    for (const auto& [g, c] : cand) {
      s.totals[n - 1] += c;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) s.matches[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

double bleu_from_stats(const BleuStats& s, std::size_t max_n, Smoothing smoothing) {
  if (max_n < 1 || max_n > 4) throw Error("config_error", "BLEU order must be in 1..4");
  if (s.candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    double num = static_cast<double>(s.matches[n - 1]);
    double den = static_cast<double>(s.totals[n - 1]);
    if (n >= 2 && smoothing == Smoothing::add_one && s.matches[n - 1] == 0) {
      num += 1.0;
      den += 1.0;
    }
    if (num == 0.0 || den == 0.0) return 0.0;
    log_sum += std::log(num / den);
  }
  const double c = static_cast<double>(s.candidate_length), r = static_cast<double>(s.reference_length);
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return std::min(1.0, bp * std::exp(log_sum / static_cast<double>(max_n)));
}

double bleu(const Tokens& candidate, std::span<const Tokens> references, std::size_t max_n, Smoothing smoothing) {
  if (max_n < 1 || max_n > 4) throw Error("config_error", "BLEU order must be in 1..4");
  return bleu_from_stats(bleu_stats(candidate, references), max_n, smoothing);
}

namespace {

bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) || (c >= 0x3040 && c <= 0x30FF) ||
         (c >= 0xAC00 && c <= 0xD7AF) || (c >= 0xF900 && c <= 0xFAFF);
}

bool is_punct(char32_t c) {
  if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
  return (c >= 0x2000 && c <= 0x206F) || (c >= 0x3000 && c <= 0x303F) || (c >= 0xFF00 && c <= 0xFF0F) ||
         (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65);
}

std::string encode_utf8(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
  return out;
}

}  // namespace

Tokens standard_tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (const auto& cp : corpus::utf8_code_points(text)) {
    char32_t c = 0;
    // Decode the code point (already validated by utf8_code_points).
    const auto* b = reinterpret_cast<const unsigned char*>(cp.data());
    if (cp.size() == 1) c = b[0];
    else if (cp.size() == 2) c = ((b[0] & 0x1F) << 6) | (b[1] & 0x3F);
    else if (cp.size() == 3) c = ((b[0] & 0x0F) << 12) | ((b[1] & 0x3F) << 6) | (b[2] & 0x3F);
    else c = ((b[0] & 0x07) << 18) | ((b[1] & 0x3F) << 12) | ((b[2] & 0x3F) << 6) | (b[3] & 0x3F);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == 0x3000) {
      flush();
    } else if (is_punct(c) || is_cjk(c)) {
      flush();
      out.push_back(encode_utf8(c));
    } else if (c < 0x80) {
      current += static_cast<char>(std::tolower(static_cast<int>(c)));
    } else {
      current += cp;
    }
  }
  flush();
  return out;
}

double sacre_bleu(std::string_view candidate, std::span<const std::string> references) {
  std::vector<Tokens> refs;
  for (const auto& r : references) refs.push_back(standard_tokenize(r));
  return bleu(standard_tokenize(candidate), refs, 4, Smoothing::add_one);
}

Prf rouge(const Tokens& candidate, const Tokens& reference, RougeVariant variant) {
  if (reference.empty()) throw Error("empty_reference", "ROUGE needs a nonempty reference");
  if (candidate.empty()) return {};
  double overlap = 0.0, cand_total = 0.0, ref_total = 0.0;
  if (variant == RougeVariant::rougeL) {
    overlap = static_cast<double>(corpus::lcs_length(candidate, reference));
    cand_total = static_cast<double>(candidate.size());
    ref_total = static_cast<double>(reference.size());
  } else {
    const std::size_t n = variant == RougeVariant::rouge1 ? 1 : 2;
    const auto c = ngrams(candidate, n), r = ngrams(reference, n);
    for (const auto& [g, k] : c) {
      cand_total += static_cast<double>(k);
      auto it = r.find(g);
      if (it != r.end()) overlap += static_cast<double>(std::min(k, it->second));
    }
    for (const auto& [g, k] : r) ref_total += static_cast<double>(k);
  }
  Prf out;
  out.precision = cand_total > 0.0 ? overlap / cand_total : 0.0;
  out.recall = ref_total > 0.0 ? overlap / ref_total : 0.0;
  out.f1 = f1_of(out.precision, out.recall);
  return out;
}

std::size_t count_chunks(const std::vector<long>& align) {
  std::size_t chunks = 0;
  long prev = -2;
  for (long j : align) {
    if (j >= 0 && !(prev >= 0 && j == prev + 1)) ++chunks;
    prev = j;
  }
  return chunks;
}

namespace {

// Exhaustive search over maximum-match alignments, memoised on
// (candidate position, previous reference position, used reference set).
class ChunkSearch {
 public:
  ChunkSearch(const Tokens& cand, const Tokens& ref, std::size_t budget) : cand_(cand), ref_(ref), budget_(budget) {
    std::unordered_map<std::string, std::size_t> cand_count, ref_count;
    for (const auto& t : cand) ++cand_count[t];
    for (const auto& t : ref) ++ref_count[t];
    for (const auto& [t, c] : cand_count) {
      auto it = ref_count.find(t);
      const std::size_t m = it == ref_count.end() ? 0 : std::min(c, it->second);
      skips_[t] = c - m;
    }
    for (std::size_t j = 0; j < ref.size(); ++j) positions_[ref[j]].push_back(j);
  }

  // False if the state budget ran out before the search finished.
  bool run(std::size_t& chunks, std::vector<long>& align) {
    std::unordered_map<std::string, std::size_t> skipped;
    const auto best = solve(0, -1, 0, skipped);
    if (exhausted_) return false;
    chunks = best;
    // Replay the memoised choices to recover an alignment.
    align.assign(cand_.size(), -1);
    long prev = -1;
    std::uint64_t used = 0;
    for (std::size_t i = 0; i < cand_.size(); ++i) {
      const auto target = lookup(i, prev, used);
      bool done = false;
      for (auto j : candidates(i, used)) {
        const std::size_t add = (prev >= 0 && static_cast<long>(j) == prev + 1) ? 0 : 1;
        if (add + lookup(i + 1, static_cast<long>(j), used | (1ull << j)) == target) {
          align[i] = static_cast<long>(j);
          used |= 1ull << j;
          prev = static_cast<long>(j);
          done = true;
          break;
        }
      }
      if (!done) prev = -1;
    }
    return true;
  }

 private:
  static constexpr std::size_t kInfinity = static_cast<std::size_t>(-1) / 4;

  struct Key {
    std::size_t i;
    long prev;
    std::uint64_t used;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::uint64_t>()(k.used * 1000003u ^ (k.i << 20) ^ static_cast<std::size_t>(k.prev + 1));
    }
  };
  static Key key(std::size_t i, long prev, std::uint64_t used) { return {i, prev, used}; }

  // Terminal states are not stored.
  std::size_t lookup(std::size_t i, long prev, std::uint64_t used) const {
    if (i == cand_.size()) return 0;
    auto it = memo_.find(key(i, prev, used));
    return it == memo_.end() ? kInfinity : it->second;
  }

  std::vector<std::size_t> candidates(std::size_t i, std::uint64_t used) const {
    std::vector<std::size_t> out;
    auto it = positions_.find(cand_[i]);
    if (it == positions_.end()) return out;
    for (auto j : it->second)
      if (!(used >> j & 1)) out.push_back(j);
    return out;
  }

  std::size_t solve(std::size_t i, long prev, std::uint64_t used, std::unordered_map<std::string, std::size_t>& skipped) {
    if (exhausted_) return kInfinity;
    if (i == cand_.size()) return 0;
    const Key k = key(i, prev, used);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    if (memo_.size() >= budget_) {
      exhausted_ = true;
      return kInfinity;
    }
    std::size_t best = kInfinity;
    for (auto j : candidates(i, used)) {
      const std::size_t add = (prev >= 0 && static_cast<long>(j) == prev + 1) ? 0 : 1;
      best = std::min(best, add + solve(i + 1, static_cast<long>(j), used | (1ull << j), skipped));
    }
    const auto& tok = cand_[i];
    if (skipped[tok] < skips_[tok]) {
      ++skipped[tok];
      best = std::min(best, solve(i + 1, -1, used, skipped));
      --skipped[tok];
    }
    memo_[k] = best;
    return best;
  }

  const Tokens& cand_;
  const Tokens& ref_;
  std::size_t budget_;
  bool exhausted_ = false;
  std::unordered_map<std::string, std::size_t> skips_;
  std::unordered_map<std::string, std::vector<std::size_t>> positions_;
  std::unordered_map<Key, std::size_t, KeyHash> memo_;
};

// Left to right; prefer extending the current chunk, else the earliest free
// reference position.
std::vector<long> greedy_alignment(const Tokens& cand, const Tokens& ref) {
  std::vector<bool> used(ref.size(), false);
  std::vector<long> align(cand.size(), -1);
  long prev = -1;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    long pick = -1;
    if (prev >= 0 && static_cast<std::size_t>(prev + 1) < ref.size() && !used[static_cast<std::size_t>(prev + 1)] &&
        ref[static_cast<std::size_t>(prev + 1)] == cand[i]) {
      pick = prev + 1;
    } else {
      for (std::size_t j = 0; j < ref.size(); ++j)
        if (!used[j] && ref[j] == cand[i]) {
          pick = static_cast<long>(j);
          break;
        }
    }
    if (pick >= 0) used[static_cast<std::size_t>(pick)] = true;
    align[i] = pick;
    prev = pick;
  }
  return align;
}

}  // namespace

MeteorResult meteor_lite_detail(const Tokens& candidate, const Tokens& reference, std::size_t search_budget) {
  if (reference.empty()) throw Error("empty_reference", "Meteor needs a nonempty reference");
  MeteorResult r;
  if (candidate.empty()) return r;
  // The memo packs used reference positions into 64 bits.
  bool solved = false;
  if (reference.size() <= 64) {
    ChunkSearch search(candidate, reference, search_budget);
    std::vector<long> align;
    if (search.run(r.chunks, align)) {
      r.matches = static_cast<std::size_t>(std::count_if(align.begin(), align.end(), [](long j) { return j >= 0; }));
      solved = true;
    }
  }
  if (!solved) {
    const auto align = greedy_alignment(candidate, reference);
    r.matches = static_cast<std::size_t>(std::count_if(align.begin(), align.end(), [](long j) { return j >= 0; }));
    r.chunks = count_chunks(align);
    r.exact = false;
  }
  if (r.matches == 0) return r;
  const double m = static_cast<double>(r.matches);
  r.precision = m / static_cast<double>(candidate.size());
  r.recall = m / static_cast<double>(reference.size());
  r.f_mean = 10.0 * r.precision * r.recall / (r.recall + 9.0 * r.precision);
  r.penalty = 0.5 * std::pow(static_cast<double>(r.chunks) / m, 3.0);
  r.score = r.f_mean * (1.0 - r.penalty);
  return r;
}

double meteor_lite(const Tokens& candidate, const Tokens& reference) {
  return meteor_lite_detail(candidate, reference).score;
}

}  // namespace copygen::quality
