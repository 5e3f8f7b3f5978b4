#pragma once

// Labeled attachment tuples: one Sample per (verb, noun1, prep, noun2) context
// plus the gold attachment site, loaded from whitespace-separated text files.

#include <cctype>
#include <cstdint>
#include <istream>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppattach/error.hpp"

namespace ppattach {

// The two possible attachment sites of the prepositional phrase.
enum class Site : std::uint8_t { N1 = 0, V = 1 };

constexpr Site opposite(Site s) noexcept { return s == Site::N1 ? Site::V : Site::N1; }
constexpr std::size_t site_index(Site s) noexcept { return static_cast<std::size_t>(s); }

// Rule-file vocabulary ("N1"/"V").
constexpr const char* site_name(Site s) noexcept { return s == Site::N1 ? "N1" : "V"; }
// Tuple-file label column ("N"/"V").
constexpr const char* site_token(Site s) noexcept { return s == Site::N1 ? "N" : "V"; }

struct Sample {
  std::string verb;
  std::string noun1;
  std::string prep;
  std::string noun2;
  Site gold = Site::N1;

  bool operator==(const Sample&) const = default;
};

// File order is preserved; duplicate tuples are kept (counts matter downstream).
using Corpus = std::vector<Sample>;

struct CorpusOptions {
  bool lowercase = true;    // fold tokens (not the label) to lowercase
  bool leading_id = false;  // discard a leading id column
};

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline bool is_field_sep(char c) noexcept { return c == ' ' || c == '\t'; }

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_field_sep(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_field_sep(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

inline std::string lowercased(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_blank_or_comment(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && is_field_sep(line[i])) ++i;
  return i == line.size() || line[i] == '#';
}

}  // namespace detail

// One record: `v n1 p n2 label` (or `id v n1 p n2 label` with leading_id),
// label in {N, V}.
inline Sample parse_sample(std::string_view line, const CorpusOptions& opts = {},
                           std::size_t line_no = 0) {
  line = detail::strip_cr(line);
  const auto fields = detail::split_fields(line);
  const std::size_t want = opts.leading_id ? 6 : 5;
  if (fields.size() != want) {
    throw ParseError(line_no, "expected " + std::to_string(want) + " fields, got " +
                                  std::to_string(fields.size()) + ": '" + std::string(line) + "'");
  }
  const std::size_t base = opts.leading_id ? 1 : 0;
  Sample s;
  s.verb = opts.lowercase ? detail::lowercased(fields[base]) : std::string(fields[base]);
  s.noun1 = opts.lowercase ? detail::lowercased(fields[base + 1]) : std::string(fields[base + 1]);
  s.prep = opts.lowercase ? detail::lowercased(fields[base + 2]) : std::string(fields[base + 2]);
  s.noun2 = opts.lowercase ? detail::lowercased(fields[base + 3]) : std::string(fields[base + 3]);
  const std::string_view label = fields[base + 4];
  if (label == "N") {
    s.gold = Site::N1;
  } else if (label == "V") {
    s.gold = Site::V;
  } else {
    throw ParseError(line_no, "unknown label token '" + std::string(label) + "' in: '" +
                                  std::string(line) + "'");
  }
  return s;
}

inline std::string format_sample(const Sample& s) {
  std::string out;
  out.reserve(s.verb.size() + s.noun1.size() + s.prep.size() + s.noun2.size() + 6);
  out += s.verb;
  out += ' ';
  out += s.noun1;
  out += ' ';
  out += s.prep;
  out += ' ';
  out += s.noun2;
  out += ' ';
  out += site_token(s.gold);
  return out;
}

// Reads newline-delimited records; blank lines and `#` comments are skipped.
// Stops at the first malformed record.
inline Corpus load_corpus(std::istream& in, const CorpusOptions& opts = {}) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = detail::strip_cr(line);
    if (detail::is_blank_or_comment(sv)) continue;
    corpus.push_back(parse_sample(sv, opts, line_no));
  }
  return corpus;
}

// Seeded Fisher-Yates permutation; the first n_test permuted samples form the
// test set, the remainder (still in permuted order) the training set. The
// same (corpus, n_test, seed) triple always produces identical output.
inline std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, std::size_t n_test,
                                              std::uint64_t seed) {
  if (n_test > corpus.size()) {
    throw std::invalid_argument("n_test (" + std::to_string(n_test) +
                                ") exceeds corpus size (" + std::to_string(corpus.size()) + ")");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  Corpus train, test;
  test.reserve(n_test);
  train.reserve(corpus.size() - n_test);
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_test ? test : train).push_back(corpus[order[k]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace ppattach
