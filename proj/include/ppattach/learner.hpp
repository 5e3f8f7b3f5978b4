#pragma once

// Greedy error-driven learning: at every iteration score the candidate
// transformations proposed by the currently mislabeled samples, apply the
// best-scoring one, and repeat until no rule still earns min_score.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppattach/classes.hpp"
#include "ppattach/corpus.hpp"
#include "ppattach/rules.hpp"

namespace ppattach {

struct LearnerConfig {
  Site initial = Site::N1;   // start-state annotation
  bool use_classes = false;  // allow class conditions on noun slots
  bool no_n2 = false;        // forbid any condition on the n2 slot
  long long min_score = 1;   // a learned rule must net at least this many fixes
  std::size_t max_rules = 0;  // 0 = unlimited
  bool lowercase = true;      // recorded for provenance; applied at load time
};

// fixed = matching samples whose gold label equals the rule's target,
// broken = matching samples whose gold label equals the rule's source.
struct RuleScore {
  long long fixed = 0;
  long long broken = 0;
  long long net() const noexcept { return fixed - broken; }

  bool operator==(const RuleScore&) const = default;
};

struct ScoredRule {
  Rule rule;
  RuleScore score;
};

// Counts what applying r to the current state would do to training error.
inline RuleScore score_rule(const Rule& r, const Corpus& corpus, const LabelState& state,
                            const ClassLexicon& lex) {
  if (state.size() != corpus.size())
    throw std::invalid_argument("label state size (" + std::to_string(state.size()) +
                                ") != corpus size (" + std::to_string(corpus.size()) + ")");
  RuleScore sc;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (state[i] != r.from() || !matches(r, corpus[i], lex)) continue;
    if (corpus[i].gold == r.to())
      ++sc.fixed;
    else
      ++sc.broken;
  }
  return sc;
}

namespace detail {

// Per-slot condition options a sample can instantiate: its own token as a
// word condition, plus (noun slots, classes enabled) one class condition per
// class of the token.
inline std::array<std::vector<Condition>, 4> condition_options(const Sample& s,
                                                               const LearnerConfig& cfg,
                                                               const ClassLexicon& lex) {
  std::array<std::vector<Condition>, 4> opts;
  opts[0].push_back({Slot::Verb, CondKind::Word, s.verb});
  opts[1].push_back({Slot::Noun1, CondKind::Word, s.noun1});
  opts[2].push_back({Slot::Prep, CondKind::Word, s.prep});
  if (!cfg.no_n2) opts[3].push_back({Slot::Noun2, CondKind::Word, s.noun2});
  if (cfg.use_classes) {
    for (const std::string& cls : lex.classes_of(s.noun1))
      opts[1].push_back({Slot::Noun1, CondKind::Class, cls});
    if (!cfg.no_n2) {
      for (const std::string& cls : lex.classes_of(s.noun2))
        opts[3].push_back({Slot::Noun2, CondKind::Class, cls});
    }
  }
  return opts;
}

// Enumerates every valid condition set drawn from the per-slot options:
// slot subsets of size 1-3 (mask 15 = all four is excluded by the loop
// bound), one option per chosen slot, never class conditions on both nouns.
template <class Fn>
inline void for_each_condition_set(const std::array<std::vector<Condition>, 4>& opts, Fn&& fn) {
  std::array<const Condition*, 3> picked{};
  for (unsigned mask = 1; mask < 15; ++mask) {
    std::array<int, 3> slots{};
    int k = 0;
    bool usable = true;
    for (int sl = 0; sl < 4; ++sl) {
      if (!(mask >> sl & 1u)) continue;
      if (opts[sl].empty()) {
        usable = false;
        break;
      }
      slots[k++] = sl;
    }
    if (!usable) continue;
    std::array<std::size_t, 3> ix{};
    while (true) {
      bool class_n1 = false, class_n2 = false;
      for (int j = 0; j < k; ++j) {
        const Condition& c = opts[slots[j]][ix[j]];
        picked[j] = &c;
        if (c.kind == CondKind::Class) (c.slot == Slot::Noun1 ? class_n1 : class_n2) = true;
      }
      if (!(class_n1 && class_n2)) fn(picked.data(), k);
      int j = k - 1;
      for (; j >= 0; --j) {
        if (++ix[j] < opts[slots[j]].size()) break;
        ix[j] = 0;
      }
      if (j < 0) break;
    }
  }
}

inline std::string condition_set_text(const Condition* const* conds, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += " ; ";
    append_condition(out, *conds[i]);
  }
  return out;
}

}  // namespace detail

// All structurally valid rules from->to whose every condition is satisfied
// by the sample, under the config's template restrictions.
inline std::vector<Rule> generate_candidates(const Sample& s, Site from, Site to,
                                             const LearnerConfig& cfg, const ClassLexicon& lex) {
  if (from == to) throw std::invalid_argument("candidate source and target sites are equal");
  std::vector<Rule> out;
  const auto opts = detail::condition_options(s, cfg, lex);
  detail::for_each_condition_set(opts, [&](const Condition* const* conds, int n) {
    std::vector<Condition> cs;
    cs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cs.push_back(*conds[i]);
    out.emplace_back(from, to, std::move(cs));
  });
  return out;
}

// Best candidate over the union of generate_candidates() for all currently
// mislabeled samples, or nothing when no candidate nets min_score. Scores
// are accumulated in two counting passes: mislabeled samples contribute fix
// counts for the condition sets they instantiate, correctly labeled samples
// contribute break counts to the same keys with the opposing target. Ties
// break on higher net, higher fixed, fewer conditions, then the
// lexicographically smallest canonical rule text.
inline std::optional<ScoredRule> best_rule(const Corpus& corpus, const LabelState& state,
                                           const LearnerConfig& cfg, const ClassLexicon& lex) {
  if (state.size() != corpus.size())
    throw std::invalid_argument("label state size (" + std::to_string(state.size()) +
                                ") != corpus size (" + std::to_string(corpus.size()) + ")");
  struct Tally {
    long long fixed = 0;
    long long broken = 0;
  };
  std::array<std::unordered_map<std::string, Tally>, 2> tally;  // indexed by source site

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (state[i] == corpus[i].gold) continue;
    auto& bucket = tally[site_index(state[i])];
    const auto opts = detail::condition_options(corpus[i], cfg, lex);
    detail::for_each_condition_set(opts, [&](const Condition* const* conds, int n) {
      ++bucket[detail::condition_set_text(conds, n)].fixed;
    });
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (state[i] != corpus[i].gold) continue;
    auto& bucket = tally[site_index(state[i])];
    if (bucket.empty()) continue;
    const auto opts = detail::condition_options(corpus[i], cfg, lex);
    detail::for_each_condition_set(opts, [&](const Condition* const* conds, int n) {
      const auto it = bucket.find(detail::condition_set_text(conds, n));
      if (it != bucket.end()) ++it->second.broken;
    });
  }

  bool found = false;
  long long best_net = 0, best_fixed = 0;
  std::size_t best_conds = 0;
  std::string best_text;
  RuleScore best_score;
  for (const Site from : {Site::N1, Site::V}) {
    for (const auto& [conds_text, t] : tally[site_index(from)]) {
      const long long net = t.fixed - t.broken;
      if (net < cfg.min_score) continue;
      std::size_t n_conds = 1;
      for (std::size_t pos = 0; (pos = conds_text.find(" ; ", pos)) != std::string::npos;
           pos += 3)
        ++n_conds;
      std::string text = detail::rule_prefix(from) + conds_text;
      const bool better =
          !found || net > best_net ||
          (net == best_net &&
           (t.fixed > best_fixed ||
            (t.fixed == best_fixed &&
             (n_conds < best_conds || (n_conds == best_conds && text < best_text)))));
      if (better) {
        found = true;
        best_net = net;
        best_fixed = t.fixed;
        best_conds = n_conds;
        best_text = std::move(text);
        best_score = {t.fixed, t.broken};
      }
    }
  }
  if (!found) return std::nullopt;
  return ScoredRule{parse_rule(best_text), best_score};
}

// Exhaustive oracle for best_rule: enumerates every structurally valid rule
// over the cross-product of slot values (and classes) observed anywhere in
// the corpus, scoring each one directly. Intended for small corpora.
inline std::optional<RuleScore> brute_force_best(const Corpus& corpus, const LabelState& state,
                                                 const LearnerConfig& cfg,
                                                 const ClassLexicon& lex) {
  std::array<std::set<std::string>, 4> words;
  std::array<std::set<std::string>, 4> classes;
  for (const Sample& s : corpus) {
    words[0].insert(s.verb);
    words[1].insert(s.noun1);
    words[2].insert(s.prep);
    if (!cfg.no_n2) words[3].insert(s.noun2);
    if (cfg.use_classes) {
      for (const std::string& cls : lex.classes_of(s.noun1)) classes[1].insert(cls);
      if (!cfg.no_n2)
        for (const std::string& cls : lex.classes_of(s.noun2)) classes[3].insert(cls);
    }
  }
  std::array<std::vector<Condition>, 4> opts;
  for (int sl = 0; sl < 4; ++sl) {
    const Slot slot = static_cast<Slot>(sl);
    for (const std::string& w : words[sl]) opts[sl].push_back({slot, CondKind::Word, w});
    for (const std::string& cls : classes[sl]) opts[sl].push_back({slot, CondKind::Class, cls});
  }

  bool found = false;
  RuleScore best;
  for (const Site from : {Site::N1, Site::V}) {
    const Site to = opposite(from);
    detail::for_each_condition_set(opts, [&](const Condition* const* conds, int n) {
      std::vector<Condition> cs;
      cs.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) cs.push_back(*conds[i]);
      const Rule r(from, to, std::move(cs));
      const RuleScore sc = score_rule(r, corpus, state, lex);
      if (sc.net() < cfg.min_score) return;
      if (!found || sc.net() > best.net() ||
          (sc.net() == best.net() && sc.fixed > best.fixed)) {
        found = true;
        best = sc;
      }
    });
  }
  if (!found) return std::nullopt;
  return best;
}

// Invoked after each learned rule with the 1-based iteration number, the
// rule and its score, and the training errors still remaining.
using RuleCallback = std::function<void(std::size_t, const ScoredRule&, std::size_t)>;

// The greedy loop. Starts from cfg.initial everywhere, repeatedly applies
// the best rule, and stops when none reaches min_score (or at max_rules).
// Terminates because every learned rule strictly reduces training error.
inline RuleList learn(const Corpus& corpus, const LearnerConfig& cfg, const ClassLexicon& lex,
                      const RuleCallback& on_rule = {}, LabelState* final_state = nullptr) {
  if (cfg.min_score < 1) throw std::invalid_argument("min_score must be >= 1");
  LearnerConfig effective = cfg;
  effective.use_classes = cfg.use_classes && !lex.empty();

  LabelState state(corpus.size(), cfg.initial);
  RuleList rl{cfg.initial, effective.use_classes, cfg.no_n2, {}};
  std::size_t iteration = 0;
  while (cfg.max_rules == 0 || rl.rules.size() < cfg.max_rules) {
    auto best = best_rule(corpus, state, effective, lex);
    if (!best) break;
    apply_rule(best->rule, corpus, state, lex);
    rl.rules.push_back(best->rule);
    ++iteration;
    if (on_rule) {
      std::size_t errors = 0;
      for (std::size_t i = 0; i < corpus.size(); ++i) errors += state[i] != corpus[i].gold;
      on_rule(iteration, *best, errors);
    }
  }
  if (final_state) *final_state = std::move(state);
  return rl;
}

// Progress record for one learned rule, tab-separated:
// iter, rule, fixed, broken, net, train errors remaining.
inline std::string progress_line(std::size_t iteration, const ScoredRule& sr,
                                 std::size_t errors_remaining) {
  std::string out = std::to_string(iteration);
  out += '\t';
  out += format_rule(sr.rule);
  out += '\t';
  out += std::to_string(sr.score.fixed);
  out += '\t';
  out += std::to_string(sr.score.broken);
  out += '\t';
  out += std::to_string(sr.score.net());
  out += '\t';
  out += std::to_string(errors_remaining);
  return out;
}

struct CurvePoint {
  std::size_t train_size = 0;
  double test_accuracy = 0.0;
  std::size_t rules_learned = 0;
};

// Accuracy on a fixed test set as a function of training-prefix size. The
// caller is responsible for having permuted the training corpus (e.g. via
// split_corpus); prefixes are taken in the order given.
inline std::vector<CurvePoint> learning_curve(const Corpus& train, const Corpus& test,
                                              std::vector<std::size_t> sizes,
                                              const LearnerConfig& cfg, const ClassLexicon& lex) {
  if (test.empty()) throw std::invalid_argument("test corpus is empty");
  std::sort(sizes.begin(), sizes.end());
  for (const std::size_t k : sizes) {
    if (k > train.size())
      throw std::invalid_argument("curve size " + std::to_string(k) +
                                  " exceeds training corpus size (" +
                                  std::to_string(train.size()) + ")");
  }
  std::vector<CurvePoint> points;
  points.reserve(sizes.size());
  for (const std::size_t k : sizes) {
    const Corpus head(train.begin(), train.begin() + static_cast<std::ptrdiff_t>(k));
    const RuleList rl = learn(head, cfg, lex);
    const LabelState pred = apply_rules(rl, test, lex);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) correct += pred[i] == test[i].gold;
    points.push_back({k, static_cast<double>(correct) / static_cast<double>(test.size()),
                      rl.rules.size()});
  }
  return points;
}

inline std::string format_curve_csv(const std::vector<CurvePoint>& points) {
  std::string out = "train_size,rules_learned,test_accuracy\n";
  char buf[32];
  for (const CurvePoint& p : points) {
    std::snprintf(buf, sizeof(buf), "%.6f", p.test_accuracy);
    out += std::to_string(p.train_size);
    out += ',';
    out += std::to_string(p.rules_learned);
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace ppattach
