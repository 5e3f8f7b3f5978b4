#pragma once

// Transformation rules: "change the attachment site from X to Y if the
// tuple's slots satisfy these conditions". Rules are immutable; application
// over a corpus is an ordered rewrite starting from the initial site.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "ppattach/classes.hpp"
#include "ppattach/corpus.hpp"
#include "ppattach/error.hpp"

namespace ppattach {

enum class Slot : std::uint8_t { Verb = 0, Noun1 = 1, Prep = 2, Noun2 = 3 };

constexpr std::size_t slot_index(Slot s) noexcept { return static_cast<std::size_t>(s); }

constexpr const char* slot_name(Slot s) noexcept {
  switch (s) {
    case Slot::Verb: return "v";
    case Slot::Noun1: return "n1";
    case Slot::Prep: return "p";
    case Slot::Noun2: return "n2";
  }
  return "?";
}

constexpr bool is_noun_slot(Slot s) noexcept { return s == Slot::Noun1 || s == Slot::Noun2; }

inline const std::string& slot_value(const Sample& s, Slot slot) {
  switch (slot) {
    case Slot::Verb: return s.verb;
    case Slot::Noun1: return s.noun1;
    case Slot::Prep: return s.prep;
    case Slot::Noun2: return s.noun2;
  }
  return s.verb;  // unreachable
}

enum class CondKind : std::uint8_t { Word, Class };

// `slot=word` tests token equality; `slot~class=name` tests class membership
// of the slot's token (noun slots only).
struct Condition {
  Slot slot;
  CondKind kind;
  std::string value;

  bool operator==(const Condition&) const = default;
};

// A validated transformation. Construction enforces the structural shape:
// 1-3 conditions, at most one per slot (so never all four slots), class
// conditions only on noun slots, and never class conditions on both nouns.
class Rule {
 public:
  Rule(Site from, Site to, std::vector<Condition> conditions)
      : from_(from), to_(to), conds_(std::move(conditions)) {
    if (from_ == to_) throw std::invalid_argument("rule source and target sites are equal");
    if (conds_.empty()) throw std::invalid_argument("rule needs at least one condition");
    if (conds_.size() > 3)
      throw std::invalid_argument("rule may not condition on all four slots");
    std::sort(conds_.begin(), conds_.end(), [](const Condition& a, const Condition& b) {
      return slot_index(a.slot) < slot_index(b.slot);
    });
    bool class_on_n1 = false, class_on_n2 = false;
    for (std::size_t i = 0; i < conds_.size(); ++i) {
      const Condition& c = conds_[i];
      if (i > 0 && conds_[i - 1].slot == c.slot)
        throw std::invalid_argument(std::string("duplicate condition on slot ") +
                                    slot_name(c.slot));
      if (c.kind == CondKind::Class && !is_noun_slot(c.slot))
        throw std::invalid_argument(std::string("class condition on non-noun slot ") +
                                    slot_name(c.slot));
      if (c.value.empty() || c.value.find_first_of(" \t\r\n\f\v") != std::string::npos)
        throw std::invalid_argument("bad condition value: '" + c.value + "'");
      if (c.kind == CondKind::Class && c.slot == Slot::Noun1) class_on_n1 = true;
      if (c.kind == CondKind::Class && c.slot == Slot::Noun2) class_on_n2 = true;
    }
    if (class_on_n1 && class_on_n2)
      throw std::invalid_argument("class conditions on both noun slots are not permitted");
  }

  Site from() const noexcept { return from_; }
  Site to() const noexcept { return to_; }
  const std::vector<Condition>& conditions() const noexcept { return conds_; }

  bool mentions(Slot s) const {
    for (const Condition& c : conds_)
      if (c.slot == s) return true;
    return false;
  }

  bool operator==(const Rule&) const = default;

 private:
  Site from_;
  Site to_;
  std::vector<Condition> conds_;  // sorted by slot: v, n1, p, n2
};

// The learned program plus the metadata needed to replay it.
struct RuleList {
  Site initial = Site::N1;
  bool use_classes = false;
  bool no_n2 = false;
  std::vector<Rule> rules;
};

// Current attachment labels, index-aligned with a Corpus.
using LabelState = std::vector<Site>;

inline bool condition_holds(const Condition& c, const Sample& s, const ClassLexicon& lex) {
  const std::string& tok = slot_value(s, c.slot);
  if (c.kind == CondKind::Word) return tok == c.value;
  return lex.classes_of(tok).count(c.value) > 0;
}

// True iff every condition holds. Ignores the sample's current label.
inline bool matches(const Rule& r, const Sample& s, const ClassLexicon& lex) {
  for (const Condition& c : r.conditions())
    if (!condition_holds(c, s, lex)) return false;
  return true;
}

// Rewrites labels in place: state[i] becomes r.to() where the label equals
// r.from() and the sample matches. Returns the number of flipped labels.
inline std::size_t apply_rule(const Rule& r, const Corpus& corpus, LabelState& state,
                              const ClassLexicon& lex) {
  if (state.size() != corpus.size())
    throw std::invalid_argument("label state size (" + std::to_string(state.size()) +
                                ") != corpus size (" + std::to_string(corpus.size()) + ")");
  std::size_t changed = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (state[i] == r.from() && matches(r, corpus[i], lex)) {
      state[i] = r.to();
      ++changed;
    }
  }
  return changed;
}

// Initializes every label to the list's initial site, then applies each rule
// in learned order.
inline LabelState apply_rules(const RuleList& rl, const Corpus& corpus, const ClassLexicon& lex) {
  LabelState state(corpus.size(), rl.initial);
  for (const Rule& r : rl.rules) apply_rule(r, corpus, state, lex);
  return state;
}

namespace detail {

inline void append_condition(std::string& out, const Condition& c) {
  out += slot_name(c.slot);
  out += c.kind == CondKind::Class ? "~class=" : "=";
  out += c.value;
}

inline std::string format_conditions(const std::vector<Condition>& conds) {
  std::string out;
  for (std::size_t i = 0; i < conds.size(); ++i) {
    if (i > 0) out += " ; ";
    append_condition(out, conds[i]);
  }
  return out;
}

inline const char* rule_prefix(Site from) noexcept {
  return from == Site::N1 ? "N1 -> V | " : "V -> N1 | ";
}

inline Site parse_site_name(std::string_view text, std::size_t line_no) {
  if (text == "N1") return Site::N1;
  if (text == "V") return Site::V;
  throw ParseError(line_no, "unknown attachment site '" + std::string(text) + "'");
}

inline Slot parse_slot_name(std::string_view text, std::size_t line_no) {
  if (text == "v") return Slot::Verb;
  if (text == "n1") return Slot::Noun1;
  if (text == "p") return Slot::Prep;
  if (text == "n2") return Slot::Noun2;
  throw ParseError(line_no, "unknown slot name '" + std::string(text) + "'");
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_field_sep(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_field_sep(s.back())) s.remove_suffix(1);
  return s;
}

inline Condition parse_condition(std::string_view text, std::size_t line_no) {
  text = trim(text);
  if (text.empty()) throw ParseError(line_no, "empty condition");
  const std::size_t eq = text.find('=');
  const std::size_t marker = text.find("~class=");
  Condition c;
  if (marker != std::string_view::npos && marker < eq) {
    c.slot = parse_slot_name(text.substr(0, marker), line_no);
    c.kind = CondKind::Class;
    c.value = std::string(text.substr(marker + 7));
  } else if (eq != std::string_view::npos) {
    c.slot = parse_slot_name(text.substr(0, eq), line_no);
    c.kind = CondKind::Word;
    c.value = std::string(text.substr(eq + 1));
  } else {
    throw ParseError(line_no, "bad condition '" + std::string(text) + "'");
  }
  if (c.value.empty())
    throw ParseError(line_no, "empty value in condition '" + std::string(text) + "'");
  return c;
}

}  // namespace detail

// Canonical text form: `FROM -> TO | cond { ; cond}` with conditions in slot
// order v, n1, p, n2. Golden files compare this byte-for-byte.
inline std::string format_rule(const Rule& r) {
  return detail::rule_prefix(r.from()) + detail::format_conditions(r.conditions());
}

inline Rule parse_rule(std::string_view text, std::size_t line_no = 0) {
  text = detail::strip_cr(text);
  const std::size_t bar = text.find(" | ");
  if (bar == std::string_view::npos)
    throw ParseError(line_no, "missing ' | ' in rule: '" + std::string(text) + "'");
  const std::string_view head = detail::trim(text.substr(0, bar));
  const std::size_t arrow = head.find(" -> ");
  if (arrow == std::string_view::npos)
    throw ParseError(line_no, "missing ' -> ' in rule: '" + std::string(text) + "'");
  const Site from = detail::parse_site_name(detail::trim(head.substr(0, arrow)), line_no);
  const Site to = detail::parse_site_name(detail::trim(head.substr(arrow + 4)), line_no);

  std::vector<Condition> conds;
  std::string_view rest = text.substr(bar + 3);
  while (true) {
    const std::size_t sep = rest.find(" ; ");
    if (sep == std::string_view::npos) {
      conds.push_back(detail::parse_condition(rest, line_no));
      break;
    }
    conds.push_back(detail::parse_condition(rest.substr(0, sep), line_no));
    rest = rest.substr(sep + 3);
  }
  try {
    return Rule(from, to, std::move(conds));
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, std::string(e.what()) + " in rule: '" + std::string(text) + "'");
  }
}

inline std::string rule_file_header(const RuleList& rl) {
  std::string out = "#! initial=";
  out += site_name(rl.initial);
  out += " classes=";
  out += rl.use_classes ? "on" : "off";
  out += " no_n2=";
  out += rl.no_n2 ? "on" : "off";
  return out;
}

inline std::string format_rule_file(const RuleList& rl) {
  std::string out = rule_file_header(rl);
  out += '\n';
  for (const Rule& r : rl.rules) {
    out += format_rule(r);
    out += '\n';
  }
  return out;
}

// Parses a rule file: one `#!` header (before any rule), then one rule per
// line. Blank lines and plain `#` comments are tolerated. Rules must be
// consistent with the header's classes/no_n2 declarations.
inline RuleList parse_rule_file(std::istream& in) {
  RuleList rl;
  bool saw_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = detail::strip_cr(line);
    if (sv.rfind("#!", 0) == 0) {
      if (saw_header) throw ParseError(line_no, "duplicate '#!' header");
      if (!rl.rules.empty()) throw ParseError(line_no, "'#!' header after rules");
      bool have_initial = false, have_classes = false, have_no_n2 = false;
      for (const std::string_view field : detail::split_fields(sv.substr(2))) {
        const std::size_t eq = field.find('=');
        if (eq == std::string_view::npos)
          throw ParseError(line_no, "bad header field '" + std::string(field) + "'");
        const std::string_view key = field.substr(0, eq);
        const std::string_view value = field.substr(eq + 1);
        if (key == "initial") {
          rl.initial = detail::parse_site_name(value, line_no);
          have_initial = true;
        } else if (key == "classes" || key == "no_n2") {
          bool on = false;
          if (value == "on") {
            on = true;
          } else if (value != "off") {
            throw ParseError(line_no, "bad header value '" + std::string(field) + "'");
          }
          (key == "classes" ? rl.use_classes : rl.no_n2) = on;
          (key == "classes" ? have_classes : have_no_n2) = true;
        } else {
          throw ParseError(line_no, "unknown header key '" + std::string(key) + "'");
        }
      }
      if (!have_initial || !have_classes || !have_no_n2)
        throw ParseError(line_no, "header must set initial, classes and no_n2");
      saw_header = true;
      continue;
    }
    if (detail::is_blank_or_comment(sv)) continue;
    if (!saw_header) throw ParseError(line_no, "rule before '#!' header");
    Rule r = parse_rule(sv, line_no);
    if (rl.no_n2 && r.mentions(Slot::Noun2))
      throw ParseError(line_no, "rule mentions n2 but header says no_n2=on");
    if (!rl.use_classes) {
      for (const Condition& c : r.conditions())
        if (c.kind == CondKind::Class)
          throw ParseError(line_no, "class condition but header says classes=off");
    }
    rl.rules.push_back(std::move(r));
  }
  if (!saw_header) throw ParseError(0, "missing '#!' header line");
  return rl;
}

}  // namespace ppattach
