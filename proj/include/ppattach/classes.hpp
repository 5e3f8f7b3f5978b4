#pragma once

// Flat semantic-class lexicon mapping a noun token to the set of class names
// it belongs to. The file is precomputed offline; lookups are pure.

#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "ppattach/corpus.hpp"
#include "ppattach/error.hpp"

namespace ppattach {

class ClassLexicon {
 public:
  void add(std::string token, std::string class_name) {
    if (token.empty() || has_space(token))
      throw std::invalid_argument("bad lexicon token: '" + token + "'");
    if (class_name.empty() || has_space(class_name))
      throw std::invalid_argument("bad class name: '" + class_name + "'");
    entries_[std::move(token)].insert(std::move(class_name));
  }

  // Stored class set, or the empty set for unknown tokens. Never inserts.
  const std::set<std::string>& classes_of(std::string_view token) const {
    static const std::set<std::string> kEmpty;
    const auto it = entries_.find(token);
    return it == entries_.end() ? kEmpty : it->second;
  }

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  static bool has_space(const std::string& s) {
    return s.find_first_of(" \t\r\n\f\v") != std::string::npos;
  }

  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::unordered_map<std::string, std::set<std::string>, Hash, std::equal_to<>> entries_;
};

// One token per line: `token<TAB>class1 class2 ...`. Duplicate lines for a
// token union their class sets. `#` comments and blank lines are ignored.
inline ClassLexicon load_lexicon(std::istream& in) {
  ClassLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = detail::strip_cr(line);
    if (detail::is_blank_or_comment(sv)) continue;
    const std::size_t tab = sv.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError(line_no, "expected TAB after token: '" + std::string(sv) + "'");
    const std::string_view token = sv.substr(0, tab);
    if (token.empty())
      throw ParseError(line_no, "no token before first tab: '" + std::string(sv) + "'");
    if (token.find(' ') != std::string_view::npos)
      throw ParseError(line_no, "token contains whitespace: '" + std::string(token) + "'");
    for (const std::string_view cls : detail::split_fields(sv.substr(tab + 1))) {
      lex.add(std::string(token), std::string(cls));
    }
  }
  return lex;
}

}  // namespace ppattach
