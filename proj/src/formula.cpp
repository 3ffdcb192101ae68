#include "aroc/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <vector>

#include "aroc/common.hpp"

namespace aroc::formula {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!consume(c)) throw DataError(std::string("formula: expected '") + c + "' " + what);
  }
  std::string identifier() {
    skip_ws();
    const std::size_t start = pos;
    auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto body = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    };
    if (pos < text.size() && head(text[pos])) {
      ++pos;
      while (pos < text.size() && body(text[pos])) ++pos;
    }
    if (pos == start) throw DataError("formula: expected a name at position " + std::to_string(start));
    return text.substr(start, pos - start);
  }
  int integer() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw DataError("formula: expected an integer at position " + std::to_string(start));
    return std::stoi(text.substr(start, pos - start));
  }
};

// One raw term as written; bare names may later be absorbed into a by= interaction.
struct RawTerm {
  enum Kind { Bare, Factor, Smooth } kind = Bare;
  std::string name;
  std::string by;    // Smooth only; empty when absent
  int knots = -1;    // Smooth only; -1 -> default
};

RawTerm parse_term(Cursor& cur, int default_knots) {
  RawTerm term;
  const std::string word = cur.identifier();
  if (word == "s" && cur.peek() == '(') {
    term.kind = RawTerm::Smooth;
    term.knots = default_knots;
    cur.expect('(', "after 's'");
    term.name = cur.identifier();
    while (cur.consume(',')) {
      const std::string key = cur.identifier();
      cur.expect('=', ("after '" + key + "'").c_str());
      if (key == "K") {
        term.knots = cur.integer();
      } else if (key == "by") {
        term.by = cur.identifier();
      } else {
        throw DataError("formula: unknown smooth option '" + key + "'");
      }
    }
    cur.expect(')', "to close 's('");
  } else if (word == "factor" && cur.peek() == '(') {
    term.kind = RawTerm::Factor;
    cur.expect('(', "after 'factor'");
    term.name = cur.identifier();
    cur.expect(')', "to close 'factor('");
  } else {
    term.kind = RawTerm::Bare;
    term.name = word;
  }
  return term;
}

}  // namespace

ParsedFormula parse_formula(const std::string& text, int default_knots) {
  Cursor cur{text};
  ParsedFormula out;
  out.response = cur.identifier();
  cur.expect('~', "between response and terms");

  std::vector<RawTerm> raw;
  raw.push_back(parse_term(cur, default_knots));
  while (cur.consume('+')) raw.push_back(parse_term(cur, default_knots));
  if (!cur.done())
    throw DataError("formula: unexpected trailing text at position " + std::to_string(cur.pos));

  // Factor-by-curve interactions already carry the factor's main effect, so a
  // bare/factor term naming the same variable is folded into the interaction.
  std::set<std::string> by_factors;
  for (const RawTerm& t : raw)
    if (t.kind == RawTerm::Smooth && !t.by.empty()) by_factors.insert(t.by);

  std::set<std::string> seen;
  for (const RawTerm& t : raw) {
    if (t.kind != RawTerm::Smooth && by_factors.count(t.name)) continue;
    std::string key;
    switch (t.kind) {
      case RawTerm::Bare:
        key = "x:" + t.name;
        out.spec.terms.emplace_back(splines::LinearTerm{t.name});
        break;
      case RawTerm::Factor:
        key = "x:" + t.name;
        out.spec.terms.emplace_back(splines::FactorTerm{t.name});
        break;
      case RawTerm::Smooth:
        if (t.knots < 0) throw DataError("formula: negative K in s(" + t.name + ")");
        if (t.by.empty()) {
          key = "s:" + t.name;
          out.spec.terms.emplace_back(splines::SmoothTerm{t.name, t.knots});
        } else {
          key = "s:" + t.name + ":" + t.by;
          out.spec.terms.emplace_back(splines::FactorSmoothTerm{t.name, t.by, t.knots});
        }
        break;
    }
    if (!seen.insert(key).second) throw DataError("formula: duplicate term for '" + t.name + "'");
  }
  if (out.spec.terms.empty()) throw DataError("formula: no terms on the right-hand side");
  return out;
}

}  // namespace aroc::formula
