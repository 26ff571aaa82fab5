#pragma once

#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xparity/formula.hpp"

namespace xparity {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads "p cnf <n> <m>" followed by 0-terminated clauses. Every variable
/// 1..n is registered, including ones no clause mentions. Duplicate literals
/// inside a clause are preserved for the reducer.
inline Formula parse_dimacs(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  long long declared_vars = 0;
  long long declared_clauses = 0;
  std::vector<Clause> clauses;
  std::vector<Literal> current;
  std::size_t current_start = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos) continue;
    if (line[p] == 'c') continue;
    if (line[p] == '%') break;  // SATLIB trailer
    if (line[p] == 'p') {
      if (have_header) throw ParseError(line_no, "duplicate header");
      std::istringstream hs(line.substr(p));
      std::string tag, fmt, extra;
      if (!(hs >> tag >> fmt >> declared_vars >> declared_clauses) || tag != "p" || fmt != "cnf" ||
          declared_vars < 0 || declared_clauses < 0 || (hs >> extra)) {
        throw ParseError(line_no, "malformed header, expected 'p cnf <n> <m>'");
      }
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause before 'p cnf' header");
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      long long value = 0;
      try {
        std::size_t used = 0;
        value = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(line_no, "not an integer: '" + tok + "'");
      }
      if (value == 0) {
        clauses.emplace_back(std::move(current));
        current.clear();
        continue;
      }
      if (current.empty()) current_start = line_no;
      const long long mag = value < 0 ? -value : value;
      if (mag > declared_vars) {
        throw ParseError(line_no, "literal " + tok + " exceeds declared variable count " +
                                      std::to_string(declared_vars));
      }
      current.push_back(Literal::from_dimacs(static_cast<int>(value)));
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'p cnf' header");
  if (!current.empty()) throw ParseError(current_start, "clause is missing its 0 terminator");
  if (static_cast<long long>(clauses.size()) != declared_clauses) {
    throw ParseError(line_no, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                  std::to_string(clauses.size()));
  }
  return Formula(Formula::iota_vars(static_cast<Var>(declared_vars)), std::move(clauses));
}

inline Formula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

/// Formulas whose variable set is not exactly {1..n} are renumbered densely in
/// ascending id order, so occurrence-free variables survive the round trip.
inline std::string write_dimacs(const Formula& f) {
  const auto& vars = f.variables();
  bool dense = true;
  for (std::size_t i = 0; i < vars.size(); ++i) dense = dense && vars[i] == i + 1;

  std::vector<Var> remap;
  if (!dense) {
    remap.assign(f.max_variable() + 1, 0);
    for (std::size_t i = 0; i < vars.size(); ++i) remap[vars[i]] = static_cast<Var>(i + 1);
  }
  std::ostringstream out;
  out << "p cnf " << vars.size() << ' ' << f.num_clauses() << '\n';
  for (const auto& c : f.clauses()) {
    for (Literal l : c) {
      const Var v = dense ? l.var() : remap[l.var()];
      out << (l.is_negative() ? "-" : "") << v << ' ';
    }
    out << "0\n";
  }
  return out.str();
}

}  // namespace xparity
