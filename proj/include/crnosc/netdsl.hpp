// Plain-text reaction network DSL.
//
//   file    := { line } ;
//   line    := [ reaction ] [ comment ] NEWLINE ;
//   reaction:= complex arrow complex ";" label { "," label } ;
//   arrow   := "->" | "<->" ;
//   complex := "0" | term { "+" term } ;
//   term    := [ INTEGER ] IDENT ;
//
// "#" starts a comment. "<->" expands to a forward/backward reaction pair
// with the forward label first. Species are numbered in first-appearance
// order and duplicate complexes are unified.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crnosc/network.hpp"

namespace crn {

struct NetworkSource {
  std::string text;
  std::string name = "<input>";
};

enum class Severity { Error, Warning };

struct ParseDiagnostic {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  std::string message;
  Severity severity = Severity::Error;

  // "file:line:col: severity: message"
  std::string format(const std::string& file) const;
};

struct ParseResult {
  std::optional<ReactionNetwork> network;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return network.has_value(); }
  bool has_errors() const;
};

ParseResult parse_network(const NetworkSource& src);

// Canonical form: a species header comment, then one reaction per line in
// stored order, complex terms in species-declaration order, coefficient 1
// omitted. parse(render(net)) == net for any parse-produced network.
std::string render_network(const ReactionNetwork& net);

}  // namespace crn
