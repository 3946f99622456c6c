#include "crnosc/netdsl.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace crn {

std::string ParseDiagnostic::format(const std::string& file) const {
  std::ostringstream os;
  os << file << ':' << line << ':' << column << ": "
     << (severity == Severity::Error ? "error" : "warning") << ": " << message;
  return os.str();
}

bool ParseResult::has_errors() const {
  for (auto& d : diagnostics)
    if (d.severity == Severity::Error) return true;
  return false;
}

namespace {

struct Token {
  enum Kind { Ident, Integer, Plus, Arrow, RevArrow, Semi, Comma, End, Bad } kind;
  std::string text;
  int column;  // 1-based
};

// Tokenises one line; stops at '#'. Emits a Bad token for anything foreign.
std::vector<Token> lex_line(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto col = [&] { return static_cast<int>(i) + 1; };
  while (i < line.size()) {
    unsigned char ch = static_cast<unsigned char>(line[i]);
    if (ch == '#') break;
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      continue;
    }
    if (std::isalpha(ch)) {
      int c = col();
      std::size_t j = i;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
        ++j;
      out.push_back({Token::Ident, line.substr(i, j - i), c});
      i = j;
      continue;
    }
    if (std::isdigit(ch)) {
      int c = col();
      std::size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      if (j < line.size() && line[j] == '.') {
        out.push_back({Token::Bad, "non-integer coefficient", c});
        return out;
      }
      out.push_back({Token::Integer, line.substr(i, j - i), c});
      i = j;
      continue;
    }
    if (ch == '+') {
      out.push_back({Token::Plus, "+", col()});
      ++i;
      continue;
    }
    if (ch == ';') {
      out.push_back({Token::Semi, ";", col()});
      ++i;
      continue;
    }
    if (ch == ',') {
      out.push_back({Token::Comma, ",", col()});
      ++i;
      continue;
    }
    if (ch == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({Token::Arrow, "->", col()});
      i += 2;
      continue;
    }
    if (ch == '<' && i + 2 < line.size() && line[i + 1] == '-' && line[i + 2] == '>') {
      out.push_back({Token::RevArrow, "<->", col()});
      i += 3;
      continue;
    }
    if (ch == '-' && i + 1 < line.size() &&
        std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
      out.push_back({Token::Bad, "negative coefficient", col()});
      return out;
    }
    out.push_back({Token::Bad, std::string("unknown token '") + line[i] + "'", col()});
    return out;
  }
  out.push_back({Token::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

class LineParser {
 public:
  LineParser(const std::vector<Token>& toks, int line_no,
             std::vector<ParseDiagnostic>& diags)
      : toks_(toks), line_(line_no), diags_(diags) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  bool error(const std::string& msg, int column) {
    diags_.push_back({line_, column, msg, Severity::Error});
    failed_ = true;
    return false;
  }
  void warn(const std::string& msg, int column) {
    diags_.push_back({line_, column, msg, Severity::Warning});
  }
  bool failed() const { return failed_; }

  // complex := "0" | term { "+" term }
  bool parse_complex(ReactionNetwork& net, Complex& out) {
    if (peek().kind == Token::Integer && peek().text == "0") {
      const Token& zero = take();
      if (peek().kind == Token::Plus || peek().kind == Token::Ident)
        return error("the zero complex cannot be combined with terms", peek().column);
      (void)zero;
      out = Complex{};
      return true;
    }
    std::set<int> seen;
    bool repeated = false;
    while (true) {
      int coeff = 1;
      if (peek().kind == Token::Integer) {
        const Token& t = take();
        coeff = std::stoi(t.text);
        if (coeff == 0) return error("zero stoichiometric coefficient", t.column);
        if (peek().kind != Token::Ident)
          return error("expected species name after coefficient", peek().column);
      }
      if (peek().kind != Token::Ident)
        return error("expected species name", peek().column);
      const Token& id = take();
      int sp = net.intern_species(id.text);
      if (!seen.insert(sp).second) repeated = true;
      out.add(sp, coeff);
      if (peek().kind != Token::Plus) break;
      take();
    }
    if (repeated)
      warn("species repeated within a complex; coefficients were merged",
           toks_.front().column);
    return true;
  }

 private:
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  int line_;
  std::vector<ParseDiagnostic>& diags_;
  bool failed_ = false;
};

}  // namespace

ParseResult parse_network(const NetworkSource& src) {
  ParseResult result;
  ReactionNetwork net;
  net.name = src.name;
  std::set<std::string> labels;
  std::set<std::pair<int, int>> edges;

  std::istringstream stream(src.text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    auto toks = lex_line(raw);
    if (toks.back().kind == Token::Bad) {
      result.diagnostics.push_back(
          {line_no, toks.back().column, toks.back().text, Severity::Error});
      continue;
    }
    LineParser p(toks, line_no, result.diagnostics);
    if (p.peek().kind == Token::End) continue;  // blank or comment-only line

    Complex lhs, rhs;
    if (!p.parse_complex(net, lhs)) continue;
    if (p.peek().kind != Token::Arrow && p.peek().kind != Token::RevArrow) {
      p.error("expected '->' or '<->'", p.peek().column);
      continue;
    }
    bool reversible = (p.take().kind == Token::RevArrow);
    if (!p.parse_complex(net, rhs)) continue;
    if (p.peek().kind != Token::Semi) {
      p.error("expected ';' before rate labels", p.peek().column);
      continue;
    }
    p.take();
    std::vector<std::pair<std::string, int>> rate_labels;
    while (true) {
      if (p.peek().kind != Token::Ident) {
        p.error("expected rate label", p.peek().column);
        break;
      }
      const Token& lab = p.take();
      rate_labels.emplace_back(lab.text, lab.column);
      if (p.peek().kind != Token::Comma) break;
      p.take();
    }
    if (p.failed()) continue;
    if (p.peek().kind != Token::End) {
      p.error("trailing input after reaction", p.peek().column);
      continue;
    }
    std::size_t expected = reversible ? 2 : 1;
    if (rate_labels.size() != expected) {
      p.error(reversible ? "'<->' needs exactly two rate labels (forward, backward)"
                         : "'->' needs exactly one rate label",
              rate_labels.empty() ? 1 : rate_labels.back().second);
      continue;
    }
    if (lhs == rhs) {
      p.error("reaction has identical reactant and product complex", toks.front().column);
      continue;
    }
    int ci = net.intern_complex(lhs);
    int cj = net.intern_complex(rhs);
    auto add_reaction = [&](int from, int to, const std::pair<std::string, int>& lab) {
      if (!labels.insert(lab.first).second) {
        p.error("duplicate rate label '" + lab.first + "'", lab.second);
        return;
      }
      if (!edges.insert({from, to}).second) {
        p.error("duplicate reaction", toks.front().column);
        return;
      }
      net.reactions.push_back({from, to, lab.first});
    };
    add_reaction(ci, cj, rate_labels[0]);
    if (reversible) add_reaction(cj, ci, rate_labels[1]);
  }

  if (!result.has_errors()) result.network = std::move(net);
  return result;
}

namespace {

std::string format_complex(const ReactionNetwork& net, const Complex& c) {
  if (c.terms.empty()) return "0";
  std::string out;
  for (auto& [s, k] : c.terms) {
    if (!out.empty()) out += " + ";
    if (k != 1) out += std::to_string(k);
    out += net.species[s];
  }
  return out;
}

}  // namespace

std::string render_network(const ReactionNetwork& net) {
  std::ostringstream os;
  if (net.num_species() > 0) {
    os << "# species:";
    for (int i = 0; i < net.num_species(); ++i)
      os << (i ? ", " : " ") << net.species[i];
    os << '\n';
  }
  for (auto& r : net.reactions) {
    os << format_complex(net, net.complexes[r.reactant]) << " -> "
       << format_complex(net, net.complexes[r.product]) << " ; " << r.rate_label
       << '\n';
  }
  return os.str();
}

}  // namespace crn
