#include "crn/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "crn/errors.hpp"

namespace crn {

SpeciesTable::SpeciesTable(const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (find(n)) throw InputError("duplicate species name '" + n + "'");
    add(n);
  }
}

Index SpeciesTable::add(std::string_view name) {
  if (name.empty()) throw InputError("empty species name");
  if (auto i = find(name)) return *i;
  const auto i = static_cast<Index>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), i);
  return i;
}

std::optional<Index> SpeciesTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ReactionNetwork::ReactionNetwork(SpeciesTable species, std::vector<Complex> complexes,
                                 std::vector<Transition> transitions)
    : species_(std::move(species)), complexes_(std::move(complexes)), transitions_(std::move(transitions)) {
  const Index s = species_.size();
  for (std::size_t k = 0; k < complexes_.size(); ++k) {
    const auto& c = complexes_[k].counts;
    if (c.size() != s) throw InputError("complex " + std::to_string(k) + " has wrong length");
    if ((c.array() < 0).any()) throw InputError("complex " + std::to_string(k) + " has a negative count");
    for (std::size_t j = 0; j < k; ++j) {
      if (complexes_[j] == complexes_[k]) {
        throw InputError("complexes " + std::to_string(j) + " and " + std::to_string(k) + " are equal");
      }
    }
  }
  const auto nk = static_cast<Index>(complexes_.size());
  for (std::size_t t = 0; t < transitions_.size(); ++t) {
    const auto& tr = transitions_[t];
    if (tr.source < 0 || tr.source >= nk || tr.target < 0 || tr.target >= nk) {
      throw InputError("transition " + std::to_string(t) + " references an unknown complex");
    }
    if (!(tr.rate > 0.0) || !std::isfinite(tr.rate)) {
      throw InputError("transition " + std::to_string(t) + " has a non-positive rate");
    }
  }
}

std::optional<Index> ReactionNetwork::find_complex(const IntVector& counts) const {
  for (std::size_t k = 0; k < complexes_.size(); ++k) {
    if (complexes_[k].counts.size() == counts.size() && complexes_[k].counts == counts) return static_cast<Index>(k);
  }
  return std::nullopt;
}

ReactionNetwork ReactionNetwork::with_rates(const std::vector<double>& rates) const {
  if (static_cast<Index>(rates.size()) != num_transitions()) throw InputError("rate vector has wrong length");
  auto ts = transitions_;
  for (std::size_t i = 0; i < ts.size(); ++i) ts[i].rate = rates[i];
  return ReactionNetwork(species_, complexes_, std::move(ts));
}

// ---------------------------------------------------------------------------

Index NetworkBuilder::add_complex(const IntVector& counts) {
  for (std::size_t k = 0; k < complexes_.size(); ++k) {
    if (complexes_[k].counts == counts) return static_cast<Index>(k);
  }
  complexes_.push_back(Complex{counts});
  return static_cast<Index>(complexes_.size() - 1);
}

void NetworkBuilder::add_transition(const IntVector& input, const IntVector& output, double rate) {
  if (input.size() != species_.size() || output.size() != species_.size()) {
    throw InputError("transition complex has wrong length");
  }
  const Index s = add_complex(input);
  const Index t = add_complex(output);
  transitions_.push_back(Transition{s, t, rate});
}

IntVector NetworkBuilder::complex_from_text(std::string_view text) {
  // Registers species on the fly; counts are resized at the end.
  std::map<Index, std::int64_t> counts;
  std::string s(text);
  std::stringstream ss(s);
  std::string term;
  while (std::getline(ss, term, '+')) {
    term.erase(std::remove_if(term.begin(), term.end(), [](unsigned char c) { return std::isspace(c); }), term.end());
    if (term.empty() || term == "0") continue;
    std::size_t p = 0;
    while (p < term.size() && std::isdigit(static_cast<unsigned char>(term[p]))) ++p;
    const std::int64_t coeff = p == 0 ? 1 : std::stoll(term.substr(0, p));
    counts[species_.add(term.substr(p))] += coeff;
  }
  IntVector v = IntVector::Zero(species_.size());
  for (auto [i, c] : counts) v(i) = c;
  return v;
}

void NetworkBuilder::add_reaction(std::string_view input, std::string_view output, double rate) {
  IntVector in = complex_from_text(input);
  IntVector out = complex_from_text(output);
  // Earlier complexes may be shorter if new species appeared.
  for (auto& c : complexes_) c.counts.conservativeResizeLike(IntVector::Zero(species_.size()));
  in.conservativeResizeLike(IntVector::Zero(species_.size()));
  out.conservativeResizeLike(IntVector::Zero(species_.size()));
  add_transition(in, out, rate);
}

ReactionNetwork NetworkBuilder::build() const {
  auto cs = complexes_;
  for (auto& c : cs) c.counts.conservativeResizeLike(IntVector::Zero(species_.size()));
  return ReactionNetwork(species_, std::move(cs), transitions_);
}

// ---------------------------------------------------------------------------
// DSL

namespace {

struct Token {
  enum class Kind { Ident, Int, Number, Plus, Arrow, BiArrow, At, Empty, End };
  Kind kind;
  std::string text;
  int column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const int col = static_cast<int>(i) + 1;
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (line.substr(i, 3) == "<->") {
      out.push_back({Token::Kind::BiArrow, "<->", col});
      i += 3;
    } else if (line.substr(i, 2) == "->") {
      out.push_back({Token::Kind::Arrow, "->", col});
      i += 2;
    } else if (c == '+') {
      out.push_back({Token::Kind::Plus, "+", col});
      ++i;
    } else if (c == '@') {
      out.push_back({Token::Kind::At, "@", col});
      ++i;
    } else if (line.substr(i, 3) == "\xE2\x88\x85") {  // U+2205 EMPTY SET
      out.push_back({Token::Kind::Empty, "0", col});
      i += 3;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      out.push_back({Token::Kind::Ident, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      std::size_t j = i + 1;
      bool integer = std::isdigit(static_cast<unsigned char>(c)) != 0;
      while (j < line.size()) {
        const char d = line[j];
        if (std::isdigit(static_cast<unsigned char>(d))) {
          ++j;
        } else if (d == '.') {
          integer = false;
          ++j;
        } else if ((d == 'e' || d == 'E') && j + 1 < line.size() &&
                   (std::isdigit(static_cast<unsigned char>(line[j + 1])) || line[j + 1] == '-' || line[j + 1] == '+')) {
          // exponent only makes sense after a mantissa; "2E" is coefficient 2 of species E
          std::size_t k = j + 1;
          if (line[k] == '-' || line[k] == '+') ++k;
          if (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) {
            integer = false;
            j = k;
          } else {
            break;
          }
        } else {
          break;
        }
      }
      out.push_back({integer ? Token::Kind::Int : Token::Kind::Number, std::string(line.substr(i, j - i)), col});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", lineno, col);
    }
  }
  out.push_back({Token::Kind::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int lineno) : toks_(std::move(toks)), lineno_(lineno) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, lineno_, peek().column); }

  // complex := "0" | "∅" | term ("+" term)*
  std::vector<std::pair<std::string, std::int64_t>> complex() {
    std::vector<std::pair<std::string, std::int64_t>> terms;
    if (peek().kind == Token::Kind::Empty || (peek().kind == Token::Kind::Int && peek().text == "0" &&
                                              toks_[pos_ + 1].kind != Token::Kind::Ident)) {
      next();
      return terms;
    }
    while (true) {
      std::int64_t coeff = 1;
      if (peek().kind == Token::Kind::Int) {
        const auto& t = next();
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), coeff);
        if (ec != std::errc() || coeff <= 0) throw ParseError("bad coefficient '" + t.text + "'", lineno_, t.column);
      }
      if (peek().kind != Token::Kind::Ident) fail("expected species name");
      terms.emplace_back(next().text, coeff);
      if (peek().kind != Token::Kind::Plus) break;
      next();
    }
    return terms;
  }

  double rate() {
    const auto& t = peek();
    if (t.kind != Token::Kind::Int && t.kind != Token::Kind::Number) fail("expected rate");
    next();
    double r = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), r);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw ParseError("bad rate '" + t.text + "'", lineno_, t.column);
    }
    if (!(r > 0.0) || !std::isfinite(r)) throw ParseError("rate must be positive", lineno_, t.column);
    return r;
  }

  int line() const { return lineno_; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int lineno_;
};

struct RawReaction {
  std::vector<std::pair<std::string, std::int64_t>> input, output;
  double rate;
  int line;
  int column;
};

}  // namespace

ReactionNetwork parse_network(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string s(text);
    std::stringstream ss(s);
    std::string l;
    while (std::getline(ss, l)) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      lines.push_back(l);
    }
  }

  SpeciesTable species;
  bool declared = false;
  std::vector<RawReaction> reactions;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int lineno = static_cast<int>(li) + 1;
    LineParser p(tokenize(lines[li], lineno), lineno);
    if (p.peek().kind == Token::Kind::End) continue;
    if (p.peek().kind == Token::Kind::Ident && p.peek().text == "species") {
      p.next();
      if (p.peek().kind == Token::Kind::End) p.fail("species declaration needs at least one name");
      while (p.peek().kind != Token::Kind::End) {
        if (p.peek().kind != Token::Kind::Ident) p.fail("expected species name");
        const auto& t = p.next();
        if (species.find(t.text)) throw ParseError("species '" + t.text + "' declared twice", lineno, t.column);
        species.add(t.text);
      }
      declared = true;
      continue;
    }
    const int col = p.peek().column;
    auto lhs = p.complex();
    if (p.peek().kind == Token::Kind::Arrow) {
      p.next();
      auto rhs = p.complex();
      if (p.peek().kind != Token::Kind::At) p.fail("expected '@'");
      p.next();
      const double r = p.rate();
      if (p.peek().kind != Token::Kind::End) p.fail("unexpected trailing input");
      reactions.push_back({lhs, rhs, r, lineno, col});
    } else if (p.peek().kind == Token::Kind::BiArrow) {
      p.next();
      auto rhs = p.complex();
      if (p.peek().kind != Token::Kind::At) p.fail("expected '@'");
      p.next();
      const double fwd = p.rate();
      const double bwd = p.rate();
      if (p.peek().kind != Token::Kind::End) p.fail("unexpected trailing input");
      reactions.push_back({lhs, rhs, fwd, lineno, col});
      reactions.push_back({rhs, lhs, bwd, lineno, col});
    } else {
      p.fail("expected '->' or '<->'");
    }
  }
  if (reactions.empty()) throw ParseError("no reactions", static_cast<int>(lines.size()) + (lines.empty() ? 1 : 0), 1);

  auto resolve = [&](const RawReaction& r, const std::vector<std::pair<std::string, std::int64_t>>& terms) {
    for (const auto& [name, c] : terms) {
      if (declared && !species.find(name)) throw ParseError("unknown species '" + name + "'", r.line, r.column);
      species.add(name);
    }
  };
  for (const auto& r : reactions) {
    resolve(r, r.input);
    resolve(r, r.output);
  }
  auto to_vector = [&](const std::vector<std::pair<std::string, std::int64_t>>& terms) {
    IntVector v = IntVector::Zero(species.size());
    for (const auto& [name, c] : terms) v(*species.find(name)) += c;
    return v;
  };
  NetworkBuilder b(species);
  for (const auto& r : reactions) b.add_transition(to_vector(r.input), to_vector(r.output), r.rate);
  return b.build();
}

std::string format_complex(const SpeciesTable& species, const IntVector& counts) {
  std::string out;
  for (Index i = 0; i < counts.size(); ++i) {
    if (counts(i) == 0) continue;
    if (!out.empty()) out += " + ";
    if (counts(i) != 1) out += std::to_string(counts(i)) + " ";
    out += species.name(i);
  }
  return out.empty() ? "0" : out;
}

std::string canonical_text(const ReactionNetwork& n) {
  std::string out = "species";
  for (const auto& s : n.species().names()) out += " " + s;
  out += "\n";
  char buf[64];
  for (Index t = 0; t < n.num_transitions(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", n.rate(t));
    out += format_complex(n.species(), n.reactant(t)) + " -> " + format_complex(n.species(), n.product(t)) + " @ " +
           buf + "\n";
  }
  return out;
}

ReactionNetwork from_petri(const PetriNet& p) {
  NetworkBuilder b(p.species);
  for (const auto& t : p.transitions) b.add_transition(t.input, t.output, t.rate);
  return b.build();
}

PetriNet to_petri(const ReactionNetwork& n) {
  PetriNet p{n.species(), {}};
  for (Index t = 0; t < n.num_transitions(); ++t) p.transitions.push_back({n.reactant(t), n.product(t), n.rate(t)});
  return p;
}

bool equivalent(const ReactionNetwork& a, const ReactionNetwork& b) {
  if (!(a.species() == b.species()) || a.num_transitions() != b.num_transitions() ||
      a.num_complexes() != b.num_complexes()) {
    return false;
  }
  for (const auto& c : a.complexes()) {
    if (!b.find_complex(c.counts)) return false;
  }
  for (Index t = 0; t < a.num_transitions(); ++t) {
    if (a.reactant(t) != b.reactant(t) || a.product(t) != b.product(t) || a.rate(t) != b.rate(t)) return false;
  }
  return true;
}

}  // namespace crn
