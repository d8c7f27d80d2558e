#include "stlenf/stl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace stlenf {

Rational AffineExpr::eval(const std::map<std::string, Rational>& point) const {
  Rational acc = constant;
  for (const auto& [var, coef] : coeffs) {
    auto it = point.find(var);
    if (it == point.end()) throw std::runtime_error("missing variable '" + var + "' in point");
    acc += coef * it->second;
  }
  return acc;
}

std::set<std::string> AffineExpr::support() const {
  std::set<std::string> s;
  for (const auto& [var, coef] : coeffs)
    if (coef != 0) s.insert(var);
  return s;
}

AffineExpr AffineExpr::negated() const {
  AffineExpr n;
  n.constant = -constant;
  for (const auto& [var, coef] : coeffs) n.coeffs[var] = -coef;
  return n;
}

bool eval_predicate(const Predicate& p, const std::map<std::string, Rational>& point) {
  Rational m = p.expr.eval(point);
  switch (p.kind) {
    case PredKind::GE: return m >= 0;
    case PredKind::GT: return m > 0;
    case PredKind::EQ: return m == 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  LParen, RParen, LBracket, RBracket, Comma, Star, Plus, Minus, Bang,
  AndAnd, OrOr, AndWord, OrWord, True, U, R,
  Lt, Le, Gt, Ge, EqEq,
  Number, Ident, End
};

struct Token {
  Tok kind;
  std::string text;
  size_t pos;  // character offset in input
};

struct Lexer {
  std::string src;
  std::vector<Token> toks;

  explicit Lexer(std::string text) : src(std::move(text)) { lex(); }

  [[noreturn]] void fail(size_t pos, const std::string& what) {
    throw ParseError("syntax error at position " + std::to_string(pos) + ": " + what);
  }

  void lex() {
    size_t i = 0;
    auto n = src.size();
    while (i < n) {
      char c = src[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      size_t start = i;
      auto push = [&](Tok k, size_t len) {
        toks.push_back({k, src.substr(start, len), start});
        i += len;
      };
      if (c == '(') { push(Tok::LParen, 1); continue; }
      if (c == ')') { push(Tok::RParen, 1); continue; }
      if (c == '[') { push(Tok::LBracket, 1); continue; }
      if (c == ']') { push(Tok::RBracket, 1); continue; }
      if (c == ',') { push(Tok::Comma, 1); continue; }
      if (c == '*') { push(Tok::Star, 1); continue; }
      if (c == '+') { push(Tok::Plus, 1); continue; }
      if (c == '-') { push(Tok::Minus, 1); continue; }
      if (c == '!') { push(Tok::Bang, 1); continue; }
      if (c == '&') {
        if (i + 1 < n && src[i + 1] == '&') push(Tok::AndAnd, 2);
        else push(Tok::AndWord, 1);
        continue;
      }
      if (c == '|') {
        if (i + 1 < n && src[i + 1] == '|') push(Tok::OrOr, 2);
        else push(Tok::OrWord, 1);
        continue;
      }
      if (c == '<') {
        if (i + 1 < n && src[i + 1] == '=') push(Tok::Le, 2);
        else push(Tok::Lt, 1);
        continue;
      }
      if (c == '>') {
        if (i + 1 < n && src[i + 1] == '=') push(Tok::Ge, 2);
        else push(Tok::Gt, 1);
        continue;
      }
      if (c == '=') {
        if (i + 1 < n && src[i + 1] == '=') push(Tok::EqEq, 2);
        else fail(i, "single '=' (use '==')");
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        size_t j = i;
        while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        if (j < n && src[j] == '.') {
          ++j;
          while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
        // "p/q" is one token when '/' binds digits with no whitespace.
        if (j < n && src[j] == '/' && j + 1 < n &&
            std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
          ++j;
          while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
        if (src.substr(i, j - i) == ".") fail(i, "malformed number");
        push(Tok::Number, j - i);
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
        std::string word = src.substr(i, j - i);
        if (word == "and") push(Tok::AndWord, word.size());
        else if (word == "or") push(Tok::OrWord, word.size());
        else if (word == "true") push(Tok::True, word.size());
        else if (word == "U") push(Tok::U, word.size());
        else if (word == "R") push(Tok::R, word.size());
        else push(Tok::Ident, word.size());
        continue;
      }
      fail(i, std::string("unexpected character '") + c + "'");
    }
    toks.push_back({Tok::End, "", n});
  }
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
  Lexer lx;
  size_t cur = 0;
  std::vector<Predicate> preds;

  explicit Parser(const std::string& text) : lx(text) {}

  const Token& peek(size_t ahead = 0) const {
    size_t i = std::min(cur + ahead, lx.toks.size() - 1);
    return lx.toks[i];
  }
  const Token& next() { return lx.toks[std::min(cur++, lx.toks.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  [[noreturn]] void fail(const std::string& what) { lx.fail(peek().pos, what); }

  void expect(Tok k, const std::string& what) {
    if (!at(k)) fail("expected " + what);
    ++cur;
  }

  // Registers a predicate, merging structural duplicates; returns its index.
  int intern(AffineExpr expr, PredKind kind) {
    if (expr.support().empty())
      throw ParseError("non-affine expression: predicate mentions no variable");
    if (kind == PredKind::EQ) {
      // mu = 0 and -mu = 0 describe the same set; canonicalize the sign.
      for (const auto& [var, coef] : expr.coeffs) {
        if (coef == 0) continue;
        if (coef < 0) expr = expr.negated();
        break;
      }
    }
    Predicate cand;
    cand.expr = std::move(expr);
    cand.kind = kind;
    for (size_t i = 0; i < preds.size(); ++i)
      if (preds[i].same_shape(cand)) return static_cast<int>(i);
    cand.id = "p" + std::to_string(preds.size() + 1);
    preds.push_back(std::move(cand));
    return static_cast<int>(preds.size() - 1);
  }

  Rational number() {
    if (!at(Tok::Number)) fail("expected number");
    return parse_rational(next().text);
  }

  Rational signed_number() {
    bool neg = false;
    while (at(Tok::Plus) || at(Tok::Minus)) {
      if (next().kind == Tok::Minus) neg = !neg;
    }
    Rational r = number();
    return neg ? Rational(-r) : r;
  }

  // affine := signed sum of coef*var | var | constant
  AffineExpr affine() {
    AffineExpr e;
    bool first = true;
    for (;;) {
      bool neg = false;
      if (at(Tok::Plus) || at(Tok::Minus)) {
        neg = next().kind == Tok::Minus;
      } else if (!first) {
        break;
      }
      if (at(Tok::Number)) {
        Rational c = number();
        if (at(Tok::Star)) {
          ++cur;
          if (at(Tok::Number)) fail("non-affine expression");
          if (!at(Tok::Ident)) fail("expected variable after '*'");
          std::string var = next().text;
          if (at(Tok::Star)) fail("non-affine expression");
          e.coeffs[var] += neg ? Rational(-c) : c;
        } else {
          e.constant += neg ? Rational(-c) : c;
        }
      } else if (at(Tok::Ident)) {
        std::string var = next().text;
        Rational c = 1;
        if (at(Tok::Star)) {
          ++cur;
          if (at(Tok::Ident)) fail("non-affine expression");
          if (!at(Tok::Number)) fail("expected coefficient after '*'");
          c = number();
          if (at(Tok::Star)) fail("non-affine expression");
        }
        e.coeffs[var] += neg ? Rational(-c) : c;
      } else if (first) {
        fail("expected affine expression");
      } else {
        fail("expected term after '+'/'-'");
      }
      first = false;
      if (!at(Tok::Plus) && !at(Tok::Minus)) break;
    }
    return e;
  }

  // atom := affine cmp rational  (normalized to GE/GT/EQ with mu ? 0)
  NodePtr atom(bool positive) {
    AffineExpr lhs = affine();
    Tok cmp = peek().kind;
    if (cmp != Tok::Lt && cmp != Tok::Le && cmp != Tok::Gt && cmp != Tok::Ge &&
        cmp != Tok::EqEq)
      fail("expected comparison operator");
    ++cur;
    Rational rhs = signed_number();

    AffineExpr mu = lhs;
    mu.constant -= rhs;
    PredKind kind;
    switch (cmp) {
      case Tok::Ge: kind = PredKind::GE; break;
      case Tok::Gt: kind = PredKind::GT; break;
      case Tok::Le: kind = PredKind::GE; mu = mu.negated(); break;
      case Tok::Lt: kind = PredKind::GT; mu = mu.negated(); break;
      default: kind = PredKind::EQ; break;
    }
    auto node = std::make_shared<FormulaNode>();
    node->kind = NodeKind::Lit;
    node->pred = intern(std::move(mu), kind);
    node->positive = positive;
    return node;
  }

  // primary_lit := atom | "!" atom | "true" | "(" lit ")"
  NodePtr primary_lit() {
    if (at(Tok::True)) {
      ++cur;
      auto node = std::make_shared<FormulaNode>();
      node->kind = NodeKind::True;
      return node;
    }
    if (at(Tok::Bang)) {
      ++cur;
      if (at(Tok::LParen)) {
        ++cur;
        NodePtr inner = atom(true);
        expect(Tok::RParen, "')'");
        inner->positive = false;
        return inner;
      }
      return atom(false);
    }
    if (at(Tok::LParen)) {
      ++cur;
      NodePtr inner = lit_or();
      expect(Tok::RParen, "')'");
      return inner;
    }
    return atom(true);
  }

  NodePtr lit_and() {
    NodePtr left = primary_lit();
    if (!at(Tok::AndAnd)) return left;
    auto node = std::make_shared<FormulaNode>();
    node->kind = NodeKind::And;
    node->children.push_back(left);
    while (at(Tok::AndAnd)) {
      ++cur;
      node->children.push_back(primary_lit());
    }
    return node;
  }

  NodePtr lit_or() {
    NodePtr left = lit_and();
    if (!at(Tok::OrOr)) return left;
    auto node = std::make_shared<FormulaNode>();
    node->kind = NodeKind::Or;
    node->children.push_back(left);
    while (at(Tok::OrOr)) {
      ++cur;
      node->children.push_back(lit_and());
    }
    return node;
  }

  Interval interval() {
    expect(Tok::LBracket, "'['");
    Rational lo = signed_number();
    expect(Tok::Comma, "','");
    Rational hi = signed_number();
    expect(Tok::RBracket, "']'");
    if (lo < 0) throw ParseError("interval endpoints must be nonnegative");
    if (lo > hi) throw ParseError("interval lo > hi");
    return Interval{lo, hi};
  }

  // Index of the token following the ')' matching the '(' at index `open`.
  size_t after_matching_paren(size_t open) const {
    int depth = 0;
    for (size_t i = open; i < lx.toks.size(); ++i) {
      if (lx.toks[i].kind == Tok::LParen) ++depth;
      if (lx.toks[i].kind == Tok::RParen && --depth == 0) return i + 1;
      if (lx.toks[i].kind == Tok::End) break;
    }
    throw ParseError("syntax error at position " + std::to_string(lx.toks[open].pos) +
                     ": unmatched '('");
  }

  // term := "(" lit ")" TOP "[" a "," b "]" "(" lit ")" | "(" formula ")" | "true"
  NodePtr term() {
    if (at(Tok::True)) {
      ++cur;
      auto node = std::make_shared<FormulaNode>();
      node->kind = NodeKind::True;
      return node;
    }
    if (!at(Tok::LParen)) fail("expected '('");
    size_t follower = after_matching_paren(cur);
    bool temporal = lx.toks[std::min(follower, lx.toks.size() - 1)].kind == Tok::U ||
                    lx.toks[std::min(follower, lx.toks.size() - 1)].kind == Tok::R;
    ++cur;  // '('

    if (!temporal) {
      NodePtr inner = formula();
      expect(Tok::RParen, "')'");
      if (at(Tok::U) || at(Tok::R)) throw ParseError("nested temporal operator");
      return inner;
    }

    NodePtr left = lit_or();
    if (at(Tok::U) || at(Tok::R)) throw ParseError("nested temporal operator");
    expect(Tok::RParen, "')'");
    bool is_until = at(Tok::U);
    ++cur;  // U or R
    Interval iv = interval();
    expect(Tok::LParen, "'('");
    NodePtr right = lit_or();
    if (at(Tok::U) || at(Tok::R)) throw ParseError("nested temporal operator");
    expect(Tok::RParen, "')'");
    if (at(Tok::U) || at(Tok::R)) throw ParseError("nested temporal operator");

    auto node = std::make_shared<FormulaNode>();
    node->kind = is_until ? NodeKind::Until : NodeKind::Release;
    node->interval = iv;
    node->children = {left, right};
    return node;
  }

  // formula := term (("and"|"&") term)* | term (("or"|"|") term)*
  NodePtr formula() {
    NodePtr first = term();
    if (!at(Tok::AndWord) && !at(Tok::OrWord)) return first;
    bool conj = at(Tok::AndWord);
    auto node = std::make_shared<FormulaNode>();
    node->kind = conj ? NodeKind::And : NodeKind::Or;
    node->children.push_back(first);
    while (at(Tok::AndWord) || at(Tok::OrWord)) {
      if (at(conj ? Tok::OrWord : Tok::AndWord))
        fail("cannot mix 'and' and 'or' without parentheses");
      ++cur;
      node->children.push_back(term());
    }
    return node;
  }

  StlFormula run() {
    NodePtr root = formula();
    if (!at(Tok::End)) {
      if (at(Tok::U) || at(Tok::R)) throw ParseError("nested temporal operator");
      fail("unexpected trailing input");
    }
    StlFormula f;
    f.root = root;
    f.preds = std::move(preds);
    return f;
  }
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

std::string expr_text(const AffineExpr& e, bool flip) {
  // Prints coefficient terms; constant handled by the caller (moved to RHS).
  std::ostringstream out;
  bool first = true;
  for (const auto& [var, coef] : e.coeffs) {
    Rational c = flip ? Rational(-coef) : coef;
    if (c == 0) continue;
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    Rational a = rat_abs(c);
    if (a != 1) out << format_rational(a) << "*";
    out << var;
    first = false;
  }
  return out.str();
}

std::string lit_text(const StlFormula& f, const FormulaNode& n);

std::string atom_text(const StlFormula& f, const FormulaNode& n) {
  const Predicate& p = f.pred(n.pred);
  // Flip to the "<="/"<" spelling when every coefficient is negative, so that
  // inputs like "v <= 30" print back in their natural orientation.
  bool all_neg = true;
  for (const auto& [var, coef] : p.expr.coeffs)
    if (coef > 0) all_neg = false;
  bool flip = all_neg && p.kind != PredKind::EQ;
  std::string cmp;
  switch (p.kind) {
    case PredKind::GE: cmp = flip ? "<=" : ">="; break;
    case PredKind::GT: cmp = flip ? "<" : ">"; break;
    case PredKind::EQ: cmp = "=="; break;
  }
  Rational rhs = flip ? p.expr.constant : Rational(-p.expr.constant);
  std::string body = expr_text(p.expr, flip) + " " + cmp + " " + format_rational(rhs);
  return n.positive ? body : "!" + body;
}

std::string lit_text(const StlFormula& f, const FormulaNode& n) {
  switch (n.kind) {
    case NodeKind::True: return "true";
    case NodeKind::Lit: return atom_text(f, n);
    case NodeKind::And: {
      std::string out;
      for (size_t i = 0; i < n.children.size(); ++i) {
        const auto& c = *n.children[i];
        std::string part = lit_text(f, c);
        if (c.kind == NodeKind::Or) part = "(" + part + ")";
        out += (i ? " && " : "") + part;
      }
      return out;
    }
    case NodeKind::Or: {
      std::string out;
      for (size_t i = 0; i < n.children.size(); ++i) {
        out += (i ? " || " : "") + lit_text(f, *n.children[i]);
      }
      return out;
    }
    default: throw std::runtime_error("temporal node in literal position");
  }
}

std::string formula_text(const StlFormula& f, const FormulaNode& n) {
  switch (n.kind) {
    case NodeKind::True: return "true";
    case NodeKind::Until:
    case NodeKind::Release:
      return "(" + lit_text(f, *n.children[0]) + ") " +
             (n.kind == NodeKind::Until ? "U" : "R") + "[" +
             format_rational(n.interval.lo) + "," + format_rational(n.interval.hi) + "] (" +
             lit_text(f, *n.children[1]) + ")";
    case NodeKind::And:
    case NodeKind::Or: {
      const char* sep = n.kind == NodeKind::And ? " and " : " or ";
      std::string out;
      for (size_t i = 0; i < n.children.size(); ++i) {
        const auto& c = *n.children[i];
        std::string part = formula_text(f, c);
        if (c.kind == NodeKind::And || c.kind == NodeKind::Or) part = "(" + part + ")";
        out += (i ? sep : "") + part;
      }
      return out;
    }
    case NodeKind::Lit:
      throw std::runtime_error("bare literal at formula level");
  }
  return "";
}

bool node_equal(const FormulaNode& a, const FormulaNode& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == NodeKind::Lit)
    return a.pred == b.pred && a.positive == b.positive;
  if (a.kind == NodeKind::Until || a.kind == NodeKind::Release)
    if (!(a.interval.lo == b.interval.lo && a.interval.hi == b.interval.hi)) return false;
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!node_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

void collect_rp(const FormulaNode& n, std::set<Rational>& out) {
  switch (n.kind) {
    case NodeKind::True: return;
    case NodeKind::Lit: out.insert(Rational(0)); return;
    case NodeKind::And:
    case NodeKind::Or:
      for (const auto& c : n.children) collect_rp(*c, out);
      return;
    case NodeKind::Until:
    case NodeKind::Release:
      out.insert(n.interval.lo);
      out.insert(n.interval.hi);
      for (const auto& c : n.children) collect_rp(*c, out);
      return;
  }
}

}  // namespace

StlFormula parse_formula(const std::string& text) {
  Parser p(text);
  return p.run();
}

std::string to_text(const StlFormula& f) { return formula_text(f, *f.root); }

bool structurally_equal(const StlFormula& a, const StlFormula& b) {
  if (a.preds.size() != b.preds.size()) return false;
  for (size_t i = 0; i < a.preds.size(); ++i)
    if (!a.preds[i].same_shape(b.preds[i])) return false;
  return node_equal(*a.root, *b.root);
}

const std::vector<Predicate>& predicates(const StlFormula& f) { return f.preds; }

std::vector<Rational> relevant_points(const StlFormula& f) {
  std::set<Rational> pts;
  collect_rp(*f.root, pts);
  return std::vector<Rational>(pts.begin(), pts.end());
}

std::map<std::string, ValuationDescriptor> variable_valuations(const StlFormula& f) {
  std::map<std::string, ValuationDescriptor> out;
  for (const Predicate& p : f.preds) {
    ValuationDescriptor d;
    d.plane = p.expr;
    auto sup = p.expr.support();
    if (sup.size() == 1) {
      const std::string& var = *sup.begin();
      // coef*var + const = 0  =>  var = -const/coef
      d.threshold = {var, Rational(-p.expr.constant / p.expr.coeffs.at(var))};
    }
    out[p.id] = std::move(d);
  }
  return out;
}

}  // namespace stlenf
