#include "freecalc/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace freecalc {

struct NcExpr::Node {
  Kind kind;
  Complex value{};
  int index = 0;
  std::vector<NcExpr> children;
};

NcExpr NcExpr::constant(Complex c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InvalidInput("non-finite constant");
  return NcExpr(std::make_shared<const Node>(Node{Kind::Const, c, 0, {}}));
}

NcExpr NcExpr::var(int index) {
  if (index < 1) throw ArityError("variable index must be positive");
  return NcExpr(std::make_shared<const Node>(Node{Kind::Var, {}, index, {}}));
}

NcExpr NcExpr::sum(std::vector<NcExpr> terms) {
  if (terms.empty()) throw InvalidInput("empty sum");
  if (terms.size() == 1) return terms.front();
  return NcExpr(std::make_shared<const Node>(Node{Kind::Sum, {}, 0, std::move(terms)}));
}

NcExpr NcExpr::prod(std::vector<NcExpr> factors) {
  if (factors.empty()) throw InvalidInput("empty product");
  if (factors.size() == 1) return factors.front();
  return NcExpr(std::make_shared<const Node>(Node{Kind::Prod, {}, 0, std::move(factors)}));
}

NcExpr NcExpr::neg(NcExpr e) {
  return NcExpr(std::make_shared<const Node>(Node{Kind::Neg, {}, 0, {std::move(e)}}));
}

NcExpr NcExpr::inv(NcExpr e) {
  return NcExpr(std::make_shared<const Node>(Node{Kind::Inv, {}, 0, {std::move(e)}}));
}

NcExpr::Kind NcExpr::kind() const { return node_->kind; }
Complex NcExpr::value() const { return node_->value; }
int NcExpr::index() const { return node_->index; }
const std::vector<NcExpr>& NcExpr::children() const { return node_->children; }

bool operator==(const NcExpr& a, const NcExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NcExpr::Kind::Const:
      return a.value() == b.value();
    case NcExpr::Kind::Var:
      return a.index() == b.index();
    default:
      return a.children() == b.children();
  }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, int d) : s_(text), d_(d) {}

  NcExpr run() {
    NcExpr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool is_digit_at(std::size_t p) const {
    return p < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[p])) || s_[p] == '.');
  }

  bool is_alnum_at(std::size_t p) const {
    return p < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '_');
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  NcExpr expr() {
    std::vector<NcExpr> terms;
    if (peek() == '-' && !is_digit_at(pos_ + 1)) {
      ++pos_;
      terms.push_back(NcExpr::neg(term()));
    } else {
      terms.push_back(term());
    }
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      NcExpr t = term();
      terms.push_back(c == '-' ? NcExpr::neg(std::move(t)) : std::move(t));
    }
    return NcExpr::sum(std::move(terms));
  }

  NcExpr term() {
    std::vector<NcExpr> factors{factor()};
    while (peek() == '*') {
      ++pos_;
      factors.push_back(factor());
    }
    return NcExpr::prod(std::move(factors));
  }

  NcExpr factor() {
    NcExpr base = primary();
    while (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected unsigned exponent");
      unsigned power = 0;
      const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, power);
      if (res.ec != std::errc() || power > 64) {
        pos_ = start;
        fail("exponent out of range");
      }
      if (power == 0) {
        base = NcExpr::constant(1.0);
      } else {
        base = NcExpr::prod(std::vector<NcExpr>(power, base));
      }
    }
    return base;
  }

  NcExpr primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      NcExpr e = expr();
      expect(')');
      return e;
    }
    if (c == 'x') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected variable index after 'x'");
      int idx = 0;
      const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, idx);
      if (res.ec != std::errc() || idx < 1 || idx > d_)
        throw ArityError("variable x" + std::string(s_.substr(start, pos_ - start)) +
                         " out of range for d=" + std::to_string(d_) + " at offset " +
                         std::to_string(start - 1));
      return NcExpr::var(idx);
    }
    if (s_.substr(pos_, 3) == "inv" && !is_alnum_at(pos_ + 3)) {
      pos_ += 3;
      expect('(');
      NcExpr e = expr();
      expect(')');
      return NcExpr::inv(std::move(e));
    }
    if (c == '-' || is_digit_at(pos_)) return scalar();
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  // Scans [-]digits[.digits][e[+-]digits] starting at pos_; returns false if
  // no literal starts there.
  bool real_literal(double& out) {
    std::size_t p = pos_;
    if (p < s_.size() && (s_[p] == '-' || s_[p] == '+')) ++p;
    const std::size_t mant = p;
    while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
    if (p < s_.size() && s_[p] == '.') ++p;
    while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
    if (p == mant || (p == mant + 1 && s_[mant] == '.')) return false;
    if (p < s_.size() && (s_[p] == 'e' || s_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
        p = q;
      }
    }
    // from_chars rejects a leading '+'.
    const std::size_t from = (s_[pos_] == '+') ? pos_ + 1 : pos_;
    const auto res = std::from_chars(s_.data() + from, s_.data() + p, out);
    if (res.ec != std::errc() || res.ptr != s_.data() + p) return false;
    pos_ = p;
    return true;
  }

  bool imaginary_unit_at(std::size_t p) const {
    return p < s_.size() && s_[p] == 'i' && !is_alnum_at(p + 1);
  }

  NcExpr scalar() {
    const std::size_t start = pos_;
    double re = 0.0;
    if (!real_literal(re)) fail("malformed number");
    if (imaginary_unit_at(pos_)) {
      ++pos_;
      return NcExpr::constant(Complex(0.0, re));
    }
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-') && is_digit_at(pos_ + 1)) {
      const std::size_t save = pos_;
      double im = 0.0;
      if (real_literal(im) && imaginary_unit_at(pos_)) {
        ++pos_;
        return NcExpr::constant(Complex(re, im));
      }
      pos_ = save;
    }
    (void)start;
    return NcExpr::constant(Complex(re, 0.0));
  }

  std::string_view s_;
  int d_;
  std::size_t pos_ = 0;
};

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return format_real(c.real());
  if (c.real() == 0.0) return format_real(c.imag()) + "i";
  return format_real(c.real()) + (std::signbit(c.imag()) ? "-" : "+") + format_real(std::abs(c.imag())) + "i";
}

bool plain_const(const NcExpr& e) {
  return e.kind() == NcExpr::Kind::Const && e.value().imag() == 0.0 && !std::signbit(e.value().real());
}

std::string print(const NcExpr& e);

std::string paren(const std::string& s) { return "(" + s + ")"; }

// Operand of a leading or binary minus.
std::string print_negated(const NcExpr& g, bool leading) {
  using K = NcExpr::Kind;
  if (leading) return g.kind() == K::Var ? print(g) : paren(print(g));
  return (g.kind() == K::Sum || g.kind() == K::Neg) ? paren(print(g)) : print(g);
}

std::string print(const NcExpr& e) {
  using K = NcExpr::Kind;
  switch (e.kind()) {
    case K::Const:
      return format_complex(e.value());
    case K::Var:
      return "x" + std::to_string(e.index());
    case K::Neg:
      return "-" + print_negated(e.children().front(), true);
    case K::Inv:
      return "inv(" + print(e.children().front()) + ")";
    case K::Sum: {
      std::string out;
      bool first = true;
      for (const auto& t : e.children()) {
        if (t.kind() == K::Neg) {
          const NcExpr& g = t.children().front();
          out += first ? "-" + print_negated(g, true) : " - " + print_negated(g, false);
        } else {
          const std::string body = t.kind() == K::Sum ? paren(print(t)) : print(t);
          out += first ? body : " + " + body;
        }
        first = false;
      }
      return out;
    }
    case K::Prod: {
      std::string out;
      for (const auto& f : e.children()) {
        if (!out.empty()) out += "*";
        const bool wrap = f.kind() == K::Sum || f.kind() == K::Prod || f.kind() == K::Neg ||
                          (f.kind() == K::Const && !plain_const(f));
        out += wrap ? paren(print(f)) : print(f);
      }
      return out;
    }
  }
  return {};
}

// Evaluation with the identity of the current dimension precomputed.
struct Evaluator {
  const MatrixTuple& x;
  ComplexMatrix identity;

  ComplexMatrix operator()(const NcExpr& e) const {
    using K = NcExpr::Kind;
    switch (e.kind()) {
      case K::Const:
        return e.value() * identity;
      case K::Var:
        if (e.index() > x.d())
          throw ArityError("variable x" + std::to_string(e.index()) + " exceeds tuple arity " +
                           std::to_string(x.d()));
        return x[e.index() - 1];
      case K::Neg:
        return -(*this)(e.children().front());
      case K::Sum: {
        ComplexMatrix acc = (*this)(e.children().front());
        for (std::size_t i = 1; i < e.children().size(); ++i) acc += (*this)(e.children()[i]);
        return acc;
      }
      case K::Prod: {
        ComplexMatrix acc = (*this)(e.children().front());
        for (std::size_t i = 1; i < e.children().size(); ++i) acc = acc * (*this)(e.children()[i]);
        return acc;
      }
      case K::Inv: {
        const ComplexMatrix m = (*this)(e.children().front());
        Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& s = svd.singularValues();
        const double lo = s(s.size() - 1);
        const double cond = lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
        if (!(cond <= kInvCondCap)) throw SingularError(to_string(e.children().front()), cond);
        return svd.matrixV() * s.cwiseInverse().cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
      }
    }
    return {};
  }
};

}  // namespace

NcExpr parse(std::string_view text, int d) {
  if (d < 1) throw ArityError("arity must be positive");
  return Parser(text, d).run();
}

std::string to_string(const NcExpr& e) { return print(e); }

ComplexMatrix eval(const NcExpr& e, const MatrixTuple& x) {
  const Evaluator ev{x, ComplexMatrix::Identity(x.n(), x.n())};
  return ev(e);
}

std::optional<int> poly_degree(const NcExpr& e) {
  using K = NcExpr::Kind;
  switch (e.kind()) {
    case K::Const:
      return 0;
    case K::Var:
      return 1;
    case K::Inv:
      return std::nullopt;
    case K::Neg:
      return poly_degree(e.children().front());
    case K::Sum:
    case K::Prod: {
      int acc = 0;
      for (const auto& c : e.children()) {
        const auto dc = poly_degree(c);
        if (!dc) return std::nullopt;
        acc = e.kind() == K::Sum ? std::max(acc, *dc) : acc + *dc;
      }
      return acc;
    }
  }
  return std::nullopt;
}

int max_var_index(const NcExpr& e) {
  if (e.kind() == NcExpr::Kind::Var) return e.index();
  int best = 0;
  for (const auto& c : e.children()) best = std::max(best, max_var_index(c));
  return best;
}

bool has_inverse(const NcExpr& e) { return !poly_degree(e).has_value(); }

// ---------------------------------------------------------------------------
// NcMap

NcMap::NcMap(int arity, std::vector<NcExpr> comps) : d(arity), components(std::move(comps)) {
  if (d < 1) throw ArityError("NcMap: arity must be positive");
  if (components.empty()) throw InvalidInput("NcMap: at least one component required");
  for (const auto& c : components)
    if (max_var_index(c) > d)
      throw ArityError("NcMap: component '" + to_string(c) + "' uses a variable beyond d=" + std::to_string(d));
}

NcMap NcMap::parse(const std::vector<std::string>& exprs, int d) {
  std::vector<NcExpr> comps;
  comps.reserve(exprs.size());
  for (const auto& s : exprs) comps.push_back(freecalc::parse(s, d));
  return NcMap(d, std::move(comps));
}

NcMap NcMap::identity(int d) {
  std::vector<NcExpr> comps;
  for (int i = 1; i <= d; ++i) comps.push_back(NcExpr::var(i));
  return NcMap(d, std::move(comps));
}

MatrixTuple eval_map(const NcMap& f, const MatrixTuple& x) {
  if (x.d() != f.d)
    throw ArityError("eval_map: map arity " + std::to_string(f.d) + " but tuple has d=" + std::to_string(x.d()));
  const Evaluator ev{x, ComplexMatrix::Identity(x.n(), x.n())};
  std::vector<ComplexMatrix> out;
  out.reserve(f.components.size());
  for (const auto& c : f.components) out.push_back(ev(c));
  return MatrixTuple(std::move(out));
}

}  // namespace freecalc
