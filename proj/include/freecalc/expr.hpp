#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freecalc/linalg.hpp"

namespace freecalc {

/// Condition number above which `inv(...)` is treated as singular.
inline constexpr double kInvCondCap = 1e12;

/// Immutable expression tree over the free algebra in x1..xd with formal
/// inverses. Constants denote scalar multiples of the identity. Nodes are
/// shared, so copies are cheap.
class NcExpr {
 public:
  enum class Kind { Const, Var, Sum, Prod, Neg, Inv };

  static NcExpr constant(Complex c);
  /// 1-based variable index.
  static NcExpr var(int index);
  /// A single child is returned unchanged; an empty list is rejected.
  static NcExpr sum(std::vector<NcExpr> terms);
  static NcExpr prod(std::vector<NcExpr> factors);
  static NcExpr neg(NcExpr e);
  static NcExpr inv(NcExpr e);

  Kind kind() const;
  Complex value() const;
  int index() const;
  const std::vector<NcExpr>& children() const;

  /// Structural equality; constants compare exactly.
  friend bool operator==(const NcExpr& a, const NcExpr& b);

 private:
  struct Node;
  explicit NcExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the surface syntax
///
///   expr   := ['-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := primary ('^' UINT)*
///   primary:= scalar | 'x' INT | '(' expr ')' | 'inv' '(' expr ')'
///
/// A scalar is a real literal, optionally followed with no whitespace by
/// 'i' (imaginary) or by a signed real literal and 'i' ("0.5-2i"). A '-'
/// directly followed by a digit in operand position is part of the literal.
NcExpr parse(std::string_view text, int d);

/// Canonical printing; `parse(to_string(e), d) == e` for every tree.
std::string to_string(const NcExpr& e);

/// Recursive evaluation at a tuple; `inv` nodes throw SingularError when the
/// operand's condition number exceeds kInvCondCap.
ComplexMatrix eval(const NcExpr& e, const MatrixTuple& x);

/// Total degree, or nullopt ("unbounded") when any inv node is present.
std::optional<int> poly_degree(const NcExpr& e);

/// Largest variable index occurring in e (0 for constants).
int max_var_index(const NcExpr& e);

bool has_inverse(const NcExpr& e);

/// An r-tuple of expressions in d variables.
struct NcMap {
  int d = 0;
  std::vector<NcExpr> components;

  NcMap() = default;
  NcMap(int arity, std::vector<NcExpr> comps);

  int r() const { return static_cast<int>(components.size()); }

  static NcMap parse(const std::vector<std::string>& exprs, int d);
  static NcMap identity(int d);
};

MatrixTuple eval_map(const NcMap& f, const MatrixTuple& x);

}  // namespace freecalc
