#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freecalc/expr.hpp"

namespace freecalc {

/// An NC domain together with its canonical exhaustion. BDelta domains use
///
///   Omega_k = { ||delta(x)|| <= 1 - 1/k } and { ||x|| <= k },
///
/// the invertibles use { ||x|| <= k, ||x^{-1}|| <= k }.
struct DomainSpec {
  enum class Kind { PolyDisk, RowBall, BDelta, Invertibles };

  Kind kind = Kind::PolyDisk;
  int d = 1;
  /// I x J matrix of entries; only used by BDelta.
  std::vector<std::vector<NcExpr>> delta;

  static DomainSpec polydisk(int d);
  static DomainSpec rowball(int d);
  static DomainSpec bdelta(int d, std::vector<std::vector<NcExpr>> delta);
  static DomainSpec invertibles();

  /// The explicit delta matrix (diagonal for the polydisk, a row for the row ball).
  std::vector<std::vector<NcExpr>> delta_matrix() const;
  bool is_bdelta_like() const { return kind != Kind::Invertibles; }
};

std::string to_string(DomainSpec::Kind kind);

/// (I n) x (J n) block matrix with blocks eval(delta[i][j], x).
ComplexMatrix delta_eval(const DomainSpec& spec, const MatrixTuple& x);

bool contains(const DomainSpec& spec, const MatrixTuple& x);

/// Largest level searched before giving up.
inline constexpr int kMaxLevel = 1'000'000;

/// Smallest k with x in Omega_k, or nullopt when x is outside the domain.
std::optional<int> level_index(const DomainSpec& spec, const MatrixTuple& x);

/// Whether x satisfies the level-k inequalities.
bool in_level(const DomainSpec& spec, const MatrixTuple& x, int k);

struct AuditReport {
  struct Failure {
    std::string check;
    std::string detail;
  };

  std::vector<std::optional<int>> levels;
  bool unitary_invariance = true;
  bool direct_sum_closure = true;
  bool monotone = true;
  bool interior = true;
  /// Set when every sample has the same level index.
  std::optional<int> common_level;
  /// Level indices strictly increase along the sample order.
  bool levels_strictly_increasing = false;
  std::vector<Failure> failures;

  bool passed() const { return failures.empty(); }
};

/// Finite-multiplicity audit of the exhaustion axioms: unitary invariance of
/// the level index, closure of each level under direct sums of up to four
/// members, Omega_k inside Omega_{k+1}, and an interior check with radius
/// 1/(2k(k+1)).
AuditReport exhaustion_audit(const DomainSpec& spec, const std::vector<MatrixTuple>& samples,
                             std::uint64_t seed);

}  // namespace freecalc
