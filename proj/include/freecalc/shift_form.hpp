#pragma once

#include <cstdint>
#include <vector>

#include "freecalc/linalg.hpp"

namespace freecalc {

/// alpha(k, d) = sum_{j=0}^{k} (d+1)^j, the number of words of length <= k
/// in d+1 letters. Throws RangeError on overflow.
std::uint64_t alpha(int k, int d);

/// Relative rank tolerance of the flag Gram-Schmidt.
inline constexpr double kFlagRankTol = 1e-10;

/// V_k = span{ p(X, M) e_1 : deg p <= k } for k = 0..K, where M is the
/// truncated shift. bases[k] holds an orthonormal basis of V_k in its columns;
/// bases[k] is always the leading block of bases[k+1].
struct GradedFlag {
  MatrixTuple X;
  int K = 0;
  std::vector<ComplexMatrix> bases;
  std::vector<Eigen::Index> dims;

  /// First k with dims[k] == n, or -1 if not reached within K.
  int saturation() const;
};

/// Degree-by-degree construction. New candidates at degree k+1 are the
/// images of bases[k]'s columns under M, then X^1, ..., X^d (in that order),
/// each orthogonalized against the current basis (two passes of modified
/// Gram-Schmidt) and kept when the residual exceeds kFlagRankTol times the
/// candidate's norm. Degrees past saturation repeat the full basis.
GradedFlag build_flag(const MatrixTuple& X, int K);

struct ShiftFormResult {
  ComplexMatrix u;
  MatrixTuple tilde;
  GradedFlag flag;
  bool sh1_ok = false;
  bool sh2_ok = false;
};

/// u e_j is the j-th column of the saturated flag basis; tilde = u* X u.
ShiftFormResult build_shift_form(const MatrixTuple& X);

struct SizeShiftCheck {
  /// Per component: ||P_k X^i P_k|| and ||P_a Xt^i P_a|| with a = alpha(k, d).
  std::vector<double> lhs;
  std::vector<double> rhs;
  /// Refined form: ||X^i P_k|| and ||P_a Xt^i P_b|| with b = alpha(k-1, d).
  std::vector<double> refined_lhs;
  std::vector<double> refined_rhs;
  /// Worst component (largest lhs - rhs).
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
  bool holds = false;
  bool refined_holds = false;
};

SizeShiftCheck sizeshift_check(const MatrixTuple& X, int k);
/// Same check against an already computed shift form.
SizeShiftCheck sizeshift_check(const ShiftFormResult& sf, int k);

struct DemoReport {
  /// Whether every member's leading containment held.
  bool containment_ok = true;
  std::vector<double> containment_defects;
  /// Indices into the input list, increasing.
  std::vector<std::size_t> selected;
  /// Leading alpha(lead, d) x alpha(lead, d) compression per component of the
  /// last selected member.
  std::vector<ComplexMatrix> limit;
  /// Largest pairwise distance inside the selected subsequence.
  double diameter = 0.0;
  bool converged = false;
  std::size_t block = 0;
};

/// Finite analogue of selecting an SOT-convergent subsequence of shift forms:
/// checks Xt_m^i span{e_1..e_lead} inside span{e_1..e_alpha(lead,d)}, then
/// bisects the bounding box of the leading compressions (keeping the half
/// with more members, the later half on ties) until the remaining members
/// are within `tol` of each other.
DemoReport truncated_sot_demo(const std::vector<MatrixTuple>& Xs, int lead, double tol = 1e-3);

}  // namespace freecalc
