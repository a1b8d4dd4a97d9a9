#include "freecalc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace freecalc {

ComplexMatrix block_diag(std::span<const ComplexMatrix> blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  ComplexMatrix out = ComplexMatrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

ComplexMatrix truncated_shift(Eigen::Index n) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) m(k + 1, k) = 1.0;
  return m;
}

// ---------------------------------------------------------------------------
// MatrixTuple

MatrixTuple::MatrixTuple(std::vector<ComplexMatrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw InvalidInput("MatrixTuple: d must be positive");
  const Eigen::Index n = mats_.front().rows();
  if (n <= 0) throw InvalidInput("MatrixTuple: n must be positive");
  for (const auto& m : mats_) {
    if (m.rows() != n || m.cols() != n)
      throw InvalidInput("MatrixTuple: components must be square of equal dimension");
    if (!m.allFinite()) throw InvalidInput("MatrixTuple: non-finite entries");
  }
}

MatrixTuple MatrixTuple::zeros(int d, Eigen::Index n) {
  return MatrixTuple(std::vector<ComplexMatrix>(static_cast<std::size_t>(d), ComplexMatrix::Zero(n, n)));
}

namespace {
void require_same_shape(const MatrixTuple& a, const MatrixTuple& b, const char* op) {
  if (a.d() != b.d() || a.n() != b.n())
    throw InvalidInput(std::string(op) + ": tuple shape mismatch (" + std::to_string(a.d()) + "x" +
                       std::to_string(a.n()) + " vs " + std::to_string(b.d()) + "x" +
                       std::to_string(b.n()) + ")");
}

template <typename F>
MatrixTuple map_components(const MatrixTuple& t, F&& f) {
  std::vector<ComplexMatrix> out;
  out.reserve(t.mats().size());
  for (const auto& m : t.mats()) out.push_back(f(m));
  return MatrixTuple(std::move(out));
}
}  // namespace

MatrixTuple MatrixTuple::operator+(const MatrixTuple& o) const {
  require_same_shape(*this, o, "operator+");
  std::vector<ComplexMatrix> out(mats_.size());
  for (std::size_t i = 0; i < mats_.size(); ++i) out[i] = mats_[i] + o.mats_[i];
  return MatrixTuple(std::move(out));
}

MatrixTuple MatrixTuple::operator-(const MatrixTuple& o) const {
  require_same_shape(*this, o, "operator-");
  std::vector<ComplexMatrix> out(mats_.size());
  for (std::size_t i = 0; i < mats_.size(); ++i) out[i] = mats_[i] - o.mats_[i];
  return MatrixTuple(std::move(out));
}

MatrixTuple MatrixTuple::operator*(Complex c) const {
  return map_components(*this, [c](const ComplexMatrix& m) -> ComplexMatrix { return c * m; });
}

MatrixTuple MatrixTuple::left_mul(const ComplexMatrix& a) const {
  return map_components(*this, [&a](const ComplexMatrix& m) -> ComplexMatrix { return a * m; });
}

MatrixTuple MatrixTuple::right_mul(const ComplexMatrix& a) const {
  return map_components(*this, [&a](const ComplexMatrix& m) -> ComplexMatrix { return m * a; });
}

MatrixTuple MatrixTuple::slice(int first, int count) const {
  if (first < 0 || count <= 0 || first + count > d()) throw InvalidInput("MatrixTuple::slice out of range");
  return MatrixTuple(std::vector<ComplexMatrix>(mats_.begin() + first, mats_.begin() + first + count));
}

MatrixTuple MatrixTuple::concat(const MatrixTuple& a, const MatrixTuple& b) {
  if (a.n() != b.n()) throw InvalidInput("MatrixTuple::concat: dimension mismatch");
  std::vector<ComplexMatrix> out = a.mats_;
  out.insert(out.end(), b.mats_.begin(), b.mats_.end());
  return MatrixTuple(std::move(out));
}

ComplexVector MatrixTuple::vectorize() const {
  const Eigen::Index nn = n() * n();
  ComplexVector v(nn * d());
  for (int i = 0; i < d(); ++i) v.segment(i * nn, nn) = mats_[static_cast<std::size_t>(i)].reshaped();
  return v;
}

MatrixTuple MatrixTuple::unvectorize(const ComplexVector& v, int d, Eigen::Index n) {
  const Eigen::Index nn = n * n;
  if (v.size() != nn * d) throw InvalidInput("unvectorize: length mismatch");
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) out.push_back(v.segment(i * nn, nn).reshaped(n, n));
  return MatrixTuple(std::move(out));
}

double MatrixTuple::frobenius() const {
  double s = 0.0;
  for (const auto& m : mats_) s += m.squaredNorm();
  return std::sqrt(s);
}

double tuple_norm(const MatrixTuple& x) {
  double best = 0.0;
  for (const auto& m : x.mats()) best = std::max(best, op_norm(m));
  return best;
}

MatrixTuple direct_sum(std::span<const MatrixTuple> xs) {
  if (xs.empty()) throw InvalidInput("direct_sum: empty list");
  const int d = xs.front().d();
  for (const auto& x : xs)
    if (x.d() != d) throw InvalidInput("direct_sum: mismatched arity");
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(d));
  std::vector<ComplexMatrix> blocks(xs.size());
  for (int i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) blocks[j] = xs[j][i];
    out.push_back(block_diag(blocks));
  }
  return MatrixTuple(std::move(out));
}

MatrixTuple upper_block2(const MatrixTuple& x, const MatrixTuple& h) {
  require_same_shape(x, h, "upper_block2");
  const Eigen::Index n = x.n();
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(x.d()));
  for (int i = 0; i < x.d(); ++i) {
    ComplexMatrix m = ComplexMatrix::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = x[i];
    m.topRightCorner(n, n) = h[i];
    m.bottomRightCorner(n, n) = x[i];
    out.push_back(std::move(m));
  }
  return MatrixTuple(std::move(out));
}

// ---------------------------------------------------------------------------
// Embedding

Embedding::Embedding(ComplexMatrix m, Eigen::Index block_n, Kind k, double cap)
    : n(block_n), l(0), mat(std::move(m)), kind(k), cond_cap(cap) {
  if (n <= 0 || mat.rows() != mat.cols() || mat.rows() % n != 0)
    throw InvalidInput("Embedding: matrix must be square with dimension a multiple of n");
  if (!mat.allFinite()) throw InvalidInput("Embedding: non-finite entries");
  l = mat.rows() / n;
  if (kind == Kind::unitary) {
    const Eigen::Index dim = mat.rows();
    const double defect = op_norm(ComplexMatrix(mat.adjoint() * mat - ComplexMatrix::Identity(dim, dim)));
    if (defect > 1e-12) throw InvalidInput("Embedding: matrix tagged unitary is not unitary");
  }
}

Embedding Embedding::identity(Eigen::Index dim) {
  return Embedding(ComplexMatrix::Identity(dim, dim), dim, Kind::unitary);
}

MatrixTuple conjugate(const Embedding& s, const MatrixTuple& z) {
  if (z.n() != s.mat.rows())
    throw InvalidInput("conjugate: tuple dimension " + std::to_string(z.n()) +
                       " does not match embedding dimension " + std::to_string(s.mat.rows()));
  if (s.kind == Embedding::Kind::unitary) {
    const ComplexMatrix adj = s.mat.adjoint();
    return z.left_mul(adj).right_mul(s.mat);
  }
  const double cond = condition_number(s.mat);
  if (!(cond <= s.cond_cap))
    throw ConditioningError("conjugate: condition number " + std::to_string(cond) + " exceeds cap " +
                            std::to_string(s.cond_cap));
  const Eigen::PartialPivLU<ComplexMatrix> lu(s.mat);
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(z.d()));
  for (const auto& m : z.mats()) out.push_back(lu.solve(ComplexMatrix(m * s.mat)));
  return MatrixTuple(std::move(out));
}

// ---------------------------------------------------------------------------
// Random generation

ComplexMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::numbers::sqrt2 / 2.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

ComplexMatrix random_unitary(Eigen::Index n, std::uint64_t seed) {
  if (n <= 0) throw InvalidInput("random_unitary: n must be positive");
  const ComplexMatrix g = random_gaussian(n, n, seed);
  const Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex rjj = r(j, j);
    const double a = std::abs(rjj);
    if (a > 0.0) q.col(j) *= rjj / a;
  }
  return q;
}

ComplexMatrix random_invertible(Eigen::Index n, double cond_max, std::uint64_t seed) {
  if (!(cond_max > 1.0)) throw InvalidInput("random_invertible: cond_max must exceed 1");
  std::mt19937_64 rng(seed);
  const std::uint64_t su = rng();
  const std::uint64_t sv = rng();
  std::uniform_real_distribution<double> unif(0.0, std::log(cond_max));
  Eigen::VectorXd sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) sigma(i) = std::exp(unif(rng));
  return random_unitary(n, su) * sigma.cast<Complex>().asDiagonal() * random_unitary(n, sv).adjoint();
}

MatrixTuple random_tuple(int d, Eigen::Index n, double target_norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ComplexMatrix> mats;
  mats.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) mats.push_back(random_gaussian(n, n, rng()));
  MatrixTuple t(std::move(mats));
  const double norm = tuple_norm(t);
  return norm > 0.0 ? t * Complex(target_norm / norm) : t;
}

}  // namespace freecalc
