#pragma once

// Small dense complex-matrix helpers shared by every other header.
// Everything here is desk-scale: matrices rarely exceed ~50x50, so we
// lean on Eigen's dense decompositions without further ceremony.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace picmod {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kTol = 1e-9;        // algebraic identity checks
inline constexpr double kRankRelCutoff = 1e-7;  // singular values below 1e-7 * sv_max count as zero

inline CMat cIdentity(Eigen::Index n) { return CMat::Identity(n, n); }

inline CMat dagger(const CMat& a) { return a.adjoint(); }

/// Largest singular value; 0 for an empty matrix.
inline double svMax(const CMat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  return a.jacobiSvd().singularValues()(0);
}

inline double frobNorm(const CMat& a) { return a.norm(); }

inline bool approxZero(const CMat& a, double tol = kTol) {
  if (a.rows() == 0 || a.cols() == 0) return true;
  return a.cwiseAbs().maxCoeff() <= tol;
}

inline bool approxEqual(const CMat& a, const CMat& b, double tol = kTol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return approxZero(a - b, tol);
}

/// Numerical rank with the relative singular-value cutoff used everywhere
/// in this project (1e-7 times the largest singular value).
inline Eigen::Index numericalRank(const CMat& a, double relCutoff = kRankRelCutoff) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cutoff = relCutoff * sv(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

inline bool isUnitaryMatrix(const CMat& a, double tol = kTol) {
  if (a.rows() != a.cols()) return false;
  if (a.rows() == 0) return true;
  return approxZero(a.adjoint() * a - cIdentity(a.rows()), tol) &&
         approxZero(a * a.adjoint() - cIdentity(a.rows()), tol);
}

/// Moore-Penrose pseudoinverse via SVD with the shared rank cutoff.
inline CMat pseudoInverse(const CMat& a, double relCutoff = kRankRelCutoff) {
  if (a.rows() == 0 || a.cols() == 0) return CMat::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? relCutoff * sv(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// Row-major vectorization; the fixed coordinate convention of this library.
inline CVec vecRowMajor(const CMat& a) {
  CVec v(a.rows() * a.cols());
  Eigen::Index t = 0;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) v(t++) = a(r, c);
  return v;
}

inline CMat unvecRowMajor(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvecRowMajor: size mismatch");
  CMat a(rows, cols);
  Eigen::Index t = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = v(t++);
  return a;
}

/// Deterministic random source. Gaussian samples are produced by Box-Muller
/// over the raw 64-bit stream so that a seed yields the same instances on
/// every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    // 53-bit mantissa in [0,1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (haveSpare_) {
      haveSpare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    haveSpare_ = true;
    return r * std::cos(t);
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniformInt(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniformInt: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  std::uint64_t raw() { return engine_(); }

  Complex gaussianComplex() { return Complex(gaussian(), gaussian()); }

  CMat gaussianMatrix(Eigen::Index rows, Eigen::Index cols) {
    CMat a(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = gaussianComplex();
    return a;
  }

  /// Haar-ish unitary: QR of a Gaussian matrix with the R diagonal rephased.
  CMat unitary(Eigen::Index n) {
    if (n == 0) return CMat(0, 0);
    CMat g = gaussianMatrix(n, n);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex d = r(i, i);
      double ad = std::abs(d);
      q.col(i) *= (ad > 0) ? d / ad : Complex(1, 0);
    }
    return q;
  }

 private:
  std::mt19937_64 engine_;
  bool haveSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace picmod
