#pragma once

// Finite-dimensional C*-algebras as direct sums of full complex matrix
// algebras, their elements, and their automorphism group.
//
// An automorphism is a size-preserving permutation of the blocks followed
// by a unitary conjugation in each block; it is inner exactly when the
// permutation is trivial.  Because every algebra here is unital, the
// multiplier algebra coincides with the algebra itself and quasi-inner
// equals inner; that identification is hard-coded throughout.

#include "picmod/matrix.hpp"
#include "picmod/permutation.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace picmod {

/// Direct sum of full matrix algebras, given by its block sizes.
/// User-constructed algebras must have at least one block; the zero algebra
/// (no blocks) appears only as the range ideal of a zero module.
struct MultiMatrixAlgebra {
  std::vector<int> blocks;

  MultiMatrixAlgebra() = default;
  explicit MultiMatrixAlgebra(std::vector<int> blockSizes) : blocks(std::move(blockSizes)) {
    for (int n : blocks)
      if (n < 1) throw std::invalid_argument("MultiMatrixAlgebra: block sizes must be >= 1");
  }

  int blockCount() const { return static_cast<int>(blocks.size()); }

  /// Complex dimension, sum of n_i^2.
  int dim() const {
    int d = 0;
    for (int n : blocks) d += n * n;
    return d;
  }

  bool operator==(const MultiMatrixAlgebra& o) const { return blocks == o.blocks; }
  bool operator!=(const MultiMatrixAlgebra& o) const { return blocks != o.blocks; }

  std::string describe() const {
    std::string s = "(";
    for (int i = 0; i < blockCount(); ++i) s += (i ? "," : "") + std::to_string(blocks[i]);
    return s + ")";
  }
};

struct AlgebraElement {
  MultiMatrixAlgebra owner;
  std::vector<CMat> entries;

  AlgebraElement() = default;
  AlgebraElement(MultiMatrixAlgebra alg, std::vector<CMat> blocks)
      : owner(std::move(alg)), entries(std::move(blocks)) {
    if (static_cast<int>(entries.size()) != owner.blockCount())
      throw std::invalid_argument("AlgebraElement: block count mismatch");
    for (int i = 0; i < owner.blockCount(); ++i)
      if (entries[i].rows() != owner.blocks[i] || entries[i].cols() != owner.blocks[i])
        throw std::invalid_argument("AlgebraElement: block " + std::to_string(i + 1) +
                                    " has wrong shape");
  }

  static AlgebraElement zero(const MultiMatrixAlgebra& alg) {
    std::vector<CMat> e;
    for (int n : alg.blocks) e.push_back(CMat::Zero(n, n));
    return AlgebraElement(alg, std::move(e));
  }

  static AlgebraElement identity(const MultiMatrixAlgebra& alg) {
    std::vector<CMat> e;
    for (int n : alg.blocks) e.push_back(cIdentity(n));
    return AlgebraElement(alg, std::move(e));
  }

  double norm() const {
    double m = 0;
    for (const CMat& b : entries) m = std::max(m, svMax(b));
    return m;
  }

  bool approxZero(double tol = kTol) const {
    for (const CMat& b : entries)
      if (!picmod::approxZero(b, tol)) return false;
    return true;
  }

  /// Coordinates in the fixed basis (matrix units, blockwise row-major).
  CVec coords() const {
    CVec v(owner.dim());
    Eigen::Index off = 0;
    for (const CMat& b : entries) {
      v.segment(off, b.size()) = vecRowMajor(b);
      off += b.size();
    }
    return v;
  }
};

inline void requireSameOwner(const AlgebraElement& a, const AlgebraElement& b, const char* op) {
  if (a.owner != b.owner) throw std::invalid_argument(std::string(op) + ": owner mismatch");
}

inline AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
  requireSameOwner(a, b, "add");
  std::vector<CMat> e;
  for (size_t i = 0; i < a.entries.size(); ++i) e.push_back(a.entries[i] + b.entries[i]);
  return AlgebraElement(a.owner, std::move(e));
}

inline AlgebraElement scale(Complex c, const AlgebraElement& a) {
  std::vector<CMat> e;
  for (const CMat& b : a.entries) e.push_back(c * b);
  return AlgebraElement(a.owner, std::move(e));
}

/// Blockwise matrix product.
inline AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) {
  requireSameOwner(a, b, "multiply");
  std::vector<CMat> e;
  for (size_t i = 0; i < a.entries.size(); ++i) e.push_back(a.entries[i] * b.entries[i]);
  return AlgebraElement(a.owner, std::move(e));
}

inline AlgebraElement adjointOf(const AlgebraElement& a) {
  std::vector<CMat> e;
  for (const CMat& b : a.entries) e.push_back(b.adjoint());
  return AlgebraElement(a.owner, std::move(e));
}

inline bool approxEqual(const AlgebraElement& a, const AlgebraElement& b, double tol = kTol) {
  if (a.owner != b.owner) return false;
  for (size_t i = 0; i < a.entries.size(); ++i)
    if (!approxEqual(a.entries[i], b.entries[i], tol)) return false;
  return true;
}

/// Matrix-unit basis of the algebra, in coordinate order.
inline std::vector<AlgebraElement> basisUnits(const MultiMatrixAlgebra& alg) {
  std::vector<AlgebraElement> out;
  for (int i = 0; i < alg.blockCount(); ++i)
    for (int r = 0; r < alg.blocks[i]; ++r)
      for (int c = 0; c < alg.blocks[i]; ++c) {
        AlgebraElement e = AlgebraElement::zero(alg);
        e.entries[i](r, c) = 1.0;
        out.push_back(std::move(e));
      }
  return out;
}

/// Minimal central projection of block i.
inline AlgebraElement centralProjection(const MultiMatrixAlgebra& alg, int i) {
  AlgebraElement e = AlgebraElement::zero(alg);
  e.entries[i] = cIdentity(alg.blocks[i]);
  return e;
}

inline AlgebraElement randomElement(const MultiMatrixAlgebra& alg, Rng& rng) {
  std::vector<CMat> e;
  for (int n : alg.blocks) e.push_back(rng.gaussianMatrix(n, n));
  return AlgebraElement(alg, std::move(e));
}

inline AlgebraElement randomUnitaryElement(const MultiMatrixAlgebra& alg, Rng& rng) {
  std::vector<CMat> e;
  for (int n : alg.blocks) e.push_back(rng.unitary(n));
  return AlgebraElement(alg, std::move(e));
}

inline bool isUnitaryElement(const AlgebraElement& a, double tol = kTol) {
  for (const CMat& b : a.entries)
    if (!isUnitaryMatrix(b, tol)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

/// *-automorphism: phi(b)_{sigma(i)} = w_i b_i w_i^+.  The permutation maps
/// source block index to target block index and must preserve block sizes.
struct Automorphism {
  MultiMatrixAlgebra owner;
  Perm perm;
  std::vector<CMat> conj;  // w_i, one n_i x n_i unitary per source block

  Automorphism() = default;
  Automorphism(MultiMatrixAlgebra alg, Perm sigma, std::vector<CMat> conjugators)
      : owner(std::move(alg)), perm(std::move(sigma)), conj(std::move(conjugators)) {
    if (perm.size() != owner.blockCount())
      throw std::invalid_argument("Automorphism: perm size mismatch");
    if (static_cast<int>(conj.size()) != owner.blockCount())
      throw std::invalid_argument("Automorphism: conjugator count mismatch");
    for (int i = 0; i < owner.blockCount(); ++i) {
      if (owner.blocks[perm(i)] != owner.blocks[i])
        throw std::invalid_argument("Automorphism: perm does not preserve block sizes at block " +
                                    std::to_string(i + 1));
      if (conj[i].rows() != owner.blocks[i] || conj[i].cols() != owner.blocks[i])
        throw std::invalid_argument("Automorphism: conjugator " + std::to_string(i + 1) +
                                    " has wrong shape");
      if (!isUnitaryMatrix(conj[i], 1e-7))
        throw std::invalid_argument("Automorphism: conjugator " + std::to_string(i + 1) +
                                    " is not unitary");
    }
  }

  static Automorphism identity(const MultiMatrixAlgebra& alg) {
    std::vector<CMat> c;
    for (int n : alg.blocks) c.push_back(cIdentity(n));
    return Automorphism(alg, Perm::identity(alg.blockCount()), std::move(c));
  }

  /// Inner automorphism b -> v b v* for a unitary element v.
  static Automorphism innerBy(const AlgebraElement& v) {
    if (!isUnitaryElement(v, 1e-7))
      throw std::invalid_argument("Automorphism::innerBy: element is not unitary");
    return Automorphism(v.owner, Perm::identity(v.owner.blockCount()), v.entries);
  }

  bool isInner() const { return perm.isIdentity(); }
};

inline AlgebraElement applyAutomorphism(const Automorphism& phi, const AlgebraElement& b) {
  if (phi.owner != b.owner) throw std::invalid_argument("applyAutomorphism: owner mismatch");
  AlgebraElement out = AlgebraElement::zero(b.owner);
  for (int i = 0; i < b.owner.blockCount(); ++i)
    out.entries[phi.perm(i)] = phi.conj[i] * b.entries[i] * phi.conj[i].adjoint();
  return out;
}

/// Composite acting as outer(inner(b)).
inline Automorphism composeAut(const Automorphism& outer, const Automorphism& inner) {
  if (outer.owner != inner.owner) throw std::invalid_argument("composeAut: owner mismatch");
  std::vector<CMat> c(inner.owner.blockCount());
  for (int i = 0; i < inner.owner.blockCount(); ++i)
    c[i] = outer.conj[inner.perm(i)] * inner.conj[i];
  return Automorphism(inner.owner, compose(outer.perm, inner.perm), std::move(c));
}

inline Automorphism inverseAut(const Automorphism& phi) {
  const int k = phi.owner.blockCount();
  const Perm inv = phi.perm.inverse();
  std::vector<CMat> c(k);
  for (int j = 0; j < k; ++j) c[j] = phi.conj[inv(j)].adjoint();
  return Automorphism(phi.owner, inv, std::move(c));
}

inline bool isInner(const Automorphism& phi) { return phi.isInner(); }

/// Action equality on the matrix-unit basis.  Conjugators may differ by a
/// unimodular scalar per block; the permutations of equal automorphisms are
/// then forced to coincide.
inline bool sameAction(const Automorphism& a, const Automorphism& b, double tol = kTol) {
  if (a.owner != b.owner) return false;
  for (const AlgebraElement& e : basisUnits(a.owner))
    if (!approxEqual(applyAutomorphism(a, e), applyAutomorphism(b, e), tol)) return false;
  return true;
}

/// Rephase each conjugator so its first nonzero entry is real positive.
inline Automorphism canonicalizePhases(const Automorphism& phi) {
  std::vector<CMat> c = phi.conj;
  for (CMat& w : c) {
    Complex pivot = 0;
    for (Eigen::Index r = 0; r < w.rows() && pivot == Complex(0); ++r)
      for (Eigen::Index col = 0; col < w.cols(); ++col)
        if (std::abs(w(r, col)) > 1e-12) {
          pivot = w(r, col);
          break;
        }
    if (pivot != Complex(0)) w *= std::conj(pivot) / std::abs(pivot);
  }
  return Automorphism(phi.owner, phi.perm, std::move(c));
}

/// The block permutations that can underlie an automorphism: all sigma with
/// n o sigma = n.  These index the outer classes aut(B)/inn(B).
inline std::vector<Perm> enumerateOuterClasses(const MultiMatrixAlgebra& alg) {
  return permutationsPreserving(alg.blocks);
}

inline Automorphism randomAutomorphism(const MultiMatrixAlgebra& alg, Rng& rng) {
  const std::vector<Perm> perms = enumerateOuterClasses(alg);
  const Perm sigma = perms[rng.uniformInt(0, static_cast<int>(perms.size()) - 1)];
  std::vector<CMat> c;
  for (int n : alg.blocks) c.push_back(rng.unitary(n));
  return Automorphism(alg, sigma, std::move(c));
}

}  // namespace picmod
