#pragma once

// Right Hilbert modules over multi-matrix algebras.
//
// A finitely generated module over (+) M_{n_i} is, up to isomorphism, a sum
// of column modules and is recorded by its multiplicity vector m: block i of
// an element is an m_i x n_i matrix, the right action is blockwise matrix
// multiplication and <x,y>_i = x_i^+ y_i.  Zero blocks are kept as 0 x n_i
// matrices so that indexing against the algebra stays stable.

#include "picmod/algebra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace picmod {

struct HilbertModule {
  MultiMatrixAlgebra algebra;
  std::vector<int> mults;

  HilbertModule() = default;
  HilbertModule(MultiMatrixAlgebra alg, std::vector<int> multiplicities)
      : algebra(std::move(alg)), mults(std::move(multiplicities)) {
    if (static_cast<int>(mults.size()) != algebra.blockCount())
      throw std::invalid_argument("HilbertModule: mult length must equal block count");
    for (int m : mults)
      if (m < 0) throw std::invalid_argument("HilbertModule: multiplicities must be >= 0");
  }

  /// Blocks the module actually sees.
  std::vector<int> support() const {
    std::vector<int> s;
    for (int i = 0; i < algebra.blockCount(); ++i)
      if (mults[i] >= 1) s.push_back(i);
    return s;
  }

  bool isZeroModule() const { return support().empty(); }

  /// Complex dimension, sum of m_i * n_i.
  int dim() const {
    int d = 0;
    for (int i = 0; i < algebra.blockCount(); ++i) d += mults[i] * algebra.blocks[i];
    return d;
  }

  bool operator==(const HilbertModule& o) const {
    return algebra == o.algebra && mults == o.mults;
  }
  bool operator!=(const HilbertModule& o) const { return !(*this == o); }

  std::string describe() const {
    std::string s = "n=" + algebra.describe() + " m=(";
    for (int i = 0; i < static_cast<int>(mults.size()); ++i)
      s += (i ? "," : "") + std::to_string(mults[i]);
    return s + ")";
  }
};

struct ModuleElement {
  HilbertModule owner;
  std::vector<CMat> entries;

  ModuleElement() = default;
  ModuleElement(HilbertModule mod, std::vector<CMat> blocks)
      : owner(std::move(mod)), entries(std::move(blocks)) {
    if (static_cast<int>(entries.size()) != owner.algebra.blockCount())
      throw std::invalid_argument("ModuleElement: block count mismatch");
    for (int i = 0; i < owner.algebra.blockCount(); ++i)
      if (entries[i].rows() != owner.mults[i] || entries[i].cols() != owner.algebra.blocks[i])
        throw std::invalid_argument("ModuleElement: block " + std::to_string(i + 1) +
                                    " has wrong shape");
  }

  static ModuleElement zero(const HilbertModule& mod) {
    std::vector<CMat> e;
    for (int i = 0; i < mod.algebra.blockCount(); ++i)
      e.push_back(CMat::Zero(mod.mults[i], mod.algebra.blocks[i]));
    return ModuleElement(mod, std::move(e));
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

  CVec coords() const {
    CVec v(owner.dim());
    Eigen::Index off = 0;
    for (const CMat& b : entries) {
      if (b.size() == 0) continue;
      v.segment(off, b.size()) = vecRowMajor(b);
      off += b.size();
    }
    return v;
  }

  static ModuleElement fromCoords(const HilbertModule& mod, const CVec& v) {
    if (v.size() != mod.dim()) throw std::invalid_argument("fromCoords: dimension mismatch");
    std::vector<CMat> e;
    Eigen::Index off = 0;
    for (int i = 0; i < mod.algebra.blockCount(); ++i) {
      const Eigen::Index rows = mod.mults[i], cols = mod.algebra.blocks[i];
      if (rows * cols == 0) {
        e.push_back(CMat::Zero(rows, cols));
        continue;
      }
      e.push_back(unvecRowMajor(v.segment(off, rows * cols), rows, cols));
      off += rows * cols;
    }
    return ModuleElement(mod, std::move(e));
  }
};

inline void requireSameOwner(const ModuleElement& a, const ModuleElement& b, const char* op) {
  if (a.owner != b.owner) throw std::invalid_argument(std::string(op) + ": owner mismatch");
}

inline ModuleElement add(const ModuleElement& a, const ModuleElement& b) {
  requireSameOwner(a, b, "add");
  std::vector<CMat> e;
  for (size_t i = 0; i < a.entries.size(); ++i) e.push_back(a.entries[i] + b.entries[i]);
  return ModuleElement(a.owner, std::move(e));
}

inline ModuleElement scale(Complex c, const ModuleElement& a) {
  std::vector<CMat> e;
  for (const CMat& b : a.entries) e.push_back(c * b);
  return ModuleElement(a.owner, std::move(e));
}

inline ModuleElement rightAction(const ModuleElement& x, const AlgebraElement& b) {
  if (x.owner.algebra != b.owner)
    throw std::invalid_argument("rightAction: algebra mismatch");
  std::vector<CMat> e;
  for (size_t i = 0; i < x.entries.size(); ++i) e.push_back(x.entries[i] * b.entries[i]);
  return ModuleElement(x.owner, std::move(e));
}

/// B-valued inner product, <x,y>_i = x_i^+ y_i.
inline AlgebraElement innerProduct(const ModuleElement& x, const ModuleElement& y) {
  requireSameOwner(x, y, "innerProduct");
  std::vector<CMat> e;
  for (size_t i = 0; i < x.entries.size(); ++i) e.push_back(x.entries[i].adjoint() * y.entries[i]);
  return AlgebraElement(x.owner.algebra, std::move(e));
}

inline bool approxEqual(const ModuleElement& a, const ModuleElement& b, double tol = kTol) {
  if (a.owner != b.owner) return false;
  for (size_t i = 0; i < a.entries.size(); ++i)
    if (!approxEqual(a.entries[i], b.entries[i], tol)) return false;
  return true;
}

/// Matrix-unit basis of the module, in coordinate order.
inline std::vector<ModuleElement> basisUnits(const HilbertModule& mod) {
  std::vector<ModuleElement> out;
  for (int i = 0; i < mod.algebra.blockCount(); ++i)
    for (int r = 0; r < mod.mults[i]; ++r)
      for (int c = 0; c < mod.algebra.blocks[i]; ++c) {
        ModuleElement e = ModuleElement::zero(mod);
        e.entries[i](r, c) = 1.0;
        out.push_back(std::move(e));
      }
  return out;
}

inline ModuleElement randomElement(const HilbertModule& mod, Rng& rng) {
  std::vector<CMat> e;
  for (int i = 0; i < mod.algebra.blockCount(); ++i)
    e.push_back(rng.gaussianMatrix(mod.mults[i], mod.algebra.blocks[i]));
  return ModuleElement(mod, std::move(e));
}

// ---------------------------------------------------------------------------
// Range ideal and module classification
// ---------------------------------------------------------------------------

/// The sub-algebra spanned by all inner products, together with the injection
/// of its block indices into those of the parent algebra.
struct RangeIdeal {
  MultiMatrixAlgebra algebra;      // blocks (n_i) for i in the support
  std::vector<int> parentBlock;    // parentBlock[s] = index in the parent algebra

  int blockCount() const { return static_cast<int>(parentBlock.size()); }

  /// Position of a parent block inside the ideal, if present.
  std::optional<int> positionOf(int parentIndex) const {
    for (int s = 0; s < blockCount(); ++s)
      if (parentBlock[s] == parentIndex) return s;
    return std::nullopt;
  }

  /// Restrict an element of the parent algebra to the ideal.
  AlgebraElement restrict(const AlgebraElement& b) const {
    std::vector<CMat> e;
    for (int p : parentBlock) e.push_back(b.entries[p]);
    return AlgebraElement(algebra, std::move(e));
  }

  /// Embed an ideal element into the parent, zero off the support.
  AlgebraElement embed(const AlgebraElement& b, const MultiMatrixAlgebra& parent) const {
    AlgebraElement out = AlgebraElement::zero(parent);
    for (int s = 0; s < blockCount(); ++s) out.entries[parentBlock[s]] = b.entries[s];
    return out;
  }
};

inline RangeIdeal rangeIdeal(const HilbertModule& mod) {
  RangeIdeal out;
  std::vector<int> blocks;
  for (int i : mod.support()) {
    blocks.push_back(mod.algebra.blocks[i]);
    out.parentBlock.push_back(i);
  }
  out.algebra.blocks = std::move(blocks);  // may legitimately be empty (zero module)
  return out;
}

inline bool isFull(const HilbertModule& mod) {
  return static_cast<int>(mod.support().size()) == mod.algebra.blockCount();
}

/// True iff the module contains x with <x,x> = 1, i.e. m_i >= n_i in every block.
inline bool hasUnitVector(const HilbertModule& mod) {
  for (int i = 0; i < mod.algebra.blockCount(); ++i)
    if (mod.mults[i] < mod.algebra.blocks[i]) return false;
  return true;
}

/// Isomorphism of modules over the same algebra is equality of multiplicity
/// vectors; the witnessing unitary is blockwise the identity.
inline bool modulesIsomorphic(const HilbertModule& e, const HilbertModule& f) {
  if (e.algebra != f.algebra) throw std::invalid_argument("modulesIsomorphic: algebra mismatch");
  return e.mults == f.mults;
}

// ---------------------------------------------------------------------------
// Adjointable operators
// ---------------------------------------------------------------------------

/// Adjointable (equivalently, bounded right-linear) operator on a module:
/// blockwise left multiplication by an m_i x m_i matrix.
struct AdjointableOperator {
  HilbertModule owner;
  std::vector<CMat> blocks;

  AdjointableOperator() = default;
  AdjointableOperator(HilbertModule mod, std::vector<CMat> blockMats)
      : owner(std::move(mod)), blocks(std::move(blockMats)) {
    if (static_cast<int>(blocks.size()) != owner.algebra.blockCount())
      throw std::invalid_argument("AdjointableOperator: block count mismatch");
    for (int i = 0; i < owner.algebra.blockCount(); ++i)
      if (blocks[i].rows() != owner.mults[i] || blocks[i].cols() != owner.mults[i])
        throw std::invalid_argument("AdjointableOperator: block " + std::to_string(i + 1) +
                                    " has wrong shape");
  }

  static AdjointableOperator identity(const HilbertModule& mod) {
    std::vector<CMat> b;
    for (int m : mod.mults) b.push_back(cIdentity(m));
    return AdjointableOperator(mod, std::move(b));
  }

  static AdjointableOperator zero(const HilbertModule& mod) {
    std::vector<CMat> b;
    for (int m : mod.mults) b.push_back(CMat::Zero(m, m));
    return AdjointableOperator(mod, std::move(b));
  }

  AdjointableOperator adjoint() const {
    std::vector<CMat> b;
    for (const CMat& a : blocks) b.push_back(a.adjoint());
    return AdjointableOperator(owner, std::move(b));
  }

  double norm() const {
    double m = 0;
    for (const CMat& b : blocks) m = std::max(m, svMax(b));
    return m;
  }
};

inline ModuleElement apply(const AdjointableOperator& a, const ModuleElement& x) {
  if (a.owner != x.owner) throw std::invalid_argument("apply: owner mismatch");
  std::vector<CMat> e;
  for (size_t i = 0; i < x.entries.size(); ++i) e.push_back(a.blocks[i] * x.entries[i]);
  return ModuleElement(x.owner, std::move(e));
}

inline AdjointableOperator compose(const AdjointableOperator& a, const AdjointableOperator& b) {
  if (a.owner != b.owner) throw std::invalid_argument("compose: owner mismatch");
  std::vector<CMat> e;
  for (size_t i = 0; i < a.blocks.size(); ++i) e.push_back(a.blocks[i] * b.blocks[i]);
  return AdjointableOperator(a.owner, std::move(e));
}

inline bool approxEqual(const AdjointableOperator& a, const AdjointableOperator& b,
                        double tol = kTol) {
  if (a.owner != b.owner) return false;
  for (size_t i = 0; i < a.blocks.size(); ++i)
    if (!approxEqual(a.blocks[i], b.blocks[i], tol)) return false;
  return true;
}

/// Rank-one operator x y*: z -> x <y, z>.
inline AdjointableOperator rankOne(const ModuleElement& x, const ModuleElement& y) {
  requireSameOwner(x, y, "rankOne");
  std::vector<CMat> b;
  for (size_t i = 0; i < x.entries.size(); ++i)
    b.push_back(x.entries[i] * y.entries[i].adjoint());
  return AdjointableOperator(x.owner, std::move(b));
}

inline bool isUnitary(const AdjointableOperator& a, double tol = kTol) {
  for (const CMat& b : a.blocks)
    if (!isUnitaryMatrix(b, tol)) return false;
  return true;
}

inline AdjointableOperator randomOperator(const HilbertModule& mod, Rng& rng) {
  std::vector<CMat> b;
  for (int m : mod.mults) b.push_back(rng.gaussianMatrix(m, m));
  return AdjointableOperator(mod, std::move(b));
}

inline AdjointableOperator randomUnitaryOperator(const HilbertModule& mod, Rng& rng) {
  std::vector<CMat> b;
  for (int m : mod.mults) b.push_back(rng.unitary(m));
  return AdjointableOperator(mod, std::move(b));
}

/// The algebra of adjointable operators B^a(E) = (+) M_{m_i} over the support,
/// with the index map back into the blocks of the base algebra.
struct OperatorAlgebra {
  MultiMatrixAlgebra algebra;    // blocks (m_i) for i in the support of E
  std::vector<int> parentBlock;  // module block index per operator-algebra block
  HilbertModule module;

  AlgebraElement toElement(const AdjointableOperator& a) const {
    std::vector<CMat> e;
    for (int p : parentBlock) e.push_back(a.blocks[p]);
    return AlgebraElement(algebra, std::move(e));
  }

  AdjointableOperator toOperator(const AlgebraElement& b) const {
    AdjointableOperator out = AdjointableOperator::zero(module);
    for (size_t s = 0; s < parentBlock.size(); ++s) out.blocks[parentBlock[s]] = b.entries[s];
    return out;
  }
};

inline OperatorAlgebra adjointableAlgebra(const HilbertModule& mod) {
  OperatorAlgebra out;
  std::vector<int> blocks;
  for (int i : mod.support()) {
    blocks.push_back(mod.mults[i]);
    out.parentBlock.push_back(i);
  }
  out.algebra.blocks = std::move(blocks);
  out.module = mod;
  return out;
}

}  // namespace picmod
