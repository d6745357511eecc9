#pragma once

// Correspondences (bimodules) between multi-matrix algebras.
//
// A correspondence from B = (+) M_{n_i} to C = (+) M_{p_j} is recorded by a
// nonnegative integer multiplicity matrix mu: as a right C-module its block j
// has m_j = sum_i mu_{ij} n_i rows, grouped lexicographically by
// (source block i, copy index).  The canonical left action of b places b_i on
// the diagonal of every (i, copy) group; an optional per-target-block unitary
// twist conjugates that action.  Two correspondences with the same mu are
// always isomorphic, so mu is the complete isomorphism invariant; twists only
// matter for element-level identifications.
//
// Unital homomorphisms B -> C are the correspondences whose right
// multiplicities reproduce the target block sizes.  Morita equivalences are
// the correspondences whose mu is a permutation matrix; their classes under
// tensor form the Picard group, which is recomputed by enumeration rather
// than assumed.

#include "picmod/hilbert_module.hpp"

#include <array>
#include <optional>

namespace picmod {

struct RowGroup {
  int srcBlock;  // source block index i
  int copy;      // copy index within the target block, 0-based
  int offset;    // first row of the group
  int height;    // n_i rows
};

struct Correspondence {
  MultiMatrixAlgebra source;
  MultiMatrixAlgebra target;
  Eigen::MatrixXi mult;     // k x l
  std::vector<CMat> twist;  // per target block; empty means untwisted

  Correspondence() = default;
  Correspondence(MultiMatrixAlgebra src, MultiMatrixAlgebra tgt, Eigen::MatrixXi mu,
                 std::vector<CMat> tw = {})
      : source(std::move(src)), target(std::move(tgt)), mult(std::move(mu)),
        twist(std::move(tw)) {
    if (mult.rows() != source.blockCount() || mult.cols() != target.blockCount())
      throw std::invalid_argument("Correspondence: mult has wrong shape");
    if (mult.size() > 0 && mult.minCoeff() < 0)
      throw std::invalid_argument("Correspondence: mult entries must be >= 0");
    if (!twist.empty()) {
      if (static_cast<int>(twist.size()) != target.blockCount())
        throw std::invalid_argument("Correspondence: twist count mismatch");
      const std::vector<int> m = rightMults();
      for (int j = 0; j < target.blockCount(); ++j) {
        if (twist[j].rows() != m[j] || twist[j].cols() != m[j])
          throw std::invalid_argument("Correspondence: twist " + std::to_string(j + 1) +
                                      " has wrong shape");
        if (!isUnitaryMatrix(twist[j], 1e-7))
          throw std::invalid_argument("Correspondence: twist " + std::to_string(j + 1) +
                                      " is not unitary");
      }
    }
  }

  /// Right multiplicity over target block j: m_j = sum_i mu_{ij} n_i.
  std::vector<int> rightMults() const {
    std::vector<int> m(target.blockCount(), 0);
    for (int j = 0; j < target.blockCount(); ++j)
      for (int i = 0; i < source.blockCount(); ++i)
        m[j] += mult(i, j) * source.blocks[i];
    return m;
  }

  HilbertModule asModule() const { return HilbertModule(target, rightMults()); }

  std::vector<RowGroup> rowGroups(int j) const {
    std::vector<RowGroup> gs;
    int off = 0;
    for (int i = 0; i < source.blockCount(); ++i)
      for (int c = 0; c < mult(i, j); ++c) {
        gs.push_back({i, c, off, source.blocks[i]});
        off += source.blocks[i];
      }
    return gs;
  }

  bool hasTwist() const { return !twist.empty(); }

  CMat twistAt(int j) const {
    if (hasTwist()) return twist[j];
    return cIdentity(rightMults()[j]);
  }

  /// Left action of b in the canonical normal form of target block j.
  CMat leftActionBlock(const AlgebraElement& b, int j) const {
    const std::vector<int> m = rightMults();
    CMat diag = CMat::Zero(m[j], m[j]);
    for (const RowGroup& g : rowGroups(j))
      diag.block(g.offset, g.offset, g.height, g.height) = b.entries[g.srcBlock];
    if (!hasTwist()) return diag;
    return twist[j] * diag * twist[j].adjoint();
  }

  // --- homomorphism view --------------------------------------------------

  /// A correspondence encodes a unital homomorphism exactly when its right
  /// multiplicities reproduce the target block sizes.
  bool isHom() const { return rightMults() == target.blocks; }

  /// Injectivity of the encoded homomorphism: no source block is killed.
  bool isInjectiveHom() const {
    for (int i = 0; i < source.blockCount(); ++i) {
      bool hit = false;
      for (int j = 0; j < target.blockCount(); ++j)
        if (mult(i, j) > 0) hit = true;
      if (!hit) return false;
    }
    return true;
  }

  AlgebraElement applyHom(const AlgebraElement& b) const {
    if (!isHom()) throw std::invalid_argument("applyHom: correspondence is not a homomorphism");
    if (b.owner != source) throw std::invalid_argument("applyHom: owner mismatch");
    std::vector<CMat> e;
    for (int j = 0; j < target.blockCount(); ++j) e.push_back(leftActionBlock(b, j));
    return AlgebraElement(target, std::move(e));
  }

  /// Left inverse on the image: recovers b from phi(b) by reading the first
  /// copy of each source block.  Blocks without any copy come back zero, so
  /// this is a genuine inverse only where the homomorphism is injective.
  AlgebraElement leftInverseApply(const AlgebraElement& c) const {
    if (!isHom()) throw std::invalid_argument("leftInverseApply: not a homomorphism");
    if (c.owner != target) throw std::invalid_argument("leftInverseApply: owner mismatch");
    AlgebraElement out = AlgebraElement::zero(source);
    std::vector<char> found(source.blockCount(), 0);
    for (int j = 0; j < target.blockCount(); ++j) {
      const CMat untwisted = twistAt(j).adjoint() * c.entries[j] * twistAt(j);
      for (const RowGroup& g : rowGroups(j)) {
        if (found[g.srcBlock]) continue;
        out.entries[g.srcBlock] = untwisted.block(g.offset, g.offset, g.height, g.height);
        found[g.srcBlock] = 1;
      }
    }
    return out;
  }

  // --- canonical constructions ---------------------------------------------

  static Correspondence identityOver(const MultiMatrixAlgebra& alg) {
    Eigen::MatrixXi mu = Eigen::MatrixXi::Identity(alg.blockCount(), alg.blockCount());
    return Correspondence(alg, alg, mu);
  }

  /// The twisted module _phi B: mu is the permutation matrix of sigma and the
  /// twist on target block sigma(i) is the conjugator w_i.
  static Correspondence fromAutomorphismCorr(const Automorphism& phi) {
    const int k = phi.owner.blockCount();
    Eigen::MatrixXi mu = Eigen::MatrixXi::Zero(k, k);
    std::vector<CMat> tw(k);
    for (int i = 0; i < k; ++i) {
      mu(i, phi.perm(i)) = 1;
      tw[phi.perm(i)] = phi.conj[i];
    }
    return Correspondence(phi.owner, phi.owner, mu, std::move(tw));
  }

  /// Conjugate correspondence at the multiplicity level (mu transposed, taken
  /// in canonical normal form).
  Correspondence dual() const {
    return Correspondence(target, source, mult.transpose());
  }
};

inline ModuleElement leftAction(const Correspondence& corr, const AlgebraElement& b,
                                const ModuleElement& x) {
  if (b.owner != corr.source) throw std::invalid_argument("leftAction: source mismatch");
  if (x.owner != corr.asModule()) throw std::invalid_argument("leftAction: element mismatch");
  std::vector<CMat> e;
  for (int j = 0; j < corr.target.blockCount(); ++j)
    e.push_back(corr.leftActionBlock(b, j) * x.entries[j]);
  return ModuleElement(x.owner, std::move(e));
}

/// The unit of a homomorphism correspondence, i.e. 1_C inside _phi C.
inline ModuleElement homUnitElement(const Correspondence& corr) {
  if (!corr.isHom()) throw std::invalid_argument("homUnitElement: not a homomorphism");
  std::vector<CMat> e;
  for (int p : corr.target.blocks) e.push_back(cIdentity(p));
  return ModuleElement(corr.asModule(), std::move(e));
}

// ---------------------------------------------------------------------------
// Tensor product
// ---------------------------------------------------------------------------

/// Row permutation that aligns the nested layout of (M (x) N) with the
/// canonical (source block, copy) grouping.  newRowOf[r] gives the canonical
/// row of nested row r in target block `targetBlock` of the composite.
inline std::vector<int> compositionRowPerm(const Correspondence& m, const Correspondence& n,
                                           int targetBlock) {
  const Eigen::MatrixXi muR = m.mult * n.mult;
  const int kA = m.source.blockCount();

  // canonical offsets per (source block, composite copy)
  std::vector<int> groupBase(kA, 0);
  {
    int off = 0;
    for (int i = 0; i < kA; ++i) {
      groupBase[i] = off;
      off += muR(i, targetBlock) * m.source.blocks[i];
    }
  }

  const std::vector<int> mMults = m.rightMults();
  std::vector<int> copyCounter(kA, 0);
  int nestedRows = 0;
  for (const RowGroup& g : n.rowGroups(targetBlock)) nestedRows += mMults[g.srcBlock];

  std::vector<int> newRowOf(nestedRows);
  int nestedOff = 0;
  for (const RowGroup& outer : n.rowGroups(targetBlock)) {
    const int j = outer.srcBlock;  // middle-algebra block
    for (const RowGroup& inner : m.rowGroups(j)) {
      const int i = inner.srcBlock;
      const int canonOff = groupBase[i] + (copyCounter[i]++) * m.source.blocks[i];
      for (int r = 0; r < inner.height; ++r)
        newRowOf[nestedOff + inner.offset + r] = canonOff + r;
    }
    nestedOff += mMults[j];
  }
  return newRowOf;
}

/// Tensor product of correspondences; multiplicity matrices multiply and the
/// element-level layout is brought to the canonical normal form.
inline Correspondence tensor(const Correspondence& m, const Correspondence& n) {
  if (m.target != n.source) throw std::invalid_argument("tensor: inner algebras mismatch");
  Eigen::MatrixXi muR = m.mult * n.mult;

  // composite twist: reindexed block diagonal of M's twists
  std::vector<CMat> tw;
  bool nontrivial = false;
  const std::vector<int> mMults = m.rightMults();
  for (int l = 0; l < n.target.blockCount(); ++l) {
    const std::vector<int> perm = compositionRowPerm(m, n, l);
    const int rows = static_cast<int>(perm.size());
    CMat d = CMat::Zero(rows, rows);
    int off = 0;
    for (const RowGroup& outer : n.rowGroups(l)) {
      const int h = mMults[outer.srcBlock];
      d.block(off, off, h, h) = m.twistAt(outer.srcBlock);
      off += h;
    }
    CMat p = CMat::Zero(rows, rows);
    for (int r = 0; r < rows; ++r) p(perm[r], r) = 1.0;
    CMat t = p * d * p.transpose();
    if (!approxEqual(t, cIdentity(rows), 1e-12)) nontrivial = true;
    tw.push_back(std::move(t));
  }
  if (!nontrivial) tw.clear();
  return Correspondence(m.source, n.target, std::move(muR), std::move(tw));
}

/// Element-level tensor x (x) y into the canonical normal form of tensor(m, n).
inline ModuleElement tensorElem(const Correspondence& m, const ModuleElement& x,
                                const Correspondence& n, const ModuleElement& y) {
  if (x.owner != m.asModule()) throw std::invalid_argument("tensorElem: x owner mismatch");
  if (y.owner != n.asModule()) throw std::invalid_argument("tensorElem: y owner mismatch");
  const Correspondence result = tensor(m, n);
  ModuleElement out = ModuleElement::zero(result.asModule());
  const std::vector<int> mMults = m.rightMults();
  for (int l = 0; l < n.target.blockCount(); ++l) {
    const int pl = n.target.blocks[l];
    const CMat yl = n.twistAt(l).adjoint() * y.entries[l];
    const std::vector<int> perm = compositionRowPerm(m, n, l);
    CMat nested = CMat::Zero(static_cast<int>(perm.size()), pl);
    int off = 0;
    for (const RowGroup& outer : n.rowGroups(l)) {
      const int j = outer.srcBlock;
      nested.block(off, 0, mMults[j], pl) =
          x.entries[j] * yl.block(outer.offset, 0, outer.height, pl);
      off += mMults[j];
    }
    for (int r = 0; r < nested.rows(); ++r) out.entries[l].row(perm[r]) = nested.row(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Module extension E (x)_phi C
// ---------------------------------------------------------------------------

/// E (x) N for a right module E and a correspondence N out of its algebra.
/// Rows of target block l are grouped by (middle block j, copy), each group
/// of height m_j(E); this is already the canonical (source, copy) grouping.
inline HilbertModule extendModule(const HilbertModule& e, const Correspondence& n) {
  if (e.algebra != n.source) throw std::invalid_argument("extendModule: algebra mismatch");
  std::vector<int> m(n.target.blockCount(), 0);
  for (int l = 0; l < n.target.blockCount(); ++l)
    for (int j = 0; j < e.algebra.blockCount(); ++j) m[l] += e.mults[j] * n.mult(j, l);
  return HilbertModule(n.target, std::move(m));
}

inline ModuleElement extendElem(const HilbertModule& e, const ModuleElement& x,
                                const Correspondence& n, const ModuleElement& y) {
  if (x.owner != e) throw std::invalid_argument("extendElem: x owner mismatch");
  if (y.owner != n.asModule()) throw std::invalid_argument("extendElem: y owner mismatch");
  ModuleElement out = ModuleElement::zero(extendModule(e, n));
  for (int l = 0; l < n.target.blockCount(); ++l) {
    const int pl = n.target.blocks[l];
    const CMat yl = n.twistAt(l).adjoint() * y.entries[l];
    int off = 0;
    for (const RowGroup& outer : n.rowGroups(l)) {
      const int j = outer.srcBlock;
      out.entries[l].block(off, 0, e.mults[j], pl) =
          x.entries[j] * yl.block(outer.offset, 0, outer.height, pl);
      off += e.mults[j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Associativity reindexing
// ---------------------------------------------------------------------------
//
// The two bracketings of a triple tensor enumerate the composite copies of a
// source block in different lexicographic orders: ((x (x) y) (x) z) sorts the
// connecting paths by (last leg, middle leg), (x (x) (y (x) z)) by
// (middle leg, last leg).  The single fixed permutation between the two
// layouts is computed here from the multiplicity data alone; the element
// identities hold on the nose once it is applied.

namespace detail {

struct TensorPath {
  int copy1;  // copy index in the first leg
  int mid;    // middle block of the second leg
  int copy2;  // copy index in the second leg
  int last;   // middle block of the third leg
  int copy3;  // copy index in the third leg
};

/// Rows of ((. (x) M2) (x) M3) at `targetBlock` sorted into the layout of
/// (. (x) (M2 (x) M3)).  `heights[j]` is the row height contributed per path
/// through middle block j (module multiplicity or block size).
inline std::vector<int> chainReindexRows(const std::vector<int>& heights,
                                         const Eigen::MatrixXi& mu2, const Eigen::MatrixXi& mu3,
                                         int targetBlock) {
  std::vector<TensorPath> paths;
  for (int j = 0; j < mu2.rows(); ++j)
    for (int l = 0; l < mu2.cols(); ++l)
      for (int b = 0; b < mu2(j, l); ++b)
        for (int c = 0; c < mu3(l, targetBlock); ++c) paths.push_back({0, j, b, l, c});

  auto lhsKey = [](const TensorPath& p) {
    return std::array<int, 4>{p.last, p.copy3, p.mid, p.copy2};
  };
  auto rhsKey = [](const TensorPath& p) {
    return std::array<int, 4>{p.mid, p.last, p.copy3, p.copy2};
  };

  std::vector<int> order(paths.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> lhsRank(paths.size()), rhsRank(paths.size());
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return lhsKey(paths[a]) < lhsKey(paths[b]); });
  for (size_t r = 0; r < order.size(); ++r) lhsRank[order[r]] = static_cast<int>(r);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return rhsKey(paths[a]) < rhsKey(paths[b]); });
  for (size_t r = 0; r < order.size(); ++r) rhsRank[order[r]] = static_cast<int>(r);

  // offsets of each path's row run in the two layouts
  std::vector<int> lhsOffset(paths.size() + 1, 0), rhsOffset(paths.size() + 1, 0);
  {
    std::vector<int> byLhs(paths.size()), byRhs(paths.size());
    for (size_t t = 0; t < paths.size(); ++t) {
      byLhs[lhsRank[t]] = static_cast<int>(t);
      byRhs[rhsRank[t]] = static_cast<int>(t);
    }
    for (size_t r = 0; r < paths.size(); ++r) {
      lhsOffset[r + 1] = lhsOffset[r] + heights[paths[byLhs[r]].mid];
      rhsOffset[r + 1] = rhsOffset[r] + heights[paths[byRhs[r]].mid];
    }
  }

  int totalRows = lhsOffset[paths.size()];
  std::vector<int> newRowOf(totalRows);
  for (size_t t = 0; t < paths.size(); ++t) {
    const int h = heights[paths[t].mid];
    for (int r = 0; r < h; ++r)
      newRowOf[lhsOffset[lhsRank[t]] + r] = rhsOffset[rhsRank[t]] + r;
  }
  return newRowOf;
}

}  // namespace detail

/// Row permutation carrying block `targetBlock` of (E (x) M2) (x) M3 onto the
/// layout of E (x) (M2 (x) M3); newRowOf[r] is the destination row.
inline std::vector<int> extendAssocRowPerm(const HilbertModule& e, const Correspondence& m2,
                                           const Correspondence& m3, int targetBlock) {
  return detail::chainReindexRows(e.mults, m2.mult, m3.mult, targetBlock);
}

/// Same for a triple of correspondences: block `targetBlock` of
/// (M1 (x) M2) (x) M3 onto M1 (x) (M2 (x) M3).  Composite copies stay grouped
/// by the outermost source block in both layouts, so the permutation is
/// assembled source block by source block.
inline std::vector<int> tensorAssocRowPerm(const Correspondence& m1, const Correspondence& m2,
                                           const Correspondence& m3, int targetBlock) {
  std::vector<int> out;
  int lhsBase = 0, rhsBase = 0;
  for (int i = 0; i < m1.source.blockCount(); ++i) {
    // paths through source block i, each contributing n_i rows
    std::vector<detail::TensorPath> paths;
    for (int j = 0; j < m1.target.blockCount(); ++j)
      for (int a = 0; a < m1.mult(i, j); ++a)
        for (int l = 0; l < m2.target.blockCount(); ++l)
          for (int b = 0; b < m2.mult(j, l); ++b)
            for (int c = 0; c < m3.mult(l, targetBlock); ++c) paths.push_back({a, j, b, l, c});
    auto lhsKey = [](const detail::TensorPath& p) {
      return std::array<int, 5>{p.last, p.copy3, p.mid, p.copy2, p.copy1};
    };
    auto rhsKey = [](const detail::TensorPath& p) {
      return std::array<int, 5>{p.mid, p.last, p.copy3, p.copy2, p.copy1};
    };
    std::vector<int> order(paths.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> lhsRank(paths.size()), rhsRank(paths.size());
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return lhsKey(paths[a]) < lhsKey(paths[b]); });
    for (size_t r = 0; r < order.size(); ++r) lhsRank[order[r]] = static_cast<int>(r);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return rhsKey(paths[a]) < rhsKey(paths[b]); });
    for (size_t r = 0; r < order.size(); ++r) rhsRank[order[r]] = static_cast<int>(r);
    const int h = m1.source.blocks[i];
    out.resize(out.size() + paths.size() * h);
    for (size_t t = 0; t < paths.size(); ++t)
      for (int r = 0; r < h; ++r)
        out[lhsBase + lhsRank[t] * h + r] = rhsBase + rhsRank[t] * h + r;
    lhsBase += static_cast<int>(paths.size()) * h;
    rhsBase += static_cast<int>(paths.size()) * h;
  }
  return out;
}

/// Apply a row permutation to a module element blockwise, newRowOf per block.
inline ModuleElement reindexRows(const ModuleElement& x,
                                 const std::vector<std::vector<int>>& newRowOf) {
  ModuleElement out = ModuleElement::zero(x.owner);
  for (size_t j = 0; j < x.entries.size(); ++j) {
    for (int r = 0; r < x.entries[j].rows(); ++r)
      out.entries[j].row(newRowOf[j][r]) = x.entries[j].row(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Morita equivalences and the Picard group
// ---------------------------------------------------------------------------

inline bool isPermutationMatrix(const Eigen::MatrixXi& mu) {
  if (mu.rows() != mu.cols()) return false;
  for (int i = 0; i < mu.rows(); ++i) {
    int rowSum = 0, colSum = 0;
    for (int j = 0; j < mu.cols(); ++j) {
      if (mu(i, j) < 0 || mu(i, j) > 1) return false;
      rowSum += mu(i, j);
      colSum += mu(j, i);
    }
    if (rowSum != 1 || colSum != 1) return false;
  }
  return true;
}

inline Perm permOfMatrix(const Eigen::MatrixXi& mu) {
  std::vector<int> img(mu.rows());
  for (int i = 0; i < mu.rows(); ++i)
    for (int j = 0; j < mu.cols(); ++j)
      if (mu(i, j) == 1) img[i] = j;
  return Perm(std::move(img));
}

inline Eigen::MatrixXi permutationMatrix(const Perm& p) {
  Eigen::MatrixXi mu = Eigen::MatrixXi::Zero(p.size(), p.size());
  for (int i = 0; i < p.size(); ++i) mu(i, p(i)) = 1;
  return mu;
}

/// Numerical check that the left action is a bijection onto the compacts:
/// the rank of b -> (+)_j leftActionBlock(b, j) must equal both dim(source)
/// and sum m_j^2.
inline bool leftActionIsIsoOntoCompacts(const Correspondence& m) {
  const std::vector<int> rm = m.rightMults();
  int targetDim = 0;
  for (int mj : rm) targetDim += mj * mj;
  if (targetDim != m.source.dim()) return false;
  const std::vector<AlgebraElement> basis = basisUnits(m.source);
  if (basis.empty()) return targetDim == 0;
  CMat span(targetDim, static_cast<int>(basis.size()));
  for (size_t t = 0; t < basis.size(); ++t) {
    CVec v(targetDim);
    Eigen::Index off = 0;
    for (int j = 0; j < m.target.blockCount(); ++j) {
      const CMat blk = m.leftActionBlock(basis[t], j);
      if (blk.size() == 0) continue;
      v.segment(off, blk.size()) = vecRowMajor(blk);
      off += blk.size();
    }
    span.col(static_cast<int>(t)) = v;
  }
  return numericalRank(span) == targetDim;
}

/// Morita predicate: mu is a permutation matrix.  Cross-checked against the
/// definitional pair (right-fullness = no zero column; left action is an
/// isomorphism onto the compacts, tested numerically).
inline bool isMorita(const Correspondence& m) {
  const bool structural = isPermutationMatrix(m.mult);
  bool rightFull = true;
  for (int mj : m.rightMults())
    if (mj < 1) rightFull = false;
  const bool compacts = leftActionIsIsoOntoCompacts(m);
  if (structural != (rightFull && compacts))
    throw std::logic_error("isMorita: structural and analytical criteria disagree");
  return structural;
}

struct MoritaEquivalence {
  Correspondence corr;
  Perm perm;

  explicit MoritaEquivalence(Correspondence c) : corr(std::move(c)) {
    if (!isMorita(corr)) throw std::invalid_argument("MoritaEquivalence: not a Morita equivalence");
    perm = permOfMatrix(corr.mult);
  }
};

inline MoritaEquivalence fromAutomorphism(const Automorphism& phi) {
  return MoritaEquivalence(Correspondence::fromAutomorphismCorr(phi));
}

/// Reads the block permutation of a Morita correspondence off its elements by
/// acting with minimal central projections; used to pin direction conventions
/// empirically instead of by bookkeeping.
inline Perm empiricalMoritaPerm(const Correspondence& m) {
  const int k = m.source.blockCount();
  std::vector<int> img(k, -1);
  for (int i = 0; i < k; ++i) {
    const AlgebraElement e = centralProjection(m.source, i);
    for (int j = 0; j < m.target.blockCount(); ++j) {
      if (svMax(m.leftActionBlock(e, j)) > 0.5) {
        if (img[i] != -1) throw std::invalid_argument("empiricalMoritaPerm: action not supported on a single block");
        img[i] = j;
      }
    }
    if (img[i] == -1) throw std::invalid_argument("empiricalMoritaPerm: block acts as zero");
  }
  return Perm(std::move(img));
}

struct PicardElement {
  MultiMatrixAlgebra algebra;
  Perm perm;

  bool operator==(const PicardElement& o) const {
    return algebra == o.algebra && perm == o.perm;
  }
};

/// The Picard group of a multi-matrix algebra, materialized as the explicit
/// set of permutation classes found by enumeration.  The group law follows
/// left-to-right tensor order; the paper-side opposite composition is the
/// opProduct view.
struct PicardGroup {
  MultiMatrixAlgebra algebra;
  std::vector<PicardElement> elements;
  bool verifiedByEnumeration = false;

  int order() const { return static_cast<int>(elements.size()); }

  PicardElement identity() const { return {algebra, Perm::identity(algebra.blockCount())}; }

  /// Class of M_a (x) M_b.
  PicardElement product(const PicardElement& a, const PicardElement& b) const {
    return {algebra, compose(b.perm, a.perm)};
  }

  /// Opposite-group view: g * g' = g' g in tensor order.
  PicardElement opProduct(const PicardElement& a, const PicardElement& b) const {
    return product(b, a);
  }

  PicardElement inverseOf(const PicardElement& a) const { return {algebra, a.perm.inverse()}; }

  bool contains(const Perm& p) const {
    for (const PicardElement& e : elements)
      if (e.perm == p) return true;
    return false;
  }
};

/// Candidate column filter for the Picard enumeration: the left action on
/// target block j is surjective onto M_{m_j} iff the block-diagonal image
/// spans all of it.  Checked by a numerical rank computation.
inline bool columnActsFully(const MultiMatrixAlgebra& alg, const Eigen::VectorXi& col) {
  int mj = 0;
  for (int i = 0; i < alg.blockCount(); ++i) mj += col(i) * alg.blocks[i];
  if (mj < 1) return false;  // zero column: not right-full
  // image dimension of b -> blockdiag(copies of b_i)
  int imageDim = 0;
  for (int i = 0; i < alg.blockCount(); ++i)
    if (col(i) > 0) imageDim += alg.blocks[i] * alg.blocks[i];
  // numerical confirmation via the rank of the stacked vectorized actions
  CMat span(mj * mj, alg.dim());
  int t = 0;
  for (int i = 0; i < alg.blockCount(); ++i)
    for (int r = 0; r < alg.blocks[i]; ++r)
      for (int c = 0; c < alg.blocks[i]; ++c) {
        CMat blk = CMat::Zero(mj, mj);
        int off = 0;
        for (int ii = 0; ii < alg.blockCount(); ++ii)
          for (int cp = 0; cp < col(ii); ++cp) {
            if (ii == i) blk(off + r, off + c) = 1.0;
            off += alg.blocks[ii];
          }
        span.col(t++) = vecRowMajor(blk);
      }
  const int rank = static_cast<int>(numericalRank(span));
  if (rank != imageDim) throw std::logic_error("columnActsFully: rank sanity check failed");
  return rank == mj * mj;
}

/// Picard group by enumeration.  Candidate multiplicity matrices are built
/// column by column (the left action is block diagonal over target blocks, so
/// the surjectivity filter is per-column); entries are swept over {0,1,2} --
/// any entry beyond 1 or any second nonzero entry only widens the gap between
/// (sum mu n)^2 and the block-diagonal image dimension, so the sweep is
/// exhaustive in effect.  Survivors are assembled and filtered by the
/// remaining Morita conditions.
inline PicardGroup picardGroup(const MultiMatrixAlgebra& alg) {
  const int k = alg.blockCount();
  PicardGroup g;
  g.algebra = alg;
  if (k == 0) {
    // the zero algebra: Pic is trivial
    g.elements.push_back({alg, Perm::identity(0)});
    g.verifiedByEnumeration = true;
    return g;
  }
  if (k > 8) throw std::invalid_argument("picardGroup: enumeration supported for k <= 8");

  // stage 1: per-column survivors
  std::vector<Eigen::VectorXi> survivors;
  Eigen::VectorXi col = Eigen::VectorXi::Zero(k);
  const int maxEntry = 2;
  while (true) {
    if (columnActsFully(alg, col)) survivors.push_back(col);
    int d = 0;
    while (d < k && col(d) == maxEntry) col(d++) = 0;
    if (d == k) break;
    ++col(d);
  }

  // stage 2: assemble and apply the remaining definitional checks
  std::vector<Perm> found;
  std::vector<int> choice(k, 0);
  while (true) {
    Eigen::MatrixXi mu(k, k);
    for (int j = 0; j < k; ++j) mu.col(j) = survivors[choice[j]];
    bool noZeroRow = true;
    for (int i = 0; i < k && noZeroRow; ++i) {
      int s = 0;
      for (int j = 0; j < k; ++j) s += mu(i, j);
      if (s == 0) noZeroRow = false;
    }
    if (noZeroRow) {
      Correspondence cand(alg, alg, mu);
      if (isMorita(cand)) found.push_back(permOfMatrix(mu));
    }
    int d = 0;
    while (d < k && choice[d] == static_cast<int>(survivors.size()) - 1) choice[d++] = 0;
    if (d == k) break;
    ++choice[d];
  }

  std::sort(found.begin(), found.end());
  for (const Perm& p : found) g.elements.push_back({alg, p});
  g.verifiedByEnumeration = true;
  return g;
}

/// Image of aut(B)/gin(B) inside the Picard group: the classes of _phi B,
/// i.e. the size-preserving block permutations.
inline std::vector<PicardElement> autImageInPicard(const MultiMatrixAlgebra& alg) {
  std::vector<PicardElement> out;
  for (const Perm& p : enumerateOuterClasses(alg)) out.push_back({alg, p});
  return out;
}

}  // namespace picmod
