#pragma once

// Generalized module maps: phi-linearity, phi-isometries and phi-unitaries,
// the canonical map into the extension, the factorization of phi-linear maps
// through it, phi-adjoints, linking-algebra homomorphisms, and constructive
// existence of phi-unitaries with witnesses or counterexample certificates.
//
// Maps are carried as raw complex matrices acting on module coordinates in
// the fixed matrix-unit basis (blockwise, row-major), so every "is phi-..."
// claim is a finite linear-algebra check.  Homomorphisms between the base
// algebras travel as correspondences (see correspondence.hpp); automorphisms
// convert via Correspondence::fromAutomorphismCorr.

#include "picmod/correspondence.hpp"

namespace picmod {

// ---------------------------------------------------------------------------
// Raw maps
// ---------------------------------------------------------------------------

struct RawModuleMap {
  HilbertModule domain;
  HilbertModule codomain;
  CMat matrix;  // codomain.dim() x domain.dim()

  RawModuleMap() = default;
  RawModuleMap(HilbertModule dom, HilbertModule cod, CMat m)
      : domain(std::move(dom)), codomain(std::move(cod)), matrix(std::move(m)) {
    if (matrix.rows() != codomain.dim() || matrix.cols() != domain.dim())
      throw std::invalid_argument("RawModuleMap: matrix shape mismatch");
  }

  static RawModuleMap identityOn(const HilbertModule& e) {
    return RawModuleMap(e, e, CMat::Identity(e.dim(), e.dim()));
  }

  static RawModuleMap zeroMap(const HilbertModule& dom, const HilbertModule& cod) {
    return RawModuleMap(dom, cod, CMat::Zero(cod.dim(), dom.dim()));
  }

  static RawModuleMap fromOperator(const AdjointableOperator& a) {
    RawModuleMap out = zeroMap(a.owner, a.owner);
    const std::vector<ModuleElement> basis = basisUnits(a.owner);
    for (size_t t = 0; t < basis.size(); ++t)
      out.matrix.col(static_cast<Eigen::Index>(t)) = picmod::apply(a, basis[t]).coords();
    return out;
  }

  ModuleElement apply(const ModuleElement& x) const {
    if (x.owner != domain) throw std::invalid_argument("RawModuleMap::apply: owner mismatch");
    return ModuleElement::fromCoords(codomain, matrix * x.coords());
  }

  Eigen::Index rank() const { return numericalRank(matrix); }
};

inline RawModuleMap compose(const RawModuleMap& a, const RawModuleMap& b) {
  if (b.codomain != a.domain) throw std::invalid_argument("compose: domain mismatch");
  return RawModuleMap(b.domain, a.codomain, a.matrix * b.matrix);
}

inline RawModuleMap subtract(const RawModuleMap& a, const RawModuleMap& b) {
  if (a.domain != b.domain || a.codomain != b.codomain)
    throw std::invalid_argument("subtract: shape mismatch");
  return RawModuleMap(a.domain, a.codomain, a.matrix - b.matrix);
}

/// Rigorous upper bound for the module operator norm of a raw map:
/// ||Tx|| <= sv_max(M) ||x||_F and ||x||_F^2 <= (sum_i min(m_i,n_i)) ||x||^2.
inline double moduleOpNormUpperBound(const RawModuleMap& t) {
  int s = 0;
  for (int i = 0; i < t.domain.algebra.blockCount(); ++i)
    s += std::min(t.domain.mults[i], t.domain.algebra.blocks[i]);
  return svMax(t.matrix) * std::sqrt(static_cast<double>(std::max(s, 1)));
}

/// Module operator norm sup{||Tx|| : ||x|| <= 1} by alternating maximization
/// over the product of per-block spectral balls, with deterministic restarts.
/// Converges to the exact value at these dimensions; used where a lower
/// bound must be tight (norm equalities), with the upper bound above as the
/// conservative companion.
inline double moduleOpNormEstimate(const RawModuleMap& t, int starts = 8, int iters = 60) {
  if (t.domain.dim() == 0 || t.codomain.dim() == 0) return 0.0;
  Rng rng(0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(t.domain.dim() * 131 + t.codomain.dim()));
  double best = 0.0;
  for (int s = 0; s < starts; ++s) {
    ModuleElement x = randomElement(t.domain, rng);
    // normalize blockwise to the unit ball boundary
    for (CMat& b : x.entries) {
      const double sv = svMax(b);
      if (sv > 0) b /= sv;
    }
    double prev = -1.0;
    for (int it = 0; it < iters; ++it) {
      const ModuleElement y = t.apply(x);
      double val = 0;
      int lStar = 0;
      for (int l = 0; l < t.codomain.algebra.blockCount(); ++l) {
        const double sv = svMax(y.entries[l]);
        if (sv > val) {
          val = sv;
          lStar = l;
        }
      }
      best = std::max(best, val);
      if (val <= prev + 1e-13) break;
      prev = val;
      if (y.entries[lStar].size() == 0) break;
      Eigen::JacobiSVD<CMat> svd(y.entries[lStar], Eigen::ComputeThinU | Eigen::ComputeThinV);
      const CVec u = svd.matrixU().col(0);
      const CVec v = svd.matrixV().col(0);
      // Riesz vector of x -> Re u^+ (Tx)_l v, pulled back through the matrix
      ModuleElement w = ModuleElement::zero(t.codomain);
      w.entries[lStar] = u * v.adjoint();
      const CVec lambda = t.matrix.adjoint() * w.coords();
      ModuleElement grad = ModuleElement::fromCoords(t.domain, lambda);
      // per-block maximizer of Re tr(grad_i^+ x_i) over sv(x_i) <= 1
      for (size_t i = 0; i < grad.entries.size(); ++i) {
        CMat& g = grad.entries[i];
        if (g.size() == 0) continue;
        if (svMax(g) < 1e-300) continue;
        Eigen::JacobiSVD<CMat> gs(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
        x.entries[i] = gs.matrixU() * gs.matrixV().adjoint();
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Generalized unitaries
// ---------------------------------------------------------------------------

/// A phi-unitary in closed form: (u x)_{sigma(i)} = W_i x_i w_i^+, where phi
/// has permutation sigma and conjugators w_i.  Requires m_{sigma(i)} = m_i.
struct GeneralizedUnitary {
  HilbertModule module;
  Automorphism phi;
  std::vector<CMat> blockUnitaries;  // W_i, m_i x m_i (0 x 0 off the support)

  GeneralizedUnitary() = default;
  GeneralizedUnitary(HilbertModule mod, Automorphism aut, std::vector<CMat> w)
      : module(std::move(mod)), phi(std::move(aut)), blockUnitaries(std::move(w)) {
    if (phi.owner != module.algebra)
      throw std::invalid_argument("GeneralizedUnitary: algebra mismatch");
    if (static_cast<int>(blockUnitaries.size()) != module.algebra.blockCount())
      throw std::invalid_argument("GeneralizedUnitary: block unitary count mismatch");
    for (int i = 0; i < module.algebra.blockCount(); ++i) {
      if (module.mults[phi.perm(i)] != module.mults[i])
        throw std::invalid_argument("GeneralizedUnitary: multiplicity mismatch at block " +
                                    std::to_string(i + 1));
      if (blockUnitaries[i].rows() != module.mults[i] ||
          blockUnitaries[i].cols() != module.mults[i])
        throw std::invalid_argument("GeneralizedUnitary: W_" + std::to_string(i + 1) +
                                    " has wrong shape");
      if (!isUnitaryMatrix(blockUnitaries[i], 1e-7))
        throw std::invalid_argument("GeneralizedUnitary: W_" + std::to_string(i + 1) +
                                    " is not unitary");
    }
  }

  static GeneralizedUnitary identityOn(const HilbertModule& mod) {
    std::vector<CMat> w;
    for (int m : mod.mults) w.push_back(cIdentity(m));
    return GeneralizedUnitary(mod, Automorphism::identity(mod.algebra), std::move(w));
  }

  ModuleElement apply(const ModuleElement& x) const {
    if (x.owner != module) throw std::invalid_argument("GeneralizedUnitary: owner mismatch");
    ModuleElement out = ModuleElement::zero(module);
    for (int i = 0; i < module.algebra.blockCount(); ++i)
      out.entries[phi.perm(i)] = blockUnitaries[i] * x.entries[i] * phi.conj[i].adjoint();
    return out;
  }

  RawModuleMap toRaw() const {
    RawModuleMap out = RawModuleMap::zeroMap(module, module);
    const std::vector<ModuleElement> basis = basisUnits(module);
    for (size_t t = 0; t < basis.size(); ++t)
      out.matrix.col(static_cast<Eigen::Index>(t)) = apply(basis[t]).coords();
    return out;
  }
};

/// u1 after u2; the underlying automorphisms compose the same way.
inline GeneralizedUnitary composeGU(const GeneralizedUnitary& u1, const GeneralizedUnitary& u2) {
  if (u1.module != u2.module) throw std::invalid_argument("composeGU: module mismatch");
  std::vector<CMat> w(u1.module.algebra.blockCount());
  for (int i = 0; i < u1.module.algebra.blockCount(); ++i)
    w[i] = u1.blockUnitaries[u2.phi.perm(i)] * u2.blockUnitaries[i];
  return GeneralizedUnitary(u1.module, composeAut(u1.phi, u2.phi), std::move(w));
}

inline GeneralizedUnitary inverseGU(const GeneralizedUnitary& u) {
  const Perm inv = u.phi.perm.inverse();
  std::vector<CMat> w(u.module.algebra.blockCount());
  for (int j = 0; j < u.module.algebra.blockCount(); ++j)
    w[j] = u.blockUnitaries[inv(j)].adjoint();
  return GeneralizedUnitary(u.module, inverseAut(u.phi), std::move(w));
}

/// Ordinary unitary v composed after the generalized unitary u.
inline GeneralizedUnitary composeWithUnitary(const AdjointableOperator& v,
                                             const GeneralizedUnitary& u) {
  if (v.owner != u.module) throw std::invalid_argument("composeWithUnitary: module mismatch");
  std::vector<CMat> w(u.module.algebra.blockCount());
  for (int i = 0; i < u.module.algebra.blockCount(); ++i)
    w[i] = v.blocks[u.phi.perm(i)] * u.blockUnitaries[i];
  return GeneralizedUnitary(u.module, u.phi, std::move(w));
}

// ---------------------------------------------------------------------------
// The defining predicates
// ---------------------------------------------------------------------------

/// Residual of a(x b) = (a x) phi(b) over the basis of E and of B.
inline double phiLinearResidual(const RawModuleMap& a, const Correspondence& hom) {
  if (!hom.isHom()) throw std::invalid_argument("phiLinearResidual: not a homomorphism");
  if (a.domain.algebra != hom.source || a.codomain.algebra != hom.target)
    throw std::invalid_argument("phiLinearResidual: algebra mismatch");
  double resid = 0;
  for (const ModuleElement& e : basisUnits(a.domain)) {
    const ModuleElement ae = a.apply(e);
    for (const AlgebraElement& b : basisUnits(a.domain.algebra)) {
      const ModuleElement lhs = a.apply(rightAction(e, b));
      const ModuleElement rhs = rightAction(ae, hom.applyHom(b));
      for (size_t l = 0; l < lhs.entries.size(); ++l)
        resid = std::max(resid, svMax(lhs.entries[l] - rhs.entries[l]));
    }
  }
  return resid;
}

inline bool checkPhiLinear(const RawModuleMap& a, const Correspondence& hom, double tol = kTol) {
  return phiLinearResidual(a, hom) <= tol;
}

/// Residual of <a x, a y> = phi(<x, y>) over basis pairs.
inline double phiIsometryResidual(const RawModuleMap& a, const Correspondence& hom) {
  if (!hom.isHom()) throw std::invalid_argument("phiIsometryResidual: not a homomorphism");
  if (a.domain.algebra != hom.source || a.codomain.algebra != hom.target)
    throw std::invalid_argument("phiIsometryResidual: algebra mismatch");
  double resid = 0;
  const std::vector<ModuleElement> basis = basisUnits(a.domain);
  std::vector<ModuleElement> images;
  images.reserve(basis.size());
  for (const ModuleElement& e : basis) images.push_back(a.apply(e));
  for (size_t r = 0; r < basis.size(); ++r)
    for (size_t s = 0; s < basis.size(); ++s) {
      const AlgebraElement lhs = innerProduct(images[r], images[s]);
      const AlgebraElement rhs = hom.applyHom(innerProduct(basis[r], basis[s]));
      resid = std::max(resid, add(lhs, scale(-1.0, rhs)).norm());
    }
  return resid;
}

inline bool checkPhiIsometry(const RawModuleMap& a, const Correspondence& hom, double tol = kTol) {
  return phiIsometryResidual(a, hom) <= tol;
}

inline bool checkPhiUnitary(const RawModuleMap& a, const Correspondence& hom, double tol = kTol) {
  if (!checkPhiIsometry(a, hom, tol)) return false;
  return a.rank() == a.codomain.dim();
}

inline bool checkPhiLinear(const RawModuleMap& a, const Automorphism& phi, double tol = kTol) {
  return checkPhiLinear(a, Correspondence::fromAutomorphismCorr(phi), tol);
}
inline bool checkPhiIsometry(const RawModuleMap& a, const Automorphism& phi, double tol = kTol) {
  return checkPhiIsometry(a, Correspondence::fromAutomorphismCorr(phi), tol);
}
inline bool checkPhiUnitary(const RawModuleMap& a, const Automorphism& phi, double tol = kTol) {
  return checkPhiUnitary(a, Correspondence::fromAutomorphismCorr(phi), tol);
}

// ---------------------------------------------------------------------------
// Canonical map and factorization
// ---------------------------------------------------------------------------

/// i_phi : E -> E (x)_phi C, x -> x (x) 1.
inline RawModuleMap canonicalMap(const HilbertModule& e, const Correspondence& hom) {
  if (!hom.isHom()) throw std::invalid_argument("canonicalMap: not a homomorphism");
  if (e.algebra != hom.source) throw std::invalid_argument("canonicalMap: algebra mismatch");
  const HilbertModule ext = extendModule(e, hom);
  RawModuleMap out = RawModuleMap::zeroMap(e, ext);
  const ModuleElement unit = homUnitElement(hom);
  const std::vector<ModuleElement> basis = basisUnits(e);
  for (size_t t = 0; t < basis.size(); ++t)
    out.matrix.col(static_cast<Eigen::Index>(t)) = extendElem(e, basis[t], hom, unit).coords();
  return out;
}

struct CanonicalMapProperties {
  bool injective = false;
  bool surjective = false;
};

/// Injectivity and surjectivity of i_phi, each computed along two independent
/// routes (matrix rank vs. the structural criterion) which must agree:
/// injective iff phi restricted to the range ideal is injective, surjective
/// iff phi(B_E) is a right ideal in C (tested numerically on spans).
inline CanonicalMapProperties canonicalMapProperties(const HilbertModule& e,
                                                     const Correspondence& hom) {
  const RawModuleMap iphi = canonicalMap(e, hom);

  const bool injByRank = iphi.rank() == e.dim();
  bool injByCriterion = true;
  for (int i : e.support()) {
    bool hit = false;
    for (int j = 0; j < hom.target.blockCount(); ++j)
      if (hom.mult(i, j) > 0) hit = true;
    if (!hit) injByCriterion = false;
  }
  if (injByRank != injByCriterion)
    throw std::logic_error("canonicalMapProperties: injectivity routes disagree");

  const bool surByRank = iphi.rank() == iphi.codomain.dim();

  // phi(B_E) right ideal in C, on vectorized spans
  bool surByIdeal = true;
  {
    const RangeIdeal be = rangeIdeal(e);
    std::vector<AlgebraElement> gens;
    for (const AlgebraElement& b : basisUnits(be.algebra))
      gens.push_back(hom.applyHom(be.embed(b, e.algebra)));
    if (!gens.empty()) {
      CMat span(hom.target.dim(), static_cast<int>(gens.size()));
      for (size_t t = 0; t < gens.size(); ++t) span.col(static_cast<int>(t)) = gens[t].coords();
      Eigen::JacobiSVD<CMat> svd(span, Eigen::ComputeThinU);
      const Eigen::Index r = numericalRank(span);
      const CMat q = svd.matrixU().leftCols(r);
      for (const AlgebraElement& g : gens) {
        for (const AlgebraElement& c : basisUnits(hom.target)) {
          const CVec w = multiply(g, c).coords();
          const double nrm = w.norm();
          if (nrm < 1e-12) continue;
          if ((w - q * (q.adjoint() * w)).norm() > 1e-7 * nrm) surByIdeal = false;
        }
        if (!surByIdeal) break;
      }
    }
  }
  if (surByRank != surByIdeal)
    throw std::logic_error("canonicalMapProperties: surjectivity routes disagree");

  return {injByRank, surByRank};
}

/// Blockwise form of a right-linear (adjointable) map between modules over
/// the same algebra: left multiplication by A_l in each block.  Returns the
/// blocks and the extraction residual.
struct BlockwiseForm {
  std::vector<CMat> blocks;
  double residual = 0;
};

inline BlockwiseForm rightLinearBlockForm(const RawModuleMap& t) {
  if (t.domain.algebra != t.codomain.algebra)
    throw std::invalid_argument("rightLinearBlockForm: algebra mismatch");
  BlockwiseForm out;
  const int k = t.domain.algebra.blockCount();
  for (int l = 0; l < k; ++l) {
    CMat a(t.codomain.mults[l], t.domain.mults[l]);
    for (int r = 0; r < t.domain.mults[l]; ++r) {
      if (t.domain.algebra.blocks[l] == 0) continue;
      ModuleElement e = ModuleElement::zero(t.domain);
      e.entries[l](r, 0) = 1.0;
      a.col(r) = t.apply(e).entries[l].col(0);
    }
    out.blocks.push_back(std::move(a));
  }
  // residual of the extracted form against the raw action
  for (const ModuleElement& e : basisUnits(t.domain)) {
    const ModuleElement y = t.apply(e);
    for (int l = 0; l < k; ++l)
      out.residual = std::max(out.residual, svMax(y.entries[l] - out.blocks[l] * e.entries[l]));
  }
  return out;
}

/// Factorization a = a' o i_phi of a phi-linear map: a'(x (x) c) = (a x) c.
/// a' is right-linear over the target algebra, so it is recovered blockwise
/// by least squares over the spanning tensors; elementary tensors span the
/// extension, which pins a' uniquely.
inline RawModuleMap factorize(const RawModuleMap& a, const Correspondence& hom,
                              double tol = kTol) {
  if (!checkPhiLinear(a, hom, tol))
    throw std::invalid_argument("factorize: map is not phi-linear for the given homomorphism");
  const HilbertModule e = a.domain;
  const HilbertModule ext = extendModule(e, hom);
  const HilbertModule f = a.codomain;

  std::vector<CMat> blocks;
  const std::vector<ModuleElement> eBasis = basisUnits(e);
  for (int l = 0; l < hom.target.blockCount(); ++l) {
    const int pl = hom.target.blocks[l];
    std::vector<CMat> zs, ws;
    for (const ModuleElement& x : eBasis) {
      const ModuleElement ax = a.apply(x);
      for (int r = 0; r < pl; ++r)
        for (int c = 0; c < pl; ++c) {
          ModuleElement cu = ModuleElement::zero(hom.asModule());
          cu.entries[l](r, c) = 1.0;
          zs.push_back(extendElem(e, x, hom, cu).entries[l]);
          CMat unit = CMat::Zero(pl, pl);
          unit(r, c) = 1.0;
          ws.push_back(ax.entries[l] * unit);
        }
    }
    const int ml = ext.mults[l], fl = f.mults[l];
    CMat zcat(ml, static_cast<int>(zs.size()) * pl), wcat(fl, static_cast<int>(ws.size()) * pl);
    for (size_t t = 0; t < zs.size(); ++t) {
      zcat.middleCols(static_cast<int>(t) * pl, pl) = zs[t];
      wcat.middleCols(static_cast<int>(t) * pl, pl) = ws[t];
    }
    blocks.push_back(zs.empty() ? CMat::Zero(fl, ml) : CMat(wcat * pseudoInverse(zcat)));
  }

  RawModuleMap out = RawModuleMap::zeroMap(ext, f);
  const std::vector<ModuleElement> extBasis = basisUnits(ext);
  for (size_t t = 0; t < extBasis.size(); ++t) {
    ModuleElement y = ModuleElement::zero(f);
    for (int l = 0; l < hom.target.blockCount(); ++l)
      y.entries[l] = blocks[l] * extBasis[t].entries[l];
    out.matrix.col(static_cast<Eigen::Index>(t)) = y.coords();
  }
  return out;
}

// ---------------------------------------------------------------------------
// phi-adjoints and complemented ranges
// ---------------------------------------------------------------------------

/// The phi-adjoint a* with <a x, y> = phi(<x, a* y>), solved by applying the
/// left inverse of phi and reconstructing elements from inner products
/// against the basis.  Throws if phi is not injective on the range ideal or
/// if the defining relation cannot be satisfied.
inline RawModuleMap phiAdjoint(const RawModuleMap& a, const Correspondence& hom,
                               double tol = kTol) {
  if (!hom.isHom()) throw std::invalid_argument("phiAdjoint: not a homomorphism");
  const HilbertModule e = a.domain, f = a.codomain;
  for (int i : e.support()) {
    bool hit = false;
    for (int j = 0; j < hom.target.blockCount(); ++j)
      if (hom.mult(i, j) > 0) hit = true;
    if (!hit)
      throw std::domain_error("phiAdjoint: phi is not injective on the range ideal (block " +
                              std::to_string(i + 1) + " is killed)");
  }

  RawModuleMap out = RawModuleMap::zeroMap(f, e);
  const std::vector<ModuleElement> fBasis = basisUnits(f);
  for (size_t t = 0; t < fBasis.size(); ++t) {
    ModuleElement z = ModuleElement::zero(e);
    for (int i : e.support()) {
      for (int alpha = 0; alpha < e.mults[i]; ++alpha) {
        ModuleElement unit = ModuleElement::zero(e);
        unit.entries[i](alpha, 0) = 1.0;
        const AlgebraElement g =
            hom.leftInverseApply(innerProduct(a.apply(unit), fBasis[t]));
        z.entries[i].row(alpha) = g.entries[i].row(0);
      }
    }
    out.matrix.col(static_cast<Eigen::Index>(t)) = z.coords();
  }

  // verify the defining relation on all basis pairs
  double resid = 0;
  for (const ModuleElement& x : basisUnits(e)) {
    const ModuleElement ax = a.apply(x);
    for (size_t t = 0; t < fBasis.size(); ++t) {
      const AlgebraElement lhs = innerProduct(ax, fBasis[t]);
      const AlgebraElement rhs = hom.applyHom(innerProduct(x, out.apply(fBasis[t])));
      resid = std::max(resid, add(lhs, scale(-1.0, rhs)).norm());
    }
  }
  if (resid > tol)
    throw std::domain_error("phiAdjoint: defining relation inconsistent (residual " +
                            std::to_string(resid) + "); map has no phi-adjoint");
  return out;
}

/// Range projection p = v v* of an adjointable phi-isometry, as an ordinary
/// adjointable operator on the codomain.
inline AdjointableOperator complementedRange(const RawModuleMap& v, const Correspondence& hom,
                                             double tol = kTol) {
  if (!checkPhiIsometry(v, hom, tol))
    throw std::invalid_argument("complementedRange: map is not a phi-isometry");
  const RawModuleMap vstar = phiAdjoint(v, hom, tol);
  const RawModuleMap praw = compose(v, vstar);
  const BlockwiseForm form = rightLinearBlockForm(praw);
  if (form.residual > tol)
    throw std::logic_error("complementedRange: projection is not blockwise");
  AdjointableOperator p(v.codomain, form.blocks);
  // p^2 = p = p*, range p = range v
  for (size_t l = 0; l < p.blocks.size(); ++l) {
    if (!approxEqual(p.blocks[l] * p.blocks[l], p.blocks[l], tol) ||
        !approxEqual(CMat(p.blocks[l].adjoint()), p.blocks[l], tol))
      throw std::logic_error("complementedRange: vv* is not a projection");
  }
  if (numericalRank(praw.matrix) != v.rank())
    throw std::logic_error("complementedRange: rank mismatch");
  return p;
}

// ---------------------------------------------------------------------------
// Linking algebras
// ---------------------------------------------------------------------------

/// Linking algebra of a module: block i is M_{n_i + m_i}, housing
/// [[ B, E* ], [ E, B^a(E) ]] cornerwise.
struct LinkingAlgebra {
  MultiMatrixAlgebra algebra;
  HilbertModule module;

  explicit LinkingAlgebra(const HilbertModule& mod) : module(mod) {
    std::vector<int> blocks;
    for (int i = 0; i < mod.algebra.blockCount(); ++i)
      blocks.push_back(mod.algebra.blocks[i] + mod.mults[i]);
    algebra = MultiMatrixAlgebra(std::move(blocks));
  }

  AlgebraElement assemble(const AlgebraElement& b, const ModuleElement& x,
                          const ModuleElement& y, const AdjointableOperator& a) const {
    AlgebraElement out = AlgebraElement::zero(algebra);
    for (int i = 0; i < module.algebra.blockCount(); ++i) {
      const int n = module.algebra.blocks[i], m = module.mults[i];
      out.entries[i].topLeftCorner(n, n) = b.entries[i];
      out.entries[i].topRightCorner(n, m) = y.entries[i].adjoint();
      out.entries[i].bottomLeftCorner(m, n) = x.entries[i];
      out.entries[i].bottomRightCorner(m, m) = a.blocks[i];
    }
    return out;
  }

  AlgebraElement cornerB(const AlgebraElement& L) const {
    AlgebraElement out = AlgebraElement::zero(module.algebra);
    for (int i = 0; i < module.algebra.blockCount(); ++i)
      out.entries[i] = L.entries[i].topLeftCorner(module.algebra.blocks[i],
                                                  module.algebra.blocks[i]);
    return out;
  }

  ModuleElement cornerE(const AlgebraElement& L) const {
    ModuleElement out = ModuleElement::zero(module);
    for (int i = 0; i < module.algebra.blockCount(); ++i)
      out.entries[i] = L.entries[i].bottomLeftCorner(module.mults[i], module.algebra.blocks[i]);
    return out;
  }

  AdjointableOperator cornerA(const AlgebraElement& L) const {
    AdjointableOperator out = AdjointableOperator::zero(module);
    for (int i = 0; i < module.algebra.blockCount(); ++i)
      out.blocks[i] = L.entries[i].bottomRightCorner(module.mults[i], module.mults[i]);
    return out;
  }
};

/// Homomorphism of linking algebras induced by a phi-isometry v:
/// [[b, y*],[x, a]] -> [[phi(b), (vy)*],[vx, theta_v(a)]], where
/// theta_v(a) = v a v* is determined by theta_v(a) v x = v a x.
struct LinkingHom {
  LinkingAlgebra sourceLinking;
  LinkingAlgebra targetLinking;
  Correspondence hom;
  RawModuleMap v;
  RawModuleMap vAdj;

  LinkingHom(const RawModuleMap& isom, const Correspondence& phi, double tol = kTol)
      : sourceLinking(isom.domain), targetLinking(isom.codomain), hom(phi), v(isom),
        vAdj(phiAdjoint(isom, phi, tol)) {
    if (!checkPhiIsometry(isom, phi, tol))
      throw std::invalid_argument("LinkingHom: map is not a phi-isometry");
  }

  AdjointableOperator theta(const AdjointableOperator& a) const {
    const RawModuleMap araw = RawModuleMap::fromOperator(a);
    const BlockwiseForm form = rightLinearBlockForm(compose(compose(v, araw), vAdj));
    if (form.residual > 1e-7)
      throw std::logic_error("LinkingHom::theta: image is not blockwise");
    return AdjointableOperator(v.codomain, form.blocks);
  }

  AlgebraElement apply(const AlgebraElement& L) const {
    const AlgebraElement b = sourceLinking.cornerB(L);
    ModuleElement x = sourceLinking.cornerE(L);
    // the E* corner carries y*, i.e. the adjoint of some y
    ModuleElement y = ModuleElement::zero(sourceLinking.module);
    for (int i = 0; i < sourceLinking.module.algebra.blockCount(); ++i)
      y.entries[i] = L.entries[i]
                         .topRightCorner(sourceLinking.module.algebra.blocks[i],
                                         sourceLinking.module.mults[i])
                         .adjoint();
    const AdjointableOperator a = sourceLinking.cornerA(L);
    return targetLinking.assemble(hom.applyHom(b), v.apply(x), v.apply(y), theta(a));
  }
};

// ---------------------------------------------------------------------------
// Existence of phi-unitaries
// ---------------------------------------------------------------------------

struct UnitaryCertificate {
  std::string reason;  // "support not invariant" or "multiplicity mismatch"
  int block;           // offending source block, 0-based
  int image;           // sigma(block)
};

struct ExistsUnitaryResult {
  std::optional<GeneralizedUnitary> witness;
  std::optional<UnitaryCertificate> certificate;
  bool exists() const { return witness.has_value(); }
};

/// A phi-unitary on E exists iff sigma preserves the support and the
/// multiplicities (equivalently, E (x)_phi B is isomorphic to E).  The
/// canonical witness fixes W_i = identity; failures report the smallest
/// offending block, with support invariance checked first.
inline ExistsUnitaryResult existsPhiUnitary(const HilbertModule& e, const Automorphism& phi) {
  if (phi.owner != e.algebra) throw std::invalid_argument("existsPhiUnitary: algebra mismatch");
  ExistsUnitaryResult out;
  for (int i : e.support()) {
    if (e.mults[phi.perm(i)] == 0) {
      out.certificate = UnitaryCertificate{"support not invariant", i, phi.perm(i)};
      return out;
    }
  }
  for (int i = 0; i < e.algebra.blockCount(); ++i) {
    if (e.mults[phi.perm(i)] != e.mults[i]) {
      out.certificate = UnitaryCertificate{"multiplicity mismatch", i, phi.perm(i)};
      return out;
    }
  }
  std::vector<CMat> w;
  for (int m : e.mults) w.push_back(cIdentity(m));
  out.witness = GeneralizedUnitary(e, phi, std::move(w));
  return out;
}

/// u_v : x -> x v* for a unitary v in B; a phi_v-unitary for phi_v = v . v*.
/// (The approximate-unit limit of the general construction collapses to the
/// unit here, every algebra being unital.)
inline GeneralizedUnitary quasiInnerUnitary(const HilbertModule& e, const AlgebraElement& v) {
  if (v.owner != e.algebra) throw std::invalid_argument("quasiInnerUnitary: algebra mismatch");
  if (!isUnitaryElement(v, 1e-7))
    throw std::invalid_argument("quasiInnerUnitary: element is not unitary");
  std::vector<CMat> w;
  for (int m : e.mults) w.push_back(cIdentity(m));
  return GeneralizedUnitary(e, Automorphism::innerBy(v), std::move(w));
}

// ---------------------------------------------------------------------------
// Recovering the automorphism from a generalized unitary
// ---------------------------------------------------------------------------

/// Automorphism of the range ideal induced by a generalized unitary,
/// recovered from phi(<x,y>) = <ux, uy> on a spanning set.  Throws if the
/// inner-product relation is inconsistent with any automorphism.
inline Automorphism inducedAutomorphism(const RawModuleMap& u, const RangeIdeal& be,
                                        double tol = kTol) {
  const HilbertModule& e = u.domain;
  if (u.codomain != e) throw std::invalid_argument("inducedAutomorphism: expects a map on E");
  const int s = be.blockCount();
  std::vector<int> image(s, -1);
  std::vector<CMat> conj(s);

  for (int si = 0; si < s; ++si) {
    const int i = be.parentBlock[si];
    const int n = e.algebra.blocks[i];
    // images of the matrix units of block i under L: <x,y> -> <ux,uy>
    std::vector<std::vector<CMat>> lval(n, std::vector<CMat>(n));
    int target = -1;
    for (int bIdx = 0; bIdx < n; ++bIdx)
      for (int d = 0; d < n; ++d) {
        ModuleElement x = ModuleElement::zero(e), y = ModuleElement::zero(e);
        x.entries[i](0, bIdx) = 1.0;
        y.entries[i](0, d) = 1.0;
        const AlgebraElement val = innerProduct(u.apply(x), u.apply(y));
        int blk = -1;
        for (int j = 0; j < e.algebra.blockCount(); ++j)
          if (svMax(val.entries[j]) > tol) {
            if (blk != -1)
              throw std::domain_error("inducedAutomorphism: image spreads over several blocks");
            blk = j;
          }
        if (blk != -1) {
          if (target == -1) target = blk;
          if (target != blk)
            throw std::domain_error("inducedAutomorphism: inconsistent target block");
          lval[bIdx][d] = val.entries[blk];
        }
      }
    if (target == -1 || e.algebra.blocks[target] != n)
      throw std::domain_error("inducedAutomorphism: block " + std::to_string(i + 1) +
                              " has no unitary image");
    for (int d = 0; d < n; ++d)
      if (lval[0][d].size() == 0)
        throw std::domain_error("inducedAutomorphism: inner products degenerate on block " +
                                std::to_string(i + 1));
    // factor L(b) = w b w^+
    // L(E_00) = (w e_0)(w e_0)^+ is rank one
    Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (lval[0][0] + lval[0][0].adjoint()));
    const int top = static_cast<int>(eig.eigenvalues().size()) - 1;
    if (eig.eigenvalues()(top) < 0.5)
      throw std::domain_error("inducedAutomorphism: rank-one recovery failed");
    CVec we0 = std::sqrt(eig.eigenvalues()(top)) * eig.eigenvectors().col(top);
    CMat w(n, n);
    for (int d = 0; d < n; ++d) w.col(d) = lval[0][d].adjoint() * we0;
    if (!isUnitaryMatrix(w, 1e-6))
      throw std::domain_error("inducedAutomorphism: recovered conjugator is not unitary");
    image[si] = target;
    conj[si] = w;
  }

  // assemble the support permutation
  std::vector<int> permImg(s, -1);
  for (int si = 0; si < s; ++si) {
    const auto pos = be.positionOf(image[si]);
    if (!pos) throw std::domain_error("inducedAutomorphism: image leaves the range ideal");
    permImg[si] = *pos;
  }
  Automorphism out(be.algebra, Perm(permImg), conj);

  // full validation over all basis pairs
  double resid = 0;
  const std::vector<ModuleElement> basis = basisUnits(e);
  std::vector<ModuleElement> images2;
  images2.reserve(basis.size());
  for (const ModuleElement& x : basis) images2.push_back(u.apply(x));
  for (size_t r = 0; r < basis.size(); ++r)
    for (size_t t = 0; t < basis.size(); ++t) {
      const AlgebraElement ip = be.restrict(innerProduct(basis[r], basis[t]));
      const AlgebraElement lhs = be.restrict(innerProduct(images2[r], images2[t]));
      const AlgebraElement rhs = applyAutomorphism(out, ip);
      resid = std::max(resid, add(lhs, scale(-1.0, rhs)).norm());
    }
  if (resid > std::max(tol, 1e-7))
    throw std::domain_error("inducedAutomorphism: inner-product relation inconsistent (residual " +
                            std::to_string(resid) + ")");
  return out;
}

inline Automorphism inducedAutomorphism(const GeneralizedUnitary& u, double tol = kTol) {
  const RangeIdeal be = rangeIdeal(u.module);
  Automorphism rec = inducedAutomorphism(u.toRaw(), be, tol);
  // cross-check against the stored automorphism restricted to the ideal
  std::vector<int> permImg(be.blockCount());
  std::vector<CMat> conj(be.blockCount());
  for (int si = 0; si < be.blockCount(); ++si) {
    const int i = be.parentBlock[si];
    const auto pos = be.positionOf(u.phi.perm(i));
    if (!pos) throw std::logic_error("inducedAutomorphism: witness leaves the support");
    permImg[si] = *pos;
    conj[si] = u.phi.conj[i];
  }
  Automorphism direct(be.algebra, Perm(permImg), conj);
  if (!sameAction(rec, direct, 1e-6))
    throw std::logic_error("inducedAutomorphism: recovery disagrees with the stored data");
  return rec;
}

/// Restriction of an automorphism to the range ideal, when it preserves it.
inline std::optional<Automorphism> restrictToRangeIdeal(const Automorphism& phi,
                                                        const RangeIdeal& be) {
  std::vector<int> permImg(be.blockCount());
  std::vector<CMat> conj(be.blockCount());
  for (int si = 0; si < be.blockCount(); ++si) {
    const int i = be.parentBlock[si];
    const auto pos = be.positionOf(phi.perm(i));
    if (!pos) return std::nullopt;
    permImg[si] = *pos;
    conj[si] = phi.conj[i];
  }
  return Automorphism(be.algebra, Perm(permImg), conj);
}

/// The ordinary unitary v_u = v o u^{-1} relating two phi-unitaries of the
/// same class; satisfies v_u o u = v.
inline AdjointableOperator unitaryQuotientWitness(const GeneralizedUnitary& v,
                                                  const GeneralizedUnitary& u,
                                                  double tol = kTol) {
  if (v.module != u.module) throw std::invalid_argument("unitaryQuotientWitness: module mismatch");
  const RangeIdeal be = rangeIdeal(v.module);
  const auto rv = restrictToRangeIdeal(v.phi, be);
  const auto ru = restrictToRangeIdeal(u.phi, be);
  if (!rv || !ru || !sameAction(*rv, *ru, std::max(tol, 1e-7)))
    throw std::invalid_argument("unitaryQuotientWitness: incompatible automorphism classes");
  const GeneralizedUnitary w = composeGU(v, inverseGU(u));
  if (!w.phi.perm.isIdentity())
    throw std::invalid_argument("unitaryQuotientWitness: incompatible permutations");
  AdjointableOperator out = AdjointableOperator::zero(v.module);
  for (int i = 0; i < v.module.algebra.blockCount(); ++i) {
    const CMat& c = w.phi.conj[i];
    const int n = v.module.algebra.blocks[i];
    const Complex scalar = c.trace() / static_cast<double>(n);
    if (v.module.mults[i] > 0 && !approxZero(CMat(c - scalar * cIdentity(n)), 1e-7))
      throw std::invalid_argument(
          "unitaryQuotientWitness: residual automorphism is not scalar on the support");
    out.blocks[i] = std::conj(scalar) * w.blockUnitaries[i];
  }
  return out;
}

}  // namespace picmod
