#pragma once

// Strict representations and automorphisms of the operator algebra B^a(E):
// the multiplicity correspondence F_theta = E* (x)_theta F, the canonical
// unitary E (x) F_theta -> F with its intertwining property, the conjugation
// automorphism theta_u of a generalized unitary, the identification
// E_{theta_u} = _phi(B_E), and the image of straut(B^a(E))/inn in the Picard
// group of the range ideal.
//
// In this finite-dimensional model K(E) = B^a(E), so every unital
// homomorphism is strict and every automorphism bistrict; strictness is
// therefore not modeled as a separate property.

#include "picmod/generalized_maps.hpp"

namespace picmod {

/// Unital homomorphism theta: B^a(E) -> B^a(F), recorded by its multiplicity
/// matrix over the supports plus optional per-block conjugators on the target.
struct UnitalHom {
  HilbertModule domainModule;  // E
  HilbertModule targetModule;  // F
  OperatorAlgebra source;      // B^a(E)
  OperatorAlgebra target;      // B^a(F)
  Eigen::MatrixXi mult;        // source support x target support
  std::vector<CMat> conj;      // per target support block, q_j x q_j; empty = untwisted

  UnitalHom() = default;
  UnitalHom(HilbertModule e, HilbertModule f, Eigen::MatrixXi mu, std::vector<CMat> conjugators = {})
      : domainModule(std::move(e)), targetModule(std::move(f)),
        source(adjointableAlgebra(domainModule)), target(adjointableAlgebra(targetModule)),
        mult(std::move(mu)), conj(std::move(conjugators)) {
    if (mult.rows() != source.algebra.blockCount() || mult.cols() != target.algebra.blockCount())
      throw std::invalid_argument("UnitalHom: mult has wrong shape");
    if (mult.size() > 0 && mult.minCoeff() < 0)
      throw std::invalid_argument("UnitalHom: negative multiplicity");
    for (int j = 0; j < target.algebra.blockCount(); ++j) {
      int sum = 0;
      for (int i = 0; i < source.algebra.blockCount(); ++i)
        sum += mult(i, j) * source.algebra.blocks[i];
      if (sum != target.algebra.blocks[j])
        throw std::invalid_argument("UnitalHom: not unital at target block " +
                                    std::to_string(j + 1));
    }
    if (!conj.empty()) {
      if (static_cast<int>(conj.size()) != target.algebra.blockCount())
        throw std::invalid_argument("UnitalHom: conjugator count mismatch");
      for (int j = 0; j < target.algebra.blockCount(); ++j)
        if (conj[j].rows() != target.algebra.blocks[j] || !isUnitaryMatrix(conj[j], 1e-7))
          throw std::invalid_argument("UnitalHom: conjugator " + std::to_string(j + 1) +
                                      " invalid");
    }
  }

  /// theta as an automorphism of B^a(E): F = E and mult a permutation matrix.
  static UnitalHom fromOperatorAutomorphism(const HilbertModule& e, const Automorphism& theta) {
    const OperatorAlgebra oa = adjointableAlgebra(e);
    if (theta.owner != oa.algebra)
      throw std::invalid_argument("UnitalHom: automorphism not over B^a(E)");
    Eigen::MatrixXi mu = permutationMatrix(theta.perm);
    std::vector<CMat> c(oa.algebra.blockCount());
    for (int i = 0; i < oa.algebra.blockCount(); ++i) c[theta.perm(i)] = theta.conj[i];
    return UnitalHom(e, e, std::move(mu), std::move(c));
  }

  CMat conjAt(int j) const {
    if (!conj.empty()) return conj[j];
    return cIdentity(target.algebra.blocks[j]);
  }

  /// theta(a)_j = V_j blockdiag(copies of a_i) V_j^+.
  AdjointableOperator apply(const AdjointableOperator& a) const {
    if (a.owner != domainModule) throw std::invalid_argument("UnitalHom: owner mismatch");
    const AlgebraElement ae = source.toElement(a);
    AdjointableOperator out = AdjointableOperator::zero(targetModule);
    for (int j = 0; j < target.algebra.blockCount(); ++j) {
      const int qj = target.algebra.blocks[j];
      CMat diag = CMat::Zero(qj, qj);
      int off = 0;
      for (int i = 0; i < source.algebra.blockCount(); ++i)
        for (int c = 0; c < mult(i, j); ++c) {
          const int h = source.algebra.blocks[i];
          diag.block(off, off, h, h) = ae.entries[i];
          off += h;
        }
      out.blocks[target.parentBlock[j]] = conjAt(j) * diag * conjAt(j).adjoint();
    }
    return out;
  }

  bool isAutomorphismShaped() const {
    return domainModule == targetModule && isPermutationMatrix(mult);
  }

  /// The correspondence _theta F from B^a(E) to the algebra of F, i.e. F with
  /// the left action through theta.
  Correspondence thetaCorrespondence() const {
    Eigen::MatrixXi mu = Eigen::MatrixXi::Zero(source.algebra.blockCount(),
                                               targetModule.algebra.blockCount());
    for (int i = 0; i < source.algebra.blockCount(); ++i)
      for (int j = 0; j < target.algebra.blockCount(); ++j)
        mu(i, target.parentBlock[j]) = mult(i, j);
    std::vector<CMat> tw;
    if (!conj.empty()) {
      tw.resize(targetModule.algebra.blockCount());
      for (int j = 0; j < targetModule.algebra.blockCount(); ++j)
        tw[j] = CMat(0, 0);
      for (int j = 0; j < target.algebra.blockCount(); ++j) tw[target.parentBlock[j]] = conj[j];
      for (int j = 0; j < targetModule.algebra.blockCount(); ++j)
        if (tw[j].size() == 0) tw[j] = cIdentity(0);
    }
    return Correspondence(source.algebra, targetModule.algebra, std::move(mu), std::move(tw));
  }
};

/// theta_u = u . u*: conjugation by a generalized unitary, as an automorphism
/// of B^a(E) with blockwise form theta_u(a)_{sigma(i)} = W_i a_i W_i^+.
inline Automorphism thetaFromGenUnitary(const GeneralizedUnitary& u) {
  const OperatorAlgebra oa = adjointableAlgebra(u.module);
  const int s = oa.algebra.blockCount();
  std::vector<int> permImg(s);
  std::vector<CMat> conj(s);
  for (int si = 0; si < s; ++si) {
    const int i = oa.parentBlock[si];
    const int j = u.phi.perm(i);
    int sj = -1;
    for (int t = 0; t < s; ++t)
      if (oa.parentBlock[t] == j) sj = t;
    if (sj < 0) throw std::logic_error("thetaFromGenUnitary: permutation leaves the support");
    permImg[si] = sj;
    conj[si] = u.blockUnitaries[i];
  }
  return Automorphism(oa.algebra, Perm(std::move(permImg)), std::move(conj));
}

inline AdjointableOperator applyOperatorAutomorphism(const HilbertModule& e,
                                                     const Automorphism& theta,
                                                     const AdjointableOperator& a) {
  const OperatorAlgebra oa = adjointableAlgebra(e);
  return oa.toOperator(applyAutomorphism(theta, oa.toElement(a)));
}

// ---------------------------------------------------------------------------
// The multiplicity correspondence F_theta = E* (x)_theta F
// ---------------------------------------------------------------------------

/// E* as the Morita equivalence from B_E to B^a(E): identity multiplicity
/// over the support, element model x -> (x_i^+)_i.
inline Correspondence dualModuleCorrespondence(const HilbertModule& e) {
  const RangeIdeal be = rangeIdeal(e);
  const OperatorAlgebra oa = adjointableAlgebra(e);
  Eigen::MatrixXi mu = Eigen::MatrixXi::Identity(be.blockCount(), be.blockCount());
  return Correspondence(be.algebra, oa.algebra, std::move(mu));
}

inline ModuleElement dualElement(const HilbertModule& e, const ModuleElement& x) {
  if (x.owner != e) throw std::invalid_argument("dualElement: owner mismatch");
  const Correspondence estar = dualModuleCorrespondence(e);
  ModuleElement out = ModuleElement::zero(estar.asModule());
  const std::vector<int> support = e.support();
  for (size_t s = 0; s < support.size(); ++s) out.entries[s] = x.entries[support[s]].adjoint();
  return out;
}

struct MultiplicityCorrespondence {
  RangeIdeal bE;
  Correspondence estar;         // B_E -> B^a(E)
  Correspondence thetaF;        // B^a(E) -> algebra of F
  Correspondence corr;          // F_theta = E* (x)_theta F, from B_E to C
  Correspondence liftedToBase;  // same, with zero rows for blocks outside B_E

  /// y* (x) z.
  ModuleElement elem(const HilbertModule& e, const ModuleElement& y,
                     const ModuleElement& z) const {
    return tensorElem(estar, dualElement(e, y), thetaF, z);
  }
};

inline MultiplicityCorrespondence multiplicityCorrespondence(const UnitalHom& theta) {
  MultiplicityCorrespondence out;
  out.bE = rangeIdeal(theta.domainModule);
  out.estar = dualModuleCorrespondence(theta.domainModule);
  out.thetaF = theta.thetaCorrespondence();
  out.corr = tensor(out.estar, out.thetaF);
  Eigen::MatrixXi lifted = Eigen::MatrixXi::Zero(theta.domainModule.algebra.blockCount(),
                                                 out.corr.mult.cols());
  for (int s = 0; s < out.bE.blockCount(); ++s) lifted.row(out.bE.parentBlock[s]) = out.corr.mult.row(s);
  out.liftedToBase = Correspondence(theta.domainModule.algebra, theta.targetModule.algebra,
                                    std::move(lifted), out.corr.twist);
  return out;
}

/// The canonical unitary u: E (x) F_theta -> F with u(x (x) (y* (x) z)) =
/// theta(x y*) z; here it is blockwise left multiplication by theta's
/// conjugators.  Its defining properties are verified numerically in tests.
inline RawModuleMap theorem21Unitary(const UnitalHom& theta) {
  const MultiplicityCorrespondence fc = multiplicityCorrespondence(theta);
  const HilbertModule dom = extendModule(theta.domainModule, fc.liftedToBase);
  const HilbertModule& f = theta.targetModule;
  if (dom.mults != f.mults)
    throw std::logic_error("theorem21Unitary: E (x) F_theta does not match F");
  RawModuleMap out = RawModuleMap::zeroMap(dom, f);
  const std::vector<ModuleElement> basis = basisUnits(dom);
  for (size_t t = 0; t < basis.size(); ++t) {
    ModuleElement y = ModuleElement::zero(f);
    for (int j = 0; j < f.algebra.blockCount(); ++j) {
      const auto pos = [&]() -> int {
        for (int sj = 0; sj < theta.target.algebra.blockCount(); ++sj)
          if (theta.target.parentBlock[sj] == j) return sj;
        return -1;
      }();
      if (pos >= 0)
        y.entries[j] = theta.conjAt(pos) * basis[t].entries[j];
      else
        y.entries[j] = basis[t].entries[j];
    }
    out.matrix.col(static_cast<Eigen::Index>(t)) = y.coords();
  }
  return out;
}

// ---------------------------------------------------------------------------
// E_{theta_u} = _phi(B_E)
// ---------------------------------------------------------------------------

/// Restriction of a correspondence B_E -> B to a correspondence over B_E,
/// legal when every nonzero column lies in the support.
inline Correspondence restrictTargetToIdeal(const Correspondence& corr, const RangeIdeal& be) {
  Eigen::MatrixXi mu(corr.mult.rows(), be.blockCount());
  for (int s = 0; s < be.blockCount(); ++s) mu.col(s) = corr.mult.col(be.parentBlock[s]);
  if (mu.sum() != corr.mult.sum())
    throw std::invalid_argument("restrictTargetToIdeal: correspondence leaves the ideal");
  std::vector<CMat> tw;
  if (corr.hasTwist()) {
    for (int s = 0; s < be.blockCount(); ++s) tw.push_back(corr.twist[be.parentBlock[s]]);
  }
  return Correspondence(corr.source, be.algebra, std::move(mu), std::move(tw));
}

inline ModuleElement restrictElementToIdeal(const ModuleElement& x, const RangeIdeal& be,
                                            const HilbertModule& target) {
  ModuleElement out = ModuleElement::zero(target);
  for (int s = 0; s < be.blockCount(); ++s) out.entries[s] = x.entries[be.parentBlock[s]];
  return out;
}

struct Prop31Result {
  MultiplicityCorrespondence mc;  // E_{theta_u} over the base algebra
  Correspondence eTheta;          // restricted to B_E
  Correspondence phiBE;           // _phi(B_E)
  RawModuleMap iso;               // eTheta -> phiBE as right modules
};

/// The bilinear unitary x* (x) y -> <u x, y> identifying E_{theta_u} with the
/// phi-twisted range ideal; blockwise it is left multiplication by the
/// conjugators of phi.
inline Prop31Result prop31Isomorphism(const GeneralizedUnitary& u) {
  Prop31Result out;
  const HilbertModule& e = u.module;
  const RangeIdeal be = rangeIdeal(e);
  const Automorphism thetaU = thetaFromGenUnitary(u);
  out.mc = multiplicityCorrespondence(UnitalHom::fromOperatorAutomorphism(e, thetaU));
  out.eTheta = restrictTargetToIdeal(out.mc.corr, be);

  const auto phiRestricted = restrictToRangeIdeal(u.phi, be);
  if (!phiRestricted)
    throw std::logic_error("prop31Isomorphism: phi does not restrict to the range ideal");
  out.phiBE = Correspondence::fromAutomorphismCorr(*phiRestricted);

  const HilbertModule dom = out.eTheta.asModule();
  const HilbertModule cod = out.phiBE.asModule();
  if (dom.dim() != cod.dim()) throw std::logic_error("prop31Isomorphism: dimension mismatch");
  RawModuleMap iso = RawModuleMap::zeroMap(dom, cod);
  // block sj of eTheta carries the copy of source block sigma^{-1}; the map
  // multiplies by the conjugator w_{sigma^{-1}(j)} on the left
  const Perm invPerm = phiRestricted->perm.inverse();
  const std::vector<ModuleElement> basis = basisUnits(dom);
  for (size_t t = 0; t < basis.size(); ++t) {
    ModuleElement y = ModuleElement::zero(cod);
    for (int sj = 0; sj < be.blockCount(); ++sj)
      y.entries[sj] = phiRestricted->conj[invPerm(sj)] * basis[t].entries[sj];
    iso.matrix.col(static_cast<Eigen::Index>(t)) = y.coords();
  }
  out.iso = std::move(iso);
  return out;
}

// ---------------------------------------------------------------------------
// straut image in the Picard group
// ---------------------------------------------------------------------------

struct StrautImage {
  RangeIdeal bE;
  std::vector<int> operatorBlockMults;     // m_i over the support
  std::vector<PicardElement> subgroup;     // inside Pic(B_E)
};

/// Image of straut(B^a(E))/inn(B^a(E)) in Pic(B_E): the permutations of the
/// support that preserve the operator multiplicities.
inline StrautImage strautImageInPicard(const HilbertModule& e) {
  StrautImage out;
  out.bE = rangeIdeal(e);
  for (int i : e.support()) out.operatorBlockMults.push_back(e.mults[i]);
  for (const Perm& p : permutationsPreserving(out.operatorBlockMults))
    out.subgroup.push_back({out.bE.algebra, p});
  return out;
}

/// Picard class of a bistrict automorphism of B^a(E); the direction matches
/// the automorphism route (regression-tested against the element model).
inline PicardElement strautClassOf(const HilbertModule& e, const Automorphism& theta) {
  const RangeIdeal be = rangeIdeal(e);
  return {be.algebra, theta.perm};
}

/// Prop 2.2: E_{theta_1} and E_{theta_2} are isomorphic iff the automorphisms
/// differ by an inner automorphism; when they do, returns the unitary w with
/// theta_2 = w theta_1(.) w*.
inline std::optional<AdjointableOperator> innerEquivalenceWitness(const HilbertModule& e,
                                                                  const Automorphism& theta1,
                                                                  const Automorphism& theta2) {
  if (theta1.perm != theta2.perm) return std::nullopt;
  const Automorphism diff = composeAut(theta2, inverseAut(theta1));
  if (!diff.perm.isIdentity()) return std::nullopt;
  const OperatorAlgebra oa = adjointableAlgebra(e);
  AdjointableOperator w = AdjointableOperator::identity(e);
  for (int s = 0; s < oa.algebra.blockCount(); ++s) w.blocks[oa.parentBlock[s]] = diff.conj[s];
  return w;
}

}  // namespace picmod
