#pragma once

// Randomized instance generation and the registry of verified invariants,
// runnable as one suite with shrinking diagnostics.
//
// Instances are a deterministic function of the seed: unitary data is drawn
// by orthonormalizing Gaussian matrices from a portable generator, block
// permutations uniformly among the shape-compatible ones.  The three
// worked counterexamples ride along as golden instances regardless of seed.
//
// The oracle side of the suite lives here too: a Gram-factorization search
// that decides existence of generalized unitaries (and of module
// intertwiners) by assembling the prescribed inner products into stacked
// Gram matrices, rank-testing them against the multiplicities, and
// reconstructing an explicit candidate by eigenfactorization.  It shares no
// code path with the multiplicity-matching implementation it checks.

#include "picmod/unitary_groups.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace picmod {

struct InstanceSpec {
  std::uint64_t seed = 42;
  int maxBlocks = 4;
  int maxBlockDim = 3;
  int maxMult = 3;
  int count = 200;
};

struct Instance {
  std::string name;
  std::uint64_t instanceSeed = 0;
  MultiMatrixAlgebra B;
  HilbertModule E;
  Automorphism phi;       // random automorphism of B
  GeneralizedUnitary u;   // random generalized unitary on E (shape-compatible by construction)
  std::optional<UnitalHom> theta;        // random unital hom B^a(E) -> B^a(F)
  std::optional<Automorphism> thetaAuto; // random automorphism of B^a(E)
  bool golden = false;
};

namespace detail {
inline std::uint64_t mixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ull * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

inline std::string shapeName(const std::vector<int>& n, const std::vector<int>& m) {
  std::ostringstream s;
  s << "n=(";
  for (size_t i = 0; i < n.size(); ++i) s << (i ? "," : "") << n[i];
  s << ") m=(";
  for (size_t i = 0; i < m.size(); ++i) s << (i ? "," : "") << m[i];
  s << ")";
  return s.str();
}
}  // namespace detail

/// Deterministic instance from a seed and a shape.  The draw order is fixed
/// so that shrunken shapes replay the same stream.
inline Instance makeInstance(std::uint64_t seed, const std::vector<int>& n,
                             const std::vector<int>& m, int maxBlocks = 4, int maxBlockDim = 3,
                             int maxMult = 3) {
  Instance inst;
  inst.instanceSeed = seed;
  inst.B = MultiMatrixAlgebra(n);
  inst.E = HilbertModule(inst.B, m);
  inst.name = detail::shapeName(n, m) + " seed=" + std::to_string(seed);
  Rng rng(seed);

  inst.phi = randomAutomorphism(inst.B, rng);

  // generalized unitary: permutation compatible with both n and m
  {
    std::vector<std::pair<int, int>> labels;
    for (size_t i = 0; i < n.size(); ++i) labels.emplace_back(n[i], m[i]);
    const std::vector<Perm> perms = permutationsPreserving(labels);
    const Perm sigma = perms[rng.uniformInt(0, static_cast<int>(perms.size()) - 1)];
    std::vector<CMat> conj, w;
    for (int ni : n) conj.push_back(rng.unitary(ni));
    for (int mi : m) w.push_back(rng.unitary(mi));
    inst.u = GeneralizedUnitary(inst.E, Automorphism(inst.B, sigma, std::move(conj)),
                                std::move(w));
  }

  const OperatorAlgebra oa = adjointableAlgebra(inst.E);
  if (oa.algebra.blockCount() > 0) {
    // automorphism of B^a(E)
    {
      const std::vector<Perm> perms = permutationsPreserving(oa.algebra.blocks);
      const Perm tau = perms[rng.uniformInt(0, static_cast<int>(perms.size()) - 1)];
      std::vector<CMat> c;
      for (int mi : oa.algebra.blocks) c.push_back(rng.unitary(mi));
      inst.thetaAuto = Automorphism(oa.algebra, tau, std::move(c));
    }
    // general unital hom B^a(E) -> B^a(F) for a random target module F
    {
      const int l = rng.uniformInt(1, maxBlocks);
      std::vector<int> p;
      for (int j = 0; j < l; ++j) p.push_back(rng.uniformInt(1, maxBlockDim));
      Eigen::MatrixXi t(oa.algebra.blockCount(), l);
      for (int i = 0; i < t.rows(); ++i)
        for (int j = 0; j < l; ++j) t(i, j) = rng.uniformInt(0, maxMult);
      std::vector<int> q(l, 0);
      for (int j = 0; j < l; ++j)
        for (int i = 0; i < t.rows(); ++i) q[j] += t(i, j) * oa.algebra.blocks[i];
      MultiMatrixAlgebra c(p);
      HilbertModule f(c, q);
      // keep only the support of F in the unital-hom data
      const OperatorAlgebra fa = adjointableAlgebra(f);
      Eigen::MatrixXi ts(oa.algebra.blockCount(), fa.algebra.blockCount());
      for (int sj = 0; sj < fa.algebra.blockCount(); ++sj)
        ts.col(sj) = t.col(fa.parentBlock[sj]);
      std::vector<CMat> conj;
      for (int sj = 0; sj < fa.algebra.blockCount(); ++sj)
        conj.push_back(rng.unitary(fa.algebra.blocks[sj]));
      inst.theta = UnitalHom(inst.E, f, std::move(ts), std::move(conj));
    }
  }
  return inst;
}

/// The worked counterexamples, always part of every run.
inline std::vector<Instance> goldenInstances() {
  std::vector<Instance> out;
  {
    Instance i = makeInstance(1001, {1, 1}, {2, 1});
    i.phi = Automorphism(i.B, Perm({1, 0}), {cIdentity(1), cIdentity(1)});
    i.name = "golden:examples_2_5";
    i.golden = true;
    out.push_back(std::move(i));
  }
  {
    Instance i = makeInstance(1002, {1, 1}, {1, 0});
    i.phi = Automorphism(i.B, Perm({1, 0}), {cIdentity(1), cIdentity(1)});
    i.name = "golden:example_3_3";
    i.golden = true;
    out.push_back(std::move(i));
  }
  {
    Instance i = makeInstance(1003, {1, 2}, {2, 1});
    i.name = "golden:sec2_counterexample";
    i.golden = true;
    out.push_back(std::move(i));
  }
  return out;
}

inline std::vector<Instance> generate(const InstanceSpec& spec) {
  std::vector<Instance> out = goldenInstances();
  for (int t = 0; t < spec.count; ++t) {
    const std::uint64_t s = detail::mixSeed(spec.seed, static_cast<std::uint64_t>(t));
    Rng shapeRng(s);
    const int k = shapeRng.uniformInt(1, spec.maxBlocks);
    std::vector<int> n, m;
    for (int i = 0; i < k; ++i) n.push_back(shapeRng.uniformInt(1, spec.maxBlockDim));
    for (int i = 0; i < k; ++i) m.push_back(shapeRng.uniformInt(0, spec.maxMult));
    Instance inst = makeInstance(detail::mixSeed(s, 0xabcdef), n, m, spec.maxBlocks,
                                 spec.maxBlockDim, spec.maxMult);
    inst.name = "#" + std::to_string(t) + " " + inst.name;
    out.push_back(std::move(inst));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gram-factorization oracles
// ---------------------------------------------------------------------------

struct GramOracleResult {
  bool exists = false;
  double residual = 0;                // isometry residual of the reconstructed candidate
  std::vector<Eigen::Index> ranks;    // stacked-Gram rank per target block
};

namespace detail {
/// Searches for elements f_r of `target` with <f_r, f_s> = prescribed(r, s)
/// and full span, by factorizing the stacked Gram matrices.  `prescribed` is
/// indexed by the basis of `source`.
inline GramOracleResult gramSearch(const HilbertModule& source, const HilbertModule& target,
                                   const std::function<AlgebraElement(int, int)>& prescribed) {
  GramOracleResult out;
  const int d = source.dim();
  const MultiMatrixAlgebra& alg = target.algebra;
  std::vector<CMat> solved(alg.blockCount());
  bool feasible = true;

  std::vector<std::vector<AlgebraElement>> gram(d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) gram[r].push_back(prescribed(r, s));

  for (int j = 0; j < alg.blockCount(); ++j) {
    const int nj = alg.blocks[j];
    CMat c(d * nj, d * nj);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) c.block(r * nj, s * nj, nj, nj) = gram[r][s].entries[j];
    if (c.size() == 0) {
      out.ranks.push_back(0);
      solved[j] = CMat::Zero(target.mults[j], 0);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (c + c.adjoint()));
    const auto& ev = eig.eigenvalues();
    const double cutoff = kRankRelCutoff * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < -1e-7 * std::max(1.0, ev.cwiseAbs().maxCoeff())) feasible = false;  // not PSD
      if (ev(i) > cutoff) ++rank;
    }
    out.ranks.push_back(rank);
    if (rank > target.mults[j]) feasible = false;
    if (rank < target.mults[j]) feasible = false;  // candidate cannot span
    // reconstruct rows sqrt(lambda) q^T for the top eigenpairs, zero-padded
    CMat f = CMat::Zero(target.mults[j], d * nj);
    Eigen::Index row = 0;
    for (Eigen::Index i = ev.size() - 1; i >= 0 && row < target.mults[j]; --i) {
      if (ev(i) <= cutoff) break;
      f.row(row++) = std::sqrt(std::max(ev(i), 0.0)) * eig.eigenvectors().col(i).adjoint();
    }
    solved[j] = std::move(f);
  }
  out.exists = feasible;
  if (!feasible) return out;

  // residual of the reconstructed candidate against the prescription
  std::vector<ModuleElement> fs;
  for (int r = 0; r < d; ++r) {
    ModuleElement f = ModuleElement::zero(target);
    for (int j = 0; j < alg.blockCount(); ++j) {
      const int nj = alg.blocks[j];
      if (nj == 0 || target.mults[j] == 0) continue;
      f.entries[j] = solved[j].middleCols(r * nj, nj);
    }
    fs.push_back(std::move(f));
  }
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      const AlgebraElement diff = add(innerProduct(fs[r], fs[s]), scale(-1.0, gram[r][s]));
      out.residual = std::max(out.residual, diff.norm());
    }
  if (out.residual > 1e-7) out.exists = false;
  // surjectivity of the assembled candidate map
  if (d > 0) {
    CMat span(target.dim(), d);
    for (int r = 0; r < d; ++r) span.col(r) = fs[r].coords();
    if (numericalRank(span) != target.dim()) out.exists = false;
  } else if (target.dim() != 0) {
    out.exists = false;
  }
  return out;
}
}  // namespace detail

/// Independent decision procedure for existence of a phi-unitary on E: the
/// inner products of a candidate are forced to be phi of the original ones,
/// so a candidate exists iff the stacked Gram of the prescription factorizes
/// through the available rows in every block, with full span.
inline GramOracleResult gramUnitaryWitnessSearch(const HilbertModule& e, const Automorphism& phi) {
  const std::vector<ModuleElement> basis = basisUnits(e);
  return detail::gramSearch(e, e, [&](int r, int s) {
    return applyAutomorphism(phi, innerProduct(basis[r], basis[s]));
  });
}

/// Same search for an inner-product-preserving intertwiner E -> F with full
/// range; decides module isomorphism independently of the multiplicity
/// comparison.
inline GramOracleResult gramIntertwinerSearch(const HilbertModule& e, const HilbertModule& f) {
  if (e.algebra != f.algebra) throw std::invalid_argument("gramIntertwinerSearch: algebra mismatch");
  const std::vector<ModuleElement> basis = basisUnits(e);
  return detail::gramSearch(e, f,
                            [&](int r, int s) { return innerProduct(basis[r], basis[s]); });
}

// ---------------------------------------------------------------------------
// Check registry
// ---------------------------------------------------------------------------

struct CheckOutcome {
  bool pass = true;
  bool skipped = false;
  double residual = 0;
  std::string detail;

  static CheckOutcome skip(std::string why) { return {true, true, 0, std::move(why)}; }
  static CheckOutcome fail(double resid, std::string why) {
    return {false, false, resid, std::move(why)};
  }
  void observe(double resid, double tol, const std::string& what) {
    residual = std::max(residual, resid);
    if (resid > tol && pass) {
      pass = false;
      detail = what + " residual " + std::to_string(resid);
    }
  }
  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

using CheckFn = std::function<CheckOutcome(const Instance&, Rng&)>;

struct RegisteredCheck {
  std::string name;
  std::vector<std::string> covers;
  CheckFn fn;
};

/// One tag per spec-level invariant; the coverage test insists every tag is
/// claimed by at least one registered check.
inline const std::vector<std::string>& requiredInvariantTags() {
  static const std::vector<std::string> tags = {
      "algebra.star-homomorphism",     "algebra.action-equality",
      "algebra.outer-classes-group",   "algebra.inner-kernel",
      "hilbmod.cauchy-schwarz",        "hilbmod.adjointability",
      "hilbmod.inner-span-rank",       "hilbmod.iso-brute-force",
      "corr.tensor-associativity",     "corr.tensor-inner-product",
      "corr.morita-inverses",          "corr.contravariance",
      "genmap.isometry-implies-linear","genmap.adjointable-implies-linear",
      "genmap.composition-grading",    "genmap.phie-closure",
      "genmap.prop114-uniqueness",     "genmap.exists-oracle",
      "reptheory.prop22",              "reptheory.thm21-reconstruction",
      "reptheory.iterated-associativity", "reptheory.cor23-injectivity",
      "groups.normality",              "groups.classmap-antihom",
      "groups.two-routes",             "groups.semidirect-reconstruction",
      "golden.paper-examples",
  };
  return tags;
}

namespace checks {

inline CheckOutcome starHomomorphism(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  for (int t = 0; t < 3; ++t) {
    const AlgebraElement a = randomElement(inst.B, rng), b = randomElement(inst.B, rng);
    out.observe(add(applyAutomorphism(inst.phi, multiply(a, b)),
                    scale(-1.0, multiply(applyAutomorphism(inst.phi, a),
                                         applyAutomorphism(inst.phi, b))))
                    .norm(),
                kTol, "phi(ab)=phi(a)phi(b)");
    out.observe(add(applyAutomorphism(inst.phi, adjointOf(a)),
                    scale(-1.0, adjointOf(applyAutomorphism(inst.phi, a))))
                    .norm(),
                kTol, "phi(a*)=phi(a)*");
    out.observe(std::abs(applyAutomorphism(inst.phi, a).norm() - a.norm()), kTol,
                "norm preservation");
  }
  return out;
}

inline CheckOutcome actionEquality(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  // conjugators rescaled by unimodular scalars act identically
  std::vector<CMat> rescaled = inst.phi.conj;
  for (CMat& w : rescaled) {
    const double th = 2 * M_PI * rng.uniform01();
    w *= Complex(std::cos(th), std::sin(th));
  }
  const Automorphism phased(inst.B, inst.phi.perm, rescaled);
  out.require(sameAction(inst.phi, phased, kTol), "phase changes must not change the action");
  // inverse and composition behave as actions
  const Automorphism roundTrip = composeAut(inst.phi, inverseAut(inst.phi));
  out.require(sameAction(roundTrip, Automorphism::identity(inst.B), kTol),
              "phi o phi^-1 must act as the identity");
  const Automorphism psi = randomAutomorphism(inst.B, rng);
  const Automorphism comp = composeAut(psi, inst.phi);
  for (const AlgebraElement& e : basisUnits(inst.B))
    out.observe(add(applyAutomorphism(comp, e),
                    scale(-1.0, applyAutomorphism(psi, applyAutomorphism(inst.phi, e))))
                    .norm(),
                kTol, "composite action");
  if (sameAction(inst.phi, phased, kTol))
    out.require(inst.phi.perm == phased.perm, "equal action forces equal permutation");
  return out;
}

inline CheckOutcome outerClassesGroup(const Instance& inst, Rng&) {
  CheckOutcome out;
  const std::vector<Perm> g = enumerateOuterClasses(inst.B);
  out.require(isClosedGroup(g), "outer classes must form a group");
  return out;
}

inline CheckOutcome innerKernel(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const Automorphism a = Automorphism::innerBy(randomUnitaryElement(inst.B, rng));
  const Automorphism b = Automorphism::innerBy(randomUnitaryElement(inst.B, rng));
  out.require(isInner(a) && isInner(b) && isInner(composeAut(a, b)),
              "inner automorphisms must compose to inner");
  out.require(isInner(inst.phi) == inst.phi.perm.isIdentity(),
              "isInner must match triviality of the permutation");
  return out;
}

inline CheckOutcome cauchySchwarz(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  for (int t = 0; t < 5; ++t) {
    const ModuleElement x = randomElement(inst.E, rng), y = randomElement(inst.E, rng);
    const double lhs = innerProduct(x, y).norm();
    out.require(lhs <= x.norm() * y.norm() + kTol, "Cauchy-Schwarz");
  }
  return out;
}

inline CheckOutcome adjointability(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  for (int t = 0; t < 3; ++t) {
    const AdjointableOperator a = randomOperator(inst.E, rng);
    const ModuleElement x = randomElement(inst.E, rng), y = randomElement(inst.E, rng);
    out.observe(add(innerProduct(apply(a, x), y),
                    scale(-1.0, innerProduct(x, apply(a.adjoint(), y))))
                    .norm(),
                kTol, "<ax,y>=<x,a*y>");
  }
  return out;
}

inline CheckOutcome innerSpanRank(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const RangeIdeal be = rangeIdeal(inst.E);
  const int target = be.algebra.dim();
  const int samples = 2 * std::max(target, 1) + 4;
  CMat span(inst.B.dim(), samples);
  for (int t = 0; t < samples; ++t)
    span.col(t) =
        innerProduct(randomElement(inst.E, rng), randomElement(inst.E, rng)).coords();
  out.require(numericalRank(span) == target, "span of inner products must fill the range ideal");
  return out;
}

inline CheckOutcome isoBruteForce(const Instance& inst, Rng& rng) {
  if (inst.E.dim() > 6) return CheckOutcome::skip("oracle bound: dim(E) > 6");
  CheckOutcome out;
  // compare against the Gram search for E itself and for shuffled variants
  std::vector<std::vector<int>> variants{inst.E.mults};
  std::vector<int> shuffled = inst.E.mults;
  for (int t = 0; t < 2; ++t) {
    if (shuffled.size() > 1) {
      const int a = rng.uniformInt(0, static_cast<int>(shuffled.size()) - 1);
      const int b = rng.uniformInt(0, static_cast<int>(shuffled.size()) - 1);
      std::swap(shuffled[a], shuffled[b]);
    }
    variants.push_back(shuffled);
  }
  if (!inst.E.mults.empty()) {
    std::vector<int> bumped = inst.E.mults;
    bumped[0] += 1;
    variants.push_back(bumped);
  }
  for (const std::vector<int>& m : variants) {
    const HilbertModule f(inst.B, m);
    const bool direct = modulesIsomorphic(inst.E, f);
    const GramOracleResult oracle = gramIntertwinerSearch(inst.E, f);
    out.require(direct == oracle.exists,
                "modulesIsomorphic disagrees with the Gram intertwiner search");
    out.residual = std::max(out.residual, oracle.residual);
  }
  return out;
}

inline std::pair<Correspondence, Correspondence> randomCorrPair(const Instance& inst, Rng& rng) {
  const int l1 = rng.uniformInt(1, 2), l2 = rng.uniformInt(1, 2);
  std::vector<int> p1, p2;
  for (int j = 0; j < l1; ++j) p1.push_back(rng.uniformInt(1, 2));
  for (int j = 0; j < l2; ++j) p2.push_back(rng.uniformInt(1, 2));
  MultiMatrixAlgebra c1(p1), c2(p2);
  Eigen::MatrixXi m1(inst.B.blockCount(), l1), m2(l1, l2);
  for (int i = 0; i < m1.rows(); ++i)
    for (int j = 0; j < l1; ++j) m1(i, j) = rng.uniformInt(0, 2);
  for (int i = 0; i < l1; ++i)
    for (int j = 0; j < l2; ++j) m2(i, j) = rng.uniformInt(0, 2);
  Correspondence corr1(inst.B, c1, m1), corr2(c1, c2, m2);
  // random twists on both
  std::vector<CMat> t1, t2;
  for (int mj : corr1.rightMults()) t1.push_back(rng.unitary(mj));
  for (int mj : corr2.rightMults()) t2.push_back(rng.unitary(mj));
  return {Correspondence(inst.B, c1, m1, t1), Correspondence(c1, c2, m2, t2)};
}

inline CheckOutcome tensorAssociativity(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  auto [m2, m3] = randomCorrPair(inst, rng);
  // module chain E (x) M2 (x) M3
  const ModuleElement x = randomElement(inst.E, rng);
  const ModuleElement y = randomElement(m2.asModule(), rng);
  const ModuleElement z = randomElement(m3.asModule(), rng);
  const Correspondence m23 = tensor(m2, m3);
  out.require((m2.mult * m3.mult) == m23.mult, "integer associativity");
  const HilbertModule e2 = extendModule(inst.E, m2);
  const ModuleElement lhsRaw =
      extendElem(e2, extendElem(inst.E, x, m2, y), m3, z);
  const ModuleElement rhs = extendElem(inst.E, x, m23, tensorElem(m2, y, m3, z));
  std::vector<std::vector<int>> perms;
  for (int d = 0; d < m3.target.blockCount(); ++d)
    perms.push_back(extendAssocRowPerm(inst.E, m2, m3, d));
  const ModuleElement lhs = reindexRows(lhsRaw, perms);
  for (size_t j = 0; j < lhs.entries.size(); ++j)
    out.observe(svMax(lhs.entries[j] - rhs.entries[j]), kTol, "element associativity");
  return out;
}

inline CheckOutcome tensorInnerProduct(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  auto [m1, m2] = randomCorrPair(inst, rng);
  const ModuleElement x = randomElement(m1.asModule(), rng);
  const ModuleElement xp = randomElement(m1.asModule(), rng);
  const ModuleElement y = randomElement(m2.asModule(), rng);
  const ModuleElement yp = randomElement(m2.asModule(), rng);
  const AlgebraElement lhs = innerProduct(tensorElem(m1, x, m2, y), tensorElem(m1, xp, m2, yp));
  const AlgebraElement rhs = innerProduct(y, leftAction(m2, innerProduct(x, xp), yp));
  out.observe(add(lhs, scale(-1.0, rhs)).norm(), kTol, "<x(x)y,x'(x)y'> = <y,<x,x'>y'>");
  return out;
}

inline CheckOutcome moritaInverses(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const std::vector<Perm> all = allPermutations(inst.B.blockCount());
  const Perm pi = all[rng.uniformInt(0, static_cast<int>(all.size()) - 1)];
  const Correspondence m(inst.B, inst.B, permutationMatrix(pi));
  out.require(isMorita(m), "permutation correspondence must be Morita");
  const Correspondence mstar = m.dual();
  out.require(tensor(m, mstar).mult ==
                  Eigen::MatrixXi(Eigen::MatrixXi::Identity(inst.B.blockCount(),
                                                            inst.B.blockCount())),
              "M (x) M* = source");
  out.require(tensor(mstar, m).mult ==
                  Eigen::MatrixXi(Eigen::MatrixXi::Identity(inst.B.blockCount(),
                                                            inst.B.blockCount())),
              "M* (x) M = target");
  return out;
}

inline CheckOutcome contravariance(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const Automorphism psi = randomAutomorphism(inst.B, rng);
  const Correspondence mphi = Correspondence::fromAutomorphismCorr(inst.phi);
  const Correspondence mpsi = Correspondence::fromAutomorphismCorr(psi);
  const Correspondence direct = Correspondence::fromAutomorphismCorr(composeAut(psi, inst.phi));
  const Correspondence tens = tensor(mphi, mpsi);
  out.require(direct.mult == tens.mult, "perm contravariance");
  // canonical bilinear unitary x (x) y -> psi(x) y: blockwise left
  // multiplication by psi's conjugators; it must carry the tensor action onto
  // the action of psi o phi and match the element model
  std::vector<CMat> beta(inst.B.blockCount());
  const Perm invPsi = psi.perm.inverse();
  for (int l = 0; l < inst.B.blockCount(); ++l) beta[l] = psi.conj[invPsi(l)];
  for (int t = 0; t < 2; ++t) {
    const AlgebraElement b = randomElement(inst.B, rng);
    for (int l = 0; l < inst.B.blockCount(); ++l)
      out.observe(svMax(beta[l] * tens.leftActionBlock(b, l) * beta[l].adjoint() -
                        direct.leftActionBlock(b, l)),
                  kTol, "conjugators' action under the canonical isomorphism");
  }
  for (int t = 0; t < 2; ++t) {
    const ModuleElement x = randomElement(mphi.asModule(), rng);
    const ModuleElement y = randomElement(mpsi.asModule(), rng);
    const ModuleElement xy = tensorElem(mphi, x, mpsi, y);
    const AlgebraElement xAlg(inst.B, x.entries);
    const AlgebraElement target = multiply(applyAutomorphism(psi, xAlg),
                                           AlgebraElement(inst.B, y.entries));
    for (int l = 0; l < inst.B.blockCount(); ++l)
      out.observe(svMax(beta[l] * xy.entries[l] - target.entries[l]), kTol,
                  "x (x) y -> psi(x) y");
  }
  return out;
}

inline CheckOutcome isometryImpliesLinear(const Instance& inst, Rng&) {
  CheckOutcome out;
  const Correspondence hom = Correspondence::fromAutomorphismCorr(inst.u.phi);
  const RawModuleMap raw = inst.u.toRaw();
  out.observe(phiIsometryResidual(raw, hom), kTol, "witness isometry");
  out.observe(phiLinearResidual(raw, hom), kTol, "isometry implies linear");
  const RawModuleMap iphi = canonicalMap(inst.E, hom);
  out.observe(phiIsometryResidual(iphi, hom), kTol, "i_phi isometry");
  out.observe(phiLinearResidual(iphi, hom), kTol, "i_phi linear");
  return out;
}

/// A random phi-linear map on E for the instance automorphism, in blockwise
/// closed form (a x)_{sigma(i)} = A_i x_i w_i^+.
inline RawModuleMap randomPhiLinearMap(const Instance& inst, Rng& rng) {
  const Perm& sigma = inst.phi.perm;
  std::vector<CMat> a;
  for (int i = 0; i < inst.B.blockCount(); ++i)
    a.push_back(rng.gaussianMatrix(inst.E.mults[sigma(i)], inst.E.mults[i]));
  RawModuleMap out = RawModuleMap::zeroMap(inst.E, inst.E);
  const std::vector<ModuleElement> basis = basisUnits(inst.E);
  for (size_t t = 0; t < basis.size(); ++t) {
    ModuleElement y = ModuleElement::zero(inst.E);
    for (int i = 0; i < inst.B.blockCount(); ++i)
      y.entries[sigma(i)] = a[i] * basis[t].entries[i] * inst.phi.conj[i].adjoint();
    out.matrix.col(static_cast<Eigen::Index>(t)) = y.coords();
  }
  return out;
}

inline CheckOutcome adjointableImpliesLinear(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const Correspondence hom = Correspondence::fromAutomorphismCorr(inst.phi);
  const RawModuleMap a = randomPhiLinearMap(inst, rng);
  const RawModuleMap astar = phiAdjoint(a, hom);
  out.observe(phiLinearResidual(a, hom), kTol, "adjointable map is linear");
  // the defining relation of the adjoint, re-evaluated independently
  for (int t = 0; t < 3; ++t) {
    const ModuleElement x = randomElement(inst.E, rng), y = randomElement(inst.E, rng);
    const AlgebraElement lhs = innerProduct(a.apply(x), y);
    const AlgebraElement rhs =
        hom.applyHom(innerProduct(x, astar.apply(y)));
    out.observe(add(lhs, scale(-1.0, rhs)).norm(), kTol, "adjoint defining relation");
  }
  return out;
}

inline CheckOutcome compositionGrading(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const Automorphism phi2 = randomAutomorphism(inst.B, rng);
  Instance alt = inst;
  alt.phi = phi2;
  const RawModuleMap a1 = randomPhiLinearMap(inst, rng);
  const RawModuleMap a2 = randomPhiLinearMap(alt, rng);
  const Correspondence hom12 =
      Correspondence::fromAutomorphismCorr(composeAut(inst.phi, phi2));
  out.observe(phiLinearResidual(compose(a1, a2), hom12), kTol,
              "composition of graded maps is graded");
  return out;
}

inline CheckOutcome phieClosure(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const PhiEGroup g = computePhiE(inst.E);
  if (g.order() == 0) return CheckOutcome::skip("empty Phi_E skeleton");
  const PhiEClass& a = g.classes[rng.uniformInt(0, g.order() - 1)];
  const PhiEClass& b = g.classes[rng.uniformInt(0, g.order() - 1)];
  const GeneralizedUnitary comp = composeGU(a.witness, b.witness);
  const ExistsUnitaryResult res = existsPhiUnitary(inst.E, comp.phi);
  out.require(res.exists(), "composite class must stay in Phi_E");
  out.require(checkPhiUnitary(comp.toRaw(), comp.phi, 1e-7), "composite witness is phi-unitary");
  const PhiEClass& inv = g.inverseOf(a);
  out.require(existsPhiUnitary(inst.E, inv.extension).exists(), "inverse class stays in Phi_E");
  return out;
}

inline CheckOutcome prop114Uniqueness(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const RangeIdeal be = rangeIdeal(inst.E);
  if (be.blockCount() == 0) return CheckOutcome::skip("zero module");
  // two automorphisms compatible with the same unitary agree on B_E
  Automorphism induced = inducedAutomorphism(inst.u);
  const auto direct = restrictToRangeIdeal(inst.u.phi, be);
  out.require(direct.has_value(), "witness automorphism restricts to B_E");
  if (direct) out.require(sameAction(induced, *direct, 1e-7), "agreement on the range ideal");
  // altering phi off the support does not disturb phi-unitarity
  Automorphism offSupport = inst.u.phi;
  bool changed = false;
  for (int i = 0; i < inst.B.blockCount(); ++i)
    if (inst.E.mults[i] == 0) {
      offSupport.conj[i] = rng.unitary(inst.B.blocks[i]);
      changed = true;
    }
  if (changed)
    out.require(checkPhiUnitary(inst.u.toRaw(), offSupport, 1e-7),
                "class only sees the range ideal");
  return out;
}

inline CheckOutcome existsOracle(const Instance& inst, Rng&) {
  CheckOutcome out;
  const GramOracleResult oracle = gramUnitaryWitnessSearch(inst.E, inst.phi);
  const ExistsUnitaryResult direct = existsPhiUnitary(inst.E, inst.phi);
  out.require(oracle.exists == direct.exists(),
              "existsPhiUnitary disagrees with the Gram factorization oracle");
  out.residual = oracle.residual;
  return out;
}

inline CheckOutcome prop22(const Instance& inst, Rng& rng) {
  if (!inst.thetaAuto) return CheckOutcome::skip("zero module");
  CheckOutcome out;
  const Automorphism& theta1 = *inst.thetaAuto;
  const OperatorAlgebra oa = adjointableAlgebra(inst.E);
  // inner perturbation: same class
  const Automorphism theta2 =
      composeAut(Automorphism::innerBy(randomUnitaryElement(oa.algebra, rng)), theta1);
  out.require(theta1.perm == theta2.perm, "inner perturbation keeps the class");
  const auto w = innerEquivalenceWitness(inst.E, theta1, theta2);
  out.require(w.has_value(), "inner equivalence witness must exist");
  if (w) {
    for (int t = 0; t < 2; ++t) {
      const AdjointableOperator a = randomOperator(inst.E, rng);
      const AdjointableOperator lhs = applyOperatorAutomorphism(inst.E, theta2, a);
      const AdjointableOperator rhs =
          compose(compose(*w, applyOperatorAutomorphism(inst.E, theta1, a)), w->adjoint());
      for (size_t j = 0; j < lhs.blocks.size(); ++j)
        out.observe(svMax(lhs.blocks[j] - rhs.blocks[j]), kTol, "theta2 = w theta1 w*");
    }
  }
  // different permutation: different class
  if (theta1.perm.size() > 1) {
    const std::vector<Perm> perms = permutationsPreserving(oa.algebra.blocks);
    for (const Perm& p : perms)
      if (p != theta1.perm) {
        std::vector<CMat> c;
        for (int mi : oa.algebra.blocks) c.push_back(cIdentity(mi));
        const Automorphism theta3(oa.algebra, p, std::move(c));
        out.require(!innerEquivalenceWitness(inst.E, theta1, theta3).has_value(),
                    "distinct permutations are never inner-equivalent");
        break;
      }
  }
  return out;
}

inline CheckOutcome thm21Reconstruction(const Instance& inst, Rng& rng) {
  if (!inst.theta) return CheckOutcome::skip("zero module");
  CheckOutcome out;
  const UnitalHom& theta = *inst.theta;
  const RawModuleMap u = theorem21Unitary(theta);
  out.require(isUnitaryMatrix(u.matrix, kTol), "theorem 2.1 map is unitary");
  const MultiplicityCorrespondence fc = multiplicityCorrespondence(theta);
  const HilbertModule dom = u.domain;
  // intertwining over a basis of B^a(E)
  for (const AlgebraElement& ab : basisUnits(adjointableAlgebra(inst.E).algebra)) {
    const AdjointableOperator a = adjointableAlgebra(inst.E).toOperator(ab);
    // (a (x) id) on the extension: block-diagonal copies of a
    RawModuleMap aext = RawModuleMap::zeroMap(dom, dom);
    const std::vector<ModuleElement> basis = basisUnits(dom);
    for (size_t t = 0; t < basis.size(); ++t) {
      ModuleElement y = ModuleElement::zero(dom);
      for (int l = 0; l < dom.algebra.blockCount(); ++l) {
        CMat diag = CMat::Zero(dom.mults[l], dom.mults[l]);
        int off = 0;
        for (const RowGroup& g : fc.liftedToBase.rowGroups(l)) {
          const int h = inst.E.mults[g.srcBlock];
          diag.block(off, off, h, h) = a.blocks[g.srcBlock];
          off += h;
        }
        y.entries[l] = diag * basis[t].entries[l];
      }
      aext.matrix.col(static_cast<Eigen::Index>(t)) = y.coords();
    }
    const CMat lhs = theta.apply(a).blocks.size() ? RawModuleMap::fromOperator(theta.apply(a)).matrix
                                                  : CMat();
    const CMat rhs = u.matrix * aext.matrix * u.matrix.adjoint();
    out.observe(svMax(lhs - rhs), kTol, "theta(a) = u (a (x) id) u*");
  }
  // defining formula on random elements
  for (int t = 0; t < 2; ++t) {
    const ModuleElement x = randomElement(inst.E, rng), y = randomElement(inst.E, rng);
    const ModuleElement z = randomElement(theta.targetModule, rng);
    const ModuleElement lhs = ModuleElement::fromCoords(
        theta.targetModule,
        u.matrix * extendElem(inst.E, x, fc.liftedToBase, fc.elem(inst.E, y, z)).coords());
    const ModuleElement rhs = apply(theta.apply(rankOne(x, y)), z);
    for (size_t j = 0; j < lhs.entries.size(); ++j)
      out.observe(svMax(lhs.entries[j] - rhs.entries[j]), kTol, "u(x (x) y* (x) z) = theta(xy*)z");
  }
  return out;
}

inline CheckOutcome iteratedAssociativity(const Instance& inst, Rng& rng) {
  if (!inst.thetaAuto) return CheckOutcome::skip("zero module");
  CheckOutcome out;
  const OperatorAlgebra oa = adjointableAlgebra(inst.E);
  const Automorphism t1 = *inst.thetaAuto;
  const Automorphism t2 = randomAutomorphism(oa.algebra, rng);
  const Automorphism t3 = randomAutomorphism(oa.algebra, rng);
  // class map composes contravariantly; the two bracketings of the triple
  // tensor of classes must agree exactly at the permutation level
  const Perm direct = composeAut(composeAut(t1, t2), t3).perm;
  const Perm viaTensorL =
      permOfMatrix(permutationMatrix(t3.perm) * permutationMatrix(t2.perm) *
                   permutationMatrix(t1.perm));
  const Perm viaTensorR =
      permOfMatrix((permutationMatrix(t3.perm) * permutationMatrix(t2.perm)) *
                   permutationMatrix(t1.perm));
  out.require(viaTensorL == viaTensorR && viaTensorL == direct,
              "iterated class identifications associate");
  return out;
}

inline CheckOutcome cor23Injectivity(const Instance& inst, Rng&) {
  if (!inst.thetaAuto) return CheckOutcome::skip("zero module");
  CheckOutcome out;
  const Automorphism& theta = *inst.thetaAuto;
  const UnitalHom hom = UnitalHom::fromOperatorAutomorphism(inst.E, theta);
  const MultiplicityCorrespondence fc = multiplicityCorrespondence(hom);
  const RangeIdeal be = rangeIdeal(inst.E);
  const Correspondence eTheta = restrictTargetToIdeal(fc.corr, be);
  const Perm cls = empiricalMoritaPerm(eTheta);
  out.require((cls.isIdentity()) == theta.perm.isIdentity(),
              "trivial Picard class iff inner automorphism");
  out.require(cls == theta.perm, "class map reads off the permutation");
  return out;
}

inline CheckOutcome groupsNormality(const Instance& inst, Rng&) {
  CheckOutcome out;
  const Theorem35Report rep = theorem35Pipeline(inst.E);
  out.require(rep.kernelMatchesGin, "kernel of the class map equals Phi_E meet gin");
  out.require(isNormalIn(rep.kernel.empty() ? std::vector<Perm>{Perm::identity(
                                                  static_cast<int>(inst.E.support().size()))}
                                            : rep.kernel,
                         rep.phiE.skeleton()),
              "Phi_E meet gin is normal in Phi_E");
  return out;
}

inline CheckOutcome classmapAntihom(const Instance& inst, Rng& rng) {
  CheckOutcome out;
  const PhiEGroup g = computePhiE(inst.E);
  if (g.order() == 0) return CheckOutcome::skip("empty skeleton");
  const PicardGroup pic = picardGroup(g.bE.algebra);
  const PhiEClass& a = g.classes[rng.uniformInt(0, g.order() - 1)];
  const PhiEClass& b = g.classes[rng.uniformInt(0, g.order() - 1)];
  const PhiEClass& ab = g.product(a, b);
  const PicardElement clsA{g.bE.algebra, empiricalMoritaPerm(
                                             Correspondence::fromAutomorphismCorr(a.phiOnBE))};
  const PicardElement clsB{g.bE.algebra, empiricalMoritaPerm(
                                             Correspondence::fromAutomorphismCorr(b.phiOnBE))};
  const PicardElement clsAB{g.bE.algebra, empiricalMoritaPerm(
                                              Correspondence::fromAutomorphismCorr(ab.phiOnBE))};
  out.require(pic.product(clsB, clsA).perm == clsAB.perm,
              "class(phi1 o phi2) = class(phi2) (x) class(phi1)");
  out.require(pic.opProduct(clsA, clsB).perm == clsAB.perm, "op view composes covariantly");
  return out;
}

inline CheckOutcome twoRoutes(const Instance& inst, Rng&) {
  CheckOutcome out;
  const Theorem35Report rep = theorem35Pipeline(inst.E);
  out.require(rep.routesAgree, "aut route and conjugation route to Pic agree");
  out.require(rep.inclusionsHold(), "theorem 3.5 inclusions");
  return out;
}

inline CheckOutcome semidirectReconstruction(const Instance& inst, Rng&) {
  CheckOutcome out;
  // canonical section element of the witness's own class: identity blocks
  std::vector<CMat> w;
  for (int m : inst.E.mults) w.push_back(cIdentity(m));
  const GeneralizedUnitary section(inst.E, inst.u.phi, std::move(w));
  const AdjointableOperator v = unitaryQuotientWitness(inst.u, section);
  out.require(isUnitary(v, 1e-7), "quotient witness is an ordinary unitary");
  const GeneralizedUnitary reconstructed = composeWithUnitary(v, section);
  out.observe(svMax(reconstructed.toRaw().matrix - inst.u.toRaw().matrix), kTol,
              "u = v . section(class(u))");
  return out;
}

inline CheckOutcome goldenExamples(const Instance& inst, Rng&) {
  if (!inst.golden) return CheckOutcome::skip("not a golden instance");
  CheckOutcome out;
  if (inst.name == "golden:examples_2_5") {
    const ExistsUnitaryResult res = existsPhiUnitary(inst.E, inst.phi);
    out.require(!res.exists(), "Example 2.5: no flip unitary");
    out.require(res.certificate && res.certificate->reason == "multiplicity mismatch",
                "Example 2.5 certificate");
    const HilbertModule ext =
        extendModule(inst.E, Correspondence::fromAutomorphismCorr(inst.phi));
    out.require(ext.mults == std::vector<int>({1, 2}), "Example 2.5 extension mults");
    out.require(!modulesIsomorphic(ext, inst.E), "extension not isomorphic to E");
  } else if (inst.name == "golden:example_3_3") {
    const ExistsUnitaryResult res = existsPhiUnitary(inst.E, inst.phi);
    out.require(!res.exists(), "Example 3.3: no flip unitary");
    out.require(res.certificate && res.certificate->reason == "support not invariant",
                "Example 3.3 certificate");
  } else if (inst.name == "golden:sec2_counterexample") {
    const PicardGroup pic = picardGroup(inst.B);
    out.require(pic.order() == 2, "Pic(C + M2) has order 2");
    out.require(autImageInPicard(inst.B).size() == 1, "aut image is trivial");
    out.require(!hasUnitVector(inst.E), "M has no unit vector");
    Eigen::MatrixXi mu(2, 2);
    mu << 0, 1, 1, 0;
    const Correspondence m(inst.B, inst.B, mu);
    out.require(isMorita(m), "M is a Morita equivalence");
    const HilbertModule em = extendModule(inst.E, m);
    out.require(em.mults == inst.B.blocks, "E (x) M = B");
    out.require(!modulesIsomorphic(em, inst.E), "E (x) M != E");
  }
  return out;
}

}  // namespace checks

inline const std::vector<RegisteredCheck>& checkRegistry() {
  static const std::vector<RegisteredCheck> reg = {
      {"algebra/star-homomorphism", {"algebra.star-homomorphism"}, checks::starHomomorphism},
      {"algebra/action-equality", {"algebra.action-equality"}, checks::actionEquality},
      {"algebra/outer-classes-group", {"algebra.outer-classes-group"}, checks::outerClassesGroup},
      {"algebra/inner-kernel", {"algebra.inner-kernel"}, checks::innerKernel},
      {"hilbmod/cauchy-schwarz", {"hilbmod.cauchy-schwarz"}, checks::cauchySchwarz},
      {"hilbmod/adjointability", {"hilbmod.adjointability"}, checks::adjointability},
      {"hilbmod/inner-span-rank", {"hilbmod.inner-span-rank"}, checks::innerSpanRank},
      {"hilbmod/iso-brute-force", {"hilbmod.iso-brute-force"}, checks::isoBruteForce},
      {"corr/tensor-associativity", {"corr.tensor-associativity"}, checks::tensorAssociativity},
      {"corr/tensor-inner-product", {"corr.tensor-inner-product"}, checks::tensorInnerProduct},
      {"corr/morita-inverses", {"corr.morita-inverses"}, checks::moritaInverses},
      {"corr/contravariance", {"corr.contravariance"}, checks::contravariance},
      {"genmap/isometry-implies-linear", {"genmap.isometry-implies-linear"},
       checks::isometryImpliesLinear},
      {"genmap/adjointable-implies-linear", {"genmap.adjointable-implies-linear"},
       checks::adjointableImpliesLinear},
      {"genmap/composition-grading", {"genmap.composition-grading"}, checks::compositionGrading},
      {"genmap/phie-closure", {"genmap.phie-closure"}, checks::phieClosure},
      {"genmap/prop114-uniqueness", {"genmap.prop114-uniqueness"}, checks::prop114Uniqueness},
      {"genmap/exists-oracle", {"genmap.exists-oracle"}, checks::existsOracle},
      {"reptheory/prop22", {"reptheory.prop22"}, checks::prop22},
      {"reptheory/thm21-reconstruction", {"reptheory.thm21-reconstruction"},
       checks::thm21Reconstruction},
      {"reptheory/iterated-associativity", {"reptheory.iterated-associativity"},
       checks::iteratedAssociativity},
      {"reptheory/cor23-injectivity", {"reptheory.cor23-injectivity"}, checks::cor23Injectivity},
      {"groups/normality", {"groups.normality"}, checks::groupsNormality},
      {"groups/classmap-antihom", {"groups.classmap-antihom"}, checks::classmapAntihom},
      {"groups/two-routes", {"groups.two-routes"}, checks::twoRoutes},
      {"groups/semidirect-reconstruction", {"groups.semidirect-reconstruction"},
       checks::semidirectReconstruction},
      {"golden/paper-examples", {"golden.paper-examples"}, checks::goldenExamples},
  };
  return reg;
}

// ---------------------------------------------------------------------------
// Running and shrinking
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string check;
  std::string instance;
  bool pass = true;
  bool skipped = false;
  double residual = 0;
  std::string detail;
  std::string shrunk;  // name of the minimized reproducer, empty when none
};

namespace detail {

/// Joint orbits of the permutations attached to an instance; dropping whole
/// orbits keeps the shrunken shape closed under them.
inline std::vector<std::vector<int>> permOrbits(const Instance& inst) {
  const int k = inst.B.blockCount();
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (int i = 0; i < k; ++i) {
    unite(i, inst.phi.perm(i));
    unite(i, inst.u.phi.perm(i));
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < k; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  return out;
}

inline std::vector<std::pair<std::vector<int>, std::vector<int>>> shrinkShapes(
    const Instance& inst) {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
  const std::vector<int>& n = inst.B.blocks;
  const std::vector<int>& m = inst.E.mults;
  for (const std::vector<int>& orbit : permOrbits(inst)) {
    if (static_cast<int>(orbit.size()) == inst.B.blockCount()) continue;  // keep k >= 1
    std::vector<int> n2, m2;
    for (int i = 0; i < inst.B.blockCount(); ++i)
      if (std::find(orbit.begin(), orbit.end(), i) == orbit.end()) {
        n2.push_back(n[i]);
        m2.push_back(m[i]);
      }
    out.emplace_back(std::move(n2), std::move(m2));
  }
  for (int i = 0; i < inst.B.blockCount(); ++i)
    if (m[i] >= 1) {
      std::vector<int> m2 = m;
      --m2[i];
      out.emplace_back(n, std::move(m2));
    }
  return out;
}

}  // namespace detail

/// Runs one check with shrinking on failure: drop permutation orbits of
/// blocks, then reduce multiplicities, re-running after each reduction and
/// descending into the first reduction that still fails.
inline CheckResult runCheck(const RegisteredCheck& chk, const Instance& inst) {
  CheckResult res;
  res.check = chk.name;
  res.instance = inst.name;
  Rng rng(detail::mixSeed(inst.instanceSeed, std::hash<std::string>{}(chk.name)));
  CheckOutcome out;
  try {
    out = chk.fn(inst, rng);
  } catch (const std::exception& ex) {
    out = CheckOutcome::fail(0, std::string("exception: ") + ex.what());
  }
  res.pass = out.pass;
  res.skipped = out.skipped;
  res.residual = out.residual;
  res.detail = out.detail;
  if (out.pass) return res;

  // shrink
  Instance current = inst;
  bool reduced = true;
  while (reduced) {
    reduced = false;
    for (const auto& [n2, m2] : detail::shrinkShapes(current)) {
      Instance cand;
      try {
        cand = makeInstance(detail::mixSeed(current.instanceSeed, 0x517ee5ull), n2, m2);
      } catch (const std::exception&) {
        continue;
      }
      Rng rng2(detail::mixSeed(cand.instanceSeed, std::hash<std::string>{}(chk.name)));
      CheckOutcome o2;
      try {
        o2 = chk.fn(cand, rng2);
      } catch (const std::exception& ex) {
        o2 = CheckOutcome::fail(0, std::string("exception: ") + ex.what());
      }
      if (!o2.pass && !o2.skipped) {
        current = cand;
        reduced = true;
        break;
      }
    }
  }
  if (current.name != inst.name) res.shrunk = current.name;
  return res;
}

inline std::vector<CheckResult> runAll(const InstanceSpec& spec) {
  std::vector<CheckResult> results;
  const std::vector<Instance> instances = generate(spec);
  for (const RegisteredCheck& chk : checkRegistry())
    for (const Instance& inst : instances) results.push_back(runCheck(chk, inst));
  return results;
}

}  // namespace picmod
