#include "picmod/algebra.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace picmod;

namespace {
AlgebraElement scalarElement(const MultiMatrixAlgebra& alg, std::vector<Complex> vals) {
  AlgebraElement e = AlgebraElement::zero(alg);
  for (size_t i = 0; i < vals.size(); ++i) e.entries[i](0, 0) = vals[i];
  return e;
}
}  // namespace

TEST_CASE("multiply: unit element and scalar blocks") {
  MultiMatrixAlgebra b({1, 1});
  const AlgebraElement x = scalarElement(b, {Complex(2), Complex(3)});
  CHECK(approxEqual(multiply(AlgebraElement::identity(b), x), x));
  const AlgebraElement y = scalarElement(b, {Complex(5), Complex(7)});
  const AlgebraElement xy = multiply(x, y);
  CHECK(xy.entries[0](0, 0) == Complex(10));
  CHECK(xy.entries[1](0, 0) == Complex(21));
}

TEST_CASE("multiply: adjoint anti-homomorphism on random elements") {
  Rng rng(101);
  MultiMatrixAlgebra b({2, 3});
  const AlgebraElement x = randomElement(b, rng), y = randomElement(b, rng);
  const AlgebraElement lhs = adjointOf(multiply(x, y));
  const AlgebraElement rhs = multiply(adjointOf(y), adjointOf(x));
  CHECK(add(lhs, scale(-1.0, rhs)).norm() <= 1e-12);
}

TEST_CASE("multiply: owner mismatch") {
  MultiMatrixAlgebra b({2}), c({3});
  CHECK_THROWS_AS(multiply(AlgebraElement::identity(b), AlgebraElement::identity(c)),
                  std::invalid_argument);
}

TEST_CASE("applyAutomorphism: identity, scalar flip, norm preservation") {
  Rng rng(102);
  MultiMatrixAlgebra b({1, 1});
  const AlgebraElement x = scalarElement(b, {Complex(2), Complex(3)});
  CHECK(approxEqual(applyAutomorphism(Automorphism::identity(b), x), x));

  const Automorphism flip(b, Perm({1, 0}), {cIdentity(1), cIdentity(1)});
  const AlgebraElement fx = applyAutomorphism(flip, x);
  CHECK(fx.entries[0](0, 0) == Complex(3));
  CHECK(fx.entries[1](0, 0) == Complex(2));

  MultiMatrixAlgebra b2({2, 3});
  const Automorphism phi = randomAutomorphism(b2, rng);
  const AlgebraElement y = randomElement(b2, rng);
  CHECK(std::abs(applyAutomorphism(phi, y).norm() - y.norm()) <= 1e-12);
  CHECK_THROWS_AS(applyAutomorphism(phi, x), std::invalid_argument);
}

TEST_CASE("composeAut and inverseAut act as expected") {
  Rng rng(103);
  MultiMatrixAlgebra b({1, 1});
  const Automorphism flip(b, Perm({1, 0}), {cIdentity(1), cIdentity(1)});
  CHECK(sameAction(composeAut(flip, flip), Automorphism::identity(b)));

  MultiMatrixAlgebra b2({2, 2, 1});
  const Automorphism phi = randomAutomorphism(b2, rng);
  const Automorphism psi = randomAutomorphism(b2, rng);
  CHECK(sameAction(composeAut(phi, inverseAut(phi)), Automorphism::identity(b2)));
  const Automorphism comp = composeAut(psi, phi);
  for (const AlgebraElement& e : basisUnits(b2)) {
    const AlgebraElement lhs = applyAutomorphism(comp, e);
    const AlgebraElement rhs = applyAutomorphism(psi, applyAutomorphism(phi, e));
    CHECK(add(lhs, scale(-1.0, rhs)).norm() <= 1e-12);
  }
}

TEST_CASE("isInner tracks the permutation") {
  Rng rng(104);
  MultiMatrixAlgebra b({1, 1});
  CHECK(isInner(Automorphism::identity(b)));
  CHECK_FALSE(isInner(Automorphism(b, Perm({1, 0}), {cIdentity(1), cIdentity(1)})));
  MultiMatrixAlgebra b2({2, 3});
  CHECK(isInner(Automorphism::innerBy(randomUnitaryElement(b2, rng))));
}

TEST_CASE("isInner is a kernel predicate") {
  Rng rng(105);
  MultiMatrixAlgebra b({2, 2});
  const Automorphism a = Automorphism::innerBy(randomUnitaryElement(b, rng));
  const Automorphism c = Automorphism::innerBy(randomUnitaryElement(b, rng));
  CHECK(isInner(composeAut(a, c)));
}

TEST_CASE("enumerateOuterClasses") {
  CHECK(enumerateOuterClasses(MultiMatrixAlgebra({1, 2})).size() == 1);
  const auto g11 = enumerateOuterClasses(MultiMatrixAlgebra({1, 1}));
  CHECK(g11.size() == 2);
  CHECK(enumerateOuterClasses(MultiMatrixAlgebra({3})).size() == 1);
  CHECK(isClosedGroup(g11));
  CHECK(isClosedGroup(enumerateOuterClasses(MultiMatrixAlgebra({2, 1, 2, 1}))));
}

TEST_CASE("automorphism equality is action equality") {
  Rng rng(106);
  MultiMatrixAlgebra b({2, 2});
  const Automorphism phi = randomAutomorphism(b, rng);
  std::vector<CMat> rescaled = phi.conj;
  rescaled[0] *= Complex(0, 1);
  rescaled[1] *= Complex(std::cos(1.0), std::sin(1.0));
  const Automorphism phased(b, phi.perm, rescaled);
  CHECK(sameAction(phi, phased));
  // canonical phases make the conjugators literally equal
  const Automorphism c1 = canonicalizePhases(phi), c2 = canonicalizePhases(phased);
  for (int i = 0; i < b.blockCount(); ++i) CHECK(approxEqual(c1.conj[i], c2.conj[i], 1e-12));
  // a different permutation can never act the same
  const Automorphism other(b, Perm({1, 0}), {rng.unitary(2), rng.unitary(2)});
  CHECK_FALSE(sameAction(phi, other));
}

TEST_CASE("automorphism rejects shape-incompatible permutations") {
  MultiMatrixAlgebra b({1, 2});
  CHECK_THROWS_AS(Automorphism(b, Perm({1, 0}), {cIdentity(1), cIdentity(2)}),
                  std::invalid_argument);
}
