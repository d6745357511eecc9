#include "picmod/instance_io.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace picmod;

TEST_CASE("parsing the shipped golden files") {
  const InstanceFile f25 = parseInstanceText(R"({"blocks":[1,1],"mult":[2,1],"perm":[2,1]})");
  CHECK(f25.algebra.blocks == std::vector<int>({1, 1}));
  REQUIRE(f25.module);
  CHECK(f25.module->mults == std::vector<int>({2, 1}));
  REQUIRE(f25.automorphism);
  CHECK(f25.automorphism->perm == Perm({1, 0}));

  const InstanceFile fM = parseInstanceText(
      R"({"blocks":[1,2],"mult":[2,1],"multMatrix":[[0,1],[1,0]]})");
  REQUIRE(fM.correspondence);
  CHECK(isMorita(*fM.correspondence));
}

TEST_CASE("validation errors name the offending field") {
  auto fieldOf = [](const std::string& text) {
    try {
      parseInstanceText(text);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("(no error)");
  };
  CHECK(fieldOf(R"({})") == "blocks");
  CHECK(fieldOf(R"({"blocks":[0]})") == "blocks");
  CHECK(fieldOf(R"({"blocks":[1,1],"mult":[1]})") == "mult");
  CHECK(fieldOf(R"({"blocks":[1,1],"mult":[1,-1]})") == "mult");
  CHECK(fieldOf(R"({"blocks":[1,2],"perm":[2,1]})") == "perm");  // size-incompatible swap
  CHECK(fieldOf(R"({"blocks":[1,1],"perm":[1,1]})") == "perm");  // not a permutation
  CHECK(fieldOf(R"({"blocks":[1,1],"conjugators":[[[[1,0]]],[[[1,0]]]]})") == "conjugators");
  CHECK(fieldOf(R"({"blocks":[1],"perm":[1],"conjugators":[[[[2,0]]]]})") ==
        "conjugators[1]");  // not unitary
  CHECK(fieldOf(R"({"blocks":[1,1],"multMatrix":[[1,0]]})") == "multMatrix");
  CHECK(fieldOf("not json at all") == "document");
}

TEST_CASE("perm error message names the constraint") {
  try {
    parseInstanceText(R"({"blocks":[1,2],"perm":[2,1]})");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("preserve block sizes") != std::string::npos);
  }
}

TEST_CASE("witness serialization round trip") {
  Rng rng(701);
  MultiMatrixAlgebra b({2, 1});
  HilbertModule e(b, {2, 2});
  const Automorphism phi = randomAutomorphism(b, rng);
  const ExistsUnitaryResult res = existsPhiUnitary(e, phi);
  REQUIRE(res.exists());
  const GeneralizedUnitary u = composeWithUnitary(randomUnitaryOperator(e, rng), *res.witness);
  const std::string doc = witnessJson(u);
  const GeneralizedUnitary back = parseWitness(doc, e);
  CHECK(svMax(back.toRaw().matrix - u.toRaw().matrix) <= 1e-9);
  CHECK(checkPhiUnitary(back.toRaw(), back.phi, 1e-7));
}

TEST_CASE("witness parsing rejects malformed documents") {
  MultiMatrixAlgebra b({1, 1});
  HilbertModule e(b, {1, 1});
  CHECK_THROWS_AS(parseWitness("{}", e), ValidationError);
  CHECK_THROWS_AS(parseWitness(R"({"verdict":"NO"})", e), ValidationError);
  CHECK_THROWS_AS(
      parseWitness(R"({"verdict":"YES","perm":[2,1],"conjugators":[],"blockUnitaries":[]})", e),
      ValidationError);
}

TEST_CASE("numbers print with 12 significant digits") {
  CHECK(fmtNum(1.0 / 3.0) == "0.333333333333");
  CHECK(fmtNum(0.0) == "0");
  CHECK(fmtNum(1e-14) == "1e-14");
  CHECK(fmtNum(123456789.0) == "123456789");
}

TEST_CASE("certificate serialization") {
  const UnitaryCertificate c{"multiplicity mismatch", 0, 1};
  CHECK(certificateJson(c) ==
        R"({"verdict":"NO","reason":"multiplicity mismatch","blocks":[1,2]})");
}
