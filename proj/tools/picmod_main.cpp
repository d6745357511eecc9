// Command-line interface: answer decision and computation queries about
// generalized unitaries and Picard groups on instances described by JSON
// files, and run the randomized verification suite.
//
// Exit codes: 0 success (including a NO answer), 1 check/validation failure
// of a witness or verification run, 2 usage or parse errors.

#include "picmod/picmod.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace picmod;

/// Prints a permutation of support positions in terms of the original
/// 1-based block indices.
std::string parentCycles(const Perm& supportPerm, const std::vector<int>& parentBlock, int k) {
  std::vector<int> img(k);
  std::iota(img.begin(), img.end(), 0);
  for (int s = 0; s < supportPerm.size(); ++s)
    img[parentBlock[s]] = parentBlock[supportPerm(s)];
  return Perm(img).cycleString();
}

std::string permListing(const std::vector<Perm>& perms, const std::vector<int>& parentBlock,
                        int k) {
  std::vector<Perm> sorted = perms;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (size_t i = 0; i < sorted.size(); ++i)
    out += (i ? ", " : "") + parentCycles(sorted[i], parentBlock, k);
  return out.empty() ? "(none)" : out;
}

std::string generatorListing(const std::vector<Perm>& perms, const std::vector<int>& parentBlock,
                             int k) {
  std::vector<Perm> sorted = perms;
  std::sort(sorted.begin(), sorted.end());
  const std::vector<Perm> gens = generatingSet(sorted);
  std::string out;
  for (size_t i = 0; i < gens.size(); ++i)
    out += (i ? ", " : "") + parentCycles(gens[i], parentBlock, k);
  return out.empty() ? "(none)" : out;
}

std::vector<int> identityEmbedding(int k) {
  std::vector<int> v(k);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

const HilbertModule& requireModule(const InstanceFile& f) {
  if (!f.module) throw ValidationError("mult", "required by this command");
  return *f.module;
}

const Automorphism& requireAutomorphism(const InstanceFile& f) {
  if (!f.automorphism) throw ValidationError("perm", "required by this command");
  return *f.automorphism;
}

int cmdPic(const std::string& path) {
  const InstanceFile f = parseInstancePath(path);
  const PicardGroup pic = picardGroup(f.algebra);
  const std::vector<PicardElement> aut = autImageInPicard(f.algebra);
  std::vector<Perm> picPerms, autPerms;
  for (const auto& e : pic.elements) picPerms.push_back(e.perm);
  for (const auto& e : aut) autPerms.push_back(e.perm);
  const std::vector<int> embed = identityEmbedding(f.algebra.blockCount());
  std::cout << "Pic order " << pic.order() << "; aut-image order " << aut.size() << "\n";
  std::cout << "Pic generators: "
            << generatorListing(picPerms, embed, f.algebra.blockCount()) << "\n";
  std::cout << "aut-image generators: "
            << generatorListing(autPerms, embed, f.algebra.blockCount()) << "\n";
  return 0;
}

int cmdExistsUnitary(const std::string& path, const std::string& witnessPath) {
  const InstanceFile f = parseInstancePath(path);
  const HilbertModule& e = requireModule(f);
  const Automorphism& phi = requireAutomorphism(f);

  if (!witnessPath.empty()) {
    std::ifstream in(witnessPath);
    if (!in) throw ValidationError("witness-file", "cannot open '" + witnessPath + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    GeneralizedUnitary u = parseWitness(buf.str(), e);
    if (!checkPhiUnitary(u.toRaw(), u.phi, 1e-7)) {
      std::cout << "WITNESS INVALID: fails the phi-unitary equations\n";
      return 1;
    }
    const RangeIdeal be = rangeIdeal(e);
    const auto ru = restrictToRangeIdeal(u.phi, be);
    const auto rf = restrictToRangeIdeal(phi, be);
    if (!ru || !rf || !sameAction(*ru, *rf, 1e-7)) {
      std::cout << "WITNESS INVALID: automorphism class differs from the instance\n";
      return 1;
    }
    std::cout << "WITNESS VALID\n";
    return 0;
  }

  const ExistsUnitaryResult res = existsPhiUnitary(e, phi);
  if (res.exists()) {
    std::cout << "YES\n" << witnessJson(*res.witness) << "\n";
  } else {
    std::cout << "NO\n" << certificateJson(*res.certificate) << "\n";
  }
  return 0;
}

int cmdPhiE(const std::string& path) {
  const InstanceFile f = parseInstancePath(path);
  const HilbertModule& e = requireModule(f);
  const PhiEGroup g = computePhiE(e);
  std::cout << "Phi_E order " << g.order() << ": "
            << permListing(g.skeleton(), g.bE.parentBlock, f.algebra.blockCount()) << "\n";
  return 0;
}

int cmdStraut(const std::string& path) {
  const InstanceFile f = parseInstancePath(path);
  const HilbertModule& e = requireModule(f);
  const StrautImage si = strautImageInPicard(e);
  std::vector<Perm> perms;
  for (const auto& p : si.subgroup) perms.push_back(p.perm);
  std::cout << "straut-image order " << perms.size() << ": "
            << permListing(perms, si.bE.parentBlock, f.algebra.blockCount()) << "\n";
  return 0;
}

int cmdTheorem35(const std::string& path) {
  const InstanceFile f = parseInstancePath(path);
  const HilbertModule& e = requireModule(f);
  const Theorem35Report rep = theorem35Pipeline(e);
  const std::vector<int>& embed = rep.phiE.bE.parentBlock;
  const int k = f.algebra.blockCount();
  std::vector<Perm> strautPerms, picPerms;
  for (const auto& p : rep.straut.subgroup) strautPerms.push_back(p.perm);
  for (const auto& p : rep.picard.elements) picPerms.push_back(p.perm);
  std::cout << "quotient order " << rep.quotient.size() << ": "
            << permListing(rep.quotient, embed, k) << "\n";
  std::cout << "straut-image order " << strautPerms.size() << ": "
            << permListing(strautPerms, embed, k) << "\n";
  std::cout << "Pic(B_E) order " << rep.picard.order() << ": " << permListing(picPerms, embed, k)
            << "\n";
  std::cout << "inclusion quotient <= straut-image: "
            << (rep.inclusionFirst ? "holds" : "FAILS") << "\n";
  std::cout << "inclusion straut-image <= Pic(B_E): "
            << (rep.inclusionSecond ? "holds" : "FAILS") << "\n";
  std::cout << "kernel equals Phi_E meet gin(B_E): "
            << (rep.kernelMatchesGin ? "holds" : "FAILS") << "\n";
  return rep.allHold() ? 0 : 1;
}

int cmdVerify(std::uint64_t seed, int count, int maxBlocks, int maxDim) {
  InstanceSpec spec;
  spec.seed = seed;
  spec.count = count;
  spec.maxBlocks = maxBlocks;
  spec.maxBlockDim = maxDim;
  const std::vector<CheckResult> results = runAll(spec);
  int fail = 0, skip = 0, pass = 0;
  for (const CheckResult& r : results) {
    const char* status = r.skipped ? "skip" : (r.pass ? "pass" : "fail");
    if (r.skipped)
      ++skip;
    else if (r.pass)
      ++pass;
    else
      ++fail;
    std::cout << "{\"check\":\"" << r.check << "\",\"instance\":\"" << r.instance
              << "\",\"status\":\"" << status << "\",\"residual\":" << fmtNum(r.residual);
    if (!r.pass) std::cout << ",\"detail\":\"" << r.detail << "\"";
    if (!r.shrunk.empty()) std::cout << ",\"shrunk\":\"" << r.shrunk << "\"";
    std::cout << "}\n";
  }
  std::cout << "{\"summary\":{\"checks\":" << checkRegistry().size() << ",\"instances\":"
            << (goldenInstances().size() + static_cast<size_t>(count)) << ",\"pass\":" << pass
            << ",\"fail\":" << fail << ",\"skip\":" << skip << "}}\n";
  return fail == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized unitaries and Picard groups over multi-matrix algebras"};
  app.require_subcommand(1);

  std::string picFile, existsFile, phieFile, strautFile, thmFile, witnessFile;

  CLI::App* pic = app.add_subcommand("pic", "Picard group and aut-image of the algebra");
  pic->add_option("file", picFile, "instance file")->required();

  CLI::App* exu = app.add_subcommand("exists-unitary",
                                     "decide existence of a phi-unitary, with witness");
  exu->add_option("file", existsFile, "instance file")->required();
  exu->add_option("--check-witness", witnessFile, "re-validate a witness document");

  CLI::App* phie = app.add_subcommand("phie", "the group Phi_E of the instance module");
  phie->add_option("file", phieFile, "instance file")->required();

  CLI::App* straut = app.add_subcommand("straut", "image of straut(B^a(E))/inn in Pic(B_E)");
  straut->add_option("file", strautFile, "instance file")->required();

  CLI::App* thm = app.add_subcommand("theorem35", "the inclusion chain for the instance module");
  thm->add_option("file", thmFile, "instance file")->required();

  std::uint64_t seed = 42;
  int count = 200, maxBlocks = 4, maxDim = 3;
  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--seed", seed, "instance seed");
  verify->add_option("--count", count, "number of random instances")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--max-blocks", maxBlocks, "max number of blocks")->check(CLI::Range(1, 5));
  verify->add_option("--max-dim", maxDim, "max block dimension")->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (pic->parsed()) return cmdPic(picFile);
    if (exu->parsed()) return cmdExistsUnitary(existsFile, witnessFile);
    if (phie->parsed()) return cmdPhiE(phieFile);
    if (straut->parsed()) return cmdStraut(strautFile);
    if (thm->parsed()) return cmdTheorem35(thmFile);
    if (verify->parsed()) return cmdVerify(seed, count, maxBlocks, maxDim);
  } catch (const picmod::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
