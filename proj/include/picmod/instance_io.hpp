#pragma once

// Instance files and machine-readable output.
//
// An instance file is a JSON document declaring an algebra ("blocks"), and
// optionally a module ("mult"), an automorphism ("perm", 1-based, with
// optional "conjugators" as matrices of [re, im] pairs) and a correspondence
// ("multMatrix").  Validation errors name the offending field.  All numeric
// output is rounded to 12 significant digits so that identical invocations
// produce byte-identical reports.

#include "picmod/generalized_maps.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace picmod {

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// 12 significant digits, locale-independent.
inline std::string fmtNum(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct InstanceFile {
  MultiMatrixAlgebra algebra;
  std::optional<HilbertModule> module;
  std::optional<Automorphism> automorphism;
  std::optional<Correspondence> correspondence;
};

namespace io_detail {

inline CMat parseComplexMatrix(const nlohmann::json& j, const std::string& field, int rows,
                               int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ValidationError(field, "expected " + std::to_string(rows) + " rows");
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ValidationError(field, "row " + std::to_string(r + 1) + " must have " +
                                       std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      const auto& e = row[c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ValidationError(field, "entry (" + std::to_string(r + 1) + "," +
                                         std::to_string(c + 1) + ") must be an [re, im] pair");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline std::string complexMatrixJson(const CMat& m) {
  std::ostringstream s;
  s << "[";
  for (int r = 0; r < m.rows(); ++r) {
    if (r) s << ",";
    s << "[";
    for (int c = 0; c < m.cols(); ++c) {
      if (c) s << ",";
      s << "[" << fmtNum(m(r, c).real()) << "," << fmtNum(m(r, c).imag()) << "]";
    }
    s << "]";
  }
  s << "]";
  return s.str();
}

}  // namespace io_detail

inline InstanceFile parseInstanceText(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("document", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("document", "expected a JSON object");

  InstanceFile out;
  if (!j.contains("blocks")) throw ValidationError("blocks", "missing required field");
  {
    const auto& b = j["blocks"];
    if (!b.is_array() || b.empty()) throw ValidationError("blocks", "expected a nonempty array");
    std::vector<int> blocks;
    for (const auto& v : b) {
      if (!v.is_number_integer() || v.get<int>() < 1)
        throw ValidationError("blocks", "entries must be integers >= 1");
      blocks.push_back(v.get<int>());
    }
    out.algebra = MultiMatrixAlgebra(blocks);
  }
  const int k = out.algebra.blockCount();

  if (j.contains("mult")) {
    const auto& m = j["mult"];
    if (!m.is_array() || static_cast<int>(m.size()) != k)
      throw ValidationError("mult", "length must equal the number of blocks (" +
                                        std::to_string(k) + ")");
    std::vector<int> mults;
    for (const auto& v : m) {
      if (!v.is_number_integer() || v.get<int>() < 0)
        throw ValidationError("mult", "entries must be integers >= 0");
      mults.push_back(v.get<int>());
    }
    out.module = HilbertModule(out.algebra, mults);
  }

  if (j.contains("perm")) {
    const auto& p = j["perm"];
    if (!p.is_array() || static_cast<int>(p.size()) != k)
      throw ValidationError("perm", "length must equal the number of blocks");
    std::vector<int> img;
    for (const auto& v : p) {
      if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > k)
        throw ValidationError("perm", "entries must be 1-based block indices");
      img.push_back(v.get<int>() - 1);
    }
    Perm perm;
    try {
      perm = Perm(img);
    } catch (const std::exception&) {
      throw ValidationError("perm", "not a permutation");
    }
    for (int i = 0; i < k; ++i)
      if (out.algebra.blocks[perm(i)] != out.algebra.blocks[i])
        throw ValidationError("perm", "must preserve block sizes (block " + std::to_string(i + 1) +
                                          " of size " + std::to_string(out.algebra.blocks[i]) +
                                          " maps to block " + std::to_string(perm(i) + 1) +
                                          " of size " +
                                          std::to_string(out.algebra.blocks[perm(i)]) + ")");
    std::vector<CMat> conj;
    if (j.contains("conjugators")) {
      const auto& cs = j["conjugators"];
      if (!cs.is_array() || static_cast<int>(cs.size()) != k)
        throw ValidationError("conjugators", "expected one matrix per block");
      for (int i = 0; i < k; ++i)
        conj.push_back(io_detail::parseComplexMatrix(cs[i], "conjugators[" + std::to_string(i + 1) + "]",
                                                     out.algebra.blocks[i],
                                                     out.algebra.blocks[i]));
      for (int i = 0; i < k; ++i)
        if (!isUnitaryMatrix(conj[i], 1e-7))
          throw ValidationError("conjugators[" + std::to_string(i + 1) + "]",
                                "matrix is not unitary (tolerance 1e-7)");
    } else {
      for (int n : out.algebra.blocks) conj.push_back(cIdentity(n));
    }
    out.automorphism = Automorphism(out.algebra, perm, conj);
  } else if (j.contains("conjugators")) {
    throw ValidationError("conjugators", "requires a perm field");
  }

  if (j.contains("multMatrix")) {
    const auto& mm = j["multMatrix"];
    if (!mm.is_array() || static_cast<int>(mm.size()) != k)
      throw ValidationError("multMatrix", "expected " + std::to_string(k) + " rows");
    Eigen::MatrixXi mu(k, k);
    for (int r = 0; r < k; ++r) {
      const auto& row = mm[r];
      if (!row.is_array() || static_cast<int>(row.size()) != k)
        throw ValidationError("multMatrix", "row " + std::to_string(r + 1) + " must have " +
                                                std::to_string(k) + " entries");
      for (int c = 0; c < k; ++c) {
        if (!row[c].is_number_integer() || row[c].get<int>() < 0)
          throw ValidationError("multMatrix", "entries must be integers >= 0");
        mu(r, c) = row[c].get<int>();
      }
    }
    out.correspondence = Correspondence(out.algebra, out.algebra, mu);
  }
  return out;
}

inline InstanceFile parseInstancePath(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("file", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseInstanceText(buf.str());
}

// ---------------------------------------------------------------------------
// Witness and certificate serialization
// ---------------------------------------------------------------------------

inline std::string permJson(const Perm& p) {
  std::ostringstream s;
  s << "[";
  for (int i = 0; i < p.size(); ++i) s << (i ? "," : "") << (p(i) + 1);
  s << "]";
  return s.str();
}

inline std::string witnessJson(const GeneralizedUnitary& u) {
  std::ostringstream s;
  s << "{\"verdict\":\"YES\",\"perm\":" << permJson(u.phi.perm) << ",\"conjugators\":[";
  for (size_t i = 0; i < u.phi.conj.size(); ++i)
    s << (i ? "," : "") << io_detail::complexMatrixJson(u.phi.conj[i]);
  s << "],\"blockUnitaries\":[";
  for (size_t i = 0; i < u.blockUnitaries.size(); ++i)
    s << (i ? "," : "") << io_detail::complexMatrixJson(u.blockUnitaries[i]);
  s << "]}";
  return s.str();
}

inline std::string certificateJson(const UnitaryCertificate& c) {
  std::ostringstream s;
  s << "{\"verdict\":\"NO\",\"reason\":\"" << c.reason << "\",\"blocks\":[" << (c.block + 1)
    << "," << (c.image + 1) << "]}";
  return s.str();
}

/// Reads a witness JSON document back into a generalized unitary on E.
inline GeneralizedUnitary parseWitness(const std::string& text, const HilbertModule& e) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ValidationError("witness", std::string("not valid JSON: ") + ex.what());
  }
  if (!j.is_object() || !j.contains("verdict") || j["verdict"] != "YES")
    throw ValidationError("witness", "expected a YES witness document");
  if (!j.contains("perm") || !j["perm"].is_array() ||
      static_cast<int>(j["perm"].size()) != e.algebra.blockCount())
    throw ValidationError("witness.perm", "missing or wrong length");
  std::vector<int> img;
  for (const auto& v : j["perm"]) img.push_back(v.get<int>() - 1);
  Perm perm(img);
  std::vector<CMat> conj, w;
  if (!j.contains("conjugators") ||
      static_cast<int>(j["conjugators"].size()) != e.algebra.blockCount())
    throw ValidationError("witness.conjugators", "missing or wrong length");
  for (int i = 0; i < e.algebra.blockCount(); ++i)
    conj.push_back(io_detail::parseComplexMatrix(j["conjugators"][i],
                                                 "witness.conjugators[" + std::to_string(i + 1) + "]",
                                                 e.algebra.blocks[i], e.algebra.blocks[i]));
  if (!j.contains("blockUnitaries") ||
      static_cast<int>(j["blockUnitaries"].size()) != e.algebra.blockCount())
    throw ValidationError("witness.blockUnitaries", "missing or wrong length");
  for (int i = 0; i < e.algebra.blockCount(); ++i)
    w.push_back(io_detail::parseComplexMatrix(j["blockUnitaries"][i],
                                              "witness.blockUnitaries[" + std::to_string(i + 1) + "]",
                                              e.mults[i], e.mults[i]));
  try {
    return GeneralizedUnitary(e, Automorphism(e.algebra, perm, conj), w);
  } catch (const std::exception& ex) {
    throw ValidationError("witness", ex.what());
  }
}

}  // namespace picmod
