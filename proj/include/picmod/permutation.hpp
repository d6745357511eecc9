#pragma once

// Permutations of block indices and the little group machinery
// (closure, subgroup/normality tests, generating sets) used by the
// Picard-group and automorphism-group computations.

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace picmod {

/// Permutation of {0..k-1}, stored as the image vector: img[i] is where i goes.
class Perm {
 public:
  Perm() = default;
  explicit Perm(std::vector<int> image) : img_(std::move(image)) {
    std::vector<char> seen(img_.size(), 0);
    for (int v : img_) {
      if (v < 0 || v >= static_cast<int>(img_.size()) || seen[v])
        throw std::invalid_argument("Perm: image vector is not a permutation");
      seen[v] = 1;
    }
  }

  static Perm identity(int k) {
    std::vector<int> v(k);
    std::iota(v.begin(), v.end(), 0);
    return Perm(std::move(v));
  }

  /// Transposition (a b) inside S_k.
  static Perm transposition(int k, int a, int b) {
    Perm p = identity(k);
    std::swap(p.img_[a], p.img_[b]);
    return p;
  }

  int size() const { return static_cast<int>(img_.size()); }
  int operator()(int i) const { return img_[i]; }
  const std::vector<int>& image() const { return img_; }

  bool isIdentity() const {
    for (int i = 0; i < size(); ++i)
      if (img_[i] != i) return false;
    return true;
  }

  /// Composition acting right-to-left: (a.then(b)) means apply *this first? No:
  /// compose(a, b)(i) = a(b(i)).  Kept as a free function below for clarity.
  Perm inverse() const {
    std::vector<int> v(img_.size());
    for (int i = 0; i < size(); ++i) v[img_[i]] = i;
    return Perm(std::move(v));
  }

  bool operator==(const Perm& o) const { return img_ == o.img_; }
  bool operator!=(const Perm& o) const { return img_ != o.img_; }
  bool operator<(const Perm& o) const { return img_ < o.img_; }

  /// Cycle notation with 1-based entries, e.g. "(1 2)(3 5 4)"; "id" if trivial.
  std::string cycleString() const {
    std::vector<char> seen(img_.size(), 0);
    std::ostringstream out;
    bool any = false;
    for (int i = 0; i < size(); ++i) {
      if (seen[i] || img_[i] == i) continue;
      out << '(';
      int j = i;
      bool first = true;
      while (!seen[j]) {
        seen[j] = 1;
        if (!first) out << ' ';
        out << (j + 1);
        first = false;
        j = img_[j];
      }
      out << ')';
      any = true;
    }
    return any ? out.str() : std::string("id");
  }

 private:
  std::vector<int> img_;
};

/// compose(a, b) = a after b: i -> a(b(i)).
inline Perm compose(const Perm& a, const Perm& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Perm compose: size mismatch");
  std::vector<int> v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = a(b(i));
  return Perm(std::move(v));
}

inline std::vector<Perm> allPermutations(int k) {
  std::vector<int> v(k);
  std::iota(v.begin(), v.end(), 0);
  std::vector<Perm> out;
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

/// All sigma in S_k with labels[sigma(i)] == labels[i] for every i.
template <typename T>
std::vector<Perm> permutationsPreserving(const std::vector<T>& labels) {
  std::vector<Perm> out;
  for (const Perm& p : allPermutations(static_cast<int>(labels.size()))) {
    bool ok = true;
    for (int i = 0; ok && i < p.size(); ++i)
      if (!(labels[p(i)] == labels[i])) ok = false;
    if (ok) out.push_back(p);
  }
  return out;
}

inline bool containsPerm(const std::vector<Perm>& set, const Perm& p) {
  return std::find(set.begin(), set.end(), p) != set.end();
}

/// Closure of a generating set under composition and inverse.
inline std::vector<Perm> groupClosure(std::vector<Perm> gens) {
  if (gens.empty()) return gens;
  std::set<Perm> grp(gens.begin(), gens.end());
  grp.insert(Perm::identity(gens.front().size()));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Perm> cur(grp.begin(), grp.end());
    for (const Perm& a : cur)
      for (const Perm& b : cur)
        if (grp.insert(compose(a, b)).second) grew = true;
    for (const Perm& a : cur)
      if (grp.insert(a.inverse()).second) grew = true;
  }
  return std::vector<Perm>(grp.begin(), grp.end());
}

inline bool isClosedGroup(const std::vector<Perm>& set) {
  if (set.empty()) return false;
  if (!containsPerm(set, Perm::identity(set.front().size()))) return false;
  for (const Perm& a : set) {
    if (!containsPerm(set, a.inverse())) return false;
    for (const Perm& b : set)
      if (!containsPerm(set, compose(a, b))) return false;
  }
  return true;
}

inline bool isSubgroupOf(const std::vector<Perm>& sub, const std::vector<Perm>& grp) {
  for (const Perm& p : sub)
    if (!containsPerm(grp, p)) return false;
  return isClosedGroup(sub);
}

inline bool isNormalIn(const std::vector<Perm>& sub, const std::vector<Perm>& grp) {
  for (const Perm& g : grp)
    for (const Perm& h : sub)
      if (!containsPerm(sub, compose(compose(g, h), g.inverse()))) return false;
  return true;
}

/// Small generating set, built greedily; fine for groups of order <= a few hundred.
inline std::vector<Perm> generatingSet(const std::vector<Perm>& grp) {
  std::vector<Perm> gens;
  if (grp.empty()) return gens;
  std::vector<Perm> closed{Perm::identity(grp.front().size())};
  for (const Perm& p : grp) {
    if (containsPerm(closed, p)) continue;
    gens.push_back(p);
    closed = groupClosure(gens);
    if (closed.size() == grp.size()) break;
  }
  return gens;
}

}  // namespace picmod
