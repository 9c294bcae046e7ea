#include <algorithm>
#include <cstdint>
#include <vector>

#include "qtr/molgraph.hpp"

namespace qtr {

namespace {

// VF2-style state: query atoms are matched in a fixed order where every atom
// after the first of its component already has a mapped neighbor, so edge
// consistency can be checked incrementally.
struct Matcher {
  const MolGraph& q;
  const MolGraph& t;
  std::vector<uint32_t> order;      // query atoms in match order
  std::vector<int> map;             // query atom -> target atom, -1 unset
  std::vector<char> used;           // target atom already taken

  explicit Matcher(const MolGraph& query, const MolGraph& target)
      : q(query), t(target), map(query.atom_count(), -1),
        used(target.atom_count(), 0) {
    build_order();
  }

  // BFS per connected component, components taken sequentially. Component
  // roots are chosen highest-degree first so constrained atoms match early.
  void build_order() {
    uint32_t n = q.atom_count();
    std::vector<char> seen(n, 0);
    std::vector<uint32_t> roots(n);
    for (uint32_t i = 0; i < n; ++i) roots[i] = i;
    std::sort(roots.begin(), roots.end(), [&](uint32_t a, uint32_t b) {
      return q.degree(a) > q.degree(b);
    });
    order.reserve(n);
    for (uint32_t root : roots) {
      if (seen[root]) continue;
      std::size_t head = order.size();
      order.push_back(root);
      seen[root] = 1;
      while (head < order.size()) {
        uint32_t u = order[head++];
        for (const auto& nb : q.neighbors(u)) {
          if (!seen[nb.atom]) {
            seen[nb.atom] = 1;
            order.push_back(nb.atom);
          }
        }
      }
    }
  }

  bool feasible(uint32_t qa, uint32_t ta) const {
    const Atom& a = q.atoms()[qa];
    const Atom& b = t.atoms()[ta];
    if (a != b) return false;
    if (q.degree(qa) > t.degree(ta)) return false;
    // every already-mapped query neighbor must be bonded in the target with
    // the same order
    for (const auto& nb : q.neighbors(qa)) {
      int mapped = map[nb.atom];
      if (mapped < 0) continue;
      bool found = false;
      for (const auto& tn : t.neighbors(ta)) {
        if (tn.atom == static_cast<uint32_t>(mapped) && tn.order == nb.order) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  bool search(std::size_t depth) {
    if (depth == order.size()) return true;
    uint32_t qa = order[depth];
    // prefer extending from a mapped neighbor's adjacency; fall back to all
    // target atoms for component roots
    int anchor = -1;
    for (const auto& nb : q.neighbors(qa)) {
      if (map[nb.atom] >= 0) {
        anchor = map[nb.atom];
        break;
      }
    }
    if (anchor >= 0) {
      for (const auto& tn : t.neighbors(static_cast<uint32_t>(anchor))) {
        uint32_t ta = tn.atom;
        if (used[ta] || !feasible(qa, ta)) continue;
        map[qa] = static_cast<int>(ta);
        used[ta] = 1;
        if (search(depth + 1)) return true;
        map[qa] = -1;
        used[ta] = 0;
      }
    } else {
      for (uint32_t ta = 0; ta < t.atom_count(); ++ta) {
        if (used[ta] || !feasible(qa, ta)) continue;
        map[qa] = static_cast<int>(ta);
        used[ta] = 1;
        if (search(depth + 1)) return true;
        map[qa] = -1;
        used[ta] = 0;
      }
    }
    return false;
  }
};

}  // namespace

bool sub_structure(const MolGraph& query, const MolGraph& target) {
  if (query.atom_count() > target.atom_count()) return false;
  if (query.bonds().size() > target.bonds().size()) return false;
  Matcher m(query, target);
  return m.search(0);
}

}  // namespace qtr
