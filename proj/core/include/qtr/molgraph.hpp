#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qtr {

enum class BondOrder : uint8_t { Single, Double, Triple, Aromatic };

char bond_symbol(BondOrder order);

struct Atom {
  std::string element;
  bool aromatic = false;
  int charge = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Bond {
  uint32_t a;
  uint32_t b;
  BondOrder order;
};

/// Labeled undirected molecular graph. Implicit hydrogens are not
/// materialized as atoms.
class MolGraph {
 public:
  uint32_t add_atom(Atom atom);
  // Rejects self-loops, out-of-range endpoints and duplicate pairs.
  void add_bond(uint32_t a, uint32_t b, BondOrder order);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  uint32_t atom_count() const { return static_cast<uint32_t>(atoms_.size()); }
  uint32_t degree(uint32_t atom) const {
    return static_cast<uint32_t>(adjacency_[atom].size());
  }

  struct Neighbor {
    uint32_t atom;
    BondOrder order;
  };
  const std::vector<Neighbor>& neighbors(uint32_t atom) const {
    return adjacency_[atom];
  }

  bool has_bond(uint32_t a, uint32_t b) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

// Parses the supported SMILES subset: organic-subset atoms
// (B C N O P S F Cl Br I), lowercase aromatic atoms, bracket atoms with an
// optional hydrogen count (ignored) and charge, bonds - = # :, parenthesized
// branches and ring closures (digits and %nn). Throws ParseError with the
// byte offset of the offending token.
MolGraph parse_smiles(std::string_view smiles);

// Substructure predicate: true iff query embeds injectively into target
// preserving element, aromatic flag, charge and exact bond order.
// Disconnected queries are matched component by component over a shared
// used-atom set.
bool sub_structure(const MolGraph& query, const MolGraph& target);

}  // namespace qtr
