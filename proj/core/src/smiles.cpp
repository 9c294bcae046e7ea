#include <array>
#include <cctype>
#include <optional>
#include <unordered_map>

#include "qtr/error.hpp"
#include "qtr/molgraph.hpp"

namespace qtr {

char bond_symbol(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return '-';
    case BondOrder::Double: return '=';
    case BondOrder::Triple: return '#';
    case BondOrder::Aromatic: return ':';
  }
  return '?';
}

uint32_t MolGraph::add_atom(Atom atom) {
  atoms_.push_back(std::move(atom));
  adjacency_.emplace_back();
  return static_cast<uint32_t>(atoms_.size() - 1);
}

void MolGraph::add_bond(uint32_t a, uint32_t b, BondOrder order) {
  if (a >= atoms_.size() || b >= atoms_.size())
    throw ContractError("bond endpoint out of range");
  if (a == b) throw ContractError("bond endpoints must be distinct");
  if (has_bond(a, b)) throw ContractError("duplicate bond");
  bonds_.push_back({a, b, order});
  adjacency_[a].push_back({b, order});
  adjacency_[b].push_back({a, order});
}

bool MolGraph::has_bond(uint32_t a, uint32_t b) const {
  for (const auto& nb : adjacency_[a])
    if (nb.atom == b) return true;
  return false;
}

namespace {

const std::array<std::string, 10> kOrganicSubset = {
    "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};

const std::array<char, 6> kAromaticSymbols = {'b', 'c', 'n', 'o', 'p', 's'};

bool is_aromatic_symbol(char c) {
  for (char a : kAromaticSymbols)
    if (a == c) return true;
  return false;
}

struct Parser {
  std::string_view s;
  std::size_t pos = 0;
  MolGraph mol;

  // previous atom per nesting level; -1 means no atom yet
  std::vector<int> prev_stack{-1};
  std::optional<BondOrder> pending_bond;

  struct RingOpen {
    uint32_t atom;
    std::optional<BondOrder> bond;
    std::size_t offset;
  };
  std::unordered_map<int, RingOpen> open_rings;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ParseError(msg, at);
  }

  char peek() const { return pos < s.size() ? s[pos] : '\0'; }

  void attach(uint32_t atom, std::size_t at) {
    int prev = prev_stack.back();
    if (prev >= 0) {
      BondOrder order = resolve_bond(pending_bond, static_cast<uint32_t>(prev), atom, at);
      mol.add_bond(static_cast<uint32_t>(prev), atom, order);
    } else if (pending_bond) {
      fail("bond symbol with no preceding atom", at);
    }
    pending_bond.reset();
    prev_stack.back() = static_cast<int>(atom);
  }

  // Unspecified bonds between two aromatic atoms are aromatic, otherwise single.
  BondOrder resolve_bond(std::optional<BondOrder> given, uint32_t a, uint32_t b,
                         std::size_t at) {
    (void)at;
    if (given) return *given;
    if (mol.atoms()[a].aromatic && mol.atoms()[b].aromatic)
      return BondOrder::Aromatic;
    return BondOrder::Single;
  }

  void ring_closure(int digit, std::size_t at) {
    auto it = open_rings.find(digit);
    if (it == open_rings.end()) {
      int prev = prev_stack.back();
      if (prev < 0) fail("ring closure before any atom", at);
      open_rings.emplace(digit,
                         RingOpen{static_cast<uint32_t>(prev), pending_bond, at});
      pending_bond.reset();
      return;
    }
    RingOpen open = it->second;
    open_rings.erase(it);
    int prev = prev_stack.back();
    if (prev < 0) fail("ring closure before any atom", at);
    std::optional<BondOrder> given;
    if (open.bond && pending_bond && *open.bond != *pending_bond)
      fail("conflicting bond orders on ring closure", at);
    given = open.bond ? open.bond : pending_bond;
    pending_bond.reset();
    if (static_cast<uint32_t>(prev) == open.atom)
      fail("ring closure bonds an atom to itself", at);
    if (mol.has_bond(static_cast<uint32_t>(prev), open.atom))
      fail("ring closure duplicates an existing bond", at);
    BondOrder order = resolve_bond(given, static_cast<uint32_t>(prev), open.atom, at);
    mol.add_bond(static_cast<uint32_t>(prev), open.atom, order);
  }

  void parse_bracket_atom() {
    std::size_t start = pos;
    ++pos;  // '['
    if (pos >= s.size()) fail("unterminated bracket atom", start);
    Atom atom;
    char c = s[pos];
    if (std::isupper(static_cast<unsigned char>(c))) {
      atom.element = c;
      ++pos;
      if (pos < s.size() && std::islower(static_cast<unsigned char>(s[pos]))) {
        atom.element += s[pos];
        ++pos;
      }
    } else if (is_aromatic_symbol(c)) {
      atom.element = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      atom.aromatic = true;
      ++pos;
    } else {
      fail(std::string("unsupported bracket atom symbol '") + c + "'", pos);
    }
    // optional hydrogen count, accepted and ignored
    if (pos < s.size() && s[pos] == 'H') {
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    // optional charge: +, -, ++, --, +n, -n
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      int sign = s[pos] == '+' ? 1 : -1;
      char symbol = s[pos];
      ++pos;
      if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        int mag = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
          mag = mag * 10 + (s[pos] - '0');
          ++pos;
        }
        atom.charge = sign * mag;
      } else {
        int mag = 1;
        while (pos < s.size() && s[pos] == symbol) {
          ++mag;
          ++pos;
        }
        atom.charge = sign * mag;
      }
    }
    if (pos >= s.size() || s[pos] != ']')
      fail("unterminated or malformed bracket atom", pos < s.size() ? pos : start);
    ++pos;
    attach(mol.add_atom(std::move(atom)), start);
  }

  void parse_organic_atom() {
    std::size_t start = pos;
    char c = s[pos];
    if (std::islower(static_cast<unsigned char>(c))) {
      if (!is_aromatic_symbol(c))
        fail(std::string("unsupported aromatic atom '") + c + "'", pos);
      ++pos;
      attach(mol.add_atom(
                 {std::string(1, static_cast<char>(std::toupper(
                                    static_cast<unsigned char>(c)))),
                  true, 0}),
             start);
      return;
    }
    // two-letter symbols first (Cl, Br)
    for (const auto& sym : kOrganicSubset) {
      if (sym.size() == 2 && s.substr(pos, 2) == sym) {
        pos += 2;
        attach(mol.add_atom({sym, false, 0}), start);
        return;
      }
    }
    for (const auto& sym : kOrganicSubset) {
      if (sym.size() == 1 && sym[0] == c) {
        ++pos;
        attach(mol.add_atom({sym, false, 0}), start);
        return;
      }
    }
    fail(std::string("unsupported atom symbol '") + c + "'", pos);
  }

  MolGraph run() {
    if (s.empty()) fail("empty SMILES", 0);
    while (pos < s.size()) {
      char c = s[pos];
      if (c == '-') { set_bond(BondOrder::Single); }
      else if (c == '=') { set_bond(BondOrder::Double); }
      else if (c == '#') { set_bond(BondOrder::Triple); }
      else if (c == ':') { set_bond(BondOrder::Aromatic); }
      else if (c == '(') {
        if (prev_stack.back() < 0) fail("branch before any atom", pos);
        if (pending_bond) fail("bond symbol before branch open", pos);
        prev_stack.push_back(prev_stack.back());
        ++pos;
      } else if (c == ')') {
        if (prev_stack.size() < 2) fail("unmatched ')'", pos);
        if (pending_bond) fail("dangling bond at branch close", pos);
        prev_stack.pop_back();
        ++pos;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        ring_closure(c - '0', pos);
        ++pos;
      } else if (c == '%') {
        if (pos + 2 >= s.size() ||
            !std::isdigit(static_cast<unsigned char>(s[pos + 1])) ||
            !std::isdigit(static_cast<unsigned char>(s[pos + 2])))
          fail("'%' ring closure needs two digits", pos);
        ring_closure((s[pos + 1] - '0') * 10 + (s[pos + 2] - '0'), pos);
        pos += 3;
      } else if (c == '[') {
        parse_bracket_atom();
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        parse_organic_atom();
      } else {
        fail(std::string("unsupported token '") + c + "'", pos);
      }
    }
    if (prev_stack.size() != 1) fail("unclosed branch", s.size());
    if (pending_bond) fail("dangling bond at end of input", s.size());
    if (!open_rings.empty()) {
      std::size_t at = open_rings.begin()->second.offset;
      fail("unmatched ring closure digit", at);
    }
    if (mol.atom_count() == 0) fail("SMILES contains no atoms", 0);
    return std::move(mol);
  }

  void set_bond(BondOrder order) {
    if (pending_bond) fail("two consecutive bond symbols", pos);
    pending_bond = order;
    ++pos;
  }
};

}  // namespace

MolGraph parse_smiles(std::string_view smiles) {
  Parser p{smiles};
  return p.run();
}

}  // namespace qtr
