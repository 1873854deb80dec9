#pragma once

#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsize/chain.hpp"

namespace opsize {

// Pauli string over the chain: one letter per site, 0 for the identity and
// a in [1, d^2 - 1] for basis matrix a - 1 of site_basis(d). The letter value
// equals the base-d^2 digit used by CoefficientTable, so a string is also an
// address into the table. Site 0 is the first (leftmost) site of the chain.
struct PauliString {
  ChainSpec chain;
  std::vector<int> letters;
  u32 support = 0;

  PauliString() = default;

  PauliString(ChainSpec c, std::vector<int> ls) : chain(c), letters(std::move(ls)) {
    chain.validate();
    if (static_cast<int>(letters.size()) != chain.n_sites)
      throw std::invalid_argument("PauliString: one letter per site required");
    const int max_letter = chain.letters_per_site() - 1;
    for (int n = 0; n < chain.n_sites; ++n) {
      if (letters[n] < 0 || letters[n] > max_letter)
        throw std::invalid_argument("PauliString: letter " + std::to_string(letters[n]) +
                                    " out of range at site " + std::to_string(n));
      if (letters[n] != 0) support |= u32{1} << n;
    }
  }

  static PauliString identity(ChainSpec c) {
    return PauliString(c, std::vector<int>(static_cast<size_t>(c.n_sites), 0));
  }

  static PauliString single_site(ChainSpec c, int site, int letter) {
    c.require_site(site, "PauliString::single_site");
    std::vector<int> ls(static_cast<size_t>(c.n_sites), 0);
    ls[static_cast<size_t>(site)] = letter;
    return PauliString(c, std::move(ls));
  }

  int size() const { return std::popcount(support); }

  // Address of this string in the coefficient table (site 0 is the least
  // significant base-d^2 digit).
  i64 table_index() const {
    const i64 radix = chain.letters_per_site();
    i64 idx = 0;
    for (int n = chain.n_sites - 1; n >= 0; --n) idx = idx * radix + letters[static_cast<size_t>(n)];
    return idx;
  }
};

}
