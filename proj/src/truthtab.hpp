/*!
  \file truthtab.hpp
  \brief Truth-table math on word vectors and a tiny AND-structure IR
*/

#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace aigforge::tt {

using Word = uint64_t;

// Projection patterns of the first six variables inside one word.
inline constexpr std::array<Word, 6> kProj = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};

// Tables are kept at full width for max(n_vars, 6) variables, so functions of
// fewer than six variables replicate across the word and constant tests need
// no masking.
inline size_t words_for(int n_vars) {
  return n_vars <= 6 ? 1 : size_t{1} << (n_vars - 6);
}

using Table = std::vector<Word>;

inline Table make_const0(int n_vars) { return Table(words_for(n_vars), 0); }
inline Table make_const1(int n_vars) { return Table(words_for(n_vars), ~Word{0}); }

inline Table make_proj(int var, int n_vars) {
  Table t(words_for(n_vars));
  for (size_t w = 0; w < t.size(); ++w)
    t[w] = var < 6 ? kProj[var] : (((w >> (var - 6)) & 1) ? ~Word{0} : 0);
  return t;
}

inline bool is_const0(const Table& t) {
  for (Word w : t)
    if (w) return false;
  return true;
}

inline bool is_const1(const Table& t) {
  for (Word w : t)
    if (~w) return false;
  return true;
}

inline bool equal(const Table& a, const Table& b) { return a == b; }

inline bool equal_compl(const Table& a, const Table& b) {
  for (size_t w = 0; w < a.size(); ++w)
    if (a[w] != ~b[w]) return false;
  return true;
}

inline Table invert(Table t) {
  for (Word& w : t) w = ~w;
  return t;
}

inline Table and_tt(const Table& a, const Table& b) {
  Table r(a.size());
  for (size_t w = 0; w < a.size(); ++w) r[w] = a[w] & b[w];
  return r;
}

inline Table or_tt(const Table& a, const Table& b) {
  Table r(a.size());
  for (size_t w = 0; w < a.size(); ++w) r[w] = a[w] | b[w];
  return r;
}

inline Table andn_tt(const Table& a, const Table& b) {  // a & ~b
  Table r(a.size());
  for (size_t w = 0; w < a.size(); ++w) r[w] = a[w] & ~b[w];
  return r;
}

// Positive/negative cofactor with respect to `var`; result stays full width
// (independent of var).
inline Table cofactor(const Table& t, int var, bool polarity) {
  Table r(t.size());
  if (var < 6) {
    const Word m = kProj[var];
    const int sh = 1 << var;
    for (size_t w = 0; w < t.size(); ++w) {
      const Word half = polarity ? (t[w] & m) : (t[w] & ~m);
      r[w] = polarity ? (half | (half >> sh)) : (half | (half << sh));
    }
  } else {
    const size_t blk = size_t{1} << (var - 6);
    for (size_t w = 0; w < t.size(); ++w) {
      const bool hi = (w / blk) % 2 == 1;
      const size_t src = hi == polarity ? w : (polarity ? w + blk : w - blk);
      r[w] = t[src];
    }
  }
  return r;
}

inline bool depends_on(const Table& t, int var) {
  return cofactor(t, var, false) != cofactor(t, var, true);
}

/*! \brief Product term over up to 32 variables as positive/negative masks. */
struct Cube {
  uint32_t pos{0};
  uint32_t neg{0};
};

inline Table cube_table(const Cube& c, int n_vars) {
  Table t = make_const1(n_vars);
  for (int v = 0; v < n_vars; ++v) {
    if (c.pos & (1u << v)) t = and_tt(t, make_proj(v, n_vars));
    if (c.neg & (1u << v)) t = andn_tt(t, make_proj(v, n_vars));
  }
  return t;
}

/*! \brief Irredundant sum-of-products between lower and upper bounds.
 *
 * Minato-Morreale recursion; call with lower == upper == f for an
 * irredundant cover of f.
 */
std::vector<Cube> isop(const Table& lower, const Table& upper, int n_vars);

/*! \brief Small AND-structure over k leaves with complemented edges.
 *
 * Operands pack kind (leaf, gate, constant false) with an index and a
 * complement bit. Gates reference leaves or earlier gates only.
 */
struct Structure {
  struct Gate {
    int32_t a;
    int32_t b;
  };
  std::vector<Gate> gates;
  int32_t root{0};
};

enum class OpKind { leaf = 0, gate = 1, const0 = 2 };

constexpr int32_t make_op(OpKind kind, int index, bool compl_) {
  return (index << 3) | (static_cast<int>(kind) << 1) | (compl_ ? 1 : 0);
}
constexpr OpKind op_kind(int32_t op) { return static_cast<OpKind>((op >> 1) & 3); }
constexpr int op_index(int32_t op) { return op >> 3; }
constexpr bool op_compl(int32_t op) { return (op & 1) != 0; }
constexpr int32_t op_flip(int32_t op, bool c) { return c ? (op ^ 1) : op; }

/*! \brief Appends (or simplifies away) an AND gate; returns its operand. */
int32_t structure_and(Structure& s, int32_t a, int32_t b);

/*! \brief Disjunction through De Morgan on structure_and. */
int32_t structure_or(Structure& s, int32_t a, int32_t b);

/*! \brief Simulates a structure over given leaf tables. */
Table eval_structure(const Structure& s, const std::vector<Table>& leaf_tables, int n_vars);

/*! \brief Leaf indices reachable from the root, ascending. */
std::vector<int> structure_leaves(const Structure& s);

/*! \brief AND/OR factored form of a cube cover; leaves are the cover's variables. */
Structure factor_cover(const std::vector<Cube>& cover, int n_vars);

// 16-bit four-variable utilities for the rewriting database.
using Tt16 = uint16_t;

inline constexpr std::array<Tt16, 4> kProj4 = {0xAAAA, 0xCCCC, 0xF0F0, 0xFF00};

/*! \brief Applies an input permutation: input i of `f` becomes input perm[i]. */
Tt16 permute16(Tt16 f, const std::array<int, 4>& perm);

struct Canon16 {
  Tt16 repr;                  // class representative
  std::array<int, 4> perm;    // argmin permutation
  bool output_compl;          // complement applied before permuting
};

/*! \brief Exhaustive canonicalization over 24 permutations and output phase. */
Canon16 canonicalize16(Tt16 f);

}  // namespace aigforge::tt
