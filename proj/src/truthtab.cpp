#include "truthtab.hpp"

#include <algorithm>
#include <stdexcept>

namespace aigforge::tt {

namespace {

std::vector<Cube> isop_rec(const Table& lower, const Table& upper, int top, int n_vars,
                           Table& cover_tt) {
  if (is_const0(lower)) {
    cover_tt = make_const0(n_vars);
    return {};
  }
  if (is_const1(upper)) {
    cover_tt = make_const1(n_vars);
    return {Cube{}};
  }
  int v = top;
  while (v >= 0 && !depends_on(lower, v) && !depends_on(upper, v)) --v;
  if (v < 0) throw std::logic_error("isop: bound invariant violated");

  const Table l0 = cofactor(lower, v, false);
  const Table l1 = cofactor(lower, v, true);
  const Table u0 = cofactor(upper, v, false);
  const Table u1 = cofactor(upper, v, true);

  Table c0, c1, cs;
  auto cubes0 = isop_rec(andn_tt(l0, u1), u0, v - 1, n_vars, c0);
  auto cubes1 = isop_rec(andn_tt(l1, u0), u1, v - 1, n_vars, c1);
  const Table l_rest = or_tt(andn_tt(l0, c0), andn_tt(l1, c1));
  auto cubes_star = isop_rec(l_rest, and_tt(u0, u1), v - 1, n_vars, cs);

  for (auto& c : cubes0) c.neg |= 1u << v;
  for (auto& c : cubes1) c.pos |= 1u << v;

  const Table proj = make_proj(v, n_vars);
  cover_tt = or_tt(or_tt(andn_tt(c0, proj), and_tt(c1, proj)), cs);

  std::vector<Cube> out;
  out.reserve(cubes0.size() + cubes1.size() + cubes_star.size());
  out.insert(out.end(), cubes0.begin(), cubes0.end());
  out.insert(out.end(), cubes1.begin(), cubes1.end());
  out.insert(out.end(), cubes_star.begin(), cubes_star.end());
  return out;
}

constexpr int32_t kConst0 = make_op(OpKind::const0, 0, false);
constexpr int32_t kConst1 = make_op(OpKind::const0, 0, true);

int32_t reduce_balanced(Structure& s, std::vector<int32_t> ops, bool disjunction) {
  if (ops.empty()) return disjunction ? kConst0 : kConst1;
  while (ops.size() > 1) {
    std::vector<int32_t> next;
    next.reserve((ops.size() + 1) / 2);
    for (size_t i = 0; i + 1 < ops.size(); i += 2)
      next.push_back(disjunction ? structure_or(s, ops[i], ops[i + 1])
                                 : structure_and(s, ops[i], ops[i + 1]));
    if (ops.size() % 2) next.push_back(ops.back());
    ops = std::move(next);
  }
  return ops[0];
}

int32_t cube_op(Structure& s, const Cube& c, int n_vars) {
  std::vector<int32_t> lits;
  for (int v = 0; v < n_vars; ++v) {
    if (c.pos & (1u << v)) lits.push_back(make_op(OpKind::leaf, v, false));
    if (c.neg & (1u << v)) lits.push_back(make_op(OpKind::leaf, v, true));
  }
  return reduce_balanced(s, std::move(lits), false);
}

int32_t factor_rec(Structure& s, const std::vector<Cube>& cover, int n_vars) {
  if (cover.empty()) return kConst0;
  if (cover.size() == 1) return cube_op(s, cover[0], n_vars);

  int best_lit = -1;  // 2 * var + (negated ? 1 : 0)
  size_t best_count = 1;
  for (int v = 0; v < n_vars; ++v) {
    for (int phase = 0; phase < 2; ++phase) {
      size_t count = 0;
      for (const Cube& c : cover)
        if ((phase ? c.neg : c.pos) & (1u << v)) ++count;
      if (count > best_count) {
        best_count = count;
        best_lit = 2 * v + phase;
      }
    }
  }

  if (best_lit >= 0) {
    const int v = best_lit / 2;
    const bool neg = best_lit % 2;
    std::vector<Cube> quotient, rest;
    for (Cube c : cover) {
      uint32_t& mask = neg ? c.neg : c.pos;
      if (mask & (1u << v)) {
        mask &= ~(1u << v);
        quotient.push_back(c);
      } else {
        rest.push_back(c);
      }
    }
    const int32_t lit = make_op(OpKind::leaf, v, neg);
    const int32_t q = structure_and(s, lit, factor_rec(s, quotient, n_vars));
    return structure_or(s, q, factor_rec(s, rest, n_vars));
  }

  std::vector<int32_t> terms;
  terms.reserve(cover.size());
  for (const Cube& c : cover) terms.push_back(cube_op(s, c, n_vars));
  return reduce_balanced(s, std::move(terms), true);
}

}  // namespace

std::vector<Cube> isop(const Table& lower, const Table& upper, int n_vars) {
  Table cover_tt;
  return isop_rec(lower, upper, n_vars - 1, n_vars, cover_tt);
}

int32_t structure_and(Structure& s, int32_t a, int32_t b) {
  if (a == kConst0 || b == kConst0) return kConst0;
  if (a == kConst1) return b;
  if (b == kConst1) return a;
  if (a == b) return a;
  if (a == (b ^ 1)) return kConst0;
  if (b < a) std::swap(a, b);
  s.gates.push_back({a, b});
  return make_op(OpKind::gate, static_cast<int>(s.gates.size()) - 1, false);
}

int32_t structure_or(Structure& s, int32_t a, int32_t b) {
  return op_flip(structure_and(s, a ^ 1, b ^ 1), true);
}

Table eval_structure(const Structure& s, const std::vector<Table>& leaf_tables, int n_vars) {
  std::vector<Table> gate_tables(s.gates.size());
  auto op_table = [&](int32_t op) -> Table {
    Table t;
    switch (op_kind(op)) {
      case OpKind::leaf: t = leaf_tables[op_index(op)]; break;
      case OpKind::gate: t = gate_tables[op_index(op)]; break;
      case OpKind::const0: t = make_const0(n_vars); break;
    }
    return op_compl(op) ? invert(std::move(t)) : t;
  };
  for (size_t i = 0; i < s.gates.size(); ++i)
    gate_tables[i] = and_tt(op_table(s.gates[i].a), op_table(s.gates[i].b));
  return op_table(s.root);
}

std::vector<int> structure_leaves(const Structure& s) {
  std::vector<char> gate_mark(s.gates.size(), 0);
  std::vector<char> leaf_mark;
  const auto mark = [&](int32_t op) {
    if (op_kind(op) == OpKind::gate) {
      gate_mark[op_index(op)] = 1;
    } else if (op_kind(op) == OpKind::leaf) {
      const size_t i = static_cast<size_t>(op_index(op));
      if (leaf_mark.size() <= i) leaf_mark.resize(i + 1, 0);
      leaf_mark[i] = 1;
    }
  };
  mark(s.root);
  for (size_t i = s.gates.size(); i-- > 0;) {
    if (!gate_mark[i]) continue;
    mark(s.gates[i].a);
    mark(s.gates[i].b);
  }
  std::vector<int> out;
  for (size_t i = 0; i < leaf_mark.size(); ++i)
    if (leaf_mark[i]) out.push_back(static_cast<int>(i));
  return out;
}

Structure factor_cover(const std::vector<Cube>& cover, int n_vars) {
  Structure s;
  s.root = factor_rec(s, cover, n_vars);
  return s;
}

Tt16 permute16(Tt16 f, const std::array<int, 4>& perm) {
  Tt16 g = 0;
  for (int m = 0; m < 16; ++m) {
    if (!(f & (1 << m))) continue;
    int target = 0;
    for (int i = 0; i < 4; ++i)
      if (m & (1 << i)) target |= 1 << perm[i];
    g |= 1 << target;
  }
  return g;
}

Canon16 canonicalize16(Tt16 f) {
  Canon16 best{static_cast<Tt16>(0xFFFF), {0, 1, 2, 3}, false};
  bool first = true;
  std::array<int, 4> perm = {0, 1, 2, 3};
  do {
    for (int oc = 0; oc < 2; ++oc) {
      const Tt16 cand = permute16(oc ? static_cast<Tt16>(~f) : f, perm);
      if (first || cand < best.repr) {
        best = {cand, perm, oc != 0};
        first = false;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace aigforge::tt
