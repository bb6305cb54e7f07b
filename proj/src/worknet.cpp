#include "worknet.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace aigforge {

namespace {

constexpr Literal kUnmapped{0xFFFFFFFFu};

uint64_t pair_key(Literal a, Literal b) {
  if (a.value > b.value) std::swap(a, b);
  return (static_cast<uint64_t>(a.value) << 32) | b.value;
}

}  // namespace

WorkNet::WorkNet(const Aig& aig) {
  n_pis_ = aig.n_pis;
  const size_t n_vars = size_t{1} + aig.n_pis + aig.gates.size();
  fanin0_.assign(n_vars, lit_false);
  fanin1_.assign(n_vars, lit_false);
  dead_.assign(n_vars, 0);
  refs_.assign(n_vars, 0);
  key_.assign(n_vars, 0);
  repl_.resize(n_vars);
  for (uint32_t v = 0; v < n_vars; ++v) repl_[v] = Literal::from_var(v, false);

  for (size_t i = 0; i < aig.gates.size(); ++i) {
    const uint32_t v = aig.and_var(static_cast<uint32_t>(i));
    fanin0_[v] = aig.gates[i].fanin0;
    fanin1_[v] = aig.gates[i].fanin1;
    key_[v] = pair_key(fanin0_[v], fanin1_[v]);
    hash_.emplace(key_[v], v);
    ++refs_[fanin0_[v].var()];
    ++refs_[fanin1_[v].var()];
  }
  for (Literal po : aig.outputs) {
    pos_.push_back(po);
    ++refs_[po.var()];
  }
  n_alive_ = aig.gates.size();
  name_ = aig.name;
}

Literal WorkNet::resolve(Literal l) {
  uint32_t root = l.var();
  bool acc = false;
  while (repl_[root].var() != root) {
    acc ^= repl_[root].complemented();
    root = repl_[root].var();
  }
  uint32_t u = l.var();
  bool prefix = false;
  while (repl_[u].var() != u) {
    const Literal next = repl_[u];
    repl_[u] = Literal::from_var(root, acc ^ prefix);
    prefix ^= next.complemented();
    u = next.var();
  }
  return Literal::from_var(root, acc ^ l.complemented());
}

Literal WorkNet::fanin0(uint32_t var) { return resolve(fanin0_[var]); }
Literal WorkNet::fanin1(uint32_t var) { return resolve(fanin1_[var]); }

void WorkNet::normalize(uint32_t var) {
  fanin0_[var] = resolve(fanin0_[var]);
  fanin1_[var] = resolve(fanin1_[var]);
}

Literal WorkNet::strash_and(Literal a, Literal b) {
  a = resolve(a);
  b = resolve(b);
  if (a.value > b.value) std::swap(a, b);
  if (a == lit_false) return lit_false;
  if (a == lit_true) return b;
  if (a == b) return a;
  if (a.var() == b.var()) return lit_false;

  const uint64_t key = pair_key(a, b);
  if (auto it = hash_.find(key); it != hash_.end() && !dead_[it->second])
    return Literal::from_var(it->second, false);

  const uint32_t v = static_cast<uint32_t>(fanin0_.size());
  fanin0_.push_back(a);
  fanin1_.push_back(b);
  dead_.push_back(0);
  refs_.push_back(0);
  key_.push_back(key);
  repl_.push_back(Literal::from_var(v, false));
  ++refs_[a.var()];
  ++refs_[b.var()];
  hash_[key] = v;
  ++n_alive_;
  return Literal::from_var(v, false);
}

std::optional<uint32_t> WorkNet::lookup(Literal a, Literal b) const {
  const auto it = hash_.find(pair_key(a, b));
  if (it == hash_.end() || dead_[it->second]) return std::nullopt;
  return it->second;
}

std::vector<uint32_t> WorkNet::mffc(uint32_t root, const std::vector<uint32_t>& keep_alive) {
  std::vector<uint32_t> victims;
  std::unordered_map<uint32_t, uint32_t> dec;
  std::vector<uint32_t> stack{root};
  const auto blocked = [&](uint32_t x) {
    return std::find(keep_alive.begin(), keep_alive.end(), x) != keep_alive.end();
  };
  while (!stack.empty()) {
    const uint32_t u = stack.back();
    stack.pop_back();
    victims.push_back(u);
    for (const Literal f : {fanin0(u), fanin1(u)}) {
      const uint32_t x = f.var();
      if (!is_and(x)) continue;
      assert(!dead_[x]);
      if (++dec[x] == refs_[x] && !blocked(x)) stack.push_back(x);
    }
  }
  return victims;
}

void WorkNet::kill(const std::vector<uint32_t>& victims) {
  for (const uint32_t u : victims) {
    assert(is_and(u) && !dead_[u]);
    normalize(u);
    dead_[u] = 1;
    --n_alive_;
    if (auto it = hash_.find(key_[u]); it != hash_.end() && it->second == u) hash_.erase(it);
    --refs_[fanin0_[u].var()];
    --refs_[fanin1_[u].var()];
  }
}

void WorkNet::commit(uint32_t v, Literal with) {
  with = resolve(with);
  assert(dead_[v]);
  assert(with.var() != v);
  assert(!dead_[with.var()]);
  repl_[v] = with;
  refs_[with.var()] += refs_[v];
  refs_[v] = 0;
}

std::vector<Literal> WorkNet::outputs() {
  std::vector<Literal> out;
  out.reserve(pos_.size());
  for (const Literal po : pos_) out.push_back(resolve(po));
  return out;
}

Aig WorkNet::extract() {
  AigBuilder b;
  for (uint32_t i = 0; i < n_pis_; ++i) b.add_input();
  std::vector<Literal> map(fanin0_.size(), kUnmapped);
  map[0] = lit_false;
  for (uint32_t i = 1; i <= n_pis_; ++i) map[i] = Literal::from_var(i, false);

  std::vector<uint32_t> stack;
  const auto ensure = [&](uint32_t root) {
    if (map[root] != kUnmapped) return;
    stack.push_back(root);
    while (!stack.empty()) {
      const uint32_t u = stack.back();
      if (map[u] != kUnmapped) {
        stack.pop_back();
        continue;
      }
      const Literal f0 = fanin0(u);
      const Literal f1 = fanin1(u);
      bool ready = true;
      if (map[f0.var()] == kUnmapped) {
        stack.push_back(f0.var());
        ready = false;
      }
      if (map[f1.var()] == kUnmapped) {
        stack.push_back(f1.var());
        ready = false;
      }
      if (!ready) continue;
      map[u] = b.strash_and(map[f0.var()] ^ f0.complemented(),
                            map[f1.var()] ^ f1.complemented());
      stack.pop_back();
    }
  };

  for (const Literal po : pos_) {
    const Literal r = resolve(po);
    ensure(r.var());
    b.add_output(map[r.var()] ^ r.complemented());
  }
  Aig out = sweep(b.build());
  out.name = name_;
  return out;
}

StructureFit fit_structure(WorkNet& net, const tt::Structure& s,
                           const std::vector<Literal>& leaves, uint32_t replaced,
                           const std::vector<uint32_t>& victims) {
  constexpr uint64_t kVirtual = uint64_t{1} << 63;
  const auto is_victim = [&](uint32_t x) {
    return std::find(victims.begin(), victims.end(), x) != victims.end();
  };

  StructureFit fit;
  fit.viable = true;
  uint64_t next_virtual = 0;
  bool self_hit = false;
  std::map<std::pair<uint64_t, uint64_t>, uint64_t> memo;

  const auto and_val = [&](uint64_t va, uint64_t vb) -> uint64_t {
    if (va > vb) std::swap(va, vb);
    if (va == 0) return 0;
    if (va == 1) return vb;
    if (va == vb) return va;
    if ((va ^ vb) == 1) return 0;
    const auto key = std::make_pair(va, vb);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    uint64_t val;
    if (!(va & kVirtual) && !(vb & kVirtual)) {
      const auto hit = net.lookup(Literal{static_cast<uint32_t>(va)},
                                  Literal{static_cast<uint32_t>(vb)});
      if (hit && !is_victim(*hit)) {
        if (*hit == replaced) self_hit = true;
        val = Literal::from_var(*hit, false).value;
      } else {
        val = kVirtual | (next_virtual++ << 1);
      }
    } else {
      val = kVirtual | (next_virtual++ << 1);
    }
    memo.emplace(key, val);
    return val;
  };

  std::vector<uint64_t> gate_vals(s.gates.size());
  const auto op_val = [&](int32_t op) -> uint64_t {
    uint64_t v = 0;
    switch (tt::op_kind(op)) {
      case tt::OpKind::leaf: v = leaves[tt::op_index(op)].value; break;
      case tt::OpKind::gate: v = gate_vals[tt::op_index(op)]; break;
      case tt::OpKind::const0: v = 0; break;
    }
    return tt::op_compl(op) ? (v ^ 1) : v;
  };
  for (size_t i = 0; i < s.gates.size(); ++i)
    gate_vals[i] = and_val(op_val(s.gates[i].a), op_val(s.gates[i].b));
  const uint64_t root = op_val(s.root);

  fit.added = static_cast<int>(next_virtual);
  fit.root_real = !(root & kVirtual);
  if (fit.root_real) {
    fit.root = Literal{static_cast<uint32_t>(root)};
    fit.noop = fit.root.var() == replaced;
  }
  if (self_hit && !fit.noop) fit.viable = false;
  return fit;
}

Literal build_structure(WorkNet& net, const tt::Structure& s,
                        const std::vector<Literal>& leaves) {
  std::vector<Literal> gate_lits(s.gates.size());
  const auto op_lit = [&](int32_t op) -> Literal {
    Literal l = lit_false;
    switch (tt::op_kind(op)) {
      case tt::OpKind::leaf: l = leaves[tt::op_index(op)]; break;
      case tt::OpKind::gate: l = gate_lits[tt::op_index(op)]; break;
      case tt::OpKind::const0: l = lit_false; break;
    }
    return l ^ tt::op_compl(op);
  };
  for (size_t i = 0; i < s.gates.size(); ++i)
    gate_lits[i] = net.strash_and(op_lit(s.gates[i].a), op_lit(s.gates[i].b));
  return op_lit(s.root);
}

Aig strash_clean(const Aig& aig) { return WorkNet(aig).extract(); }

}  // namespace aigforge
