#include "rewrite_db.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace aigforge {

namespace {

using tt::Tt16;

Tt16 cofactor16(Tt16 f, int v, bool polarity) {
  const Tt16 m = tt::kProj4[v];
  const int sh = 1 << v;
  if (polarity) {
    const Tt16 h = f & m;
    return static_cast<Tt16>(h | (h >> sh));
  }
  const Tt16 h = f & static_cast<Tt16>(~m);
  return static_cast<Tt16>(h | (h << sh));
}

bool depends16(Tt16 f, int v) { return cofactor16(f, v, false) != cofactor16(f, v, true); }

constexpr int kClosureCap = 12;

}  // namespace

const RewriteDb& RewriteDb::instance() {
  static const RewriteDb db;
  return db;
}

void RewriteDb::insert(Tt16 f, int cost, const Rec& rec) {
  if (cost < cost_[f]) {
    cost_[f] = static_cast<uint8_t>(cost);
    rec_[f] = rec;
  }
}

RewriteDb::RewriteDb() {
  cost_.fill(0xFF);

  {
    std::array<int, 4> p = {0, 1, 2, 3};
    int pid = 0;
    do {
      perms_[pid] = p;
      for (int i = 0; i < 4; ++i) inv_perms_[pid][p[i]] = i;
      ++pid;
    } while (std::next_permutation(p.begin(), p.end()));
  }

  Rec rc;
  rc.kind = Rec::Kind::const0;
  insert(0x0000, 0, rc);
  rc.oc = 1;
  insert(0xFFFF, 0, rc);
  std::array<std::vector<uint16_t>, kClosureCap + 1> by_cost;
  for (int i = 0; i < 4; ++i) {
    Rec rl;
    rl.kind = Rec::Kind::leaf;
    rl.leaf = static_cast<uint8_t>(i);
    insert(tt::kProj4[i], 0, rl);
    rl.oc = 1;
    insert(static_cast<Tt16>(~tt::kProj4[i]), 0, rl);
    by_cost[0].push_back(tt::kProj4[i]);
  }

  for (int c = 1; c <= kClosureCap; ++c) {
    for (int a = 0; 2 * a <= c - 1; ++a) {
      const int b = c - 1 - a;
      for (size_t i = 0; i < by_cost[a].size(); ++i) {
        const Tt16 f = by_cost[a][i];
        if (cost_[f] != a) continue;
        const size_t j0 = (a == b) ? i : 0;
        for (size_t j = j0; j < by_cost[b].size(); ++j) {
          const Tt16 g = by_cost[b][j];
          if (cost_[g] != b) continue;
          for (int pol = 0; pol < 4; ++pol) {
            const Tt16 fa = (pol & 1) ? static_cast<Tt16>(~f) : f;
            const Tt16 gb = (pol & 2) ? static_cast<Tt16>(~g) : g;
            const Tt16 h = fa & gb;
            if (cost_[h] <= c && cost_[static_cast<Tt16>(~h)] <= c) continue;
            Rec r;
            r.kind = Rec::Kind::gate;
            r.fa = f;
            r.ca = static_cast<uint8_t>(pol & 1);
            r.fb = g;
            r.cb = static_cast<uint8_t>((pol >> 1) & 1);
            if (cost_[h] > c) {
              insert(h, c, r);
              by_cost[c].push_back(h);
            }
            r.oc = 1;
            insert(static_cast<Tt16>(~h), c, r);
          }
        }
      }
    }
  }

  for (uint32_t f = 0; f < 65536; ++f) fill(static_cast<Tt16>(f));

  {
    // Minterm maps make the 48-way canonical search cheap.
    std::array<std::array<uint8_t, 16>, 24> maps{};
    for (int pid = 0; pid < 24; ++pid)
      for (int m = 0; m < 16; ++m) {
        int target = 0;
        for (int i = 0; i < 4; ++i)
          if (m & (1 << i)) target |= 1 << perms_[pid][i];
        maps[pid][m] = static_cast<uint8_t>(target);
      }
    for (uint32_t fu = 0; fu < 65536; ++fu) {
      const Tt16 f = static_cast<Tt16>(fu);
      CanonEntry best{0xFFFF, 0, 0};
      bool have = false;
      for (int pid = 0; pid < 24; ++pid) {
        for (int oc = 0; oc < 2; ++oc) {
          const Tt16 src = oc ? static_cast<Tt16>(~f) : f;
          Tt16 cand = 0;
          for (int m = 0; m < 16; ++m)
            if (src & (1 << m)) cand |= static_cast<Tt16>(1 << maps[pid][m]);
          if (!have || cand < best.repr) {
            best = {cand, static_cast<uint8_t>(pid), static_cast<uint8_t>(oc)};
            have = true;
          }
        }
      }
      canon_[fu] = best;
    }
  }

  for (uint32_t f = 0; f < 65536; ++f)
    if (canon_[f].repr == f && !structures_.count(static_cast<uint16_t>(f)))
      structures_.emplace(static_cast<uint16_t>(f), materialize(static_cast<Tt16>(f)));
}

int RewriteDb::fill(Tt16 f) {
  if (cost_[f] != 0xFF) return cost_[f];
  int best = 0xFF;
  Rec best_rec;
  for (int v = 0; v < 4; ++v) {
    if (!depends16(f, v)) continue;
    const Tt16 f0 = cofactor16(f, v, false);
    const Tt16 f1 = cofactor16(f, v, true);
    int cand;
    Rec r;
    r.kind = Rec::Kind::gate;
    if (f0 == 0x0000) {  // f = x & f1
      cand = fill(f1) + 1;
      r.fa = tt::kProj4[v];
      r.fb = f1;
    } else if (f0 == 0xFFFF) {  // f = ~x | f1 = ~(x & ~f1)
      cand = fill(f1) + 1;
      r.fa = tt::kProj4[v];
      r.fb = f1;
      r.cb = 1;
      r.oc = 1;
    } else if (f1 == 0x0000) {  // f = ~x & f0
      cand = fill(f0) + 1;
      r.fa = tt::kProj4[v];
      r.ca = 1;
      r.fb = f0;
    } else if (f1 == 0xFFFF) {  // f = x | f0 = ~(~x & ~f0)
      cand = fill(f0) + 1;
      r.fa = tt::kProj4[v];
      r.ca = 1;
      r.fb = f0;
      r.cb = 1;
      r.oc = 1;
    } else {  // multiplexer on v
      const int c0 = fill(f0);
      const int c1 = fill(f1);
      const Tt16 h1 = tt::kProj4[v] & f1;
      const Tt16 h0 = static_cast<Tt16>(~tt::kProj4[v]) & f0;
      Rec rh;
      rh.kind = Rec::Kind::gate;
      rh.fa = tt::kProj4[v];
      rh.fb = f1;
      insert(h1, c1 + 1, rh);
      rh.oc = 1;
      insert(static_cast<Tt16>(~h1), c1 + 1, rh);
      rh = Rec{};
      rh.kind = Rec::Kind::gate;
      rh.fa = tt::kProj4[v];
      rh.ca = 1;
      rh.fb = f0;
      insert(h0, c0 + 1, rh);
      rh.oc = 1;
      insert(static_cast<Tt16>(~h0), c0 + 1, rh);
      cand = cost_[h1] + cost_[h0] + 1;
      r.fa = h1;
      r.ca = 1;
      r.fb = h0;
      r.cb = 1;
      r.oc = 1;
    }
    if (cand < best) {
      best = cand;
      best_rec = r;
    }
  }
  if (best == 0xFF) throw std::logic_error("rewrite db: unfillable function");
  insert(f, best, best_rec);
  Rec rc = best_rec;
  rc.oc ^= 1;
  insert(static_cast<Tt16>(~f), best, rc);
  return cost_[f];
}

tt::Structure RewriteDb::materialize(Tt16 f) const {
  tt::Structure s;
  std::unordered_map<uint16_t, int32_t> memo;
  auto build = [&](auto&& self, Tt16 g) -> int32_t {
    if (auto it = memo.find(g); it != memo.end()) return it->second;
    const Rec& r = rec_[g];
    int32_t op;
    switch (r.kind) {
      case Rec::Kind::const0:
        op = tt::make_op(tt::OpKind::const0, 0, r.oc != 0);
        break;
      case Rec::Kind::leaf:
        op = tt::make_op(tt::OpKind::leaf, r.leaf, r.oc != 0);
        break;
      case Rec::Kind::gate: {
        const int32_t a = tt::op_flip(self(self, r.fa), r.ca != 0);
        const int32_t b = tt::op_flip(self(self, r.fb), r.cb != 0);
        op = tt::op_flip(tt::structure_and(s, a, b), r.oc != 0);
        break;
      }
      default:
        throw std::logic_error("rewrite db: missing record");
    }
    memo[g] = op;
    memo[static_cast<uint16_t>(~g)] = op ^ 1;
    return op;
  };
  s.root = build(build, f);
  return s;
}

tt::Structure RewriteDb::structure_for(Tt16 f) const {
  const CanonEntry& ce = canon_[f];
  tt::Structure s = structures_.at(ce.repr);
  const auto& inv = inv_perms_[ce.perm_id];
  auto remap = [&](int32_t op) {
    if (tt::op_kind(op) == tt::OpKind::leaf)
      return tt::make_op(tt::OpKind::leaf, inv[tt::op_index(op)], tt::op_compl(op));
    return op;
  };
  for (auto& g : s.gates) {
    g.a = remap(g.a);
    g.b = remap(g.b);
  }
  s.root = remap(s.root);
  if (ce.output_compl) s.root ^= 1;
  return s;
}

}  // namespace aigforge
