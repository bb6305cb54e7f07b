#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rewrite_db.hpp"
#include "truthtab.hpp"

using namespace aigforge;

namespace {

tt::Table random_table(int n_vars, std::mt19937_64& rng) {
  std::vector<uint8_t> bits(size_t{1} << n_vars);
  for (auto& b : bits) b = static_cast<uint8_t>(rng() & 1);
  tt::Table t = tt::make_const0(n_vars);
  const size_t mask = (size_t{1} << n_vars) - 1;
  for (size_t w = 0; w < t.size(); ++w)
    for (int p = 0; p < 64; ++p)
      if (bits[(w * 64 + p) & mask]) t[w] |= tt::Word{1} << p;
  return t;
}

tt::Table cover_table(const std::vector<tt::Cube>& cover, int n_vars) {
  tt::Table acc = tt::make_const0(n_vars);
  for (const tt::Cube& c : cover) acc = tt::or_tt(acc, tt::cube_table(c, n_vars));
  return acc;
}

std::vector<tt::Table> projections(int n_vars) {
  std::vector<tt::Table> p;
  for (int i = 0; i < n_vars; ++i) p.push_back(tt::make_proj(i, n_vars));
  return p;
}

tt::Table replicate16(tt::Tt16 f) { return {static_cast<tt::Word>(f) * 0x0001000100010001ull}; }

}  // namespace

TEST_CASE("projection tables and cofactors") {
  for (int n : {3, 5, 7}) {
    for (int v = 0; v < n; ++v) {
      const tt::Table p = tt::make_proj(v, n);
      CHECK(tt::cofactor(p, v, true) == tt::make_const1(n));
      CHECK(tt::cofactor(p, v, false) == tt::make_const0(n));
      CHECK(tt::depends_on(p, v));
      for (int u = 0; u < n; ++u)
        if (u != v) CHECK_FALSE(tt::depends_on(p, u));
    }
  }
}

TEST_CASE("cofactor reconstruction identity") {
  std::mt19937_64 rng(7);
  for (int n : {4, 6, 8}) {
    for (int trial = 0; trial < 20; ++trial) {
      const tt::Table f = random_table(n, rng);
      for (int v = 0; v < n; ++v) {
        const tt::Table f0 = tt::cofactor(f, v, false);
        const tt::Table f1 = tt::cofactor(f, v, true);
        const tt::Table p = tt::make_proj(v, n);
        // f == (v ? f1 : f0)
        const tt::Table rebuilt = tt::or_tt(tt::and_tt(p, f1), tt::andn_tt(f0, p));
        CHECK(rebuilt == f);
      }
    }
  }
}

TEST_CASE("isop covers exactly the target function") {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 3, 5, 7, 9}) {
    for (int trial = 0; trial < 25; ++trial) {
      const tt::Table f = random_table(n, rng);
      const auto cover = tt::isop(f, f, n);
      CHECK(cover_table(cover, n) == f);
    }
  }
}

TEST_CASE("isop of constants") {
  CHECK(tt::isop(tt::make_const0(4), tt::make_const0(4), 4).empty());
  const auto ones = tt::isop(tt::make_const1(4), tt::make_const1(4), 4);
  REQUIRE(ones.size() == 1);
  CHECK(ones[0].pos == 0);
  CHECK(ones[0].neg == 0);
}

TEST_CASE("factored cover computes the covered function") {
  std::mt19937_64 rng(13);
  for (int n : {2, 4, 6, 8, 10}) {
    const auto proj = projections(n);
    for (int trial = 0; trial < 25; ++trial) {
      const tt::Table f = random_table(n, rng);
      const auto cover = tt::isop(f, f, n);
      const tt::Structure s = tt::factor_cover(cover, n);
      CHECK(tt::eval_structure(s, proj, n) == f);
    }
  }
}

TEST_CASE("structure_leaves reports reachable leaves only") {
  tt::Structure s;
  const int32_t a = tt::make_op(tt::OpKind::leaf, 0, false);
  const int32_t b = tt::make_op(tt::OpKind::leaf, 2, true);
  tt::structure_and(s, a, tt::make_op(tt::OpKind::leaf, 3, false));  // unreachable
  s.root = tt::structure_and(s, a, b);
  const auto leaves = tt::structure_leaves(s);
  CHECK(leaves == std::vector<int>{0, 2});
}

TEST_CASE("permute16 identity and inverse round trip") {
  std::mt19937_64 rng(17);
  const std::array<int, 4> id = {0, 1, 2, 3};
  std::array<int, 4> perm = {2, 0, 3, 1};
  std::array<int, 4> inv{};
  for (int i = 0; i < 4; ++i) inv[perm[i]] = i;
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = static_cast<tt::Tt16>(rng());
    CHECK(tt::permute16(f, id) == f);
    CHECK(tt::permute16(tt::permute16(f, perm), inv) == f);
  }
}

TEST_CASE("canonicalize16 maps NPN-lite equivalents to one representative") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = static_cast<tt::Tt16>(rng());
    const tt::Canon16 c = tt::canonicalize16(f);
    // Representative reachable by the claimed transform.
    const tt::Tt16 via = tt::permute16(c.output_compl ? static_cast<tt::Tt16>(~f) : f, c.perm);
    CHECK(via == c.repr);
    // Any permuted/complemented variant lands on the same representative.
    std::array<int, 4> perm = {1, 3, 0, 2};
    const tt::Tt16 variant = static_cast<tt::Tt16>(~tt::permute16(f, perm));
    CHECK(tt::canonicalize16(variant).repr == c.repr);
  }
}

TEST_CASE("rewrite database reproduces every four-input function") {
  const RewriteDb& db = RewriteDb::instance();
  const auto proj = projections(4);
  for (uint32_t fu = 0; fu < 65536; ++fu) {
    const auto f = static_cast<tt::Tt16>(fu);
    const tt::Structure s = db.structure_for(f);
    REQUIRE(tt::eval_structure(s, proj, 4) == replicate16(f));
  }
}

TEST_CASE("rewrite database costs are sane") {
  const RewriteDb& db = RewriteDb::instance();
  CHECK(db.tree_cost(0x0000) == 0);
  CHECK(db.tree_cost(0xFFFF) == 0);
  for (int i = 0; i < 4; ++i) {
    CHECK(db.tree_cost(tt::kProj4[i]) == 0);
    CHECK(db.tree_cost(static_cast<tt::Tt16>(~tt::kProj4[i])) == 0);
  }
  CHECK(db.tree_cost(tt::kProj4[0] & tt::kProj4[1]) == 1);
  CHECK(db.tree_cost(static_cast<tt::Tt16>(tt::kProj4[0] | tt::kProj4[1])) == 1);
  // Multiplexer x0 ? x1 : x2 takes three gates.
  const tt::Tt16 mux = (tt::kProj4[0] & tt::kProj4[1]) |
                       (static_cast<tt::Tt16>(~tt::kProj4[0]) & tt::kProj4[2]);
  CHECK(db.tree_cost(mux) == 3);
  // Structure gate counts never exceed the recorded tree cost.
  for (uint32_t fu = 0; fu < 65536; fu += 11) {
    const auto f = static_cast<tt::Tt16>(fu);
    CHECK(static_cast<int>(db.structure_for(f).gates.size()) <= db.tree_cost(f));
  }
}
