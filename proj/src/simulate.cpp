#include "aigforge/simulate.hpp"

#include <random>
#include <stdexcept>

namespace aigforge {

namespace {

// Bit patterns of the first six exhaustive input variables within one word.
constexpr Word kVarMask[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};

std::vector<std::vector<Word>> run_words(const Aig& aig,
                                         const std::vector<std::vector<Word>>& pi_words,
                                         size_t n_words) {
  std::vector<std::vector<Word>> values(aig.num_nodes(), std::vector<Word>(n_words, 0));
  for (uint32_t i = 0; i < aig.n_pis; ++i) values[1 + i] = pi_words[i];
  for (uint32_t i = 0; i < aig.num_ands(); ++i) {
    const AndGate& g = aig.gates[i];
    const Word m0 = g.fanin0.complemented() ? ~Word{0} : 0;
    const Word m1 = g.fanin1.complemented() ? ~Word{0} : 0;
    const auto& v0 = values[g.fanin0.var()];
    const auto& v1 = values[g.fanin1.var()];
    auto& out = values[aig.and_var(i)];
    for (size_t w = 0; w < n_words; ++w) out[w] = (v0[w] ^ m0) & (v1[w] ^ m1);
  }
  std::vector<std::vector<Word>> pos(aig.num_pos());
  for (uint32_t j = 0; j < aig.num_pos(); ++j) {
    const Literal po = aig.outputs[j];
    const Word m = po.complemented() ? ~Word{0} : 0;
    auto& row = pos[j];
    row.resize(n_words);
    for (size_t w = 0; w < n_words; ++w) row[w] = values[po.var()][w] ^ m;
  }
  return pos;
}

std::vector<std::vector<Word>> exhaustive_patterns(uint32_t n_pis, size_t n_words) {
  std::vector<std::vector<Word>> rows(n_pis, std::vector<Word>(n_words, 0));
  for (uint32_t i = 0; i < n_pis; ++i) {
    for (size_t w = 0; w < n_words; ++w) {
      if (i < 6)
        rows[i][w] = kVarMask[i];
      else
        rows[i][w] = ((w >> (i - 6)) & 1) ? ~Word{0} : 0;
    }
  }
  return rows;
}

Counterexample extract_cex(const std::vector<std::vector<Word>>& pi_rows, size_t word,
                           int bit, uint32_t po_index) {
  Counterexample cex;
  cex.po_index = po_index;
  cex.pi_values.resize(pi_rows.size());
  for (size_t i = 0; i < pi_rows.size(); ++i)
    cex.pi_values[i] = ((pi_rows[i][word] >> bit) & 1) != 0;
  return cex;
}

std::optional<Counterexample> compare_outputs(const std::vector<std::vector<Word>>& pi_rows,
                                              const std::vector<std::vector<Word>>& oa,
                                              const std::vector<std::vector<Word>>& ob,
                                              size_t n_words, Word last_word_mask) {
  for (uint32_t j = 0; j < oa.size(); ++j) {
    for (size_t w = 0; w < n_words; ++w) {
      Word diff = oa[j][w] ^ ob[j][w];
      if (w + 1 == n_words) diff &= last_word_mask;
      if (diff) {
        const int bit = __builtin_ctzll(diff);
        return extract_cex(pi_rows, w, bit, j);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::vector<Word>> simulate(const Aig& aig,
                                        const std::vector<std::vector<Word>>& pi_words) {
  if (pi_words.size() != aig.n_pis)
    throw std::invalid_argument("simulate: need one word row per PI");
  const size_t n_words = pi_words.empty() ? 1 : pi_words[0].size();
  for (const auto& row : pi_words)
    if (row.size() != n_words) throw std::invalid_argument("simulate: ragged input rows");
  return run_words(aig, pi_words, n_words);
}

EquivVerdict check_equivalence(const Aig& a, const Aig& b, const EquivOptions& opt) {
  if (a.num_pis() != b.num_pis() || a.num_pos() != b.num_pos())
    throw std::invalid_argument("check_equivalence: interface mismatch");

  if (opt.mode == EquivOptions::Mode::exhaustive) {
    if (a.num_pis() > 16)
      throw std::invalid_argument("check_equivalence: exhaustive mode needs <= 16 PIs");
    const uint64_t n_patterns = uint64_t{1} << a.num_pis();
    const size_t n_words = static_cast<size_t>((n_patterns + 63) / 64);
    const Word last_mask =
        n_patterns % 64 == 0 ? ~Word{0} : ((Word{1} << (n_patterns % 64)) - 1);
    const auto pi_rows = exhaustive_patterns(a.num_pis(), n_words);
    const auto oa = run_words(a, pi_rows, n_words);
    const auto ob = run_words(b, pi_rows, n_words);
    if (auto cex = compare_outputs(pi_rows, oa, ob, n_words, last_mask))
      return EquivVerdict{EquivVerdict::Kind::counterexample, std::move(cex)};
    return EquivVerdict{EquivVerdict::Kind::equivalent, std::nullopt};
  }

  std::mt19937_64 rng(opt.seed);
  const uint64_t n_vectors = std::max<uint64_t>(opt.n_vectors, 1);
  const size_t n_words = static_cast<size_t>((n_vectors + 63) / 64);
  const Word last_mask = n_vectors % 64 == 0 ? ~Word{0} : ((Word{1} << (n_vectors % 64)) - 1);
  std::vector<std::vector<Word>> pi_rows(a.num_pis(), std::vector<Word>(n_words));
  for (auto& row : pi_rows)
    for (auto& w : row) w = rng();
  const auto oa = run_words(a, pi_rows, n_words);
  const auto ob = run_words(b, pi_rows, n_words);
  if (auto cex = compare_outputs(pi_rows, oa, ob, n_words, last_mask))
    return EquivVerdict{EquivVerdict::Kind::counterexample, std::move(cex)};
  return EquivVerdict{EquivVerdict::Kind::inconclusive, std::nullopt};
}

}  // namespace aigforge
