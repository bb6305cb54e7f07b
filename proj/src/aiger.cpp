#include "aigforge/aiger.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace aigforge {

namespace {

using Kind = AigerError::Kind;

struct Cursor {
  const std::string& text;
  size_t pos{0};
  size_t line{0};

  bool at_end() const { return pos >= text.size(); }

  // Returns the next line without its terminator; counts the line number.
  std::string next_line() {
    ++line;
    size_t end = text.find('\n', pos);
    std::string out;
    if (end == std::string::npos) {
      out = text.substr(pos);
      pos = text.size();
    } else {
      out = text.substr(pos, end - pos);
      pos = end + 1;
    }
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return out;
  }
};

std::vector<uint64_t> parse_uints(const std::string& s, size_t line, Kind kind, const char* what) {
  std::vector<uint64_t> out;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ') {
      ++i;
      continue;
    }
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
    if (ec != std::errc{} || (ptr != s.data() + s.size() && *ptr != ' '))
      throw AigerError(kind, line, std::string(what) + ": '" + s + "'");
    out.push_back(v);
    i = static_cast<size_t>(ptr - s.data());
  }
  return out;
}

}  // namespace

Aig parse_aiger(const std::string& text) {
  Cursor cur{text};
  if (cur.at_end()) throw AigerError(Kind::malformed_header, 1, "empty document");

  const std::string header = cur.next_line();
  if (header.rfind("aig ", 0) == 0 || header == "aig")
    throw AigerError(Kind::malformed_header, cur.line,
                     "binary AIGER ('aig') is not supported; expected ASCII 'aag'");
  if (header.rfind("aag ", 0) != 0)
    throw AigerError(Kind::malformed_header, cur.line, "expected 'aag M I L O A' header");
  const auto h = parse_uints(header.substr(4), cur.line, Kind::malformed_header, "bad header field");
  if (h.size() != 5)
    throw AigerError(Kind::malformed_header, cur.line, "header needs exactly 5 fields");
  const uint64_t M = h[0], I = h[1], L = h[2], O = h[3], A = h[4];
  if (L > 0) throw AigerError(Kind::latch_present, cur.line, "latches unsupported");
  if (I + A > M)
    throw AigerError(Kind::malformed_header, cur.line, "M smaller than I + A");

  // kind per file variable: 0 unknown, 1 constant, 2 PI, 3 AND. Internal
  // variables are dense: PIs take 1..I in file order, gates follow.
  std::vector<uint8_t> var_kind(M + 1, 0);
  std::vector<uint32_t> var_map(M + 1, 0);
  var_kind[0] = 1;

  Aig aig;
  aig.n_pis = static_cast<uint32_t>(I);

  auto read_literal_line = [&](const char* what) -> uint64_t {
    if (cur.at_end())
      throw AigerError(Kind::malformed_body, cur.line + 1,
                       std::string("unexpected end of file in ") + what);
    const std::string s = cur.next_line();
    const auto v = parse_uints(s, cur.line, Kind::malformed_body, "expected literal");
    if (v.size() != 1)
      throw AigerError(Kind::malformed_body, cur.line, std::string("expected one literal in ") + what);
    return v[0];
  };

  for (uint64_t i = 0; i < I; ++i) {
    const uint64_t lit = read_literal_line("input section");
    if (lit > 2 * M + 1)
      throw AigerError(Kind::literal_out_of_range, cur.line, "input literal exceeds 2M+1");
    if (lit < 2 || (lit & 1))
      throw AigerError(Kind::malformed_body, cur.line, "input literal must be even and nonzero");
    const uint64_t var = lit >> 1;
    if (var_kind[var] != 0)
      throw AigerError(Kind::malformed_body, cur.line, "input redefines a variable");
    var_kind[var] = 2;
    var_map[var] = static_cast<uint32_t>(1 + i);
  }

  std::vector<uint64_t> output_lits;
  std::vector<size_t> output_lines;
  output_lits.reserve(O);
  for (uint64_t i = 0; i < O; ++i) {
    const uint64_t lit = read_literal_line("output section");
    if (lit > 2 * M + 1)
      throw AigerError(Kind::literal_out_of_range, cur.line, "output literal exceeds 2M+1");
    output_lits.push_back(lit);
    output_lines.push_back(cur.line);
  }

  for (uint64_t i = 0; i < A; ++i) {
    if (cur.at_end())
      throw AigerError(Kind::malformed_body, cur.line + 1, "unexpected end of file in AND section");
    const std::string s = cur.next_line();
    const auto v = parse_uints(s, cur.line, Kind::malformed_body, "expected 'lhs rhs0 rhs1'");
    if (v.size() != 3)
      throw AigerError(Kind::malformed_body, cur.line, "AND line needs exactly 3 literals");
    const uint64_t lhs = v[0];
    if (lhs > 2 * M + 1)
      throw AigerError(Kind::literal_out_of_range, cur.line, "AND literal exceeds 2M+1");
    if (lhs < 2 || (lhs & 1))
      throw AigerError(Kind::malformed_body, cur.line, "AND lhs must be even and nonzero");
    const uint64_t lvar = lhs >> 1;
    if (var_kind[lvar] != 0)
      throw AigerError(Kind::malformed_body, cur.line, "AND lhs redefines a variable");
    Literal fanin[2];
    for (int k = 0; k < 2; ++k) {
      const uint64_t rhs = v[1 + k];
      if (rhs > 2 * M + 1)
        throw AigerError(Kind::literal_out_of_range, cur.line, "AND fanin literal exceeds 2M+1");
      const uint64_t rvar = rhs >> 1;
      if (var_kind[rvar] == 0)
        throw AigerError(Kind::forward_reference, cur.line,
                         "AND fanin references a literal not yet defined");
      fanin[k] = Literal::from_var(var_map[rvar], (rhs & 1) != 0);
    }
    var_kind[lvar] = 3;
    var_map[lvar] = aig.and_var(static_cast<uint32_t>(aig.gates.size()));
    aig.gates.push_back(AndGate{fanin[0], fanin[1]});
  }

  for (uint64_t i = 0; i < O; ++i) {
    const uint64_t lit = output_lits[i];
    const uint64_t var = lit >> 1;
    if (var_kind[var] == 0)
      throw AigerError(Kind::forward_reference, output_lines[i],
                       "output references an undefined literal");
    aig.outputs.push_back(Literal::from_var(var_map[var], (lit & 1) != 0));
  }

  // Optional trailing sections: symbol entries, then a comment block.
  bool in_comment = false;
  while (!cur.at_end()) {
    const std::string s = cur.next_line();
    if (in_comment) continue;
    if (s == "c") {
      in_comment = true;
      continue;
    }
    if (!s.empty() && (s[0] == 'i' || s[0] == 'l' || s[0] == 'o')) continue;
    if (s.empty() && cur.at_end()) break;
    throw AigerError(Kind::malformed_body, cur.line, "unexpected content after AND section");
  }
  return aig;
}

std::string write_aiger(const Aig& aig) {
  std::ostringstream os;
  const uint64_t M = aig.n_pis + aig.num_ands();
  os << "aag " << M << ' ' << aig.n_pis << " 0 " << aig.num_pos() << ' ' << aig.num_ands()
     << '\n';
  for (uint32_t i = 1; i <= aig.n_pis; ++i) os << 2 * i << '\n';
  for (const Literal po : aig.outputs) os << po.value << '\n';
  for (uint32_t i = 0; i < aig.num_ands(); ++i) {
    const AndGate& g = aig.gates[i];
    os << 2 * aig.and_var(i) << ' ' << g.fanin0.value << ' ' << g.fanin1.value << '\n';
  }
  return os.str();
}

Aig read_aiger_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Aig aig = parse_aiger(ss.str());
  const size_t slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  if (base.size() > 4 && base.substr(base.size() - 4) == ".aag") base.resize(base.size() - 4);
  aig.name = base;
  return aig;
}

void write_aiger_file(const Aig& aig, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << write_aiger(aig);
}

}  // namespace aigforge
