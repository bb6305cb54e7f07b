/*!
  \file aiger.hpp
  \brief ASCII AIGER (aag) reader and writer, combinational subset
*/

#pragma once

#include <stdexcept>
#include <string>

#include "aigforge/aig.hpp"

namespace aigforge {

/*! \brief Parse failure; `line` is 1-based within the document. */
class AigerError : public std::runtime_error {
public:
  enum class Kind { malformed_header, forward_reference, latch_present, literal_out_of_range, malformed_body };

  AigerError(Kind kind, size_t line, const std::string& what)
      : std::runtime_error("aag line " + std::to_string(line) + ": " + what),
        kind_(kind),
        line_(line) {}

  Kind kind() const { return kind_; }
  size_t line() const { return line_; }

private:
  Kind kind_;
  size_t line_;
};

/*! \brief Parses an ASCII AIGER document (header `aag M I L O A`).
 *
 * Latches are rejected, as is the binary `aig` format. Symbol and comment
 * sections are accepted and discarded. Throws AigerError on malformed input.
 */
Aig parse_aiger(const std::string& text);

/*! \brief Serializes with dense variable numbering (PIs 1..I, gates follow).
 *
 * No symbol table or comments are emitted, so parse_aiger(write_aiger(a))
 * is structurally identical to a.
 */
std::string write_aiger(const Aig& aig);

Aig read_aiger_file(const std::string& path);
void write_aiger_file(const Aig& aig, const std::string& path);

}  // namespace aigforge
