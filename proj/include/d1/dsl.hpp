#pragma once

#include "d1/bitstream.hpp"
#include "d1/growth.hpp"

#include <stdexcept>
#include <string>

namespace d1 {

// Positioned syntax error from the stream-expression parser.
struct parse_error : std::runtime_error {
    parse_error(std::size_t line, std::size_t col, const std::string& what)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
          line(line), col(col) {}
    std::size_t line;
    std::size_t col;
};

// Grammar:
//   expr   := ident "(" args ")" | ident | "set{" nats "}" | "cofinite{" nats "}"
//           | "periodic(" bits ")"
//   args   := expr ("," expr)*
//   nats   := nat ("," nat)*
// Stream idents: all none evens odds compl union inter join r obs15
//                slowdense sparsecompl pi11a pi11b
// Growth idents: exp2 poly table max; table{v0,...;default}.
// pi11a/pi11b take a tree JSON file path as a bare argument.
Bitstream parse_stream(const std::string& text);
GrowthFunction parse_growth(const std::string& text);

} // namespace d1
