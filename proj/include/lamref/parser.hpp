#pragma once

#include <map>
#include <string>

#include "lamref/signature.hpp"
#include "lamref/syntax.hpp"
#include "lamref/typing.hpp"

namespace lamref {

struct ParseError : LamrefError {
  ParseError(int pos_, const std::string& msg)
      : LamrefError("parse error at offset " + std::to_string(pos_) + ": " +
                    msg),
        pos(pos_) {}
  int pos;
};

// A parsed program file: signature declarations, an optional layout preamble
// (entries may carry initial values), then one term. The term is desugared
// to core syntax; `surface` keeps the pre-desugaring tree.
struct ParsedProgram {
  Signature sig;
  Layout layout;
  std::map<int, TermPtr> initial_heap;  // only for entries written `#i:s = v`
  SurfacePtr surface;
  TermPtr term;
};

ParsedProgram parse_program(const std::string& text);

// Stand-alone pieces, used by the command line tools and tests.
GroundTypePtr parse_ground_type(const std::string& text);
TypePtr parse_type(const std::string& text);
Layout parse_layout(const std::string& text);  // "{#0:d, #1:c}"
// Parses "{#0 = v, ...}" with the values elaborated against the layout's
// content types.
std::map<int, TermPtr> parse_heap_values(const Signature& sig, const Layout& w,
                                         const std::string& text);
// Parses a term against an existing signature and layout (desugared).
TermPtr parse_term(const Signature& sig, const Layout& w,
                   const std::string& text);

}  // namespace lamref
