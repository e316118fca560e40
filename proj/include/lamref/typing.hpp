#pragma once

#include <map>
#include <string>

#include "lamref/signature.hpp"
#include "lamref/syntax.hpp"

namespace lamref {

// A heap layout: a finite map from locations (indices under the global
// enumeration #) to cell sorts.
struct Layout {
  std::map<int, std::string> cells;

  bool operator==(const Layout& o) const { return cells == o.cells; }
  bool operator<(const Layout& o) const { return cells < o.cells; }
  bool contains(int loc) const { return cells.count(loc) != 0; }
  const std::string& sort_of(int loc) const;
  size_t size() const { return cells.size(); }
};

std::string print_layout(const Layout& w);

struct Context {
  std::map<std::string, TypePtr> vars;
};

struct TypeError : LamrefError {
  TypeError(const std::string& msg, int pos_) : LamrefError(msg), pos(pos_) {}
  int pos;
};

struct UnboundIdentifierError : TypeError {
  UnboundIdentifierError(const std::string& x, int pos_)
      : TypeError("unbound identifier: " + x, pos_) {}
};

struct UnknownLocationError : TypeError {
  UnknownLocationError(int loc, int pos_)
      : TypeError("location #" + std::to_string(loc) + " not in layout", pos_) {}
};

struct NotAValueError : TypeError {
  explicit NotAValueError(int pos_)
      : TypeError("allocation initialiser must be a value", pos_) {}
};

// True iff w2 agrees with w on w's support.
bool layout_extends(const Layout& w, const Layout& w2);

// Computes the unique type with ctx |-_w t : ty, or throws. Syntax-directed;
// function abstractions and empty matches carry their annotations.
TypePtr infer(const Signature& sig, const Layout& w, const Context& ctx,
              const TermPtr& t);

}  // namespace lamref
