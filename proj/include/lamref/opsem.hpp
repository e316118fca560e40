#pragma once

#include <map>
#include <string>
#include <vector>

#include "lamref/signature.hpp"
#include "lamref/syntax.hpp"
#include "lamref/typing.hpp"

namespace lamref {

// Finite map from locations to closed values.
using UntypedHeap = std::map<int, TermPtr>;

struct TypedHeap {
  Layout layout;
  std::map<int, TermPtr> contents;
};

struct Config {
  TermPtr term;
  UntypedHeap heap;
};

struct IllTypedHeapError : LamrefError {
  IllTypedHeapError(int loc, const std::string& reason)
      : LamrefError("heap entry #" + std::to_string(loc) + ": " + reason) {}
};

struct StuckError : LamrefError {
  explicit StuckError(const std::string& what)
      : LamrefError("evaluation stuck: " + what) {}
};

struct FuelExhaustedError : LamrefError {
  FuelExhaustedError() : LamrefError("evaluation fuel exhausted") {}
};

// Checks support(h) = support(w) and that every value typechecks at w.
TypedHeap to_typed(const Signature& sig, const Layout& w, const UntypedHeap& h);

// The n smallest location indices not in w's support, ascending.
std::vector<int> fresh_locations(const Layout& w, int n);

// Simultaneous capture-avoiding substitution.
TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& e);

struct EvalResult {
  TermPtr value;
  UntypedHeap heap;
  // Locations added by allocation, in order, with their sorts; lets callers
  // reconstruct the final layout from the initial one.
  std::vector<std::pair<int, std::string>> allocations;
};

constexpr long kDefaultFuel = 1000000;

// Big-step evaluation. Deterministic: fresh locations take the smallest free
// indices. Fuel is a defensive bound only; well-typed input never hits it.
EvalResult eval(const Signature& sig, const Config& c,
                long fuel = kDefaultFuel);

std::string print_heap(const UntypedHeap& h);

}  // namespace lamref
