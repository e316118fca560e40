#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lamref/denote.hpp"
#include "lamref/opsem.hpp"
#include "lamref/parser.hpp"

namespace lamref {

struct GenerationExhaustedError : LamrefError {
  GenerationExhaustedError() : LamrefError("term generation retry budget exhausted") {}
};

struct GenOptions {
  int size = 12;
  // When false, the generated term's own type is ground (functions may still
  // occur in subterms); the soundness suite compares results with the ground
  // coend equality.
  bool allow_arrow_result = true;
  // Restrict the judgement layout battery to at most this many cells
  // (negative = no restriction).
  int max_layout_cells = -1;
};

struct GeneratedTerm {
  Layout layout;
  TermPtr term;
  TypePtr type;
};

// Type-directed generation of closed well-typed terms; deterministic per
// seed. Covers every term constructor, including allocation with 1-3
// mutually referring binders.
GeneratedTerm gen_well_typed(const Signature& sig, int size, uint64_t seed,
                             const GenOptions& opts = {});

// A closed syntactic value of ground type g denoting v.
TermPtr term_of_semvalue(const Signature& sig, const GroundTypePtr& g,
                         const SemValue& v);

// All typed heaps over w, as syntactic values (empty when uninhabited).
std::vector<TypedHeap> enumerate_heaps(const Signature& sig, const Layout& w);

// ---------------------------------------------------------------------------
// Reports.

struct TestReport {
  std::string suite;
  long instances = 0;
  std::vector<std::string> failures;
  std::vector<std::string> approximations;
  std::string bounds;

  bool ok() const { return failures.empty(); }
  std::string to_text() const;
  std::string to_json() const;
};

// Runs fn(i) for i in [0, n) across a worker pool; results are collected by
// index, so reports are deterministic.
std::vector<std::string> parallel_collect(
    long n, const std::function<std::string(long)>& fn);

// ---------------------------------------------------------------------------
// Theorem suites.

// Operational vs denotational agreement for one closed judgement |-_w t : ty,
// exhaustively over extensions w <= w' of at most `bound` cells and all heaps.
TestReport check_soundness(const Signature& sig, const Layout& w,
                           const TermPtr& t, int bound);

struct EquationInstance {
  std::string desc;
  Layout layout;
  TermPtr lhs, rhs;
};

struct EquationSchema {
  std::string name;
  std::string source;  // "literature", "reconstructed", or "control"
  std::function<std::vector<EquationInstance>(const Signature&)> instantiate;
};

// GS6 plus the reconstructed companions; `negative_control` is the
// deliberately wrong schema that must fail with a witness.
std::vector<EquationSchema> equation_suite();
EquationSchema negative_control();

TestReport check_equation(const EquationSchema& schema, const Signature& sig,
                          int bound);

struct MaskingResult {
  TestReport report;
  std::optional<SemValue> pure_value;  // set when masking succeeded
};

// For closed |-_empty t : ty with ty free of references and functions: the
// denotation's component at the empty world must carry no private locations,
// i.e. equal a monadic return; extracts the returned value.
MaskingResult check_masking(const Signature& sig, const TermPtr& t);

// ---------------------------------------------------------------------------
// Observational equivalence.

struct ObsContext {
  std::string desc;
  Layout layout;  // the context's (extended) layout
  std::function<TermPtr(const TermPtr&)> plug;
};

// Boolean-result contexts for a hole of type `ty` at layout w: template
// observers (dereference each boolean cell, inspect the result) plus
// generated ones, within the budget.
std::vector<ObsContext> obs_contexts(const Signature& sig, const Layout& w,
                                     const TypePtr& ty, int budget,
                                     uint64_t seed);

struct ObsWitness {
  std::string context;
  std::string heap;
  std::string value1, value2;
};

// Searches for a context and heap on which the two closed terms evaluate to
// different booleans; nullopt = none within budget.
std::optional<ObsWitness> obs_diff(const Signature& sig, const Layout& w,
                                   const TermPtr& t1, const TermPtr& t2,
                                   int context_budget, uint64_t seed = 1);

// Open judgements: free identifiers of ctx are instantiated with closed
// values of their types (exhaustively for ground types, generated samples
// for function types) before the closed search runs.
std::optional<ObsWitness> obs_diff(const Signature& sig, const Layout& w,
                                   const Context& ctx, const TermPtr& t1,
                                   const TermPtr& t2, int context_budget,
                                   uint64_t seed = 1);

}  // namespace lamref
