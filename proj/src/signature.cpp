#include "lamref/signature.hpp"

#include <set>

namespace lamref {

GroundTypePtr GroundType::empty() {
  static GroundTypePtr e{new GroundType(Kind::Empty, nullptr, nullptr, "")};
  return e;
}

GroundTypePtr GroundType::unit() {
  static GroundTypePtr u{new GroundType(Kind::Unit, nullptr, nullptr, "")};
  return u;
}

GroundTypePtr GroundType::boolean() {
  static GroundTypePtr b = sum(unit(), unit());
  return b;
}

GroundTypePtr GroundType::sum(GroundTypePtr a, GroundTypePtr b) {
  return GroundTypePtr{
      new GroundType(Kind::Sum, std::move(a), std::move(b), "")};
}

GroundTypePtr GroundType::product(GroundTypePtr a, GroundTypePtr b) {
  return GroundTypePtr{
      new GroundType(Kind::Product, std::move(a), std::move(b), "")};
}

GroundTypePtr GroundType::ref(std::string sort) {
  return GroundTypePtr{
      new GroundType(Kind::Ref, nullptr, nullptr, std::move(sort))};
}

bool GroundType::mentions_ref() const {
  switch (kind_) {
    case Kind::Empty:
    case Kind::Unit:
      return false;
    case Kind::Ref:
      return true;
    case Kind::Sum:
    case Kind::Product:
      return lhs_->mentions_ref() || rhs_->mentions_ref();
  }
  return false;
}

bool ground_eq(const GroundTypePtr& a, const GroundTypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case GroundType::Kind::Empty:
    case GroundType::Kind::Unit:
      return true;
    case GroundType::Kind::Ref:
      return a->ref_sort() == b->ref_sort();
    case GroundType::Kind::Sum:
    case GroundType::Kind::Product:
      return ground_eq(a->lhs(), b->lhs()) && ground_eq(a->rhs(), b->rhs());
  }
  return false;
}

namespace {

// Precedence: * binds tighter than +; both right-associative.
void print_ground_rec(const GroundTypePtr& g, int prec, std::string& out) {
  switch (g->kind()) {
    case GroundType::Kind::Empty:
      out += "0";
      return;
    case GroundType::Kind::Unit:
      out += "1";
      return;
    case GroundType::Kind::Ref:
      out += "ref " + g->ref_sort();
      return;
    case GroundType::Kind::Sum: {
      bool paren = prec > 0;
      if (paren) out += "(";
      print_ground_rec(g->lhs(), 1, out);
      out += " + ";
      print_ground_rec(g->rhs(), 0, out);
      if (paren) out += ")";
      return;
    }
    case GroundType::Kind::Product: {
      bool paren = prec > 1;
      if (paren) out += "(";
      print_ground_rec(g->lhs(), 2, out);
      out += " * ";
      print_ground_rec(g->rhs(), 1, out);
      if (paren) out += ")";
      return;
    }
  }
}

void check_refs_resolve(const GroundTypePtr& g,
                        const std::set<std::string>& declared) {
  switch (g->kind()) {
    case GroundType::Kind::Empty:
    case GroundType::Kind::Unit:
      return;
    case GroundType::Kind::Ref:
      if (!declared.count(g->ref_sort())) throw UnknownSortError(g->ref_sort());
      return;
    case GroundType::Kind::Sum:
    case GroundType::Kind::Product:
      check_refs_resolve(g->lhs(), declared);
      check_refs_resolve(g->rhs(), declared);
      return;
  }
}

}  // namespace

std::string print_ground(const GroundTypePtr& g) {
  std::string out;
  print_ground_rec(g, 0, out);
  return out;
}

const GroundTypePtr& Signature::content_type(const std::string& sort) const {
  auto it = typeof_.find(sort);
  if (it == typeof_.end()) throw UnknownSortError(sort);
  return it->second;
}

std::vector<std::pair<std::string, GroundTypePtr>> Signature::declarations()
    const {
  std::vector<std::pair<std::string, GroundTypePtr>> out;
  out.reserve(sorts_.size());
  for (const auto& s : sorts_) out.emplace_back(s, typeof_.at(s));
  return out;
}

Signature validate_signature(
    const std::vector<std::pair<std::string, GroundTypePtr>>& decls) {
  Signature sig;
  std::set<std::string> declared;
  for (const auto& [name, _] : decls) {
    if (!declared.insert(name).second) throw DuplicateSortError(name);
    sig.sorts_.push_back(name);
  }
  for (const auto& [name, ty] : decls) {
    check_refs_resolve(ty, declared);
    sig.typeof_[name] = ty;
  }
  return sig;
}

bool is_constant_signature(const Signature& sig) {
  for (const auto& s : sig.sorts())
    if (sig.content_type(s)->mentions_ref()) return false;
  return true;
}

Signature example_list_signature() {
  using G = GroundType;
  return validate_signature({
      {"list", G::sum(G::unit(), G::ref("cell"))},
      {"cell", G::product(G::ref("data"), G::ref("list"))},
      {"data", G::boolean()},
  });
}

Signature constant_bool_signature() {
  return validate_signature({{"d", GroundType::boolean()}});
}

}  // namespace lamref
