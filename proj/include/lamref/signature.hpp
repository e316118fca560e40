#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lamref {

struct LamrefError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DuplicateSortError : LamrefError {
  explicit DuplicateSortError(const std::string& name)
      : LamrefError("duplicate sort: " + name), sort(name) {}
  std::string sort;
};

struct UnknownSortError : LamrefError {
  explicit UnknownSortError(const std::string& name)
      : LamrefError("unknown sort: " + name), sort(name) {}
  std::string sort;
};

// Full ground types: 0 | g + g | 1 | g * g | ref <sort>.
// Immutable, shared subtrees.
class GroundType;
using GroundTypePtr = std::shared_ptr<const GroundType>;

class GroundType {
 public:
  enum class Kind { Empty, Unit, Sum, Product, Ref };

  Kind kind() const { return kind_; }
  const GroundTypePtr& lhs() const { return lhs_; }
  const GroundTypePtr& rhs() const { return rhs_; }
  const std::string& ref_sort() const { return sort_; }

  static GroundTypePtr empty();
  static GroundTypePtr unit();
  static GroundTypePtr boolean();  // 1 + 1
  static GroundTypePtr sum(GroundTypePtr a, GroundTypePtr b);
  static GroundTypePtr product(GroundTypePtr a, GroundTypePtr b);
  static GroundTypePtr ref(std::string sort);

  bool mentions_ref() const;

 private:
  GroundType(Kind k, GroundTypePtr a, GroundTypePtr b, std::string s)
      : kind_(k), lhs_(std::move(a)), rhs_(std::move(b)), sort_(std::move(s)) {}

  Kind kind_;
  GroundTypePtr lhs_, rhs_;
  std::string sort_;
};

bool ground_eq(const GroundTypePtr& a, const GroundTypePtr& b);
std::string print_ground(const GroundTypePtr& g);

// A full ground storage signature: an ordered list of cell sorts together
// with the content type of each sort. Sort order is declaration order and
// every downstream enumeration follows it.
class Signature {
 public:
  const std::vector<std::string>& sorts() const { return sorts_; }
  bool has_sort(const std::string& name) const { return typeof_.count(name) != 0; }
  const GroundTypePtr& content_type(const std::string& sort) const;

  std::vector<std::pair<std::string, GroundTypePtr>> declarations() const;

  friend Signature validate_signature(
      const std::vector<std::pair<std::string, GroundTypePtr>>& decls);

 private:
  std::vector<std::string> sorts_;
  std::map<std::string, GroundTypePtr> typeof_;
};

// Checks that sort names are distinct and every `ref` target is declared.
// Mutual and self reference between sorts is legal.
Signature validate_signature(
    const std::vector<std::pair<std::string, GroundTypePtr>>& decls);

// True iff no content type mentions a reference type. For such signatures
// every content-type interpretation is a constant functor on worlds.
bool is_constant_signature(const Signature& sig);

// The two signatures the bundled examples and suites use: linked lists
// (sorts list, cell, data) and a single boolean cell sort.
Signature example_list_signature();
Signature constant_bool_signature();

}  // namespace lamref
