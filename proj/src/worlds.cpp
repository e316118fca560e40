#include "lamref/worlds.hpp"

#include <algorithm>

namespace lamref {

Injection::Injection(World dom, World cod, std::map<int, int> map)
    : dom_(std::move(dom)), cod_(std::move(cod)), map_(std::move(map)) {
  if (map_.size() != dom_.cells.size())
    throw LamrefError("injection: map does not cover the domain");
  std::set<int> seen;
  for (const auto& [src, dst] : map_) {
    auto ds = dom_.cells.find(src);
    if (ds == dom_.cells.end())
      throw LamrefError("injection: source location not in domain");
    auto cs = cod_.cells.find(dst);
    if (cs == cod_.cells.end())
      throw LamrefError("injection: target location not in codomain");
    if (ds->second != cs->second)
      throw LamrefError("injection: sort not preserved at #" +
                        std::to_string(src));
    if (!seen.insert(dst).second)
      throw LamrefError("injection: not one-to-one");
  }
}

Injection Injection::identity(const World& w) {
  std::map<int, int> m;
  for (const auto& [l, _] : w.cells) m[l] = l;
  return Injection(w, w, std::move(m));
}

Injection Injection::inclusion(const World& w, const World& w2) {
  if (!layout_extends(w, w2))
    throw LamrefError("inclusion: second world does not extend the first");
  std::map<int, int> m;
  for (const auto& [l, _] : w.cells) m[l] = l;
  return Injection(w, w2, std::move(m));
}

int Injection::operator()(int loc) const {
  auto it = map_.find(loc);
  if (it == map_.end())
    throw LamrefError("injection applied outside its domain: #" +
                      std::to_string(loc));
  return it->second;
}

bool Injection::hits(int cod_loc) const {
  for (const auto& [_, dst] : map_)
    if (dst == cod_loc) return true;
  return false;
}

int Injection::preimage(int cod_loc) const {
  for (const auto& [src, dst] : map_)
    if (dst == cod_loc) return src;
  throw LamrefError("location has no preimage: #" + std::to_string(cod_loc));
}

bool Injection::is_identity() const {
  if (!(dom_ == cod_)) return false;
  for (const auto& [src, dst] : map_)
    if (src != dst) return false;
  return true;
}

Injection compose(const Injection& g, const Injection& h) {
  if (!(h.cod() == g.dom()))
    throw LamrefError("compose: middle worlds differ");
  std::map<int, int> m;
  for (const auto& [src, mid] : h.mapping()) m[src] = g(mid);
  return Injection(h.dom(), g.cod(), std::move(m));
}

std::string print_world(const World& w) { return print_layout(w); }

std::string print_injection(const Injection& h) {
  std::string out = print_world(h.dom()) + " -> " + print_world(h.cod()) + " [";
  bool first = true;
  for (const auto& [s, d] : h.mapping()) {
    if (!first) out += ", ";
    first = false;
    out += "#" + std::to_string(s) + "->#" + std::to_string(d);
  }
  return out + "]";
}

int numof(const World& w) {
  return w.cells.empty() ? 0 : w.cells.rbegin()->first + 1;
}

IndepCoproduct indep_coproduct(const World& w1, const World& w2) {
  int shift = numof(w1);
  World sum = w1;
  std::map<int, int> m1, m2;
  for (const auto& [l, _] : w1.cells) m1[l] = l;
  for (const auto& [l, s] : w2.cells) {
    sum.cells[shift + l] = s;
    m2[l] = shift + l;
  }
  IndepCoproduct out;
  out.into1 = Injection(w1, sum, std::move(m1));
  out.into2 = Injection(w2, sum, std::move(m2));
  out.world = std::move(sum);
  return out;
}

Injection complement(const Injection& h) {
  World missed;
  for (const auto& [l, s] : h.cod().cells)
    if (!h.hits(l)) missed.cells[l] = s;
  std::map<int, int> m;
  for (const auto& [l, _] : missed.cells) m[l] = l;
  return Injection(std::move(missed), h.cod(), std::move(m));
}

Injection defrag_iso(const Injection& h) {
  Injection comp = complement(h);
  IndepCoproduct cp = indep_coproduct(h.dom(), comp.dom());
  std::map<int, int> m;
  for (const auto& [l, _] : h.dom().cells) m[cp.into1(l)] = h(l);
  for (const auto& [l, _] : comp.dom().cells) m[cp.into2(l)] = l;
  return Injection(cp.world, h.cod(), std::move(m));
}

LocalCoproduct local_coproduct(const Injection& h1, const Injection& h2) {
  if (!(h1.dom() == h2.dom()))
    throw LamrefError("local_coproduct: domains differ");
  const World& w = h1.dom();
  Injection c1 = complement(h1);
  Injection c2 = complement(h2);
  IndepCoproduct a = indep_coproduct(w, c1.dom());
  IndepCoproduct b = indep_coproduct(a.world, c2.dom());

  // w1 -> world: through w where h1 hits, else through the w1-complement.
  std::map<int, int> m1;
  for (const auto& [l, _] : h1.cod().cells)
    m1[l] = h1.hits(l) ? b.into1(a.into1(h1.preimage(l))) : b.into1(a.into2(l));
  std::map<int, int> m2;
  for (const auto& [l, _] : h2.cod().cells)
    m2[l] = h2.hits(l) ? b.into1(a.into1(h2.preimage(l))) : b.into2(l);

  LocalCoproduct out;
  out.from_cod1 = Injection(h1.cod(), b.world, std::move(m1));
  out.from_cod2 = Injection(h2.cod(), b.world, std::move(m2));
  out.world = std::move(b.world);
  return out;
}

// --- semantic values ---------------------------------------------------------

SemValue SemValue::star() { return SemValue(); }

SemValue SemValue::inj(int tag, SemValue v) {
  SemValue r;
  r.kind_ = Kind::Inj;
  r.tag_ = tag;
  r.a_ = std::make_shared<SemValue>(std::move(v));
  return r;
}

SemValue SemValue::pair(SemValue a, SemValue b) {
  SemValue r;
  r.kind_ = Kind::Pair;
  r.a_ = std::make_shared<SemValue>(std::move(a));
  r.b_ = std::make_shared<SemValue>(std::move(b));
  return r;
}

SemValue SemValue::loc(int l) {
  SemValue r;
  r.kind_ = Kind::Loc;
  r.tag_ = l;
  return r;
}

SemValue SemValue::closure(ClosurePtr c) {
  SemValue r;
  r.kind_ = Kind::Closure;
  r.clos_ = std::move(c);
  return r;
}

SemValue SemValue::tuple(const std::vector<SemValue>& items) {
  if (items.empty()) return star();
  SemValue acc = items.back();
  for (size_t i = items.size() - 1; i-- > 0;) acc = pair(items[i], acc);
  return acc;
}

bool SemValue::contains_closure() const {
  switch (kind_) {
    case Kind::Star:
    case Kind::Loc:
      return false;
    case Kind::Closure:
      return true;
    case Kind::Inj:
      return a_->contains_closure();
    case Kind::Pair:
      return a_->contains_closure() || b_->contains_closure();
  }
  return false;
}

bool SemValue::operator==(const SemValue& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case Kind::Star:
      return true;
    case Kind::Loc:
      return tag_ == o.tag_;
    case Kind::Inj:
      return tag_ == o.tag_ && *a_ == *o.a_;
    case Kind::Pair:
      return *a_ == *o.a_ && *b_ == *o.b_;
    case Kind::Closure:
      return clos_.get() == o.clos_.get();
  }
  return false;
}

bool SemValue::operator<(const SemValue& o) const {
  if (kind_ != o.kind_) return kind_ < o.kind_;
  switch (kind_) {
    case Kind::Star:
      return false;
    case Kind::Loc:
      return tag_ < o.tag_;
    case Kind::Inj:
      if (tag_ != o.tag_) return tag_ < o.tag_;
      return *a_ < *o.a_;
    case Kind::Pair:
      if (*a_ < *o.a_) return true;
      if (*o.a_ < *a_) return false;
      return *b_ < *o.b_;
    case Kind::Closure:
      return clos_.get() < o.clos_.get();
  }
  return false;
}

std::string print_sem_value(const SemValue& v) {
  switch (v.kind()) {
    case SemValue::Kind::Star:
      return "()";
    case SemValue::Kind::Loc:
      return "#" + std::to_string(v.loc_index());
    case SemValue::Kind::Inj:
      if (v.sub().kind() == SemValue::Kind::Star)
        return v.tag() == 1 ? "true" : "false";
      return (v.tag() == 1 ? "inj1 " : "inj2 ") + print_sem_value(v.sub());
    case SemValue::Kind::Pair:
      return "(" + print_sem_value(v.fst()) + ", " + print_sem_value(v.snd()) +
             ")";
    case SemValue::Kind::Closure:
      return "<fun " + v.clos()->binder + ">";
  }
  return "?";
}

SemValue transport_value(const Injection& h, const SemValue& v) {
  switch (v.kind()) {
    case SemValue::Kind::Star:
      return v;
    case SemValue::Kind::Loc:
      return SemValue::loc(h(v.loc_index()));
    case SemValue::Kind::Inj:
      return SemValue::inj(v.tag(), transport_value(h, v.sub()));
    case SemValue::Kind::Pair:
      return SemValue::pair(transport_value(h, v.fst()),
                            transport_value(h, v.snd()));
    case SemValue::Kind::Closure: {
      // Retarget the captured injection pointwise. This is composition when
      // the worlds line up exactly, and it also serves garbage collection,
      // which transports along a map defined only on the reachable part.
      auto c = std::make_shared<ClosureData>(*v.clos());
      std::map<int, int> m;
      for (const auto& [src, dst] : c->loc_env.mapping()) m[src] = h(dst);
      c->loc_env = Injection(c->loc_env.dom(), h.cod(), std::move(m));
      c->env = transport_env(h, c->env);
      return SemValue::closure(std::move(c));
    }
  }
  throw LamrefError("unreachable value kind");
}

Env transport_env(const Injection& h, const Env& e) {
  Env out;
  for (const auto& [x, v] : e) out.emplace(x, transport_value(h, v));
  return out;
}

void collect_locations(const SemValue& v, std::vector<int>& out) {
  switch (v.kind()) {
    case SemValue::Kind::Star:
      return;
    case SemValue::Kind::Loc:
      out.push_back(v.loc_index());
      return;
    case SemValue::Kind::Inj:
      collect_locations(v.sub(), out);
      return;
    case SemValue::Kind::Pair:
      collect_locations(v.fst(), out);
      collect_locations(v.snd(), out);
      return;
    case SemValue::Kind::Closure: {
      for (const auto& [_, dst] : v.clos()->loc_env.mapping())
        out.push_back(dst);
      for (const auto& [_, val] : v.clos()->env) collect_locations(val, out);
      return;
    }
  }
}

std::vector<SemValue> interp_type(const Signature& sig, const GroundTypePtr& g,
                                  const World& w) {
  switch (g->kind()) {
    case GroundType::Kind::Empty:
      return {};
    case GroundType::Kind::Unit:
      return {SemValue::star()};
    case GroundType::Kind::Sum: {
      std::vector<SemValue> out;
      for (const auto& v : interp_type(sig, g->lhs(), w))
        out.push_back(SemValue::inj(1, v));
      for (const auto& v : interp_type(sig, g->rhs(), w))
        out.push_back(SemValue::inj(2, v));
      return out;
    }
    case GroundType::Kind::Product: {
      std::vector<SemValue> out;
      auto ls = interp_type(sig, g->lhs(), w);
      auto rs = interp_type(sig, g->rhs(), w);
      for (const auto& a : ls)
        for (const auto& b : rs) out.push_back(SemValue::pair(a, b));
      return out;
    }
    case GroundType::Kind::Ref: {
      std::vector<SemValue> out;
      for (const auto& [l, s] : w.cells)
        if (s == g->ref_sort()) out.push_back(SemValue::loc(l));
      return out;
    }
  }
  throw LamrefError("unreachable ground kind");
}

bool interp_member(const Signature& sig, const GroundTypePtr& g,
                   const World& w, const SemValue& v) {
  switch (g->kind()) {
    case GroundType::Kind::Empty:
      return false;
    case GroundType::Kind::Unit:
      return v.kind() == SemValue::Kind::Star;
    case GroundType::Kind::Sum:
      return v.kind() == SemValue::Kind::Inj &&
             interp_member(sig, v.tag() == 1 ? g->lhs() : g->rhs(), w, v.sub());
    case GroundType::Kind::Product:
      return v.kind() == SemValue::Kind::Pair &&
             interp_member(sig, g->lhs(), w, v.fst()) &&
             interp_member(sig, g->rhs(), w, v.snd());
    case GroundType::Kind::Ref: {
      if (v.kind() != SemValue::Kind::Loc) return false;
      auto it = w.cells.find(v.loc_index());
      return it != w.cells.end() && it->second == g->ref_sort();
    }
  }
  return false;
}

SemValue interp_action(const Signature& sig, const GroundTypePtr& g,
                       const Injection& h, const SemValue& v) {
  if (!interp_member(sig, g, h.dom(), v))
    throw LamrefError("interp_action: value " + print_sem_value(v) +
                      " is not in [[" + print_ground(g) + "]]" +
                      print_world(h.dom()));
  return transport_value(h, v);
}

std::vector<World> enumerate_worlds(const Signature& sig, int max_cells) {
  std::vector<World> out;
  std::vector<World> frontier = {World{}};
  out.push_back(World{});
  for (int k = 1; k <= max_cells; ++k) {
    std::vector<World> next;
    for (const auto& w : frontier)
      for (const auto& s : sig.sorts()) {
        World w2 = w;
        w2.cells[k - 1] = s;
        next.push_back(w2);
        out.push_back(std::move(w2));
      }
    frontier = std::move(next);
  }
  return out;
}

namespace {

void enumerate_injections_rec(const std::vector<std::pair<int, std::string>>& src,
                              size_t i, const World& w, const World& w2,
                              std::map<int, int>& acc, std::set<int>& used,
                              std::vector<Injection>& out) {
  if (i == src.size()) {
    out.emplace_back(w, w2, acc);
    return;
  }
  const auto& [loc, sort] = src[i];
  for (const auto& [cand, csort] : w2.cells) {
    if (csort != sort || used.count(cand)) continue;
    acc[loc] = cand;
    used.insert(cand);
    enumerate_injections_rec(src, i + 1, w, w2, acc, used, out);
    used.erase(cand);
    acc.erase(loc);
  }
}

}  // namespace

std::vector<Injection> enumerate_injections(const World& w, const World& w2) {
  std::vector<std::pair<int, std::string>> src(w.cells.begin(), w.cells.end());
  std::vector<Injection> out;
  std::map<int, int> acc;
  std::set<int> used;
  enumerate_injections_rec(src, 0, w, w2, acc, used, out);
  return out;
}

}  // namespace lamref
