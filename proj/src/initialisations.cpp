#include "lamref/initialisations.hpp"

#include <algorithm>
#include <deque>

namespace lamref {

Heaplet store_to_heaplet(const Store& s) {
  return Heaplet{s.world, s.world, s.contents};
}

Store heaplet_to_store(const Heaplet& h) {
  if (!(h.shape == h.ambient))
    throw LamrefError("heaplet is not a store (shape != ambient)");
  return Store{h.shape, h.contents};
}

Initialisation Initialisation::identity(const World& w) {
  return Initialisation{Injection::identity(w), Heaplet{World{}, w, {}}};
}

namespace {

void check_heaplet(const Signature& sig, const Heaplet& r) {
  if (r.contents.size() != r.shape.cells.size())
    throw LamrefError("heaplet contents do not cover the shape");
  for (const auto& [l, v] : r.contents) {
    auto it = r.shape.cells.find(l);
    if (it == r.shape.cells.end())
      throw LamrefError("heaplet value outside the shape");
    if (!interp_member(sig, sig.content_type(it->second), r.ambient, v))
      throw LamrefError("heaplet value " + print_sem_value(v) +
                        " not in the content type at " +
                        print_world(r.ambient));
  }
}

void check_init(const Signature& sig, const Initialisation& i) {
  Injection comp = complement(i.inj);
  if (!(i.data.shape == comp.dom()) || !(i.data.ambient == i.inj.cod()))
    throw LamrefError("initialisation data shape is not the complement");
  check_heaplet(sig, i.data);
}

}  // namespace

Heaplet heaplet_concat(const Heaplet& r1, const Heaplet& r2) {
  if (!(r1.ambient == r2.ambient))
    throw LamrefError("heaplet_concat: ambients differ");
  IndepCoproduct cp = indep_coproduct(r1.shape, r2.shape);
  Heaplet out;
  out.shape = cp.world;
  out.ambient = r1.ambient;
  for (const auto& [l, v] : r1.contents) out.contents[cp.into1(l)] = v;
  for (const auto& [l, v] : r2.contents) out.contents[cp.into2(l)] = v;
  return out;
}

Heaplet heaplet_contra(const Injection& h, const Heaplet& r) {
  if (!(h.cod() == r.shape))
    throw LamrefError("heaplet_contra: codomain is not the shape");
  Heaplet out;
  out.shape = h.dom();
  out.ambient = r.ambient;
  for (const auto& [l, _] : h.dom().cells) out.contents[l] = r.contents.at(h(l));
  return out;
}

Heaplet heaplet_co(const Signature& sig, const Injection& h, const Heaplet& r) {
  if (!(h.dom() == r.ambient))
    throw LamrefError("heaplet_co: domain is not the ambient");
  Heaplet out;
  out.shape = r.shape;
  out.ambient = h.cod();
  for (const auto& [l, v] : r.contents) {
    const auto& sort = r.shape.cells.at(l);
    out.contents[l] = interp_action(sig, sig.content_type(sort), h, v);
  }
  return out;
}

Initialisation compose_init(const Signature& sig, const Initialisation& i1,
                            const Initialisation& i2) {
  check_init(sig, i1);
  check_init(sig, i2);
  Injection inj = compose(i2.inj, i1.inj);
  Injection comp = complement(inj);
  Heaplet data;
  data.shape = comp.dom();
  data.ambient = inj.cod();
  for (const auto& [l, sort] : comp.dom().cells) {
    (void)sort;
    if (i2.data.contents.count(l)) {
      data.contents[l] = i2.data.contents.at(l);
    } else {
      // l = u(i2)(l2) for some l2 missed by u(i1): promote i1's datum.
      int l2 = i2.inj.preimage(l);
      const auto& sort2 = i2.inj.dom().cells.at(l2);
      data.contents[l] = interp_action(sig, sig.content_type(sort2), i2.inj,
                                       i1.data.contents.at(l2));
    }
  }
  return Initialisation{std::move(inj), std::move(data)};
}

Store stores_action(const Signature& sig, const Initialisation& i,
                    const Store& s) {
  if (!(i.inj.dom() == s.world))
    throw LamrefError("stores_action: store world is not the domain");
  Store out;
  out.world = i.inj.cod();
  for (const auto& [l, v] : s.contents) {
    const auto& sort = s.world.cells.at(l);
    out.contents[i.inj(l)] = interp_action(sig, sig.content_type(sort), i.inj, v);
  }
  for (const auto& [l, v] : i.data.contents) out.contents[l] = v;
  return out;
}

const SemValue& store_lookup(const Store& s, int loc) {
  auto it = s.contents.find(loc);
  if (it == s.contents.end())
    throw UnknownLocationError(loc, -1);
  return it->second;
}

Store store_update(const Signature& sig, const Store& s, int loc,
                   const SemValue& x) {
  auto sort = s.world.cells.find(loc);
  if (sort == s.world.cells.end()) throw UnknownLocationError(loc, -1);
  if (!interp_member(sig, sig.content_type(sort->second), s.world, x))
    throw LamrefError("store_update: value not in the cell's content type");
  Store out = s;
  out.contents[loc] = x;
  return out;
}

Promoted promote(const Signature& sig, const Injection& h,
                 const Initialisation& i) {
  check_init(sig, i);
  if (!(h.dom() == i.inj.dom()))
    throw LamrefError("promote: domains differ");
  LocalCoproduct lcp = local_coproduct(h, i.inj);
  const Injection& under = lcp.from_cod1;      // w' -> L, underlying h |> u(i)
  const Injection& transposed = lcp.from_cod2; // cod(i) -> L

  // L (-) under ~ cod(i) (-) u(i); each missing cell's datum is i's datum
  // pushed covariantly along the transposed leg.
  Injection comp = complement(under);
  Heaplet data;
  data.shape = comp.dom();
  data.ambient = lcp.world;
  for (const auto& [l, sort] : comp.dom().cells) {
    int l2 = transposed.preimage(l);
    data.contents[l] =
        interp_action(sig, sig.content_type(sort), transposed,
                      i.data.contents.at(l2));
  }
  return Promoted{Initialisation{under, std::move(data)}, transposed};
}

// --- garbage collection and the coend decision procedure ---------------------

CoendRep gc_canonical(const Signature& sig, const CoendRep& r) {
  (void)sig;  // relabelling is type-free
  const World& priv_world = r.store.world;

  // Reachability from the public image and the payload through the store.
  std::set<int> reachable;
  std::deque<int> frontier;
  auto visit = [&](int l) {
    if (reachable.insert(l).second) frontier.push_back(l);
  };
  for (const auto& [_, dst] : r.inj.mapping()) visit(dst);
  {
    std::vector<int> ls;
    collect_locations(r.payload, ls);
    for (int l : ls) visit(l);
  }
  while (!frontier.empty()) {
    int l = frontier.front();
    frontier.pop_front();
    std::vector<int> ls;
    collect_locations(r.store.contents.at(l), ls);
    for (int l2 : ls) visit(l2);
  }

  // Deterministic discovery order for private cells: payload first, then the
  // public cells' contents in ascending base order, then the already
  // discovered privates' contents, breadth-first.
  std::vector<int> order;
  std::set<int> seen;
  auto discover = [&](int l) {
    if (!r.inj.hits(l) && seen.insert(l).second) order.push_back(l);
  };
  auto scan_value = [&](const SemValue& v) {
    std::vector<int> ls;
    collect_locations(v, ls);
    for (int l : ls) discover(l);
  };
  scan_value(r.payload);
  for (const auto& [_, dst] : r.inj.mapping())
    scan_value(r.store.contents.at(dst));
  for (size_t i = 0; i < order.size(); ++i)
    scan_value(r.store.contents.at(order[i]));

  // Private cells keep discovery order and take the smallest indices free of
  // the base; public cells return to their base indices.
  World canon = r.base;
  std::map<int, int> relabel;
  for (const auto& [src, dst] : r.inj.mapping()) relabel[dst] = src;
  int next = 0;
  for (int p : order) {
    while (canon.cells.count(next)) ++next;
    canon.cells[next] = priv_world.cells.at(p);
    relabel[p] = next;
    ++next;
  }

  World reach_world;
  for (int l : reachable) reach_world.cells[l] = priv_world.cells.at(l);
  Injection m(reach_world, canon, relabel);

  CoendRep out;
  out.base = r.base;
  out.inj = Injection::inclusion(r.base, canon);
  out.payload = transport_value(m, r.payload);
  out.store.world = canon;
  for (int l : reachable)
    out.store.contents[m(l)] = transport_value(m, r.store.contents.at(l));
  return out;
}

bool coend_equal(const Signature& sig, const CoendRep& r1, const CoendRep& r2) {
  if (!(r1.base == r2.base)) throw BaseMismatchError();
  if (r1.payload.contains_closure() || r2.payload.contains_closure())
    throw LamrefError(
        "coend_equal: function-valued payloads need the bounded extensional "
        "comparison");
  return gc_canonical(sig, r1) == gc_canonical(sig, r2);
}

namespace {

std::string rep_key(const CoendRep& r) {
  std::string k = print_world(r.store.world) + "|";
  for (const auto& [s, d] : r.inj.mapping())
    k += std::to_string(s) + ">" + std::to_string(d) + ",";
  k += "|" + print_sem_value(r.payload) + "|";
  for (const auto& [l, v] : r.store.contents)
    k += std::to_string(l) + "=" + print_sem_value(v) + ",";
  return k;
}

struct UnionFind {
  std::map<std::string, std::string> parent;

  const std::string& find(const std::string& x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return parent.find(x)->first;
    }
    if (it->second == x) return it->first;
    std::string root = find(it->second);
    parent[x] = root;
    return parent.find(x)->second;
  }

  void unite(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra != rb) parent[ra] = rb;
  }
};

// Enumerates every assignment of content values to `cells` at `ambient`.
void enumerate_data(const Signature& sig, const World& ambient,
                    const std::vector<std::pair<int, std::string>>& cells,
                    size_t i, std::map<int, SemValue>& acc,
                    const std::function<void(const std::map<int, SemValue>&)>& f) {
  if (i == cells.size()) {
    f(acc);
    return;
  }
  const auto& [loc, sort] = cells[i];
  for (const auto& v : interp_type(sig, sig.content_type(sort), ambient)) {
    acc[loc] = v;
    enumerate_data(sig, ambient, cells, i + 1, acc, f);
  }
  acc.erase(cells[i].first);
}

}  // namespace

std::vector<Store> enumerate_stores(const Signature& sig, const World& w) {
  std::vector<Store> out;
  std::vector<std::pair<int, std::string>> cells(w.cells.begin(),
                                                 w.cells.end());
  std::map<int, SemValue> acc;
  enumerate_data(sig, w, cells, 0, acc,
                 [&](const std::map<int, SemValue>& full) {
                   out.push_back(Store{w, full});
                 });
  return out;
}

namespace {

// Nodes: the seeds plus every representative over the enumerated worlds.
// Edges: one generating move per initialisation out of a node's private
// world. Union-find gives the zig-zag closure.
UnionFind oracle_closure(const Signature& sig,
                         const GroundTypePtr& payload_type,
                         const World& base, int size_bound,
                         std::vector<CoendRep>& nodes) {
  std::vector<World> targets = enumerate_worlds(sig, size_bound);
  for (const auto& w : targets) {
    for (const auto& h : enumerate_injections(base, w)) {
      auto payloads = interp_type(sig, payload_type, w);
      auto stores = enumerate_stores(sig, w);
      for (const auto& x : payloads)
        for (const auto& s : stores)
          nodes.push_back(CoendRep{base, h, x, s});
    }
  }

  UnionFind uf;
  for (const auto& n : nodes) {
    std::string nk = rep_key(n);
    uf.find(nk);
    const World& w = n.store.world;
    for (const auto& tgt : targets) {
      if (tgt.size() < w.size()) continue;
      for (const auto& u : enumerate_injections(w, tgt)) {
        Injection comp = complement(u);
        std::vector<std::pair<int, std::string>> cells(
            comp.dom().cells.begin(), comp.dom().cells.end());
        std::map<int, SemValue> acc;
        enumerate_data(
            sig, tgt, cells, 0, acc, [&](const std::map<int, SemValue>& data) {
              Initialisation init{u, Heaplet{comp.dom(), tgt, data}};
              CoendRep moved;
              moved.base = n.base;
              moved.inj = compose(u, n.inj);
              moved.payload = interp_action(sig, payload_type, u, n.payload);
              moved.store = stores_action(sig, init, n.store);
              uf.unite(nk, rep_key(moved));
            });
      }
    }
  }
  return uf;
}

}  // namespace

bool coend_equal_oracle(const Signature& sig, const GroundTypePtr& payload_type,
                        const CoendRep& r1, const CoendRep& r2,
                        int size_bound) {
  if (!(r1.base == r2.base)) throw BaseMismatchError();
  if (static_cast<int>(r1.store.world.size()) > size_bound ||
      static_cast<int>(r2.store.world.size()) > size_bound)
    throw BudgetExceededError("oracle: representative exceeds the size bound");

  std::string k1 = rep_key(r1), k2 = rep_key(r2);
  if (k1 == k2) return true;

  std::vector<CoendRep> nodes = {r1, r2};
  UnionFind uf = oracle_closure(sig, payload_type, r1.base, size_bound, nodes);
  return uf.find(k1) == uf.find(k2);
}

std::vector<std::vector<CoendRep>> oracle_components(
    const Signature& sig, const GroundTypePtr& payload_type, const World& base,
    int size_bound) {
  std::vector<CoendRep> nodes;
  UnionFind uf = oracle_closure(sig, payload_type, base, size_bound, nodes);
  std::map<std::string, size_t> roots;
  std::vector<std::vector<CoendRep>> out;
  for (const auto& n : nodes) {
    std::string root = uf.find(rep_key(n));
    auto [it, inserted] = roots.emplace(root, out.size());
    if (inserted) out.emplace_back();
    out[it->second].push_back(n);
  }
  return out;
}

std::string print_coend_rep(const CoendRep& r) {
  std::string pub = "{", priv = "{";
  bool fp = true, fq = true;
  for (const auto& [l, sort] : r.store.world.cells) {
    std::string entry = "#" + std::to_string(l) + ":" + sort + " = " +
                        print_sem_value(r.store.contents.at(l));
    if (r.inj.hits(l)) {
      if (!fp) pub += ", ";
      fp = false;
      pub += entry;
    } else {
      if (!fq) priv += ", ";
      fq = false;
      priv += entry;
    }
  }
  return "public: " + pub + "} | private: " + priv +
         "} | payload: " + print_sem_value(r.payload);
}

}  // namespace lamref
