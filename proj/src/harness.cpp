#include "lamref/harness.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "json.hpp"

namespace lamref {

// --- generation ----------------------------------------------------------------

namespace {

struct GenFail {};

struct Gen {
  const Signature& sig;
  std::mt19937_64 rng;
  GenOptions opts;

  int pick(int n) {
    return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng));
  }
  bool flip(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  }

  std::vector<std::string> layout_sorts(const Layout& w) {
    std::set<std::string> s;
    for (const auto& [_, sort] : w.cells) s.insert(sort);
    return {s.begin(), s.end()};
  }

  bool ref_producible(const Layout& w, const Context& ctx,
                      const std::string& sort) {
    for (const auto& [_, s] : w.cells)
      if (s == sort) return true;
    for (const auto& [_, ty] : ctx.vars)
      if (ty->kind() == Type::Kind::Ref && ty->ref_sort() == sort) return true;
    return false;
  }

  bool inhabited(const TypePtr& ty, const Layout& w, const Context& ctx,
                 int depth = 0) {
    if (depth > 8) return false;
    for (const auto& [_, vty] : ctx.vars)
      if (type_eq(vty, ty)) return true;
    switch (ty->kind()) {
      case Type::Kind::Unit:
        return true;
      case Type::Kind::Empty:
        return false;
      case Type::Kind::Sum:
        return inhabited(ty->lhs(), w, ctx, depth + 1) ||
               inhabited(ty->rhs(), w, ctx, depth + 1);
      case Type::Kind::Product:
        return inhabited(ty->lhs(), w, ctx, depth + 1) &&
               inhabited(ty->rhs(), w, ctx, depth + 1);
      case Type::Kind::Ref:
        return ref_producible(w, ctx, ty->ref_sort());
      case Type::Kind::Arrow: {
        if (ty->lhs()->kind() == Type::Kind::Empty) return true;
        Context inner = ctx;
        inner.vars["%arg"] = ty->lhs();
        return inhabited(ty->rhs(), w, inner, depth + 1);
      }
    }
    return false;
  }

  TypePtr gen_type(const Layout& w, const Context& ctx, int depth,
                   bool allow_arrow) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      TypePtr cand = gen_type_once(w, ctx, depth, allow_arrow);
      if (inhabited(cand, w, ctx)) return cand;
    }
    return Type::unit();
  }

  TypePtr gen_type_once(const Layout& w, const Context& ctx, int depth,
                        bool allow_arrow) {
    std::vector<std::string> sorts = layout_sorts(w);
    int top = depth > 0 ? (allow_arrow ? 6 : 5) : 3;
    switch (pick(top)) {
      case 0:
        return Type::unit();
      case 1:
        return Type::boolean();
      case 2:
        if (!sorts.empty()) return Type::ref(sorts[pick((int)sorts.size())]);
        return Type::boolean();
      case 3:
        return Type::sum(gen_type_once(w, ctx, depth - 1, false),
                         flip(0.15) ? Type::empty()
                                    : gen_type_once(w, ctx, depth - 1, false));
      case 4:
        return Type::product(gen_type_once(w, ctx, depth - 1, false),
                             gen_type_once(w, ctx, depth - 1, false));
      default: {
        TypePtr arg = flip(0.2) ? Type::empty()
                                : gen_type_once(w, ctx, depth - 1, false);
        return Type::arrow(arg, gen_type_once(w, ctx, depth - 1, false));
      }
    }
  }

  std::vector<std::string> vars_of_type(const Context& ctx, const TypePtr& ty) {
    std::vector<std::string> out;
    for (const auto& [x, vty] : ctx.vars)
      if (type_eq(vty, ty)) out.push_back(x);
    return out;
  }

  std::string fresh(const Context& ctx) {
    for (int i = 0;; ++i) {
      std::string x = "v" + std::to_string(i);
      if (!ctx.vars.count(x)) return x;
    }
  }

  TermPtr gen_value(const Layout& w, const Context& ctx, const TypePtr& ty,
                    int size) {
    auto vars = vars_of_type(ctx, ty);
    if (!vars.empty() && (size <= 1 || flip(0.35)))
      return mk_var(vars[pick((int)vars.size())]);
    switch (ty->kind()) {
      case Type::Kind::Unit:
        return mk_star();
      case Type::Kind::Empty:
        if (!vars.empty()) return mk_var(vars[pick((int)vars.size())]);
        throw GenFail{};
      case Type::Kind::Sum: {
        bool l = inhabited(ty->lhs(), w, ctx);
        bool r = inhabited(ty->rhs(), w, ctx);
        if (!l && !r) throw GenFail{};
        int tag = (l && r) ? 1 + pick(2) : (l ? 1 : 2);
        return mk_inj(tag,
                      gen_value(w, ctx, tag == 1 ? ty->lhs() : ty->rhs(),
                                size - 1),
                      ty);
      }
      case Type::Kind::Product:
        return mk_pair(gen_value(w, ctx, ty->lhs(), size / 2),
                       gen_value(w, ctx, ty->rhs(), size / 2));
      case Type::Kind::Ref: {
        std::vector<int> cells;
        for (const auto& [l, s] : w.cells)
          if (s == ty->ref_sort()) cells.push_back(l);
        if (!cells.empty() && (vars.empty() || flip(0.6)))
          return mk_loc(cells[pick((int)cells.size())]);
        if (!vars.empty()) return mk_var(vars[pick((int)vars.size())]);
        throw GenFail{};
      }
      case Type::Kind::Arrow: {
        Context inner = ctx;
        std::string x = fresh(ctx);
        inner.vars[x] = ty->lhs();
        return mk_fun(x, ty->lhs(),
                      gen_term(w, inner, ty->rhs(), std::max(1, size - 1)));
      }
    }
    throw GenFail{};
  }

  TermPtr gen_term(const Layout& w, const Context& ctx, const TypePtr& ty,
                   int size) {
    if (size <= 1) return gen_value(w, ctx, ty, 1);
    for (int attempt = 0; attempt < 24; ++attempt) {
      try {
        return gen_term_once(w, ctx, ty, size);
      } catch (const GenFail&) {
      }
    }
    return gen_value(w, ctx, ty, 1);
  }

  TermPtr gen_term_once(const Layout& w, const Context& ctx, const TypePtr& ty,
                        int size) {
    struct Choice {
      int weight;
      std::function<TermPtr()> build;
    };
    std::vector<Choice> choices;
    auto add = [&](int weight, std::function<TermPtr()> b) {
      choices.push_back({weight, std::move(b)});
    };

    add(3, [&] { return gen_value(w, ctx, ty, size); });

    if (ty->kind() == Type::Kind::Sum) {
      add(3, [&] {
        bool l = inhabited(ty->lhs(), w, ctx);
        bool r = inhabited(ty->rhs(), w, ctx);
        if (!l && !r) throw GenFail{};
        int tag = (l && r) ? 1 + pick(2) : (l ? 1 : 2);
        return mk_inj(tag,
                      gen_term(w, ctx, tag == 1 ? ty->lhs() : ty->rhs(),
                               size - 1),
                      ty);
      });
    }
    if (ty->kind() == Type::Kind::Product) {
      add(3, [&] {
        return mk_pair(gen_term(w, ctx, ty->lhs(), size / 2),
                       gen_term(w, ctx, ty->rhs(), size / 2));
      });
    }
    if (ty->kind() == Type::Kind::Arrow) {
      add(4, [&] {
        Context inner = ctx;
        std::string x = fresh(ctx);
        inner.vars[x] = ty->lhs();
        return mk_fun(x, ty->lhs(), gen_term(w, inner, ty->rhs(), size - 1));
      });
    }

    // Application at a random argument type.
    add(3, [&] {
      TypePtr arg = gen_type(w, ctx, 1, false);
      if (!inhabited(arg, w, ctx)) throw GenFail{};
      TermPtr f = gen_term(w, ctx, Type::arrow(arg, ty), size / 2);
      TermPtr a = gen_term(w, ctx, arg, size / 2);
      return mk_app(f, a);
    });

    // Sum match.
    add(3, [&] {
      TypePtr s = Type::sum(gen_type(w, ctx, 1, false),
                            flip(0.2) ? Type::empty()
                                      : gen_type(w, ctx, 1, false));
      if (!inhabited(s, w, ctx)) throw GenFail{};
      TermPtr scrut = gen_term(w, ctx, s, size / 3);
      Context c1 = ctx, c2 = ctx;
      std::string x1 = fresh(ctx);
      c1.vars[x1] = s->lhs();
      std::string x2 = fresh(c1);
      c2.vars[x2] = s->rhs();
      TermPtr a1 = gen_term(w, c1, ty, size / 3);
      TermPtr a2 = gen_term(w, c2, ty, size / 3);
      return mk_match_sum(scrut, x1, a1, x2, a2);
    });

    // Product match.
    add(2, [&] {
      TypePtr p =
          Type::product(gen_type(w, ctx, 1, false), gen_type(w, ctx, 1, false));
      if (!inhabited(p, w, ctx)) throw GenFail{};
      TermPtr scrut = gen_term(w, ctx, p, size / 2);
      Context c = ctx;
      std::string x1 = fresh(ctx);
      c.vars[x1] = p->lhs();
      std::string x2 = fresh(c);
      c.vars[x2] = p->rhs();
      return mk_match_prod(scrut, x1, x2, gen_term(w, c, ty, size / 2));
    });

    // Empty match, when a value of the empty type is in scope.
    {
      auto zs = vars_of_type(ctx, Type::empty());
      if (!zs.empty()) {
        add(8, [&, zs] {
          return mk_match_empty(mk_var(zs[pick((int)zs.size())]), ty);
        });
      }
    }

    // Dereference: any sort whose content type is ty.
    {
      std::vector<std::string> sorts;
      for (const auto& s : sig.sorts())
        if (type_eq(Type::from_ground(sig.content_type(s)), ty) &&
            ref_producible(w, ctx, s))
          sorts.push_back(s);
      if (!sorts.empty()) {
        add(4, [&, sorts] {
          const auto& s = sorts[pick((int)sorts.size())];
          return mk_deref(gen_term(w, ctx, Type::ref(s), size - 1));
        });
      }
    }

    // Assignment (unit type).
    if (ty->kind() == Type::Kind::Unit) {
      std::vector<std::string> sorts;
      for (const auto& s : sig.sorts())
        if (ref_producible(w, ctx, s) &&
            inhabited(Type::from_ground(sig.content_type(s)), w, ctx))
          sorts.push_back(s);
      if (!sorts.empty()) {
        add(4, [&, sorts] {
          const auto& s = sorts[pick((int)sorts.size())];
          TermPtr r = gen_term(w, ctx, Type::ref(s), size / 2);
          TermPtr v = gen_term(
              w, ctx, Type::from_ground(sig.content_type(s)), size / 2);
          return mk_assign(r, v);
        });
      }
    }

    // Allocation with 1-3 binders; sometimes one cell of every sort so that
    // mutually referring initialisers are generatable.
    add(4, [&] {
      std::vector<std::string> sorts;
      if (flip(0.4)) {
        sorts = sig.sorts();
      } else {
        int n = 1 + pick(3);
        for (int i = 0; i < n; ++i)
          sorts.push_back(sig.sorts()[pick((int)sig.sorts().size())]);
      }
      if (sorts.empty() || sorts.size() > 3) throw GenFail{};
      Context inner = ctx;
      std::vector<std::string> names;
      for (const auto& s : sorts) {
        std::string x = fresh(inner);
        names.push_back(x);
        inner.vars[x] = Type::ref(s);
      }
      std::vector<NewBinder> binders;
      for (size_t i = 0; i < sorts.size(); ++i) {
        TypePtr content = Type::from_ground(sig.content_type(sorts[i]));
        if (!inhabited(content, w, inner)) throw GenFail{};
        binders.push_back(
            {names[i], sorts[i], gen_value(w, inner, content, 2)});
      }
      return mk_new(std::move(binders),
                    gen_term(w, inner, ty, size - (int)sorts.size()));
    });

    int total = 0;
    for (const auto& c : choices) total += c.weight;
    int roll = pick(total);
    for (const auto& c : choices) {
      roll -= c.weight;
      if (roll < 0) return c.build();
    }
    throw GenFail{};
  }
};

std::vector<Layout> layout_battery(const Signature& sig) {
  std::vector<Layout> out;
  out.push_back(Layout{});
  if (!sig.sorts().empty()) {
    const std::string& s0 = sig.sorts().back();  // prefer a simple sort
    Layout one;
    one.cells[0] = s0;
    out.push_back(one);
    Layout two = one;
    two.cells[1] = s0;
    out.push_back(two);
    Layout each;
    int i = 0;
    for (const auto& s : sig.sorts()) each.cells[i++] = s;
    out.push_back(each);
  }
  return out;
}

}  // namespace

GeneratedTerm gen_well_typed(const Signature& sig, int size, uint64_t seed,
                             const GenOptions& opts) {
  Gen g{sig, std::mt19937_64(seed), opts};
  auto layouts = layout_battery(sig);
  if (opts.max_layout_cells >= 0) {
    std::vector<Layout> kept;
    for (auto& w : layouts)
      if (static_cast<int>(w.size()) <= opts.max_layout_cells)
        kept.push_back(std::move(w));
    layouts = std::move(kept);
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    Layout w = layouts[g.pick((int)layouts.size())];
    Context empty;
    TypePtr ty = g.gen_type(w, empty, 2, opts.allow_arrow_result);
    try {
      TermPtr t = g.gen_term(w, empty, ty, size);
      TypePtr got = infer(sig, w, empty, t);
      if (!type_eq(got, ty)) continue;
      return GeneratedTerm{w, t, ty};
    } catch (const GenFail&) {
    } catch (const TypeError&) {
    }
  }
  throw GenerationExhaustedError();
}

TermPtr term_of_semvalue(const Signature& sig, const GroundTypePtr& g,
                         const SemValue& v) {
  switch (g->kind()) {
    case GroundType::Kind::Unit:
      return mk_star();
    case GroundType::Kind::Empty:
      throw LamrefError("term_of_semvalue: empty type");
    case GroundType::Kind::Sum:
      return mk_inj(v.tag(),
                    term_of_semvalue(sig, v.tag() == 1 ? g->lhs() : g->rhs(),
                                     v.sub()),
                    Type::from_ground(g));
    case GroundType::Kind::Product:
      return mk_pair(term_of_semvalue(sig, g->lhs(), v.fst()),
                     term_of_semvalue(sig, g->rhs(), v.snd()));
    case GroundType::Kind::Ref:
      return mk_loc(v.loc_index());
  }
  throw LamrefError("unreachable ground kind");
}

std::vector<TypedHeap> enumerate_heaps(const Signature& sig, const Layout& w) {
  std::vector<TypedHeap> out;
  for (const auto& s : enumerate_stores(sig, w)) {
    TypedHeap h;
    h.layout = w;
    for (const auto& [l, v] : s.contents)
      h.contents[l] =
          term_of_semvalue(sig, sig.content_type(w.cells.at(l)), v);
    out.push_back(std::move(h));
  }
  return out;
}

// --- reports ---------------------------------------------------------------------

std::string TestReport::to_text() const {
  std::string out = suite + ": " + std::to_string(instances) + " instances, " +
                    std::to_string(failures.size()) + " failures";
  if (!approximations.empty())
    out += ", " + std::to_string(approximations.size()) + " approximate";
  if (!bounds.empty()) out += " (bounds: " + bounds + ")";
  out += "\n";
  for (const auto& f : failures) out += "  FAIL " + f + "\n";
  for (const auto& a : approximations) out += "  approx " + a + "\n";
  return out;
}

std::string TestReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["instances"] = instances;
  j["failures"] = failures;
  j["approximations"] = approximations;
  j["bounds"] = bounds;
  j["ok"] = ok();
  return j.dump(2);
}

std::vector<std::string> parallel_collect(
    long n, const std::function<std::string(long)>& fn) {
  std::vector<std::string> out(static_cast<size_t>(n));
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers > 8) workers = 8;
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        out[static_cast<size_t>(i)] = fn(i);
    });
  for (auto& th : pool) th.join();
  return out;
}

// --- soundness -------------------------------------------------------------------

TestReport check_soundness(const Signature& sig, const Layout& w,
                           const TermPtr& t, int bound) {
  TestReport report;
  report.suite = "soundness";
  report.bounds = "worlds <= " + std::to_string(bound) + " cells, all heaps";
  Context empty;
  TypePtr ty = infer(sig, w, empty, t);
  if (!ty->is_ground()) {
    report.approximations.push_back("result type " + print_type(ty) +
                                    " is not ground; instance skipped");
    return report;
  }
  GroundTypePtr gty = ty->to_ground();
  MonadComp m = denote_term(sig, w, empty, t, Injection::identity(w), Env{});

  for (const auto& w1 : enumerate_worlds(sig, bound)) {
    if (!layout_extends(w, w1)) continue;
    Injection incl = Injection::inclusion(w, w1);
    for (const auto& H1 : enumerate_heaps(sig, w1)) {
      ++report.instances;
      std::string desc = print_term(t) + " at " + print_layout(w1) + " heap " +
                         print_heap(H1.contents);
      EvalResult res;
      try {
        res = eval(sig, Config{t, H1.contents});
      } catch (const LamrefError& e) {
        report.failures.push_back(desc + ": " + e.what());
        continue;
      }
      Layout w2 = w1;
      for (const auto& [l, s] : res.allocations) w2.cells[l] = s;
      try {
        TypedHeap H2 = to_typed(sig, w2, res.heap);
        CoendRep lhs = m.component(incl, denote_heap(sig, H1));
        CoendRep rhs;
        rhs.base = w1;
        rhs.inj = Injection::inclusion(w1, w2);
        rhs.payload = denote_value(sig, w2, empty, res.value,
                                   Injection::identity(w2), Env{});
        rhs.store = denote_heap(sig, H2);
        if (!interp_member(sig, gty, w2, rhs.payload))
          throw LamrefError("result value leaves the type interpretation");
        if (!coend_equal(sig, lhs, rhs))
          report.failures.push_back(desc + ": denotation disagrees, got " +
                                    print_coend_rep(lhs) + " vs " +
                                    print_coend_rep(rhs));
      } catch (const LamrefError& e) {
        report.failures.push_back(desc + ": " + e.what());
      }
    }
  }
  return report;
}

// --- equations -------------------------------------------------------------------

namespace {

TermPtr seq2(const TermPtr& a, const TermPtr& b, const TypePtr& a_ty) {
  return mk_app(mk_fun("_s", a_ty, b), a);
}

TermPtr let_in(const std::string& x, const TypePtr& ty, const TermPtr& rhs,
               const TermPtr& body) {
  return mk_app(mk_fun(x, ty, body), rhs);
}

std::vector<TermPtr> closed_values(const Signature& sig, const std::string& sort,
                                   const Layout& w) {
  std::vector<TermPtr> out;
  GroundTypePtr g = sig.content_type(sort);
  for (const auto& v : interp_type(sig, g, w))
    out.push_back(term_of_semvalue(sig, g, v));
  return out;
}

}  // namespace

std::vector<EquationSchema> equation_suite() {
  std::vector<EquationSchema> out;

  // GS6: assignments to distinct cells commute.
  out.push_back(EquationSchema{
      "gs6-update-update-distinct", "literature", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k1 : sig.sorts())
          for (const auto& k2 : sig.sorts()) {
            Layout w;
            w.cells[0] = k1;
            w.cells[1] = k2;
            for (const auto& v1 : closed_values(sig, k1, w))
              for (const auto& v2 : closed_values(sig, k2, w)) {
                TermPtr l = seq2(mk_assign(mk_loc(0), v1),
                                 mk_assign(mk_loc(1), v2), Type::unit());
                TermPtr r = seq2(mk_assign(mk_loc(1), v2),
                                 mk_assign(mk_loc(0), v1), Type::unit());
                is.push_back({"k1=" + k1 + " k2=" + k2 + " v1=" +
                                  print_term(v1) + " v2=" + print_term(v2),
                              w, l, r});
              }
          }
        return is;
      }});

  // Two lookups of the same cell see the same value.
  out.push_back(EquationSchema{
      "lookup-lookup-same", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k : sig.sorts()) {
          Layout w;
          w.cells[0] = k;
          TypePtr g = Type::from_ground(sig.content_type(k));
          TermPtr l = let_in(
              "x", g, mk_deref(mk_loc(0)),
              let_in("y", g, mk_deref(mk_loc(0)),
                     mk_pair(mk_var("x"), mk_var("y"))));
          TermPtr r = let_in("x", g, mk_deref(mk_loc(0)),
                             mk_pair(mk_var("x"), mk_var("x")));
          is.push_back({"k=" + k, w, l, r});
        }
        return is;
      }});

  // A lookup after an update sees the written value.
  out.push_back(EquationSchema{
      "update-lookup-same", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k : sig.sorts()) {
          Layout w;
          w.cells[0] = k;
          for (const auto& v : closed_values(sig, k, w)) {
            TermPtr l = seq2(mk_assign(mk_loc(0), v), mk_deref(mk_loc(0)),
                             Type::unit());
            TermPtr r = seq2(mk_assign(mk_loc(0), v), v, Type::unit());
            is.push_back({"k=" + k + " v=" + print_term(v), w, l, r});
          }
        }
        return is;
      }});

  // The second of two updates to the same cell wins.
  out.push_back(EquationSchema{
      "update-update-same", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k : sig.sorts()) {
          Layout w;
          w.cells[0] = k;
          for (const auto& v1 : closed_values(sig, k, w))
            for (const auto& v2 : closed_values(sig, k, w)) {
              TermPtr l = seq2(mk_assign(mk_loc(0), v1),
                               mk_assign(mk_loc(0), v2), Type::unit());
              TermPtr r = mk_assign(mk_loc(0), v2);
              is.push_back(
                  {"k=" + k + " v1=" + print_term(v1) + " v2=" + print_term(v2),
                   w, l, r});
            }
        }
        return is;
      }});

  // Writing back what was read is a no-op.
  out.push_back(EquationSchema{
      "lookup-update-same", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k : sig.sorts()) {
          Layout w;
          w.cells[0] = k;
          is.push_back({"k=" + k, w,
                        mk_assign(mk_loc(0), mk_deref(mk_loc(0))), mk_star()});
        }
        return is;
      }});

  // Lookups of distinct cells commute.
  out.push_back(EquationSchema{
      "lookup-lookup-distinct", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k1 : sig.sorts())
          for (const auto& k2 : sig.sorts()) {
            Layout w;
            w.cells[0] = k1;
            w.cells[1] = k2;
            TypePtr g1 = Type::from_ground(sig.content_type(k1));
            TypePtr g2 = Type::from_ground(sig.content_type(k2));
            TermPtr l =
                let_in("x", g1, mk_deref(mk_loc(0)),
                       let_in("y", g2, mk_deref(mk_loc(1)),
                              mk_pair(mk_var("x"), mk_var("y"))));
            TermPtr r =
                let_in("y", g2, mk_deref(mk_loc(1)),
                       let_in("x", g1, mk_deref(mk_loc(0)),
                              mk_pair(mk_var("x"), mk_var("y"))));
            is.push_back({"k1=" + k1 + " k2=" + k2, w, l, r});
          }
        return is;
      }});

  // An update and a lookup of distinct cells commute.
  out.push_back(EquationSchema{
      "update-lookup-distinct", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k1 : sig.sorts())
          for (const auto& k2 : sig.sorts()) {
            Layout w;
            w.cells[0] = k1;
            w.cells[1] = k2;
            TypePtr g2 = Type::from_ground(sig.content_type(k2));
            for (const auto& v : closed_values(sig, k1, w)) {
              TermPtr l = seq2(mk_assign(mk_loc(0), v), mk_deref(mk_loc(1)),
                               Type::unit());
              TermPtr r = let_in("y", g2, mk_deref(mk_loc(1)),
                                 seq2(mk_assign(mk_loc(0), v), mk_var("y"),
                                      Type::unit()));
              is.push_back({"k1=" + k1 + " k2=" + k2 + " v=" + print_term(v),
                            w, l, r});
            }
          }
        return is;
      }});

  // Allocation commutes with a lookup of an existing cell.
  out.push_back(EquationSchema{
      "allocation-lookup-commute", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& kn : sig.sorts())
          for (const auto& ke : sig.sorts()) {
            Layout w;
            w.cells[0] = ke;
            TypePtr gn = Type::from_ground(sig.content_type(kn));
            TypePtr ge = Type::from_ground(sig.content_type(ke));
            for (const auto& v : closed_values(sig, kn, w)) {
              TermPtr l = let_in("_z", Type::ref(kn),
                                 mk_new({{"c", kn, v}}, mk_var("c")),
                                 mk_deref(mk_loc(0)));
              TermPtr r = let_in(
                  "y", ge, mk_deref(mk_loc(0)),
                  let_in("_z", Type::ref(kn), mk_new({{"c", kn, v}}, mk_var("c")),
                         mk_var("y")));
              is.push_back(
                  {"new=" + kn + " at=" + ke + " v=" + print_term(v), w, l, r});
              (void)gn;
            }
          }
        return is;
      }});

  // Allocation commutes with an update of an existing cell.
  out.push_back(EquationSchema{
      "allocation-update-commute", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& kn : sig.sorts())
          for (const auto& ke : sig.sorts()) {
            Layout w;
            w.cells[0] = ke;
            for (const auto& vn : closed_values(sig, kn, w))
              for (const auto& ve : closed_values(sig, ke, w)) {
                TermPtr l = let_in("_z", Type::ref(kn),
                                   mk_new({{"c", kn, vn}}, mk_var("c")),
                                   mk_assign(mk_loc(0), ve));
                TermPtr r = seq2(mk_assign(mk_loc(0), ve),
                                 let_in("_z", Type::ref(kn),
                                        mk_new({{"c", kn, vn}}, mk_var("c")),
                                        mk_star()),
                                 Type::unit());
                is.push_back({"new=" + kn + " at=" + ke + " vn=" +
                                  print_term(vn) + " ve=" + print_term(ve),
                              w, l, r});
              }
          }
        return is;
      }});

  // Two allocations exchange.
  out.push_back(EquationSchema{
      "allocation-exchange", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k1 : sig.sorts())
          for (const auto& k2 : sig.sorts()) {
            Layout w;
            TypePtr g1 = Type::from_ground(sig.content_type(k1));
            TypePtr g2 = Type::from_ground(sig.content_type(k2));
            auto vs1 = closed_values(sig, k1, w);
            auto vs2 = closed_values(sig, k2, w);
            if (vs1.empty() || vs2.empty()) continue;
            const TermPtr& v1 = vs1.front();
            const TermPtr& v2 = vs2.front();
            TermPtr l = let_in(
                "a", Type::ref(k1), mk_new({{"c1", k1, v1}}, mk_var("c1")),
                let_in("b", Type::ref(k2), mk_new({{"c2", k2, v2}}, mk_var("c2")),
                       mk_pair(mk_deref(mk_var("a")), mk_deref(mk_var("b")))));
            TermPtr r = let_in(
                "b", Type::ref(k2), mk_new({{"c2", k2, v2}}, mk_var("c2")),
                let_in("a", Type::ref(k1), mk_new({{"c1", k1, v1}}, mk_var("c1")),
                       mk_pair(mk_deref(mk_var("a")), mk_deref(mk_var("b")))));
            is.push_back({"k1=" + k1 + " k2=" + k2, w, l, r});
            (void)g1;
            (void)g2;
          }
        return is;
      }});

  // Masking: allocating a cell that is never used is invisible.
  out.push_back(EquationSchema{
      "allocation-masking", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        Layout empty;
        for (const auto& k : sig.sorts()) {
          for (const auto& v : closed_values(sig, k, empty)) {
            TermPtr l = let_in("_z", Type::ref(k),
                               mk_new({{"c", k, v}}, mk_var("c")), mk_bool(true));
            is.push_back({"k=" + k + " v=" + print_term(v), empty, l,
                          mk_bool(true)});
          }
        }
        return is;
      }});

  // A fresh cell reads back its initialiser.
  out.push_back(EquationSchema{
      "new-lookup", "reconstructed", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        Layout empty;
        for (const auto& k : sig.sorts()) {
          for (const auto& v : closed_values(sig, k, empty)) {
            TermPtr l = mk_new({{"c", k, v}}, mk_deref(mk_var("c")));
            TermPtr r = mk_new({{"c", k, v}}, v);
            is.push_back({"k=" + k + " v=" + print_term(v), empty, l, r});
          }
        }
        return is;
      }});

  return out;
}

EquationSchema negative_control() {
  // Deliberately wrong: an update before a lookup is not a no-op.
  return EquationSchema{
      "negative-control-update-lookup", "control", [](const Signature& sig) {
        std::vector<EquationInstance> is;
        for (const auto& k : sig.sorts()) {
          Layout w;
          w.cells[0] = k;
          for (const auto& v : closed_values(sig, k, w)) {
            TermPtr l = seq2(mk_assign(mk_loc(0), v), mk_deref(mk_loc(0)),
                             Type::unit());
            is.push_back(
                {"k=" + k + " v=" + print_term(v), w, l, mk_deref(mk_loc(0))});
          }
        }
        return is;
      }};
}

TestReport check_equation(const EquationSchema& schema, const Signature& sig,
                          int bound) {
  TestReport report;
  report.suite = "equation " + schema.name + " [" + schema.source + "]";
  report.bounds = "equal_bounded, worlds <= " + std::to_string(bound);
  for (const auto& inst : schema.instantiate(sig)) {
    ++report.instances;
    Context empty;
    try {
      Injection id = Injection::identity(inst.layout);
      MonadComp m1 = denote_term(sig, inst.layout, empty, inst.lhs, id, Env{});
      MonadComp m2 = denote_term(sig, inst.layout, empty, inst.rhs, id, Env{});
      EqResult r = equal_bounded(sig, m1, m2, bound);
      if (r.status == EqResult::Status::NotEqual)
        report.failures.push_back(inst.desc + ": " + r.detail);
      else if (r.status == EqResult::Status::Approximate)
        report.approximations.push_back(inst.desc + ": " + r.detail);
    } catch (const LamrefError& e) {
      report.failures.push_back(inst.desc + ": " + e.what());
    }
  }
  return report;
}

MaskingResult check_masking(const Signature& sig, const TermPtr& t) {
  MaskingResult out;
  out.report.suite = "effect-masking";
  Layout empty_w;
  Context empty;
  TypePtr ty = infer(sig, empty_w, empty, t);
  ++out.report.instances;
  std::string desc = print_term(t);
  bool constant = ty->is_ground() && !ty->to_ground()->mentions_ref();
  if (!constant) {
    out.report.failures.push_back(
        desc + ": result type " + print_type(ty) +
        " is not constant (mentions references or functions)");
    return out;
  }
  MonadComp m =
      denote_term(sig, empty_w, empty, t, Injection::identity(empty_w), Env{});
  CoendRep r = m.component(Injection::identity(empty_w), Store{});
  if (!r.store.world.cells.empty()) {
    out.report.failures.push_back(desc + ": residual private store " +
                                  print_coend_rep(r));
    return out;
  }
  MonadComp pure = t_return(sig, empty_w, ty, r.payload);
  CoendRep rp = pure.component(Injection::identity(empty_w), Store{});
  if (!coend_equal(sig, r, rp)) {
    out.report.failures.push_back(desc + ": component is not a monadic return");
    return out;
  }
  out.pure_value = r.payload;
  return out;
}

// --- observational equivalence -----------------------------------------------------

namespace {

// Boolean observers of a variable of the given type, built structurally.
void value_observers(const Signature& sig, const TypePtr& ty, const TermPtr& t,
                     int depth, std::vector<TermPtr>& out) {
  if (depth <= 0) return;
  switch (ty->kind()) {
    case Type::Kind::Sum: {
      if (type_eq(ty, Type::boolean())) {
        out.push_back(t);
        return;
      }
      // Tag observer.
      out.push_back(mk_match_sum(t, "a", mk_bool(true), "b", mk_bool(false)));
      std::vector<TermPtr> lhs, rhs;
      value_observers(sig, ty->lhs(), mk_var("a"), depth - 1, lhs);
      value_observers(sig, ty->rhs(), mk_var("b"), depth - 1, rhs);
      for (const auto& o : lhs)
        out.push_back(mk_match_sum(t, "a", o, "b", mk_bool(true)));
      for (const auto& o : rhs)
        out.push_back(mk_match_sum(t, "a", mk_bool(true), "b", o));
      return;
    }
    case Type::Kind::Product: {
      std::vector<TermPtr> lhs, rhs;
      value_observers(sig, ty->lhs(), mk_var("a"), depth - 1, lhs);
      value_observers(sig, ty->rhs(), mk_var("b"), depth - 1, rhs);
      for (const auto& o : lhs) out.push_back(mk_match_prod(t, "a", "b", o));
      for (const auto& o : rhs) out.push_back(mk_match_prod(t, "a", "b", o));
      return;
    }
    case Type::Kind::Ref: {
      TypePtr content = Type::from_ground(sig.content_type(ty->ref_sort()));
      value_observers(sig, content, mk_deref(t), depth - 1, out);
      return;
    }
    case Type::Kind::Arrow: {
      // Probe with the first closed argument value, if the type is ground.
      if (ty->lhs()->is_ground()) {
        Layout empty;
        auto args = interp_type(sig, ty->lhs()->to_ground(), empty);
        if (!args.empty()) {
          TermPtr arg =
              term_of_semvalue(sig, ty->lhs()->to_ground(), args.front());
          value_observers(sig, ty->rhs(), mk_app(t, arg), depth - 1, out);
        }
      }
      return;
    }
    default:
      return;
  }
}

}  // namespace

std::vector<ObsContext> obs_contexts(const Signature& sig, const Layout& w,
                                     const TypePtr& ty, int budget,
                                     uint64_t seed) {
  std::vector<ObsContext> out;
  auto add = [&](std::string desc, Layout layout,
                 std::function<TermPtr(const TermPtr&)> plug) {
    if (static_cast<int>(out.size()) < budget)
      out.push_back({std::move(desc), std::move(layout), std::move(plug)});
  };

  // Post-state observers: run the hole, then dereference a boolean cell.
  for (const auto& [l, sort] : w.cells) {
    if (!ground_eq(sig.content_type(sort), GroundType::boolean())) continue;
    int loc = l;
    add("let z = [] in !#" + std::to_string(loc), w,
        [ty, loc](const TermPtr& hole) {
          return mk_app(mk_fun("z", ty, mk_deref(mk_loc(loc))), hole);
        });
  }

  // Result observers.
  {
    std::vector<TermPtr> obs;
    value_observers(sig, ty, mk_var("z"), 4, obs);
    for (const auto& o : obs)
      add("let z = [] in " + print_term(o), w, [ty, o](const TermPtr& hole) {
        return mk_app(mk_fun("z", ty, o), hole);
      });
  }

  // Randomly generated boolean observers over z and the layout.
  {
    Gen g{sig, std::mt19937_64(seed), GenOptions{}};
    Context ctx;
    ctx.vars["z"] = ty;
    for (int i = 0; static_cast<int>(out.size()) < budget && i < budget; ++i) {
      try {
        TermPtr o = g.gen_term(w, ctx, Type::boolean(), 6);
        Context check;
        check.vars["z"] = ty;
        if (!type_eq(infer(sig, w, check, o), Type::boolean())) continue;
        add("let z = [] in " + print_term(o), w, [ty, o](const TermPtr& hole) {
          return mk_app(mk_fun("z", ty, o), hole);
        });
      } catch (const LamrefError&) {
      }
    }
  }
  return out;
}

std::optional<ObsWitness> obs_diff(const Signature& sig, const Layout& w,
                                   const TermPtr& t1, const TermPtr& t2,
                                   int context_budget, uint64_t seed) {
  Context empty;
  TypePtr ty = infer(sig, w, empty, t1);
  TypePtr ty2 = infer(sig, w, empty, t2);
  if (!type_eq(ty, ty2))
    throw LamrefError("obs_diff: the two terms have different types");

  for (const auto& c : obs_contexts(sig, w, ty, context_budget, seed)) {
    for (const auto& H : enumerate_heaps(sig, c.layout)) {
      TermPtr p1 = c.plug(t1);
      TermPtr p2 = c.plug(t2);
      try {
        EvalResult r1 = eval(sig, Config{p1, H.contents});
        EvalResult r2 = eval(sig, Config{p2, H.contents});
        if (!alpha_eq(r1.value, r2.value)) {
          return ObsWitness{c.desc, print_heap(H.contents),
                            print_term(r1.value), print_term(r2.value)};
        }
      } catch (const LamrefError&) {
        // Ill-fated context (e.g. empty-type trickery); skip it.
      }
    }
  }
  return std::nullopt;
}

namespace {

// Closed instantiations of a variable at its type: exhaustive for ground
// types, generated samples for the rest.
std::vector<TermPtr> closing_values(const Signature& sig, const Layout& w,
                                    const TypePtr& ty, uint64_t seed) {
  std::vector<TermPtr> out;
  if (ty->is_ground()) {
    GroundTypePtr g = ty->to_ground();
    for (const auto& v : interp_type(sig, g, w))
      out.push_back(term_of_semvalue(sig, g, v));
    return out;
  }
  Context empty;
  for (uint64_t s = seed; out.size() < 3 && s < seed + 64; ++s) {
    Gen gen{sig, std::mt19937_64(s), GenOptions{}};
    try {
      TermPtr v = gen.gen_value(w, Context{}, ty, 4);
      if (type_eq(infer(sig, w, empty, v), ty)) out.push_back(v);
    } catch (const GenFail&) {
    } catch (const TypeError&) {
    }
  }
  return out;
}

}  // namespace

std::optional<ObsWitness> obs_diff(const Signature& sig, const Layout& w,
                                   const Context& ctx, const TermPtr& t1,
                                   const TermPtr& t2, int context_budget,
                                   uint64_t seed) {
  if (ctx.vars.empty()) return obs_diff(sig, w, t1, t2, context_budget, seed);

  // All closing substitutions for the context, cartesian over the variables.
  std::vector<std::map<std::string, TermPtr>> envs = {{}};
  for (const auto& [x, ty] : ctx.vars) {
    auto vals = closing_values(sig, w, ty, seed);
    if (vals.empty()) return std::nullopt;  // uninstantiable judgement
    std::vector<std::map<std::string, TermPtr>> next;
    for (const auto& e : envs)
      for (const auto& v : vals) {
        auto e2 = e;
        e2[x] = v;
        next.push_back(std::move(e2));
      }
    envs = std::move(next);
  }
  for (const auto& e : envs) {
    auto witness =
        obs_diff(sig, w, substitute(t1, e), substitute(t2, e), context_budget,
                 seed);
    if (witness) return witness;
  }
  return std::nullopt;
}

}  // namespace lamref
