#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lamref/harness.hpp"
#include "lamref/parser.hpp"

using namespace lamref;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LamrefError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fills unspecified cells with the first value of the content type.
UntypedHeap initial_heap(const ParsedProgram& p) {
  UntypedHeap h;
  for (const auto& [loc, sort] : p.layout.cells) {
    auto it = p.initial_heap.find(loc);
    if (it != p.initial_heap.end()) {
      h[loc] = it->second;
      continue;
    }
    GroundTypePtr g = p.sig.content_type(sort);
    auto vs = interp_type(p.sig, g, p.layout);
    if (vs.empty())
      throw LamrefError("cell #" + std::to_string(loc) +
                        " has no value at the file's layout; give one with "
                        "`#i:sort = value`");
    h[loc] = term_of_semvalue(p.sig, g, vs.front());
  }
  return h;
}

void dump_core(const ParsedProgram& p) {
  std::cout << "core: " << print_term(p.term) << "\n";
}

int cmd_check(const std::string& file, bool dump) {
  try {
    ParsedProgram p = parse_program(read_file(file));
    if (dump) dump_core(p);
    Context empty;
    TypePtr ty = infer(p.sig, p.layout, empty, p.term);
    std::cout << print_type(ty) << "\n";
    return 0;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const TypeError& e) {
    std::cerr << "type error at offset " << e.pos << ": " << e.what() << "\n";
    return 1;
  } catch (const LamrefError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int cmd_run(const std::string& file, bool dump) {
  try {
    ParsedProgram p = parse_program(read_file(file));
    if (dump) dump_core(p);
    Context empty;
    infer(p.sig, p.layout, empty, p.term);
    EvalResult r = eval(p.sig, Config{p.term, initial_heap(p)});
    Layout final_layout = p.layout;
    for (const auto& [l, s] : r.allocations) final_layout.cells[l] = s;
    std::cout << print_term(r.value) << "\n";
    for (const auto& [l, v] : r.heap)
      std::cout << "#" << l << " : " << final_layout.cells.at(l) << " = "
                << print_term(v) << "\n";
    return 0;
  } catch (const LamrefError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int cmd_denote(const std::string& file, const std::string& world_s,
               const std::string& store_s) {
  try {
    ParsedProgram p = parse_program(read_file(file));
    Context empty;
    infer(p.sig, p.layout, empty, p.term);
    World at = world_s.empty() ? p.layout : parse_layout(world_s);
    if (!layout_extends(p.layout, at))
      throw LamrefError("--world must extend the file's layout");
    Store store;
    store.world = at;
    if (!store_s.empty()) {
      for (const auto& [l, v] : parse_heap_values(p.sig, at, store_s))
        store.contents[l] = denote_value(p.sig, at, empty, v,
                                         Injection::identity(at), Env{});
    }
    if (store.contents.size() != at.cells.size())
      throw LamrefError("--store must give a value for every cell of the world");
    MonadComp m = denote_term(p.sig, p.layout, empty, p.term,
                              Injection::identity(p.layout), Env{});
    CoendRep r = m.component(Injection::inclusion(p.layout, at), store);
    std::cout << print_coend_rep(r) << "\n";
    return 0;
  } catch (const LamrefError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

bool same_signature(const Signature& a, const Signature& b) {
  if (a.sorts() != b.sorts()) return false;
  for (const auto& s : a.sorts())
    if (!ground_eq(a.content_type(s), b.content_type(s))) return false;
  return true;
}

int cmd_eq(const std::string& file1, const std::string& file2, int bound,
           bool json) {
  try {
    ParsedProgram p1 = parse_program(read_file(file1));
    ParsedProgram p2 = parse_program(read_file(file2));
    if (!same_signature(p1.sig, p2.sig))
      throw LamrefError("the two programs declare different signatures");
    if (!(p1.layout == p2.layout))
      throw LamrefError("the two programs assume different layouts");
    Context empty;
    Injection id = Injection::identity(p1.layout);
    MonadComp m1 =
        denote_term(p1.sig, p1.layout, empty, p1.term, id, Env{});
    MonadComp m2 =
        denote_term(p1.sig, p2.layout, empty, p2.term, id, Env{});
    EqResult r = equal_bounded(p1.sig, m1, m2, bound);
    if (json) {
      std::cout << "{\"status\": \""
                << (r.status == EqResult::Status::Equal ? "equal"
                    : r.status == EqResult::Status::NotEqual ? "not-equal"
                                                             : "approximate")
                << "\", \"detail\": \"" << r.detail << "\", \"bound\": "
                << bound << "}\n";
    } else if (r.status == EqResult::Status::Equal) {
      std::cout << "equal (worlds up to " << bound << " cells)\n";
    } else if (r.status == EqResult::Status::NotEqual) {
      std::cout << "not-equal: " << r.detail << "\n";
      if (r.witness_store) {
        std::cout << "  witness store:";
        for (const auto& [l, v] : r.witness_store->contents)
          std::cout << " #" << l << " = " << print_sem_value(v);
        std::cout << "\n";
      }
    } else {
      std::cout << "approximate: " << r.detail << "\n";
    }
    return r.status == EqResult::Status::Equal
               ? 0
               : (r.status == EqResult::Status::NotEqual ? 1 : 2);
  } catch (const LamrefError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}

int cmd_diff(const std::string& file1, const std::string& file2, int budget,
             uint64_t seed) {
  try {
    ParsedProgram p1 = parse_program(read_file(file1));
    ParsedProgram p2 = parse_program(read_file(file2));
    if (!same_signature(p1.sig, p2.sig))
      throw LamrefError("the two programs declare different signatures");
    if (!(p1.layout == p2.layout))
      throw LamrefError("the two programs assume different layouts");
    auto w = obs_diff(p1.sig, p1.layout, p1.term, p2.term, budget, seed);
    if (!w) {
      std::cout << "no distinguishing context within budget " << budget
                << "\n";
      return 0;
    }
    std::cout << "distinguished by " << w->context << "\n  heap " << w->heap
              << "\n  results " << w->value1 << " vs " << w->value2 << "\n";
    return 1;
  } catch (const LamrefError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}

int cmd_gen(uint64_t seed, int size, int count) {
  Signature sig = example_list_signature();
  for (int i = 0; i < count; ++i) {
    GeneratedTerm g = gen_well_typed(sig, size, seed + static_cast<uint64_t>(i));
    for (const auto& [name, ty] : sig.declarations())
      std::cout << "cell " << name << " = " << print_ground(ty) << ";\n";
    if (!g.layout.cells.empty()) {
      std::cout << "layout {";
      bool first = true;
      for (const auto& [l, s] : g.layout.cells) {
        if (!first) std::cout << ", ";
        first = false;
        std::cout << "#" << l << ":" << s;
      }
      std::cout << "}\n";
    }
    std::cout << print_term(g.term) << "\n";
    if (i + 1 < count) std::cout << "---\n";
  }
  return 0;
}

void emit(const TestReport& r, bool json, bool& all_ok) {
  std::cout << (json ? r.to_json() : r.to_text());
  if (json) std::cout << "\n";
  all_ok = all_ok && r.ok();
}

int cmd_laws(const std::string& suite, int bound, uint64_t seed, bool json) {
  Signature lists = example_list_signature();
  Signature consts = constant_bool_signature();
  bool all_ok = true;

  if (suite.empty() || suite == "monad") {
    TestReport r;
    r.suite = "monad-laws";
    r.bounds = "worlds <= " + std::to_string(bound);
    World base;
    base.cells[0] = "d";
    TypePtr b = Type::boolean();
    SemValue tt = SemValue::inj(1, SemValue::star());
    SemValue ff = SemValue::inj(2, SemValue::star());
    std::vector<MonadComp> ms = {
        t_return(consts, base, b, tt),
        t_mget(consts, base, 0),
    };
    {
      World w0;
      w0.cells[0] = "d";
      ms.push_back(t_bind(consts, t_mnew(consts, base, w0, {{0, ff}}), b,
                          [&](const World& at, const SemValue& l) {
                            return t_mget(consts, at, l.loc_index());
                          }));
    }
    TKleisli ret = [&](const World& at, const SemValue& x) {
      return t_return(consts, at, b, x);
    };
    TKleisli neg = [&](const World& at, const SemValue& x) {
      return t_return(consts, at, b, x == tt ? ff : tt);
    };
    for (const auto& m : ms) {
      ++r.instances;
      if (!equal_bounded(consts, t_bind(consts, m, b, ret), m, bound).equal())
        r.failures.push_back("right unit");
      for (const SemValue& x : {tt, ff}) {
        MonadComp lhs = t_bind(consts, t_return(consts, base, b, x), b, neg);
        if (!equal_bounded(consts, lhs, neg(base, x), bound).equal())
          r.failures.push_back("left unit");
      }
      MonadComp assoc_l =
          t_bind(consts, t_bind(consts, m, b, neg), b, neg);
      MonadComp assoc_r =
          t_bind(consts, m, b, [&](const World& at, const SemValue& x) {
            return t_bind(consts, neg(at, x), b, neg);
          });
      if (!equal_bounded(consts, assoc_l, assoc_r, bound).equal())
        r.failures.push_back("associativity");
    }
    emit(r, json, all_ok);
  }

  if (suite.empty() || suite == "hiding") {
    TestReport r;
    r.suite = "hiding-laws";
    r.bounds = "worlds <= " + std::to_string(bound);
    for (const auto& w : enumerate_worlds(consts, bound)) {
      for (const auto& s : enumerate_stores(consts, w)) {
        ++r.instances;
        PVal p = p_return(consts, w, SemValue::star(), s);
        if (!coend_equal(consts, p_hide(consts, Injection::identity(w), p), p))
          r.failures.push_back("hide(id) at " + print_world(w));
        // invertible unit: no private residue ever survives
        if (!p.store.world.cells.empty() && !(p.store.world == w))
          r.failures.push_back("unit not invertible at " + print_world(w));
      }
    }
    emit(r, json, all_ok);
  }

  if (suite.empty() || suite == "gs") {
    for (const auto& schema : equation_suite())
      emit(check_equation(schema, lists, bound), json, all_ok);
    TestReport control = check_equation(negative_control(), lists, bound);
    bool control_failed = !control.ok();
    TestReport meta;
    meta.suite = "negative-control (must fail)";
    meta.instances = control.instances;
    if (!control_failed)
      meta.failures.push_back("the wrong schema was not refuted");
    else
      meta.bounds = "refuted with: " + control.failures.front();
    emit(meta, json, all_ok);
  }

  if (suite.empty() || suite == "masking") {
    TestReport r;
    r.suite = "effect-masking";
    r.bounds = "generated boolean programs at the empty layout";
    Layout none;
    GenOptions opts;
    opts.allow_arrow_result = false;
    MaskingResult one = check_masking(
        consts, parse_term(consts, none, "let x = ref d true in true"));
    ++r.instances;
    if (!one.report.ok()) r.failures.push_back("the introduction equation");
    int found = 0;
    for (uint64_t s = seed; found < 50; ++s) {
      GeneratedTerm g = gen_well_typed(consts, 8, s, opts);
      if (!g.layout.cells.empty()) continue;
      if (!type_eq(g.type, Type::boolean())) continue;
      ++found;
      ++r.instances;
      MaskingResult m = check_masking(consts, g.term);
      if (!m.report.ok())
        r.failures.push_back(m.report.failures.front());
    }
    emit(r, json, all_ok);
  }

  if (suite.empty() || suite == "soundness") {
    TestReport total;
    total.suite = "soundness";
    total.bounds = "worlds <= 2 cells, all heaps, generated corpus";
    GenOptions opts;
    opts.allow_arrow_result = false;
    for (uint64_t s = seed; s < seed + 50; ++s) {
      GeneratedTerm g = gen_well_typed(lists, 9, s, opts);
      TestReport r = check_soundness(lists, g.layout, g.term, 2);
      total.instances += r.instances;
      for (const auto& f : r.failures) total.failures.push_back(f);
    }
    emit(total, json, all_ok);
  }

  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"An executable model of full ground reference cells"};
  app.require_subcommand(1);

  std::string file, file2, world_s, store_s, suite;
  bool dump = false, json = false;
  int bound = 3, size = 12, count = 1, budget = 50;
  uint64_t seed = 1;

  auto* check = app.add_subcommand("check", "typecheck a program");
  check->add_option("file", file)->required();
  check->add_flag("--dump-core", dump, "print the desugared core term");

  auto* run = app.add_subcommand("run", "evaluate a program");
  run->add_option("file", file)->required();
  run->add_flag("--dump-core", dump);

  auto* den = app.add_subcommand("denote", "print one denotation component");
  den->add_option("file", file)->required();
  den->add_option("--world", world_s, "component world, e.g. {#0:d}");
  den->add_option("--store", store_s, "store, e.g. {#0 = true}");

  auto* eq = app.add_subcommand("eq", "compare two programs denotationally");
  eq->add_option("file1", file)->required();
  eq->add_option("file2", file2)->required();
  eq->add_option("--bound", bound, "world size bound");
  eq->add_flag("--json", json);

  auto* laws = app.add_subcommand("laws", "run the law and theorem suites");
  laws->add_option("--suite", suite)
      ->check(CLI::IsMember({"monad", "hiding", "gs", "masking", "soundness"}));
  laws->add_option("--bound", bound);
  laws->add_option("--seed", seed);
  laws->add_flag("--json", json);

  auto* diff = app.add_subcommand("diff", "search for an observational witness");
  diff->add_option("file1", file)->required();
  diff->add_option("file2", file2)->required();
  diff->add_option("--budget", budget, "context budget");
  diff->add_option("--seed", seed);

  auto* gen = app.add_subcommand("gen", "generate well-typed programs");
  gen->add_option("--seed", seed);
  gen->add_option("--size", size);
  gen->add_option("--count", count);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(file, dump);
    if (run->parsed()) return cmd_run(file, dump);
    if (den->parsed()) return cmd_denote(file, world_s, store_s);
    if (eq->parsed()) return cmd_eq(file, file2, bound, json);
    if (laws->parsed()) return cmd_laws(suite, bound, seed, json);
    if (diff->parsed()) return cmd_diff(file, file2, budget, seed);
    if (gen->parsed()) return cmd_gen(seed, size, count);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
