#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"

using namespace moka;
using namespace testutil;

namespace {

// powerset of {a,b,c} with the published non-additive function u
SetDomain non_additive_domain() {
  SetDomain d(3);
  d.define("u", [](const Bitset& s) {
    Bitset ab(3);
    ab.set(0);
    ab.set(1);
    Bitset b(3);
    b.set(1);
    return (s == ab || s == Bitset::full(3)) ? Bitset::full(3) : b;
  });
  return d;
}

Bitset set_of(std::initializer_list<std::size_t> xs, std::size_t n = 3) {
  Bitset b(n);
  for (auto x : xs) b.set(x);
  return b;
}

// random monotone functions on P({0,1,2}): additive ones from a successor
// table, a non-additive one by thresholding
void define_random_basics(SetDomain& d, Rng& rng, bool additive_only) {
  for (const char* name : {"f", "g", "h"}) {
    std::vector<Bitset> img(3, Bitset(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (rng.flip()) img[i].set(j);
    d.define(name, [img](const Bitset& s) {
      Bitset out(3);
      s.for_each([&](std::size_t i) { out |= img[i]; });
      return out;
    });
  }
  if (!additive_only) {
    d.define("h", [](const Bitset& s) {
      // monotone but not additive: jumps to full at two or more elements
      return s.count() >= 2 ? Bitset::full(3) : (s.empty() ? Bitset(3) : set_of({1}));
    });
  }
}

TermPtr random_term(Rng& rng, int depth, bool with_var, const std::string& var) {
  if (depth <= 0) {
    switch (rng.upto(with_var ? 5 : 4)) {
      case 0: return Term::one();
      case 1: return Term::basic("f");
      case 2: return Term::basic("g");
      case 3: return Term::basic("h");
      default: return Term::var(var);
    }
  }
  switch (rng.upto(4)) {
    case 0: return Term::seq(random_term(rng, depth - 1, with_var, var),
                             random_term(rng, depth - 1, with_var, var));
    case 1: return Term::choice(random_term(rng, depth - 1, with_var, var),
                                random_term(rng, depth - 1, with_var, var));
    case 2: return Term::star(random_term(rng, depth - 1, false, var));
    default: return random_term(rng, 0, with_var, var);
  }
}

}  // namespace

TEST_CASE("parser and printer round-trip") {
  for (const char* text : {
           "push; next*; rd?; pop",
           "1 (+) next; loop?",
           "mu X. (loop? (+) add; next; X)",
           "push; reset; mu X. (loop? (+) add; g?; push; next; !d?; pop); pop",
           "0",
           "(a? (+) b?)*",
       }) {
    auto t = parse_term(text);
    CHECK(*parse_term(to_string(t)) == *t);
  }
  CHECK(to_string(parse_term("push ;next * ;rd? ;pop")) == "push; next*; rd?; pop");
  CHECK_THROWS_AS(parse_term("push;;"), TermError);
}

TEST_CASE("identity and divergence") {
  auto ts = light();
  ConcreteStackDomain dom(ts);
  ConcreteEvaluator ev(dom);
  auto s = lift_states(states(ts, {"rs", "gs"}), ts);
  CHECK(ev.eval(Term::one(), s) == s);
  CHECK(ev.eval(Term::zero(), s).empty());
}

TEST_CASE("substitution") {
  auto one = Term::one();
  CHECK(*substitute(Term::var("X"), "X", one) == *one);

  auto bound = Term::mu("X", Term::seq(Term::basic("next"), Term::var("X")));
  CHECK(*substitute(bound, "X", one) == *bound);

  SUBCASE("capture is avoided by renaming the binder") {
    // substituting a term whose free variable collides with the binder
    auto t = Term::mu("Y", Term::seq(Term::var("X"), Term::var("Y")));
    auto s = Term::var("Y");
    auto r = substitute(t, "X", s);
    CHECK(r->kind == Term::Kind::Mu);
    CHECK(r->name != "Y");  // renamed binder
    CHECK(free_vars(r) == std::set<std::string>{"Y"});
  }

  SUBCASE("semantic substitution law on random terms") {
    Rng rng(23);
    for (int round = 0; round < 60; ++round) {
      SetDomain d(3);
      define_random_basics(d, rng, true);
      auto body = random_term(rng, 2, true, "X");
      auto repl = random_term(rng, 2, false, "X");
      Bitset input(3);
      for (int i = 0; i < 3; ++i)
        if (rng.flip()) input.set(i);

      Evaluator<SetDomain> ev_subst(d);
      Bitset via_subst = ev_subst.eval(substitute(body, "X", repl), input);

      Evaluator<SetDomain>::Env env;
      env["X"] = [&](const Bitset& v) {
        Evaluator<SetDomain> inner(d);
        return inner.eval(repl, v);
      };
      Evaluator<SetDomain> ev_env(d, {}, env);
      Bitset via_env = ev_env.eval(body, input);
      CHECK(via_subst == via_env);
    }
  }
}

TEST_CASE("star equals its fixpoint encodings") {
  Rng rng(31);
  int checked = 0;
  for (int round = 0; round < 200; ++round) {
    SetDomain d(3);
    bool additive = rng.flip();
    define_random_basics(d, rng, additive);
    auto r = random_term(rng, 2, false, "X");
    Bitset input(3);
    for (int i = 0; i < 3; ++i)
      if (rng.flip()) input.set(i);

    EvalOptions opts;
    opts.strategy = FixpointStrategy::BoundedUnfold;
    Evaluator<SetDomain> ev(d, opts);
    Bitset star = ev.eval(Term::star(r), input);

    // r* = mu X. (1 (+) r; X), unconditionally
    auto mu1 = Term::mu("X", Term::choice(Term::one(), Term::seq(r, Term::var("X"))));
    CHECK(ev.eval(mu1, input) == star);

    // r* = mu X. (1 (+) X; r) for additive semantics
    if (additive) {
      auto mu2 = Term::mu("X", Term::choice(Term::one(), Term::seq(Term::var("X"), r)));
      CHECK(ev.eval(mu2, input) == star);
      ++checked;
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("the published non-additive counterexample reproduces exactly") {
  auto d = non_additive_domain();
  EvalOptions opts;
  opts.strategy = FixpointStrategy::BoundedUnfold;
  Evaluator<SetDomain> ev(d, opts);

  Bitset a = set_of({0});
  CHECK(ev.eval(Term::star(Term::basic("u")), a) == set_of({0, 1}));

  auto mu_xr = Term::mu("X", Term::choice(Term::one(), Term::seq(Term::var("X"),
                                                                 Term::basic("u"))));
  CHECK(ev.eval(mu_xr, a) == Bitset::full(3));

  auto mu_rx = Term::mu("X", Term::choice(Term::one(), Term::seq(Term::basic("u"),
                                                                 Term::var("X"))));
  CHECK(ev.eval(mu_rx, a) == set_of({0, 1}));
}

TEST_CASE("additivity of eval for additive basics") {
  Rng rng(41);
  for (int round = 0; round < 80; ++round) {
    SetDomain d(3);
    define_random_basics(d, rng, true);
    auto r = random_term(rng, 2, false, "X");
    Bitset x(3), y(3);
    for (int i = 0; i < 3; ++i) {
      if (rng.flip()) x.set(i);
      if (rng.flip()) y.set(i);
    }
    EvalOptions opts;
    opts.strategy = FixpointStrategy::BoundedUnfold;
    Evaluator<SetDomain> ev(d, opts);
    CHECK(ev.eval(r, x | y) == (ev.eval(r, x) | ev.eval(r, y)));
  }
}

TEST_CASE("monotonicity of eval in the input") {
  Rng rng(43);
  for (int round = 0; round < 80; ++round) {
    SetDomain d(3);
    define_random_basics(d, rng, rng.flip());
    auto r = random_term(rng, 2, false, "X");
    Bitset x(3), y(3);
    for (int i = 0; i < 3; ++i) {
      if (rng.flip()) x.set(i);
      if (rng.flip()) y.set(i);
    }
    y |= x;  // x subset y
    EvalOptions opts;
    opts.strategy = FixpointStrategy::BoundedUnfold;
    Evaluator<SetDomain> ev(d, opts);
    CHECK(ev.eval(r, x).subset_of(ev.eval(r, y)));
  }
}

TEST_CASE("approximants") {
  auto ts = light();
  ConcreteStackDomain dom(ts);

  auto prog = encode(parse_formula("nu x. ((g -> [] d) & [] x)", Dialect::Mu), Dialect::Mu);
  REQUIRE(prog->kind == Term::Kind::Mu);

  CHECK_THROWS_AS(approximant(Term::one(), 1), TermError);

  SUBCASE("the 0-th approximant is divergence") {
    ConcreteEvaluator ev(dom);
    auto s = lift_states(Bitset::full(ts.num_states()), ts);
    CHECK(ev.eval(approximant(prog, 0), s).empty());
  }

  SUBCASE("the first approximant drops the recursive branch") {
    // mu X. (r1 (+) push; next; X; pop): approximant 1 behaves like r1
    auto r1 = prog->lhs->lhs;
    ConcreteEvaluator ev(dom);
    for (auto name : {"rs", "gs", "gd", "yd", "ys", "rd"}) {
      auto s = lift_states(states(ts, {name}), ts);
      CHECK(ev.eval(approximant(prog, 1), s) == ev.eval(r1, s));
    }
  }

  SUBCASE("approximants unfold through substitution") {
    ConcreteEvaluator ev(dom);
    auto s = lift_states(Bitset::full(ts.num_states()), ts);
    for (int n = 0; n <= 4; ++n) {
      auto direct = ev.eval(approximant(prog, n + 1), s);
      auto unfolded = substitute(prog->lhs, prog->name, approximant(prog, n));
      CHECK(direct == ev.eval(unfolded, s));
    }
  }

  SUBCASE("approximant values ascend to the fixpoint") {
    ConcreteEvaluator ev(dom);
    auto s = lift_states(Bitset::full(ts.num_states()), ts);
    StackSet full = ev.eval(prog, s);
    StackSet prev = ev.eval(approximant(prog, 0), s);
    for (int n = 1; n <= 8; ++n) {
      StackSet cur = ev.eval(approximant(prog, n), s);
      CHECK(prev.subset_of(cur));
      CHECK(cur.subset_of(full));
      prev = cur;
    }
    CHECK(prev == full);
  }
}

TEST_CASE("fixpoint strategies") {
  auto ts = light();
  ConcreteStackDomain dom(ts);

  SUBCASE("unbound variables are reported") {
    ConcreteEvaluator ev(dom);
    CHECK_THROWS_AS(ev.eval(Term::var("X"), lift_states(ts.init(), ts)), UnboundVariableError);
  }

  SUBCASE("unknown basics are reported") {
    ConcreteEvaluator ev(dom);
    CHECK_THROWS_AS(ev.eval(Term::basic("warp"), lift_states(ts.init(), ts)), UnknownBasicError);
  }

  SUBCASE("the memo strategy rejects non-frame-local bodies") {
    // unbalanced pushes: X under push without a closing pop
    auto bad = Term::mu("X", Term::choice(Term::one(), Term::seq(Term::basic("push"),
                                                                 Term::var("X"))));
    CHECK_FALSE(frame_local(bad->lhs));
    EvalOptions opts;
    opts.strategy = FixpointStrategy::FrameLocalMemo;
    ConcreteEvaluator ev(dom, opts);
    CHECK_THROWS_AS(ev.eval(bad, lift_states(ts.init(), ts)), NonFrameLocalError);
  }

  SUBCASE("formula bodies pass the locality gate") {
    auto f = parse_formula("nu x. ((g -> [] d) & [] x)", Dialect::Mu);
    auto prog = encode(f, Dialect::Mu);
    CHECK(frame_local(prog->lhs));
    auto f2 = parse_formula("mu x. (d | [] x)", Dialect::Mu);
    auto prog2 = encode(f2, Dialect::Mu);  // push; reset; mu X. (...); pop
    CHECK(prog2->rhs->name == "pop");
  }

  SUBCASE("a tiny unfold budget is reported") {
    SetDomain d(3);
    d.define("grow", [](const Bitset& s) {
      Bitset out = s;
      for (std::size_t i = 0; i < 2; ++i)
        if (s.test(i)) out.set(i + 1);
      return out;
    });
    EvalOptions opts;
    opts.strategy = FixpointStrategy::BoundedUnfold;
    opts.unfold_limit = 1;
    Evaluator<SetDomain> ev(d, opts);
    auto t = Term::mu("X", Term::choice(Term::one(), Term::seq(Term::basic("grow"),
                                                               Term::var("X"))));
    Bitset a(3);
    a.set(0);
    CHECK_THROWS_AS(ev.eval(t, a), UnfoldBudgetError);
  }

  SUBCASE("memo and unfold agree on formula encodings") {
    Rng rng(59);
    for (int round = 0; round < 30; ++round) {
      auto sys = random_system(rng, 4);
      auto f = random_formula(rng, Dialect::Mu, 2);
      auto prog = encode(f, Dialect::Mu);
      ConcreteStackDomain d(sys);
      EvalOptions memo_opts;
      memo_opts.strategy = FixpointStrategy::Auto;
      EvalOptions unfold_opts;
      unfold_opts.strategy = FixpointStrategy::BoundedUnfold;
      ConcreteEvaluator ev1(d, memo_opts), ev2(d, unfold_opts);
      auto input = lift_states(Bitset::full(sys.num_states()), sys);
      CHECK(ev1.eval(prog, input) == ev2.eval(prog, input));
    }
  }
}
