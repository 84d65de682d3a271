#pragma once

#include <fstream>
#include <random>
#include <sstream>

#include "moka/abstract_domain.hpp"
#include "moka/lcl.hpp"
#include "moka/semantics.hpp"

namespace testutil {

using namespace moka;

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string fixture(const std::string& name) {
  return std::string(MOKA_FIXTURE_DIR) + "/" + name;
}

inline TransitionSystem light() { return parse_ts(slurp(fixture("light.json"))); }

inline std::shared_ptr<StateAbstraction> figure1(const TransitionSystem& ts) {
  return load_state_abstraction(slurp(fixture("figure1.json")), ts);
}

inline TransitionSystem program_c(int k = 2) {
  return cfg_to_ts(parse_cfg(slurp(fixture("cfg_c.json")), k));
}

inline std::shared_ptr<StateAbstraction> preds_pq(const TransitionSystem& ts) {
  return build_predicate_abstraction(slurp(fixture("preds.json")), ts);
}

inline Bitset states(const TransitionSystem& ts, const std::vector<std::string>& names) {
  return ts.states_from_names(names);
}

// the element whose concretization is exactly the given state set
inline Elem elem_of(const StateAbstraction& A, const TransitionSystem& ts,
                    const std::vector<std::string>& names) {
  Bitset b = ts.states_from_names(names);
  Elem e = A.alpha(b);
  REQUIRE(A.gamma(e) == b);
  return e;
}

// --- random systems ---

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  int upto(int n) { return static_cast<int>(gen() % static_cast<std::uint64_t>(n)); }
  bool flip() { return gen() & 1; }
};

// total transition system with <= max_states states and <= 3 propositions
inline TransitionSystem random_system(Rng& rng, int max_states = 6) {
  int n = 2 + rng.upto(max_states - 1);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("q" + std::to_string(i));
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n; ++i) {
    int succs = 1 + rng.upto(2);
    for (int j = 0; j < succs; ++j) edges.emplace_back(names[i], names[rng.upto(n)]);
  }
  std::map<std::string, std::vector<std::string>> labels;
  const char* props[3] = {"pa", "pb", "pc"};
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> ps;
    for (auto* p : props)
      if (rng.flip()) ps.push_back(p);
    labels[names[i]] = ps;
  }
  // every proposition name must be declared somewhere so lookups resolve
  for (auto* p : props) labels[names[0]].push_back(std::string("!") + p);
  auto& l0 = labels[names[0]];
  std::sort(l0.begin(), l0.end());
  for (auto it = l0.begin(); it != l0.end();) {
    if (it->front() == '!' && std::find(l0.begin(), l0.end(), it->substr(1)) != l0.end())
      it = l0.erase(it);
    else
      ++it;
  }
  return make_ts(names, edges, labels, {names[0]});
}

struct GenOptions {
  std::vector<std::string> props{"pa", "pb", "pc"};
};

inline FormulaPtr random_formula(Rng& rng, Dialect d, int depth, const GenOptions& gen = {});

inline FormulaPtr random_atom(Rng& rng, const GenOptions& gen = {}) {
  const auto& p = gen.props[rng.upto(static_cast<int>(gen.props.size()))];
  return rng.flip() ? Formula::atom(p) : Formula::neg_atom(p);
}

inline PdlProgPtr random_prog(Rng& rng, int depth, const GenOptions& gen = {}) {
  if (depth <= 0) return PdlProg::next();
  switch (rng.upto(5)) {
    case 0: return PdlProg::seq(random_prog(rng, depth - 1, gen), random_prog(rng, depth - 1, gen));
    case 1: return PdlProg::choice(random_prog(rng, depth - 1, gen), random_prog(rng, depth - 1, gen));
    case 2: return PdlProg::star(random_prog(rng, depth - 1, gen));
    case 3: {
      // existential test formula
      FormulaPtr t = rng.flip() ? random_atom(rng, gen)
                                : Formula::pdl_diamond(PdlProg::next(), random_atom(rng, gen));
      return PdlProg::test(t);
    }
    default: return PdlProg::next();
  }
}

inline FormulaPtr random_formula(Rng& rng, Dialect d, int depth, const GenOptions& gen) {
  if (depth <= 0) return random_atom(rng, gen);
  switch (d) {
    case Dialect::Actl:
      switch (rng.upto(8)) {
        case 0: return Formula::conj(random_formula(rng, d, depth - 1, gen), random_formula(rng, d, depth - 1, gen));
        case 1: return Formula::disj(random_formula(rng, d, depth - 1, gen), random_formula(rng, d, depth - 1, gen));
        case 2: return Formula::ax(random_formula(rng, d, depth - 1, gen));
        case 3: return Formula::af(random_formula(rng, d, depth - 1, gen));
        case 4: return Formula::ag(random_formula(rng, d, depth - 1, gen));
        case 5: return Formula::au(random_formula(rng, d, depth - 1, gen), random_formula(rng, d, depth - 1, gen));
        case 6: return rng.flip() ? Formula::t() : Formula::f();
        default: return random_atom(rng, gen);
      }
    case Dialect::Mu:
      switch (rng.upto(8)) {
        case 0: return Formula::conj(random_formula(rng, d, depth - 1, gen), random_formula(rng, d, depth - 1, gen));
        case 1: return Formula::disj(random_formula(rng, d, depth - 1, gen), random_formula(rng, d, depth - 1, gen));
        case 2: return Formula::box(random_formula(rng, d, depth - 1, gen));
        case 3:
        case 4: {
          // closed single-variable fixpoint: body mixes the variable with
          // closed subformulas through the universal connectives
          static int ctr = 0;
          std::string x = "v" + std::to_string(++ctr);
          FormulaPtr leaf = random_atom(rng, gen);
          FormulaPtr use = Formula::box(Formula::var(x));
          FormulaPtr body = rng.flip() ? Formula::conj(leaf, use) : Formula::disj(leaf, use);
          if (rng.flip()) body = Formula::conj(body, random_formula(rng, d, depth - 1, gen));
          return rng.upto(2) == 0 ? Formula::mu(x, body) : Formula::nu(x, body);
        }
        case 5: return rng.flip() ? Formula::t() : Formula::f();
        default: return random_atom(rng, gen);
      }
    case Dialect::Pdl:
      switch (rng.upto(6)) {
        case 0: return Formula::conj(random_formula(rng, d, depth - 1, gen), random_formula(rng, d, depth - 1, gen));
        case 1: return Formula::disj(random_formula(rng, d, depth - 1, gen), random_formula(rng, d, depth - 1, gen));
        case 2:
        case 3: return Formula::pdl_box(random_prog(rng, depth - 1, gen), random_formula(rng, d, depth - 1, gen));
        case 4: return rng.flip() ? Formula::t() : Formula::f();
        default: return random_atom(rng, gen);
      }
  }
  return random_atom(rng, gen);
}

// random Moore family over the states of ts (k seed sets, intersection-closed)
inline std::shared_ptr<StateAbstraction> random_domain(Rng& rng, const TransitionSystem& ts,
                                                       int seeds = 3) {
  std::vector<std::pair<std::string, Bitset>> named;
  for (int i = 0; i < seeds; ++i) {
    Bitset b(ts.num_states());
    for (std::size_t s = 0; s < ts.num_states(); ++s)
      if (rng.flip()) b.set(s);
    named.emplace_back("g" + std::to_string(i), b);
  }
  std::vector<std::string> point_names(ts.num_states());
  for (std::size_t s = 0; s < ts.num_states(); ++s) point_names[s] = ts.name(s);
  return std::make_shared<MooreTableAbstraction>(ts.num_states(), std::move(named), true,
                                                 std::move(point_names));
}

// id, total, or a two-class split below a random element (always compatible)
inline FrameEquivalence random_equivalence(Rng& rng, const StateAbstraction& dom) {
  switch (rng.upto(3)) {
    case 0: return FrameEquivalence::id();
    case 1: return FrameEquivalence::total();
    default: {
      Elem t = rng.upto(static_cast<int>(dom.family_size()));
      std::vector<std::string> below, above;
      for (Elem e = 0; e < static_cast<Elem>(dom.family_size()); ++e)
        (dom.leq(e, t) ? below : above).push_back(dom.element_name(e));
      std::vector<std::vector<std::string>> classes;
      if (!below.empty()) classes.push_back(below);
      if (!above.empty()) classes.push_back(above);
      auto sim = FrameEquivalence::from_classes(classes);
      std::string why;
      REQUIRE(sim.validate(dom, &why));
      return sim;
    }
  }
}

inline StackSet random_stackset(Rng& rng, const TransitionSystem& ts, int max_stacks = 4,
                                int max_depth = 3) {
  StackSet out;
  int count = rng.upto(max_stacks + 1);
  for (int i = 0; i < count; ++i) {
    int depth = 1 + rng.upto(max_depth);
    Stack st;
    for (int d = 0; d < depth; ++d) {
      Bitset trace(ts.num_states());
      for (std::size_t s = 0; s < ts.num_states(); ++s)
        if (rng.upto(4) == 0) trace.set(s);
      st.push_back(Frame{static_cast<std::size_t>(rng.upto(static_cast<int>(ts.num_states()))),
                         std::move(trace)});
    }
    out.insert(std::move(st));
  }
  return out;
}

}  // namespace testutil
