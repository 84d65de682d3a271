#include "moka/abstract_domain.hpp"

#include "moka/encode.hpp"

namespace moka {

AbstractStackDomain::AbstractStackDomain(const TransitionSystem& ts, const StateAbstraction& dom,
                                         const FrameEquivalence& sim, BcaMode mode)
    : ts_(&ts), dom_(&dom), sim_(&sim), mode_(mode) {
  singleton_alpha_.resize(ts.num_states());
  for (std::size_t s = 0; s < ts.num_states(); ++s)
    singleton_alpha_[s] = dom.alpha_singleton(s);
}

bool AbstractStackDomain::equivalent(const AbstractStack& a, const AbstractStack& b) const {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(sim_->class_key(*dom_, a[i].sigma) == sim_->class_key(*dom_, b[i].sigma))) return false;
  return true;
}

void AbstractStackDomain::canonical_insert(Value& v, AbstractStack s) const {
  for (const auto& existing : v.stacks()) {
    if (!equivalent(existing, s)) continue;
    AbstractStack joined(existing.size());
    for (std::size_t i = 0; i < existing.size(); ++i)
      joined[i] = {dom_->join(existing[i].sigma, s[i].sigma),
                   dom_->join(existing[i].delta, s[i].delta)};
    if (joined == existing) return;
    v.remove(existing);
    v.insert_raw(std::move(joined));
    return;
  }
  v.insert_raw(std::move(s));
}

AbstractStackSet AbstractStackDomain::canonicalize(const std::vector<AbstractStack>& stacks) const {
  Value out;
  for (const auto& s : stacks) canonical_insert(out, s);
  return out;
}

AbstractStackSet AbstractStackDomain::join(const Value& a, const Value& b) const {
  Value out = a;
  for (const auto& s : b.stacks()) canonical_insert(out, s);
  return out;
}

std::vector<AbstractFrame> AbstractStackDomain::top_keys(const Value& v) const {
  std::vector<FrameKey> out;
  for (const auto& s : v.stacks()) out.push_back(s.front());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AbstractStackSet AbstractStackDomain::from_key(const FrameKey& k) const {
  Value v;
  v.insert_raw(AbstractStack{k});
  return v;
}

const std::vector<std::size_t>& AbstractStackDomain::realizable(Elem e) const {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = realizable_cache_.find(e);
  if (it != realizable_cache_.end()) return it->second;
  std::vector<std::size_t> states;
  auto key = sim_->class_key(*dom_, e);
  for (std::size_t s = 0; s < ts_->num_states(); ++s) {
    Elem a = singleton_alpha_[s];
    if (dom_->leq(a, e) && sim_->class_key(*dom_, a) == key) states.push_back(s);
  }
  return realizable_cache_.emplace(e, std::move(states)).first->second;
}

Elem AbstractStackDomain::realizable_join(Elem e) const {
  Elem out = dom_->bot();
  for (auto s : realizable(e)) out = dom_->join(out, singleton_alpha_[s]);
  return out;
}

Elem AbstractStackDomain::next_closed(Elem e) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = next_cache_.find(e);
    if (it != next_cache_.end()) return it->second;
  }
  Elem out = dom_->alpha(ts_->post(dom_->gamma(e)));
  std::lock_guard<std::mutex> lk(mu_);
  next_cache_.emplace(e, out);
  return out;
}

AbstractStackSet AbstractStackDomain::apply_basic(const std::string& name, const Value& v) const {
  return bca(name, v, mode_);
}

AbstractStackSet AbstractStackDomain::bca(const std::string& name, const Value& v,
                                          BcaMode mode) const {
  const Elem bot = dom_->bot();
  Value out;

  if (mode == BcaMode::Closed) {
    for (const auto& s : v.stacks()) {
      AbstractStack ns = s;
      AbstractFrame& top = ns.front();
      if (name == "push") {
        ns.insert(ns.begin(), top);
      } else if (name == "pop") {
        if (ns.size() <= 1) continue;
        ns.erase(ns.begin());
      } else if (name == "add") {
        top.delta = dom_->join(top.delta, top.sigma);
      } else if (name == "reset") {
        top.delta = bot;
      } else if (name == "loop?") {
        Elem m = dom_->meet(top.sigma, top.delta);
        if (m == bot) continue;
        top.sigma = m;
      } else if (name == "!loop?") {
        // the identity is a correct approximation of any filter
      } else if (name == "next") {
        top.sigma = next_closed(top.sigma);
      } else if (!name.empty() && name.back() == '?') {
        Elem sat = dom_->alpha(ts_->prop_states(name.substr(0, name.size() - 1)));
        Elem m = dom_->meet(top.sigma, sat);
        if (m == bot) continue;
        top.sigma = m;
      } else {
        throw UnknownBasicError("UnknownBasic: " + name);
      }
      canonical_insert(out, std::move(ns));
    }
    return out;
  }

  // Generic mode: alpha . f . gamma, computed per stack. Frame components
  // concretize to states whose singleton abstraction is equivalent and below
  // (sigma) and to subsets of the concretization (delta); re-abstraction
  // joins per equivalence class, so tails collapse to their realizable join
  // and tops are computed from the realizable states.
  for (const auto& s : v.stacks()) {
    bool dead = false;
    for (const auto& fr : s)
      if (realizable(fr.sigma).empty()) {
        dead = true;
        break;
      }
    if (dead) continue;

    AbstractStack tail;  // frames below the top, trimmed to realizable joins
    for (std::size_t i = 1; i < s.size(); ++i)
      tail.push_back({realizable_join(s[i].sigma), s[i].delta});

    const AbstractFrame top = s.front();
    const auto& r0 = realizable(top.sigma);

    auto emit_grouped = [&](const std::vector<std::pair<Elem, Elem>>& frames) {
      // joins sigma/delta pairs per class, emits one stack per class
      std::map<FrameEquivalence::ClassKey, AbstractFrame> groups;
      for (const auto& [sg, dl] : frames) {
        auto key = sim_->class_key(*dom_, sg);
        auto [it, fresh] = groups.emplace(key, AbstractFrame{sg, dl});
        if (!fresh)
          it->second = {dom_->join(it->second.sigma, sg), dom_->join(it->second.delta, dl)};
      }
      for (auto& [key, fr] : groups) {
        AbstractStack ns;
        ns.push_back(fr);
        ns.insert(ns.end(), tail.begin(), tail.end());
        canonical_insert(out, std::move(ns));
      }
    };

    if (name == "pop") {
      if (s.size() <= 1) continue;
      canonical_insert(out, tail);
      continue;
    }
    if (name == "push") {
      Elem rj = realizable_join(top.sigma);
      AbstractStack ns{AbstractFrame{rj, top.delta}, AbstractFrame{rj, top.delta}};
      ns.insert(ns.end(), tail.begin(), tail.end());
      canonical_insert(out, std::move(ns));
      continue;
    }
    if (name == "next") {
      std::vector<std::pair<Elem, Elem>> frames;
      for (auto st : r0)
        ts_->successors(st).for_each(
            [&](std::size_t succ) { frames.push_back({singleton_alpha_[succ], top.delta}); });
      emit_grouped(frames);
      continue;
    }
    if (name == "add") {
      std::vector<std::pair<Elem, Elem>> frames;
      for (auto st : r0)
        frames.push_back(
            {singleton_alpha_[st], dom_->join(top.delta, singleton_alpha_[st])});
      emit_grouped(frames);
      continue;
    }
    if (name == "reset") {
      std::vector<std::pair<Elem, Elem>> frames;
      for (auto st : r0) frames.push_back({singleton_alpha_[st], bot});
      emit_grouped(frames);
      continue;
    }
    if (name == "loop?") {
      Bitset trace = dom_->gamma(top.delta);
      std::vector<std::pair<Elem, Elem>> frames;
      for (auto st : r0)
        if (trace.test(st)) frames.push_back({singleton_alpha_[st], top.delta});
      emit_grouped(frames);
      continue;
    }
    if (name == "!loop?") {
      Bitset trace = dom_->gamma(top.delta);
      std::vector<std::pair<Elem, Elem>> frames;
      for (auto st : r0) {
        Bitset rest = trace;
        if (rest.test(st)) rest.reset(st);
        frames.push_back({singleton_alpha_[st], rest.empty() ? bot : dom_->alpha(rest)});
      }
      emit_grouped(frames);
      continue;
    }
    if (!name.empty() && name.back() == '?') {
      Bitset sat = ts_->prop_states(name.substr(0, name.size() - 1));
      std::vector<std::pair<Elem, Elem>> frames;
      for (auto st : r0)
        if (sat.test(st)) frames.push_back({singleton_alpha_[st], top.delta});
      emit_grouped(frames);
      continue;
    }
    throw UnknownBasicError("UnknownBasic: " + name);
  }
  return out;
}

bool AbstractStackDomain::stack_leq(const Value& a, const Value& b) const {
  for (const auto& x : a.stacks()) {
    bool found = false;
    for (const auto& y : b.stacks()) {
      if (!equivalent(x, y)) continue;
      bool le = true;
      for (std::size_t i = 0; i < x.size() && le; ++i)
        le = dom_->leq(x[i].sigma, y[i].sigma) && dom_->leq(x[i].delta, y[i].delta);
      if (le) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::string AbstractStackDomain::render(const Value& v) const {
  std::string out = "{";
  bool first_stack = true;
  for (const auto& s : v.stacks()) {
    if (!first_stack) out += "; ";
    first_stack = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += " :: ";
      out += "<" + dom_->element_name(s[i].sigma) + "|" + dom_->element_name(s[i].delta) + ">";
    }
  }
  return out + "}";
}

AbstractStackSet stack_alpha(const StackSet& s, const AbstractStackDomain& dom) {
  std::vector<AbstractStack> raw;
  const auto& A = dom.state_abstraction();
  for (const auto& st : s.stacks()) {
    AbstractStack as;
    as.reserve(st.size());
    for (const auto& fr : st)
      as.push_back({dom.singleton_alpha(fr.current),
                    fr.trace.empty() ? A.bot() : A.alpha(fr.trace)});
    raw.push_back(std::move(as));
  }
  return dom.canonicalize(raw);
}

StackSet stack_gamma(const AbstractStackSet& t, const AbstractStackDomain& dom) {
  const auto& A = dom.state_abstraction();
  const auto& ts = dom.ts();
  std::vector<Stack> collected;
  for (const auto& s : t.stacks()) {
    // per frame: realizable current states x trace subsets
    std::vector<std::vector<Frame>> options;
    double combos = 1;
    for (const auto& fr : s) {
      std::vector<Frame> opts;
      auto trace_states = A.gamma(fr.delta).members();
      if (trace_states.size() > 20)
        throw AbstractionError("trace concretization too large to enumerate");
      for (auto st : dom.realizable(fr.sigma)) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << trace_states.size()); ++mask) {
          Bitset tr(ts.num_states());
          for (std::size_t i = 0; i < trace_states.size(); ++i)
            if (mask & (std::size_t{1} << i)) tr.set(trace_states[i]);
          opts.push_back(Frame{st, std::move(tr)});
        }
      }
      combos *= static_cast<double>(opts.size());
      if (combos > 1e6) throw AbstractionError("concretization too large to enumerate");
      options.push_back(std::move(opts));
    }
    // cartesian product over frame positions
    std::vector<std::size_t> idx(options.size(), 0);
    if (std::any_of(options.begin(), options.end(), [](auto& o) { return o.empty(); })) continue;
    while (true) {
      Stack st;
      for (std::size_t i = 0; i < options.size(); ++i) st.push_back(options[i][idx[i]]);
      collected.push_back(std::move(st));
      std::size_t i = 0;
      for (; i < options.size(); ++i) {
        if (++idx[i] < options[i].size()) break;
        idx[i] = 0;
      }
      if (i == options.size()) break;
    }
  }
  return StackSet(std::move(collected));
}

AbstractStackSet eval_abstract(const TermPtr& program, const AbstractStackSet& input,
                               const AbstractStackDomain& dom, EvalOptions opts) {
  Evaluator<AbstractStackDomain> ev(dom, opts);
  return ev.eval(program, input);
}

AbstractVerdict check_abstract(const FormulaPtr& f, Dialect dialect, const TransitionSystem& ts,
                               const StateAbstraction& dom, const FrameEquivalence& sim,
                               const Bitset& init, BcaMode mode, EvalOptions opts) {
  AbstractStackDomain adom(ts, dom, sim, mode);
  TermPtr prog = encode(f, dialect);
  AbstractStackSet out = eval_abstract(prog, stack_alpha(lift_states(init, ts), adom), adom, opts);
  AbstractVerdict v;
  v.proved = out.empty();
  v.output = out;
  v.candidates = Bitset(ts.num_states());
  for (const auto& s : out.stacks()) v.candidates |= dom.gamma(s.front().sigma);
  return v;
}

}  // namespace moka
