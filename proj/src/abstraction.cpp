#include "moka/abstraction.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"

namespace moka {

using nlohmann::json;

Elem StateAbstraction::alpha_singleton(std::size_t state) const {
  Bitset b(num_states());
  b.set(state);
  return alpha(b);
}

Elem StateAbstraction::alpha_of_states(const std::vector<std::size_t>& states) const {
  Bitset b(num_states());
  for (auto s : states) b.set(s);
  return alpha(b);
}

FiniteLattice StateAbstraction::to_lattice() const {
  auto gs = all_gammas();
  if (gs.size() > 4096) throw AbstractionError("family too large for an explicit lattice view");
  return lattice_from_order(gs.size(), [gs](Elem a, Elem b) { return gs[a].subset_of(gs[b]); });
}

// --- MooreTableAbstraction ---

std::string MooreTableAbstraction::render_set(const Bitset& b) const {
  std::string out = "{";
  bool first = true;
  b.for_each([&](std::size_t s) {
    if (!first) out += ",";
    out += s < point_names_.size() ? point_names_[s] : std::to_string(s);
    first = false;
  });
  return out + "}";
}

MooreTableAbstraction::MooreTableAbstraction(std::size_t num_states,
                                             std::vector<std::pair<std::string, Bitset>> named,
                                             bool auto_close,
                                             std::vector<std::string> point_names)
    : MooreTableAbstraction(num_states, std::move(named),
                            auto_close ? Closure::Close : Closure::Check,
                            std::move(point_names)) {}

MooreTableAbstraction::MooreTableAbstraction(std::size_t num_states,
                                             std::vector<std::pair<std::string, Bitset>> named,
                                             Closure closure,
                                             std::vector<std::string> point_names)
    : nstates_(num_states), point_names_(std::move(point_names)) {
  auto add = [&](const Bitset& g, const std::string& name) -> Elem {
    auto it = index_.find(g);
    if (it != index_.end()) return it->second;
    Elem e = static_cast<Elem>(gammas_.size());
    gammas_.push_back(g);
    names_.push_back(name.empty() ? render_set(g) : name);
    index_.emplace(g, e);
    return e;
  };

  for (auto& [name, g] : named) {
    if (g.universe() != nstates_) throw AbstractionError("element universe mismatch: " + name);
    add(g, name);
  }
  add(Bitset::full(nstates_), "top");
  add(Bitset(nstates_), "bot");

  if (closure == Closure::Close) {
    // close under pairwise intersections, naming meets from their parents
    bool grew = true;
    while (grew) {
      grew = false;
      std::size_t n = gammas_.size();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          Bitset m = gammas_[i] & gammas_[j];
          if (!index_.count(m)) {
            add(m, names_[i] + "&" + names_[j]);
            grew = true;
          }
        }
    }
  } else if (closure == Closure::Check) {
    std::size_t n = gammas_.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Bitset m = gammas_[i] & gammas_[j];
        if (!index_.count(m))
          throw AbstractionError("NotMooreClosed: missing intersection of " + names_[i] +
                                 " and " + names_[j]);
      }
  }

  bot_ = index_.at(Bitset(nstates_));
  top_ = index_.at(Bitset::full(nstates_));
}

Elem MooreTableAbstraction::alpha(const Bitset& states) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = alpha_cache_.find(states);
    if (it != alpha_cache_.end()) return it->second;
  }
  Bitset inter = Bitset::full(nstates_);
  for (const auto& g : gammas_)
    if (states.subset_of(g)) inter &= g;
  auto it = index_.find(inter);
  if (it == index_.end()) throw AbstractionError("family is not intersection-closed");
  std::lock_guard<std::mutex> lk(mu_);
  alpha_cache_.emplace(states, it->second);
  return it->second;
}

Elem MooreTableAbstraction::join(Elem a, Elem b) const {
  if (leq(a, b)) return b;
  if (leq(b, a)) return a;
  return alpha(gammas_[a] | gammas_[b]);
}

Elem MooreTableAbstraction::meet(Elem a, Elem b) const {
  Bitset m = gammas_[a] & gammas_[b];
  auto it = index_.find(m);
  if (it == index_.end()) throw AbstractionError("family is not intersection-closed");
  return it->second;
}

std::optional<Elem> MooreTableAbstraction::element_by_name(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<Elem>(i);
  return std::nullopt;
}

// --- ProductPredicateAbstraction ---

ProductPredicateAbstraction::ProductPredicateAbstraction(
    const TransitionSystem& ts, std::vector<std::pair<std::string, Bitset>> env_preds,
    std::vector<std::pair<std::string, Bitset>> env_elements)
    : nstates_(ts.num_states()) {
  if (!ts.cfg_info()) throw AbstractionError("per-node abstraction requires a CFG-built system");
  const auto& info = *ts.cfg_info();
  nodes_ = info.nodes;
  nnodes_ = info.nodes.size();
  if (nnodes_ > 64) throw AbstractionError("too many program points");
  nenv_ = 1;
  for (std::size_t i = 0; i < info.vars.size(); ++i) nenv_ *= info.modulus;

  node_of_.assign(nstates_, 0);
  env_index_of_.assign(nstates_, 0);
  for (std::size_t s = 0; s < nstates_; ++s) {
    node_of_[s] = info.node_of[s];
    std::size_t idx = 0;
    for (int v : info.env_of[s]) idx = idx * info.modulus + v;
    env_index_of_[s] = idx;
  }

  // complement predicates, then conjunction closure; extra elements join the
  // family as given
  std::vector<std::pair<std::string, Bitset>> named = env_preds;
  for (auto& [name, envs] : env_preds)
    named.emplace_back("!" + name, Bitset::full(nenv_) - envs);
  named.insert(named.end(), env_elements.begin(), env_elements.end());
  base_ = std::make_unique<MooreTableAbstraction>(nenv_, std::move(named), true);

  bot_ = intern(std::vector<Elem>(nnodes_, base_->bot()));
  top_ = intern(std::vector<Elem>(nnodes_, base_->top()));
}

Elem ProductPredicateAbstraction::intern(std::vector<Elem> t) const {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = intern_.find(t);
  if (it != intern_.end()) return it->second;
  Elem e = static_cast<Elem>(tuples_.size());
  tuples_.push_back(t);
  gamma_cache_.push_back(std::nullopt);
  intern_.emplace(std::move(t), e);
  return e;
}

Elem ProductPredicateAbstraction::alpha(const Bitset& states) const {
  std::vector<Bitset> envs(nnodes_, Bitset(nenv_));
  states.for_each([&](std::size_t s) { envs[node_of_[s]].set(env_index_of_[s]); });
  std::vector<Elem> t(nnodes_);
  for (std::size_t n = 0; n < nnodes_; ++n)
    t[n] = envs[n].empty() ? base_->bot() : base_->alpha(envs[n]);
  return intern(std::move(t));
}

Bitset ProductPredicateAbstraction::gamma(Elem e) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (gamma_cache_[e]) return *gamma_cache_[e];
  }
  std::vector<Elem> t;
  {
    std::lock_guard<std::mutex> lk(mu_);
    t = tuples_[e];
  }
  Bitset out(nstates_);
  for (std::size_t s = 0; s < nstates_; ++s)
    if (base_->gamma(t[node_of_[s]]).test(env_index_of_[s])) out.set(s);
  std::lock_guard<std::mutex> lk(mu_);
  gamma_cache_[e] = out;
  return out;
}

Elem ProductPredicateAbstraction::join(Elem a, Elem b) const {
  std::vector<Elem> ta, tb;
  {
    std::lock_guard<std::mutex> lk(mu_);
    ta = tuples_[a];
    tb = tuples_[b];
  }
  std::vector<Elem> t(nnodes_);
  for (std::size_t n = 0; n < nnodes_; ++n) t[n] = base_->join(ta[n], tb[n]);
  return intern(std::move(t));
}

Elem ProductPredicateAbstraction::meet(Elem a, Elem b) const {
  std::vector<Elem> ta, tb;
  {
    std::lock_guard<std::mutex> lk(mu_);
    ta = tuples_[a];
    tb = tuples_[b];
  }
  std::vector<Elem> t(nnodes_);
  for (std::size_t n = 0; n < nnodes_; ++n) t[n] = base_->meet(ta[n], tb[n]);
  return intern(std::move(t));
}

bool ProductPredicateAbstraction::leq(Elem a, Elem b) const {
  std::vector<Elem> ta, tb;
  {
    std::lock_guard<std::mutex> lk(mu_);
    ta = tuples_[a];
    tb = tuples_[b];
  }
  for (std::size_t n = 0; n < nnodes_; ++n)
    if (!base_->leq(ta[n], tb[n])) return false;
  return true;
}

std::string ProductPredicateAbstraction::element_name(Elem e) const {
  std::vector<Elem> t;
  {
    std::lock_guard<std::mutex> lk(mu_);
    t = tuples_[e];
  }
  std::string out = "(";
  bool first = true;
  for (std::size_t n = 0; n < nnodes_; ++n) {
    if (t[n] == base_->bot()) continue;
    if (!first) out += ", ";
    out += nodes_[n] + ":" + base_->element_name(t[n]);
    first = false;
  }
  if (first) return "bot";
  return out + ")";
}

std::optional<Elem> ProductPredicateAbstraction::element_by_name(const std::string& name) const {
  if (name == "bot") return bot_;
  if (name == "top") return top_;
  return std::nullopt;
}

std::size_t ProductPredicateAbstraction::family_size() const {
  std::size_t total = 1;
  for (std::size_t n = 0; n < nnodes_; ++n) {
    if (total > (std::size_t{1} << 40) / base_->family_size()) return std::size_t{1} << 40;
    total *= base_->family_size();
  }
  return total;
}

std::vector<Bitset> ProductPredicateAbstraction::all_gammas() const {
  if (family_size() > (std::size_t{1} << 21))
    throw AbstractionError("product family too large to enumerate");
  std::vector<Bitset> out;
  std::vector<Elem> t(nnodes_, 0);
  const std::size_t base_n = base_->family_size();
  while (true) {
    out.push_back(gamma(intern(t)));
    std::size_t i = 0;
    for (; i < nnodes_; ++i) {
      if (static_cast<std::size_t>(t[i]) + 1 < base_n) {
        ++t[i];
        break;
      }
      t[i] = 0;
    }
    if (i == nnodes_) break;
  }
  return out;
}

std::optional<std::uint64_t> ProductPredicateAbstraction::support_mask(Elem e) const {
  std::vector<Elem> t;
  {
    std::lock_guard<std::mutex> lk(mu_);
    t = tuples_[e];
  }
  std::uint64_t mask = 0;
  for (std::size_t n = 0; n < nnodes_; ++n)
    if (t[n] != base_->bot()) mask |= std::uint64_t{1} << n;
  return mask;
}

// --- loaders ---

std::shared_ptr<StateAbstraction> load_state_abstraction(const std::string& json_text,
                                                         const TransitionSystem& ts,
                                                         std::optional<bool> auto_close_override) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw AbstractionError(std::string("ParseError: ") + e.what());
  }
  bool auto_close = auto_close_override.value_or(j.value("auto_close", true));
  std::vector<std::pair<std::string, Bitset>> named;
  for (auto& [name, states] : j.at("elements").items()) {
    Bitset b(ts.num_states());
    for (auto& s : states) {
      auto id = ts.state_id(s.get<std::string>());
      if (!id) throw AbstractionError("UnknownState: " + s.get<std::string>());
      b.set(*id);
    }
    named.emplace_back(name, b);
  }
  std::sort(named.begin(), named.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> point_names(ts.num_states());
  for (std::size_t s = 0; s < ts.num_states(); ++s) point_names[s] = ts.name(s);
  return std::make_shared<MooreTableAbstraction>(ts.num_states(), std::move(named), auto_close,
                                                 std::move(point_names));
}

namespace {

// guard ::= or ; or ::= and ('|' and)* ; and ::= not ('&' not)* ;
// not ::= '!' not | '(' or ')' | var ('='|'!=') (var|const)
struct GuardParser {
  const std::string& text;
  std::size_t pos = 0;
  const std::vector<std::string>& vars;
  const std::vector<int>& env;

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool parse_or() {
    bool v = parse_and();
    while (eat('|')) v = parse_and() || v;
    return v;
  }
  bool parse_and() {
    bool v = parse_not();
    while (eat('&')) v = parse_not() && v;
    return v;
  }
  bool parse_not() {
    if (eat('!')) return !parse_not();
    if (eat('(')) {
      bool v = parse_or();
      if (!eat(')')) throw AbstractionError("expected ')' in predicate");
      return v;
    }
    return parse_cmp();
  }
  std::string ident() {
    skip();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (start == pos) throw AbstractionError("expected identifier in predicate");
    return text.substr(start, pos - start);
  }
  bool parse_cmp() {
    std::string lhs = ident();
    skip();
    bool neq = false;
    if (pos + 1 < text.size() && text[pos] == '!' && text[pos + 1] == '=') {
      neq = true;
      pos += 2;
    } else if (!eat('=')) {
      throw AbstractionError("expected comparison in predicate");
    }
    std::string rhs = ident();
    auto value = [&](const std::string& t) -> int {
      auto it = std::find(vars.begin(), vars.end(), t);
      if (it != vars.end()) return env[it - vars.begin()];
      return std::stoi(t);
    };
    bool eq = value(lhs) == value(rhs);
    return neq ? !eq : eq;
  }
};

bool eval_guard(const std::string& guard, const std::vector<std::string>& vars,
                const std::vector<int>& env) {
  GuardParser p{guard, 0, vars, env};
  bool v = p.parse_or();
  p.skip();
  if (p.pos != guard.size()) throw AbstractionError("trailing input in predicate: " + guard);
  return v;
}

}  // namespace

std::shared_ptr<StateAbstraction> build_predicate_abstraction(const std::string& json_text,
                                                              const TransitionSystem& ts) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw AbstractionError(std::string("ParseError: ") + e.what());
  }
  bool per_node = j.value("per_node", ts.cfg_info().has_value());

  if (per_node) {
    if (!ts.cfg_info()) throw AbstractionError("per_node predicates require a CFG-built system");
    const auto& info = *ts.cfg_info();
    std::size_t nenv = 1;
    for (std::size_t i = 0; i < info.vars.size(); ++i) nenv *= info.modulus;

    // enumerate environments in the same digit order as cfg_to_ts
    auto env_digits = [&](std::size_t idx) {
      std::vector<int> env(info.vars.size());
      for (std::size_t i = info.vars.size(); i-- > 0;) {
        env[i] = static_cast<int>(idx % info.modulus);
        idx /= info.modulus;
      }
      return env;
    };

    auto envs_of = [&](const std::string& guard) {
      Bitset envs(nenv);
      for (std::size_t ei = 0; ei < nenv; ++ei)
        if (eval_guard(guard, info.vars, env_digits(ei))) envs.set(ei);
      return envs;
    };
    std::vector<std::pair<std::string, Bitset>> preds;
    for (auto& [name, guard] : j.at("predicates").items())
      preds.emplace_back(name, envs_of(guard.get<std::string>()));
    std::sort(preds.begin(), preds.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // extra family members added as they are, without complements
    std::vector<std::pair<std::string, Bitset>> extra;
    if (j.contains("elements"))
      for (auto& [name, guard] : j.at("elements").items())
        extra.emplace_back(name, envs_of(guard.get<std::string>()));
    std::sort(extra.begin(), extra.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return std::make_shared<ProductPredicateAbstraction>(ts, std::move(preds), std::move(extra));
  }

  // flat form: conjunction closure of state-set predicates and complements
  std::vector<std::pair<std::string, Bitset>> named;
  for (auto& [name, value] : j.at("predicates").items()) {
    Bitset b(ts.num_states());
    if (value.is_array()) {
      for (auto& s : value) {
        auto id = ts.state_id(s.get<std::string>());
        if (!id) throw AbstractionError("UnknownState: " + s.get<std::string>());
        b.set(*id);
      }
    } else {
      b = ts.prop_states(value.get<std::string>());
    }
    named.emplace_back(name, b);
    named.emplace_back("!" + name, Bitset::full(ts.num_states()) - b);
  }
  std::sort(named.begin(), named.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> point_names(ts.num_states());
  for (std::size_t s = 0; s < ts.num_states(); ++s) point_names[s] = ts.name(s);
  return std::make_shared<MooreTableAbstraction>(ts.num_states(), std::move(named), true,
                                                 std::move(point_names));
}

// --- FrameEquivalence ---

FrameEquivalence FrameEquivalence::id() {
  FrameEquivalence s;
  s.kind_ = Kind::Id;
  return s;
}
FrameEquivalence FrameEquivalence::total() {
  FrameEquivalence s;
  s.kind_ = Kind::Total;
  return s;
}
FrameEquivalence FrameEquivalence::by_support() {
  FrameEquivalence s;
  s.kind_ = Kind::BySupport;
  return s;
}
FrameEquivalence FrameEquivalence::by_support_except(std::vector<std::string> nodes) {
  FrameEquivalence s;
  s.kind_ = Kind::BySupportExcept;
  s.except_nodes_ = std::move(nodes);
  return s;
}
FrameEquivalence FrameEquivalence::from_classes(std::vector<std::vector<std::string>> classes) {
  FrameEquivalence s;
  s.kind_ = Kind::Classes;
  s.class_names_ = std::move(classes);
  return s;
}

FrameEquivalence FrameEquivalence::parse(const std::string& selector) {
  if (selector == "id") return id();
  if (selector == "total") return total();
  if (selector == "by_support") return by_support();
  if (selector.rfind("by_support_except:", 0) == 0) {
    std::vector<std::string> nodes;
    std::string rest = selector.substr(18);
    std::istringstream in(rest);
    std::string n;
    while (std::getline(in, n, ','))
      if (!n.empty()) nodes.push_back(n);
    return by_support_except(std::move(nodes));
  }
  throw AbstractionError("unknown equivalence selector: " + selector);
}

std::string FrameEquivalence::selector() const {
  switch (kind_) {
    case Kind::Id: return "id";
    case Kind::Total: return "total";
    case Kind::BySupport: return "by_support";
    case Kind::BySupportExcept: {
      std::string s = "by_support_except:";
      for (std::size_t i = 0; i < except_nodes_.size(); ++i)
        s += (i ? "," : "") + except_nodes_[i];
      return s;
    }
    case Kind::Classes: return "classes";
  }
  return "?";
}

FrameEquivalence::ClassKey FrameEquivalence::class_key(const StateAbstraction& dom,
                                                       Elem e) const {
  switch (kind_) {
    case Kind::Total: return {0, 0};
    case Kind::Id: return {1, e};
    case Kind::BySupport: {
      auto mask = dom.support_mask(e);
      if (!mask) throw AbstractionError("by_support requires a per-node domain");
      return {2, static_cast<std::int64_t>(*mask)};
    }
    case Kind::BySupportExcept: {
      auto mask = dom.support_mask(e);
      if (!mask) throw AbstractionError("by_support_except requires a per-node domain");
      std::uint64_t except = 0;
      auto nodes = dom.product_nodes();
      for (const auto& n : except_nodes_) {
        auto it = std::find(nodes.begin(), nodes.end(), n);
        if (it == nodes.end()) throw AbstractionError("unknown node in selector: " + n);
        except |= std::uint64_t{1} << (it - nodes.begin());
      }
      if (*mask != 0 && (*mask & ~except) == 0) return {3, e};  // states split apart here
      return {2, static_cast<std::int64_t>(*mask)};
    }
    case Kind::Classes: {
      std::lock_guard<std::mutex> lk(mu_);
      auto& table = class_cache_[{&dom, dom.family_size()}];
      if (table.empty()) {
        for (std::size_t c = 0; c < class_names_.size(); ++c)
          for (const auto& name : class_names_[c]) {
            auto el = dom.element_by_name(name);
            if (!el) throw AbstractionError("unknown element in classes: " + name);
            table[*el] = static_cast<std::int64_t>(c);
          }
      }
      auto it = table.find(e);
      if (it != table.end()) return {4, it->second};
      return {5, e};  // unmentioned elements form singleton classes
    }
  }
  return {0, 0};
}

bool FrameEquivalence::validate(const StateAbstraction& dom, std::string* why) const {
  switch (kind_) {
    case Kind::Id:
    case Kind::Total: return true;
    case Kind::BySupport:
    case Kind::BySupportExcept:
      // support of a join is the union of supports, so equal-support classes
      // are join-closed and singled-out elements trivially so
      if (!dom.support_mask(dom.bot())) {
        if (why) *why = "support equivalences require a per-node domain";
        return false;
      }
      return true;
    case Kind::Classes: {
      if (dom.family_size() > 4096) {
        if (why) *why = "explicit classes require an enumerable domain";
        return false;
      }
      const auto n = static_cast<Elem>(dom.family_size());
      for (Elem a = 0; a < n; ++a)
        for (Elem b = 0; b < n; ++b) {
          if (!(class_key(dom, a) == class_key(dom, b))) continue;
          Elem j = dom.join(a, b);
          if (!(class_key(dom, j) == class_key(dom, a))) {
            if (why)
              *why = "IncompatibleResult: class of " + dom.element_name(a) +
                     " not closed under join with " + dom.element_name(b);
            return false;
          }
        }
      return true;
    }
  }
  return false;
}

bool FrameEquivalence::is_strong(const StateAbstraction& dom) const {
  if (kind_ == Kind::Total) return true;
  if (kind_ == Kind::BySupport) return dom.support_mask(dom.bot()).has_value();

  // enumerate uniform sets per fiber of equal singleton-abstraction class
  const std::size_t n = dom.num_states();
  std::map<ClassKey, std::vector<std::size_t>> groups;
  for (std::size_t s = 0; s < n; ++s)
    groups[class_key(dom, dom.alpha_singleton(s))].push_back(s);
  for (auto& [key, states] : groups) {
    if (states.size() > 16) return false;  // give up: report not-strong
    const std::size_t m = states.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
      Bitset x(n);
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (std::size_t{1} << i)) x.set(states[i]);
      Bitset ga = dom.gamma(dom.alpha(x));
      std::optional<ClassKey> k;
      bool uniform = true;
      ga.for_each([&](std::size_t s) {
        auto ck = class_key(dom, dom.alpha_singleton(s));
        if (!k)
          k = ck;
        else if (!(*k == ck))
          uniform = false;
      });
      if (!uniform) return false;
    }
  }
  return true;
}

FrameEquivalence refine_equivalence(const FrameEquivalence& sim, const StateAbstraction& dom,
                                    const std::vector<std::string>& splitter) {
  if (sim.kind() == FrameEquivalence::Kind::BySupport) {
    auto nodes = dom.product_nodes();
    for (const auto& s : splitter)
      if (std::find(nodes.begin(), nodes.end(), s) == nodes.end())
        throw AbstractionError("unknown node in splitter: " + s);
    auto out = FrameEquivalence::by_support_except(splitter);
    std::string why;
    if (!out.validate(dom, &why)) throw AbstractionError("IncompatibleResult: " + why);
    return out;
  }

  // generic route: split every class by membership of the named elements
  if (dom.family_size() > 4096)
    throw AbstractionError("refinement by element sets requires an enumerable domain");
  std::vector<Elem> chosen;
  for (const auto& name : splitter) {
    auto el = dom.element_by_name(name);
    if (!el) throw AbstractionError("unknown element in splitter: " + name);
    chosen.push_back(*el);
  }
  const auto n = static_cast<Elem>(dom.family_size());
  std::map<std::pair<FrameEquivalence::ClassKey, bool>, std::vector<std::string>> classes;
  for (Elem e = 0; e < n; ++e) {
    bool in = std::find(chosen.begin(), chosen.end(), e) != chosen.end();
    classes[{sim.class_key(dom, e), in}].push_back(dom.element_name(e));
  }
  std::vector<std::vector<std::string>> table;
  for (auto& [k, members] : classes) table.push_back(members);
  auto out = FrameEquivalence::from_classes(std::move(table));
  std::string why;
  if (!out.validate(dom, &why)) throw AbstractionError(why);
  return out;
}

}  // namespace moka
