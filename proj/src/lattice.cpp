#include "moka/lattice.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace moka {

FiniteLattice lattice_from_order(std::size_t n, std::function<bool(Elem, Elem)> leq) {
  FiniteLattice l;
  l.n_ = n;
  l.leq_.assign(n * n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      l.leq_[a * n + b] = leq(static_cast<Elem>(a), static_cast<Elem>(b));

  auto lub = [&](Elem a, Elem b) -> Elem {
    Elem best = -1;
    for (std::size_t u = 0; u < n; ++u) {
      if (!l.leq_[a * n + u] || !l.leq_[b * n + u]) continue;
      if (best < 0 || l.leq_[u * n + best]) best = static_cast<Elem>(u);
    }
    if (best < 0) throw std::runtime_error("no upper bound");
    for (std::size_t u = 0; u < n; ++u)
      if (l.leq_[a * n + u] && l.leq_[b * n + u] && !l.leq_[static_cast<std::size_t>(best) * n + u])
        throw std::runtime_error("no least upper bound");
    return best;
  };
  auto glb = [&](Elem a, Elem b) -> Elem {
    Elem best = -1;
    for (std::size_t u = 0; u < n; ++u) {
      if (!l.leq_[u * n + a] || !l.leq_[u * n + b]) continue;
      if (best < 0 || l.leq_[static_cast<std::size_t>(best) * n + u]) best = static_cast<Elem>(u);
    }
    if (best < 0) throw std::runtime_error("no lower bound");
    for (std::size_t u = 0; u < n; ++u)
      if (l.leq_[u * n + a] && l.leq_[u * n + b] && !l.leq_[u * n + static_cast<std::size_t>(best)])
        throw std::runtime_error("no greatest lower bound");
    return best;
  };

  l.join_.resize(n * n);
  l.meet_.resize(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      l.join_[a * n + b] = lub(static_cast<Elem>(a), static_cast<Elem>(b));
      l.meet_[a * n + b] = glb(static_cast<Elem>(a), static_cast<Elem>(b));
    }

  for (std::size_t e = 0; e < n; ++e) {
    if (l.leq_[e * n + l.bot_] ) l.bot_ = static_cast<Elem>(e);
    if (l.leq_[static_cast<std::size_t>(l.top_) * n + e]) l.top_ = static_cast<Elem>(e);
  }
  return l;
}

FiniteLattice::FiniteLattice(std::size_t n, std::function<bool(Elem, Elem)> leq) {
  *this = lattice_from_order(n, std::move(leq));
}

void FiniteLattice::override_join(Elem a, Elem b, Elem v) {
  join_[static_cast<std::size_t>(a) * n_ + b] = v;
  join_[static_cast<std::size_t>(b) * n_ + a] = v;
}

std::vector<Elem> FiniteLattice::upper_bounds(Elem a, Elem b) const {
  std::vector<Elem> out;
  for (std::size_t u = 0; u < n_; ++u)
    if (leq(a, static_cast<Elem>(u)) && leq(b, static_cast<Elem>(u)))
      out.push_back(static_cast<Elem>(u));
  return out;
}

LatticeDiagnostics validate_lattice(const FiniteLattice& l) {
  const auto n = static_cast<Elem>(l.size());
  for (Elem a = 0; a < n; ++a)
    if (!l.leq(a, a)) return {false, "order not reflexive", {a}};
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b)
      if (a != b && l.leq(a, b) && l.leq(b, a)) return {false, "order not antisymmetric", {a, b}};
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b)
      for (Elem c = 0; c < n; ++c)
        if (l.leq(a, b) && l.leq(b, c) && !l.leq(a, c))
          return {false, "order not transitive", {a, b, c}};

  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) {
      Elem j = l.join(a, b);
      if (!l.leq(a, j) || !l.leq(b, j)) return {false, "join not an upper bound", {a, b, j}};
      for (Elem u = 0; u < n; ++u)
        if (l.leq(a, u) && l.leq(b, u) && !l.leq(j, u))
          return {false, "join not least upper bound", {a, b, u}};
      Elem m = l.meet(a, b);
      if (!l.leq(m, a) || !l.leq(m, b)) return {false, "meet not a lower bound", {a, b, m}};
      for (Elem u = 0; u < n; ++u)
        if (l.leq(u, a) && l.leq(u, b) && !l.leq(u, m))
          return {false, "meet not greatest lower bound", {a, b, u}};
    }

  for (Elem a = 0; a < n; ++a) {
    if (!l.leq(l.bot(), a)) return {false, "bot not least", {a}};
    if (!l.leq(a, l.top())) return {false, "top not greatest", {a}};
  }
  return {};
}

Elem lfp(const std::function<Elem(Elem)>& f, const FiniteLattice& l, std::optional<Elem> seed,
         LfpOptions opts) {
  Elem x = seed.value_or(l.bot());
  for (std::size_t i = 0; i < opts.budget; ++i) {
    Elem y = f(x);
    if (y == x) return x;
    Elem j = l.join(x, y);
    if (j != y && !l.leq(x, y)) throw NonMonotoneError("iterate decreased during lfp computation");
    x = j;
  }
  throw IterationBudgetError("lfp iteration budget exceeded");
}

bool GaloisConnection::check_adjunction(const std::vector<Bitset>& cs,
                                        const std::vector<Bitset>& as) const {
  for (const auto& c : cs)
    for (const auto& a : as) {
      bool lhs = alpha(c).subset_of(a);
      bool rhs = c.subset_of(gamma(a));
      if (lhs != rhs) return false;
    }
  return true;
}

GaloisConnection image_adjunction(const std::vector<std::size_t>& f, std::size_t y_size) {
  GaloisConnection gc;
  gc.concrete_universe = f.size();
  gc.abstract_universe = y_size;
  auto fn = f;
  gc.alpha = [fn, y_size](const Bitset& x) {
    Bitset out(y_size);
    x.for_each([&](std::size_t i) { out.set(fn[i]); });
    return out;
  };
  std::size_t x_size = f.size();
  gc.gamma = [fn, x_size](const Bitset& y) {
    Bitset out(x_size);
    for (std::size_t i = 0; i < x_size; ++i)
      if (y.test(fn[i])) out.set(i);
    return out;
  };
  return gc;
}

CompatibleEquivalence CompatibleEquivalence::identity(const FiniteLattice& l) {
  std::vector<int> cls(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) cls[i] = static_cast<int>(i);
  return {&l, std::move(cls)};
}

CompatibleEquivalence CompatibleEquivalence::total(const FiniteLattice& l) {
  return {&l, std::vector<int>(l.size(), 0)};
}

bool CompatibleEquivalence::validate(std::string* why) const {
  const auto n = static_cast<Elem>(carrier_->size());
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) {
      if (class_of_[a] != class_of_[b]) continue;
      Elem j = carrier_->join(a, b);
      if (class_of_[j] != class_of_[a]) {
        if (why)
          *why = "class not closed under join: elements " + std::to_string(a) + "," +
                 std::to_string(b);
        return false;
      }
    }
  return true;
}

std::vector<Elem> equiv_alpha(const std::vector<Elem>& xs, const CompatibleEquivalence& sim) {
  std::map<int, Elem> per_class;
  const auto& l = sim.carrier();
  for (Elem x : xs) {
    auto [it, fresh] = per_class.emplace(sim.class_of(x), x);
    if (!fresh) it->second = l.join(it->second, x);
  }
  std::vector<Elem> out;
  out.reserve(per_class.size());
  for (auto& [cls, e] : per_class) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Elem> equiv_gamma(const std::vector<Elem>& ys, const CompatibleEquivalence& sim) {
  const auto& l = sim.carrier();
  std::set<Elem> out;
  for (Elem y : ys)
    for (Elem e = 0; e < static_cast<Elem>(l.size()); ++e)
      if (sim.class_of(e) == sim.class_of(y) && l.leq(e, y)) out.insert(e);
  return {out.begin(), out.end()};
}

bool equiv_leq(const std::vector<Elem>& x, const std::vector<Elem>& y,
               const CompatibleEquivalence& sim) {
  const auto& l = sim.carrier();
  for (Elem a : x) {
    bool found = false;
    for (Elem b : y)
      if (sim.class_of(a) == sim.class_of(b) && l.leq(a, b)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace moka
