#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "moka/bitset.hpp"
#include "moka/lattice.hpp"
#include "moka/transition_system.hpp"

namespace moka {

struct AbstractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A state abstraction: a Moore family of state sets with the induced Galois
// insertion. Elements are interned ids; product implementations intern
// lazily, so ids are only meaningful per instance.
class StateAbstraction {
public:
  virtual ~StateAbstraction() = default;

  virtual std::size_t num_states() const = 0;
  virtual Elem bot() const = 0;
  virtual Elem top() const = 0;
  virtual Elem alpha(const Bitset& states) const = 0;
  virtual Bitset gamma(Elem e) const = 0;
  virtual Elem join(Elem a, Elem b) const = 0;
  virtual Elem meet(Elem a, Elem b) const = 0;
  virtual bool leq(Elem a, Elem b) const = 0;
  virtual std::string element_name(Elem e) const = 0;
  virtual std::optional<Elem> element_by_name(const std::string& name) const = 0;

  // Total number of family members (conceptual for lazy products).
  virtual std::size_t family_size() const = 0;
  // Concretizations of the whole family; throws when infeasibly large.
  virtual std::vector<Bitset> all_gammas() const = 0;
  // Support over CFG nodes (non-bottom components), when the domain is a
  // per-node product.
  virtual std::optional<std::uint64_t> support_mask(Elem e) const = 0;
  virtual std::vector<std::string> product_nodes() const { return {}; }

  Elem alpha_singleton(std::size_t state) const;
  Elem alpha_of_states(const std::vector<std::size_t>& states) const;

  // Explicit-table view for the lattice validators; feasible sizes only.
  FiniteLattice to_lattice() const;
};

// Explicit Moore family given by element concretizations.
class MooreTableAbstraction : public StateAbstraction {
public:
  enum class Closure {
    Close,  // close under intersections, add the full and empty sets
    Check,  // require the family to be closed already
    Trust,  // caller guarantees closure (skips the quadratic check)
  };

  // `named` seeds the family; when auto_close is set the family is closed
  // under intersections and completed with the full and empty sets,
  // otherwise a missing intersection raises NotMooreClosed.
  MooreTableAbstraction(std::size_t num_states,
                        std::vector<std::pair<std::string, Bitset>> named, bool auto_close,
                        std::vector<std::string> point_names = {});
  MooreTableAbstraction(std::size_t num_states,
                        std::vector<std::pair<std::string, Bitset>> named, Closure closure,
                        std::vector<std::string> point_names = {});

  std::size_t num_states() const override { return nstates_; }
  Elem bot() const override { return bot_; }
  Elem top() const override { return top_; }
  Elem alpha(const Bitset& states) const override;
  Bitset gamma(Elem e) const override { return gammas_[e]; }
  Elem join(Elem a, Elem b) const override;
  Elem meet(Elem a, Elem b) const override;
  bool leq(Elem a, Elem b) const override { return gammas_[a].subset_of(gammas_[b]); }
  std::string element_name(Elem e) const override { return names_[e]; }
  std::optional<Elem> element_by_name(const std::string& name) const override;
  std::size_t family_size() const override { return gammas_.size(); }
  std::vector<Bitset> all_gammas() const override { return gammas_; }
  std::optional<std::uint64_t> support_mask(Elem) const override { return std::nullopt; }

private:
  std::size_t nstates_;
  std::vector<Bitset> gammas_;
  std::vector<std::string> names_;
  std::vector<std::string> point_names_;  // for rendering synthesized elements
  std::unordered_map<Bitset, Elem, BitsetHash> index_;
  Elem bot_, top_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Bitset, Elem, BitsetHash> alpha_cache_;

  std::string render_set(const Bitset& b) const;
};

// Per-program-point product of a small predicate lattice over environments;
// elements are interned on demand.
class ProductPredicateAbstraction : public StateAbstraction {
public:
  ProductPredicateAbstraction(const TransitionSystem& ts,
                              std::vector<std::pair<std::string, Bitset>> env_preds,
                              std::vector<std::pair<std::string, Bitset>> env_elements = {});

  std::size_t num_states() const override { return nstates_; }
  Elem bot() const override { return bot_; }
  Elem top() const override { return top_; }
  Elem alpha(const Bitset& states) const override;
  Bitset gamma(Elem e) const override;
  Elem join(Elem a, Elem b) const override;
  Elem meet(Elem a, Elem b) const override;
  bool leq(Elem a, Elem b) const override;
  std::string element_name(Elem e) const override;
  std::optional<Elem> element_by_name(const std::string& name) const override;
  std::size_t family_size() const override;
  std::vector<Bitset> all_gammas() const override;
  std::optional<std::uint64_t> support_mask(Elem e) const override;
  std::vector<std::string> product_nodes() const override { return nodes_; }

  const MooreTableAbstraction& base() const { return *base_; }

private:
  std::size_t nstates_;
  std::size_t nnodes_;
  std::size_t nenv_;
  std::vector<std::string> nodes_;
  std::vector<int> node_of_;
  std::vector<std::size_t> env_index_of_;
  std::unique_ptr<MooreTableAbstraction> base_;  // over environments
  mutable std::mutex mu_;
  mutable std::vector<std::vector<Elem>> tuples_;
  mutable std::map<std::vector<Elem>, Elem> intern_;
  mutable std::vector<std::optional<Bitset>> gamma_cache_;
  Elem bot_, top_;

  Elem intern(std::vector<Elem> t) const;
};

// Loads `{"elements": {name: [state, ...], ...}, "auto_close": bool}`.
std::shared_ptr<StateAbstraction> load_state_abstraction(const std::string& json_text,
                                                         const TransitionSystem& ts,
                                                         std::optional<bool> auto_close_override =
                                                             std::nullopt);

// Loads `{"predicates": {name: guard-or-states, ...}, "per_node": bool}`.
// Guards are boolean combinations of variable comparisons for CFG-built
// systems; state lists work for any system. The per-node form yields the
// product domain, the flat form a conjunction closure over states.
std::shared_ptr<StateAbstraction> build_predicate_abstraction(const std::string& json_text,
                                                              const TransitionSystem& ts);

// Equivalence on abstract elements, lifted to frames by first component.
class FrameEquivalence {
public:
  enum class Kind { Id, Total, BySupport, BySupportExcept, Classes };

  static FrameEquivalence id();
  static FrameEquivalence total();
  static FrameEquivalence by_support();
  static FrameEquivalence by_support_except(std::vector<std::string> nodes);
  static FrameEquivalence from_classes(std::vector<std::vector<std::string>> classes);

  // Parses "id | total | by_support | by_support_except:<n,n> | classes:<file>".
  static FrameEquivalence parse(const std::string& selector);

  Kind kind() const { return kind_; }
  std::string selector() const;

  struct ClassKey {
    std::int64_t a = 0, b = 0;
    bool operator==(const ClassKey&) const = default;
    auto operator<=>(const ClassKey&) const = default;
  };
  ClassKey class_key(const StateAbstraction& dom, Elem e) const;
  bool equivalent(const StateAbstraction& dom, Elem a, Elem b) const {
    return class_key(dom, a) == class_key(dom, b);
  }

  // Join-closure of every class; exhaustive on enumerable domains, by the
  // componentwise-support argument on products.
  bool validate(const StateAbstraction& dom, std::string* why = nullptr) const;

  // Whether gamma.alpha preserves class-uniformity of state sets; enumerated
  // when feasible, decided structurally for the built-in kinds otherwise.
  bool is_strong(const StateAbstraction& dom) const;

private:
  Kind kind_ = Kind::Total;
  std::vector<std::string> except_nodes_;
  std::vector<std::vector<std::string>> class_names_;  // Classes

  mutable std::mutex mu_;
  // keyed by identity and family size so reallocation at a reused address
  // cannot serve a stale table
  mutable std::map<std::pair<const StateAbstraction*, std::size_t>,
                   std::map<Elem, std::int64_t>>
      class_cache_;

public:
  FrameEquivalence(const FrameEquivalence& o)
      : kind_(o.kind_), except_nodes_(o.except_nodes_), class_names_(o.class_names_) {}
  FrameEquivalence& operator=(const FrameEquivalence& o) {
    kind_ = o.kind_;
    except_nodes_ = o.except_nodes_;
    class_names_ = o.class_names_;
    return *this;
  }
  FrameEquivalence() = default;
};

// Splits classes of `sim` by a node-set (support kinds) or by a set of
// element names (explicit domains); throws IncompatibleResult when a split
// class is not join-closed.
FrameEquivalence refine_equivalence(const FrameEquivalence& sim, const StateAbstraction& dom,
                                    const std::vector<std::string>& splitter);

}  // namespace moka
