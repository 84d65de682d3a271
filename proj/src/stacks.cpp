#include "moka/stacks.hpp"

namespace moka {

StackSet lift_states(const Bitset& states, const TransitionSystem& ts) {
  StackSet out;
  Bitset empty(ts.num_states());
  states.for_each([&](std::size_t s) { out.insert(Stack{Frame{s, empty}}); });
  return out;
}

Bitset current_states(const StackSet& s, const TransitionSystem& ts) {
  Bitset out(ts.num_states());
  for (const auto& st : s.stacks()) out.set(st.front().current);
  return out;
}

StackSet eval_basic(const std::string& name, const StackSet& s, const TransitionSystem& ts) {
  StackSet out;
  if (name == "push") {
    for (const auto& st : s.stacks()) {
      Stack ns;
      ns.reserve(st.size() + 1);
      ns.push_back(st.front());
      ns.insert(ns.end(), st.begin(), st.end());
      out.insert(std::move(ns));
    }
    return out;
  }
  if (name == "pop") {
    for (const auto& st : s.stacks())
      if (st.size() > 1) out.insert(Stack(st.begin() + 1, st.end()));
    return out;
  }
  if (name == "add") {
    for (const auto& st : s.stacks()) {
      Stack ns = st;
      ns.front().trace.set(ns.front().current);
      out.insert(std::move(ns));
    }
    return out;
  }
  if (name == "reset") {
    for (const auto& st : s.stacks()) {
      Stack ns = st;
      ns.front().trace = Bitset(ts.num_states());
      out.insert(std::move(ns));
    }
    return out;
  }
  if (name == "next") {
    for (const auto& st : s.stacks())
      ts.successors(st.front().current).for_each([&](std::size_t succ) {
        Stack ns = st;
        ns.front().current = succ;
        out.insert(std::move(ns));
      });
    return out;
  }
  if (name == "loop?") {
    for (const auto& st : s.stacks())
      if (st.front().trace.test(st.front().current)) out.insert(st);
    return out;
  }
  if (name == "!loop?") {
    for (const auto& st : s.stacks())
      if (!st.front().trace.test(st.front().current)) out.insert(st);
    return out;
  }
  if (!name.empty() && name.back() == '?') {
    Bitset sat = ts.prop_states(name.substr(0, name.size() - 1));  // throws on unknown p
    for (const auto& st : s.stacks())
      if (sat.test(st.front().current)) out.insert(st);
    return out;
  }
  throw UnknownBasicError("UnknownBasic: " + name);
}

std::string to_string(const Stack& s, const TransitionSystem& ts) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += " :: ";
    out += "<" + ts.name(s[i].current) + "|{";
    bool first = true;
    s[i].trace.for_each([&](std::size_t q) {
      if (!first) out += ",";
      out += ts.name(q);
      first = false;
    });
    out += "}>";
  }
  return out;
}

std::string to_string(const StackSet& s, const TransitionSystem& ts) {
  std::string out = "{";
  bool first = true;
  for (const auto& st : s.stacks()) {
    if (!first) out += "; ";
    out += to_string(st, ts);
    first = false;
  }
  return out + "}";
}

}  // namespace moka
