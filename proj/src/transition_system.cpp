#include "moka/transition_system.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace moka {

using nlohmann::json;

std::optional<std::size_t> TransitionSystem::state_id(const std::string& n) const {
  auto it = ids_.find(n);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Bitset TransitionSystem::post(const Bitset& xs) const {
  Bitset out(num_states());
  xs.for_each([&](std::size_t s) { out |= succ_[s]; });
  return out;
}

Bitset TransitionSystem::pre(const Bitset& xs) const {
  Bitset out(num_states());
  for (std::size_t s = 0; s < num_states(); ++s)
    if (!(succ_[s] & xs).empty()) out.set(s);
  return out;
}

Bitset TransitionSystem::prop_states(const std::string& p) const {
  if (!p.empty() && p[0] == '!') {
    auto it = props_.find(p.substr(1));
    if (it == props_.end()) throw TsError("unknown proposition: " + p.substr(1));
    return Bitset::full(num_states()) - it->second;
  }
  auto it = props_.find(p);
  if (it == props_.end()) throw TsError("unknown proposition: " + p);
  return it->second;
}

std::vector<std::string> TransitionSystem::prop_names() const {
  std::vector<std::string> out;
  for (auto& [k, v] : props_) out.push_back(k);
  return out;
}

Bitset TransitionSystem::states_from_names(const std::vector<std::string>& ns) const {
  Bitset out(num_states());
  for (auto& n : ns) {
    auto id = state_id(n);
    if (!id) throw TsError("unknown state: " + n);
    out.set(*id);
  }
  return out;
}

std::vector<std::string> TransitionSystem::names_of(const Bitset& xs) const {
  std::vector<std::string> out;
  xs.for_each([&](std::size_t s) { out.push_back(names_[s]); });
  return out;
}

void TransitionSystem::validate() const {
  for (std::size_t s = 0; s < num_states(); ++s)
    if (succ_[s].empty()) throw TsError("NotTotal: state " + names_[s] + " has no successor");
  auto tt = props_.find("tt");
  if (tt == props_.end() || tt->second != Bitset::full(num_states()))
    throw TsError("InconsistentLabeling: tt must hold in every state");
}

TransitionSystem make_ts(std::vector<std::string> names,
                         std::vector<std::pair<std::string, std::string>> edges,
                         std::map<std::string, std::vector<std::string>> labeling,
                         std::vector<std::string> init) {
  TransitionSystem ts;
  ts.names_ = std::move(names);
  for (std::size_t i = 0; i < ts.names_.size(); ++i) {
    if (ts.ids_.count(ts.names_[i])) throw TsError("duplicate state: " + ts.names_[i]);
    ts.ids_[ts.names_[i]] = i;
  }
  std::size_t n = ts.names_.size();
  ts.succ_.assign(n, Bitset(n));
  for (auto& [a, b] : edges) {
    auto ia = ts.state_id(a), ib = ts.state_id(b);
    if (!ia || !ib) throw TsError("edge mentions unknown state: " + a + " -> " + b);
    ts.succ_[*ia].set(*ib);
  }
  ts.init_ = Bitset(n);
  for (auto& s : init) {
    auto id = ts.state_id(s);
    if (!id) throw TsError("unknown initial state: " + s);
    ts.init_.set(*id);
  }

  // Positive labellings; "!p" entries are only consistency constraints.
  std::map<std::string, Bitset> pos, neg;
  for (auto& [state, props] : labeling) {
    auto id = ts.state_id(state);
    if (!id) throw TsError("labeling mentions unknown state: " + state);
    for (auto& p : props) {
      bool negated = !p.empty() && p[0] == '!';
      std::string base = negated ? p.substr(1) : p;
      auto& m = negated ? neg : pos;
      auto it = m.find(base);
      if (it == m.end()) it = m.emplace(base, Bitset(n)).first;
      it->second.set(*id);
    }
  }
  for (auto& [p, states] : neg) {
    auto it = pos.find(p);
    if (it != pos.end() && !(it->second & states).empty()) {
      auto clash = (it->second & states).members().front();
      throw TsError("InconsistentLabeling: state " + ts.names_[clash] + " carries both " + p +
                    " and !" + p);
    }
    if (it == pos.end()) pos.emplace(p, Bitset(n));
  }
  pos["tt"] = Bitset::full(n);
  ts.props_ = std::move(pos);
  ts.validate();
  return ts;
}

TransitionSystem parse_ts(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw TsError(std::string("ParseError: ") + e.what());
  }
  try {
    std::vector<std::string> names = j.at("states").get<std::vector<std::string>>();
    std::vector<std::pair<std::string, std::string>> edges;
    for (auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    std::map<std::string, std::vector<std::string>> labeling;
    if (j.contains("props"))
      labeling = j.at("props").get<std::map<std::string, std::vector<std::string>>>();
    std::vector<std::string> init;
    if (j.contains("init")) init = j.at("init").get<std::vector<std::string>>();
    return make_ts(std::move(names), std::move(edges), std::move(labeling), std::move(init));
  } catch (const json::exception& e) {
    throw TsError(std::string("ParseError: ") + e.what());
  }
}

std::string TransitionSystem::to_json() const {
  json j;
  j["states"] = names_;
  j["init"] = names_of(init_);
  json props = json::object();
  for (std::size_t s = 0; s < num_states(); ++s) {
    std::vector<std::string> ps;
    for (auto& [p, states] : props_)
      if (p != "tt" && states.test(s)) ps.push_back(p);
    if (!ps.empty()) props[names_[s]] = ps;
  }
  j["props"] = props;
  json edges = json::array();
  for (std::size_t s = 0; s < num_states(); ++s)
    succ_[s].for_each([&](std::size_t t) { edges.push_back({names_[s], names_[t]}); });
  j["edges"] = edges;
  return j.dump(2);
}

// --- CFG ---

namespace {

int var_index(const Cfg& cfg, const std::string& v) {
  auto it = std::find(cfg.vars.begin(), cfg.vars.end(), v);
  if (it == cfg.vars.end()) throw TsError("undeclared variable: " + v);
  return static_cast<int>(it - cfg.vars.begin());
}

// stmt ::= var ":=" (var | const | var "+" const) | var ("="|"!=") (var|const)
Cfg::Stmt parse_stmt(const Cfg& cfg, const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tok;
  std::string t;
  while (in >> t) tok.push_back(t);
  auto is_num = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(c); });
  };
  Cfg::Stmt st{};
  if (tok.size() >= 3 && tok[1] == ":=") {
    st.lhs = var_index(cfg, tok[0]);
    if (tok.size() == 3 && is_num(tok[2])) {
      st.kind = Cfg::Stmt::AssignConst;
      st.value = std::stoi(tok[2]);
    } else if (tok.size() == 3) {
      st.kind = Cfg::Stmt::AssignVar;
      st.rhs = var_index(cfg, tok[2]);
    } else if (tok.size() == 5 && tok[3] == "+" && is_num(tok[4])) {
      st.kind = Cfg::Stmt::AssignAdd;
      st.rhs = var_index(cfg, tok[2]);
      st.value = std::stoi(tok[4]);
    } else {
      throw TsError("unsupported statement: " + text);
    }
    return st;
  }
  if (tok.size() == 3 && (tok[1] == "=" || tok[1] == "!=")) {
    st.lhs = var_index(cfg, tok[0]);
    if (is_num(tok[2])) {
      st.kind = tok[1] == "=" ? Cfg::Stmt::GuardEqConst : Cfg::Stmt::GuardNeqConst;
      st.value = std::stoi(tok[2]);
    } else {
      st.kind = tok[1] == "=" ? Cfg::Stmt::GuardEqVar : Cfg::Stmt::GuardNeqVar;
      st.rhs = var_index(cfg, tok[2]);
    }
    return st;
  }
  throw TsError("unsupported statement: " + text);
}

std::vector<std::string> split_semi(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ';')) {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

Cfg parse_cfg(const std::string& text, std::optional<int> modulus_override) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw TsError(std::string("ParseError: ") + e.what());
  }
  Cfg cfg;
  cfg.nodes = j.at("nodes").get<std::vector<std::string>>();
  cfg.vars = j.at("vars").get<std::vector<std::string>>();
  cfg.modulus = modulus_override.value_or(j.value("modulus", 0));
  if (cfg.modulus <= 0) throw TsError("ModulusZero: modulus must be positive");
  auto node_index = [&](const std::string& n) {
    auto it = std::find(cfg.nodes.begin(), cfg.nodes.end(), n);
    if (it == cfg.nodes.end()) throw TsError("unknown node: " + n);
    return static_cast<int>(it - cfg.nodes.begin());
  };
  cfg.start = node_index(j.at("start").get<std::string>());
  cfg.end = node_index(j.at("end").get<std::string>());
  for (auto& e : j.at("edges")) {
    Cfg::Edge edge;
    edge.from = node_index(e.at(0).get<std::string>());
    edge.to = node_index(e.at(2).get<std::string>());
    edge.label = e.at(1).get<std::string>();
    for (auto& part : split_semi(edge.label)) edge.stmts.push_back(parse_stmt(cfg, part));
    cfg.edges.push_back(std::move(edge));
  }
  return cfg;
}

TransitionSystem cfg_to_ts(const Cfg& cfg) {
  if (cfg.modulus <= 0) throw TsError("ModulusZero: modulus must be positive");
  const int k = cfg.modulus;
  const int nvars = static_cast<int>(cfg.vars.size());
  std::size_t nenv = 1;
  for (int i = 0; i < nvars; ++i) nenv *= static_cast<std::size_t>(k);

  auto env_digits = [&](std::size_t idx) {
    std::vector<int> env(nvars);
    for (int i = nvars - 1; i >= 0; --i) {
      env[i] = static_cast<int>(idx % k);
      idx /= k;
    }
    return env;
  };
  auto env_index = [&](const std::vector<int>& env) {
    std::size_t idx = 0;
    for (int i = 0; i < nvars; ++i) idx = idx * k + env[i];
    return idx;
  };
  auto state_name = [&](int node, const std::vector<int>& env) {
    std::string s = "(" + cfg.nodes[node] + ",";
    for (int v : env) s += std::to_string(v);
    s += ")";
    return s;
  };

  const std::size_t nnodes = cfg.nodes.size();
  const std::size_t nstates = nnodes * nenv;
  std::vector<std::string> names(nstates);
  for (std::size_t nd = 0; nd < nnodes; ++nd)
    for (std::size_t ei = 0; ei < nenv; ++ei)
      names[nd * nenv + ei] = state_name(static_cast<int>(nd), env_digits(ei));

  auto apply = [&](const Cfg::Stmt& st, std::vector<int>& env) -> bool {
    switch (st.kind) {
      case Cfg::Stmt::AssignVar: env[st.lhs] = env[st.rhs]; return true;
      case Cfg::Stmt::AssignConst: env[st.lhs] = st.value % k; return true;
      case Cfg::Stmt::AssignAdd: env[st.lhs] = (env[st.rhs] + st.value) % k; return true;
      case Cfg::Stmt::GuardEqConst: return env[st.lhs] == st.value % k;
      case Cfg::Stmt::GuardNeqConst: return env[st.lhs] != st.value % k;
      case Cfg::Stmt::GuardEqVar: return env[st.lhs] == env[st.rhs];
      case Cfg::Stmt::GuardNeqVar: return env[st.lhs] != env[st.rhs];
    }
    return false;
  };

  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : cfg.edges)
    for (std::size_t ei = 0; ei < nenv; ++ei) {
      std::vector<int> env = env_digits(ei);
      bool live = true;
      for (const auto& st : e.stmts)
        if (!apply(st, env)) {
          live = false;
          break;
        }
      if (live)
        edges.emplace_back(names[e.from * nenv + ei], names[e.to * nenv + env_index(env)]);
    }
  for (std::size_t ei = 0; ei < nenv; ++ei) {
    const auto& n = names[cfg.end * nenv + ei];
    edges.emplace_back(n, n);
  }

  std::map<std::string, std::vector<std::string>> labeling;
  for (std::size_t nd = 0; nd < nnodes; ++nd)
    for (std::size_t ei = 0; ei < nenv; ++ei) {
      auto env = env_digits(ei);
      std::vector<std::string> props;
      props.push_back("n=" + cfg.nodes[nd]);
      for (int v = 0; v < nvars; ++v)
        for (int c = 0; c < k; ++c)
          if (env[v] == c) props.push_back(cfg.vars[v] + "=" + std::to_string(c));
      for (int v = 0; v < nvars; ++v)
        for (int w = v + 1; w < nvars; ++w)
          if (env[v] == env[w]) props.push_back(cfg.vars[v] + "=" + cfg.vars[w]);
      labeling[names[nd * nenv + ei]] = std::move(props);
    }

  std::vector<std::string> init;
  for (std::size_t ei = 0; ei < nenv; ++ei) init.push_back(names[cfg.start * nenv + ei]);

  auto ts = make_ts(std::move(names), std::move(edges), std::move(labeling), std::move(init));

  CfgInfo info;
  info.nodes = cfg.nodes;
  info.vars = cfg.vars;
  info.modulus = k;
  info.node_of.resize(nstates);
  info.env_of.resize(nstates);
  for (std::size_t nd = 0; nd < nnodes; ++nd)
    for (std::size_t ei = 0; ei < nenv; ++ei) {
      info.node_of[nd * nenv + ei] = static_cast<int>(nd);
      info.env_of[nd * nenv + ei] = env_digits(ei);
    }
  ts.cfg_ = std::move(info);
  return ts;
}

}  // namespace moka
