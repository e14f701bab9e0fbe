#include "vgen/skeleton.hpp"

#include <stdexcept>

#include "vgen/grammar.hpp"
#include "vgen/parser.hpp"

namespace vgen {

namespace {

// The keyword-less PortType production: its expansion is an open type slot.
int open_port_type_rule() {
  static const int rule = [] {
    for (int id : Grammar::get().rules_for(NT::PortType)) {
      const Rule& r = Grammar::get().rule(id);
      if (r.rhs.empty() || !(r.rhs[0] == N(NT::NetOrVar))) return id;
    }
    grammar_bug("PortType has no keyword-less production");
    return -1;
  }();
  return rule;
}

Token make_token(Tok kind, std::string lexeme) {
  Token t;
  t.kind = kind;
  t.lexeme = std::move(lexeme);
  t.line = 0;
  t.col = 0;
  return t;
}

}  // namespace

Result<Skeleton, GenFailure> generate_skeleton(const ProbabilityTable& table, uint64_t seed,
                                               const GenLimits& limits, double tau) {
  const Grammar& g = Grammar::get();
  Rng rng(seed);
  Skeleton sk;
  sk.seed = seed;
  Tree& t = sk.tree;

  int id_ord = 0;
  int type_ord = 0;

  struct Entry {
    int node;
    NT nt;
    ContextKey ctx;
    int depth;
  };
  std::vector<Entry> stack;
  t.root = t.add_node(-2);
  stack.push_back({t.root, g.start(), ContextKey{}, 0});

  while (!stack.empty()) {
    Entry e = stack.back();
    stack.pop_back();
    if (e.depth > limits.max_depth) {
      return GenFailure{GenFailure::Kind::DepthExceeded,
                        "derivation exceeded depth " + std::to_string(limits.max_depth)};
    }

    Distribution dist = table.lookup_distribution(e.ctx, e.nt);
    dist = apply_temperature(dist, tau);
    int rule_id = sample_distribution(dist, rng.next_double());
    t.at(e.node).rule = rule_id;
    sk.rule_trace.push_back(rule_id);
    if (rule_id == open_port_type_rule()) t.at(e.node).ph_ord = type_ord++;

    const Rule& rule = g.rule(rule_id);
    ContextKey kid_ctx = ctx_push(e.ctx, rule_id, table.k());
    std::vector<int32_t> kids;
    kids.reserve(rule.rhs.size());
    std::vector<Entry> pending;
    for (const Sym& s : rule.rhs) {
      if (s.terminal) {
        Tok kind = static_cast<Tok>(s.id);
        int leaf;
        if (kind == Tok::identifier) {
          leaf = t.add_leaf(make_token(kind, "ID_" + std::to_string(id_ord)));
          t.at(leaf).placeholder = true;
          t.at(leaf).ph_ord = id_ord++;
        } else if (kind == Tok::number) {
          leaf = t.add_leaf(make_token(kind, std::to_string(rng.below(10))));
        } else if (kind == Tok::sized_number) {
          static const int widths[4] = {1, 2, 4, 8};
          int w = widths[rng.below(4)];
          uint64_t v = rng.below(uint64_t{1} << w);
          leaf = t.add_leaf(
              make_token(kind, std::to_string(w) + "'d" + std::to_string(v)));
        } else {
          leaf = t.add_leaf(make_token(kind, tok_spelling(kind)));
        }
        kids.push_back(leaf);
      } else {
        int node = t.add_node(-2);
        kids.push_back(node);
        pending.push_back({node, static_cast<NT>(s.id), kid_ctx, e.depth + 1});
      }
    }
    t.at(e.node).kids = std::move(kids);
    if (t.size() > limits.max_nodes) {
      return GenFailure{GenFailure::Kind::NodesExceeded,
                        "derivation exceeded " + std::to_string(limits.max_nodes) + " nodes"};
    }
    // Push in reverse so the leftmost nonterminal expands next.
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) stack.push_back(*it);
  }
  return sk;
}

Skeleton make_skeleton_from_text(const std::string& text) {
  auto parsed = parse_design(text);
  if (!parsed.ok()) {
    throw std::runtime_error("skeleton fixture does not parse: " + parsed.error().message);
  }
  Skeleton sk;
  sk.tree = std::move(parsed).value();
  Tree& t = sk.tree;
  for (int leaf : t.leaves()) {
    Node& n = t.at(leaf);
    if (n.tok.kind != Tok::identifier) continue;
    const std::string& lx = n.tok.lexeme;
    if (lx.size() < 4 || lx.compare(0, 3, "ID_") != 0) continue;
    bool digits = true;
    for (size_t i = 3; i < lx.size(); ++i) {
      if (lx[i] < '0' || lx[i] > '9') digits = false;
    }
    if (!digits) continue;
    n.placeholder = true;
    n.ph_ord = std::stoi(lx.substr(3));
  }
  // Assign type-slot ordinals and the rule trace in preorder, mirroring the
  // generator's numbering.
  int type_ord = 0;
  std::vector<int> stack{t.root};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (t.is_leaf(id)) continue;
    sk.rule_trace.push_back(t.at(id).rule);
    if (t.at(id).rule == open_port_type_rule()) t.at(id).ph_ord = type_ord++;
    const auto& kids = t.at(id).kids;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return sk;
}

}  // namespace vgen
