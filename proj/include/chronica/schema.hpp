#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chronica {

/// A generating arrow of a schema, referring to sorts by index.
struct Arrow {
  std::string name;
  std::size_t source = 0;
  std::size_t target = 0;

  friend bool operator==(const Arrow&, const Arrow&) = default;
};

/// A composable path of arrows starting at `start`, listed in the order
/// they are applied (so `{i, s}` means s after i).
struct ArrowPath {
  std::size_t start = 0;
  std::vector<std::size_t> arrows;

  friend bool operator==(const ArrowPath&, const ArrowPath&) = default;
};

struct PathEquation {
  ArrowPath lhs;
  ArrowPath rhs;

  friend bool operator==(const PathEquation&, const PathEquation&) = default;
};

/// A finitely presented category: sorts, generating arrows and path
/// equations. Instances of a schema are C-sets.
class Schema {
 public:
  Schema() = default;

  Schema(std::string name, std::vector<std::string> sorts,
         std::vector<Arrow> arrows, std::vector<PathEquation> equations = {})
      : name_(std::move(name)),
        sorts_(std::move(sorts)),
        arrows_(std::move(arrows)),
        equations_(std::move(equations)) {
    check_well_formed();
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<Arrow>& arrows() const { return arrows_; }
  const std::vector<PathEquation>& equations() const { return equations_; }

  std::size_t sort_count() const { return sorts_.size(); }
  std::size_t arrow_count() const { return arrows_.size(); }

  std::optional<std::size_t> find_sort(std::string_view name) const {
    auto it = std::find(sorts_.begin(), sorts_.end(), name);
    if (it == sorts_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - sorts_.begin());
  }

  std::optional<std::size_t> find_arrow(std::string_view name) const {
    for (std::size_t i = 0; i < arrows_.size(); ++i)
      if (arrows_[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t sort_index(std::string_view name) const {
    if (auto i = find_sort(name)) return *i;
    throw std::invalid_argument("schema " + name_ + " has no sort '" +
                                std::string(name) + "'");
  }

  std::size_t arrow_index(std::string_view name) const {
    if (auto i = find_arrow(name)) return *i;
    throw std::invalid_argument("schema " + name_ + " has no arrow '" +
                                std::string(name) + "'");
  }

  /// Sort reached by following `path`.
  std::size_t path_target(const ArrowPath& path) const {
    std::size_t at = path.start;
    for (std::size_t a : path.arrows) at = arrows_[a].target;
    return at;
  }

  /// Sorts ordered so that the source of every non-loop arrow precedes its
  /// target whenever the arrow graph allows it. Homomorphism search assigns
  /// variables in this order so that forced values propagate forwards.
  std::vector<std::size_t> propagation_order() const {
    std::vector<int> state(sorts_.size(), 0);
    std::vector<std::size_t> post;
    auto visit = [&](auto&& self, std::size_t s) -> void {
      state[s] = 1;
      for (const auto& a : arrows_)
        if (a.source == s && a.target != s && state[a.target] == 0)
          self(self, a.target);
      state[s] = 2;
      post.push_back(s);
    };
    // Start from sorts that no arrow enters, then sweep the rest.
    for (std::size_t s = 0; s < sorts_.size(); ++s) {
      bool entered = std::any_of(arrows_.begin(), arrows_.end(), [&](const Arrow& a) {
        return a.target == s && a.source != s;
      });
      if (!entered && state[s] == 0) visit(visit, s);
    }
    for (std::size_t s = 0; s < sorts_.size(); ++s)
      if (state[s] == 0) visit(visit, s);
    std::reverse(post.begin(), post.end());
    return post;
  }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  void check_well_formed() const {
    for (std::size_t i = 0; i < sorts_.size(); ++i)
      for (std::size_t j = i + 1; j < sorts_.size(); ++j)
        if (sorts_[i] == sorts_[j])
          throw std::invalid_argument("schema " + name_ + ": duplicate sort '" + sorts_[i] + "'");
    for (std::size_t i = 0; i < arrows_.size(); ++i) {
      const auto& a = arrows_[i];
      if (a.source >= sorts_.size() || a.target >= sorts_.size())
        throw std::invalid_argument("schema " + name_ + ": arrow '" + a.name +
                                    "' references an undeclared sort");
      for (std::size_t j = i + 1; j < arrows_.size(); ++j)
        if (arrows_[j].name == a.name)
          throw std::invalid_argument("schema " + name_ + ": duplicate arrow '" + a.name + "'");
    }
    for (const auto& eq : equations_) {
      for (const ArrowPath* p : {&eq.lhs, &eq.rhs}) {
        if (p->start >= sorts_.size())
          throw std::invalid_argument("schema " + name_ + ": equation path starts at undeclared sort");
        std::size_t at = p->start;
        for (std::size_t a : p->arrows) {
          if (a >= arrows_.size() || arrows_[a].source != at)
            throw std::invalid_argument("schema " + name_ + ": equation path is not composable");
          at = arrows_[a].target;
        }
      }
      if (eq.lhs.start != eq.rhs.start || path_target(eq.lhs) != path_target(eq.rhs))
        throw std::invalid_argument("schema " + name_ +
                                    ": equation sides have different endpoints");
    }
  }

  std::string name_;
  std::vector<std::string> sorts_;
  std::vector<Arrow> arrows_;
  std::vector<PathEquation> equations_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

inline bool same_schema(const SchemaPtr& a, const SchemaPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// Small helper for writing schemas by name.
class SchemaBuilder {
 public:
  explicit SchemaBuilder(std::string name) : name_(std::move(name)) {}

  SchemaBuilder& sort(std::string s) {
    sorts_.push_back(std::move(s));
    return *this;
  }

  SchemaBuilder& arrow(std::string name, std::string_view src, std::string_view tgt) {
    pending_arrows_.push_back({std::move(name), std::string(src), std::string(tgt)});
    return *this;
  }

  /// Both sides are arrow names in application order; an empty side is the
  /// identity on `start`.
  SchemaBuilder& equation(std::string_view start, std::vector<std::string> lhs,
                          std::vector<std::string> rhs) {
    pending_eqs_.push_back({std::string(start), std::move(lhs), std::move(rhs)});
    return *this;
  }

  SchemaPtr build() const {
    auto sort_of = [&](const std::string& s) {
      auto it = std::find(sorts_.begin(), sorts_.end(), s);
      if (it == sorts_.end())
        throw std::invalid_argument("schema " + name_ + ": undeclared sort '" + s + "'");
      return static_cast<std::size_t>(it - sorts_.begin());
    };
    std::vector<Arrow> arrows;
    for (const auto& p : pending_arrows_) arrows.push_back({p.name, sort_of(p.src), sort_of(p.tgt)});
    auto arrow_of = [&](const std::string& n) {
      for (std::size_t i = 0; i < arrows.size(); ++i)
        if (arrows[i].name == n) return i;
      throw std::invalid_argument("schema " + name_ + ": undeclared arrow '" + n + "'");
    };
    std::vector<PathEquation> eqs;
    for (const auto& e : pending_eqs_) {
      PathEquation eq;
      eq.lhs.start = eq.rhs.start = sort_of(e.start);
      for (const auto& n : e.lhs) eq.lhs.arrows.push_back(arrow_of(n));
      for (const auto& n : e.rhs) eq.rhs.arrows.push_back(arrow_of(n));
      eqs.push_back(std::move(eq));
    }
    return std::make_shared<const Schema>(name_, sorts_, std::move(arrows), std::move(eqs));
  }

 private:
  struct PendingArrow {
    std::string name, src, tgt;
  };
  struct PendingEq {
    std::string start;
    std::vector<std::string> lhs, rhs;
  };
  std::string name_;
  std::vector<std::string> sorts_;
  std::vector<PendingArrow> pending_arrows_;
  std::vector<PendingEq> pending_eqs_;
};

namespace schemas {

/// One sort `X`, no arrows: plain finite sets.
inline SchemaPtr set() {
  static const SchemaPtr s = SchemaBuilder("Set").sort("X").build();
  return s;
}

/// Directed multigraphs: s, t : E -> V.
inline SchemaPtr graph() {
  static const SchemaPtr s =
      SchemaBuilder("SGr").sort("E").sort("V").arrow("s", "E", "V").arrow("t", "E", "V").build();
  return s;
}

/// Symmetric graphs: i : E -> E with s.i = t and t.i = s.
inline SchemaPtr symmetric_graph() {
  static const SchemaPtr s = SchemaBuilder("SSGr")
                                 .sort("E").sort("V")
                                 .arrow("s", "E", "V").arrow("t", "E", "V").arrow("i", "E", "E")
                                 .equation("E", {"i", "s"}, {"t"})
                                 .equation("E", {"i", "t"}, {"s"})
                                 .build();
  return s;
}

/// Reflexive graphs with the single equation s.l = t.l.
inline SchemaPtr reflexive_graph() {
  static const SchemaPtr s = SchemaBuilder("SRGr")
                                 .sort("E").sort("V")
                                 .arrow("s", "E", "V").arrow("t", "E", "V").arrow("l", "V", "E")
                                 .equation("V", {"l", "s"}, {"l", "t"})
                                 .build();
  return s;
}

inline SchemaPtr symmetric_reflexive_graph() {
  static const SchemaPtr s = SchemaBuilder("SSRGr")
                                 .sort("E").sort("V")
                                 .arrow("s", "E", "V").arrow("t", "E", "V")
                                 .arrow("i", "E", "E").arrow("l", "V", "E")
                                 .equation("E", {"i", "s"}, {"t"})
                                 .equation("E", {"i", "t"}, {"s"})
                                 .equation("V", {"l", "s"}, {"l", "t"})
                                 .build();
  return s;
}

/// Direction of the half-edge/vertex arrow `e`.
enum class HalfEdgeIncidence { VertexToHalfEdge, HalfEdgeToVertex };

/// Half-edge graphs: inv : H -> H with inv.inv = id, plus the incidence
/// arrow `e` in the requested direction.
inline SchemaPtr half_edge_graph(HalfEdgeIncidence dir) {
  static const SchemaPtr vh = SchemaBuilder("SHeGr_VH")
                                  .sort("H").sort("V")
                                  .arrow("inv", "H", "H").arrow("e", "V", "H")
                                  .equation("H", {"inv", "inv"}, {})
                                  .build();
  static const SchemaPtr hv = SchemaBuilder("SHeGr_HV")
                                  .sort("H").sort("V")
                                  .arrow("inv", "H", "H").arrow("e", "H", "V")
                                  .equation("H", {"inv", "inv"}, {})
                                  .build();
  return dir == HalfEdgeIncidence::VertexToHalfEdge ? vh : hv;
}

/// Petri nets: tokens over species, input and output arcs between species
/// and transitions.
inline SchemaPtr petri() {
  static const SchemaPtr s = SchemaBuilder("Petri")
                                 .sort("Token").sort("Species").sort("Transition")
                                 .sort("Input").sort("Output")
                                 .arrow("ts", "Token", "Species")
                                 .arrow("is", "Input", "Species")
                                 .arrow("it", "Input", "Transition")
                                 .arrow("os", "Output", "Species")
                                 .arrow("ot", "Output", "Transition")
                                 .build();
  return s;
}

inline std::vector<SchemaPtr> builtins() {
  return {set(),
          graph(),
          symmetric_graph(),
          reflexive_graph(),
          symmetric_reflexive_graph(),
          half_edge_graph(HalfEdgeIncidence::VertexToHalfEdge),
          half_edge_graph(HalfEdgeIncidence::HalfEdgeToVertex),
          petri()};
}

inline SchemaPtr builtin(std::string_view name) {
  for (auto& s : builtins())
    if (s->name() == name) return s;
  return nullptr;
}

}  // namespace schemas

/// True for schemas with sorts E, V and arrows s, t : E -> V (every built-in
/// graph flavour qualifies).
inline bool is_graph_like(const Schema& s) {
  auto e = s.find_sort("E"), v = s.find_sort("V");
  auto src = s.find_arrow("s"), tgt = s.find_arrow("t");
  if (!e || !v || !src || !tgt) return false;
  const auto& a = s.arrows()[*src];
  const auto& b = s.arrows()[*tgt];
  return a.source == *e && a.target == *v && b.source == *e && b.target == *v;
}

}  // namespace chronica
