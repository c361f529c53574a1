#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chronica/cset.hpp"
#include "chronica/narrative.hpp"
#include "chronica/schema.hpp"
#include "chronica/timecat.hpp"

namespace chronica {

enum class Continuity { Limits, Colimits, Both };

inline std::string to_string(Continuity c) {
  switch (c) {
    case Continuity::Limits: return "preserves-limits";
    case Continuity::Colimits: return "preserves-colimits";
    case Continuity::Both: return "both";
  }
  return "?";
}

class ContinuityError : public std::invalid_argument {
 public:
  ContinuityError(const std::string& what, Continuity required)
      : std::invalid_argument(what), required_(required) {}
  Continuity required() const { return required_; }

 private:
  Continuity required_;
};

/// The functor C-Set -> D-Set given by precomposition with a schema
/// morphism D -> C: each D-sort reads the carrier of its image sort and
/// each D-arrow follows its image path.
class PointwiseFunctor {
 public:
  PointwiseFunctor(std::string name, SchemaPtr domain, SchemaPtr codomain, std::vector<std::size_t> sort_map,
                   std::vector<ArrowPath> arrow_map, Continuity continuity)
      : name_(std::move(name)),
        domain_(std::move(domain)),
        codomain_(std::move(codomain)),
        sort_map_(std::move(sort_map)),
        arrow_map_(std::move(arrow_map)),
        continuity_(continuity) {
    const Schema& d = *domain_;
    const Schema& c = *codomain_;
    if (sort_map_.size() != c.sort_count() || arrow_map_.size() != c.arrow_count())
      throw std::invalid_argument(name_ + ": schema morphism does not cover " + c.name());
    for (std::size_t k : sort_map_)
      if (k >= d.sort_count()) throw std::invalid_argument(name_ + ": sort image out of range");
    for (std::size_t a = 0; a < c.arrow_count(); ++a) {
      const ArrowPath& p = arrow_map_[a];
      if (p.start != sort_map_[c.arrows()[a].source])
        throw std::invalid_argument(name_ + ": image of " + c.arrows()[a].name + " starts at the wrong sort");
      std::size_t at = p.start;
      for (std::size_t x : p.arrows) {
        if (x >= d.arrow_count() || d.arrows()[x].source != at)
          throw std::invalid_argument(name_ + ": image of " + c.arrows()[a].name + " is not a path");
        at = d.arrows()[x].target;
      }
      if (at != sort_map_[c.arrows()[a].target])
        throw std::invalid_argument(name_ + ": image of " + c.arrows()[a].name + " ends at the wrong sort");
    }
  }

  /// Builds a schema morphism from names: sort and arrow of the codomain
  /// mapped to a domain sort and a path of domain arrow names.
  static PointwiseFunctor from_names(std::string name, SchemaPtr domain, SchemaPtr codomain,
                                     const std::map<std::string, std::string>& sorts,
                                     const std::map<std::string, std::vector<std::string>>& arrows,
                                     Continuity continuity = Continuity::Both) {
    std::vector<std::size_t> sm;
    for (const auto& s : codomain->sorts()) {
      auto it = sorts.find(s);
      if (it == sorts.end()) throw std::invalid_argument(name + ": no image for sort " + s);
      sm.push_back(domain->sort_index(it->second));
    }
    std::vector<ArrowPath> am;
    for (const auto& a : codomain->arrows()) {
      auto it = arrows.find(a.name);
      if (it == arrows.end()) throw std::invalid_argument(name + ": no image for arrow " + a.name);
      ArrowPath p{sm[a.source], {}};
      for (const auto& x : it->second) p.arrows.push_back(domain->arrow_index(x));
      am.push_back(std::move(p));
    }
    return PointwiseFunctor(std::move(name), std::move(domain), std::move(codomain), std::move(sm), std::move(am),
                            continuity);
  }

  /// Evaluation at one sort, landing in plain sets.
  static PointwiseFunctor evaluation(const SchemaPtr& domain, const std::string& sort) {
    return PointwiseFunctor("eval:" + sort, domain, schemas::set(), {domain->sort_index(sort)}, {},
                            Continuity::Both);
  }

  static PointwiseFunctor identity(const SchemaPtr& schema) {
    std::vector<std::size_t> sm;
    for (std::size_t k = 0; k < schema->sort_count(); ++k) sm.push_back(k);
    std::vector<ArrowPath> am;
    for (std::size_t a = 0; a < schema->arrow_count(); ++a) am.push_back({schema->arrows()[a].source, {a}});
    return PointwiseFunctor("id", schema, schema, std::move(sm), std::move(am), Continuity::Both);
  }

  const std::string& name() const { return name_; }
  const SchemaPtr& domain() const { return domain_; }
  const SchemaPtr& codomain() const { return codomain_; }
  Continuity continuity() const { return continuity_; }

  CSet operator()(const CSet& x) const {
    if (!same_schema(x.schema_ptr(), domain_))
      throw std::invalid_argument(name_ + ": expected an instance of " + domain_->name());
    Carriers cs;
    for (std::size_t k : sort_map_) cs.push_back(x.carrier(k));
    Actions as;
    for (const auto& p : arrow_map_) {
      std::vector<std::size_t> act;
      for (std::size_t e = 0; e < x.size(p.start); ++e) act.push_back(x.follow(p, e));
      as.push_back(std::move(act));
    }
    return CSet(codomain_, std::move(cs), std::move(as));
  }

  CSetMorphism operator()(const CSetMorphism& m) const {
    Components cs;
    for (std::size_t k : sort_map_) cs.push_back(m.component(k));
    return CSetMorphism((*this)(m.source()), (*this)(m.target()), std::move(cs));
  }

 private:
  std::string name_;
  SchemaPtr domain_, codomain_;
  std::vector<std::size_t> sort_map_;
  std::vector<ArrowPath> arrow_map_;
  Continuity continuity_;
};

/// Applies a functor to every object and map. Persistent narratives need a
/// limit-preserving functor, cumulative ones a colimit-preserving one.
inline Narrative change_base(const Narrative& n, const PointwiseFunctor& f) {
  const Continuity need = n.flavor() == Flavor::Persistent ? Continuity::Limits : Continuity::Colimits;
  if (f.continuity() != Continuity::Both && f.continuity() != need)
    throw ContinuityError(f.name() + " is declared " + to_string(f.continuity()) + " but a " +
                              to_string(n.flavor()) + " narrative needs " + to_string(need),
                          need);
  std::map<Interval, CSet> objects;
  for (const auto& iv : n.intervals()) objects.emplace(iv, f(n.object(iv)));
  std::map<Narrative::Inclusion, CSetMorphism> maps;
  for (const auto& [inc, m] : n.generating_maps()) maps.emplace(inc, f(m));
  return Narrative::make(n.flavor(), n.lattice(), objects, maps);
}

/// Restriction to a sub-join-semilattice, re-checked over its own covers.
inline Narrative change_resolution(const Narrative& n, const TimeLattice& s) {
  Narrative out = restrict_narrative(n, s);
  if (auto r = check(out); !r.ok()) throw std::logic_error("restriction broke the (co)sheaf condition: " +
                                                           r.issues.front().message);
  return out;
}

// ---------------------------------------------------------------------------
// Static properties of graph-like C-sets, read as undirected multigraphs.

struct StaticProperty {
  std::string name;
  std::function<bool(const CSet&)> holds;

  bool operator()(const CSet& x) const { return holds(x); }
};

namespace detail {

/// Undirected view of a graph-like C-set. With an involution `i` on edges
/// (symmetric schemas), e and i(e) count as one edge.
struct UndirectedView {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  explicit UndirectedView(const CSet& g) {
    const Schema& s = g.schema();
    if (!is_graph_like(s)) throw std::invalid_argument("graph property on non-graph schema " + s.name());
    vertices = g.size("V");
    const auto& src = g.action("s");
    const auto& tgt = g.action("t");
    const std::vector<std::size_t>* inv = nullptr;
    if (auto i = s.find_arrow("i"); i && s.arrows()[*i].source == s.sort_index("E") &&
                                    s.arrows()[*i].target == s.sort_index("E"))
      inv = &g.action(*i);
    for (std::size_t e = 0; e < src.size(); ++e) {
      if (inv && (*inv)[e] < e) continue;
      edges.emplace_back(std::min(src[e], tgt[e]), std::max(src[e], tgt[e]));
    }
  }

  bool has_loop() const {
    for (const auto& [u, v] : edges)
      if (u == v) return true;
    return false;
  }

  bool has_parallel() const {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges)
      if (!seen.insert(e).second) return true;
    return false;
  }

  std::size_t components() const {
    std::vector<std::size_t> parent(vertices);
    for (std::size_t v = 0; v < vertices; ++v) parent[v] = v;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
      return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    std::size_t count = vertices;
    for (const auto& [u, v] : edges) {
      std::size_t a = find(u), b = find(v);
      if (a != b) {
        parent[a] = b;
        --count;
      }
    }
    return count;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d(vertices, 0);
    for (const auto& [u, v] : edges) {
      ++d[u];
      ++d[v];
    }
    return d;
  }
};

}  // namespace detail

namespace properties {

/// At least k vertices and every pair of distinct vertices joined by an
/// edge in either orientation.
inline StaticProperty complete_at_least(std::size_t k) {
  return {"complete:" + std::to_string(k), [k](const CSet& g) {
            detail::UndirectedView v(g);
            if (v.vertices < k) return false;
            std::set<std::pair<std::size_t, std::size_t>> joined(v.edges.begin(), v.edges.end());
            for (std::size_t a = 0; a < v.vertices; ++a)
              for (std::size_t b = a + 1; b < v.vertices; ++b)
                if (!joined.count({a, b})) return false;
            return true;
          }};
}

/// Non-empty with a single connected component.
inline StaticProperty is_connected() {
  return {"connected", [](const CSet& g) { return detail::UndirectedView(g).components() == 1; }};
}

/// No loops and no parallel edges.
inline StaticProperty is_simple() {
  return {"simple", [](const CSet& g) {
            detail::UndirectedView v(g);
            return !v.has_loop() && !v.has_parallel();
          }};
}

/// Connected and acyclic (so |E| = |V| - 1 and no loops or parallels).
inline StaticProperty is_tree() {
  return {"tree", [](const CSet& g) {
            detail::UndirectedView v(g);
            return v.components() == 1 && v.edges.size() + 1 == v.vertices;
          }};
}

/// A tree with every vertex of degree at most two; a single vertex counts.
inline StaticProperty is_path() {
  return {"path", [](const CSet& g) {
            detail::UndirectedView v(g);
            if (v.components() != 1 || v.edges.size() + 1 != v.vertices) return false;
            for (std::size_t d : v.degrees())
              if (d > 2) return false;
            return true;
          }};
}

/// Parses "complete:K", "path", "tree", "connected" or "simple".
inline StaticProperty parse(const std::string& spec) {
  if (spec.rfind("complete:", 0) == 0) {
    const std::string k = spec.substr(9);
    std::size_t used = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(k, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (k.empty() || used != k.size()) throw std::invalid_argument("bad property '" + spec + "'");
    return complete_at_least(value);
  }
  if (spec == "path") return is_path();
  if (spec == "tree") return is_tree();
  if (spec == "connected") return is_connected();
  if (spec == "simple") return is_simple();
  throw std::invalid_argument("unknown property '" + spec + "'");
}

}  // namespace properties

struct TauResult {
  bool holds = true;
  std::optional<Interval> first_failure;

  explicit operator bool() const { return holds; }
};

/// Whether `p` holds at every interval of `s` (intervals in lattice order).
inline TauResult tau_satisfies(const Narrative& n, const TimeLattice& s, const StaticProperty& p) {
  if (!s.is_sublattice_of(n.lattice()))
    throw SublatticeError("tau_satisfies: lattice is not a sublattice of the narrative's");
  for (const auto& iv : s.intervals())
    if (!p(n.object(iv))) return {false, iv};
  return {};
}

inline TauResult tau_satisfies(const Narrative& n, const StaticProperty& p) {
  return tau_satisfies(n, n.lattice(), p);
}

}  // namespace chronica
