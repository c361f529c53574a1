#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chronica/cset.hpp"
#include "chronica/functor_tools.hpp"
#include "chronica/narrative.hpp"
#include "chronica/schema.hpp"
#include "chronica/timecat.hpp"

namespace chronica {

/// Unordered vertex pair stored as (smaller index, larger index).
using Edge = std::pair<std::size_t, std::size_t>;
using EdgeSet = std::set<Edge>;

inline Edge make_edge(std::size_t u, std::size_t v) { return {std::min(u, v), std::max(u, v)}; }

/// A vertex set with one edge set per time step 0..T.
class K3TemporalGraph {
 public:
  K3TemporalGraph() = default;

  K3TemporalGraph(std::vector<std::string> vertices, std::vector<EdgeSet> edges)
      : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    if (edges_.empty()) throw std::invalid_argument("temporal graph needs at least one time step");
    if (!std::is_sorted(vertices_.begin(), vertices_.end()) ||
        std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
      throw std::invalid_argument("temporal graph vertices must be sorted and distinct");
    for (const auto& v : vertices_)
      if (v.empty() || v.find('~') != std::string::npos)
        throw std::invalid_argument("vertex label '" + v + "' is empty or contains '~'");
    for (const auto& es : edges_)
      for (const auto& [u, v] : es)
        if (u > v || v >= vertices_.size()) throw std::invalid_argument("edge endpoint outside the vertex set");
  }

  /// From labels; vertices are the given ones plus every edge endpoint.
  static K3TemporalGraph from_labels(std::vector<std::string> vertices,
                                     const std::vector<std::vector<std::pair<std::string, std::string>>>& edges) {
    for (const auto& es : edges)
      for (const auto& [u, v] : es) {
        vertices.push_back(u);
        vertices.push_back(v);
      }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    auto idx = [&](const std::string& l) {
      return static_cast<std::size_t>(std::lower_bound(vertices.begin(), vertices.end(), l) - vertices.begin());
    };
    std::vector<EdgeSet> sets;
    for (const auto& es : edges) {
      sets.emplace_back();
      for (const auto& [u, v] : es) sets.back().insert(make_edge(idx(u), idx(v)));
    }
    return K3TemporalGraph(std::move(vertices), std::move(sets));
  }

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<EdgeSet>& edges() const { return edges_; }
  const EdgeSet& edges_at(Time t) const { return edges_.at(t); }
  Time lifetime() const { return static_cast<Time>(edges_.size() - 1); }

  std::size_t vertex_index(const std::string& label) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), label);
    if (it == vertices_.end() || *it != label) throw std::invalid_argument("unknown vertex '" + label + "'");
    return static_cast<std::size_t>(it - vertices_.begin());
  }

  std::string edge_id(const Edge& e) const { return vertices_[e.first] + "~" + vertices_[e.second]; }

  friend bool operator==(const K3TemporalGraph&, const K3TemporalGraph&) = default;

 private:
  std::vector<std::string> vertices_;
  std::vector<EdgeSet> edges_;
};

/// The graph (vertices, edges) as an instance of the graph schema, each
/// edge oriented from its smaller to its larger label and named "u~v".
inline CSet graph_cset(const K3TemporalGraph& g, const std::vector<std::size_t>& vertices, const EdgeSet& edges) {
  std::map<std::string, std::vector<Id>> carriers;
  std::map<std::string, std::map<Id, Id>> actions;
  for (std::size_t v : vertices) carriers["V"].push_back(g.vertices()[v]);
  carriers["E"];
  for (const auto& e : edges) {
    Id id = g.edge_id(e);
    carriers["E"].push_back(id);
    actions["s"][id] = g.vertices()[e.first];
    actions["t"][id] = g.vertices()[e.second];
  }
  return CSet::from_names(schemas::graph(), carriers, actions);
}

inline CSet graph_cset(const K3TemporalGraph& g, const EdgeSet& edges) {
  std::vector<std::size_t> all(g.vertices().size());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = v;
  return graph_cset(g, all, edges);
}

inline CSet snapshot(const K3TemporalGraph& g, Time t) { return graph_cset(g, g.edges_at(t)); }

namespace detail {

inline EdgeSet intersect(const EdgeSet& a, const EdgeSet& b) {
  EdgeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline EdgeSet unite(const EdgeSet& a, const EdgeSet& b) {
  EdgeSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline GeneratingData encoding_data(const K3TemporalGraph& g, bool persistent) {
  GeneratingData d;
  for (Time t = 0; t <= g.lifetime(); ++t) d.snapshots.push_back(snapshot(g, t));
  for (Time t = 0; t < g.lifetime(); ++t) {
    const EdgeSet& a = g.edges_at(t);
    const EdgeSet& b = g.edges_at(t + 1);
    CSet bridge = graph_cset(g, persistent ? intersect(a, b) : unite(a, b));
    d.bridges.push_back(bridge);
    if (persistent) {
      d.left.push_back(CSetMorphism::inclusion(bridge, d.snapshots[t]));
      d.right.push_back(CSetMorphism::inclusion(bridge, d.snapshots[t + 1]));
    } else {
      d.left.push_back(CSetMorphism::inclusion(d.snapshots[t], bridge));
      d.right.push_back(CSetMorphism::inclusion(d.snapshots[t + 1], bridge));
    }
  }
  return d;
}

}  // namespace detail

/// Generating data with bridge [t,t+1] = what persisted from t to t+1.
inline GeneratingData persistent_generating_data(const K3TemporalGraph& g) { return detail::encoding_data(g, true); }

/// Generating data with bridge [t,t+1] = everything seen at t or t+1.
inline GeneratingData cumulative_generating_data(const K3TemporalGraph& g) {
  return detail::encoding_data(g, false);
}

inline Narrative encode_persistent(const K3TemporalGraph& g) {
  return saturate_persistent(persistent_generating_data(g));
}

inline Narrative encode_cumulative(const K3TemporalGraph& g) {
  return saturate_cumulative(cumulative_generating_data(g));
}

/// Every vertex and every edge ever seen.
inline CSet underlying_static_graph(const K3TemporalGraph& g) {
  EdgeSet all;
  for (const auto& es : g.edges()) all.insert(es.begin(), es.end());
  return graph_cset(g, all);
}

/// Every vertex and the edges present at every time.
inline CSet persistence_graph(const K3TemporalGraph& g) {
  EdgeSet common = g.edges().front();
  for (const auto& es : g.edges()) common = detail::intersect(common, es);
  return graph_cset(g, common);
}

// ---------------------------------------------------------------------------
// Temporal walks

/// Vertices x = v0, ..., vn = y and times t1..tn: step i crosses the edge
/// {v(i-1), vi} present at time ti.
struct TemporalWalk {
  std::vector<std::size_t> vertices;
  std::vector<Time> times;

  std::size_t length() const { return times.size(); }

  bool strict() const {
    for (std::size_t i = 1; i < times.size(); ++i)
      if (times[i] <= times[i - 1]) return false;
    return true;
  }

  bool is_path() const {
    std::set<std::size_t> seen(vertices.begin(), vertices.end());
    return seen.size() == vertices.size();
  }

  friend auto operator<=>(const TemporalWalk&, const TemporalWalk&) = default;
};

/// Whether `w` is a temporal walk of g (strict if requested).
inline bool is_temporal_walk(const K3TemporalGraph& g, const TemporalWalk& w, bool strict) {
  if (w.vertices.size() != w.times.size() + 1) return false;
  for (std::size_t v : w.vertices)
    if (v >= g.vertices().size()) return false;
  for (std::size_t i = 0; i < w.times.size(); ++i) {
    if (w.times[i] > g.lifetime()) return false;
    if (!g.edges_at(w.times[i]).count(make_edge(w.vertices[i], w.vertices[i + 1]))) return false;
    if (i > 0 && (strict ? w.times[i] <= w.times[i - 1] : w.times[i] < w.times[i - 1])) return false;
  }
  return true;
}

inline std::string to_string(const K3TemporalGraph& g, const TemporalWalk& w) {
  std::string s = g.vertices()[w.vertices.front()];
  for (std::size_t i = 0; i < w.times.size(); ++i)
    s += " -" + std::to_string(w.times[i]) + "-> " + g.vertices()[w.vertices[i + 1]];
  return s;
}

struct WalkOptions {
  bool strict = false;
  /// Longest walk reported (in edges).
  std::size_t max_len = 0;
  /// Only walks visiting pairwise-distinct vertices.
  bool paths_only = false;
};

/// Every temporal (x,y)-walk with at most max_len edges, in depth-first
/// order (earlier times first, then smaller neighbour labels). Includes the
/// empty walk when x == y.
inline std::vector<TemporalWalk> temporal_walks(const K3TemporalGraph& g, std::size_t x, std::size_t y,
                                                WalkOptions opts) {
  const std::size_t nv = g.vertices().size();
  if (x >= nv || y >= nv) throw std::invalid_argument("temporal_walks: vertex out of range");
  // adjacency[t][u] = sorted neighbours of u at time t.
  std::vector<std::vector<std::vector<std::size_t>>> adj(g.lifetime() + 1, std::vector<std::vector<std::size_t>>(nv));
  for (Time t = 0; t <= g.lifetime(); ++t)
    for (const auto& [u, v] : g.edges_at(t)) {
      adj[t][u].push_back(v);
      if (u != v) adj[t][v].push_back(u);
    }
  for (auto& per : adj)
    for (auto& ns : per) std::sort(ns.begin(), ns.end());

  std::vector<TemporalWalk> out;
  TemporalWalk cur{{x}, {}};
  std::vector<char> on_walk(nv, 0);
  on_walk[x] = 1;
  std::function<void()> dfs = [&]() {
    const std::size_t at = cur.vertices.back();
    if (at == y) out.push_back(cur);
    if (cur.length() >= opts.max_len) return;
    Time from = 0;
    if (!cur.times.empty()) from = cur.times.back() + (opts.strict ? 1 : 0);
    for (Time t = from; t <= g.lifetime(); ++t)
      for (std::size_t next : adj[t][at]) {
        if (opts.paths_only && on_walk[next]) continue;
        cur.vertices.push_back(next);
        cur.times.push_back(t);
        ++on_walk[next];
        dfs();
        --on_walk[next];
        cur.vertices.pop_back();
        cur.times.pop_back();
      }
  };
  dfs();
  return out;
}

inline std::vector<TemporalWalk> temporal_walks(const K3TemporalGraph& g, const std::string& x, const std::string& y,
                                                WalkOptions opts) {
  return temporal_walks(g, g.vertex_index(x), g.vertex_index(y), opts);
}

/// Whether some temporal walk with at least n edges visits pairwise-distinct
/// vertices (times non-decreasing, or strictly increasing if `strict`).
inline bool has_temporal_path_at_least(const K3TemporalGraph& g, std::size_t n, bool strict = false) {
  const std::size_t nv = g.vertices().size();
  if (nv == 0) return false;
  if (n == 0) return true;
  if (n >= nv) return false;
  std::vector<char> used(nv, 0);
  std::function<bool(std::size_t, std::size_t, std::optional<Time>)> grow = [&](std::size_t at, std::size_t len,
                                                                              std::optional<Time> last) {
    if (len >= n) return true;
    Time from = last ? *last + (strict ? 1 : 0) : 0;
    for (Time t = from; t <= g.lifetime(); ++t)
      for (const auto& [u, v] : g.edges_at(t)) {
        std::size_t next;
        if (u == at) next = v;
        else if (v == at) next = u;
        else continue;
        if (used[next]) continue;
        used[next] = 1;
        bool ok = grow(next, len + 1, t);
        used[next] = 0;
        if (ok) return true;
      }
    return false;
  };
  for (std::size_t v = 0; v < nv; ++v) {
    used[v] = 1;
    bool ok = grow(v, 0, std::nullopt);
    used[v] = 0;
    if (ok) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Temporal cliques

using VertexSubset = std::vector<std::string>;

namespace detail {

inline void check_clique_params(const K3TemporalGraph& g, std::size_t k, std::size_t n) {
  if (k < 2) throw std::invalid_argument("clique size k must be at least 2");
  if (n < 1 || n > static_cast<std::size_t>(g.lifetime()) + 1)
    throw std::invalid_argument("window length n must lie in [1, T+1]");
  if (g.vertices().size() > 24) throw std::invalid_argument("clique enumeration supports at most 24 vertices");
}

inline VertexSubset labels_of(const K3TemporalGraph& g, std::uint32_t mask) {
  VertexSubset s;
  for (std::size_t v = 0; v < g.vertices().size(); ++v)
    if (mask >> v & 1U) s.push_back(g.vertices()[v]);
  return s;
}

}  // namespace detail

/// All S with |S| >= k such that in every window [a, a+n-1] inside [0,T]
/// each pair of distinct members is joined by an edge at some time of the
/// window. With `literal`, members must also each touch some edge in every
/// window (the reading that includes x == y), which only matters when the
/// pair condition is vacuous.
inline std::vector<VertexSubset> temporal_cliques_brute(const K3TemporalGraph& g, std::size_t k, std::size_t n,
                                                        bool literal = false) {
  detail::check_clique_params(g, k, n);
  const std::size_t nv = g.vertices().size();
  const Time T = g.lifetime();
  std::vector<std::vector<std::vector<char>>> joined;  // per window
  std::vector<std::vector<char>> touched;
  for (Time a = 0; a + n - 1 <= T; ++a) {
    joined.emplace_back(nv, std::vector<char>(nv, 0));
    touched.emplace_back(nv, 0);
    for (Time t = a; t <= a + n - 1; ++t)
      for (const auto& [u, v] : g.edges_at(t)) {
        joined.back()[u][v] = joined.back()[v][u] = 1;
        touched.back()[u] = touched.back()[v] = 1;
      }
  }
  std::vector<VertexSubset> out;
  for (std::uint32_t mask = 1; mask < (1U << nv); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) < k) continue;
    bool ok = true;
    for (std::size_t w = 0; w < joined.size() && ok; ++w)
      for (std::size_t x = 0; x < nv && ok; ++x) {
        if (!(mask >> x & 1U)) continue;
        if (literal && !touched[w][x]) ok = false;
        for (std::size_t y = x + 1; y < nv && ok; ++y)
          if ((mask >> y & 1U) && !joined[w][x][y]) ok = false;
      }
    if (ok) out.push_back(detail::labels_of(g, mask));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// The sub-C-set of a graph spanned by the named vertices.
inline CSet induced_subgraph(const CSet& g, const std::set<Id>& keep) {
  const Schema& s = g.schema();
  const std::size_t V = s.sort_index("V"), E = s.sort_index("E");
  std::map<std::string, std::vector<Id>> carriers;
  std::map<std::string, std::map<Id, Id>> actions;
  carriers["V"];
  carriers["E"];
  for (const auto& v : g.carrier(V))
    if (keep.count(v)) carriers["V"].push_back(v);
  const auto& src = g.action("s");
  const auto& tgt = g.action("t");
  for (std::size_t e = 0; e < g.size(E); ++e) {
    const Id& a = g.carrier(V)[src[e]];
    const Id& b = g.carrier(V)[tgt[e]];
    if (!keep.count(a) || !keep.count(b)) continue;
    const Id& id = g.carrier(E)[e];
    carriers["E"].push_back(id);
    actions["s"][id] = a;
    actions["t"][id] = b;
  }
  return CSet::from_names(g.schema_ptr(), carriers, actions);
}

/// Restricts every object of a graph narrative to the named vertices.
inline Narrative induced_subnarrative(const Narrative& n, const std::set<Id>& keep) {
  std::map<Interval, CSet> objects;
  for (const auto& iv : n.intervals()) objects.emplace(iv, induced_subgraph(n.object(iv), keep));
  std::map<Narrative::Inclusion, CSetMorphism> maps;
  const bool persistent = n.flavor() == Flavor::Persistent;
  for (const auto& [inc, m] : n.generating_maps()) {
    const CSet& from = objects.at(persistent ? inc.first : inc.second);
    const CSet& to = objects.at(persistent ? inc.second : inc.first);
    Components cs(from.schema().sort_count());
    for (std::size_t k = 0; k < cs.size(); ++k)
      for (const auto& id : from.carrier(k)) {
        const std::size_t i = *m.source().index_of(k, id);
        const Id& image = m.target().carrier(k)[m.component(k)[i]];
        auto j = to.index_of(k, image);
        if (!j) throw std::invalid_argument("induced_subnarrative: a map leaves the kept vertices");
        cs[k].push_back(*j);
      }
    maps.emplace(inc, CSetMorphism(from, to, std::move(cs)));
  }
  return Narrative::make(n.flavor(), n.lattice(), objects, maps);
}

/// The same family computed through narratives: S qualifies when the
/// sub-narrative of the cumulative encoding induced by S, restricted to the
/// intervals of length at least n, is complete on at least k vertices at
/// every interval.
inline std::vector<VertexSubset> temporal_cliques_narrative(const K3TemporalGraph& g, std::size_t k, std::size_t n) {
  detail::check_clique_params(g, k, n);
  const Narrative cumulative = encode_cumulative(g);
  const TimeLattice windows = sublattice(cumulative.lattice(), LatticeFilter::min_length(static_cast<Time>(n)));
  const StaticProperty complete = properties::complete_at_least(k);
  const std::size_t nv = g.vertices().size();
  std::vector<VertexSubset> out;
  for (std::uint32_t mask = 1; mask < (1U << nv); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) < k) continue;
    VertexSubset labels = detail::labels_of(g, mask);
    Narrative sub = induced_subnarrative(cumulative, std::set<Id>(labels.begin(), labels.end()));
    if (tau_satisfies(change_resolution(sub, windows), complete)) out.push_back(std::move(labels));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Path narratives

inline bool is_path_narrative(const Narrative& n) { return tau_satisfies(n, properties::is_path()).holds; }
inline bool is_tree_narrative(const Narrative& n) { return tau_satisfies(n, properties::is_tree()).holds; }

/// A cumulative path narrative traced by a walk together with its
/// inclusion into the cumulative encoding of g.
struct WalkNarrative {
  Narrative path;
  NarrativeMorphism into;
};

namespace detail {

/// Instant objects as (vertex set, edge set) choices.
struct InstantChoice {
  std::vector<std::size_t> vertices;
  EdgeSet edges;
};

/// Builds the cumulative narrative whose instants are the given subgraphs
/// and whose bridges are unions of neighbouring instants, with the maps into
/// encode_cumulative(g) induced by the names. Nullopt if some piece is not a
/// subgraph of the corresponding encoding object.
inline std::optional<WalkNarrative> narrative_from_instants(const K3TemporalGraph& g,
                                                            const std::vector<InstantChoice>& instants,
                                                            const Narrative& encoding) {
  GeneratingData d;
  std::vector<CSet> instant_objects;
  for (const auto& c : instants) d.snapshots.push_back(graph_cset(g, c.vertices, c.edges));
  for (std::size_t t = 0; t + 1 < instants.size(); ++t) {
    std::set<std::size_t> vs(instants[t].vertices.begin(), instants[t].vertices.end());
    vs.insert(instants[t + 1].vertices.begin(), instants[t + 1].vertices.end());
    CSet bridge = graph_cset(g, {vs.begin(), vs.end()}, unite(instants[t].edges, instants[t + 1].edges));
    d.bridges.push_back(bridge);
    d.left.push_back(CSetMorphism::inclusion(d.snapshots[t], bridge));
    d.right.push_back(CSetMorphism::inclusion(d.snapshots[t + 1], bridge));
  }
  Narrative path = saturate_cumulative(d);
  std::map<Interval, CSetMorphism> gen;
  try {
    for (Time t = 0; t < instants.size(); ++t) {
      Interval iv = Interval::instant(t);
      gen.emplace(iv, CSetMorphism::inclusion(path.object(iv), encoding.object(iv)));
      if (t + 1 < instants.size()) {
        Interval b(t, t + 1);
        gen.emplace(b, CSetMorphism::inclusion(path.object(b), encoding.object(b)));
      }
    }
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  auto m = extend_morphism(path, encoding, gen);
  if (!m) return std::nullopt;
  return WalkNarrative{path, *m};
}

}  // namespace detail

/// The path narrative of a walk: at time t the edges crossed at t, or the
/// vertex the walker sits on if none.
inline std::optional<WalkNarrative> walk_narrative(const K3TemporalGraph& g, const TemporalWalk& w,
                                                   const Narrative& encoding) {
  std::vector<detail::InstantChoice> instants(g.lifetime() + 1);
  std::size_t step = 0;
  for (Time t = 0; t <= g.lifetime(); ++t) {
    auto& c = instants[t];
    std::set<std::size_t> vs;
    while (step < w.times.size() && w.times[step] == t) {
      c.edges.insert(make_edge(w.vertices[step], w.vertices[step + 1]));
      vs.insert(w.vertices[step]);
      vs.insert(w.vertices[step + 1]);
      ++step;
    }
    if (vs.empty()) vs.insert(w.vertices[step]);
    c.vertices.assign(vs.begin(), vs.end());
  }
  return detail::narrative_from_instants(g, instants, encoding);
}

/// A strict walk read off a path narrative whose instants carry at most one
/// edge: the edges are crossed in time order. Without edges the walk is the
/// empty one at the vertex every instant shows. Nullopt if no walk fits.
inline std::optional<TemporalWalk> walk_from_path_narrative(const K3TemporalGraph& g, const Narrative& path) {
  std::vector<std::pair<Edge, Time>> crossed;
  std::set<std::size_t> idle;
  for (Time t = 0; t <= path.intervals().back().hi; ++t) {
    const CSet& obj = path.object(Interval::instant(t));
    if (obj.size("E") > 1) return std::nullopt;
    if (obj.size("E") == 1) {
      const Id& e = obj.carrier("E")[0];
      crossed.push_back({make_edge(g.vertex_index(*obj.apply("s", e)), g.vertex_index(*obj.apply("t", e))), t});
    } else {
      for (const auto& v : obj.carrier("V")) idle.insert(g.vertex_index(v));
    }
  }
  if (crossed.empty()) {
    if (idle.size() != 1) return std::nullopt;
    return TemporalWalk{{*idle.begin()}, {}};
  }
  for (std::size_t start : {crossed.front().first.first, crossed.front().first.second}) {
    TemporalWalk w{{start}, {}};
    bool ok = true;
    for (const auto& [e, t] : crossed) {
      const std::size_t at = w.vertices.back();
      if (e.first == at)
        w.vertices.push_back(e.second);
      else if (e.second == at)
        w.vertices.push_back(e.first);
      else {
        ok = false;
        break;
      }
      w.times.push_back(t);
    }
    if (ok) return w;
  }
  return std::nullopt;
}

/// Every cumulative path narrative whose instants are a single vertex or a
/// single edge of g, whose bridges are unions of neighbouring instants, and
/// which includes monically into encode_cumulative(g).
inline std::vector<WalkNarrative> monic_path_narratives(const K3TemporalGraph& g, const Narrative& encoding,
                                                        std::size_t limit = 0) {
  const std::size_t nv = g.vertices().size();
  std::vector<WalkNarrative> out;
  std::vector<detail::InstantChoice> chosen;
  const StaticProperty path = properties::is_path();
  auto choices = [&](Time t) {
    std::vector<detail::InstantChoice> cs;
    for (std::size_t v = 0; v < nv; ++v) cs.push_back({{v}, {}});
    for (const auto& e : g.edges_at(t)) {
      std::vector<std::size_t> vs{e.first};
      if (e.second != e.first) vs.push_back(e.second);
      cs.push_back({vs, {e}});
    }
    return cs;
  };
  std::function<void(Time)> extend = [&](Time t) {
    if (limit && out.size() >= limit) return;
    if (t > g.lifetime()) {
      auto wn = detail::narrative_from_instants(g, chosen, encoding);
      if (!wn || !is_path_narrative(wn->path) || !is_mono_morphism(wn->into) || !check_morphism(wn->into).empty())
        return;
      out.push_back(std::move(*wn));
      return;
    }
    for (auto& c : choices(t)) {
      if (!chosen.empty()) {
        // The bridge with the previous instant must already be a path.
        const auto& prev = chosen.back();
        std::set<std::size_t> vs(prev.vertices.begin(), prev.vertices.end());
        vs.insert(c.vertices.begin(), c.vertices.end());
        if (!path(graph_cset(g, {vs.begin(), vs.end()}, detail::unite(prev.edges, c.edges)))) continue;
      }
      chosen.push_back(std::move(c));
      extend(t + 1);
      chosen.pop_back();
    }
  };
  extend(0);
  return out;
}

}  // namespace chronica
