#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chronica/cset.hpp"

namespace chronica {

struct DiagramEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  CSetMorphism map;
};

/// A finite diagram of C-sets: one object per node and one morphism per
/// edge. Node labels are used for provenance when colimit element names
/// collide.
struct Diagram {
  std::vector<std::string> labels;
  std::vector<CSet> objects;
  std::vector<DiagramEdge> edges;

  std::size_t add_node(std::string label, CSet object) {
    labels.push_back(std::move(label));
    objects.push_back(std::move(object));
    return objects.size() - 1;
  }

  void add_edge(std::size_t from, std::size_t to, CSetMorphism map) {
    edges.push_back({from, to, std::move(map)});
  }

  /// Throws unless all objects share a schema and every edge morphism
  /// runs between its endpoint objects.
  void check() const {
    if (objects.empty()) throw std::invalid_argument("diagram has no nodes");
    if (labels.size() != objects.size()) throw std::invalid_argument("diagram labels mismatch");
    for (const auto& o : objects)
      if (!same_schema(o.schema_ptr(), objects.front().schema_ptr()))
        throw std::invalid_argument("diagram objects have different schemas");
    for (const auto& e : edges) {
      if (e.from >= objects.size() || e.to >= objects.size())
        throw std::invalid_argument("diagram edge references a missing node");
      if (!(e.map.source() == objects[e.from]) || !(e.map.target() == objects[e.to]))
        throw std::invalid_argument("diagram edge " + labels[e.from] + " -> " + labels[e.to] +
                                    " does not match its endpoint objects");
    }
  }
};

/// Apex with one leg per diagram node (apex -> node).
struct Cone {
  CSet apex;
  std::vector<CSetMorphism> legs;
};

/// Apex with one leg per diagram node (node -> apex).
struct Cocone {
  CSet apex;
  std::vector<CSetMorphism> legs;
};

namespace detail {

/// Nodes whose components determine a whole consistent tuple: those with no
/// incoming edge, plus one representative of every part of the diagram not
/// reachable from them.
inline std::vector<std::size_t> key_nodes(const Diagram& d) {
  const std::size_t n = d.objects.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<char> has_in(n, 0);
  for (const auto& e : d.edges) {
    succ[e.from].push_back(e.to);
    if (e.from != e.to) has_in[e.to] = 1;
  }
  std::vector<char> reached(n, 0);
  auto mark = [&](std::size_t s) {
    std::vector<std::size_t> stack{s};
    reached[s] = 1;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : succ[u])
        if (!reached[v]) {
          reached[v] = 1;
          stack.push_back(v);
        }
    }
  };
  std::vector<std::size_t> keys;
  for (std::size_t i = 0; i < n; ++i)
    if (!has_in[i]) {
      keys.push_back(i);
      mark(i);
    }
  for (std::size_t i = 0; i < n; ++i)
    if (!reached[i]) {
      keys.push_back(i);
      mark(i);
    }
  return keys;
}

inline std::string tuple_id(const std::vector<std::string>& parts) {
  if (parts.size() == 1) return parts.front();
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out + ")";
}

/// Enumerates consistent tuples of one sort by branching on key nodes and
/// propagating along edges.
class TupleSearch {
 public:
  TupleSearch(const Diagram& d, std::size_t sort, const std::vector<std::size_t>& keys)
      : d_(d), sort_(sort), keys_(keys), value_(d.objects.size(), kUndefined) {
    out_.resize(d.objects.size());
    for (std::size_t e = 0; e < d.edges.size(); ++e) out_[d.edges[e].from].push_back(e);
  }

  std::vector<std::vector<std::size_t>> run() {
    descend(0);
    return std::move(found_);
  }

 private:
  bool set(std::size_t node, std::size_t x) {
    if (value_[node] != kUndefined) return value_[node] == x;
    value_[node] = x;
    trail_.push_back(node);
    for (std::size_t e : out_[node]) {
      const auto& edge = d_.edges[e];
      std::size_t y = edge.map.component(sort_)[x];
      if (y == kUndefined || !set(edge.to, y)) return false;
    }
    return true;
  }

  void descend(std::size_t i) {
    if (i == keys_.size()) {
      found_.push_back(value_);
      return;
    }
    std::size_t node = keys_[i];
    for (std::size_t x = 0; x < d_.objects[node].size(sort_); ++x) {
      std::size_t mark = trail_.size();
      if (set(node, x)) descend(i + 1);
      while (trail_.size() > mark) {
        value_[trail_.back()] = kUndefined;
        trail_.pop_back();
      }
    }
  }

  const Diagram& d_;
  std::size_t sort_;
  const std::vector<std::size_t>& keys_;
  std::vector<std::size_t> value_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> trail_;
  std::vector<std::vector<std::size_t>> found_;
};

/// Minimal union-find with path halving; the smaller index wins a union.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Limit of a finite diagram, computed sort-wise as the set of consistent
/// tuples. An element is named by the components at the key nodes, e.g.
/// `(a1,a*)`; with a single key node the component's own ID is reused.
inline Cone finite_limit(const Diagram& d) {
  d.check();
  const Schema& s = d.objects.front().schema();
  const SchemaPtr& sp = d.objects.front().schema_ptr();
  const std::size_t n = d.objects.size();
  const auto keys = detail::key_nodes(d);

  Carriers carriers(s.sort_count());
  std::vector<std::vector<std::vector<std::size_t>>> tuples(s.sort_count());
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> lookup(s.sort_count());
  for (std::size_t k = 0; k < s.sort_count(); ++k) {
    auto found = detail::TupleSearch(d, k, keys).run();
    std::vector<std::pair<Id, std::vector<std::size_t>>> named;
    for (auto& t : found) {
      std::vector<std::string> parts;
      for (std::size_t key : keys) parts.push_back(d.objects[key].carrier(k)[t[key]]);
      named.emplace_back(detail::tuple_id(parts), std::move(t));
    }
    std::sort(named.begin(), named.end());
    for (std::size_t i = 1; i < named.size(); ++i)
      if (named[i].first == named[i - 1].first)
        throw std::logic_error("finite_limit: ambiguous tuple name '" + named[i].first + "'");
    for (std::size_t i = 0; i < named.size(); ++i) {
      carriers[k].push_back(named[i].first);
      lookup[k][named[i].second] = i;
      tuples[k].push_back(std::move(named[i].second));
    }
  }

  Actions actions(s.arrow_count());
  for (std::size_t a = 0; a < s.arrow_count(); ++a) {
    const auto& arrow = s.arrows()[a];
    for (const auto& t : tuples[arrow.source]) {
      std::vector<std::size_t> image(n);
      for (std::size_t i = 0; i < n; ++i) image[i] = d.objects[i].action(a)[t[i]];
      auto it = lookup[arrow.target].find(image);
      actions[a].push_back(it == lookup[arrow.target].end() ? kUndefined : it->second);
    }
  }
  CSet apex(sp, std::move(carriers), std::move(actions));

  Cone cone{apex, {}};
  for (std::size_t i = 0; i < n; ++i) {
    Components cs(s.sort_count());
    for (std::size_t k = 0; k < s.sort_count(); ++k)
      for (const auto& t : tuples[k]) cs[k].push_back(t[i]);
    cone.legs.emplace_back(apex, d.objects[i], std::move(cs));
  }
  return cone;
}

/// Colimit of a finite diagram: sort-wise quotient of the disjoint union by
/// the equivalence generated by the edges. A class is named after its
/// smallest member ID; when two classes would share a name, every class but
/// the one whose named member sits in the earliest node gets `@label`.
inline Cocone finite_colimit(const Diagram& d) {
  d.check();
  const Schema& s = d.objects.front().schema();
  const SchemaPtr& sp = d.objects.front().schema_ptr();
  const std::size_t n = d.objects.size();

  std::vector<std::vector<std::size_t>> cls(s.sort_count());  // flat element -> class
  Carriers carriers(s.sort_count());
  std::vector<std::vector<std::size_t>> offset(s.sort_count(), std::vector<std::size_t>(n + 1, 0));

  for (std::size_t k = 0; k < s.sort_count(); ++k) {
    for (std::size_t i = 0; i < n; ++i) offset[k][i + 1] = offset[k][i] + d.objects[i].size(k);
    const std::size_t total = offset[k][n];
    detail::DisjointSets uf(total);
    for (const auto& e : d.edges) {
      const auto& comp = e.map.component(k);
      for (std::size_t x = 0; x < comp.size(); ++x)
        uf.unite(offset[k][e.from] + x, offset[k][e.to] + comp[x]);
    }
    // Best (name, node) per root.
    std::map<std::size_t, std::pair<Id, std::size_t>> best;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t x = 0; x < d.objects[i].size(k); ++x) {
        std::size_t r = uf.find(offset[k][i] + x);
        const Id& id = d.objects[i].carrier(k)[x];
        auto it = best.find(r);
        if (it == best.end() || id < it->second.first ||
            (id == it->second.first && i < it->second.second))
          best[r] = {id, i};
      }
    std::map<Id, std::vector<std::pair<std::size_t, std::size_t>>> by_name;  // name -> (node, root)
    for (const auto& [root, nb] : best) by_name[nb.first].push_back({nb.second, root});
    std::map<std::size_t, Id> name_of;
    std::set<Id> taken;
    for (auto& [name, group] : by_name) {
      std::sort(group.begin(), group.end());
      name_of[group.front().second] = name;
      taken.insert(name);
    }
    for (auto& [name, group] : by_name)
      for (std::size_t g = 1; g < group.size(); ++g) {
        Id alt = name + "@" + d.labels[group[g].first];
        while (taken.count(alt) || by_name.count(alt)) alt += "'";
        taken.insert(alt);
        name_of[group[g].second] = alt;
      }
    std::vector<std::pair<Id, std::size_t>> ordered;
    for (const auto& [root, name] : name_of) ordered.emplace_back(name, root);
    std::sort(ordered.begin(), ordered.end());
    std::map<std::size_t, std::size_t> index_of_root;
    for (std::size_t c = 0; c < ordered.size(); ++c) {
      carriers[k].push_back(ordered[c].first);
      index_of_root[ordered[c].second] = c;
    }
    cls[k].resize(total);
    for (std::size_t f = 0; f < total; ++f) cls[k][f] = index_of_root[uf.find(f)];
  }

  Actions actions(s.arrow_count());
  for (std::size_t a = 0; a < s.arrow_count(); ++a) {
    const auto& arrow = s.arrows()[a];
    actions[a].assign(carriers[arrow.source].size(), kUndefined);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t x = 0; x < d.objects[i].size(arrow.source); ++x) {
        std::size_t c = cls[arrow.source][offset[arrow.source][i] + x];
        std::size_t y = d.objects[i].action(a)[x];
        if (y == kUndefined) continue;
        actions[a][c] = cls[arrow.target][offset[arrow.target][i] + y];
      }
  }
  CSet apex(sp, std::move(carriers), std::move(actions));

  Cocone cocone{apex, {}};
  for (std::size_t i = 0; i < n; ++i) {
    Components cs(s.sort_count());
    for (std::size_t k = 0; k < s.sort_count(); ++k)
      for (std::size_t x = 0; x < d.objects[i].size(k); ++x) cs[k].push_back(cls[k][offset[k][i] + x]);
    cocone.legs.emplace_back(d.objects[i], apex, std::move(cs));
  }
  return cocone;
}

/// Unique map from `probe` into the limit, or nullopt if the probe legs do
/// not form a cone over the same diagram.
inline std::optional<CSetMorphism> mediate_limit(const Cone& limit, const Cone& probe) {
  const Schema& s = limit.apex.schema();
  if (probe.legs.size() != limit.legs.size()) return std::nullopt;
  const std::size_t n = limit.legs.size();
  Components cs(s.sort_count());
  for (std::size_t k = 0; k < s.sort_count(); ++k) {
    std::map<std::vector<std::size_t>, std::size_t> at;
    for (std::size_t x = 0; x < limit.apex.size(k); ++x) {
      std::vector<std::size_t> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = limit.legs[i].component(k)[x];
      at[t] = x;
    }
    for (std::size_t p = 0; p < probe.apex.size(k); ++p) {
      std::vector<std::size_t> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = probe.legs[i].component(k)[p];
      auto it = at.find(t);
      if (it == at.end()) return std::nullopt;
      cs[k].push_back(it->second);
    }
  }
  CSetMorphism m(probe.apex, limit.apex, std::move(cs));
  if (!is_valid(m)) return std::nullopt;
  return m;
}

/// Unique map out of the colimit into `probe`, or nullopt if the probe legs
/// do not form a cocone.
inline std::optional<CSetMorphism> mediate_colimit(const Cocone& colimit, const Cocone& probe) {
  const Schema& s = colimit.apex.schema();
  if (probe.legs.size() != colimit.legs.size()) return std::nullopt;
  Components cs(s.sort_count());
  for (std::size_t k = 0; k < s.sort_count(); ++k) {
    cs[k].assign(colimit.apex.size(k), kUndefined);
    for (std::size_t i = 0; i < colimit.legs.size(); ++i) {
      const auto& from = colimit.legs[i].component(k);
      const auto& to = probe.legs[i].component(k);
      if (from.size() != to.size()) return std::nullopt;
      for (std::size_t x = 0; x < from.size(); ++x) {
        auto& slot = cs[k][from[x]];
        if (slot == kUndefined)
          slot = to[x];
        else if (slot != to[x])
          return std::nullopt;
      }
    }
  }
  CSetMorphism m(colimit.apex, probe.apex, std::move(cs));
  if (!is_valid(m)) return std::nullopt;
  return m;
}

struct PullbackResult {
  CSet object;
  CSetMorphism left;   // P -> X
  CSetMorphism right;  // P -> Y
  Cone cone;           // over the cospan diagram (X, Z, Y)
};

struct PushoutResult {
  CSet object;
  CSetMorphism left;   // X -> Q
  CSetMorphism right;  // Y -> Q
  Cocone cocone;       // over the span diagram (X, Z, Y)
};

inline Diagram cospan_diagram(const CSetMorphism& f, const CSetMorphism& g) {
  Diagram d;
  d.add_node("x", f.source());
  d.add_node("z", f.target());
  d.add_node("y", g.source());
  d.add_edge(0, 1, f);
  d.add_edge(2, 1, g);
  return d;
}

inline Diagram span_diagram(const CSetMorphism& f, const CSetMorphism& g) {
  Diagram d;
  d.add_node("x", f.target());
  d.add_node("z", f.source());
  d.add_node("y", g.target());
  d.add_edge(1, 0, f);
  d.add_edge(1, 2, g);
  return d;
}

/// Pullback of X -f-> Z <-g- Y.
inline PullbackResult pullback(const CSetMorphism& f, const CSetMorphism& g) {
  if (!(f.target() == g.target())) throw std::invalid_argument("pullback: not a cospan");
  Cone c = finite_limit(cospan_diagram(f, g));
  return {c.apex, c.legs[0], c.legs[2], c};
}

/// Pushout of X <-f- Z -g-> Y.
inline PushoutResult pushout(const CSetMorphism& f, const CSetMorphism& g) {
  if (!(f.source() == g.source())) throw std::invalid_argument("pushout: not a span");
  Cocone c = finite_colimit(span_diagram(f, g));
  return {c.apex, c.legs[0], c.legs[2], c};
}

}  // namespace chronica
