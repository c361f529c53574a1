#pragma once

#include <map>
#include <string>
#include <vector>

#include "chronica/narrative.hpp"
#include "chronica/schema.hpp"
#include "chronica/temporal_graph.hpp"

namespace fixtures {

using namespace chronica;

inline CSet set_of(std::vector<Id> ids) { return CSet::from_names(schemas::set(), {{"X", std::move(ids)}}); }

inline CSetMorphism set_map(const CSet& from, const CSet& to, std::map<Id, Id> values) {
  return CSetMorphism::from_names(from, to, {{"X", std::move(values)}});
}

inline CSetMorphism same_names(const CSet& from, const CSet& to) { return CSetMorphism::inclusion(from, to); }

/// Ice-cream snapshots over times 1..3 with spans whose apexes keep what
/// persisted.
inline GeneratingData icecream_persistent() {
  GeneratingData g;
  g.start = 1;
  CSet f11 = set_of({"a1", "a2", "b", "c"}), f22 = set_of({"a★", "b′", "c"}), f33 = set_of({"a★", "b′", "c′"});
  CSet f12 = set_of({"a1", "a2", "c"}), f23 = set_of({"a★", "b′"});
  g.snapshots = {f11, f22, f33};
  g.bridges = {f12, f23};
  g.left = {same_names(f12, f11), same_names(f23, f22)};
  g.right = {set_map(f12, f22, {{"a1", "a★"}, {"a2", "a★"}, {"c", "c"}}), same_names(f23, f33)};
  return g;
}

/// The same snapshots with cospans into what accumulated.
inline GeneratingData icecream_cumulative() {
  GeneratingData g;
  g.start = 1;
  CSet f11 = set_of({"a1", "a2", "b", "c"}), f22 = set_of({"a★", "b′", "c"}), f33 = set_of({"a★", "b′", "c′"});
  CSet f12 = set_of({"a★", "b", "b′", "c"}), f23 = set_of({"a★", "b′", "c", "c′"});
  g.snapshots = {f11, f22, f33};
  g.bridges = {f12, f23};
  g.left = {set_map(f11, f12, {{"a1", "a★"}, {"a2", "a★"}, {"b", "b"}, {"c", "c"}}), same_names(f22, f23)};
  g.right = {same_names(f22, f12), same_names(f33, f23)};
  return g;
}

/// A functorial presheaf on the intervals of [1,3] whose top object is too
/// large to be the pullback over the cover at 2.
inline Narrative overfull() {
  CSet f11 = set_of({"a", "b", "c"}), f12 = set_of({"a", "c"}), f22 = set_of({"a", "b′", "c"});
  CSet f23 = set_of({"a", "b′"}), f33 = set_of({"a", "b′", "c′"}), f13 = set_of({"a", "w", "x", "y", "z"});
  std::map<Interval, CSet> objects{{{1, 1}, f11}, {{1, 2}, f12}, {{2, 2}, f22},
                                   {{2, 3}, f23}, {{3, 3}, f33}, {{1, 3}, f13}};
  std::map<Id, Id> to_a{{"a", "a"}, {"w", "a"}, {"x", "a"}, {"y", "a"}, {"z", "a"}};
  std::map<Narrative::Inclusion, CSetMorphism> maps{
      {{{1, 3}, {1, 2}}, set_map(f13, f12, to_a)},
      {{{1, 3}, {2, 3}}, set_map(f13, f23, to_a)},
      {{{1, 2}, {1, 1}}, same_names(f12, f11)},
      {{{1, 2}, {2, 2}}, same_names(f12, f22)},
      {{{2, 3}, {2, 2}}, same_names(f23, f22)},
      {{{2, 3}, {3, 3}}, same_names(f23, f33)},
  };
  return Narrative::make(Flavor::Persistent, TimeLattice::span(3, 1, 3), objects, maps);
}

/// Constant narrative: X at every interval with identity maps.
inline GeneratingData constant_data(const CSet& x, Time steps) {
  GeneratingData g;
  for (Time t = 0; t <= steps; ++t) g.snapshots.push_back(x);
  for (Time t = 0; t < steps; ++t) {
    g.bridges.push_back(x);
    g.left.push_back(CSetMorphism::identity(x));
    g.right.push_back(CSetMorphism::identity(x));
  }
  return g;
}

/// Three snapshots on {a,b,c,d}: a 4-cycle, the two diagonals, and the
/// diagonals plus ad and bc.
inline K3TemporalGraph square() {
  return K3TemporalGraph::from_labels({}, {{{"a", "b"}, {"b", "c"}, {"c", "d"}, {"a", "d"}},
                                           {{"a", "c"}, {"b", "d"}},
                                           {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}}});
}

/// Edge count between two vertices in either orientation.
inline std::size_t edges_between(const CSet& g, const Id& u, const Id& v) {
  std::size_t n = 0;
  for (const auto& e : g.carrier("E")) {
    const Id s = *g.apply("s", e), t = *g.apply("t", e);
    if ((s == u && t == v) || (s == v && t == u)) ++n;
  }
  return n;
}

}  // namespace fixtures
