#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chronica/limits.hpp"
#include "chronica/narrative.hpp"

namespace chronica {

namespace detail {

/// The restriction of a narrative to the intervals below `iv`, as a
/// diagram whose edges are the generating maps (in the data direction).
inline Diagram subinterval_diagram(const Narrative& n, const Interval& iv) {
  Diagram d;
  const auto subs = n.lattice().subintervals(iv);
  std::map<Interval, std::size_t> node;
  for (const auto& j : subs) node[j] = d.add_node(to_string(j), n.object(j));
  for (const auto& [big, small] : n.lattice().hasse_edges()) {
    if (!iv.contains(big)) continue;
    if (n.flavor() == Flavor::Persistent)
      d.add_edge(node.at(big), node.at(small), n.generator(big, small));
    else
      d.add_edge(node.at(small), node.at(big), n.generator(big, small));
  }
  return d;
}

/// Position of `j` among the subintervals of `iv`.
inline std::size_t node_of(const TimeLattice& l, const Interval& iv, const Interval& j) {
  const auto subs = l.subintervals(iv);
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i] == j) return i;
  throw std::out_of_range(to_string(j) + " is not below " + to_string(iv));
}

}  // namespace detail

/// K(F) together with the colimit cocones it was built from, so that
/// units, counits and morphism images can be mediated canonically.
struct Cumulation {
  Narrative result;
  std::vector<Cocone> cocones;  // aligned with the lattice intervals
};

/// P(F) together with its limit cones.
struct Persistence {
  Narrative result;
  std::vector<Cone> cones;
};

/// K: each interval gets the colimit of the persistent narrative over its
/// subintervals; corestrictions are the induced mediators.
inline Cumulation cumulate(const Narrative& f) {
  if (f.flavor() != Flavor::Persistent) throw std::invalid_argument("K expects a persistent narrative");
  const TimeLattice& l = f.lattice();
  Cumulation out;
  std::map<Interval, CSet> objects;
  for (const auto& iv : l.intervals()) {
    out.cocones.push_back(finite_colimit(detail::subinterval_diagram(f, iv)));
    objects.emplace(iv, out.cocones.back().apex);
  }
  std::map<Narrative::Inclusion, CSetMorphism> maps;
  for (const auto& [big, small] : l.hasse_edges()) {
    const Cocone& from = out.cocones[l.index(small)];
    const Cocone& to = out.cocones[l.index(big)];
    Cocone probe{to.apex, {}};
    for (const auto& j : l.subintervals(small)) probe.legs.push_back(to.legs[detail::node_of(l, big, j)]);
    auto m = mediate_colimit(from, probe);
    if (!m) throw std::logic_error("K: corestriction does not mediate");
    maps.emplace(Narrative::Inclusion{big, small}, *m);
  }
  out.result = Narrative::make(Flavor::Cumulative, l, objects, maps);
  return out;
}

/// P: each interval gets the limit of the cumulative narrative over its
/// subintervals; restrictions are the induced mediators.
inline Persistence persist(const Narrative& f) {
  if (f.flavor() != Flavor::Cumulative) throw std::invalid_argument("P expects a cumulative narrative");
  const TimeLattice& l = f.lattice();
  Persistence out;
  std::map<Interval, CSet> objects;
  for (const auto& iv : l.intervals()) {
    out.cones.push_back(finite_limit(detail::subinterval_diagram(f, iv)));
    objects.emplace(iv, out.cones.back().apex);
  }
  std::map<Narrative::Inclusion, CSetMorphism> maps;
  for (const auto& [big, small] : l.hasse_edges()) {
    const Cone& from = out.cones[l.index(big)];
    const Cone& to = out.cones[l.index(small)];
    Cone probe{from.apex, {}};
    for (const auto& j : l.subintervals(small)) probe.legs.push_back(from.legs[detail::node_of(l, big, j)]);
    auto m = mediate_limit(to, probe);
    if (!m) throw std::logic_error("P: restriction does not mediate");
    maps.emplace(Narrative::Inclusion{big, small}, *m);
  }
  out.result = Narrative::make(Flavor::Persistent, l, objects, maps);
  return out;
}

inline Narrative to_cumulative(const Narrative& f) { return cumulate(f).result; }
inline Narrative to_persistent(const Narrative& f) { return persist(f).result; }

/// K on a morphism m: F -> G of persistent narratives.
inline NarrativeMorphism cumulate(const NarrativeMorphism& m, const Cumulation& kf, const Cumulation& kg) {
  const TimeLattice& l = m.source.lattice();
  NarrativeMorphism out{kf.result, kg.result, {}};
  for (std::size_t i = 0; i < l.size(); ++i) {
    const Interval& iv = l.intervals()[i];
    Cocone probe{kg.cocones[i].apex, {}};
    const auto subs = l.subintervals(iv);
    for (std::size_t j = 0; j < subs.size(); ++j)
      probe.legs.push_back(compose(kg.cocones[i].legs[j], m.at(subs[j])));
    auto c = mediate_colimit(kf.cocones[i], probe);
    if (!c) throw std::logic_error("K: morphism image does not mediate at " + to_string(iv));
    out.components.push_back(*c);
  }
  return out;
}

inline NarrativeMorphism to_cumulative(const NarrativeMorphism& m) {
  return cumulate(m, cumulate(m.source), cumulate(m.target));
}

/// P on a morphism m: F -> G of cumulative narratives.
inline NarrativeMorphism persist(const NarrativeMorphism& m, const Persistence& pf, const Persistence& pg) {
  const TimeLattice& l = m.source.lattice();
  NarrativeMorphism out{pf.result, pg.result, {}};
  for (std::size_t i = 0; i < l.size(); ++i) {
    const Interval& iv = l.intervals()[i];
    Cone probe{pf.cones[i].apex, {}};
    const auto subs = l.subintervals(iv);
    for (std::size_t j = 0; j < subs.size(); ++j)
      probe.legs.push_back(compose(m.at(subs[j]), pf.cones[i].legs[j]));
    auto c = mediate_limit(pg.cones[i], probe);
    if (!c) throw std::logic_error("P: morphism image does not mediate at " + to_string(iv));
    out.components.push_back(*c);
  }
  return out;
}

inline NarrativeMorphism to_persistent(const NarrativeMorphism& m) {
  return persist(m, persist(m.source), persist(m.target));
}

/// Unit F -> P(K(F)) given K(F) and P(K(F)) with their universal data.
inline NarrativeMorphism unit(const Narrative& f, const Cumulation& kf, const Persistence& pkf) {
  const TimeLattice& l = f.lattice();
  NarrativeMorphism out{f, pkf.result, {}};
  for (std::size_t i = 0; i < l.size(); ++i) {
    const Interval& iv = l.intervals()[i];
    Cone probe{f.object(iv), {}};
    for (const auto& j : l.subintervals(iv)) {
      const std::size_t jj = l.index(j);
      const CSetMorphism& inject = kf.cocones[jj].legs[detail::node_of(l, j, j)];
      probe.legs.push_back(compose(inject, f.map(iv, j)));
    }
    auto c = mediate_limit(pkf.cones[i], probe);
    if (!c) throw std::logic_error("unit does not mediate at " + to_string(iv));
    out.components.push_back(*c);
  }
  return out;
}

inline NarrativeMorphism unit(const Narrative& f) {
  Cumulation kf = cumulate(f);
  return unit(f, kf, persist(kf.result));
}

/// Counit K(P(F)) -> F given P(F) and K(P(F)) with their universal data.
inline NarrativeMorphism counit(const Narrative& f, const Persistence& pf, const Cumulation& kpf) {
  const TimeLattice& l = f.lattice();
  NarrativeMorphism out{kpf.result, f, {}};
  for (std::size_t i = 0; i < l.size(); ++i) {
    const Interval& iv = l.intervals()[i];
    Cocone probe{f.object(iv), {}};
    for (const auto& j : l.subintervals(iv)) {
      const std::size_t jj = l.index(j);
      const CSetMorphism& project = pf.cones[jj].legs[detail::node_of(l, j, j)];
      probe.legs.push_back(compose(f.map(j, iv), project));
    }
    auto c = mediate_colimit(kpf.cocones[i], probe);
    if (!c) throw std::logic_error("counit does not mediate at " + to_string(iv));
    out.components.push_back(*c);
  }
  return out;
}

inline NarrativeMorphism counit(const Narrative& f) {
  Persistence pf = persist(f);
  return counit(f, pf, cumulate(pf.result));
}

/// For persistent F: (eps K) . (K eta) = id on K(F). For cumulative F:
/// (P eps) . (eta P) = id on P(F). Compared component by component.
inline bool check_triangles(const Narrative& f) {
  if (f.flavor() == Flavor::Persistent) {
    Cumulation kf = cumulate(f);
    Persistence pkf = persist(kf.result);
    Cumulation kpkf = cumulate(pkf.result);
    NarrativeMorphism eta = unit(f, kf, pkf);
    NarrativeMorphism k_eta = cumulate(eta, kf, kpkf);
    NarrativeMorphism eps_k = counit(kf.result, pkf, kpkf);
    return compose(eps_k, k_eta).components == identity_morphism(kf.result).components;
  }
  Persistence pf = persist(f);
  Cumulation kpf = cumulate(pf.result);
  Persistence pkpf = persist(kpf.result);
  NarrativeMorphism eta_p = unit(pf.result, kpf, pkpf);
  NarrativeMorphism eps = counit(f, pf, kpf);
  NarrativeMorphism p_eps = persist(eps, pkpf, pf);
  return compose(p_eps, eta_p).components == identity_morphism(pf.result).components;
}

/// The two transposition maps of the adjunction K -| P.
struct Transposer {
  Narrative persistent;  // F
  Narrative cumulative;  // F-hat
  Cumulation kf;
  Persistence pg;
  Persistence pkf;
  Cumulation kpg;
  NarrativeMorphism eta;
  NarrativeMorphism eps;

  Transposer(const Narrative& f, const Narrative& g)
      : persistent(f), cumulative(g), kf(cumulate(f)), pg(persist(g)), pkf(persist(kf.result)),
        kpg(cumulate(pg.result)), eta(unit(f, kf, pkf)), eps(counit(g, pg, kpg)) {}

  /// K(F) -> F-hat  to  F -> P(F-hat): P(m) after eta.
  NarrativeMorphism right(const NarrativeMorphism& m) const { return compose(persist(m, pkf, pg), eta); }

  /// F -> P(F-hat)  to  K(F) -> F-hat: eps after K(n).
  NarrativeMorphism left(const NarrativeMorphism& n) const { return compose(eps, cumulate(n, kf, kpg)); }
};

/// Carrier-size changes and comparison flags after a round trip through
/// both functors.
struct RoundTripReport {
  struct Entry {
    Interval interval;
    std::map<std::string, long> size_delta;  // round-trip size minus original, per sort
    bool iso = true;
  };
  Flavor flavor = Flavor::Persistent;
  std::vector<Entry> entries;
  bool lossless = true;
  std::optional<Interval> first_lossy;
};

/// Persistent F is compared with P(K(F)) through the unit; cumulative F
/// with K(P(F)) through the counit.
inline RoundTripReport roundtrip_report(const Narrative& f) {
  RoundTripReport r;
  r.flavor = f.flavor();
  const bool persistent = f.flavor() == Flavor::Persistent;
  NarrativeMorphism cmp = persistent ? unit(f) : counit(f);
  const Narrative& back = persistent ? cmp.target : cmp.source;
  const Schema& s = f.schema();
  for (std::size_t i = 0; i < f.intervals().size(); ++i) {
    RoundTripReport::Entry e{f.intervals()[i], {}, is_iso(cmp.components[i])};
    for (std::size_t k = 0; k < s.sort_count(); ++k)
      e.size_delta[s.sorts()[k]] =
          static_cast<long>(back.object_at(i).size(k)) - static_cast<long>(f.object_at(i).size(k));
    if (!e.iso && r.lossless) {
      r.lossless = false;
      r.first_lossy = e.interval;
    }
    r.entries.push_back(std::move(e));
  }
  return r;
}

}  // namespace chronica
