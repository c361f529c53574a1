#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chronica/cset.hpp"
#include "chronica/homomorphism.hpp"
#include "chronica/limits.hpp"
#include "chronica/timecat.hpp"

namespace chronica {

/// Persistent narratives are sheaves (maps restrict from larger to smaller
/// intervals); cumulative narratives are cosheaves (maps run the other way).
enum class Flavor { Persistent, Cumulative };

inline std::string to_string(Flavor f) {
  return f == Flavor::Persistent ? "persistent" : "cumulative";
}

inline Flavor parse_flavor(const std::string& s) {
  if (s == "persistent") return Flavor::Persistent;
  if (s == "cumulative") return Flavor::Cumulative;
  throw std::invalid_argument("unknown narrative flavor '" + s + "'");
}

/// A C-set for every interval of a time lattice, together with maps along
/// the immediate inclusions of the lattice. Other inclusions are composed
/// on demand and memoized. Copies share the same immutable data.
class Narrative {
 public:
  /// Key of a generating map: (larger interval, smaller interval).
  using Inclusion = std::pair<Interval, Interval>;

  Narrative() = default;

  /// `maps` needs exactly one morphism per immediate inclusion of `lattice`,
  /// keyed (larger, smaller) whatever the flavor.
  static Narrative make(Flavor flavor, TimeLattice lattice, const std::map<Interval, CSet>& objects,
                        const std::map<Inclusion, CSetMorphism>& maps) {
    if (lattice.empty()) throw std::invalid_argument("narrative over an empty time lattice");
    auto d = std::make_shared<Data>();
    d->flavor = flavor;
    d->lattice = std::move(lattice);
    for (const auto& iv : d->lattice.intervals()) {
      auto it = objects.find(iv);
      if (it == objects.end()) throw std::invalid_argument("narrative: no object at " + to_string(iv));
      d->objects.push_back(it->second);
    }
    if (objects.size() != d->objects.size())
      throw std::invalid_argument("narrative: object given outside the time lattice");
    d->schema = d->objects.front().schema_ptr();
    for (const auto& o : d->objects)
      if (!same_schema(o.schema_ptr(), d->schema))
        throw std::invalid_argument("narrative: objects over different schemas");
    const auto edges = d->lattice.hasse_edges();
    if (maps.size() != edges.size())
      throw std::invalid_argument("narrative: expected one map per immediate inclusion");
    for (const auto& [big, small] : edges) {
      auto it = maps.find({big, small});
      if (it == maps.end())
        throw std::invalid_argument("narrative: missing map for " + to_string(big) + " > " +
                                    to_string(small));
      const std::size_t b = d->lattice.index(big), s = d->lattice.index(small);
      const CSet& from = flavor == Flavor::Persistent ? d->objects[b] : d->objects[s];
      const CSet& to = flavor == Flavor::Persistent ? d->objects[s] : d->objects[b];
      if (!(it->second.source() == from) || !(it->second.target() == to))
        throw std::invalid_argument("narrative: map for " + to_string(big) + " > " +
                                    to_string(small) + " has the wrong endpoints");
      d->generators.push_back({b, s, it->second});
    }
    d->children.resize(d->objects.size());
    d->parents.resize(d->objects.size());
    for (std::size_t g = 0; g < d->generators.size(); ++g) {
      d->children[d->generators[g].big].push_back(g);
      d->parents[d->generators[g].small].push_back(g);
    }
    Narrative n;
    n.d_ = std::move(d);
    return n;
  }

  Flavor flavor() const { return d_->flavor; }
  const TimeLattice& lattice() const { return d_->lattice; }
  const std::vector<Interval>& intervals() const { return d_->lattice.intervals(); }
  const Schema& schema() const { return *d_->schema; }
  const SchemaPtr& schema_ptr() const { return d_->schema; }

  const CSet& object(const Interval& iv) const { return d_->objects[d_->lattice.index(iv)]; }
  const CSet& object_at(std::size_t i) const { return d_->objects[i]; }
  const std::vector<CSet>& objects() const { return d_->objects; }

  /// Generating maps keyed (larger, smaller).
  std::map<Inclusion, CSetMorphism> generating_maps() const {
    std::map<Inclusion, CSetMorphism> out;
    for (const auto& g : d_->generators)
      out.emplace(Inclusion{intervals()[g.big], intervals()[g.small]}, g.map);
    return out;
  }

  const CSetMorphism& generator(const Interval& big, const Interval& small) const {
    std::size_t b = d_->lattice.index(big), s = d_->lattice.index(small);
    for (std::size_t g : d_->children[b])
      if (d_->generators[g].small == s) return d_->generators[g].map;
    throw std::out_of_range(to_string(small) + " is not immediately below " + to_string(big));
  }

  /// Immediate sub-intervals of `iv` in the lattice.
  std::vector<Interval> children(const Interval& iv) const {
    std::vector<Interval> out;
    for (std::size_t g : d_->children[d_->lattice.index(iv)])
      out.push_back(intervals()[d_->generators[g].small]);
    return out;
  }

  /// Restriction (persistent: big -> small) or corestriction (cumulative:
  /// small -> big) between two comparable intervals.
  CSetMorphism map(const Interval& from, const Interval& to) const {
    const Interval& big = flavor() == Flavor::Persistent ? from : to;
    const Interval& small = flavor() == Flavor::Persistent ? to : from;
    if (!big.contains(small))
      throw std::invalid_argument("no inclusion " + to_string(small) + " <= " + to_string(big));
    return map_between(d_->lattice.index(big), d_->lattice.index(small));
  }

  friend bool operator==(const Narrative& a, const Narrative& b) {
    if (a.d_ == b.d_) return true;
    if (!a.d_ || !b.d_) return false;
    if (a.flavor() != b.flavor() || !(a.lattice() == b.lattice()) || a.objects() != b.objects())
      return false;
    for (std::size_t g = 0; g < a.d_->generators.size(); ++g)
      if (!(a.d_->generators[g].map == b.d_->generators[g].map)) return false;
    return true;
  }

 private:
  struct Generator {
    std::size_t big;
    std::size_t small;
    CSetMorphism map;
  };
  struct Data {
    Flavor flavor = Flavor::Persistent;
    TimeLattice lattice;
    SchemaPtr schema;
    std::vector<CSet> objects;
    std::vector<Generator> generators;
    std::vector<std::vector<std::size_t>> children, parents;
    mutable std::mutex memo_mutex;
    mutable std::map<std::pair<std::size_t, std::size_t>, CSetMorphism> memo;
  };

  CSetMorphism map_between(std::size_t big, std::size_t small) const {
    if (big == small) return CSetMorphism::identity(d_->objects[big]);
    {
      std::lock_guard<std::mutex> lock(d_->memo_mutex);
      auto it = d_->memo.find({big, small});
      if (it != d_->memo.end()) return it->second;
    }
    const Interval& target = intervals()[small];
    std::optional<CSetMorphism> result;
    if (flavor() == Flavor::Persistent) {
      // Step down from `big` through its first child that still covers `small`.
      for (std::size_t g : d_->children[big]) {
        const auto& gen = d_->generators[g];
        if (intervals()[gen.small].contains(target)) {
          result = compose(map_between(gen.small, small), gen.map);
          break;
        }
      }
    } else {
      // Step up from `small` through its first parent still inside `big`.
      for (std::size_t g : d_->parents[small]) {
        const auto& gen = d_->generators[g];
        if (intervals()[big].contains(intervals()[gen.big])) {
          result = compose(map_between(big, gen.big), gen.map);
          break;
        }
      }
    }
    if (!result) throw std::logic_error("narrative: no chain of immediate inclusions");
    std::lock_guard<std::mutex> lock(d_->memo_mutex);
    d_->memo.emplace(std::pair{big, small}, *result);
    return *result;
  }

  std::shared_ptr<const Data> d_;
};

// ---------------------------------------------------------------------------
// Sheaf / cosheaf checks

struct NarrativeIssue {
  enum class Kind { InvalidObject, InvalidMap, NonFunctorial, CoverFailure };
  Kind kind;
  Interval interval;
  std::optional<Interval> other;
  std::optional<Time> cover_point;
  IsoDefects defects;
  std::string message;
};

inline std::string to_string(NarrativeIssue::Kind k) {
  switch (k) {
    case NarrativeIssue::Kind::InvalidObject: return "invalid-object";
    case NarrativeIssue::Kind::InvalidMap: return "invalid-map";
    case NarrativeIssue::Kind::NonFunctorial: return "non-functorial";
    case NarrativeIssue::Kind::CoverFailure: return "cover-failure";
  }
  return "?";
}

struct NarrativeReport {
  std::vector<NarrativeIssue> issues;
  bool ok() const { return issues.empty(); }
};

namespace detail {

/// Object validity, map validity and commutativity of every pair of routes.
inline void check_functoriality(const Narrative& n, NarrativeReport& report) {
  for (const auto& iv : n.intervals())
    for (const auto& v : validate(n.object(iv)))
      report.issues.push_back({NarrativeIssue::Kind::InvalidObject, iv, std::nullopt, std::nullopt,
                               {}, to_string(iv) + ": " + v.message});
  for (const auto& [inc, m] : n.generating_maps())
    for (const auto& v : validate(m))
      report.issues.push_back({NarrativeIssue::Kind::InvalidMap, inc.first, inc.second, std::nullopt,
                               {}, to_string(inc.first) + " > " + to_string(inc.second) + ": " + v.message});
  if (!report.issues.empty()) return;
  const bool persistent = n.flavor() == Flavor::Persistent;
  for (const auto& big : n.intervals())
    for (const auto& small : n.lattice().subintervals(big)) {
      if (small == big) continue;
      std::optional<CSetMorphism> first;
      for (const auto& mid : n.children(big)) {
        if (!mid.contains(small)) continue;
        CSetMorphism route = persistent ? compose(n.map(mid, small), n.generator(big, mid))
                                        : compose(n.generator(big, mid), n.map(small, mid));
        if (!first) {
          first = route;
        } else if (!(route == *first)) {
          report.issues.push_back({NarrativeIssue::Kind::NonFunctorial, big, small, std::nullopt, {},
                                   "routes from " + to_string(big) + " to " + to_string(small) +
                                       " through different intervals disagree"});
          break;
        }
      }
    }
}

}  // namespace detail

/// Empty iff the narrative is functorial and, for every interval and every
/// cover ([a,p],[p,b]) in its lattice, the comparison map into the pullback
/// is an isomorphism.
inline NarrativeReport check_sheaf(const Narrative& n) {
  if (n.flavor() != Flavor::Persistent) throw std::invalid_argument("check_sheaf: not a persistent narrative");
  NarrativeReport report;
  detail::check_functoriality(n, report);
  if (!report.ok()) return report;
  for (const auto& iv : n.intervals())
    for (const auto& [left, right] : n.lattice().covers(iv)) {
      const Interval mid = Interval::instant(right.lo);
      CSetMorphism f = n.map(left, mid), g = n.map(right, mid);
      PullbackResult pb = pullback(f, g);
      CSetMorphism to_left = n.map(iv, left), to_right = n.map(iv, right);
      Cone probe{n.object(iv), {to_left, compose(f, to_left), to_right}};
      auto cmp = mediate_limit(pb.cone, probe);
      if (!cmp) {
        report.issues.push_back({NarrativeIssue::Kind::CoverFailure, iv, std::nullopt, right.lo, {},
                                 to_string(iv) + " at p=" + std::to_string(right.lo) +
                                     ": restrictions do not form a cone"});
        continue;
      }
      IsoDefects defects = iso_defects(*cmp);
      if (!defects.empty()) {
        std::string msg = to_string(iv) + " at p=" + std::to_string(right.lo) + ": " +
                          std::to_string(n.object(iv).total_size()) + " elements vs pullback of " +
                          std::to_string(pb.object.total_size());
        report.issues.push_back({NarrativeIssue::Kind::CoverFailure, iv, std::nullopt, right.lo,
                                 defects, msg});
      }
    }
  return report;
}

/// Dual of check_sheaf: the comparison map out of each cover's pushout must
/// be an isomorphism.
inline NarrativeReport check_cosheaf(const Narrative& n) {
  if (n.flavor() != Flavor::Cumulative) throw std::invalid_argument("check_cosheaf: not a cumulative narrative");
  NarrativeReport report;
  detail::check_functoriality(n, report);
  if (!report.ok()) return report;
  for (const auto& iv : n.intervals())
    for (const auto& [left, right] : n.lattice().covers(iv)) {
      const Interval mid = Interval::instant(right.lo);
      CSetMorphism f = n.map(mid, left), g = n.map(mid, right);
      PushoutResult po = pushout(f, g);
      CSetMorphism from_left = n.map(left, iv), from_right = n.map(right, iv);
      Cocone probe{n.object(iv), {from_left, compose(from_left, f), from_right}};
      auto cmp = mediate_colimit(po.cocone, probe);
      if (!cmp) {
        report.issues.push_back({NarrativeIssue::Kind::CoverFailure, iv, std::nullopt, right.lo, {},
                                 to_string(iv) + " at p=" + std::to_string(right.lo) +
                                     ": corestrictions do not form a cocone"});
        continue;
      }
      IsoDefects defects = iso_defects(*cmp);
      if (!defects.empty()) {
        std::string msg = to_string(iv) + " at p=" + std::to_string(right.lo) + ": " +
                          std::to_string(n.object(iv).total_size()) + " elements vs pushout of " +
                          std::to_string(po.object.total_size());
        report.issues.push_back({NarrativeIssue::Kind::CoverFailure, iv, std::nullopt, right.lo,
                                 defects, msg});
      }
    }
  return report;
}

inline NarrativeReport check(const Narrative& n) {
  return n.flavor() == Flavor::Persistent ? check_sheaf(n) : check_cosheaf(n);
}

// ---------------------------------------------------------------------------
// Generating data and saturation

/// Snapshots for [t,t], bridges for [t,t+1] and the legs between them,
/// starting at time `start`. Persistent data uses spans
/// (left: bridge -> snapshot t, right: bridge -> snapshot t+1); cumulative
/// data uses cospans (left: snapshot t -> bridge, right: snapshot t+1 ->
/// bridge).
struct GeneratingData {
  Time start = 0;
  std::vector<CSet> snapshots;
  std::vector<CSet> bridges;
  std::vector<CSetMorphism> left;
  std::vector<CSetMorphism> right;

  Time end() const { return start + static_cast<Time>(snapshots.size()) - 1; }
};

/// Counts of distinct generating objects and morphisms a saturation read.
struct SaturationStats {
  std::size_t objects_read = 0;
  std::size_t morphisms_read = 0;
};

enum class CoverSplit { LeftFirst, RightFirst };

struct SaturationOptions {
  CoverSplit split = CoverSplit::LeftFirst;
  SaturationStats* stats = nullptr;
};

Narrative restrict_narrative(const Narrative& n, const TimeLattice& sub);

namespace detail {

inline void check_generating_data(const GeneratingData& g, Flavor flavor) {
  if (g.snapshots.empty()) throw std::invalid_argument("generating data without snapshots");
  const std::size_t T = g.snapshots.size() - 1;
  if (g.bridges.size() != T || g.left.size() != T || g.right.size() != T)
    throw std::invalid_argument("generating data needs one bridge and two legs per step");
  for (std::size_t t = 0; t < T; ++t) {
    const bool span = flavor == Flavor::Persistent;
    const CSetMorphism& l = g.left[t];
    const CSetMorphism& r = g.right[t];
    bool ok = span ? (l.source() == g.bridges[t] && l.target() == g.snapshots[t] &&
                      r.source() == g.bridges[t] && r.target() == g.snapshots[t + 1])
                   : (l.source() == g.snapshots[t] && l.target() == g.bridges[t] &&
                      r.source() == g.snapshots[t + 1] && r.target() == g.bridges[t]);
    if (!ok)
      throw std::invalid_argument("generating data: legs at step " + std::to_string(t) +
                                  " do not match the snapshots and bridge");
  }
}

/// Shared driver for both saturations; the flavor decides pullback vs pushout.
class Saturator {
 public:
  Saturator(const GeneratingData& g, Flavor flavor, SaturationOptions opts)
      : g_(g), flavor_(flavor), opts_(opts) {
    check_generating_data(g, flavor);
  }

  Narrative run() {
    const Time s0 = g_.start, s1 = g_.end();
    for (Time t = s0; t <= s1; ++t) objects_[Interval::instant(t)] = read_snapshot(t - s0);
    for (Time t = s0; t < s1; ++t) {
      Interval b(t, t + 1);
      objects_[b] = read_bridge(t - s0);
      maps_[{b, Interval::instant(t)}] = read_leg(t - s0, true);
      maps_[{b, Interval::instant(t + 1)}] = read_leg(t - s0, false);
    }
    for (Time len = 2; len <= s1 - s0; ++len)
      for (Time a = s0; a + len <= s1; ++a) build(Interval(a, a + len));
    if (opts_.stats) {
      opts_.stats->objects_read = snapshots_read_.size() + bridges_read_.size();
      opts_.stats->morphisms_read = legs_read_.size();
    }
    return Narrative::make(flavor_, TimeLattice::span(s1, s0, s1), objects_, maps_);
  }

 private:
  bool persistent() const { return flavor_ == Flavor::Persistent; }

  const CSet& read_snapshot(std::size_t i) {
    snapshots_read_.insert(i);
    return g_.snapshots[i];
  }
  const CSet& read_bridge(std::size_t i) {
    bridges_read_.insert(i);
    return g_.bridges[i];
  }
  const CSetMorphism& read_leg(std::size_t i, bool left) {
    legs_read_.insert({i, left});
    return left ? g_.left[i] : g_.right[i];
  }

  /// Map along big >= small in the data direction, composed from the
  /// generating maps built so far (shrinking the right end first).
  CSetMorphism along(const Interval& big, const Interval& small) {
    if (big == small) return CSetMorphism::identity(objects_.at(big));
    Interval next = big.hi > small.hi ? Interval(big.lo, big.hi - 1) : Interval(big.lo + 1, big.hi);
    const CSetMorphism& step = maps_.at({big, next});
    return persistent() ? compose(along(next, small), step) : compose(step, along(next, small));
  }

  void build(const Interval& iv) {
    const Time a = iv.lo, b = iv.hi;
    const bool left_first = opts_.split == CoverSplit::LeftFirst;
    const Time p = left_first ? a + 1 : b - 1;
    const Interval L(a, p), R(p, b), P = Interval::instant(p);
    // Other immediate subinterval, the one not produced directly by the cover.
    const Interval other = left_first ? Interval(a, b - 1) : Interval(a + 1, b);
    const Interval other_inner(a + 1, b - 1);

    if (persistent()) {
      CSetMorphism f = along(L, P), g = along(R, P);
      PullbackResult pb = pullback(f, g);
      objects_[iv] = pb.object;
      maps_[{iv, L}] = pb.left;
      maps_[{iv, R}] = pb.right;
      if (!(other == L) && !(other == R)) {
        // other = [a,b-1] (left split) or [a+1,b] (right split); its own cone
        // has the same shape one step shorter.
        const Cone& oc = cones_.at(other);
        Cone probe{pb.object, {}};
        if (left_first)
          probe.legs = {pb.left, compose(f, pb.left), compose(along(R, other_inner), pb.right)};
        else
          probe.legs = {compose(along(L, other_inner), pb.left), compose(g, pb.right), pb.right};
        auto m = mediate_limit(oc, probe);
        if (!m) throw std::logic_error("saturation: restriction does not mediate");
        maps_[{iv, other}] = *m;
        maps_.erase({iv, left_first ? L : R});
      }
      cones_[iv] = pb.cone;
    } else {
      CSetMorphism f = along(L, P), g = along(R, P);
      PushoutResult po = pushout(f, g);
      objects_[iv] = po.object;
      maps_[{iv, L}] = po.left;
      maps_[{iv, R}] = po.right;
      if (!(other == L) && !(other == R)) {
        const Cocone& oc = cocones_.at(other);
        Cocone probe{po.object, {}};
        if (left_first)
          probe.legs = {po.left, compose(po.left, f), compose(po.right, along(R, other_inner))};
        else
          probe.legs = {compose(po.left, along(L, other_inner)), compose(po.right, g), po.right};
        auto m = mediate_colimit(oc, probe);
        if (!m) throw std::logic_error("saturation: corestriction does not mediate");
        maps_[{iv, other}] = *m;
        maps_.erase({iv, left_first ? L : R});
      }
      cocones_[iv] = po.cocone;
    }
  }

  const GeneratingData& g_;
  Flavor flavor_;
  SaturationOptions opts_;
  std::map<Interval, CSet> objects_;
  std::map<Narrative::Inclusion, CSetMorphism> maps_;
  std::map<Interval, Cone> cones_;
  std::map<Interval, Cocone> cocones_;
  std::set<std::size_t> snapshots_read_, bridges_read_;
  std::set<std::pair<std::size_t, bool>> legs_read_;
};

}  // namespace detail

/// The persistent narrative determined by snapshots and spans: every longer
/// interval is an iterated pullback over covers. Computed over all
/// subintervals of the data's time span, then restricted to `lattice`.
inline Narrative saturate_persistent(const GeneratingData& g, const TimeLattice& lattice,
                                     SaturationOptions opts = {}) {
  Narrative full = detail::Saturator(g, Flavor::Persistent, opts).run();
  if (lattice == full.lattice()) return full;
  return restrict_narrative(full, lattice);
}

inline Narrative saturate_persistent(const GeneratingData& g, SaturationOptions opts = {}) {
  return detail::Saturator(g, Flavor::Persistent, opts).run();
}

/// Cumulative counterpart via iterated pushouts.
inline Narrative saturate_cumulative(const GeneratingData& g, const TimeLattice& lattice,
                                     SaturationOptions opts = {}) {
  Narrative full = detail::Saturator(g, Flavor::Cumulative, opts).run();
  if (lattice == full.lattice()) return full;
  return restrict_narrative(full, lattice);
}

inline Narrative saturate_cumulative(const GeneratingData& g, SaturationOptions opts = {}) {
  return detail::Saturator(g, Flavor::Cumulative, opts).run();
}

inline Narrative saturate(const GeneratingData& g, Flavor flavor, SaturationOptions opts = {}) {
  return detail::Saturator(g, flavor, opts).run();
}

/// Reads the instants, length-two intervals and their legs back out of a
/// narrative whose lattice contains them all for some span [s0, s1].
inline GeneratingData extract_generating_data(const Narrative& n) {
  Time s0 = n.intervals().front().lo, s1 = s0;
  for (const auto& iv : n.intervals()) {
    s0 = std::min(s0, iv.lo);
    s1 = std::max(s1, iv.hi);
  }
  GeneratingData g;
  g.start = s0;
  for (Time t = s0; t <= s1; ++t) {
    if (!n.lattice().contains(Interval::instant(t)))
      throw std::invalid_argument("extract_generating_data: missing instant " + std::to_string(t));
    g.snapshots.push_back(n.object(Interval::instant(t)));
  }
  for (Time t = s0; t < s1; ++t) {
    Interval b(t, t + 1);
    if (!n.lattice().contains(b))
      throw std::invalid_argument("extract_generating_data: missing " + to_string(b));
    g.bridges.push_back(n.object(b));
    if (n.flavor() == Flavor::Persistent) {
      g.left.push_back(n.map(b, Interval::instant(t)));
      g.right.push_back(n.map(b, Interval::instant(t + 1)));
    } else {
      g.left.push_back(n.map(Interval::instant(t), b));
      g.right.push_back(n.map(Interval::instant(t + 1), b));
    }
  }
  return g;
}

/// Objects and maps restricted to a sub-join-semilattice.
inline Narrative restrict_narrative(const Narrative& n, const TimeLattice& sub) {
  if (!sub.is_sublattice_of(n.lattice()))
    throw SublatticeError("restriction target is not a sublattice of the narrative's time lattice");
  std::map<Interval, CSet> objects;
  for (const auto& iv : sub.intervals()) objects.emplace(iv, n.object(iv));
  std::map<Narrative::Inclusion, CSetMorphism> maps;
  for (const auto& [big, small] : sub.hasse_edges())
    maps.emplace(Narrative::Inclusion{big, small},
                 n.flavor() == Flavor::Persistent ? n.map(big, small) : n.map(small, big));
  return Narrative::make(n.flavor(), sub, objects, maps);
}

// ---------------------------------------------------------------------------
// Narrative morphisms

/// Components per interval (aligned with the lattice) between two narratives
/// of the same flavor over the same lattice.
struct NarrativeMorphism {
  Narrative source;
  Narrative target;
  std::vector<CSetMorphism> components;

  const CSetMorphism& at(const Interval& iv) const { return components[source.lattice().index(iv)]; }
};

inline NarrativeMorphism identity_morphism(const Narrative& n) {
  NarrativeMorphism m{n, n, {}};
  for (const auto& o : n.objects()) m.components.push_back(CSetMorphism::identity(o));
  return m;
}

/// `second` after `first`, componentwise.
inline NarrativeMorphism compose(const NarrativeMorphism& second, const NarrativeMorphism& first) {
  NarrativeMorphism m{first.source, second.target, {}};
  for (std::size_t i = 0; i < first.components.size(); ++i)
    m.components.push_back(compose(second.components[i], first.components[i]));
  return m;
}

struct MorphismIssue {
  Interval interval;
  std::optional<Interval> other;
  std::string message;
};

/// Checks component endpoints, component validity and every naturality
/// square along immediate inclusions.
inline std::vector<MorphismIssue> check_morphism(const NarrativeMorphism& m) {
  std::vector<MorphismIssue> out;
  const Narrative& a = m.source;
  const Narrative& b = m.target;
  if (a.flavor() != b.flavor() || !(a.lattice() == b.lattice()))
    return {{a.intervals().front(), std::nullopt, "source and target differ in flavor or lattice"}};
  if (m.components.size() != a.intervals().size())
    return {{a.intervals().front(), std::nullopt, "wrong number of components"}};
  bool endpoints_ok = true;
  for (std::size_t i = 0; i < a.intervals().size(); ++i) {
    const Interval& iv = a.intervals()[i];
    const auto& c = m.components[i];
    if (!(c.source() == a.object_at(i)) || !(c.target() == b.object_at(i))) {
      out.push_back({iv, std::nullopt, to_string(iv) + ": component has the wrong endpoints"});
      endpoints_ok = false;
      continue;
    }
    for (const auto& v : validate(c)) out.push_back({iv, std::nullopt, to_string(iv) + ": " + v.message});
  }
  if (!endpoints_ok || !out.empty()) return out;
  for (const auto& [big, small] : a.lattice().hasse_edges()) {
    bool ok;
    if (a.flavor() == Flavor::Persistent)
      ok = compose(b.generator(big, small), m.at(big)) == compose(m.at(small), a.generator(big, small));
    else
      ok = compose(b.generator(big, small), m.at(small)) == compose(m.at(big), a.generator(big, small));
    if (!ok)
      out.push_back({big, small, "naturality square for " + to_string(small) + " <= " + to_string(big) +
                                     " does not commute"});
  }
  return out;
}

inline bool is_mono_morphism(const NarrativeMorphism& m) {
  for (const auto& c : m.components)
    if (!is_mono(c)) return false;
  return true;
}

inline bool is_iso_morphism(const NarrativeMorphism& m) {
  for (const auto& c : m.components)
    if (!is_iso(c)) return false;
  return true;
}

/// Completes components given on instants and length-two intervals to a
/// whole morphism, using that both narratives are determined by their
/// generating data. The lattice must contain every subinterval of its span.
/// Returns nullopt when the given components admit no extension.
inline std::optional<NarrativeMorphism> extend_morphism(const Narrative& source, const Narrative& target,
                                                        const std::map<Interval, CSetMorphism>& generating) {
  if (source.flavor() != target.flavor() || !(source.lattice() == target.lattice()))
    throw std::invalid_argument("extend_morphism: narratives differ in flavor or lattice");
  const bool persistent = source.flavor() == Flavor::Persistent;
  std::map<Interval, CSetMorphism> done;
  for (const auto& iv : source.intervals()) {
    if (iv.length() > 2) continue;
    auto it = generating.find(iv);
    if (it == generating.end()) throw std::invalid_argument("extend_morphism: no component at " + to_string(iv));
    done.emplace(iv, it->second);
  }
  for (const auto& iv : source.intervals()) {
    if (iv.length() <= 2) continue;
    // The zigzag of instants and bridges inside iv.
    auto zigzag = [&](const Narrative& n) {
      Diagram d;
      std::vector<Interval> nodes;
      for (Time t = iv.lo; t <= iv.hi; ++t) {
        nodes.push_back(Interval::instant(t));
        d.add_node(to_string(nodes.back()), n.object(nodes.back()));
        if (t == iv.hi) break;
        nodes.emplace_back(t, t + 1);
        d.add_node(to_string(nodes.back()), n.object(nodes.back()));
      }
      for (std::size_t i = 1; i < nodes.size(); i += 2) {
        if (persistent) {
          d.add_edge(i, i - 1, n.map(nodes[i], nodes[i - 1]));
          d.add_edge(i, i + 1, n.map(nodes[i], nodes[i + 1]));
        } else {
          d.add_edge(i - 1, i, n.map(nodes[i - 1], nodes[i]));
          d.add_edge(i + 1, i, n.map(nodes[i + 1], nodes[i]));
        }
      }
      return std::pair{d, nodes};
    };
    std::optional<CSetMorphism> comp;
    if (persistent) {
      auto [d, nodes] = zigzag(target);
      Cone lim = finite_limit(d);
      Cone to_target{target.object(iv), {}}, from_source{source.object(iv), {}};
      for (const auto& j : nodes) {
        to_target.legs.push_back(target.map(iv, j));
        from_source.legs.push_back(compose(done.at(j), source.map(iv, j)));
      }
      auto c = mediate_limit(lim, to_target);
      auto h = mediate_limit(lim, from_source);
      if (!c || !h) return std::nullopt;
      auto back = inverse(*c);
      if (!back) throw std::invalid_argument("extend_morphism: target is not determined by its generating data");
      comp = compose(*back, *h);
    } else {
      auto [d, nodes] = zigzag(source);
      Cocone colim = finite_colimit(d);
      Cocone to_source{source.object(iv), {}}, into_target{target.object(iv), {}};
      for (const auto& j : nodes) {
        to_source.legs.push_back(source.map(j, iv));
        into_target.legs.push_back(compose(target.map(j, iv), done.at(j)));
      }
      auto c = mediate_colimit(colim, to_source);
      auto h = mediate_colimit(colim, into_target);
      if (!c || !h) return std::nullopt;
      auto back = inverse(*c);
      if (!back) throw std::invalid_argument("extend_morphism: source is not determined by its generating data");
      comp = compose(*h, *back);
    }
    done.emplace(iv, *comp);
  }
  NarrativeMorphism m{source, target, {}};
  for (const auto& iv : source.intervals()) m.components.push_back(done.at(iv));
  return m;
}

// ---------------------------------------------------------------------------
// Narratives as C-sets over a product schema, for morphism search.

namespace detail {

/// Schema with one sort per (interval, sort), one arrow per (interval,
/// arrow) and one arrow per (immediate inclusion, sort). Its instances
/// with valid data are exactly functors from the lattice into C-sets, and
/// its homomorphisms are exactly narrative morphisms.
inline SchemaPtr product_schema(const Narrative& n) {
  const Schema& s = n.schema();
  const std::size_t ns = s.sort_count();
  std::vector<std::string> sorts;
  for (const auto& iv : n.intervals())
    for (const auto& sort : s.sorts()) sorts.push_back(to_string(iv) + "." + sort);
  std::vector<Arrow> arrows;
  for (std::size_t i = 0; i < n.intervals().size(); ++i)
    for (const auto& a : s.arrows())
      arrows.push_back({to_string(n.intervals()[i]) + "." + a.name, i * ns + a.source, i * ns + a.target});
  for (const auto& [big, small] : n.lattice().hasse_edges()) {
    std::size_t b = n.lattice().index(big), sm = n.lattice().index(small);
    std::size_t from = n.flavor() == Flavor::Persistent ? b : sm;
    std::size_t to = n.flavor() == Flavor::Persistent ? sm : b;
    for (std::size_t k = 0; k < ns; ++k)
      arrows.push_back({to_string(big) + ">" + to_string(small) + "." + s.sorts()[k], from * ns + k, to * ns + k});
  }
  return std::make_shared<const Schema>(s.name() + "^" + to_string(n.flavor()), std::move(sorts),
                                        std::move(arrows));
}

inline CSet as_cset(const Narrative& n, const SchemaPtr& product) {
  Carriers cs;
  Actions as;
  for (const auto& o : n.objects())
    for (const auto& c : o.carriers()) cs.push_back(c);
  for (const auto& o : n.objects())
    for (const auto& a : o.actions()) as.push_back(a);
  for (const auto& [big, small] : n.lattice().hasse_edges()) {
    const auto& g = n.generator(big, small);
    for (const auto& comp : g.components()) as.push_back(comp);
  }
  return CSet(product, std::move(cs), std::move(as));
}

inline NarrativeMorphism from_flat(const Narrative& a, const Narrative& b, const CSetMorphism& flat) {
  const std::size_t ns = a.schema().sort_count();
  NarrativeMorphism m{a, b, {}};
  for (std::size_t i = 0; i < a.intervals().size(); ++i) {
    Components cs(flat.components().begin() + static_cast<std::ptrdiff_t>(i * ns),
                  flat.components().begin() + static_cast<std::ptrdiff_t>((i + 1) * ns));
    m.components.emplace_back(a.object_at(i), b.object_at(i), std::move(cs));
  }
  return m;
}

inline void require_comparable(const Narrative& a, const Narrative& b) {
  if (a.flavor() != b.flavor() || !(a.lattice() == b.lattice()) ||
      !same_schema(a.schema_ptr(), b.schema_ptr()))
    throw std::invalid_argument("narratives differ in flavor, lattice or schema");
}

}  // namespace detail

/// Calls `visit` on every narrative morphism a -> b (monic ones only if
/// requested) until it returns false.
inline void for_each_narrative_morphism(const Narrative& a, const Narrative& b, bool monic,
                                        const std::function<bool(const NarrativeMorphism&)>& visit) {
  detail::require_comparable(a, b);
  SchemaPtr ps = detail::product_schema(a);
  CSet fa = detail::as_cset(a, ps), fb = detail::as_cset(b, ps);
  for_each_homomorphism(fa, fb, {.monic = monic}, [&](const CSetMorphism& flat) {
    return visit(detail::from_flat(a, b, flat));
  });
}

inline std::vector<NarrativeMorphism> narrative_morphisms(const Narrative& a, const Narrative& b,
                                                          bool monic = false) {
  std::vector<NarrativeMorphism> out;
  for_each_narrative_morphism(a, b, monic, [&](const NarrativeMorphism& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

inline std::optional<NarrativeMorphism> find_narrative_isomorphism(const Narrative& a, const Narrative& b) {
  detail::require_comparable(a, b);
  SchemaPtr ps = detail::product_schema(a);
  auto iso = find_isomorphism(detail::as_cset(a, ps), detail::as_cset(b, ps));
  if (!iso) return std::nullopt;
  return detail::from_flat(a, b, *iso);
}

inline bool narratives_isomorphic(const Narrative& a, const Narrative& b) {
  return find_narrative_isomorphism(a, b).has_value();
}

}  // namespace chronica
