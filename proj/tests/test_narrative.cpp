#include <catch_amalgamated.hpp>

#include "chronica/narrative.hpp"
#include "fixtures.hpp"
#include "properties.hpp"
#include "random.hpp"

using namespace chronica;
using fixtures::set_map;
using fixtures::set_of;

namespace {

std::set<Id> image(const CSetMorphism& m) {
  std::set<Id> out;
  for (const auto& x : m.source().carrier(0)) out.insert(*m.apply("X", x));
  return out;
}

}  // namespace

TEST_CASE("ice cream: persistent saturation", "[narrative][example]") {
  SaturationStats stats;
  Narrative f = saturate_persistent(fixtures::icecream_persistent(), {.stats = &stats});
  CHECK(f.flavor() == Flavor::Persistent);
  CHECK(f.lattice() == TimeLattice::span(3, 1, 3));
  CHECK(f.intervals().size() == 6);
  const CSet& top = f.object({1, 3});
  REQUIRE(top.size(0) == 2);
  // The two elements are the pairs (a1,a★) and (a2,a★).
  std::set<std::pair<Id, Id>> pairs;
  for (const auto& x : top.carrier(0))
    pairs.insert({*f.map({1, 3}, {1, 2}).apply("X", x), *f.map({1, 3}, {2, 3}).apply("X", x)});
  CHECK(pairs == std::set<std::pair<Id, Id>>{{"a1", "a★"}, {"a2", "a★"}});
  CHECK(image(f.map({1, 3}, {1, 1})) == std::set<Id>{"a1", "a2"});
  CHECK(image(f.map({1, 3}, {3, 3})) == std::set<Id>{"a★"});
  CHECK(check_sheaf(f).ok());
  CHECK(check(f).ok());
  CHECK(stats.objects_read == 5);
  CHECK(stats.morphisms_read == 4);
}

TEST_CASE("ice cream: cumulative saturation", "[narrative][example]") {
  Narrative f = saturate_cumulative(fixtures::icecream_cumulative());
  CHECK(f.flavor() == Flavor::Cumulative);
  CHECK(f.object({1, 3}).carrier(0) == std::vector<Id>{"a★", "b", "b′", "c", "c′"});
  CHECK(image(f.map({1, 1}, {1, 3})) == std::set<Id>{"a★", "b", "c"});
  CHECK(check_cosheaf(f).ok());
}

TEST_CASE("a presheaf with too large a top object fails the sheaf condition", "[narrative][example]") {
  Narrative d = fixtures::overfull();
  NarrativeReport r = check_sheaf(d);
  REQUIRE_FALSE(r.ok());
  for (const auto& issue : r.issues) {
    CHECK(issue.kind == NarrativeIssue::Kind::CoverFailure);
    CHECK(issue.interval == Interval(1, 3));
  }
  REQUIRE(r.issues.front().cover_point);
  CHECK(*r.issues.front().cover_point == 2);
  CHECK_FALSE(r.issues.front().defects.non_injective.empty());
  // Every other interval is fine: dropping the top leaves a sheaf.
  CHECK(check_sheaf(restrict_narrative(d, TimeLattice(3, {{1, 1}, {1, 2}, {2, 2}}))).ok());
}

TEST_CASE("cosheaf check catches an object that is not the pushout", "[narrative]") {
  Narrative f = saturate_cumulative(fixtures::icecream_cumulative());
  auto objects = std::map<Interval, CSet>{};
  for (const auto& iv : f.intervals()) objects.emplace(iv, f.object(iv));
  CSet bigger = set_of({"a★", "b", "b′", "c", "c′", "extra"});
  objects[Interval(1, 3)] = bigger;
  std::map<Narrative::Inclusion, CSetMorphism> maps;
  for (const auto& [inc, m] : f.generating_maps()) {
    if (inc.first == Interval(1, 3))
      maps.emplace(inc, CSetMorphism::inclusion(m.source(), bigger));
    else
      maps.emplace(inc, m);
  }
  Narrative g = Narrative::make(Flavor::Cumulative, f.lattice(), objects, maps);
  NarrativeReport r = check_cosheaf(g);
  REQUIRE_FALSE(r.ok());
  CHECK(r.issues.front().kind == NarrativeIssue::Kind::CoverFailure);
  CHECK(r.issues.front().interval == Interval(1, 3));
  CHECK_FALSE(r.issues.front().defects.non_surjective.empty());
}

TEST_CASE("non-functorial data is reported before cover checks", "[narrative]") {
  // Over [0,2] the two routes [0,2] -> [1,1] disagree.
  CSet one = set_of({"x", "y"});
  const TimeLattice l = TimeLattice::full(2);
  std::map<Interval, CSet> objects;
  for (const auto& iv : l.intervals()) objects.emplace(iv, one);
  std::map<Narrative::Inclusion, CSetMorphism> maps;
  for (const auto& e : l.hasse_edges()) maps.emplace(e, CSetMorphism::identity(one));
  maps.at({Interval(0, 1), Interval(1, 1)}) = set_map(one, one, {{"x", "y"}, {"y", "x"}});
  Narrative n = Narrative::make(Flavor::Persistent, l, objects, maps);
  NarrativeReport r = check(n);
  REQUIRE_FALSE(r.ok());
  for (const auto& issue : r.issues) CHECK(issue.kind == NarrativeIssue::Kind::NonFunctorial);
}

TEST_CASE("narrative construction validates its inputs", "[narrative]") {
  CSet one = set_of({"x"});
  TimeLattice l = TimeLattice::full(1);
  std::map<Interval, CSet> objects{{{0, 0}, one}, {{1, 1}, one}, {{0, 1}, one}};
  std::map<Narrative::Inclusion, CSetMorphism> maps{{{{0, 1}, {0, 0}}, CSetMorphism::identity(one)},
                                                     {{{0, 1}, {1, 1}}, CSetMorphism::identity(one)}};
  CHECK_NOTHROW(Narrative::make(Flavor::Persistent, l, objects, maps));
  auto missing = maps;
  missing.erase({Interval(0, 1), Interval(1, 1)});
  CHECK_THROWS_AS(Narrative::make(Flavor::Persistent, l, objects, missing), std::invalid_argument);
  auto partial = objects;
  partial.erase(Interval(1, 1));
  CHECK_THROWS_AS(Narrative::make(Flavor::Persistent, l, partial, maps), std::invalid_argument);
  CHECK_THROWS_AS(Narrative::make(Flavor::Persistent, TimeLattice{}, {}, {}), std::invalid_argument);
  CHECK(parse_flavor("cumulative") == Flavor::Cumulative);
  CHECK_THROWS(parse_flavor("sideways"));
}

TEST_CASE("saturation reads 2T+1 objects and 2T morphisms", "[narrative][storage]") {
  props::Verdict v = props::storage_counts(5);
  INFO(v.summary());
  CHECK(v.cases == 20);
  CHECK(v.ok());
}

TEST_CASE("saturated narratives satisfy their condition; cover order does not matter", "[narrative][property]") {
  gen::Rng rng(31337);
  for (int round = 0; round < 40; ++round) {
    const Flavor flavor = round % 2 ? Flavor::Cumulative : Flavor::Persistent;
    const bool graph = round % 4 >= 2;
    GeneratingData g = gen::random_generating_data(rng, flavor, graph, gen::uniform(rng, 0, 4), 3);
    Narrative left = saturate(g, flavor, {.split = CoverSplit::LeftFirst});
    Narrative right = saturate(g, flavor, {.split = CoverSplit::RightFirst});
    CHECK(check(left).ok());
    CHECK(check(right).ok());
    CHECK(narratives_isomorphic(left, right));
    // Deterministic: the same input twice gives the same narrative.
    CHECK(saturate(g, flavor) == left);
    // Re-saturating what was extracted reproduces the narrative exactly.
    CHECK(saturate(extract_generating_data(left), flavor) == left);
  }
}

TEST_CASE("snapshots alone do not determine a narrative", "[narrative]") {
  // Same instants, different bridges: one keeps x through the step, the
  // other keeps nothing.
  CSet s = set_of({"x"}), empty = set_of({});
  GeneratingData kept, dropped;
  kept.snapshots = dropped.snapshots = {s, s};
  kept.bridges = {s};
  kept.left = kept.right = {CSetMorphism::identity(s)};
  dropped.bridges = {empty};
  dropped.left = dropped.right = {CSetMorphism::inclusion(empty, s)};
  Narrative a = saturate_persistent(kept), b = saturate_persistent(dropped);
  CHECK(a.object({0, 0}) == b.object({0, 0}));
  CHECK(a.object({1, 1}) == b.object({1, 1}));
  CHECK_FALSE(narratives_isomorphic(a, b));
}

TEST_CASE("generating data is checked before saturation", "[narrative]") {
  GeneratingData g = fixtures::icecream_persistent();
  g.bridges.pop_back();
  CHECK_THROWS_AS(saturate_persistent(g), std::invalid_argument);
  GeneratingData wrong_way = fixtures::icecream_cumulative();
  CHECK_THROWS_AS(saturate_persistent(wrong_way), std::invalid_argument);
  CHECK_THROWS_AS(saturate_persistent(GeneratingData{}), std::invalid_argument);
}

TEST_CASE("restriction keeps objects and composes maps", "[narrative]") {
  Narrative f = saturate_persistent(fixtures::icecream_persistent());
  Narrative r = restrict_narrative(f, sublattice(f.lattice(), LatticeFilter::min_length(2)));
  CHECK(r.intervals() == std::vector<Interval>{{1, 2}, {1, 3}, {2, 3}});
  CHECK(r.object({1, 3}) == f.object({1, 3}));
  CHECK(r.map({1, 3}, {2, 3}) == f.map({1, 3}, {2, 3}));
  CHECK_THROWS_AS(restrict_narrative(r, f.lattice()), SublatticeError);
}

TEST_CASE("narrative morphisms: identity, composition and naturality", "[narrative][morphism]") {
  Narrative f = saturate_persistent(fixtures::icecream_persistent());
  NarrativeMorphism id = identity_morphism(f);
  CHECK(check_morphism(id).empty());
  CHECK(is_iso_morphism(id));
  CHECK(compose(id, id).components == id.components);

  // Swapping a1 and a2 everywhere is an automorphism; swapping them only at
  // the first instant is not natural.
  auto autos = narrative_morphisms(f, f);
  std::size_t isos = 0;
  for (const auto& m : autos) isos += is_iso_morphism(m);
  CHECK(isos == 2);

  NarrativeMorphism broken = id;
  const CSet& f11 = f.object({1, 1});
  broken.components[f.lattice().index({1, 1})] =
      set_map(f11, f11, {{"a1", "a2"}, {"a2", "a1"}, {"b", "b"}, {"c", "c"}});
  auto issues = check_morphism(broken);
  REQUIRE_FALSE(issues.empty());
  CHECK(issues.front().other == Interval(1, 1));
}

TEST_CASE("morphisms extend uniquely from instants and bridges", "[narrative][morphism][property]") {
  gen::Rng rng(4242);
  for (int round = 0; round < 20; ++round) {
    const Flavor flavor = round % 2 ? Flavor::Cumulative : Flavor::Persistent;
    const bool graph = round % 4 >= 2;
    const Time T = static_cast<Time>(gen::uniform(rng, 2, 3));
    Narrative a = gen::random_narrative(rng, flavor, graph, T, 2);
    Narrative b = gen::random_narrative(rng, flavor, graph, T, 3);
    auto ms = narrative_morphisms(a, b);
    ms.push_back(identity_morphism(a));
    for (const auto& m : ms) {
      std::map<Interval, CSetMorphism> gen;
      for (const auto& iv : a.intervals())
        if (iv.length() <= 2) gen.emplace(iv, m.at(iv));
      auto ext = extend_morphism(m.source, m.target, gen);
      REQUIRE(ext);
      CHECK(ext->components == m.components);
    }
  }
}

TEST_CASE("extension fails when the generating components are not natural", "[narrative][morphism]") {
  Narrative f = saturate_persistent(fixtures::icecream_persistent());
  std::map<Interval, CSetMorphism> gen;
  for (const auto& iv : f.intervals())
    if (iv.length() <= 2) gen.emplace(iv, CSetMorphism::identity(f.object(iv)));
  const CSet& f11 = f.object({1, 1});
  gen.at({1, 1}) = set_map(f11, f11, {{"a1", "a2"}, {"a2", "a1"}, {"b", "b"}, {"c", "c"}});
  CHECK_FALSE(extend_morphism(f, f, gen));
}

TEST_CASE("isomorphic narratives are recognised", "[narrative][morphism]") {
  gen::Rng rng(8);
  for (int round = 0; round < 15; ++round) {
    Narrative a = gen::random_narrative(rng, Flavor::Persistent, round % 2, 2, 3);
    auto iso = find_narrative_isomorphism(a, a);
    REQUIRE(iso);
    CHECK(check_morphism(*iso).empty());
    CHECK(is_iso_morphism(*iso));
  }
  Narrative p = saturate_persistent(fixtures::icecream_persistent());
  Narrative c = saturate_cumulative(fixtures::icecream_cumulative());
  CHECK_THROWS_AS(narratives_isomorphic(p, c), std::invalid_argument);
}
