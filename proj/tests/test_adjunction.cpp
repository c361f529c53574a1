#include <catch_amalgamated.hpp>

#include "chronica/adjunction.hpp"
#include "chronica/temporal_graph.hpp"
#include "fixtures.hpp"
#include "properties.hpp"
#include "random.hpp"

using namespace chronica;
using fixtures::set_map;
using fixtures::set_of;

namespace {

bool all_iso(const NarrativeMorphism& m) { return is_iso_morphism(m); }

/// How many vertex pairs are joined by exactly 1, 2, ... edges.
std::map<std::size_t, std::size_t> multiplicities(const CSet& g) {
  std::map<std::pair<Id, Id>, std::size_t> pairs;
  for (const auto& e : g.carrier("E")) {
    Id s = *g.apply("s", e), t = *g.apply("t", e);
    if (t < s) std::swap(s, t);
    ++pairs[{s, t}];
  }
  std::map<std::size_t, std::size_t> out;
  for (const auto& [p, n] : pairs) ++out[n];
  return out;
}

}  // namespace

TEST_CASE("K on the persistent square narrative", "[adjunction][example]") {
  Narrative p = encode_persistent(fixtures::square());
  Narrative k = to_cumulative(p);
  CHECK(check_cosheaf(k).ok());
  const CSet& k01 = k.object({0, 1});
  CHECK(k01.size("V") == 4);
  CHECK(k01.size("E") == 6);
  for (const char* u : {"a", "b", "c", "d"})
    for (const char* v : {"a", "b", "c", "d"})
      if (std::string(u) < v) CHECK(fixtures::edges_between(k01, u, v) == 1);
  const CSet& k02 = k.object({0, 2});
  CHECK(k02.size("V") == 4);
  CHECK(k02.size("E") == 8);
  // Four pairs once, the two pairs a-d and b-c twice.
  CHECK(multiplicities(k02) == std::map<std::size_t, std::size_t>{{1, 4}, {2, 2}});
  // The depicted cumulative narrative is exactly K of the persistent one.
  CHECK(narratives_isomorphic(k, encode_cumulative(fixtures::square())));
}

TEST_CASE("P on the cumulative square narrative", "[adjunction][example]") {
  Narrative c = encode_cumulative(fixtures::square());
  Narrative p = to_persistent(c);
  CHECK(check_sheaf(p).ok());
  CHECK(p.object({0, 1}).size("V") == 4);
  CHECK(p.object({0, 1}).size("E") == 0);
  CHECK(narratives_isomorphic(p, encode_persistent(fixtures::square())));
  NarrativeMorphism eps = counit(c);
  CHECK(check_morphism(eps).empty());
  CHECK(eps.at({0, 2}).target() == c.object({0, 2}));
  CHECK(is_iso(eps.at({0, 2})));
}

TEST_CASE("square narratives: triangles and round trips", "[adjunction][example]") {
  Narrative p = encode_persistent(fixtures::square());
  Narrative c = encode_cumulative(fixtures::square());
  CHECK(check_triangles(p));
  CHECK(check_triangles(c));
  RoundTripReport rp = roundtrip_report(p);
  RoundTripReport rc = roundtrip_report(c);
  CHECK(rp.lossless);
  CHECK(rc.lossless);
  CHECK(rp.entries.size() == 6);
  for (const auto& e : rp.entries)
    for (const auto& [sort, d] : e.size_delta) CHECK(d == 0);
}

TEST_CASE("ice cream: the unit at [1,3] is an isomorphism onto two elements", "[adjunction][example]") {
  Narrative f = saturate_persistent(fixtures::icecream_persistent());
  NarrativeMorphism eta = unit(f);
  CHECK(check_morphism(eta).empty());
  CHECK(eta.at({1, 3}).target().size(0) == 2);
  CHECK(is_iso(eta.at({1, 3})));
  CHECK(check_triangles(f));
}

TEST_CASE("constant narratives are fixed by K and P", "[adjunction]") {
  CSet x = set_of({"p", "q", "r"});
  for (Time T : {0u, 1u, 3u}) {
    Narrative f = saturate_persistent(fixtures::constant_data(x, T));
    Narrative k = to_cumulative(f);
    for (const auto& iv : k.intervals()) CHECK(k.object(iv).size(0) == 3);
    CHECK(all_iso(unit(f)));
    CHECK(roundtrip_report(f).lossless);
    Narrative c = saturate_cumulative(fixtures::constant_data(x, T));
    CHECK(all_iso(counit(c)));
    CHECK(check_triangles(f));
    CHECK(check_triangles(c));
  }
}

TEST_CASE("a cumulative narrative that merges elements loses data in a round trip", "[adjunction]") {
  // x and y merge into m; z goes to n; nothing persists across [0,1].
  CSet f0 = set_of({"x", "y"}), f1 = set_of({"z"}), b = set_of({"m", "n"});
  GeneratingData g;
  g.snapshots = {f0, f1};
  g.bridges = {b};
  g.left = {set_map(f0, b, {{"x", "m"}, {"y", "m"}})};
  g.right = {set_map(f1, b, {{"z", "n"}})};
  Narrative c = saturate_cumulative(g);
  Narrative kp = to_cumulative(to_persistent(c));
  CHECK(to_persistent(c).object({0, 1}).size(0) == 0);
  CHECK(kp.object({0, 1}).size(0) == 3);
  RoundTripReport r = roundtrip_report(c);
  CHECK_FALSE(r.lossless);
  REQUIRE(r.first_lossy);
  CHECK(*r.first_lossy == Interval(0, 1));
  CHECK(r.entries[1].interval == Interval(0, 1));
  CHECK(r.entries[1].size_delta.at("X") == 1);
  CHECK(check_triangles(c));
}

TEST_CASE("K and P preserve identities and composites", "[adjunction][property]") {
  gen::Rng rng(77);
  for (int round = 0; round < 16; ++round) {
    const bool graph = round % 2;
    const Flavor flavor = round % 4 < 2 ? Flavor::Persistent : Flavor::Cumulative;
    const Time T = static_cast<Time>(gen::uniform(rng, 0, 2));
    Narrative a = gen::random_narrative(rng, flavor, graph, T, 2);
    Narrative b = gen::random_narrative(rng, flavor, graph, T, 3);
    Narrative c = gen::random_narrative(rng, flavor, graph, T, 3);
    auto functor = [&](const NarrativeMorphism& m) {
      return flavor == Flavor::Persistent ? to_cumulative(m) : to_persistent(m);
    };
    CHECK(functor(identity_morphism(a)).components == identity_morphism(functor(identity_morphism(a)).source).components);
    auto ab = props::detail::some_morphisms(a, b, 3);
    auto bc = props::detail::some_morphisms(b, c, 3);
    for (const auto& f : ab)
      for (const auto& g : bc) {
        NarrativeMorphism image = functor(compose(g, f));
        CHECK(check_morphism(image).empty());
        CHECK(image.components == compose(functor(g), functor(f)).components);
      }
  }
}

TEST_CASE("K over the full subinterval poset agrees with iterated pushouts", "[adjunction][property]") {
  gen::Rng rng(1234);
  for (int round = 0; round < 20; ++round) {
    Narrative f = gen::random_narrative(rng, Flavor::Persistent, round % 2, gen::uniform(rng, 1, 3), 3);
    Narrative k = to_cumulative(f);
    CHECK(check_cosheaf(k).ok());
    CHECK(narratives_isomorphic(k, saturate_cumulative(extract_generating_data(k))));
    Narrative c = gen::random_narrative(rng, Flavor::Cumulative, round % 2, gen::uniform(rng, 1, 3), 3);
    Narrative p = to_persistent(c);
    CHECK(check_sheaf(p).ok());
    CHECK(narratives_isomorphic(p, saturate_persistent(extract_generating_data(p))));
  }
}

TEST_CASE("triangle identities and naturality of unit and counit", "[adjunction][property]") {
  props::Verdict v = props::adjunction_laws(2024, 24, 3, 2);
  INFO(v.summary());
  CHECK(v.cases == 24);
  CHECK(v.witnesses > v.cases);
  CHECK(v.ok());
}

TEST_CASE("transposition is a bijection of hom-sets", "[adjunction][property]") {
  props::Verdict v = props::hom_bijection(99, 12, 3, 3);
  INFO(v.summary());
  CHECK(v.cases == 12);
  CHECK(v.witnesses > 10 * v.cases);
  CHECK(v.ok());
}
