#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "chronica/homomorphism.hpp"
#include "chronica/narrative.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "random.hpp"

using namespace chronica;

namespace {

CSet cycle(std::size_t n, const std::string& p = "") {
  std::map<std::string, std::vector<Id>> cs{{"V", {}}, {"E", {}}};
  std::map<std::string, std::map<Id, Id>> as;
  for (std::size_t i = 0; i < n; ++i) {
    cs["V"].push_back(p + "v" + std::to_string(i));
    cs["E"].push_back(p + "e" + std::to_string(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    as["s"][p + "e" + std::to_string(i)] = p + "v" + std::to_string(i);
    as["t"][p + "e" + std::to_string(i)] = p + "v" + std::to_string((i + 1) % n);
  }
  return CSet::from_names(schemas::graph(), cs, as);
}

CSet single_edge() {
  return CSet::from_names(schemas::graph(), {{"V", {"x", "y"}}, {"E", {"xy"}}}, {{"s", {{"xy", "x"}}}, {"t", {{"xy", "y"}}}});
}

std::set<Components> as_set(const std::vector<CSetMorphism>& ms) {
  std::set<Components> s;
  for (const auto& m : ms) s.insert(m.components());
  return s;
}

}  // namespace

TEST_CASE("homomorphism counts on small graphs", "[hom]") {
  // A directed edge lands on any of the three arcs of a directed 3-cycle.
  CHECK(count_homomorphisms(single_edge(), cycle(3)) == 3);
  CHECK(count_homomorphisms(cycle(3), single_edge()) == 0);
  CHECK(oracle::all_homomorphisms(single_edge(), cycle(3)).size() == 3);
  CHECK(oracle::all_homomorphisms(cycle(3), single_edge()).empty());
  // C6 -> C3 wraps around twice in 3 rotations; C3 -> C6 is impossible.
  CHECK(count_homomorphisms(cycle(6), cycle(3)) == 3);
  CHECK(count_homomorphisms(cycle(3), cycle(6)) == 0);
  CHECK(count_homomorphisms(cycle(3), cycle(3), true) == 3);
}

TEST_CASE("homomorphism search agrees with exhaustive enumeration", "[hom][property]") {
  gen::Rng rng(20240611);
  for (int round = 0; round < 150; ++round) {
    CSet a = gen::random_graph(rng, "a", 3, 3);
    CSet b = gen::random_graph(rng, "b", 3, 4);
    auto found = find_homomorphisms(a, b);
    auto brute = oracle::all_homomorphisms(a, b);
    REQUIRE(found.size() == brute.size());
    CHECK(as_set(found) == std::set<Components>(brute.begin(), brute.end()));
    for (const auto& m : found) CHECK(is_valid(m));

    std::set<Components> monic_brute;
    for (const auto& c : brute) {
      CSetMorphism m(a, b, c);
      if (is_mono(m)) monic_brute.insert(c);
    }
    CHECK(as_set(find_homomorphisms(a, b, true)) == monic_brute);
  }
}

TEST_CASE("set homomorphisms are all functions", "[hom]") {
  gen::Rng rng(7);
  for (int round = 0; round < 30; ++round) {
    CSet a = gen::random_set(rng, "a", 3), b = gen::random_set(rng, "b", 3);
    std::size_t expect = 1;
    for (std::size_t i = 0; i < a.size(0); ++i) expect *= b.size(0);
    CHECK(count_homomorphisms(a, b) == expect);
  }
}

TEST_CASE("isomorphism search", "[hom]") {
  CSet c = cycle(4), d = cycle(4, "q");
  auto iso = find_isomorphism(c, d);
  REQUIRE(iso);
  CHECK(is_iso(*iso));
  CHECK(is_valid(*iso));

  // Same sizes, different structure: a 4-cycle versus two 2-cycles.
  CSet two = CSet::from_names(schemas::graph(), {{"V", {"a", "b", "c", "d"}}, {"E", {"1", "2", "3", "4"}}},
                              {{"s", {{"1", "a"}, {"2", "b"}, {"3", "c"}, {"4", "d"}}},
                               {"t", {{"1", "b"}, {"2", "a"}, {"3", "d"}, {"4", "c"}}}});
  CHECK_FALSE(is_isomorphic(c, two));
  CHECK(is_isomorphic(two, two));
  CHECK_FALSE(is_isomorphic(c, cycle(5)));
}

TEST_CASE("search rejects mismatched or invalid inputs", "[hom]") {
  CHECK_THROWS_AS(count_homomorphisms(cycle(3), fixtures::set_of({"a"})), std::invalid_argument);
  CSet broken = CSet::from_names(schemas::graph(), {{"V", {"a"}}, {"E", {"e"}}}, {{"s", {{"e", "a"}}}});
  CHECK_THROWS_AS(count_homomorphisms(broken, cycle(3)), std::invalid_argument);
}

TEST_CASE("narrative morphism search matches per-interval enumeration", "[hom][narrative][property]") {
  gen::Rng rng(99);
  for (int round = 0; round < 25; ++round) {
    const bool graph = round % 2 == 1;
    const Flavor flavor = round % 3 == 0 ? Flavor::Cumulative : Flavor::Persistent;
    Narrative a = gen::random_narrative(rng, flavor, graph, 1, 2);
    Narrative b = gen::random_narrative(rng, flavor, graph, 1, 2);
    auto found = narrative_morphisms(a, b);
    // Oracle: all combinations of per-interval homomorphisms, kept when natural.
    std::vector<std::vector<Components>> per;
    for (const auto& iv : a.intervals()) per.push_back(oracle::all_homomorphisms(a.object(iv), b.object(iv)));
    std::size_t natural = 0;
    std::vector<std::size_t> pick(per.size(), 0);
    bool empty = false;
    for (const auto& p : per) empty = empty || p.empty();
    while (!empty) {
      NarrativeMorphism m{a, b, {}};
      for (std::size_t i = 0; i < per.size(); ++i) m.components.emplace_back(a.object_at(i), b.object_at(i), per[i][pick[i]]);
      if (check_morphism(m).empty()) ++natural;
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == per[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    CHECK(found.size() == natural);
    for (const auto& m : found) CHECK(check_morphism(m).empty());
  }
}
