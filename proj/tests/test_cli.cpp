#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <unistd.h>

#include "pipeline.hpp"

namespace fs = std::filesystem;
using pipeline::run;

namespace {

const std::string kData = CHRONICA_DATA_DIR;

std::string data(const std::string& name) { return kData + "/" + name; }

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("chronica-cli-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("usage and help", "[cli]") {
  auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Exit codes:") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"check"}).code == 2);
  CHECK(run({"encode", "--input", data("square.edges"), "--perspective", "sideways"}).code == 2);
  CHECK(run({"encode", "--input", data("missing.edges")}).code == 3);
}

TEST_CASE("encode and check", "[cli]") {
  auto enc = run({"encode", "--input", data("square.edges"), "--perspective", "cumulative"});
  REQUIRE(enc.code == 0);
  chronica::Narrative n = chronica::io::narrative_from_json(chronica::io::parse_json(enc.out, "stdout"));
  CHECK(n.flavor() == chronica::Flavor::Cumulative);
  CHECK(n.object({0, 2}).size("E") == 8);

  auto bad = run({"check", data("overfull.json")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("\"interval\": \"[1,3]\"") != std::string::npos);
  CHECK(run({"check", data("icecream_persistent.json")}).code == 0);
  CHECK(run({"check", data("icecream_cumulative.json")}).code == 0);

  const fs::path dir = scratch("broken");
  std::ofstream(dir / "broken.json") << "{\"format\": 1";
  CHECK(run({"check", (dir / "broken.json").string()}).code == 3);
  std::ofstream(dir / "alien.json") << "{\"format\": 1, \"flavor\": \"persistent\", \"schema\": \"Hypergraph\", "
                                       "\"lattice\": {\"lifetime\": 0, \"intervals\": [\"[0,0]\"]}, "
                                       "\"objects\": {}, \"maps\": {}}";
  CHECK(run({"check", (dir / "alien.json").string()}).code == 4);
}

TEST_CASE("convert, roundtrip and restrict", "[cli]") {
  const fs::path dir = scratch("convert");
  const std::string p = (dir / "p.json").string(), c = (dir / "c.json").string();
  REQUIRE(run({"encode", "--input", data("square.edges"), "--out", p}).code == 0);
  REQUIRE(run({"convert", p, "--to", "cumulative", "--out", c}).code == 0);
  CHECK(chronica::narratives_isomorphic(
      chronica::cli::load_narrative(c),
      chronica::io::narrative_from_json(chronica::io::parse_json(
          run({"encode", "--input", data("square.edges"), "--perspective", "cumulative"}).out, "stdout"))));
  CHECK(run({"convert", p, "--to", "persistent"}).code == 2);
  CHECK(run({"roundtrip", p}).code == 0);
  auto lossy = run({"roundtrip", data("icecream_cumulative.json")});
  CHECK((lossy.code == 0 || lossy.code == 1));
  CHECK(lossy.out.find("\"lossless\"") != std::string::npos);

  auto coarse = run({"restrict", c, "--min-length", "2"});
  REQUIRE(coarse.code == 0);
  chronica::Narrative r = chronica::io::narrative_from_json(chronica::io::parse_json(coarse.out, "stdout"));
  CHECK(r.intervals() == std::vector<chronica::Interval>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(run({"restrict", c, "--keep", "[0,1],[1,2]"}).code == 5);
  CHECK(run({"restrict", c, "--keep", "[0,1] junk"}).code == 2);
  CHECK(run({"restrict", c, "--min-length", "9"}).code == 5);
  CHECK(run({"restrict", c}).code == 2);
  CHECK(run({"restrict", c, "--min-length", "2", "--subsample", "2"}).code == 2);
  CHECK(run({"restrict", c, "--keep", "[0,0],[2,2]"}).code == 0);
}

TEST_CASE("cliques and paths", "[cli]") {
  auto both = run({"cliques", "--input", data("cliques.edges"), "--k", "2", "--n", "2"});
  REQUIRE(both.code == 0);
  auto doc = chronica::io::parse_json(both.out, "stdout");
  CHECK(doc["agree"] == true);
  CHECK(doc["cliques"].size() == 4);
  CHECK(run({"cliques", "--input", data("cliques.edges"), "--k", "3", "--n", "1"}).out.find("\"cliques\": []") !=
        std::string::npos);
  CHECK(run({"cliques", "--input", data("cliques.edges"), "--n", "4"}).code == 2);
  CHECK(run({"cliques", "--input", data("cliques.edges"), "--k", "1"}).code == 2);
  CHECK(run({"cliques", "--input", data("cliques.edges"), "--literal"}).code == 2);
  CHECK(run({"cliques", "--input", data("cliques.edges"), "--literal", "--method", "brute"}).code == 0);
  CHECK(run({"cliques", "--input", data("cliques.edges"), "--method", "magic"}).code == 2);

  auto strict = run({"paths", "--input", data("schedule.edges"), "--from", "u", "--to", "y", "--strict"});
  REQUIRE(strict.code == 0);
  // w-x exists only at time 1, together with v-w.
  CHECK(strict.out == "none\n");
  auto loose = run({"paths", "--input", data("schedule.edges"), "--from", "u", "--to", "y"});
  CHECK(loose.out == "u -0-> v -1-> w -1-> x -3-> y\n");
  CHECK(run({"paths", "--input", data("schedule.edges"), "--from", "u", "--to", "w", "--strict"}).out ==
        "u -0-> v -1-> w\nu -2-> w\n");
  CHECK(run({"paths", "--input", data("schedule.edges"), "--from", "y", "--to", "u", "--strict"}).out == "none\n");
  CHECK(run({"paths", "--input", data("schedule.edges"), "--from", "u", "--to", "y", "--min-length", "9"}).out ==
        "none\n");
  CHECK(run({"paths", "--input", data("schedule.edges"), "--from", "u", "--to", "q"}).code == 3);
}

TEST_CASE("export", "[cli]") {
  const fs::path dir = scratch("export");
  auto ok = run({"export", data("overfull.json"), "--dot", (dir / "overfull").string()});
  CHECK(ok.code == 4);
  const std::string p = (dir / "p.json").string();
  REQUIRE(run({"encode", "--input", data("square.edges"), "--out", p}).code == 0);
  auto dot = run({"export", p, "--dot", (dir / "square").string()});
  REQUIRE(dot.code == 0);
  CHECK(dot.out == "0-0.dot\n0-1.dot\n0-2.dot\n1-1.dot\n1-2.dot\n2-2.dot\n");
  CHECK(pipeline::slurp(dir / "square" / "1-2.dot").find("\"a\" -- \"c\"") != std::string::npos);
}

TEST_CASE("configuration file", "[cli]") {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "chronica.ini";
  std::ofstream(cfg) << "[cliques]\nk=3\nn=2\n";
  ::setenv("CHRONICA_CONFIG", cfg.c_str(), 1);
  auto from_file = run({"cliques", "--input", data("cliques.edges")});
  auto overridden = run({"cliques", "--input", data("cliques.edges"), "--k", "2"});
  ::setenv("CHRONICA_CONFIG", (dir / "absent.ini").c_str(), 1);
  auto absent = run({"cliques", "--input", data("cliques.edges")});
  ::unsetenv("CHRONICA_CONFIG");
  REQUIRE(from_file.code == 0);
  auto doc = chronica::io::parse_json(from_file.out, "stdout");
  CHECK(doc["k"] == 3);
  CHECK(doc["n"] == 2);
  CHECK(doc["cliques"].size() == 1);
  CHECK(chronica::io::parse_json(overridden.out, "stdout")["k"] == 2);
  CHECK(absent.code == 3);
}

TEST_CASE("two pipeline runs produce identical files", "[cli][determinism]") {
  const fs::path a = scratch("run-a"), b = scratch("run-b");
  pipeline::run_corpus(kData, a);
  pipeline::run_corpus(kData, b);
  auto fa = pipeline::snapshot(a), fb = pipeline::snapshot(b);
  CHECK(fa.size() > 20);
  CHECK(fa == fb);
  CHECK(fa.at("transcript.txt").find("exit 1") != std::string::npos);
}

TEST_CASE("the installed binary runs", "[cli]") {
  const std::string bin = CHRONICA_BINARY;
  CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);
  CHECK(WEXITSTATUS(std::system((bin + " check " + data("overfull.json") + " > /dev/null").c_str())) == 1);
}
