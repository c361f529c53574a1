#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace pipeline {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

inline Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = chronica::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Every file below `root`, keyed by relative path.
inline std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  return files;
}

/// Runs every subcommand over the corpus in `data`, writing results and a
/// transcript of exit codes and console output into `out`.
inline void run_corpus(const fs::path& data, const fs::path& out) {
  fs::create_directories(out);
  std::vector<fs::path> inputs;
  for (const auto& e : fs::directory_iterator(data)) inputs.push_back(e.path());
  std::sort(inputs.begin(), inputs.end());
  std::ofstream log(out / "transcript.txt", std::ios::binary);
  auto step = [&](const std::vector<std::string>& args) {
    Outcome o = run(args);
    log << "$ chronica";
    for (const auto& a : args) log << ' ' << (a.rfind(out.string(), 0) == 0 ? a.substr(out.string().size()) : a);
    log << "\nexit " << o.code << "\n" << o.out << o.err;
  };
  for (const auto& in : inputs) {
    const std::string stem = in.stem().string();
    const std::string base = (out / stem).string();
    std::vector<std::string> narratives;
    if (in.extension() == ".edges") {
      for (const char* p : {"persistent", "cumulative"}) {
        const std::string file = base + "." + p + ".json";
        step({"encode", "--input", in.string(), "--perspective", p, "--out", file});
        narratives.push_back(file);
      }
      for (const char* k : {"2", "3"})
        for (const char* n : {"1", "2"}) step({"cliques", "--input", in.string(), "--k", k, "--n", n});
      std::istringstream first(slurp(in));
      std::string line, u, v, t;
      while (std::getline(first, line))
        if (!line.empty() && line[0] != '#') break;
      std::istringstream(line) >> u >> v >> t;
      step({"paths", "--input", in.string(), "--from", u, "--to", v});
      step({"paths", "--input", in.string(), "--from", u, "--to", v, "--strict"});
    } else if (in.extension() == ".json") {
      narratives.push_back(in.string());
    }
    for (std::size_t i = 0; i < narratives.size(); ++i) {
      const std::string& n = narratives[i];
      const std::string tag = base + "." + std::to_string(i);
      step({"check", n});
      step({"roundtrip", n});
      const std::string flavor = chronica::cli::load_narrative(n).flavor() == chronica::Flavor::Persistent
                                     ? "cumulative"
                                     : "persistent";
      step({"convert", n, "--to", flavor, "--out", tag + ".converted.json"});
      step({"restrict", n, "--min-length", "2", "--out", tag + ".coarse.json"});
      step({"export", n, "--dot", tag + ".dot"});
    }
  }
}

}  // namespace pipeline
