#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chronica/chronica.hpp"

namespace chronica::cli {

enum Exit : int {
  kOk = 0,
  kNegative = 1,   // check failed, lossy round trip, methods disagree
  kUsage = 2,      // bad flags or parameters
  kInput = 3,      // unreadable or malformed input
  kSchema = 4,     // input over the wrong schema
  kSublattice = 5  // requested intervals do not form a sub-join-semilattice
};

inline const char* kExitHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  negative result (check failed, lossy round trip, clique methods disagree)\n"
    "  2  usage error (unknown flag, missing option, parameter out of range)\n"
    "  3  input error (unreadable file, malformed JSON or edge list)\n"
    "  4  schema mismatch\n"
    "  5  sublattice violation\n"
    "Environment: CHRONICA_CONFIG names a key=value config file; flags override it.";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::ParseError("cannot write '" + path + "'");
  out << text;
}

inline Narrative load_narrative(const std::string& path) {
  return io::narrative_from_json(io::parse_json(read_file(path), path));
}

/// "[0,1],[1,2]" -> intervals.
inline std::vector<Interval> parse_interval_list(const std::string& text) {
  static const std::regex item(R"(\[\s*\d+\s*,\s*\d+\s*\])");
  std::vector<Interval> out;
  for (std::sregex_iterator it(text.begin(), text.end(), item), end; it != end; ++it) {
    try {
      out.push_back(parse_interval(it->str()));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  std::string stripped = std::regex_replace(text, item, "");
  stripped.erase(std::remove_if(stripped.begin(), stripped.end(), [](char c) { return c == ',' || c == ' '; }),
                 stripped.end());
  if (!stripped.empty() || out.empty()) throw UsageError("cannot read interval list '" + text + "'");
  return out;
}

inline void emit(std::ostream& out, const std::string& text, const std::string& path) {
  if (path.empty())
    out << text;
  else
    write_file(path, text);
}

/// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chronica: temporal data as sheaves and cosheaves of C-sets", "chronica"};
  app.footer(kExitHelp);
  app.require_subcommand(1);
  if (const char* cfg = std::getenv("CHRONICA_CONFIG"); cfg && *cfg)
    app.set_config("--config", cfg, "key=value configuration file", true);
  else
    app.set_config("--config", "", "key=value configuration file");

  std::string input, output, perspective = "persistent", target_flavor, method = "both", from, to, keep, dot_dir;
  std::string narrative_path;
  std::size_t k = 2, n = 1, min_length = 0;
  std::optional<std::size_t> max_length, restrict_min, subsample;
  bool strict = false, literal = false;

  auto* encode = app.add_subcommand("encode", "Encode a temporal edge list as a narrative");
  encode->add_option("--input", input, "Temporal edge list (u v t per line)")->required();
  encode->add_option("--perspective", perspective, "persistent or cumulative")
      ->check(CLI::IsMember({"persistent", "cumulative"}))
      ->capture_default_str();
  encode->add_option("--out", output, "Output file (default: standard output)");

  auto* check_cmd = app.add_subcommand("check", "Check the sheaf or cosheaf condition");
  check_cmd->add_option("narrative", narrative_path, "Narrative JSON")->required();

  auto* convert = app.add_subcommand("convert", "Apply K (to cumulative) or P (to persistent)");
  convert->add_option("narrative", narrative_path, "Narrative JSON")->required();
  convert->add_option("--to", target_flavor, "cumulative or persistent")
      ->required()
      ->check(CLI::IsMember({"persistent", "cumulative"}));
  convert->add_option("--out", output, "Output file (default: standard output)");

  auto* roundtrip = app.add_subcommand("roundtrip", "Report what a round trip through K and P loses");
  roundtrip->add_option("narrative", narrative_path, "Narrative JSON")->required();

  auto* cliques = app.add_subcommand("cliques", "Enumerate temporal cliques");
  cliques->add_option("--input", input, "Temporal edge list")->required();
  cliques->add_option("--k", k, "Minimum clique size (>= 2)")->capture_default_str();
  cliques->add_option("--n", n, "Window length (1..T+1)")->capture_default_str();
  cliques->add_option("--method", method, "brute, narrative or both")
      ->check(CLI::IsMember({"brute", "narrative", "both"}))
      ->capture_default_str();
  cliques->add_flag("--literal", literal, "Brute force with the quantifier read to include x = y");

  auto* paths = app.add_subcommand("paths", "List temporal paths between two vertices");
  paths->add_option("--input", input, "Temporal edge list")->required();
  paths->add_option("--from", from, "Start vertex")->required();
  paths->add_option("--to", to, "End vertex")->required();
  paths->add_flag("--strict", strict, "Require strictly increasing times");
  paths->add_option("--min-length", min_length, "Only paths with at least this many edges");
  paths->add_option("--max-length", max_length, "Only paths with at most this many edges");

  auto* restrict_cmd = app.add_subcommand("restrict", "Restrict a narrative to a sublattice");
  restrict_cmd->add_option("narrative", narrative_path, "Narrative JSON")->required();
  auto* o_min = restrict_cmd->add_option("--min-length", restrict_min, "Keep intervals of at least this length");
  auto* o_keep = restrict_cmd->add_option("--keep", keep, "Keep exactly these intervals, e.g. \"[0,1],[1,2],[0,2]\"");
  auto* o_sub = restrict_cmd->add_option("--subsample", subsample, "Keep intervals with endpoints divisible by s");
  o_min->excludes(o_keep)->excludes(o_sub);
  o_keep->excludes(o_sub);
  restrict_cmd->add_option("--out", output, "Output file (default: standard output)");

  auto* export_cmd = app.add_subcommand("export", "Write one DOT file per interval");
  export_cmd->add_option("narrative", narrative_path, "Narrative JSON")->required();
  export_cmd->add_option("--dot", dot_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'chronica --help' for usage\n";
    return kUsage;
  }

  try {
    if (*encode) {
      K3TemporalGraph g = io::parse_edge_list(read_file(input));
      Narrative nar = perspective == "persistent" ? encode_persistent(g) : encode_cumulative(g);
      emit(out, io::dump(io::to_json(nar)), output);
      return kOk;
    }
    if (*check_cmd) {
      NarrativeReport r = check(load_narrative(narrative_path));
      out << io::dump(io::to_json(r));
      return r.ok() ? kOk : kNegative;
    }
    if (*convert) {
      Narrative nar = load_narrative(narrative_path);
      if (to_string(nar.flavor()) == target_flavor)
        throw UsageError("narrative is already " + target_flavor);
      Narrative res = nar.flavor() == Flavor::Persistent ? to_cumulative(nar) : to_persistent(nar);
      emit(out, io::dump(io::to_json(res)), output);
      return kOk;
    }
    if (*roundtrip) {
      RoundTripReport r = roundtrip_report(load_narrative(narrative_path));
      out << io::dump(io::to_json(r));
      return r.lossless ? kOk : kNegative;
    }
    if (*cliques) {
      K3TemporalGraph g = io::parse_edge_list(read_file(input));
      if (k < 2) throw UsageError("--k must be at least 2");
      if (n < 1 || n > static_cast<std::size_t>(g.lifetime()) + 1)
        throw UsageError("--n must lie in [1, " + std::to_string(g.lifetime() + 1) + "]");
      if (literal && method != "brute") throw UsageError("--literal applies to --method brute only");
      io::json doc{{"format", io::kFormat}, {"k", k}, {"n", n}, {"method", method}};
      std::vector<VertexSubset> brute, narrative;
      if (method != "narrative") brute = temporal_cliques_brute(g, k, n, literal);
      if (method != "brute") narrative = temporal_cliques_narrative(g, k, n);
      doc["cliques"] = method == "narrative" ? narrative : brute;
      if (method == "both") {
        doc["agree"] = brute == narrative;
        if (brute != narrative) {
          doc["narrative_cliques"] = narrative;
          out << io::dump(doc);
          err << "error: brute-force and narrative clique enumerations disagree\n";
          return kNegative;
        }
      }
      out << io::dump(doc);
      return kOk;
    }
    if (*paths) {
      K3TemporalGraph g = io::parse_edge_list(read_file(input));
      WalkOptions opts{strict, max_length.value_or(g.vertices().size()), true};
      std::size_t shown = 0;
      for (const auto& w : temporal_walks(g, from, to, opts)) {
        if (w.length() < min_length) continue;
        out << to_string(g, w) << "\n";
        ++shown;
      }
      if (!shown) out << "none\n";
      return kOk;
    }
    if (*restrict_cmd) {
      Narrative nar = load_narrative(narrative_path);
      LatticeFilter f;
      if (restrict_min)
        f = LatticeFilter::min_length(static_cast<Time>(*restrict_min));
      else if (subsample)
        f = LatticeFilter::subsample(static_cast<Time>(*subsample));
      else if (!keep.empty())
        f = LatticeFilter::keep(parse_interval_list(keep));
      else
        throw UsageError("restrict needs one of --min-length, --keep or --subsample");
      TimeLattice sub = sublattice(nar.lattice(), f);
      if (sub.empty()) throw SublatticeError("the requested sublattice is empty");
      emit(out, io::dump(io::to_json(change_resolution(nar, sub))), output);
      return kOk;
    }
    if (*export_cmd) {
      Narrative nar = load_narrative(narrative_path);
      auto files = io::to_dot_files(nar);
      std::error_code ec;
      std::filesystem::create_directories(dot_dir, ec);
      if (ec) throw io::ParseError("cannot create directory '" + dot_dir + "'");
      for (const auto& [name, text] : files) {
        write_file((std::filesystem::path(dot_dir) / name).string(), text);
        out << name << "\n";
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SublatticeError& e) {
    err << "error: " << e.what() << "\n";
    return kSublattice;
  } catch (const io::SchemaMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kSchema;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  }
  return kUsage;
}

}  // namespace chronica::cli
