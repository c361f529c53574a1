#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "chronica/adjunction.hpp"
#include "chronica/cset.hpp"
#include "chronica/narrative.hpp"
#include "chronica/schema.hpp"
#include "chronica/temporal_graph.hpp"
#include "chronica/timecat.hpp"

namespace chronica::io {

using nlohmann::json;

/// Version stamped into every document and required on input.
inline constexpr int kFormat = 1;

/// Malformed input: bad JSON, missing fields, bad edge-list lines.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input over the wrong kind of schema.
class SchemaMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Separator in map keys of narrative documents: "[0,1]→[0,0]".
inline const std::string kArrow = "→";

// ---------------------------------------------------------------------------
// Edge lists

/// Parses "u v t" lines; '#' starts a comment. Timestamps are remapped
/// order-preservingly onto 0..T.
inline K3TemporalGraph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::tuple<std::string, std::string, long long>> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string w; fields >> w;) f.push_back(w);
    if (f.empty()) continue;
    if (f.size() != 3)
      throw ParseError("line " + std::to_string(lineno) + ": expected 3 fields 'u v t', got " + std::to_string(f.size()));
    long long t = 0;
    try {
      std::size_t used = 0;
      t = std::stoll(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument(f[2]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": timestamp '" + f[2] + "' is not an integer");
    }
    for (int i = 0; i < 2; ++i)
      if (f[i].find('~') != std::string::npos)
        throw ParseError("line " + std::to_string(lineno) + ": vertex label '" + f[i] + "' contains '~'");
    records.emplace_back(f[0], f[1], t);
  }
  if (records.empty()) throw ParseError("edge list is empty");
  std::set<long long> stamps;
  for (const auto& r : records) stamps.insert(std::get<2>(r));
  std::map<long long, std::size_t> slot;
  for (long long s : stamps) slot.emplace(s, slot.size());
  std::vector<std::vector<std::pair<std::string, std::string>>> edges(stamps.size());
  for (const auto& [u, v, t] : records) edges[slot.at(t)].emplace_back(u, v);
  return K3TemporalGraph::from_labels({}, edges);
}

inline std::string write_edge_list(const K3TemporalGraph& g) {
  std::string out;
  for (Time t = 0; t <= g.lifetime(); ++t)
    for (const auto& [u, v] : g.edges_at(t))
      out += g.vertices()[u] + " " + g.vertices()[v] + " " + std::to_string(t) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

template <class T>
T get(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline void check_format(const json& doc, const std::string& what) {
  const json& f = field(doc, "format", what);
  if (!f.is_number_integer() || f.get<int>() != kFormat)
    throw ParseError(what + ": unsupported format " + f.dump() + " (expected " + std::to_string(kFormat) + ")");
}

inline Interval interval_key(const std::string& s) {
  try {
    return parse_interval(s);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace detail

inline json to_json(const ArrowPath& p, const Schema& s) {
  json names = json::array();
  for (std::size_t a : p.arrows) names.push_back(s.arrows()[a].name);
  return names;
}

/// Built-in schemas are referenced by name, anything else is spelled out.
inline json to_json(const SchemaPtr& s) {
  if (auto b = schemas::builtin(s->name()); b && *b == *s) return s->name();
  json j;
  j["name"] = s->name();
  j["sorts"] = s->sorts();
  j["arrows"] = json::array();
  for (const auto& a : s->arrows())
    j["arrows"].push_back({{"name", a.name}, {"source", s->sorts()[a.source]}, {"target", s->sorts()[a.target]}});
  j["equations"] = json::array();
  for (const auto& e : s->equations())
    j["equations"].push_back(
        {{"start", s->sorts()[e.lhs.start]}, {"lhs", to_json(e.lhs, *s)}, {"rhs", to_json(e.rhs, *s)}});
  return j;
}

inline SchemaPtr schema_from_json(const json& j) {
  if (j.is_string()) {
    auto s = schemas::builtin(j.get<std::string>());
    if (!s) throw SchemaMismatch("unknown schema '" + j.get<std::string>() + "'");
    return s;
  }
  const std::string where = "schema";
  try {
    SchemaBuilder b(detail::get<std::string>(detail::field(j, "name", where), where));
    for (const auto& s : detail::get<std::vector<std::string>>(detail::field(j, "sorts", where), where)) b.sort(s);
    for (const auto& a : detail::field(j, "arrows", where))
      b.arrow(detail::get<std::string>(detail::field(a, "name", where), where),
              detail::get<std::string>(detail::field(a, "source", where), where),
              detail::get<std::string>(detail::field(a, "target", where), where));
    if (j.contains("equations"))
      for (const auto& e : j.at("equations"))
        b.equation(detail::get<std::string>(detail::field(e, "start", where), where),
                   detail::get<std::vector<std::string>>(detail::field(e, "lhs", where), where),
                   detail::get<std::vector<std::string>>(detail::field(e, "rhs", where), where));
    return b.build();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
}

/// Carriers and actions only; the schema is stored alongside.
inline json body_to_json(const CSet& x) {
  const Schema& s = x.schema();
  json j;
  j["carriers"] = json::object();
  for (std::size_t k = 0; k < s.sort_count(); ++k) j["carriers"][s.sorts()[k]] = x.carrier(k);
  j["actions"] = json::object();
  for (std::size_t a = 0; a < s.arrow_count(); ++a) {
    json m = json::object();
    const auto& arrow = s.arrows()[a];
    for (std::size_t e = 0; e < x.size(arrow.source); ++e) {
      std::size_t y = x.action(a)[e];
      if (y < x.size(arrow.target)) m[x.carrier(arrow.source)[e]] = x.carrier(arrow.target)[y];
    }
    j["actions"][arrow.name] = m;
  }
  return j;
}

inline CSet body_from_json(const SchemaPtr& schema, const json& j, const std::string& where) {
  std::map<std::string, std::vector<Id>> carriers;
  std::map<std::string, std::map<Id, Id>> actions;
  const json& cs = detail::field(j, "carriers", where);
  if (!cs.is_object()) throw ParseError(where + ": carriers must be an object");
  for (const auto& [sort, ids] : cs.items())
    carriers[sort] = detail::get<std::vector<Id>>(ids, where + ".carriers." + sort);
  if (j.contains("actions")) {
    if (!j.at("actions").is_object()) throw ParseError(where + ": actions must be an object");
    for (const auto& [arrow, m] : j.at("actions").items())
      actions[arrow] = detail::get<std::map<Id, Id>>(m, where + ".actions." + arrow);
  }
  try {
    return CSet::from_names(schema, carriers, actions);
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline json to_json(const CSet& x) {
  json j = body_to_json(x);
  j["schema"] = to_json(x.schema_ptr());
  return j;
}

inline CSet cset_from_json(const json& j) {
  return body_from_json(schema_from_json(detail::field(j, "schema", "C-set")), j, "C-set");
}

inline json components_to_json(const CSetMorphism& m) {
  const Schema& s = m.source().schema();
  json j = json::object();
  for (std::size_t k = 0; k < s.sort_count(); ++k) {
    json c = json::object();
    for (std::size_t i = 0; i < m.source().size(k); ++i) {
      std::size_t y = m.component(k)[i];
      if (y < m.target().size(k)) c[m.source().carrier(k)[i]] = m.target().carrier(k)[y];
    }
    j[s.sorts()[k]] = c;
  }
  return j;
}

inline CSetMorphism morphism_from_json(const CSet& source, const CSet& target, const json& j,
                                       const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": components must be an object");
  std::map<std::string, std::map<Id, Id>> comps;
  for (const auto& [sort, m] : j.items()) comps[sort] = detail::get<std::map<Id, Id>>(m, where + "." + sort);
  try {
    return CSetMorphism::from_names(source, target, comps);
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline json to_json(const TimeLattice& l) {
  json ivs = json::array();
  for (const auto& iv : l.intervals()) ivs.push_back(to_string(iv));
  return {{"lifetime", l.lifetime()}, {"intervals", ivs}};
}

/// Throws SublatticeError when the intervals are not closed under joins.
inline TimeLattice lattice_from_json(const json& j) {
  const std::string where = "lattice";
  const auto lifetime = detail::get<Time>(detail::field(j, "lifetime", where), where);
  std::vector<Interval> ivs;
  for (const auto& s : detail::get<std::vector<std::string>>(detail::field(j, "intervals", where), where))
    ivs.push_back(detail::interval_key(s));
  return TimeLattice(lifetime, std::move(ivs));
}

inline std::string map_key(const Interval& from, const Interval& to) {
  return to_string(from) + kArrow + to_string(to);
}

inline json to_json(const Narrative& n) {
  json j;
  j["format"] = kFormat;
  j["flavor"] = to_string(n.flavor());
  j["lattice"] = to_json(n.lattice());
  j["schema"] = to_json(n.schema_ptr());
  j["objects"] = json::object();
  for (const auto& iv : n.intervals()) j["objects"][to_string(iv)] = body_to_json(n.object(iv));
  j["maps"] = json::object();
  for (const auto& [inc, m] : n.generating_maps()) {
    const auto& [big, small] = inc;
    const std::string key = n.flavor() == Flavor::Persistent ? map_key(big, small) : map_key(small, big);
    j["maps"][key] = components_to_json(m);
  }
  return j;
}

inline Narrative narrative_from_json(const json& j) {
  const std::string where = "narrative";
  detail::check_format(j, where);
  Flavor flavor;
  try {
    flavor = parse_flavor(detail::get<std::string>(detail::field(j, "flavor", where), where));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  TimeLattice lattice = lattice_from_json(detail::field(j, "lattice", where));
  SchemaPtr schema = schema_from_json(detail::field(j, "schema", where));
  std::map<Interval, CSet> objects;
  const json& objs = detail::field(j, "objects", where);
  if (!objs.is_object()) throw ParseError("narrative: objects must be an object");
  for (const auto& [key, body] : objs.items())
    objects.emplace(detail::interval_key(key), body_from_json(schema, body, "object " + key));
  std::map<Narrative::Inclusion, CSetMorphism> maps;
  const json& ms = detail::field(j, "maps", where);
  if (!ms.is_object()) throw ParseError("narrative: maps must be an object");
  for (const auto& [key, comps] : ms.items()) {
    auto pos = key.find(kArrow);
    if (pos == std::string::npos) throw ParseError("narrative: map key '" + key + "' lacks " + kArrow);
    Interval from = detail::interval_key(key.substr(0, pos));
    Interval to = detail::interval_key(key.substr(pos + kArrow.size()));
    auto src = objects.find(from), tgt = objects.find(to);
    if (src == objects.end() || tgt == objects.end())
      throw ParseError("narrative: map " + key + " refers to a missing object");
    CSetMorphism m = morphism_from_json(src->second, tgt->second, comps, "map " + key);
    maps.emplace(flavor == Flavor::Persistent ? Narrative::Inclusion{from, to} : Narrative::Inclusion{to, from}, m);
  }
  try {
    return Narrative::make(flavor, lattice, objects, maps);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

inline json to_json(const NarrativeReport& r) {
  json issues = json::array();
  for (const auto& i : r.issues) {
    json e;
    e["kind"] = to_string(i.kind);
    e["interval"] = to_string(i.interval);
    if (i.other) e["other"] = to_string(*i.other);
    if (i.cover_point) e["cover_point"] = *i.cover_point;
    e["non_injective"] = i.defects.non_injective;
    e["non_surjective"] = i.defects.non_surjective;
    e["message"] = i.message;
    issues.push_back(e);
  }
  return {{"format", kFormat}, {"ok", r.ok()}, {"issues", issues}};
}

inline NarrativeReport narrative_report_from_json(const json& j) {
  detail::check_format(j, "report");
  NarrativeReport r;
  static const std::map<std::string, NarrativeIssue::Kind> kinds{
      {"invalid-object", NarrativeIssue::Kind::InvalidObject},
      {"invalid-map", NarrativeIssue::Kind::InvalidMap},
      {"non-functorial", NarrativeIssue::Kind::NonFunctorial},
      {"cover-failure", NarrativeIssue::Kind::CoverFailure}};
  for (const auto& e : detail::field(j, "issues", "report")) {
    NarrativeIssue i;
    auto k = kinds.find(detail::get<std::string>(detail::field(e, "kind", "issue"), "issue"));
    if (k == kinds.end()) throw ParseError("report: unknown issue kind");
    i.kind = k->second;
    i.interval = detail::interval_key(detail::get<std::string>(detail::field(e, "interval", "issue"), "issue"));
    if (e.contains("other")) i.other = detail::interval_key(e.at("other").get<std::string>());
    if (e.contains("cover_point")) i.cover_point = e.at("cover_point").get<Time>();
    i.defects.non_injective = detail::get<std::vector<std::string>>(detail::field(e, "non_injective", "issue"), "issue");
    i.defects.non_surjective = detail::get<std::vector<std::string>>(detail::field(e, "non_surjective", "issue"), "issue");
    i.message = detail::get<std::string>(detail::field(e, "message", "issue"), "issue");
    r.issues.push_back(std::move(i));
  }
  return r;
}

inline json to_json(const RoundTripReport& r) {
  json ivs = json::object();
  for (const auto& e : r.entries) ivs[to_string(e.interval)] = {{"iso", e.iso}, {"size_delta", e.size_delta}};
  json j{{"format", kFormat}, {"flavor", to_string(r.flavor)}, {"lossless", r.lossless}, {"intervals", ivs}};
  j["first_lossy"] = r.first_lossy ? json(to_string(*r.first_lossy)) : json(nullptr);
  return j;
}

inline RoundTripReport roundtrip_report_from_json(const json& j) {
  detail::check_format(j, "roundtrip report");
  RoundTripReport r;
  try {
    r.flavor = parse_flavor(detail::get<std::string>(detail::field(j, "flavor", "report"), "report"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  r.lossless = detail::get<bool>(detail::field(j, "lossless", "report"), "report");
  const json& fl = detail::field(j, "first_lossy", "report");
  if (!fl.is_null()) r.first_lossy = detail::interval_key(fl.get<std::string>());
  std::vector<RoundTripReport::Entry> entries;
  for (const auto& [key, e] : detail::field(j, "intervals", "report").items())
    entries.push_back({detail::interval_key(key),
                       detail::get<std::map<std::string, long>>(detail::field(e, "size_delta", key), key),
                       detail::get<bool>(detail::field(e, "iso", key), key)});
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.interval < b.interval; });
  r.entries = std::move(entries);
  return r;
}

/// Pretty-printed with sorted keys and a trailing newline.
inline std::string dump(const json& j) {
  try {
    return j.dump(2) + "\n";
  } catch (const json::exception& e) {
    throw ParseError(std::string("cannot serialize: ") + e.what());
  }
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// DOT

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

/// Undirected rendering of a graph-like C-set; every edge element becomes
/// its own line, so parallel edges stay distinct.
inline std::string to_dot(const CSet& g, const std::string& name) {
  if (!is_graph_like(g.schema())) throw SchemaMismatch("DOT export needs a graph schema, got " + g.schema().name());
  std::string out = "graph " + dot_quote(name) + " {\n";
  for (const auto& v : g.carrier("V")) out += "  " + dot_quote(v) + ";\n";
  const auto& src = g.action("s");
  const auto& tgt = g.action("t");
  for (std::size_t e = 0; e < g.size("E"); ++e) {
    if (src[e] >= g.size("V") || tgt[e] >= g.size("V")) continue;
    out += "  " + dot_quote(g.carrier("V")[src[e]]) + " -- " + dot_quote(g.carrier("V")[tgt[e]]) +
           " [label=" + dot_quote(g.carrier("E")[e]) + "];\n";
  }
  return out + "}\n";
}

/// One (file name, DOT text) pair per interval, named "a-b.dot".
inline std::vector<std::pair<std::string, std::string>> to_dot_files(const Narrative& n) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& iv : n.intervals())
    out.emplace_back(std::to_string(iv.lo) + "-" + std::to_string(iv.hi) + ".dot", to_dot(n.object(iv), to_string(iv)));
  return out;
}

}  // namespace chronica::io
