#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chronica/schema.hpp"

namespace chronica {

/// Opaque element identifier. Carriers keep IDs in ascending order.
using Id = std::string;

/// Marks an action value that is undefined (a dangling reference).
inline constexpr std::size_t kUndefined = std::numeric_limits<std::size_t>::max();

/// Carriers per sort plus one index vector per arrow.
using Carriers = std::vector<std::vector<Id>>;
using Actions = std::vector<std::vector<std::size_t>>;

/// A finite instance of a schema.
///
/// CSet is an immutable value with cheap copies: the carriers and actions
/// live behind a shared pointer. Elements are addressed by their position
/// in the (sorted) carrier; action values are positions in the target
/// carrier, or kUndefined. A CSet may violate its schema; validate()
/// reports how.
class CSet {
 public:
  CSet() : CSet(schemas::set()) {}

  explicit CSet(SchemaPtr schema)
      : data_(std::make_shared<Data>(Data{schema, Carriers(schema->sort_count()),
                                          Actions(schema->arrow_count())})) {}

  /// Carriers must be sorted and duplicate-free; actions must have one entry
  /// per source element.
  CSet(SchemaPtr schema, Carriers carriers, Actions actions)
      : data_(std::make_shared<Data>(Data{std::move(schema), std::move(carriers), std::move(actions)})) {
    const Schema& s = *data_->schema;
    if (data_->carriers.size() != s.sort_count() || data_->actions.size() != s.arrow_count())
      throw std::invalid_argument("CSet: carrier/action count does not match schema " + s.name());
    for (std::size_t k = 0; k < s.sort_count(); ++k) {
      const auto& c = data_->carriers[k];
      for (std::size_t i = 1; i < c.size(); ++i)
        if (!(c[i - 1] < c[i]))
          throw std::invalid_argument("CSet: carrier of sort " + s.sorts()[k] +
                                      " is not strictly sorted at '" + c[i] + "'");
    }
    for (std::size_t a = 0; a < s.arrow_count(); ++a)
      if (data_->actions[a].size() != data_->carriers[s.arrows()[a].source].size())
        throw std::invalid_argument("CSet: action " + s.arrows()[a].name +
                                    " does not cover its source carrier");
  }

  /// Builds an instance from named carriers and actions. Unknown sorts,
  /// arrows or source elements throw; a missing entry or an image outside
  /// the target carrier is stored as kUndefined and shows up in validate().
  static CSet from_names(SchemaPtr schema, const std::map<std::string, std::vector<Id>>& carriers,
                         const std::map<std::string, std::map<Id, Id>>& actions = {}) {
    const Schema& s = *schema;
    Carriers cs(s.sort_count());
    for (const auto& [sort, ids] : carriers) {
      auto& c = cs[s.sort_index(sort)];
      c = ids;
      std::sort(c.begin(), c.end());
      if (std::adjacent_find(c.begin(), c.end()) != c.end())
        throw std::invalid_argument("CSet: duplicate element in carrier of sort " + sort);
    }
    Actions as(s.arrow_count());
    for (std::size_t a = 0; a < s.arrow_count(); ++a)
      as[a].assign(cs[s.arrows()[a].source].size(), kUndefined);
    for (const auto& [arrow, values] : actions) {
      std::size_t a = s.arrow_index(arrow);
      const auto& src = cs[s.arrows()[a].source];
      const auto& tgt = cs[s.arrows()[a].target];
      for (const auto& [from, to] : values) {
        auto i = std::lower_bound(src.begin(), src.end(), from);
        if (i == src.end() || *i != from)
          throw std::invalid_argument("CSet: action " + arrow + " defined on unknown element '" +
                                      from + "'");
        auto j = std::lower_bound(tgt.begin(), tgt.end(), to);
        as[a][i - src.begin()] = (j != tgt.end() && *j == to) ? j - tgt.begin() : kUndefined;
      }
    }
    return CSet(std::move(schema), std::move(cs), std::move(as));
  }

  const Schema& schema() const { return *data_->schema; }
  const SchemaPtr& schema_ptr() const { return data_->schema; }

  const Carriers& carriers() const { return data_->carriers; }
  const Actions& actions() const { return data_->actions; }

  const std::vector<Id>& carrier(std::size_t sort) const { return data_->carriers[sort]; }
  const std::vector<Id>& carrier(std::string_view sort) const {
    return carrier(schema().sort_index(sort));
  }
  std::size_t size(std::size_t sort) const { return data_->carriers[sort].size(); }
  std::size_t size(std::string_view sort) const { return size(schema().sort_index(sort)); }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& c : data_->carriers) n += c.size();
    return n;
  }

  const std::vector<std::size_t>& action(std::size_t arrow) const { return data_->actions[arrow]; }
  const std::vector<std::size_t>& action(std::string_view arrow) const {
    return action(schema().arrow_index(arrow));
  }

  std::optional<std::size_t> index_of(std::size_t sort, std::string_view id) const {
    const auto& c = data_->carriers[sort];
    auto it = std::lower_bound(c.begin(), c.end(), id);
    if (it == c.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - c.begin());
  }

  /// Named lookup of an action value; nullopt when undefined.
  std::optional<Id> apply(std::string_view arrow, std::string_view id) const {
    std::size_t a = schema().arrow_index(arrow);
    auto i = index_of(schema().arrows()[a].source, id);
    if (!i) return std::nullopt;
    std::size_t j = data_->actions[a][*i];
    const auto& tgt = data_->carriers[schema().arrows()[a].target];
    if (j >= tgt.size()) return std::nullopt;
    return tgt[j];
  }

  /// Follows a path from element `x` of the path's start sort.
  std::size_t follow(const ArrowPath& path, std::size_t x) const {
    for (std::size_t a : path.arrows) {
      if (x >= data_->actions[a].size()) return kUndefined;
      x = data_->actions[a][x];
    }
    return x;
  }

  bool same_data(const CSet& other) const { return data_ == other.data_; }

  friend bool operator==(const CSet& a, const CSet& b) {
    if (a.data_ == b.data_) return true;
    return same_schema(a.data_->schema, b.data_->schema) &&
           a.data_->carriers == b.data_->carriers && a.data_->actions == b.data_->actions;
  }

 private:
  struct Data {
    SchemaPtr schema;
    Carriers carriers;
    Actions actions;
  };
  std::shared_ptr<const Data> data_;
};

/// Per-sort component functions, as indices into the target carriers.
using Components = std::vector<std::vector<std::size_t>>;

/// A structure-preserving map between two instances of one schema.
class CSetMorphism {
 public:
  CSetMorphism() = default;

  CSetMorphism(CSet source, CSet target, Components components)
      : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
    if (!same_schema(source_.schema_ptr(), target_.schema_ptr()))
      throw std::invalid_argument("CSetMorphism: source and target schemas differ");
    if (components_.size() != source_.schema().sort_count())
      throw std::invalid_argument("CSetMorphism: wrong number of components");
    for (std::size_t k = 0; k < components_.size(); ++k)
      if (components_[k].size() != source_.size(k))
        throw std::invalid_argument("CSetMorphism: component " + source_.schema().sorts()[k] +
                                    " does not cover its source carrier");
  }

  /// Builds a morphism from named components; missing entries become
  /// kUndefined and are reported by validate().
  static CSetMorphism from_names(const CSet& source, const CSet& target,
                                 const std::map<std::string, std::map<Id, Id>>& components) {
    const Schema& s = source.schema();
    Components cs(s.sort_count());
    for (std::size_t k = 0; k < s.sort_count(); ++k) cs[k].assign(source.size(k), kUndefined);
    for (const auto& [sort, values] : components) {
      std::size_t k = s.sort_index(sort);
      for (const auto& [from, to] : values) {
        auto i = source.index_of(k, from);
        if (!i)
          throw std::invalid_argument("CSetMorphism: component " + sort + " defined on unknown '" +
                                      from + "'");
        auto j = target.index_of(k, to);
        cs[k][*i] = j ? *j : kUndefined;
      }
    }
    return CSetMorphism(source, target, std::move(cs));
  }

  static CSetMorphism identity(const CSet& x) {
    Components cs(x.schema().sort_count());
    for (std::size_t k = 0; k < cs.size(); ++k) {
      cs[k].resize(x.size(k));
      for (std::size_t i = 0; i < cs[k].size(); ++i) cs[k][i] = i;
    }
    return CSetMorphism(x, x, std::move(cs));
  }

  /// Maps every element of `sub` to the element with the same ID in `super`.
  static CSetMorphism inclusion(const CSet& sub, const CSet& super) {
    Components cs(sub.schema().sort_count());
    for (std::size_t k = 0; k < cs.size(); ++k) {
      for (const auto& id : sub.carrier(k)) {
        auto j = super.index_of(k, id);
        if (!j)
          throw std::invalid_argument("inclusion: element '" + id + "' of sort " +
                                      sub.schema().sorts()[k] + " missing from the target");
        cs[k].push_back(*j);
      }
    }
    return CSetMorphism(sub, super, std::move(cs));
  }

  const CSet& source() const { return source_; }
  const CSet& target() const { return target_; }
  const Components& components() const { return components_; }
  const std::vector<std::size_t>& component(std::size_t sort) const { return components_[sort]; }
  const std::vector<std::size_t>& component(std::string_view sort) const {
    return components_[source_.schema().sort_index(sort)];
  }

  std::optional<Id> apply(std::string_view sort, std::string_view id) const {
    std::size_t k = source_.schema().sort_index(sort);
    auto i = source_.index_of(k, id);
    if (!i) return std::nullopt;
    std::size_t j = components_[k][*i];
    if (j >= target_.size(k)) return std::nullopt;
    return target_.carrier(k)[j];
  }

  friend bool operator==(const CSetMorphism&, const CSetMorphism&) = default;

 private:
  CSet source_;
  CSet target_;
  Components components_;
};

/// `second` after `first`.
inline CSetMorphism compose(const CSetMorphism& second, const CSetMorphism& first) {
  if (!(first.target() == second.source()))
    throw std::invalid_argument("compose: morphisms are not composable");
  Components cs(first.components().size());
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const auto& f = first.component(k);
    const auto& g = second.component(k);
    cs[k].resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) cs[k][i] = f[i] < g.size() ? g[f[i]] : kUndefined;
  }
  return CSetMorphism(first.source(), second.target(), std::move(cs));
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind { Totality, Range, Equation, Naturality };

struct Violation {
  ViolationKind kind;
  std::string where;    // arrow, sort or equation
  std::string element;  // offending element ID
  std::string message;
};

inline std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Totality: return "totality";
    case ViolationKind::Range: return "range";
    case ViolationKind::Equation: return "equation";
    case ViolationKind::Naturality: return "naturality";
  }
  return "?";
}

inline std::string describe(const Schema& s, const ArrowPath& p) {
  if (p.arrows.empty()) return "id_" + s.sorts()[p.start];
  std::string out;
  for (auto it = p.arrows.rbegin(); it != p.arrows.rend(); ++it) {
    if (!out.empty()) out += ".";
    out += s.arrows()[*it].name;
  }
  return out;
}

/// Reports every undefined action value, out-of-range value and failing
/// equation instance. Equations are only evaluated on elements whose paths
/// are fully defined.
inline std::vector<Violation> validate(const CSet& c) {
  std::vector<Violation> out;
  const Schema& s = c.schema();
  bool defined = true;
  for (std::size_t a = 0; a < s.arrow_count(); ++a) {
    const auto& arrow = s.arrows()[a];
    const auto& act = c.action(a);
    for (std::size_t x = 0; x < act.size(); ++x) {
      const Id& id = c.carrier(arrow.source)[x];
      if (act[x] == kUndefined) {
        defined = false;
        out.push_back({ViolationKind::Totality, arrow.name, id,
                       "action " + arrow.name + " is undefined on '" + id + "'"});
      } else if (act[x] >= c.size(arrow.target)) {
        defined = false;
        out.push_back({ViolationKind::Range, arrow.name, id,
                       "action " + arrow.name + " sends '" + id + "' outside sort " +
                           s.sorts()[arrow.target]});
      }
    }
  }
  if (!defined) return out;
  for (const auto& eq : s.equations()) {
    for (std::size_t x = 0; x < c.size(eq.lhs.start); ++x) {
      if (c.follow(eq.lhs, x) != c.follow(eq.rhs, x)) {
        std::string name = describe(s, eq.lhs) + " = " + describe(s, eq.rhs);
        const Id& id = c.carrier(eq.lhs.start)[x];
        out.push_back({ViolationKind::Equation, name, id,
                       "equation " + name + " fails on '" + id + "'"});
      }
    }
  }
  return out;
}

inline bool is_valid(const CSet& c) { return validate(c).empty(); }

/// Totality, range and naturality of a morphism (the endpoints are assumed
/// to be valid instances).
inline std::vector<Violation> validate(const CSetMorphism& m) {
  std::vector<Violation> out;
  const Schema& s = m.source().schema();
  bool defined = true;
  for (std::size_t k = 0; k < s.sort_count(); ++k) {
    for (std::size_t x = 0; x < m.component(k).size(); ++x) {
      std::size_t y = m.component(k)[x];
      if (y == kUndefined || y >= m.target().size(k)) {
        defined = false;
        out.push_back({y == kUndefined ? ViolationKind::Totality : ViolationKind::Range,
                       s.sorts()[k], m.source().carrier(k)[x],
                       "component " + s.sorts()[k] + " is undefined on '" +
                           m.source().carrier(k)[x] + "'"});
      }
    }
  }
  if (!defined) return out;
  for (std::size_t a = 0; a < s.arrow_count(); ++a) {
    const auto& arrow = s.arrows()[a];
    const auto& src_act = m.source().action(a);
    const auto& tgt_act = m.target().action(a);
    for (std::size_t x = 0; x < src_act.size(); ++x) {
      std::size_t fx = src_act[x];
      std::size_t hx = m.component(arrow.source)[x];
      if (fx >= m.component(arrow.target).size() || hx >= tgt_act.size()) continue;
      if (m.component(arrow.target)[fx] != tgt_act[hx]) {
        const Id& id = m.source().carrier(arrow.source)[x];
        out.push_back({ViolationKind::Naturality, arrow.name, id,
                       "square for " + arrow.name + " does not commute at '" + id + "'"});
      }
    }
  }
  return out;
}

inline bool is_valid(const CSetMorphism& m) { return validate(m).empty(); }

// ---------------------------------------------------------------------------
// Mono / epi / iso: componentwise injective / surjective / bijective.

inline bool component_injective(const CSetMorphism& m, std::size_t sort) {
  std::vector<char> seen(m.target().size(sort), 0);
  for (std::size_t y : m.component(sort)) {
    if (y >= seen.size() || seen[y]) return false;
    seen[y] = 1;
  }
  return true;
}

inline bool component_surjective(const CSetMorphism& m, std::size_t sort) {
  std::vector<char> seen(m.target().size(sort), 0);
  std::size_t hit = 0;
  for (std::size_t y : m.component(sort))
    if (y < seen.size() && !seen[y]) {
      seen[y] = 1;
      ++hit;
    }
  return hit == seen.size();
}

inline bool is_mono(const CSetMorphism& m) {
  for (std::size_t k = 0; k < m.components().size(); ++k)
    if (!component_injective(m, k)) return false;
  return true;
}

inline bool is_epi(const CSetMorphism& m) {
  for (std::size_t k = 0; k < m.components().size(); ++k)
    if (!component_surjective(m, k)) return false;
  return true;
}

inline bool is_iso(const CSetMorphism& m) { return is_mono(m) && is_epi(m); }

/// Inverse of an isomorphism, or nullopt if `m` is not one.
inline std::optional<CSetMorphism> inverse(const CSetMorphism& m) {
  if (!is_iso(m)) return std::nullopt;
  Components cs(m.components().size());
  for (std::size_t k = 0; k < cs.size(); ++k) {
    cs[k].resize(m.target().size(k));
    for (std::size_t i = 0; i < m.component(k).size(); ++i) cs[k][m.component(k)[i]] = i;
  }
  return CSetMorphism(m.target(), m.source(), std::move(cs));
}

/// Sorts on which the component fails to be injective / surjective.
struct IsoDefects {
  std::vector<std::string> non_injective;
  std::vector<std::string> non_surjective;
  bool empty() const { return non_injective.empty() && non_surjective.empty(); }
};

inline IsoDefects iso_defects(const CSetMorphism& m) {
  IsoDefects d;
  const Schema& s = m.source().schema();
  for (std::size_t k = 0; k < s.sort_count(); ++k) {
    if (!component_injective(m, k)) d.non_injective.push_back(s.sorts()[k]);
    if (!component_surjective(m, k)) d.non_surjective.push_back(s.sorts()[k]);
  }
  return d;
}

/// Short human-readable rendering, e.g. `E{a~b} V{a,b}`.
inline std::string summary(const CSet& c) {
  std::ostringstream os;
  const Schema& s = c.schema();
  for (std::size_t k = 0; k < s.sort_count(); ++k) {
    if (k) os << ' ';
    os << s.sorts()[k] << '{';
    for (std::size_t i = 0; i < c.size(k); ++i) os << (i ? "," : "") << c.carrier(k)[i];
    os << '}';
  }
  return os.str();
}

}  // namespace chronica
