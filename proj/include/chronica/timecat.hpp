#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chronica {

using Time = std::uint32_t;

/// Closed discrete interval [lo, hi]. Its length is hi - lo + 1, so an
/// instant [t,t] has length 1.
struct Interval {
  Time lo = 0;
  Time hi = 0;

  Interval() = default;
  Interval(Time l, Time h) : lo(l), hi(h) {
    if (lo > hi) throw std::invalid_argument("interval with lo > hi");
  }

  static Interval instant(Time t) { return {t, t}; }

  Time length() const { return hi - lo + 1; }
  bool is_instant() const { return lo == hi; }
  bool contains(Time t) const { return lo <= t && t <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

  friend auto operator<=>(const Interval&, const Interval&) = default;
};

inline std::string to_string(const Interval& iv) {
  return "[" + std::to_string(iv.lo) + "," + std::to_string(iv.hi) + "]";
}

/// Parses "[a,b]" (spaces tolerated).
inline Interval parse_interval(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  auto comma = s.find(',');
  if (s.size() < 5 || s.front() != '[' || s.back() != ']' || comma == std::string::npos)
    throw std::invalid_argument("malformed interval '" + text + "'");
  try {
    std::size_t used = 0;
    std::string a = s.substr(1, comma - 1), b = s.substr(comma + 1, s.size() - comma - 2);
    long lo = std::stol(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    long hi = std::stol(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    if (lo < 0 || hi < 0) throw std::invalid_argument("negative");
    return Interval(static_cast<Time>(lo), static_cast<Time>(hi));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed interval '" + text + "'");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("malformed interval '" + text + "'");
  }
}

/// Two closed discrete intervals have an interval as their union when they
/// overlap or touch.
inline std::optional<Interval> interval_union(const Interval& a, const Interval& b) {
  if (std::max(a.lo, b.lo) > std::min(a.hi, b.hi) + 1) return std::nullopt;
  return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

/// The Johnstone covers of [a,b]: ([a,p],[p,b]) for a <= p <= b. An instant
/// has the single trivial cover.
inline std::vector<std::pair<Interval, Interval>> covers(const Interval& iv) {
  std::vector<std::pair<Interval, Interval>> out;
  for (Time p = iv.lo;; ++p) {
    out.emplace_back(Interval(iv.lo, p), Interval(p, iv.hi));
    if (p == iv.hi) break;
  }
  return out;
}

class SublatticeError : public std::invalid_argument {
 public:
  SublatticeError(const std::string& what, std::optional<Interval> missing_join = std::nullopt)
      : std::invalid_argument(what), missing_join_(missing_join) {}
  const std::optional<Interval>& missing_join() const { return missing_join_; }

 private:
  std::optional<Interval> missing_join_;
};

/// A finite set of closed intervals inside [0, lifetime], closed under the
/// union of any two members that overlap or touch.
class TimeLattice {
 public:
  TimeLattice() = default;

  /// Throws SublatticeError naming the first missing join.
  TimeLattice(Time lifetime, std::vector<Interval> intervals) : lifetime_(lifetime) {
    std::sort(intervals.begin(), intervals.end());
    intervals.erase(std::unique(intervals.begin(), intervals.end()), intervals.end());
    for (const auto& iv : intervals)
      if (iv.hi > lifetime)
        throw SublatticeError(to_string(iv) + " lies outside the lifetime [0," +
                              std::to_string(lifetime) + "]");
    intervals_ = std::move(intervals);
    if (auto j = missing_join()) throw SublatticeError("not closed under joins: missing " + to_string(*j), j);
  }

  /// Every [a,b] with 0 <= a <= b <= lifetime.
  static TimeLattice full(Time lifetime) { return span(lifetime, 0, lifetime); }

  /// Every subinterval of [lo,hi], within an ambient lifetime.
  static TimeLattice span(Time lifetime, Time lo, Time hi) {
    std::vector<Interval> ivs;
    for (Time a = lo; a <= hi; ++a)
      for (Time b = a; b <= hi; ++b) ivs.emplace_back(a, b);
    return TimeLattice(lifetime, std::move(ivs));
  }

  Time lifetime() const { return lifetime_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }

  bool contains(const Interval& iv) const {
    return std::binary_search(intervals_.begin(), intervals_.end(), iv);
  }

  std::optional<std::size_t> index_of(const Interval& iv) const {
    auto it = std::lower_bound(intervals_.begin(), intervals_.end(), iv);
    if (it == intervals_.end() || *it != iv) return std::nullopt;
    return static_cast<std::size_t>(it - intervals_.begin());
  }

  std::size_t index(const Interval& iv) const {
    if (auto i = index_of(iv)) return *i;
    throw std::out_of_range(to_string(iv) + " is not in the time lattice");
  }

  bool is_sublattice_of(const TimeLattice& other) const {
    return std::all_of(intervals_.begin(), intervals_.end(),
                       [&](const Interval& iv) { return other.contains(iv); });
  }

  /// Covers of `iv` whose pieces (and their overlap) all belong here.
  std::vector<std::pair<Interval, Interval>> covers(const Interval& iv) const {
    std::vector<std::pair<Interval, Interval>> out;
    for (auto& c : chronica::covers(iv))
      if (contains(c.first) && contains(c.second) && contains(Interval::instant(c.second.lo)))
        out.push_back(c);
    return out;
  }

  /// Members contained in `iv` (including `iv` itself when present).
  std::vector<Interval> subintervals(const Interval& iv) const {
    std::vector<Interval> out;
    for (const auto& j : intervals_)
      if (iv.contains(j)) out.push_back(j);
    return out;
  }

  /// Immediate inclusions (big, small): small is a proper subinterval of big
  /// with no member strictly between them.
  std::vector<std::pair<Interval, Interval>> hasse_edges() const {
    std::vector<std::pair<Interval, Interval>> out;
    for (const auto& big : intervals_)
      for (const auto& small : intervals_) {
        if (big == small || !big.contains(small)) continue;
        bool between = std::any_of(intervals_.begin(), intervals_.end(), [&](const Interval& m) {
          return m != big && m != small && big.contains(m) && m.contains(small);
        });
        if (!between) out.emplace_back(big, small);
      }
    return out;
  }

  std::optional<Interval> missing_join() const {
    for (std::size_t i = 0; i < intervals_.size(); ++i)
      for (std::size_t j = i + 1; j < intervals_.size(); ++j)
        if (auto u = interval_union(intervals_[i], intervals_[j]); u && !contains(*u)) return u;
    return std::nullopt;
  }

  friend bool operator==(const TimeLattice&, const TimeLattice&) = default;

 private:
  Time lifetime_ = 0;
  std::vector<Interval> intervals_;
};

inline TimeLattice full_lattice(Time lifetime) { return TimeLattice::full(lifetime); }

/// Ways to carve a sub-join-semilattice out of a lattice.
struct LatticeFilter {
  enum class Kind { MinLength, Subsample, Explicit };
  Kind kind = Kind::MinLength;
  Time value = 1;                  // minimum length or subsampling step
  std::vector<Interval> explicit_set;

  static LatticeFilter min_length(Time n) { return {Kind::MinLength, n, {}}; }
  static LatticeFilter subsample(Time step) { return {Kind::Subsample, step, {}}; }
  static LatticeFilter keep(std::vector<Interval> ivs) { return {Kind::Explicit, 0, std::move(ivs)}; }
};

/// Applies a filter. Min-length keeps intervals with hi - lo + 1 >= n;
/// subsampling keeps intervals whose endpoints are multiples of the step.
/// Explicit sets must be members of `base` and closed under joins.
inline TimeLattice sublattice(const TimeLattice& base, const LatticeFilter& filter) {
  std::vector<Interval> kept;
  switch (filter.kind) {
    case LatticeFilter::Kind::MinLength:
      for (const auto& iv : base.intervals())
        if (iv.length() >= filter.value) kept.push_back(iv);
      break;
    case LatticeFilter::Kind::Subsample:
      if (filter.value == 0) throw SublatticeError("subsampling step must be positive");
      for (const auto& iv : base.intervals())
        if (iv.lo % filter.value == 0 && iv.hi % filter.value == 0) kept.push_back(iv);
      break;
    case LatticeFilter::Kind::Explicit:
      for (const auto& iv : filter.explicit_set) {
        if (!base.contains(iv))
          throw SublatticeError(to_string(iv) + " is not an interval of the base lattice");
        kept.push_back(iv);
      }
      break;
  }
  return TimeLattice(base.lifetime(), std::move(kept));
}

}  // namespace chronica
