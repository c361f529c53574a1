#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chronica/cset.hpp"

namespace chronica {

struct HomSearchOptions {
  bool monic = false;
  /// Require matching preimage counts (iso search); implies monic.
  bool exact_profiles = false;
  /// Stop after this many results (0 = unbounded).
  std::size_t limit = 0;
};

namespace detail {

/// Backtracking search for natural transformations between two C-sets.
///
/// Variables are (sort, element) pairs of the source. Assigning x forces
/// the image of f(x) for every arrow f out of its sort, so only the
/// variables that nothing else determines are branched on. Branch values
/// are tried in carrier order, which makes the output order deterministic.
class HomSearch {
 public:
  HomSearch(const CSet& src, const CSet& tgt, HomSearchOptions opts)
      : src_(src), tgt_(tgt), schema_(src.schema()), opts_(opts) {
    if (opts_.exact_profiles) opts_.monic = true;
    const std::size_t nsorts = schema_.sort_count();
    assign_.resize(nsorts);
    used_.resize(nsorts);
    for (std::size_t k = 0; k < nsorts; ++k) {
      assign_[k].assign(src_.size(k), kUndefined);
      used_[k].assign(tgt_.size(k), 0);
    }
    out_arrows_.resize(nsorts);
    for (std::size_t a = 0; a < schema_.arrow_count(); ++a)
      out_arrows_[schema_.arrows()[a].source].push_back(a);
    for (std::size_t k : schema_.propagation_order())
      for (std::size_t x = 0; x < src_.size(k); ++x) order_.push_back({k, x});
    if (opts_.monic) build_profiles();
  }

  void run(const std::function<bool(const Components&)>& emit) {
    emit_ = &emit;
    stopped_ = false;
    for (std::size_t k = 0; k < schema_.sort_count(); ++k) {
      if (opts_.monic && src_.size(k) > tgt_.size(k)) return;
      if (opts_.exact_profiles && src_.size(k) != tgt_.size(k)) return;
      if (src_.size(k) > 0 && tgt_.size(k) == 0) return;
    }
    descend(0);
  }

 private:
  struct Var {
    std::size_t sort, elem;
  };

  void build_profiles() {
    // Preimage counts under each arrow; a monomorphism cannot send x to an
    // element with fewer preimages along the same arrow.
    const std::size_t nsorts = schema_.sort_count();
    src_profile_.resize(nsorts);
    tgt_profile_.resize(nsorts);
    for (std::size_t k = 0; k < nsorts; ++k) {
      src_profile_[k].assign(src_.size(k), std::vector<std::size_t>());
      tgt_profile_[k].assign(tgt_.size(k), std::vector<std::size_t>());
    }
    for (std::size_t a = 0; a < schema_.arrow_count(); ++a) {
      std::size_t t = schema_.arrows()[a].target;
      for (auto& p : src_profile_[t]) p.push_back(0);
      for (auto& p : tgt_profile_[t]) p.push_back(0);
      for (std::size_t y : src_.action(a))
        if (y < src_profile_[t].size()) ++src_profile_[t][y].back();
      for (std::size_t y : tgt_.action(a))
        if (y < tgt_profile_[t].size()) ++tgt_profile_[t][y].back();
    }
  }

  bool profile_allows(std::size_t k, std::size_t x, std::size_t v) const {
    if (!opts_.monic) return true;
    const auto& p = src_profile_[k][x];
    const auto& q = tgt_profile_[k][v];
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > q[i]) return false;
      if (opts_.exact_profiles && p[i] != q[i]) return false;
    }
    return true;
  }

  bool assign(std::size_t k, std::size_t x, std::size_t v) {
    if (x >= assign_[k].size() || v >= tgt_.size(k)) return false;
    if (assign_[k][x] != kUndefined) return assign_[k][x] == v;
    if (opts_.monic && used_[k][v]) return false;
    if (!profile_allows(k, x, v)) return false;
    assign_[k][x] = v;
    if (opts_.monic) used_[k][v] = 1;
    trail_.push_back({k, x});
    for (std::size_t a : out_arrows_[k]) {
      std::size_t t = schema_.arrows()[a].target;
      if (!assign(t, src_.action(a)[x], tgt_.action(a)[v])) return false;
    }
    return true;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      Var v = trail_.back();
      trail_.pop_back();
      if (opts_.monic) used_[v.sort][assign_[v.sort][v.elem]] = 0;
      assign_[v.sort][v.elem] = kUndefined;
    }
  }

  void descend(std::size_t pos) {
    while (pos < order_.size() && assign_[order_[pos].sort][order_[pos].elem] != kUndefined) ++pos;
    if (pos == order_.size()) {
      ++found_;
      if (!(*emit_)(assign_) || (opts_.limit && found_ >= opts_.limit)) stopped_ = true;
      return;
    }
    const Var var = order_[pos];
    for (std::size_t v = 0; v < tgt_.size(var.sort) && !stopped_; ++v) {
      std::size_t mark = trail_.size();
      if (assign(var.sort, var.elem, v)) descend(pos + 1);
      undo_to(mark);
    }
  }

  const CSet& src_;
  const CSet& tgt_;
  const Schema& schema_;
  HomSearchOptions opts_;
  Components assign_;
  std::vector<std::vector<char>> used_;
  std::vector<std::vector<std::size_t>> out_arrows_;
  std::vector<Var> order_;
  std::vector<Var> trail_;
  std::vector<std::vector<std::vector<std::size_t>>> src_profile_, tgt_profile_;
  const std::function<bool(const Components&)>* emit_ = nullptr;
  std::size_t found_ = 0;
  bool stopped_ = false;
};

inline void require_searchable(const CSet& source, const CSet& target) {
  if (!same_schema(source.schema_ptr(), target.schema_ptr()))
    throw std::invalid_argument("homomorphism search: schemas differ");
  if (!is_valid(source) || !is_valid(target))
    throw std::invalid_argument("homomorphism search: invalid instance");
}

}  // namespace detail

/// Calls `visit` for every homomorphism source -> target until it returns
/// false.
inline void for_each_homomorphism(const CSet& source, const CSet& target, HomSearchOptions opts,
                                  const std::function<bool(const CSetMorphism&)>& visit) {
  detail::require_searchable(source, target);
  detail::HomSearch search(source, target, opts);
  std::function<bool(const Components&)> emit = [&](const Components& c) {
    return visit(CSetMorphism(source, target, c));
  };
  search.run(emit);
}

/// All homomorphisms (or monomorphisms), in deterministic order.
inline std::vector<CSetMorphism> find_homomorphisms(const CSet& source, const CSet& target,
                                                    bool monic_only = false) {
  std::vector<CSetMorphism> out;
  for_each_homomorphism(source, target, {.monic = monic_only}, [&](const CSetMorphism& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

inline std::size_t count_homomorphisms(const CSet& source, const CSet& target,
                                       bool monic_only = false) {
  detail::require_searchable(source, target);
  detail::HomSearch search(source, target, {.monic = monic_only});
  std::size_t n = 0;
  std::function<bool(const Components&)> emit = [&](const Components&) {
    ++n;
    return true;
  };
  search.run(emit);
  return n;
}

/// An isomorphism a -> b if one exists.
inline std::optional<CSetMorphism> find_isomorphism(const CSet& a, const CSet& b) {
  detail::require_searchable(a, b);
  for (std::size_t k = 0; k < a.schema().sort_count(); ++k)
    if (a.size(k) != b.size(k)) return std::nullopt;
  std::optional<CSetMorphism> found;
  for_each_homomorphism(a, b, {.exact_profiles = true, .limit = 1}, [&](const CSetMorphism& m) {
    found = m;
    return false;
  });
  return found;
}

inline bool is_isomorphic(const CSet& a, const CSet& b) { return find_isomorphism(a, b).has_value(); }

}  // namespace chronica
