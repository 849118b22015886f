#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lace {

/// A frozen, ordered set of elements with O(log n) index lookup.
///
/// Equivalence relations over the same universe share one instance; merges
/// never introduce new elements.
template <typename T>
class Universe {
 public:
  Universe() = default;

  explicit Universe(std::vector<T> items) : items_(std::move(items)) {
    for (std::uint32_t i = 0; i < items_.size(); ++i) {
      auto [it, fresh] = index_.emplace(items_[i], i);
      if (!fresh) throw std::invalid_argument("universe: duplicate element");
    }
  }

  std::size_t size() const { return items_.size(); }
  const T& operator[](std::uint32_t i) const { return items_[i]; }
  const std::vector<T>& items() const { return items_; }

  std::optional<std::uint32_t> position_of(const T& item) const {
    auto it = index_.find(item);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const Universe& other) const { return items_ == other.items_; }

 private:
  std::vector<T> items_;
  std::map<T, std::uint32_t> index_;
};

template <typename T>
using UniversePtr = std::shared_ptr<const Universe<T>>;

/// Equivalence relation over a finite universe, stored as a canonical
/// representative per element (the smallest index of its class).
///
/// Two relations over equal universes compare equal iff they denote the same
/// partition, regardless of the pairs they were closed from.
template <typename T>
class EquivRel {
 public:
  using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

  EquivRel() : universe_(std::make_shared<Universe<T>>()) {}

  /// Identity relation: every element in its own class.
  explicit EquivRel(UniversePtr<T> universe) : universe_(std::move(universe)) {
    rep_.resize(universe_->size());
    std::iota(rep_.begin(), rep_.end(), 0u);
  }

  /// Smallest equivalence relation on `universe` containing `pairs`.
  /// Throws std::domain_error when a pair member lies outside the universe.
  static EquivRel close(UniversePtr<T> universe, std::span<const std::pair<T, T>> pairs) {
    std::vector<IndexPair> idx;
    idx.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
      auto ia = universe->position_of(a);
      auto ib = universe->position_of(b);
      if (!ia || !ib) throw std::domain_error("eqrel_close: pair member outside universe");
      idx.emplace_back(*ia, *ib);
    }
    return close_indices(std::move(universe), idx);
  }

  static EquivRel close_indices(UniversePtr<T> universe, std::span<const IndexPair> pairs) {
    EquivRel rel(std::move(universe));
    rel.merge_all(pairs);
    return rel;
  }

  /// Closure of this relation extended by `pairs`.
  EquivRel with(std::span<const IndexPair> pairs) const {
    EquivRel out = *this;
    out.merge_all(pairs);
    return out;
  }

  EquivRel with(std::uint32_t a, std::uint32_t b) const {
    IndexPair p{a, b};
    return with(std::span<const IndexPair>(&p, 1));
  }

  const UniversePtr<T>& universe() const { return universe_; }
  std::size_t size() const { return rep_.size(); }

  std::uint32_t representative(std::uint32_t i) const { return rep_[i]; }
  bool related(std::uint32_t a, std::uint32_t b) const { return rep_[a] == rep_[b]; }

  bool related(const T& a, const T& b) const {
    auto ia = universe_->position_of(a);
    auto ib = universe_->position_of(b);
    if (!ia || !ib) return false;
    return related(*ia, *ib);
  }

  bool is_identity() const {
    for (std::uint32_t i = 0; i < rep_.size(); ++i)
      if (rep_[i] != i) return false;
    return true;
  }

  /// Classes in order of their smallest member; members ascending.
  std::vector<std::vector<std::uint32_t>> classes() const {
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::int64_t> slot(rep_.size(), -1);
    for (std::uint32_t i = 0; i < rep_.size(); ++i) {
      std::uint32_t r = rep_[i];
      if (slot[r] < 0) {
        slot[r] = static_cast<std::int64_t>(out.size());
        out.emplace_back();
      }
      out[static_cast<std::size_t>(slot[r])].push_back(i);
    }
    return out;
  }

  /// Canonical spanning pairs: (smallest member, other member) for each
  /// non-singleton class. Closing these reproduces the relation.
  std::vector<IndexPair> generators() const {
    std::vector<IndexPair> out;
    for (std::uint32_t i = 0; i < rep_.size(); ++i)
      if (rep_[i] != i) out.emplace_back(rep_[i], i);
    return out;
  }

  /// Number of ordered pairs, reflexive ones included: sum of squared class sizes.
  std::uint64_t pair_count() const {
    std::vector<std::uint64_t> sizes(rep_.size(), 0);
    for (auto r : rep_) ++sizes[r];
    std::uint64_t total = 0;
    for (auto s : sizes) total += s * s;
    return total;
  }

  /// Pair-set inclusion over the same universe.
  bool subset_of(const EquivRel& other) const {
    if (rep_.size() != other.rep_.size()) return false;
    for (std::uint32_t i = 0; i < rep_.size(); ++i)
      if (!other.related(i, rep_[i])) return false;
    return true;
  }

  bool operator==(const EquivRel& other) const { return rep_ == other.rep_; }
  auto operator<=>(const EquivRel& other) const { return rep_ <=> other.rep_; }

  const std::vector<std::uint32_t>& representatives() const { return rep_; }

  std::size_t hash() const {
    std::size_t h = rep_.size();
    for (auto r : rep_) h = h * 1000003u ^ r;
    return h;
  }

 private:
  void merge_all(std::span<const IndexPair> pairs) {
    if (pairs.empty()) return;
    // Union-find seeded by the current canonical representatives.
    std::vector<std::uint32_t> parent = rep_;
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    for (const auto& [a, b] : pairs) {
      if (a >= parent.size() || b >= parent.size())
        throw std::domain_error("eqrel_close: index outside universe");
      auto ra = find(a);
      auto rb = find(b);
      if (ra == rb) continue;
      if (ra < rb) parent[rb] = ra; else parent[ra] = rb;
    }
    for (std::uint32_t i = 0; i < parent.size(); ++i) rep_[i] = find(i);
  }

  UniversePtr<T> universe_;
  std::vector<std::uint32_t> rep_;
};

/// Free-function form of EquivRel::close.
template <typename T>
EquivRel<T> eqrel_close(std::span<const std::pair<T, T>> pairs, UniversePtr<T> universe) {
  return EquivRel<T>::close(std::move(universe), pairs);
}

template <typename T>
std::uint64_t pair_count(const EquivRel<T>& rel) {
  return rel.pair_count();
}

}  // namespace lace
