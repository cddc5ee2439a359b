#pragma once

// Features, state vectors, observation sets and partial state vectors.
//
// Features and their states are dense integer indices. A partial state vector
// stores one entry per feature; unobserved features hold kMissing. Every
// partial vector also has a dense global index in [0, psi_total) obtained by
// mixed-radix encoding with digit (state + 1), so that 0 encodes a missing
// entry. The last feature is the least significant digit, which makes the
// index order agree with the canonical lexicographic order inside each
// Psi+(I).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "ncc/errors.hpp"

namespace ncc {

using StateIndex = std::int16_t;
inline constexpr StateIndex kMissing = -1;

inline constexpr std::size_t kMaxEnumerableFeatures = 20;
inline constexpr std::size_t kDefaultPartialCeiling = 1'000'000;

/// Set of feature indices, stored as a bitmask (feature i <-> bit i).
class ObservationSet {
 public:
  constexpr ObservationSet() = default;
  static constexpr ObservationSet from_mask(std::uint32_t mask) {
    ObservationSet s;
    s.mask_ = mask;
    return s;
  }
  static ObservationSet of(std::initializer_list<std::size_t> features);
  static ObservationSet full(std::size_t feature_count);

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(std::size_t feature) const {
    return feature < 32 && ((mask_ >> feature) & 1u) != 0;
  }
  std::size_t size() const;
  std::vector<std::size_t> members() const;
  void insert(std::size_t feature);
  constexpr bool is_subset_of(ObservationSet other) const {
    return (mask_ & ~other.mask_) == 0;
  }

  friend constexpr bool operator==(ObservationSet, ObservationSet) = default;

  std::string to_string() const;

 private:
  std::uint32_t mask_ = 0;
};

/// Canonical order: by size, then lexicographic on the sorted member list.
bool canonical_less(ObservationSet lhs, ObservationSet rhs);

struct StateVector {
  std::vector<StateIndex> states;

  std::size_t size() const { return states.size(); }
  StateIndex operator[](std::size_t i) const { return states[i]; }
  friend bool operator==(const StateVector&, const StateVector&) = default;
};

struct PartialStateVector {
  std::vector<StateIndex> entries;

  std::size_t size() const { return entries.size(); }
  StateIndex operator[](std::size_t i) const { return entries[i]; }
  bool is_missing(std::size_t i) const { return entries[i] == kMissing; }
  friend bool operator==(const PartialStateVector&, const PartialStateVector&) = default;

  static PartialStateVector all_missing(std::size_t feature_count) {
    return PartialStateVector{std::vector<StateIndex>(feature_count, kMissing)};
  }
  std::string to_string() const;
};

/// The D features and the size of each feature's state alphabet.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  explicit FeatureSpace(std::vector<int> alphabet_sizes);

  std::size_t feature_count() const { return sizes_.size(); }
  int alphabet_size(std::size_t feature) const { return sizes_.at(feature); }
  const std::vector<int>& alphabet_sizes() const { return sizes_; }

  /// |X| = prod |X_i|.
  std::size_t state_count() const { return state_count_; }
  /// Psi_tot = prod (|X_i| + 1).
  std::size_t psi_total() const { return psi_total_; }
  /// |P(D)| = 2^D.
  std::size_t observation_set_count() const { return std::size_t{1} << sizes_.size(); }
  ObservationSet all_features() const { return ObservationSet::full(feature_count()); }

  bool is_valid(const StateVector& phi) const;
  bool is_valid(const PartialStateVector& psi) const;
  bool is_valid(ObservationSet obs) const;
  void require_valid(const StateVector& phi) const;
  void require_valid(const PartialStateVector& psi) const;
  void require_valid(ObservationSet obs) const;

  /// Dense index of a full state vector in [0, state_count()).
  std::size_t state_index(const StateVector& phi) const;
  StateVector state_at(std::size_t index) const;

  /// Dense global index of a partial state vector in [0, psi_total()).
  std::size_t partial_index(const PartialStateVector& psi) const;
  PartialStateVector partial_at(std::size_t index) const;
  /// Position of psi inside Psi+(domain_set(psi)) in canonical order.
  std::size_t local_index(const PartialStateVector& psi) const;
  /// |Psi+(obs)| = prod_{i in obs} |X_i|.
  std::size_t partial_count(ObservationSet obs) const;
  /// Global index contribution of feature i holding `state` (0 for missing).
  std::size_t partial_digit_weight(std::size_t feature) const { return partial_stride_[feature]; }

  friend bool operator==(const FeatureSpace& a, const FeatureSpace& b) { return a.sizes_ == b.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> partial_stride_;
  std::vector<std::size_t> state_stride_;
  std::size_t state_count_ = 1;
  std::size_t psi_total_ = 1;
};

PartialStateVector make_partial(const StateVector& phi, ObservationSet obs);
ObservationSet domain_set(const PartialStateVector& psi);
bool is_consistent(const StateVector& phi, const PartialStateVector& psi);
bool is_substate(const PartialStateVector& psi, const PartialStateVector& other);

/// All 2^D subsets in canonical order. Throws CapacityError for D > 20.
std::vector<ObservationSet> enumerate_observation_sets(const FeatureSpace& space);

/// Psi+(obs) in lexicographic order. Throws CapacityError beyond `ceiling`.
std::vector<PartialStateVector> enumerate_partials(ObservationSet obs, const FeatureSpace& space,
                                                   std::size_t ceiling = kDefaultPartialCeiling);

/// Every psi' with psi' <= psi, including psi and the all-missing vector.
/// Ordered by the canonical order of their domain sets.
std::vector<PartialStateVector> substates_of(const PartialStateVector& psi);

std::size_t psi_total(const FeatureSpace& space);

/// Precomputed Psi+(I) tables for every observation set, keyed by mask.
/// Built once per feature space and shared read-only between policies.
class PartialCatalog {
 public:
  explicit PartialCatalog(FeatureSpace space, std::size_t ceiling = kDefaultPartialCeiling);

  const FeatureSpace& space() const { return space_; }
  /// Observation sets in canonical order.
  const std::vector<ObservationSet>& observation_sets() const { return sets_; }
  /// Global partial indices of Psi+(obs) in canonical order.
  const std::vector<std::size_t>& members(ObservationSet obs) const { return members_[obs.mask()]; }
  /// For each full state index, the global index of its restriction to obs.
  std::size_t restrict_state(std::size_t state_index, ObservationSet obs) const;

 private:
  FeatureSpace space_;
  std::vector<ObservationSet> sets_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<StateVector> states_;
};

}  // namespace ncc
