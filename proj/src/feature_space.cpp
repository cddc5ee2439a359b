#include "ncc/feature_space.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ncc {

namespace {

std::size_t checked_mul(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw CapacityError(std::string(what) + " overflows");
  }
  return a * b;
}

}  // namespace

ObservationSet ObservationSet::of(std::initializer_list<std::size_t> features) {
  ObservationSet s;
  for (auto f : features) s.insert(f);
  return s;
}

ObservationSet ObservationSet::full(std::size_t feature_count) {
  if (feature_count > 32) throw CapacityError("observation sets hold at most 32 features");
  return from_mask(feature_count == 32 ? 0xffffffffu : ((1u << feature_count) - 1u));
}

std::size_t ObservationSet::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::size_t> ObservationSet::members() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::uint32_t m = mask_; m != 0; m &= m - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  }
  return out;
}

void ObservationSet::insert(std::size_t feature) {
  if (feature >= 32) throw std::out_of_range("feature index " + std::to_string(feature) + " >= 32");
  mask_ |= (1u << feature);
}

std::string ObservationSet::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (auto i : members()) {
    if (!first) os << ',';
    os << i;
    first = false;
  }
  os << '}';
  return os.str();
}

bool canonical_less(ObservationSet lhs, ObservationSet rhs) {
  if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
  return lhs.members() < rhs.members();
}

std::string PartialStateVector::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ',';
    if (entries[i] == kMissing) {
      os << '-';
    } else {
      os << entries[i];
    }
  }
  os << ')';
  return os.str();
}

FeatureSpace::FeatureSpace(std::vector<int> alphabet_sizes) : sizes_(std::move(alphabet_sizes)) {
  if (sizes_.size() > 32) throw CapacityError("at most 32 features are supported");
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] < 1) {
      throw std::invalid_argument("feature " + std::to_string(i) + " has an empty state alphabet");
    }
    if (sizes_[i] > std::numeric_limits<StateIndex>::max()) {
      throw CapacityError("feature " + std::to_string(i) + " alphabet too large");
    }
  }
  const std::size_t d = sizes_.size();
  partial_stride_.assign(d, 1);
  state_stride_.assign(d, 1);
  for (std::size_t k = d; k-- > 0;) {
    partial_stride_[k] = psi_total_;
    state_stride_[k] = state_count_;
    psi_total_ = checked_mul(psi_total_, static_cast<std::size_t>(sizes_[k]) + 1, "psi_total");
    state_count_ = checked_mul(state_count_, static_cast<std::size_t>(sizes_[k]), "state count");
  }
}

bool FeatureSpace::is_valid(const StateVector& phi) const {
  if (phi.size() != sizes_.size()) return false;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (phi[i] < 0 || phi[i] >= sizes_[i]) return false;
  }
  return true;
}

bool FeatureSpace::is_valid(const PartialStateVector& psi) const {
  if (psi.size() != sizes_.size()) return false;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (psi[i] != kMissing && (psi[i] < 0 || psi[i] >= sizes_[i])) return false;
  }
  return true;
}

bool FeatureSpace::is_valid(ObservationSet obs) const {
  return obs.is_subset_of(all_features());
}

void FeatureSpace::require_valid(const StateVector& phi) const {
  if (!is_valid(phi)) throw std::out_of_range("state vector does not fit the feature space");
}

void FeatureSpace::require_valid(const PartialStateVector& psi) const {
  if (!is_valid(psi)) {
    throw std::out_of_range("partial state vector " + psi.to_string() + " does not fit the feature space");
  }
}

void FeatureSpace::require_valid(ObservationSet obs) const {
  if (!is_valid(obs)) {
    throw std::out_of_range("observation set " + obs.to_string() + " references a feature >= " +
                            std::to_string(feature_count()));
  }
}

std::size_t FeatureSpace::state_index(const StateVector& phi) const {
  if (!is_valid(phi)) throw std::out_of_range("state vector outside the feature space");
  std::size_t index = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    index += static_cast<std::size_t>(phi[i]) * state_stride_[i];
  }
  return index;
}

StateVector FeatureSpace::state_at(std::size_t index) const {
  StateVector phi{std::vector<StateIndex>(sizes_.size(), 0)};
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    phi.states[i] = static_cast<StateIndex>((index / state_stride_[i]) % static_cast<std::size_t>(sizes_[i]));
  }
  return phi;
}

std::size_t FeatureSpace::partial_index(const PartialStateVector& psi) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    index += static_cast<std::size_t>(psi[i] + 1) * partial_stride_[i];
  }
  return index;
}

PartialStateVector FeatureSpace::partial_at(std::size_t index) const {
  PartialStateVector psi = PartialStateVector::all_missing(sizes_.size());
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    const auto digit = (index / partial_stride_[i]) % (static_cast<std::size_t>(sizes_[i]) + 1);
    psi.entries[i] = static_cast<StateIndex>(static_cast<int>(digit) - 1);
  }
  return psi;
}

std::size_t FeatureSpace::local_index(const PartialStateVector& psi) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (psi[i] == kMissing) continue;
    index = index * static_cast<std::size_t>(sizes_[i]) + static_cast<std::size_t>(psi[i]);
  }
  return index;
}

std::size_t FeatureSpace::partial_count(ObservationSet obs) const {
  std::size_t n = 1;
  for (auto i : obs.members()) n = checked_mul(n, static_cast<std::size_t>(sizes_.at(i)), "partial count");
  return n;
}

PartialStateVector make_partial(const StateVector& phi, ObservationSet obs) {
  if (!obs.is_subset_of(ObservationSet::full(phi.size()))) {
    throw std::out_of_range("observation set " + obs.to_string() + " references a feature >= " +
                            std::to_string(phi.size()));
  }
  PartialStateVector psi = PartialStateVector::all_missing(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (obs.contains(i)) psi.entries[i] = phi[i];
  }
  return psi;
}

ObservationSet domain_set(const PartialStateVector& psi) {
  ObservationSet obs;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (psi[i] != kMissing) obs.insert(i);
  }
  return obs;
}

bool is_consistent(const StateVector& phi, const PartialStateVector& psi) {
  if (phi.size() != psi.size()) return false;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (psi[i] != kMissing && psi[i] != phi[i]) return false;
  }
  return true;
}

bool is_substate(const PartialStateVector& psi, const PartialStateVector& other) {
  if (psi.size() != other.size()) return false;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (psi[i] != kMissing && psi[i] != other[i]) return false;
  }
  return true;
}

std::vector<ObservationSet> enumerate_observation_sets(const FeatureSpace& space) {
  const std::size_t d = space.feature_count();
  if (d > kMaxEnumerableFeatures) {
    throw CapacityError("refusing to enumerate 2^" + std::to_string(d) + " observation sets (D > " +
                        std::to_string(kMaxEnumerableFeatures) + ")");
  }
  std::vector<ObservationSet> sets;
  sets.reserve(std::size_t{1} << d);
  for (std::uint32_t m = 0; m < (1u << d); ++m) sets.push_back(ObservationSet::from_mask(m));
  std::sort(sets.begin(), sets.end(), canonical_less);
  return sets;
}

std::vector<PartialStateVector> enumerate_partials(ObservationSet obs, const FeatureSpace& space,
                                                   std::size_t ceiling) {
  space.require_valid(obs);
  const auto members = obs.members();
  std::size_t count = 1;
  for (auto i : members) {
    count = checked_mul(count, static_cast<std::size_t>(space.alphabet_size(i)), "partial count");
    if (count > ceiling) {
      throw CapacityError("|Psi+(" + obs.to_string() + ")| exceeds the ceiling of " + std::to_string(ceiling));
    }
  }
  std::vector<PartialStateVector> out;
  out.reserve(count);
  PartialStateVector psi = PartialStateVector::all_missing(space.feature_count());
  for (auto i : members) psi.entries[i] = 0;
  for (std::size_t n = 0; n < count; ++n) {
    out.push_back(psi);
    // odometer, last member fastest
    for (std::size_t k = members.size(); k-- > 0;) {
      const auto f = members[k];
      if (++psi.entries[f] < space.alphabet_size(f)) break;
      psi.entries[f] = 0;
    }
  }
  return out;
}

std::vector<PartialStateVector> substates_of(const PartialStateVector& psi) {
  const auto dom = domain_set(psi);
  if (dom.size() > kMaxEnumerableFeatures) {
    throw CapacityError("substate enumeration beyond 2^" + std::to_string(kMaxEnumerableFeatures));
  }
  std::vector<ObservationSet> subsets;
  subsets.reserve(std::size_t{1} << dom.size());
  // standard submask walk over the domain mask
  const std::uint32_t full = dom.mask();
  std::uint32_t sub = full;
  while (true) {
    subsets.push_back(ObservationSet::from_mask(sub));
    if (sub == 0) break;
    sub = (sub - 1) & full;
  }
  std::sort(subsets.begin(), subsets.end(), canonical_less);
  std::vector<PartialStateVector> out;
  out.reserve(subsets.size());
  for (auto s : subsets) {
    PartialStateVector sub_psi = PartialStateVector::all_missing(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (s.contains(i)) sub_psi.entries[i] = psi[i];
    }
    out.push_back(std::move(sub_psi));
  }
  return out;
}

std::size_t psi_total(const FeatureSpace& space) { return space.psi_total(); }

PartialCatalog::PartialCatalog(FeatureSpace space, std::size_t ceiling) : space_(std::move(space)) {
  if (space_.psi_total() > ceiling) {
    throw CapacityError("psi_total " + std::to_string(space_.psi_total()) + " exceeds the ceiling of " +
                        std::to_string(ceiling));
  }
  sets_ = enumerate_observation_sets(space_);
  members_.resize(space_.observation_set_count());
  for (auto obs : sets_) {
    auto& dst = members_[obs.mask()];
    for (const auto& psi : enumerate_partials(obs, space_, ceiling)) dst.push_back(space_.partial_index(psi));
  }
  states_.reserve(space_.state_count());
  for (std::size_t s = 0; s < space_.state_count(); ++s) states_.push_back(space_.state_at(s));
}

std::size_t PartialCatalog::restrict_state(std::size_t state_index, ObservationSet obs) const {
  const auto& phi = states_.at(state_index);
  std::size_t index = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (obs.contains(i)) index += static_cast<std::size_t>(phi[i] + 1) * space_.partial_digit_weight(i);
  }
  return index;
}

}  // namespace ncc
