#ifndef CPS_CONFIG_HPP
#define CPS_CONFIG_HPP

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <unordered_set>
#include <utility>

namespace cps {

// Finite support of a {0,1}-configuration on the integer lattice: the set of
// infected sites. The empty set is the absorbing all-zero state. Backed by a
// hash set with a lazily maintained min/max bounding interval.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::initializer_list<std::int64_t> sites) {
    for (auto s : sites) insert(s);
  }

  static Configuration single(std::int64_t site) { return Configuration{site}; }

  bool contains(std::int64_t site) const { return sites_.count(site) != 0; }
  bool empty() const { return sites_.empty(); }
  std::size_t size() const { return sites_.size(); }

  void insert(std::int64_t site) {
    auto [it, fresh] = sites_.insert(site);
    if (fresh && bounds_valid_) {
      if (sites_.size() == 1) {
        lo_ = hi_ = site;
      } else {
        if (site < lo_) lo_ = site;
        if (site > hi_) hi_ = site;
      }
    }
  }

  void erase(std::int64_t site) {
    if (sites_.erase(site) > 0 && (site == lo_ || site == hi_)) {
      bounds_valid_ = false;  // recomputed on demand
    }
  }

  // Bounding interval [min, max] of the support; nullopt when empty.
  std::optional<std::pair<std::int64_t, std::int64_t>> bounds() const {
    if (sites_.empty()) return std::nullopt;
    if (!bounds_valid_) {
      auto it = sites_.begin();
      lo_ = hi_ = *it;
      for (++it; it != sites_.end(); ++it) {
        if (*it < lo_) lo_ = *it;
        if (*it > hi_) hi_ = *it;
      }
      bounds_valid_ = true;
    }
    return std::make_pair(lo_, hi_);
  }

  bool is_subset_of(const Configuration& other) const {
    if (size() > other.size()) return false;
    for (auto s : sites_)
      if (!other.contains(s)) return false;
    return true;
  }

  // Visits sites present in exactly one of the two configurations.
  template <typename Fn>
  void for_each_symmetric_difference(const Configuration& other, Fn&& fn) const {
    for (auto s : sites_)
      if (!other.contains(s)) fn(s);
    for (auto s : other.sites_)
      if (!contains(s)) fn(s);
  }

  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.sites_ == b.sites_;
  }

 private:
  std::unordered_set<std::int64_t> sites_;
  mutable std::int64_t lo_ = 0;
  mutable std::int64_t hi_ = 0;
  mutable bool bounds_valid_ = true;
};

}  // namespace cps

#endif  // CPS_CONFIG_HPP
