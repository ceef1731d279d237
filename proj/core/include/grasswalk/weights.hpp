#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grasswalk {

/// A dominant even weight: q non-negative even integers, weakly decreasing.
/// Instances only come out of `make_weight` (or operations on valid weights),
/// so every Weight in circulation satisfies the lattice invariants.
class Weight {
 public:
  Weight() = default;

  static Weight zero(int rank);

  int rank() const noexcept { return static_cast<int>(parts_.size()); }
  int first() const noexcept { return parts_.empty() ? 0 : parts_.front(); }
  int sum() const noexcept;
  bool is_zero() const noexcept;
  int operator[](std::size_t i) const { return parts_[i]; }
  std::span<const int> parts() const noexcept { return parts_; }

  /// Componentwise sum; stays dominant and even.
  Weight operator+(const Weight& other) const;

  bool operator==(const Weight&) const = default;
  /// Plain lexicographic comparison, usable as a map key. Not the basis order.
  auto operator<=>(const Weight&) const = default;

 private:
  explicit Weight(std::vector<int> parts) : parts_(std::move(parts)) {}
  friend Weight make_weight(std::span<const int> parts);

  std::vector<int> parts_;
};

/// Validates lattice membership. Throws Error(OddEntry | NotDecreasing |
/// NegativeEntry). Checks run left to right; the first violation wins.
Weight make_weight(std::span<const int> parts);
inline Weight make_weight(std::initializer_list<int> parts) {
  return make_weight(std::span<const int>(parts.begin(), parts.size()));
}

/// Linear extension of the dominance order used for every basis: graded by
/// the entry sum, ties broken lexicographically (ascending).
struct BasisOrder {
  bool operator()(const Weight& a, const Weight& b) const noexcept;
};

/// mu <= lambda in dominance order (all prefix sums). Throws RankMismatch.
bool dominance_leq(const Weight& mu, const Weight& lambda);

/// Full signed-permutation orbit, deduplicated and sorted lexicographically.
std::vector<std::vector<int>> weyl_orbit(const Weight& lambda);

/// Number of distinct coordinate permutations of lambda's entries.
std::size_t distinct_permutation_count(const Weight& lambda);
std::size_t orbit_size(const Weight& lambda);

/// Normalized orbit sum |W lambda|^{-1} sum_{mu in W lambda} e^{i<mu,x>}.
/// Real-valued; computed as an average over distinct permutations of
/// products of cosines, which is what the sign symmetry reduces it to.
double orbit_sum_eval(const Weight& lambda, std::span<const double> x);

/// All dominant mu with mu <= lambda, sorted by BasisOrder (lambda last).
std::vector<Weight> weights_below(const Weight& lambda);

/// All dominant weights of rank q with first entry <= max_first, in BasisOrder.
std::vector<Weight> enumerate_weights(int q, int max_first);

/// "4,2,0"
std::string to_string(const Weight& w);
/// Inverse of to_string; validates through make_weight. Throws ParseError on
/// malformed text, RankMismatch if `rank` > 0 and the length differs.
Weight parse_weight(std::string_view text, int rank = 0);

/// A point of the closed Weyl chamber (x1 >= ... >= xq >= 0), optionally
/// restricted to the alcove (x1 <= pi/2).
struct ChamberPoint {
  std::vector<double> coords;

  int rank() const noexcept { return static_cast<int>(coords.size()); }
  bool in_chamber() const noexcept;
  bool in_alcove() const noexcept;
};

/// Throws NotInChamber unless the coordinates are ordered and non-negative.
ChamberPoint make_chamber_point(std::vector<double> coords);
/// As make_chamber_point, additionally requiring x1 <= pi/2.
ChamberPoint make_alcove_point(std::vector<double> coords);

}  // namespace grasswalk
