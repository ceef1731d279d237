#include "grasswalk/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "grasswalk/error.hpp"

namespace grasswalk {

Weight Weight::zero(int rank) {
  if (rank < 1) throw Error(ErrorCode::InvalidArgument, "weight rank must be >= 1");
  return Weight(std::vector<int>(static_cast<std::size_t>(rank), 0));
}

int Weight::sum() const noexcept {
  return std::accumulate(parts_.begin(), parts_.end(), 0);
}

bool Weight::is_zero() const noexcept {
  return std::all_of(parts_.begin(), parts_.end(), [](int v) { return v == 0; });
}

Weight Weight::operator+(const Weight& other) const {
  if (rank() != other.rank()) {
    throw Error(ErrorCode::RankMismatch, "cannot add weights of rank " +
                                             std::to_string(rank()) + " and " +
                                             std::to_string(other.rank()));
  }
  std::vector<int> out(parts_.size());
  for (std::size_t i = 0; i < parts_.size(); ++i) out[i] = parts_[i] + other.parts_[i];
  return Weight(std::move(out));
}

Weight make_weight(std::span<const int> parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "weight must have rank >= 1");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 0) {
      throw Error(ErrorCode::NegativeEntry,
                  "entry " + std::to_string(i + 1) + " is negative: " + std::to_string(parts[i]));
    }
    if (parts[i] % 2 != 0) {
      throw Error(ErrorCode::OddEntry,
                  "entry " + std::to_string(i + 1) + " is odd: " + std::to_string(parts[i]));
    }
    if (i > 0 && parts[i] > parts[i - 1]) {
      throw Error(ErrorCode::NotDecreasing,
                  "entries " + std::to_string(i) + "," + std::to_string(i + 1) + " increase");
    }
  }
  return Weight(std::vector<int>(parts.begin(), parts.end()));
}

bool BasisOrder::operator()(const Weight& a, const Weight& b) const noexcept {
  const int sa = a.sum();
  const int sb = b.sum();
  if (sa != sb) return sa < sb;
  return std::lexicographical_compare(a.parts().begin(), a.parts().end(), b.parts().begin(),
                                      b.parts().end());
}

bool dominance_leq(const Weight& mu, const Weight& lambda) {
  if (mu.rank() != lambda.rank()) {
    throw Error(ErrorCode::RankMismatch, "dominance comparison of rank " +
                                             std::to_string(mu.rank()) + " vs " +
                                             std::to_string(lambda.rank()));
  }
  int prefix_mu = 0;
  int prefix_lambda = 0;
  for (int i = 0; i < mu.rank(); ++i) {
    prefix_mu += mu[i];
    prefix_lambda += lambda[i];
    if (prefix_mu > prefix_lambda) return false;
  }
  return true;
}

std::vector<std::vector<int>> weyl_orbit(const Weight& lambda) {
  std::vector<int> base(lambda.parts().begin(), lambda.parts().end());
  std::sort(base.begin(), base.end());
  const std::size_t q = base.size();
  std::vector<std::vector<int>> orbit;
  do {
    for (unsigned mask = 0; mask < (1u << q); ++mask) {
      std::vector<int> image(base);
      for (std::size_t i = 0; i < q; ++i) {
        if (mask & (1u << i)) image[i] = -image[i];
      }
      orbit.push_back(std::move(image));
    }
  } while (std::next_permutation(base.begin(), base.end()));
  std::sort(orbit.begin(), orbit.end());
  orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
  return orbit;
}

namespace {

std::vector<std::vector<int>> distinct_permutations(const Weight& lambda) {
  std::vector<int> base(lambda.parts().begin(), lambda.parts().end());
  std::sort(base.begin(), base.end());
  std::vector<std::vector<int>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

}  // namespace

std::size_t distinct_permutation_count(const Weight& lambda) {
  // q!/prod(multiplicity!) without enumerating.
  std::vector<int> sorted(lambda.parts().begin(), lambda.parts().end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t count = 1;
  std::size_t run = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    count *= (i + 1);
    run = (i > 0 && sorted[i] == sorted[i - 1]) ? run + 1 : 1;
    count /= run;
  }
  return count;
}

std::size_t orbit_size(const Weight& lambda) {
  std::size_t nonzero = 0;
  for (int v : lambda.parts()) nonzero += (v != 0);
  return distinct_permutation_count(lambda) << nonzero;
}

double orbit_sum_eval(const Weight& lambda, std::span<const double> x) {
  if (static_cast<int>(x.size()) != lambda.rank()) {
    throw Error(ErrorCode::RankMismatch, "orbit sum: point rank differs from weight rank");
  }
  const auto perms = distinct_permutations(lambda);
  double total = 0.0;
  for (const auto& perm : perms) {
    double term = 1.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (perm[i] != 0) term *= std::cos(perm[i] * x[i]);
    }
    total += term;
  }
  return total / static_cast<double>(perms.size());
}

namespace {

void enumerate_rec(int q, int pos, int bound, std::vector<int>& current,
                   std::vector<Weight>& out) {
  if (pos == q) {
    out.push_back(make_weight(current));
    return;
  }
  for (int v = 0; v <= bound; v += 2) {
    current[static_cast<std::size_t>(pos)] = v;
    enumerate_rec(q, pos + 1, v, current, out);
  }
}

}  // namespace

std::vector<Weight> enumerate_weights(int q, int max_first) {
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "rank q must be >= 1");
  if (max_first < 0 || max_first % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "max_first must be even and >= 0");
  }
  std::vector<Weight> out;
  std::vector<int> current(static_cast<std::size_t>(q), 0);
  enumerate_rec(q, 0, max_first, current, out);
  std::sort(out.begin(), out.end(), BasisOrder{});
  return out;
}

std::vector<Weight> weights_below(const Weight& lambda) {
  std::vector<Weight> out;
  for (auto& mu : enumerate_weights(lambda.rank(), lambda.first())) {
    if (dominance_leq(mu, lambda)) out.push_back(std::move(mu));
  }
  return out;
}

std::string to_string(const Weight& w) {
  std::string out;
  for (int i = 0; i < w.rank(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(w[i]);
  }
  return out;
}

Weight parse_weight(std::string_view text, int rank) {
  std::vector<int> parts;
  std::size_t pos = 0;
  while (true) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    int value = 0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) {
      throw Error(ErrorCode::ParseError, "malformed weight '" + std::string(text) + "'");
    }
    parts.push_back(value);
    pos = static_cast<std::size_t>(ptr - text.data());
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos == text.size()) break;
    if (text[pos] != ',') {
      throw Error(ErrorCode::ParseError, "malformed weight '" + std::string(text) + "'");
    }
    ++pos;
  }
  if (rank > 0 && static_cast<int>(parts.size()) != rank) {
    throw Error(ErrorCode::RankMismatch, "weight '" + std::string(text) + "' has rank " +
                                             std::to_string(parts.size()) + ", expected " +
                                             std::to_string(rank));
  }
  return make_weight(parts);
}

bool ChamberPoint::in_chamber() const noexcept {
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i]) || coords[i] < 0.0) return false;
    if (i > 0 && coords[i] > coords[i - 1]) return false;
  }
  return !coords.empty();
}

bool ChamberPoint::in_alcove() const noexcept {
  return in_chamber() && coords.front() <= std::numbers::pi / 2;
}

ChamberPoint make_chamber_point(std::vector<double> coords) {
  ChamberPoint point{std::move(coords)};
  if (!point.in_chamber()) {
    throw Error(ErrorCode::NotInChamber, "point is not in the closed Weyl chamber");
  }
  return point;
}

ChamberPoint make_alcove_point(std::vector<double> coords) {
  ChamberPoint point = make_chamber_point(std::move(coords));
  if (!point.in_alcove()) {
    throw Error(ErrorCode::NotInChamber, "point is outside the alcove (x1 > pi/2)");
  }
  return point;
}

}  // namespace grasswalk
