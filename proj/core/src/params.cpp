#include "grasswalk/params.hpp"

#include <cmath>
#include <sstream>

#include "grasswalk/error.hpp"

namespace grasswalk {

ModelParams ModelParams::make(int d, double p, int q) {
  if (d != 1 && d != 2 && d != 4) {
    throw Error(ErrorCode::InvalidArgument, "d must be 1, 2 or 4, got " + std::to_string(d));
  }
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "q must be >= 1");
  if (!std::isfinite(p) || p < q) {
    throw Error(ErrorCode::InvalidArgument, "p must be >= q");
  }
  return ModelParams(d, p, q);
}

std::vector<double> ModelParams::rho() const {
  std::vector<double> out(static_cast<std::size_t>(q_));
  for (int i = 1; i <= q_; ++i) {
    out[static_cast<std::size_t>(i - 1)] = 0.5 * d_ * (p_ + q_ + 2.0 - 2.0 * i) - 1.0;
  }
  return out;
}

bool ModelParams::integer_p() const noexcept { return p_ == std::floor(p_); }

bool ModelParams::in_representation_range() const noexcept {
  return p_ > 2.0 * q_ - 1.0 || (integer_p() && p_ >= q_);
}

std::string ModelParams::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << "d=" << d_ << ",p=" << p_ << ",q=" << q_;
  return out.str();
}

}  // namespace grasswalk
