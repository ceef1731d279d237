#include "grasswalk/hypergroup.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <tuple>

#include "grasswalk/error.hpp"
#include "json.hpp"

namespace grasswalk {

namespace {
constexpr double kNegativeTolerance = 1e-8;
constexpr double kNoise = 1e-13;
}  // namespace

WeightMeasure WeightMeasure::dirac(const Weight& w) {
  WeightMeasure nu;
  nu.add(w, 1.0);
  return nu;
}

void WeightMeasure::add(const Weight& w, double mass) {
  if (!masses_.empty() && masses_.begin()->first.rank() != w.rank()) {
    throw Error(ErrorCode::RankMismatch, "measure mixes weights of different rank");
  }
  masses_[w] += mass;
}

double WeightMeasure::mass(const Weight& w) const {
  const auto it = masses_.find(w);
  return it == masses_.end() ? 0.0 : it->second;
}

double WeightMeasure::total() const {
  double s = 0.0;
  for (const auto& [w, m] : masses_) s += m;
  return s;
}

int WeightMeasure::max_first() const noexcept {
  int m = 0;
  for (const auto& [w, mass] : masses_) m = std::max(m, w.first());
  return m;
}

WeightMeasure parse_measure(std::string_view text, int rank) {
  WeightMeasure nu;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(';', pos), text.size());
    std::string_view item = text.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const std::size_t colon = item.find(':');
      if (colon == std::string_view::npos) {
        throw Error(ErrorCode::ParseError, "measure item '" + std::string(item) + "' lacks ':'");
      }
      const Weight w = parse_weight(item.substr(0, colon), rank);
      const std::string mass_text(item.substr(colon + 1));
      double mass = 0.0;
      const auto [ptr, ec] = std::from_chars(mass_text.data(), mass_text.data() + mass_text.size(), mass);
      if (ec != std::errc() || ptr != mass_text.data() + mass_text.size()) {
        throw Error(ErrorCode::ParseError, "bad mass '" + mass_text + "'");
      }
      nu.add(w, mass);
    }
    pos = end + 1;
  }
  if (nu.empty()) throw Error(ErrorCode::ParseError, "empty measure");
  return nu;
}

std::string to_string(const WeightMeasure& nu) {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [w, m] : nu) {
    if (!first) out << ';';
    first = false;
    out << to_string(w) << ':' << m;
  }
  return out.str();
}

void require_probability(const WeightMeasure& nu) {
  if (nu.empty()) throw Error(ErrorCode::InvalidArgument, "empty measure");
  for (const auto& [w, m] : nu) {
    if (!(m >= -1e-10)) {
      throw Error(ErrorCode::InvalidArgument, "negative mass at " + to_string(w));
    }
  }
  if (std::abs(nu.total() - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "masses must sum to 1");
  }
}

// ---------------------------------------------------------------------------

Hypergroup::Hypergroup(const ModelParams& params, int degree_cap, int nodes_per_axis) {
  if (degree_cap < 0 || degree_cap % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "degree cap must be even and >= 0");
  }
  const int nodes = nodes_per_axis > 0 ? nodes_per_axis : default_nodes_per_axis(params.k(), degree_cap);
  const auto diag = validate_grid(make_grid(params.q(), nodes, params.k()), params.k(), degree_cap);
  if (!diag.resolved) {
    throw Error(ErrorCode::GridUnderResolved,
                std::to_string(nodes) + " nodes per axis do not resolve degree " +
                    std::to_string(degree_cap));
  }
  basis_ = JacobiBasis::shared(params, degree_cap, nodes);
}

std::shared_ptr<Hypergroup> Hypergroup::shared(const ModelParams& params, int degree_cap,
                                               int nodes_per_axis) {
  const int nodes =
      nodes_per_axis > 0 ? nodes_per_axis : default_nodes_per_axis(params.k(), degree_cap);
  using Key = std::tuple<int, double, int, int, int>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<Hypergroup>> cache;
  const Key key{params.d(), params.p(), params.q(), degree_cap, nodes};
  {
    std::shared_lock lock(mutex);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<Hypergroup>(params, degree_cap, nodes);
  std::unique_lock lock(mutex);
  return cache.emplace(key, std::move(built)).first->second;
}

std::size_t Hypergroup::index(const Weight& w) const {
  if (w.rank() != params().q()) throw Error(ErrorCode::RankMismatch, "weight rank differs from q");
  if (w.first() > degree_cap()) {
    throw Error(ErrorCode::DegreeCapExceeded, "weight " + to_string(w) + " exceeds degree cap " +
                                                  std::to_string(degree_cap()));
  }
  return *basis_->index_of(w);
}

std::unique_ptr<LinearizationRow> Hypergroup::compute_row(std::size_t a, std::size_t b) const {
  const Weight top = weight(a) + weight(b);
  const auto last = static_cast<Eigen::Index>(*basis_->index_of(top));
  const Eigen::MatrixXd& values = basis_->node_values();
  const Eigen::VectorXd weighted = basis_->node_weights().cwiseProduct(
      values.col(static_cast<Eigen::Index>(a)).cwiseProduct(values.col(static_cast<Eigen::Index>(b))));
  const Eigen::VectorXd proj = values.leftCols(last + 1).transpose() * weighted;

  auto row = std::make_unique<LinearizationRow>();
  double kept_sum = 0.0;
  for (Eigen::Index t = 0; t <= last; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const double c = proj(t) / basis_->norm2(ti);
    if (!dominance_leq(weight(ti), top)) {
      row->outside_support = std::max(row->outside_support, std::abs(c));
      continue;
    }
    row->raw_sum += c;
    if (c < row->most_negative) {
      row->most_negative = c;
      row->most_negative_tau = ti;
    }
    double kept = c;
    if (std::abs(c) < kNoise || (c < 0.0 && c > -kNegativeTolerance)) kept = 0.0;
    if (kept == 0.0) continue;
    if (kept <= -kNegativeTolerance) row->flagged = true;
    row->support.push_back(ti);
    row->coeffs.push_back(kept);
    kept_sum += kept;
  }
  for (double& c : row->coeffs) c /= kept_sum;
  if (!row->flagged) {
    double acc = 0.0;
    row->cumulative.reserve(row->coeffs.size());
    for (double c : row->coeffs) row->cumulative.push_back(acc += c);
  }
  return row;
}

const LinearizationRow& Hypergroup::row(std::size_t a, std::size_t b) const {
  if (a < b) std::swap(a, b);
  if (weight(a).first() + weight(b).first() > degree_cap()) {
    throw Error(ErrorCode::DegreeCapExceeded,
                "row " + to_string(weight(a)) + " x " + to_string(weight(b)) +
                    " exceeds degree cap " + std::to_string(degree_cap()));
  }
  const std::uint64_t key = static_cast<std::uint64_t>(a) * basis_->size() + b;
  {
    std::shared_lock lock(mutex_);
    const auto it = rows_.find(key);
    if (it != rows_.end()) return *it->second;
  }
  auto fresh = compute_row(a, b);
  std::unique_lock lock(mutex_);
  return *rows_.try_emplace(key, std::move(fresh)).first->second;
}

const LinearizationRow& Hypergroup::row(const Weight& lambda, const Weight& mu) const {
  return row(index(lambda), index(mu));
}

WeightMeasure Hypergroup::product(const Weight& lambda, const Weight& mu) const {
  const LinearizationRow& r = row(lambda, mu);
  WeightMeasure out;
  for (std::size_t i = 0; i < r.support.size(); ++i) out.add(weight(r.support[i]), r.coeffs[i]);
  return out;
}

double Hypergroup::haar_weight(const Weight& lambda) const {
  return basis_->unit_norm2() / basis_->norm2(index(lambda));
}

WeightMeasure Hypergroup::convolve(const WeightMeasure& a, const WeightMeasure& b) const {
  WeightMeasure out;
  for (const auto& [wa, ma] : a) {
    for (const auto& [wb, mb] : b) {
      const LinearizationRow& r = row(wa, wb);
      for (std::size_t i = 0; i < r.support.size(); ++i) {
        out.add(weight(r.support[i]), ma * mb * r.coeffs[i]);
      }
    }
  }
  return out;
}

double Hypergroup::modified_variance(const WeightMeasure& nu) const {
  double s = 0.0;
  for (const auto& [w, m] : nu) s += m * moment(w);
  return s;
}

double Hypergroup::fourier(const WeightMeasure& nu, std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [w, m] : nu) s += m * basis_->evaluate(index(w), x);
  return s;
}

std::size_t Hypergroup::cached_rows() const {
  std::shared_lock lock(mutex_);
  return rows_.size();
}

std::string Hypergroup::signature() const {
  return params().describe() + ",cap=" + std::to_string(degree_cap()) +
         ",nodes=" + std::to_string(nodes_per_axis());
}

std::string Hypergroup::cache_file_name() const {
  std::string name = "rows_" + signature() + ".json";
  std::replace(name.begin(), name.end(), ',', '_');
  std::replace(name.begin(), name.end(), '=', '-');
  return name;
}

std::size_t Hypergroup::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return 0;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "coefficient cache " + file.string() + ": " + e.what());
  }
  if (j.value("signature", std::string()) != signature()) return 0;
  std::size_t taken = 0;
  try {
    for (const auto& item : j.at("rows")) {
      const std::size_t a = index(parse_weight(item.at("lambda").get<std::string>(), params().q()));
      const std::size_t b = index(parse_weight(item.at("mu").get<std::string>(), params().q()));
      auto row = std::make_unique<LinearizationRow>();
      for (const auto& t : item.at("tau")) {
        row->support.push_back(index(parse_weight(t.get<std::string>(), params().q())));
      }
      row->coeffs = item.at("c").get<std::vector<double>>();
      row->raw_sum = item.at("raw_sum").get<double>();
      row->most_negative = item.at("most_negative").get<double>();
      row->most_negative_tau =
          index(parse_weight(item.at("most_negative_tau").get<std::string>(), params().q()));
      row->outside_support = item.at("outside_support").get<double>();
      row->flagged = item.at("flagged").get<bool>();
      if (row->coeffs.size() != row->support.size()) {
        throw Error(ErrorCode::ParseError, "coefficient cache row has mismatched lengths");
      }
      if (!row->flagged) {
        double acc = 0.0;
        for (double c : row->coeffs) row->cumulative.push_back(acc += c);
      }
      const std::uint64_t key = static_cast<std::uint64_t>(std::max(a, b)) * basis_->size() + std::min(a, b);
      std::unique_lock lock(mutex_);
      if (rows_.try_emplace(key, std::move(row)).second) ++taken;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "coefficient cache " + file.string() + ": " + e.what());
  }
  return taken;
}

void Hypergroup::save(const std::filesystem::path& file) const {
  nlohmann::json j;
  j["signature"] = signature();
  auto& rows = j["rows"] = nlohmann::json::array();
  std::shared_lock lock(mutex_);
  std::vector<std::uint64_t> keys;
  keys.reserve(rows_.size());
  for (const auto& [k, r] : rows_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const std::uint64_t key : keys) {
    const LinearizationRow& r = *rows_.at(key);
    const std::size_t a = key / basis_->size();
    const std::size_t b = key % basis_->size();
    nlohmann::json item;
    item["lambda"] = to_string(weight(a));
    item["mu"] = to_string(weight(b));
    auto& tau = item["tau"] = nlohmann::json::array();
    for (std::size_t t : r.support) tau.push_back(to_string(weight(t)));
    item["c"] = r.coeffs;
    item["raw_sum"] = r.raw_sum;
    item["most_negative"] = r.most_negative;
    item["most_negative_tau"] = to_string(weight(r.most_negative_tau));
    item["outside_support"] = r.outside_support;
    item["flagged"] = r.flagged;
    rows.push_back(std::move(item));
  }
  lock.unlock();
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << j.dump();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot move cache into place: " + ec.message());
}

// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<Hypergroup> for_grid(const ModelParams& params, const QuadratureGrid& grid, int degree) {
  if (grid.rank() != params.q()) throw Error(ErrorCode::RankMismatch, "grid rank differs from q");
  return Hypergroup::shared(params, degree, grid.nodes_per_axis());
}

}  // namespace

WeightMeasure linearize(const Weight& lambda, const Weight& mu, const ModelParams& params,
                        const QuadratureGrid& grid) {
  return for_grid(params, grid, lambda.first() + mu.first())->product(lambda, mu);
}

WeightMeasure convolve(const WeightMeasure& a, const WeightMeasure& b, const ModelParams& params,
                       const QuadratureGrid& grid) {
  if (a.empty() || b.empty()) return {};
  return for_grid(params, grid, a.max_first() + b.max_first())->convolve(a, b);
}

double haar_weight(const Weight& lambda, const ModelParams& params, const QuadratureGrid& grid) {
  return for_grid(params, grid, lambda.first())->haar_weight(lambda);
}

double modified_variance(const WeightMeasure& nu, const ModelParams& params,
                         const QuadratureGrid& grid) {
  if (nu.empty()) return 0.0;
  return for_grid(params, grid, nu.max_first())->modified_variance(nu);
}

double fourier_transform(const WeightMeasure& nu, const ChamberPoint& x, const ModelParams& params,
                         const QuadratureGrid& grid) {
  if (nu.empty()) return 0.0;
  if (x.rank() != params.q()) throw Error(ErrorCode::RankMismatch, "point rank differs from q");
  return for_grid(params, grid, nu.max_first())->fourier(nu, x.coords);
}

AdmissibilityReport check_admissible(const WeightMeasure& nu, const ModelParams& params,
                                     const QuadratureGrid& grid, int degree_cap) {
  AdmissibilityReport report;
  report.degree_cap = degree_cap;
  if (nu.empty()) return report;
  const auto hg = for_grid(params, grid, nu.max_first() + degree_cap);
  const auto partners = enumerate_weights(params.q(), degree_cap);
  for (const auto& [lambda, mass] : nu) {
    for (const Weight& mu : partners) {
      const LinearizationRow& r = hg->row(lambda, mu);
      ++report.rows_scanned;
      if (r.most_negative < report.most_negative) {
        report.most_negative = r.most_negative;
        report.lambda = lambda;
        report.mu = mu;
        report.tau = hg->weight(r.most_negative_tau);
      }
    }
  }
  report.admissible_up_to_cap = report.most_negative > -kNegativeTolerance;
  return report;
}

}  // namespace grasswalk
