#include "shuffleagg/vecspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace shuffleagg {

namespace {

constexpr double kNormSlack = 1e-12;
constexpr double kResidualTol = 1e-9;
constexpr int kForwardIters = 60;

Mat haar_orthogonal(int d, Rng& rng) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign correction: positive diagonal of R makes Q Haar-distributed.
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

UnitVector::UnitVector(Vec coords) : coords_(std::move(coords)) {
  if (coords_.size() < 1) throw std::invalid_argument("UnitVector: dimension must be >= 1");
  if (coords_.norm() > 1.0 + kNormSlack)
    throw std::invalid_argument("UnitVector: norm exceeds 1");
}

UnitVector UnitVector::zero(int d) { return UnitVector(Vec::Zero(d)); }

UnitVector UnitVector::random_sphere(int d, Rng& rng) {
  Vec g(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) g(i) = rng.normal();
    norm = g.norm();
  } while (norm < 1e-12);
  return UnitVector(g / norm);
}

Rotation Rotation::identity(int d) {
  return Rotation{d, Mat::Identity(d, d), 0};
}

Rotation random_rotation(int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("random_rotation: d must be >= 1");
  Rng rng(splitmix64(seed ^ 0x526f746174654eULL));
  return Rotation{d, haar_orthogonal(d, rng), seed};
}

std::string Rotation::to_json() const {
  nlohmann::json j{{"d", d}, {"seed", seed}};
  return j.dump();
}

Rotation Rotation::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return random_rotation(j.at("d").get<int>(), j.at("seed").get<std::uint64_t>());
}

namespace {

struct ForwardResult {
  Vec coefficients;
  bool converged = false;
};

ForwardResult forward_impl(const Mat& u, double level, const Vec& v) {
  const auto rows = u.rows();
  Vec a = Vec::Zero(rows);
  Vec r = v;
  const double lambda_scale = level / std::sqrt(static_cast<double>(rows));
  bool converged = false;
  for (int t = 0; t < kForwardIters; ++t) {
    if (r.norm() <= kResidualTol) {
      converged = true;
      break;
    }
    const double lambda = lambda_scale * r.norm();
    Vec c = u * r;
    for (Eigen::Index i = 0; i < rows; ++i)
      c(i) = std::clamp(c(i), -lambda, lambda);
    a += c;
    r = v - u.transpose() * a;
  }
  if (r.norm() <= kResidualTol) converged = true;
  // Fold the residual: U^T U = I makes U^T (a + U r) = v exactly, at the cost
  // of at most lambda on the sup norm.
  a += u * r;
  return {std::move(a), converged};
}

bool frame_contracts(const Mat& u, double level, int d, Rng& rng) {
  for (int probe = 0; probe < 32; ++probe) {
    Vec g(d);
    for (int i = 0; i < d; ++i) g(i) = rng.normal();
    if (g.norm() < 1e-9) return false;
    g /= g.norm();
    Vec a = Vec::Zero(u.rows());
    Vec r = g;
    const double lambda_scale = level / std::sqrt(static_cast<double>(u.rows()));
    for (int t = 0; t < kForwardIters && r.norm() > kResidualTol; ++t) {
      const double before = r.norm();
      const double lambda = lambda_scale * before;
      Vec c = u * r;
      for (Eigen::Index i = 0; i < u.rows(); ++i)
        c(i) = std::clamp(c(i), -lambda, lambda);
      a += c;
      r = g - u.transpose() * a;
      if (r.norm() > 0.9 * before) return false;
    }
    if (r.norm() > kResidualTol) return false;
  }
  return true;
}

}  // namespace

KashinFrame make_frame(int d, double level, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("make_frame: d must be >= 1");
  if (level <= 0.0) throw std::invalid_argument("make_frame: level must be positive");
  for (int attempt = 0; attempt < 8; ++attempt) {
    Rng rng(splitmix64(seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL));
    Mat u(2 * d, d);
    u.topRows(d) = haar_orthogonal(d, rng);
    u.bottomRows(d) = haar_orthogonal(d, rng);
    u *= 1.0 / std::sqrt(2.0);
    Rng probe_rng = rng.derive(0x70726f6265ULL);
    if (frame_contracts(u, level, d, probe_rng)) {
      return KashinFrame{d, std::move(u), level, seed};
    }
  }
  throw std::runtime_error("make_frame: contraction check failed after 8 seed retries");
}

Vec kashin_forward(const KashinFrame& frame, const UnitVector& v) {
  if (v.dim() != frame.d)
    throw std::invalid_argument("kashin_forward: dimension mismatch");
  auto res = forward_impl(frame.matrix, frame.level, v.coords());
  if (!res.converged)
    throw std::runtime_error("kashin_forward: residual did not converge; resample the frame seed");
  return std::move(res.coefficients);
}

Vec kashin_inverse(const KashinFrame& frame, const Vec& coefficients) {
  if (coefficients.size() != 2 * frame.d)
    throw std::invalid_argument("kashin_inverse: coefficient length must be 2d");
  return frame.matrix.transpose() * coefficients;
}

std::string KashinFrame::to_json() const {
  nlohmann::json j{{"d", d}, {"level", level}, {"seed", seed}};
  return j.dump();
}

KashinFrame KashinFrame::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return make_frame(j.at("d").get<int>(), j.at("level").get<double>(),
                    j.at("seed").get<std::uint64_t>());
}

double min_sq_dist(const Vec& v, const std::vector<Vec>& set) {
  if (set.empty()) throw std::invalid_argument("min_sq_dist: empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& u : set) {
    if (u.size() != v.size()) throw std::invalid_argument("min_sq_dist: dimension mismatch");
    best = std::min(best, (v - u).squaredNorm());
  }
  return best;
}

}  // namespace shuffleagg
