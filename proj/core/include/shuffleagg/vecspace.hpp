#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "shuffleagg/rng.hpp"

namespace shuffleagg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A vector in the d-dimensional unit ball. Intermediate protocol values may
// sit anywhere in the ball; the sphere is the worst case everywhere.
class UnitVector {
 public:
  explicit UnitVector(Vec coords);

  int dim() const { return static_cast<int>(coords_.size()); }
  const Vec& coords() const { return coords_; }

  static UnitVector zero(int d);
  // Uniform on the unit sphere S^{d-1}.
  static UnitVector random_sphere(int d, Rng& rng);

 private:
  Vec coords_;
};

// Orthogonal d x d matrix regenerated from its seed (Haar-distributed).
struct Rotation {
  int d = 0;
  Mat matrix;
  std::uint64_t seed = 0;

  Vec apply(const Vec& v) const { return matrix * v; }
  Vec apply_inverse(const Vec& v) const { return matrix.transpose() * v; }

  static Rotation identity(int d);

  std::string to_json() const;
  static Rotation from_json(const std::string& text);
};

Rotation random_rotation(int d, std::uint64_t seed);

// Tight frame U in R^{2d x d} with U^T U = I_d. kashin_forward produces
// coefficients a with U^T a = v and ||a||_inf <= level/sqrt(d).
struct KashinFrame {
  int d = 0;
  Mat matrix;  // 2d x d
  double level = 0.0;
  std::uint64_t seed = 0;

  std::string to_json() const;
  static KashinFrame from_json(const std::string& text);
};

// Builds U = (1/sqrt(2)) [Q1; Q2] from two Haar d x d blocks, then checks on
// probe vectors that the coefficient iteration contracts; resamples the seed
// up to 8 times before giving up.
KashinFrame make_frame(int d, double level, std::uint64_t seed);

// Iterative residual clipping. Throws if the residual has not vanished after
// the iteration budget (degenerate frame; caller resamples the seed).
Vec kashin_forward(const KashinFrame& frame, const UnitVector& v);

// Plain U^T a.
Vec kashin_inverse(const KashinFrame& frame, const Vec& coefficients);

// min over S of the squared Euclidean distance to v.
double min_sq_dist(const Vec& v, const std::vector<Vec>& set);

}  // namespace shuffleagg
