#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rvit/common.hpp"

namespace rvit {

enum class LensFamily { Perspective, Polynomial, Spherical };

std::string to_string(LensFamily f);
LensFamily lens_family_from_string(const std::string& s);

struct WorldPoint {
  double x = 0, y = 0, z = 0;
};

// Radial projection curve r = P(theta) of a wide-angle lens, in normalized
// image coordinates (the image circle has radius P(theta_max); after
// normalized() it is the unit disk). Immutable after construction;
// construction rejects non-monotone curves.
class LensProjection {
 public:
  static LensProjection perspective(double f, double theta_max);
  static LensProjection polynomial(std::vector<double> coeffs, double theta_max);
  static LensProjection spherical(double f, double xi, double theta_max);

  LensFamily family() const { return family_; }
  double f() const { return f_; }
  double xi() const { return xi_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double theta_max() const { return theta_max_; }

  // incident angle -> normalized radius; theta in [0, theta_max]
  double project(double theta) const;

  // normalized radius -> incident angle, bisection on the monotone curve
  double unproject(double r) const;

  // 3D point -> normalized image coordinates (u, v)
  std::pair<double, double> project_point(const WorldPoint& p) const;

  // same curve rescaled so project(theta_max) == 1
  LensProjection normalized() const;
  bool is_normalized(double tol = 1e-9) const;

  double max_radius() const { return project_raw(theta_max_); }

  std::string to_json() const;
  static LensProjection from_json(const std::string& text);

  bool operator==(const LensProjection& o) const;

 private:
  LensProjection(LensFamily family, double f, double xi,
                 std::vector<double> coeffs, double theta_max);
  double project_raw(double theta) const;  // no domain check
  void validate() const;

  LensFamily family_;
  double f_;
  double xi_;
  std::vector<double> coeffs_;
  double theta_max_;
};

}  // namespace rvit
