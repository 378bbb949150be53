#include "rvit/lens.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace rvit {

namespace {
constexpr double kHalfPi = kPi / 2.0;
constexpr int kMonotoneSamples = 1000;
}  // namespace

std::string to_string(LensFamily f) {
  switch (f) {
    case LensFamily::Perspective: return "perspective";
    case LensFamily::Polynomial: return "polynomial";
    case LensFamily::Spherical: return "spherical";
  }
  return "?";
}

LensFamily lens_family_from_string(const std::string& s) {
  if (s == "perspective") return LensFamily::Perspective;
  if (s == "polynomial") return LensFamily::Polynomial;
  if (s == "spherical") return LensFamily::Spherical;
  fail_contract("unknown lens family: " + s);
}

LensProjection::LensProjection(LensFamily family, double f, double xi,
                               std::vector<double> coeffs, double theta_max)
    : family_(family), f_(f), xi_(xi), coeffs_(std::move(coeffs)),
      theta_max_(theta_max) {
  validate();
}

LensProjection LensProjection::perspective(double f, double theta_max) {
  return LensProjection(LensFamily::Perspective, f, 0.0, {}, theta_max);
}

LensProjection LensProjection::polynomial(std::vector<double> coeffs,
                                          double theta_max) {
  return LensProjection(LensFamily::Polynomial, 1.0, 0.0, std::move(coeffs),
                        theta_max);
}

LensProjection LensProjection::spherical(double f, double xi, double theta_max) {
  return LensProjection(LensFamily::Spherical, f, xi, {}, theta_max);
}

void LensProjection::validate() const {
  require(theta_max_ > 0.0 && theta_max_ <= kHalfPi,
          "lens: theta_max must lie in (0, pi/2]");
  require(std::isfinite(f_) && f_ > 0.0, "lens: focal scale must be positive");
  switch (family_) {
    case LensFamily::Perspective:
      require(theta_max_ < kHalfPi,
              "lens: perspective theta_max must be < pi/2 (tan singularity)");
      break;
    case LensFamily::Spherical:
      require(xi_ >= 0.0 && xi_ <= 1.0, "lens: xi must lie in [0, 1]");
      break;
    case LensFamily::Polynomial:
      require(!coeffs_.empty(), "lens: polynomial needs at least one coefficient");
      break;
  }
  // strict monotonicity, checked by sampling
  double prev = project_raw(0.0);
  require(prev == 0.0, "lens: P(0) must be 0");
  for (int i = 1; i <= kMonotoneSamples; ++i) {
    double theta = theta_max_ * double(i) / kMonotoneSamples;
    double r = project_raw(theta);
    require(std::isfinite(r) && r > prev,
            "lens: projection curve must be strictly increasing on [0, theta_max]");
    prev = r;
  }
}

double LensProjection::project_raw(double theta) const {
  switch (family_) {
    case LensFamily::Perspective:
      return f_ * std::tan(theta);
    case LensFamily::Polynomial: {
      // Horner over a1..an, no constant term
      double acc = 0.0;
      for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * theta + coeffs_[i];
      return acc * theta;
    }
    case LensFamily::Spherical:
      return f_ * std::sin(theta) / (xi_ + std::cos(theta));
  }
  return 0.0;
}

double LensProjection::project(double theta) const {
  require_domain(theta >= 0.0,
                 "project: theta below lower bound 0");
  require_domain(theta <= theta_max_,
                 "project: theta above upper bound theta_max");
  return project_raw(theta);
}

double LensProjection::unproject(double r) const {
  double r_max = project_raw(theta_max_);
  require_domain(r >= 0.0, "unproject: r below lower bound 0");
  require_domain(r <= r_max, "unproject: r above upper bound P(theta_max)");
  if (r == 0.0) return 0.0;
  if (r == r_max) return theta_max_;
  double lo = 0.0, hi = theta_max_;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    (project_raw(mid) < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> LensProjection::project_point(const WorldPoint& p) const {
  double rho = std::hypot(p.x, p.y);
  require(rho > 0.0 || p.z != 0.0, "project_point: zero-norm point");
  require_domain(p.z > 0.0, "project_point: point behind camera");
  double theta = std::atan2(rho, p.z);
  require_domain(theta <= theta_max_, "project_point: point outside field of view");
  if (rho == 0.0) return {0.0, 0.0};
  double r = project_raw(theta);
  double phi = std::atan2(p.y, p.x);
  return {r * std::cos(phi), r * std::sin(phi)};
}

LensProjection LensProjection::normalized() const {
  double scale = 1.0 / project_raw(theta_max_);
  LensProjection out = *this;
  if (family_ == LensFamily::Polynomial) {
    for (double& a : out.coeffs_) a *= scale;
  } else {
    out.f_ *= scale;
  }
  return out;
}

bool LensProjection::is_normalized(double tol) const {
  return std::abs(project_raw(theta_max_) - 1.0) <= tol;
}

bool LensProjection::operator==(const LensProjection& o) const {
  return family_ == o.family_ && f_ == o.f_ && xi_ == o.xi_ &&
         coeffs_ == o.coeffs_ && theta_max_ == o.theta_max_;
}

std::string LensProjection::to_json() const {
  nlohmann::ordered_json j;
  j["family"] = to_string(family_);
  switch (family_) {
    case LensFamily::Perspective:
      j["f"] = f_;
      break;
    case LensFamily::Polynomial:
      j["coeffs"] = coeffs_;
      break;
    case LensFamily::Spherical:
      j["f"] = f_;
      j["xi"] = xi_;
      break;
  }
  j["theta_max_deg"] = rad2deg(theta_max_);
  return j.dump();
}

LensProjection LensProjection::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail_contract(std::string("lens record: ") + e.what());
  }
  LensFamily family = lens_family_from_string(j.at("family").get<std::string>());
  double theta_max = deg2rad(j.at("theta_max_deg").get<double>());
  switch (family) {
    case LensFamily::Perspective:
      return perspective(j.at("f").get<double>(), theta_max);
    case LensFamily::Polynomial:
      return polynomial(j.at("coeffs").get<std::vector<double>>(), theta_max);
    case LensFamily::Spherical:
      return spherical(j.at("f").get<double>(), j.at("xi").get<double>(), theta_max);
  }
  fail_contract("lens record: bad family");
}

}  // namespace rvit
