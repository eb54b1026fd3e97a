#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fmcf {

// Scalar profile of the radius with its derivative.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

enum class ForcingKind { constant, radial, toy_model };

// Forcing c(x) with gradient Dc(x).
class ForcingSpec {
 public:
  using PointFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

  static ForcingSpec constant(double c0) {
    if (!std::isfinite(c0)) throw std::invalid_argument("forcing constant must be finite");
    ForcingSpec f;
    f.kind_ = ForcingKind::constant;
    f.constant_ = c0;
    f.profile_ = std::make_shared<RadialProfile>(RadialProfile{
        [c0](double) { return c0; }, [](double) { return 0.0; }});
    return f;
  }

  // c(x) = profile(|x|).
  static ForcingSpec radial(RadialProfile profile, ForcingKind kind = ForcingKind::radial) {
    if (!profile.value || !profile.slope) throw std::invalid_argument("radial profile needs value and slope");
    ForcingSpec f;
    f.kind_ = kind;
    f.profile_ = std::make_shared<RadialProfile>(std::move(profile));
    return f;
  }

  // Piecewise-linear interpolation of samples (r_i, c_i), constant beyond the ends.
  static ForcingSpec radial_samples(std::vector<double> r, std::vector<double> c) {
    if (r.size() != c.size() || r.size() < 2) throw std::invalid_argument("radial samples need >= 2 matching points");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) throw std::invalid_argument("radial sample radii must increase");
    auto rs = std::make_shared<std::vector<double>>(std::move(r));
    auto cs = std::make_shared<std::vector<double>>(std::move(c));
    auto locate = [rs](double x) {
      auto it = std::upper_bound(rs->begin(), rs->end(), x);
      std::size_t j = std::clamp<std::size_t>(std::size_t(it - rs->begin()), 1, rs->size() - 1);
      return j - 1;
    };
    RadialProfile p;
    p.value = [rs, cs, locate](double x) {
      if (x <= rs->front()) return cs->front();
      if (x >= rs->back()) return cs->back();
      const std::size_t j = locate(x);
      const double t = (x - (*rs)[j]) / ((*rs)[j + 1] - (*rs)[j]);
      return (1.0 - t) * (*cs)[j] + t * (*cs)[j + 1];
    };
    p.slope = [rs, cs, locate](double x) {
      if (x < rs->front() || x > rs->back()) return 0.0;
      const std::size_t j = locate(x);
      return ((*cs)[j + 1] - (*cs)[j]) / ((*rs)[j + 1] - (*rs)[j]);
    };
    return radial(std::move(p));
  }

  // Arbitrary closed form.
  static ForcingSpec general(PointFn value, GradFn gradient) {
    ForcingSpec f;
    f.kind_ = ForcingKind::radial;
    f.value_ = std::move(value);
    f.gradient_ = std::move(gradient);
    return f;
  }

  ForcingKind kind() const { return kind_; }
  bool is_constant() const { return kind_ == ForcingKind::constant; }
  double constant_value() const { return constant_; }

  // Radial profile if c depends on |x| only, else nullptr.
  const RadialProfile* profile() const { return profile_.get(); }

  double operator()(std::span<const double> x) const {
    if (kind_ == ForcingKind::constant) return constant_;
    if (value_) return value_(x);
    return profile_->value(norm(x));
  }

  void gradient(std::span<const double> x, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (kind_ == ForcingKind::constant) return;
    if (gradient_) {
      gradient_(x, out);
      return;
    }
    const double r = norm(x);
    if (r == 0.0) return;
    const double s = profile_->slope(r) / r;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = s * x[i];
  }

  double gradient_norm(std::span<const double> x) const {
    std::vector<double> g(x.size());
    gradient(x, g);
    double s = 0.0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
  }

 private:
  static double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  }

  ForcingKind kind_ = ForcingKind::constant;
  double constant_ = 0.0;
  std::shared_ptr<RadialProfile> profile_;
  PointFn value_;
  GradFn gradient_;
};

}  // namespace fmcf
