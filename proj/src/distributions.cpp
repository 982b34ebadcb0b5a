#include "lpp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lpp/quadrature.hpp"

namespace lpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTruncatedMomentTol = 1e-10;
constexpr double kDegenerateTail = 1e-12;

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

WeightDistribution::WeightDistribution(DistKind kind, double a, double b)
    : kind_(kind), a_(a), b_(b) {}

WeightDistribution WeightDistribution::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  return {DistKind::exponential, rate, 0.0};
}

WeightDistribution WeightDistribution::geometric(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("geometric: p must be in (0,1)");
  return {DistKind::geometric, p, 0.0};
}

WeightDistribution WeightDistribution::pareto(double gamma) {
  if (!(gamma > 2.0))
    throw std::invalid_argument("pareto: gamma must be > 2 (finite variance)");
  return {DistKind::pareto, gamma, 0.0};
}

WeightDistribution WeightDistribution::stretched_exponential(double beta,
                                                             double beta_bar) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("stretched: beta must be in (0,1]");
  if (!(beta_bar > 0.0))
    throw std::invalid_argument("stretched: beta_bar must be > 0");
  return {DistKind::stretched_exponential, beta, beta_bar};
}

WeightDistribution WeightDistribution::uniform01() {
  return {DistKind::uniform01, 0.0, 0.0};
}

WeightDistribution WeightDistribution::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw std::invalid_argument("constant: value must be finite and >= 0");
  return {DistKind::constant, value, 0.0};
}

WeightDistribution WeightDistribution::parse(std::string_view spec) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in{std::string(spec)};
  while (std::getline(in, token, ':')) parts.push_back(token);
  if (parts.empty()) throw std::invalid_argument("empty distribution spec");

  auto num = [&](size_t i) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(parts.at(i), &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number in distribution spec: " +
                                  std::string(spec));
    }
    if (pos != parts[i].size())
      throw std::invalid_argument("bad number in distribution spec: " +
                                  std::string(spec));
    return v;
  };
  auto arity = [&](size_t want) {
    if (parts.size() != want)
      throw std::invalid_argument("wrong parameter count in spec: " +
                                  std::string(spec));
  };

  const std::string& name = parts[0];
  if (name == "exp") {
    arity(2);
    return exponential(num(1));
  }
  if (name == "geom") {
    arity(2);
    return geometric(num(1));
  }
  if (name == "pareto") {
    arity(2);
    return pareto(num(1));
  }
  if (name == "stretched") {
    arity(3);
    return stretched_exponential(num(1), num(2));
  }
  if (name == "unif01") {
    arity(1);
    return uniform01();
  }
  if (name == "const") {
    arity(2);
    return constant(num(1));
  }
  throw std::invalid_argument("unknown distribution: " + std::string(spec));
}

std::string WeightDistribution::spec() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case DistKind::exponential: out << "exp:" << a_; break;
    case DistKind::geometric: out << "geom:" << a_; break;
    case DistKind::pareto: out << "pareto:" << a_; break;
    case DistKind::stretched_exponential:
      out << "stretched:" << a_ << ":" << b_;
      break;
    case DistKind::uniform01: out << "unif01"; break;
    case DistKind::constant: out << "const:" << a_; break;
  }
  return out.str();
}

bool WeightDistribution::integer_valued() const {
  if (kind_ == DistKind::geometric) return true;
  if (kind_ == DistKind::constant) return a_ == std::floor(a_);
  return false;
}

bool WeightDistribution::continuous() const {
  return kind_ != DistKind::geometric && kind_ != DistKind::constant;
}

double WeightDistribution::support_sup() const {
  switch (kind_) {
    case DistKind::uniform01: return 1.0;
    case DistKind::constant: return a_;
    default: return kInf;
  }
}

double WeightDistribution::sample(rng::Stream& stream) const {
  switch (kind_) {
    case DistKind::exponential:
      return -std::log(stream.next_u01()) / a_;
    case DistKind::geometric: {
      // Inversion: smallest j >= 1 with P(X > j) <= u.
      const double u = stream.next_u01();
      const double j = std::ceil(std::log(u) / std::log1p(-a_));
      return std::max(1.0, j);
    }
    case DistKind::pareto:
      return std::pow(stream.next_u01(), -1.0 / a_);
    case DistKind::stretched_exponential:
      return std::pow(-std::log(stream.next_u01()) / b_, 1.0 / a_);
    case DistKind::uniform01:
      return stream.next_u01();
    case DistKind::constant:
      return a_;
  }
  return kNaN;
}

double WeightDistribution::cdf(double x) const {
  switch (kind_) {
    case DistKind::exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-a_ * x);
    case DistKind::geometric:
      return x < 1.0 ? 0.0 : 1.0 - std::pow(1.0 - a_, std::floor(x));
    case DistKind::pareto:
      return x < 1.0 ? 0.0 : 1.0 - std::pow(x, -a_);
    case DistKind::stretched_exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-b_ * std::pow(x, a_));
    case DistKind::uniform01:
      return std::clamp(x, 0.0, 1.0);
    case DistKind::constant:
      return x < a_ ? 0.0 : 1.0;
  }
  return kNaN;
}

double WeightDistribution::survival(double x) const {
  switch (kind_) {
    case DistKind::exponential:
      return x <= 0.0 ? 1.0 : std::exp(-a_ * x);
    case DistKind::geometric:
      return x < 1.0 ? 1.0 : std::pow(1.0 - a_, std::floor(x));
    case DistKind::pareto:
      return x < 1.0 ? 1.0 : std::pow(x, -a_);
    case DistKind::stretched_exponential:
      return x <= 0.0 ? 1.0 : std::exp(-b_ * std::pow(x, a_));
    case DistKind::uniform01:
      return 1.0 - std::clamp(x, 0.0, 1.0);
    case DistKind::constant:
      return x < a_ ? 1.0 : 0.0;
  }
  return kNaN;
}

double WeightDistribution::mean() const {
  switch (kind_) {
    case DistKind::exponential: return 1.0 / a_;
    case DistKind::geometric: return 1.0 / a_;
    case DistKind::pareto: return a_ / (a_ - 1.0);
    case DistKind::stretched_exponential: return truncated_mean(0.0);
    case DistKind::uniform01: return 0.5;
    case DistKind::constant: return a_;
  }
  return kNaN;
}

double WeightDistribution::variance() const {
  switch (kind_) {
    case DistKind::exponential: return 1.0 / (a_ * a_);
    case DistKind::geometric: return (1.0 - a_) / (a_ * a_);
    case DistKind::pareto: {
      const double m = mean();
      return a_ / (a_ - 2.0) - m * m;
    }
    case DistKind::stretched_exponential: {
      const double m = truncated_mean(0.0);
      return truncated_cross_moment(0.0, 0.0) - m * m;
    }
    case DistKind::uniform01: return 1.0 / 12.0;
    case DistKind::constant: return 0.0;
  }
  return kNaN;
}

namespace {
// Rough location scale per law, closed forms only (no quadrature), used to
// size the initial tail-integration window.
double scale_hint(DistKind kind, double a, double b) {
  switch (kind) {
    case DistKind::exponential: return 1.0 / a;
    case DistKind::geometric: return 1.0 / a;
    case DistKind::pareto: return a / (a - 1.0);
    case DistKind::stretched_exponential:
      return std::max(1.0, std::pow(1.0 / b, 1.0 / a)) * std::max(1.0, 1.0 / a);
    case DistKind::uniform01: return 1.0;
    case DistKind::constant: return std::max(1.0, a);
  }
  return 1.0;
}
}  // namespace

double WeightDistribution::truncated_mean(double k) const {
  if (!(k >= 0.0)) throw std::invalid_argument("truncated_mean: k must be >= 0");
  switch (kind_) {
    case DistKind::exponential:
      return std::exp(-a_ * k) / a_;
    case DistKind::geometric: {
      const double q = 1.0 - a_;
      const double m = std::floor(k);
      return std::pow(q, m) * (q / a_ + (m + 1.0 - k));
    }
    case DistKind::constant:
      return positive_part(a_ - k);
    default: {
      // E[(X-k)_+] = integral of the survival function over (k, inf).
      auto s = [this](double x) { return survival(x); };
      const double sup = support_sup();
      if (std::isfinite(sup)) {
        return k >= sup ? 0.0 : quad::integrate(s, k, sup, kTruncatedMomentTol);
      }
      return quad::integrate_to_infinity(
                 s, k, kTruncatedMomentTol,
                 std::max(1.0, scale_hint(kind_, a_, b_)))
          .value;
    }
  }
}

double WeightDistribution::truncated_cross_moment(double a, double b) const {
  if (!(a >= 0.0 && b >= 0.0))
    throw std::invalid_argument("truncated_cross_moment: a, b must be >= 0");
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  switch (kind_) {
    case DistKind::exponential:
      return std::exp(-a_ * hi) * ((hi - lo) / a_ + 2.0 / (a_ * a_));
    case DistKind::geometric: {
      const double q = 1.0 - a_;
      const double m = std::floor(hi);
      const double A = m + 1.0 - lo;
      const double B = m + 1.0 - hi;
      const double ei = q / a_;
      const double ei2 = q * (1.0 + q) / (a_ * a_);
      return std::pow(q, m) * (ei2 + (A + B) * ei + A * B);
    }
    case DistKind::constant:
      return positive_part(a_ - lo) * positive_part(a_ - hi);
    default: {
      // With g(x) = (x-lo)(x-hi), g(hi) = 0:
      // E[g(X) 1{X>hi}] = integral of g'(x) * P(X>x) over (hi, inf).
      auto integrand = [this, lo, hi](double x) {
        return (2.0 * x - lo - hi) * survival(x);
      };
      const double sup = support_sup();
      if (std::isfinite(sup)) {
        return hi >= sup
                   ? 0.0
                   : quad::integrate(integrand, hi, sup, kTruncatedMomentTol);
      }
      return quad::integrate_to_infinity(
                 integrand, hi, kTruncatedMomentTol,
                 std::max(1.0, scale_hint(kind_, a_, b_) + hi))
          .value;
    }
  }
}

WeightDistribution::TailStats WeightDistribution::conditional_tail_stats(
    double k) const {
  if (!(k >= 0.0))
    throw std::invalid_argument("conditional_tail_stats: k must be >= 0");
  switch (kind_) {
    case DistKind::exponential:
      return {k + 1.0 / a_, 1.0 / (a_ * a_)};
    case DistKind::geometric:
      // X - floor(k) given X > k is again Geometric(p).
      return {std::floor(k) + 1.0 / a_, (1.0 - a_) / (a_ * a_)};
    case DistKind::pareto: {
      const double m0 = mean();
      const double v0 = variance();
      if (k <= 1.0) return {m0, v0};
      // X | X>k is distributed as k*X: scale the unconditional law.
      return {k * m0, k * k * v0};
    }
    case DistKind::uniform01: {
      if (survival(k) < kDegenerateTail)
        throw DegenerateTailError("uniform01: P(X>k) vanishes at k=" +
                                  std::to_string(k));
      const double w = 1.0 - k;
      return {k + 0.5 * w, w * w / 12.0};
    }
    case DistKind::constant: {
      if (k >= a_)
        throw DegenerateTailError("constant: P(X>k) vanishes at k=" +
                                  std::to_string(k));
      return {a_, 0.0};
    }
    case DistKind::stretched_exponential: {
      if (a_ == 1.0) return {k + 1.0 / b_, 1.0 / (b_ * b_)};
      // Normalized tail: S(k+y)/S(k) = exp(-bb*((k+y)^beta - k^beta)) stays
      // O(1) near y=0 for every k, so no division by P(X>k) is needed.
      const double kb = std::pow(k, a_);
      auto ratio = [this, k, kb](double y) {
        return std::exp(-b_ * (std::pow(k + y, a_) - kb));
      };
      // Decay length of the normalized tail, ~ k^{1-beta}/(beta_bar*beta).
      const double scale =
          std::max(1.0, std::pow(std::max(k, 1.0), 1.0 - a_) / (b_ * a_));
      const double tol1 = 1e-9 * scale;
      const double m1 =
          quad::integrate_to_infinity(ratio, 0.0, tol1, scale).value;
      auto y_ratio = [&ratio](double y) { return 2.0 * y * ratio(y); };
      const double tol2 = 1e-9 * scale * scale;
      const double m2 =
          quad::integrate_to_infinity(y_ratio, 0.0, tol2, scale).value;
      return {k + m1, m2 - m1 * m1};
    }
  }
  return {kNaN, kNaN};
}

WeightDistribution::MomentCondition WeightDistribution::check_moment_condition(
    int d) const {
  if (d < 2) throw std::invalid_argument("check_moment_condition: d must be >= 2");
  switch (kind_) {
    case DistKind::geometric: {
      // Piecewise-constant integrand: sum of (q^j)^{1/d} * ((j+1)^2 - j^2).
      const double r = std::pow(1.0 - a_, 1.0 / d);
      double total = 0.0;
      double term = 1.0;  // r^j at j=0
      for (std::uint64_t j = 0; j < 100000; ++j) {
        const double piece = term * (2.0 * static_cast<double>(j) + 1.0);
        total += piece;
        if (piece < 1e-14 * total) break;
        term *= r;
      }
      return {total, true};
    }
    case DistKind::constant:
      return {a_ * a_, true};
    default: {
      // Substituting u = sqrt(x) removes the root cusp at the origin:
      // integral of (1-F(sqrt(x)))^{1/d} dx = integral of 2u (1-F(u))^{1/d} du.
      const double inv_d = 1.0 / d;
      auto integrand = [this, inv_d](double u) {
        return 2.0 * u * std::pow(survival(u), inv_d);
      };
      const double sup = support_sup();
      if (std::isfinite(sup)) {
        return {quad::integrate(integrand, 0.0, sup, 1e-10), true};
      }
      const auto tail = quad::integrate_to_infinity(integrand, 0.0, 1e-9);
      return {tail.value, tail.converged};
    }
  }
}

WeightDistribution::VarianceFloor WeightDistribution::conditional_variance_floor(
    std::span<const double> k_grid) const {
  VarianceFloor out;
  out.floor = kInf;
  out.worst_k = 0.0;
  out.satisfied = true;

  std::vector<double> ks(k_grid.begin(), k_grid.end());
  const double sup = support_sup();
  if (std::isfinite(sup)) {
    // The conditional variance collapses approaching the support edge.
    for (double frac : {0.9, 0.99, 0.999}) ks.push_back(frac * sup);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  for (double k : ks) {
    out.k_values.push_back(k);
    double var = kNaN;
    try {
      var = conditional_tail_stats(k).variance;
    } catch (const DegenerateTailError&) {
      out.satisfied = false;
      out.variances.push_back(kNaN);
      if (!(out.floor <= 0.0)) {
        out.floor = 0.0;
        out.worst_k = k;
      }
      continue;
    }
    out.variances.push_back(var);
    if (var < out.floor) {
      out.floor = var;
      out.worst_k = k;
    }
  }
  if (!(out.floor >= kFloorThreshold)) out.satisfied = false;
  return out;
}

WeightDistribution::VarianceFloor WeightDistribution::conditional_variance_floor()
    const {
  static constexpr double kDefaultGrid[] = {0.0, 1.0, 2.0, 5.0, 10.0, 50.0};
  return conditional_variance_floor(kDefaultGrid);
}

}  // namespace lpp
