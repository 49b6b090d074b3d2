#include "stepwise/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "stepwise/error.hpp"
#include "stepwise/normal.hpp"
#include "stepwise/quadrature.hpp"

namespace stepwise {

std::string_view family_name(Family family) {
  switch (family) {
    case Family::IidNormal:
      return "iid-normal";
    case Family::EquicorrNormal:
      return "equicorr-normal";
    case Family::IidUniformNull:
      return "iid-uniform";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "iid-normal") return Family::IidNormal;
  if (name == "equicorr-normal") return Family::EquicorrNormal;
  if (name == "iid-uniform") return Family::IidUniformNull;
  throw InvalidArgument("unknown model family '" + std::string(name) + "'");
}

ModelSpec ModelSpec::iid_normal(int k) { return make(Family::IidNormal, k); }

ModelSpec ModelSpec::equicorr_normal(int k, double rho) {
  return make(Family::EquicorrNormal, k, rho);
}

ModelSpec ModelSpec::iid_uniform_null(int k) { return make(Family::IidUniformNull, k); }

ModelSpec ModelSpec::make(Family family, int k, double rho) {
  if (k < 1) throw InvalidArgument("model dimension k must be >= 1");
  if (family == Family::EquicorrNormal) {
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in [0, 1)");
  } else {
    rho = 0.0;
  }
  return ModelSpec(family, k, rho);
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  os << family_name(family_) << "(k=" << k_;
  if (family_ == Family::EquicorrNormal) os << ", rho=" << rho_;
  os << ")";
  return os.str();
}

ThetaVector::ThetaVector(std::vector<double> components) : components_(std::move(components)) {
  for (double v : components_) {
    if (std::isnan(v)) throw InvalidArgument("theta components must not be NaN");
  }
}

ThetaVector ThetaVector::constant(std::size_t k, double value) {
  return ThetaVector(std::vector<double>(k, value));
}

std::string ThetaVector::describe() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) os << ", ";
    const double v = components_[i];
    if (v == kInf) {
      os << "inf";
    } else if (v == -kInf) {
      os << "-inf";
    } else {
      os << v;
    }
  }
  os << ")";
  return os.str();
}

SplitMix64 replicate_engine(std::uint64_t seed, std::uint64_t r) {
  // Two rounds of mixing decorrelate neighbouring (seed, r) pairs.
  SplitMix64 outer(seed);
  const std::uint64_t key = outer();
  SplitMix64 inner(key ^ (r * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  return SplitMix64(inner());
}

namespace detail {

void require_shift_support(const ModelSpec& model, double theta_i) {
  if (!model.supports_shift() && std::isfinite(theta_i) && theta_i != 0.0) {
    throw ModelError(model.describe() + " supports only theta = 0 (or the +-inf limits)");
  }
}

double conditional_cdf(const ModelSpec& model, double theta_i, double x, double z) {
  if (theta_i == -kInf) return 1.0;
  if (theta_i == kInf) return x == kInf ? 1.0 : 0.0;
  const double rho = model.rho();
  return normal::cdf((x - theta_i - std::sqrt(rho) * z) / std::sqrt(1.0 - rho));
}

double conditional_sf(const ModelSpec& model, double theta_i, double x, double z) {
  if (theta_i == -kInf) return 0.0;
  if (theta_i == kInf) return x == kInf ? 0.0 : 1.0;
  const double rho = model.rho();
  return normal::sf((x - theta_i - std::sqrt(rho) * z) / std::sqrt(1.0 - rho));
}

}  // namespace detail

double marginal_cdf(const ModelSpec& model, double theta_i, double x) {
  detail::require_shift_support(model, theta_i);
  if (std::isnan(x)) throw InvalidArgument("marginal_cdf: x is NaN");
  if (theta_i == -kInf) return 1.0;
  if (theta_i == kInf) return x == kInf ? 1.0 : 0.0;
  if (model.family() == Family::IidUniformNull) return std::clamp(x, 0.0, 1.0);
  return normal::cdf(x - theta_i);
}

double marginal_sf(const ModelSpec& model, double theta_i, double x) {
  detail::require_shift_support(model, theta_i);
  if (std::isnan(x)) throw InvalidArgument("marginal_sf: x is NaN");
  if (theta_i == -kInf) return 0.0;
  if (theta_i == kInf) return x == kInf ? 0.0 : 1.0;
  if (model.family() == Family::IidUniformNull) return 1.0 - std::clamp(x, 0.0, 1.0);
  return normal::sf(x - theta_i);
}

double marginal_quantile(const ModelSpec& model, double theta_i, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile probability must lie in (0, 1)");
  if (!std::isfinite(theta_i)) throw InvalidArgument("quantile needs a finite theta");
  detail::require_shift_support(model, theta_i);
  if (model.family() == Family::IidUniformNull) return p;
  return theta_i + normal::quantile(p);
}

double marginal_upper_quantile(const ModelSpec& model, double theta_i, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("quantile probability must lie in (0, 1)");
  if (!std::isfinite(theta_i)) throw InvalidArgument("quantile needs a finite theta");
  detail::require_shift_support(model, theta_i);
  if (model.family() == Family::IidUniformNull) return 1.0 - q;
  return theta_i + normal::upper_quantile(q);
}

void sample_replicate(const ModelSpec& model, const ThetaVector& theta, std::uint64_t seed,
                      std::uint64_t r, std::span<double> out) {
  const std::size_t k = theta.size();
  SplitMix64 engine = replicate_engine(seed, r);
  if (model.family() == Family::IidUniformNull) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
      out[i] = std::isinf(theta[i]) ? theta[i] : unif(engine);
    }
    return;
  }
  std::normal_distribution<double> gauss;
  double common = 0.0;
  double idio = 1.0;
  if (model.has_common_factor()) {
    common = std::sqrt(model.rho()) * gauss(engine);
    idio = std::sqrt(1.0 - model.rho());
  }
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = std::isinf(theta[i]) ? theta[i] : theta[i] + common + idio * gauss(engine);
  }
}

SampleMatrix sample(const ModelSpec& model, const ThetaVector& theta, std::size_t reps,
                    std::uint64_t seed) {
  if (reps < 1) throw InvalidArgument("sample: reps must be >= 1");
  if (theta.size() != static_cast<std::size_t>(model.k())) {
    throw InvalidArgument("sample: theta length differs from model k");
  }
  for (double t : theta.values()) detail::require_shift_support(model, t);
  SampleMatrix m;
  m.reps = reps;
  m.k = theta.size();
  m.values.resize(reps * m.k);
  for (std::size_t r = 0; r < reps; ++r) {
    sample_replicate(model, theta, seed, r, {m.values.data() + r * m.k, m.k});
  }
  return m;
}

double max_cdf_null(const ModelSpec& model, int j, double t) {
  if (j < 1 || j > model.k()) throw InvalidArgument("max_cdf_null: j out of range [1, k]");
  if (!model.has_common_factor()) return std::pow(marginal_cdf(model, 0.0, t), j);
  return quadrature::expect_normal(
      [&](double z) { return std::pow(detail::conditional_cdf(model, 0.0, t, z), j); });
}

namespace {

void check_orthant_args(const ModelSpec& model, std::span<const double> theta,
                        std::span<const double> t) {
  if (theta.size() != t.size() || theta.size() > static_cast<std::size_t>(model.k())) {
    throw InvalidArgument("orthant probability: size mismatch");
  }
  for (double th : theta) detail::require_shift_support(model, th);
}

}  // namespace

double lower_orthant(const ModelSpec& model, std::span<const double> theta,
                     std::span<const double> t) {
  check_orthant_args(model, theta, t);
  if (!model.has_common_factor()) {
    double p = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) p *= marginal_cdf(model, theta[i], t[i]);
    return p;
  }
  return quadrature::expect_normal([&](double z) {
    double p = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      p *= detail::conditional_cdf(model, theta[i], t[i], z);
    }
    return p;
  });
}

double upper_orthant(const ModelSpec& model, std::span<const double> theta,
                     std::span<const double> t) {
  check_orthant_args(model, theta, t);
  if (!model.has_common_factor()) {
    double p = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) p *= marginal_sf(model, theta[i], t[i]);
    return p;
  }
  return quadrature::expect_normal([&](double z) {
    double p = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      p *= detail::conditional_sf(model, theta[i], t[i], z);
    }
    return p;
  });
}

}  // namespace stepwise
