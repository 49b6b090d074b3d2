#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stepwise {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Family { IidNormal, EquicorrNormal, IidUniformNull };

std::string_view family_name(Family family);
/// Accepts "iid-normal", "equicorr-normal", "iid-uniform".
Family parse_family(std::string_view name);

/// Joint law of (X_1, ..., X_k). For the normal families X_i = theta_i + base_i
/// where base is the theta = 0 law; EquicorrNormal uses the one-factor form
/// base_i = sqrt(rho) Z + sqrt(1 - rho) Z_i. IidUniformNull is U(0,1)^k and only
/// evaluates at theta = 0 (or at the +-inf limits).
class ModelSpec {
 public:
  static ModelSpec iid_normal(int k);
  static ModelSpec equicorr_normal(int k, double rho);
  static ModelSpec iid_uniform_null(int k);
  static ModelSpec make(Family family, int k, double rho = 0.0);

  int k() const noexcept { return k_; }
  Family family() const noexcept { return family_; }
  double rho() const noexcept { return rho_; }

  bool supports_shift() const noexcept { return family_ != Family::IidUniformNull; }
  /// True when coordinates are dependent (equicorrelated with rho > 0).
  bool has_common_factor() const noexcept {
    return family_ == Family::EquicorrNormal && rho_ > 0.0;
  }

  /// Same family and rho with a different dimension.
  ModelSpec with_k(int k) const { return make(family_, k, rho_); }

  std::string describe() const;

  bool operator==(const ModelSpec&) const = default;

 private:
  ModelSpec(Family family, int k, double rho) : family_(family), k_(k), rho_(rho) {}

  Family family_;
  int k_;
  double rho_;
};

/// Parameter vector over the extended reals; +-inf are exact limit sentinels.
class ThetaVector {
 public:
  ThetaVector() = default;
  explicit ThetaVector(std::vector<double> components);
  static ThetaVector constant(std::size_t k, double value);

  std::size_t size() const noexcept { return components_.size(); }
  double operator[](std::size_t i) const { return components_[i]; }
  std::span<const double> values() const noexcept { return components_; }

  std::string describe() const;

  bool operator==(const ThetaVector&) const = default;

 private:
  std::vector<double> components_;
};

/// reps x k draws, row-major. Sentinel columns hold +-inf.
struct SampleMatrix {
  std::size_t reps = 0;
  std::size_t k = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t i) const { return values[r * k + i]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * k, k}; }
};

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Independent substream for replicate r of a run seeded with seed.
SplitMix64 replicate_engine(std::uint64_t seed, std::uint64_t r);

// --- marginal law -----------------------------------------------------------

/// P(X_i <= x) when theta_i is the coordinate's parameter.
double marginal_cdf(const ModelSpec& model, double theta_i, double x);
/// P(X_i > x); kept separate from 1 - cdf for upper-tail accuracy.
double marginal_sf(const ModelSpec& model, double theta_i, double x);
/// x with marginal_cdf(model, theta_i, x) = p; p in (0,1), theta_i finite.
double marginal_quantile(const ModelSpec& model, double theta_i, double p);
/// x with marginal_sf(model, theta_i, x) = q; q in (0,1), theta_i finite.
double marginal_upper_quantile(const ModelSpec& model, double theta_i, double q);

// --- sampling ---------------------------------------------------------------

SampleMatrix sample(const ModelSpec& model, const ThetaVector& theta, std::size_t reps,
                    std::uint64_t seed);

/// Fills out (size k) with replicate r. Equivalent to row r of sample().
void sample_replicate(const ModelSpec& model, const ThetaVector& theta, std::uint64_t seed,
                      std::uint64_t r, std::span<double> out);

// --- joint probabilities ----------------------------------------------------

/// P(max(X_1..X_j) <= t) with j null coordinates.
double max_cdf_null(const ModelSpec& model, int j, double t);

/// P(X_i <= t_i for all i) under theta (sizes equal, at most k).
double lower_orthant(const ModelSpec& model, std::span<const double> theta,
                     std::span<const double> t);
/// P(X_i > t_i for all i) under theta.
double upper_orthant(const ModelSpec& model, std::span<const double> theta,
                     std::span<const double> t);

namespace detail {
/// Throws ModelError when theta_i is a finite nonzero shift on a model
/// without shift support.
void require_shift_support(const ModelSpec& model, double theta_i);
/// Conditional marginal given the common factor z (rho > 0 only).
double conditional_cdf(const ModelSpec& model, double theta_i, double x, double z);
double conditional_sf(const ModelSpec& model, double theta_i, double x, double z);
}  // namespace detail

}  // namespace stepwise
