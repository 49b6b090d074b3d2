#include "stepwise/gridoracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "stepwise/error.hpp"
#include "stepwise/models.hpp"
#include "stepwise/normal.hpp"

namespace stepwise::grid {

namespace {

constexpr double kPmfTolerance = 1e-12;
constexpr double kTieTolerance = 1e-12;

void check_pmf(const std::vector<double>& pmf, std::size_t m, const char* name) {
  if (pmf.size() != m) throw InvalidArgument(std::string(name) + " has the wrong length");
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw InvalidArgument(std::string(name) + " has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPmfTolerance) {
    throw InvalidArgument(std::string(name) + " does not sum to 1");
  }
}

}  // namespace

GridModel GridModel::make(std::vector<double> null_pmf, std::vector<double> alt_pmf) {
  const std::size_t m = null_pmf.size();
  if (m < 1) throw InvalidArgument("grid size must be >= 1");
  check_pmf(null_pmf, m, "null_pmf");
  check_pmf(alt_pmf, m, "alt_pmf");
  double cdf_null = 0.0;
  double cdf_alt = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    cdf_null += null_pmf[i];
    cdf_alt += alt_pmf[i];
    if (cdf_alt > cdf_null + kPmfTolerance) {
      throw InvalidArgument("alt_pmf must stochastically dominate null_pmf");
    }
  }
  return {static_cast<int>(m), std::move(null_pmf), std::move(alt_pmf)};
}

GridModel GridModel::discretized_normal(int m, double shift, double lo, double hi) {
  if (m < 2) throw InvalidArgument("discretized_normal needs m >= 2");
  std::vector<double> cuts;
  for (int i = 1; i < m; ++i) cuts.push_back(m == 2 ? lo : lo + (hi - lo) * (i - 1) / (m - 2));
  auto pmf = [&](double theta) {
    std::vector<double> p(m);
    double prev = 0.0;
    for (int i = 0; i < m; ++i) {
      const double cur = i + 1 < m ? normal::cdf(cuts[i] - theta) : 1.0;
      p[i] = cur - prev;
      prev = cur;
    }
    return p;
  };
  return make(pmf(0.0), pmf(shift));
}

bool is_true_null(GridConfig c) { return c == GridConfig::Null || c == GridConfig::AltBottom; }

std::vector<double> point_mass(int m, int at) {
  if (at < 1 || at > m) throw InvalidArgument("point mass outside the grid");
  std::vector<double> p(m, 0.0);
  p[at - 1] = 1.0;
  return p;
}

namespace {

std::vector<double> config_pmf(const GridModel& model, GridConfig c) {
  switch (c) {
    case GridConfig::Null:
      return model.null_pmf;
    case GridConfig::Alt:
      return model.alt_pmf;
    case GridConfig::AltTop:
      return point_mass(model.m, model.m);
    case GridConfig::AltBottom:
      return point_mass(model.m, 1);
  }
  return {};
}

constexpr std::array<GridConfig, 4> kConfigs{GridConfig::Null, GridConfig::Alt,
                                             GridConfig::AltTop, GridConfig::AltBottom};

// P(label satisfies pred) with coordinates drawn from p1 x p2.
template <class Pred>
double rule_probability(const GridRule& rule, const std::vector<double>& p1,
                        const std::vector<double>& p2, Pred pred) {
  double total = 0.0;
  for (int x2 = 1; x2 <= rule.m; ++x2) {
    if (p2[x2 - 1] == 0.0) continue;
    double row = 0.0;
    for (int x1 = 1; x1 <= rule.m; ++x1) {
      if (pred(rule.at(x1, x2))) row += p1[x1 - 1];
    }
    total += row * p2[x2 - 1];
  }
  return total;
}

}  // namespace

GridRule to_grid_rule(const ThresholdRule& rule, int m) {
  for (int i = 0; i < 2; ++i) {
    if (rule.a[i] < 1 || rule.a[i] > m + 1 || rule.b[i] < 1 || rule.b[i] > rule.a[i]) {
      throw InvalidArgument("threshold rule needs 1 <= b_i <= a_i <= m + 1");
    }
  }
  GridRule out{m, std::vector<std::uint8_t>(static_cast<std::size_t>(m) * m, 0)};
  const auto& a = rule.a;
  const auto& b = rule.b;
  for (int x2 = 1; x2 <= m; ++x2) {
    for (int x1 = 1; x1 <= m; ++x1) {
      const bool accept_none = x1 < a[0] && x2 < a[1];
      std::uint8_t label = 0;
      if (x1 < b[0] && x2 >= a[1]) {
        label = 2;
      } else if (x1 >= a[0] && x2 < b[1]) {
        label = 1;
      } else if (x1 >= b[0] && x2 >= b[1] && !accept_none) {
        label = 3;
      }
      out.labels[(x1 - 1) + m * (x2 - 1)] = label;
    }
  }
  return out;
}

double exact_fwer_grid(const GridRule& rule, const GridModel& model,
                       std::array<GridConfig, 2> config) {
  if (rule.m != model.m) throw InvalidArgument("rule and model grid sizes differ");
  const bool t1 = is_true_null(config[0]);
  const bool t2 = is_true_null(config[1]);
  if (!t1 && !t2) return 0.0;
  const auto p1 = config_pmf(model, config[0]);
  const auto p2 = config_pmf(model, config[1]);
  return rule_probability(rule, p1, p2, [&](std::uint8_t label) {
    return ((label & 1) && t1) || ((label & 2) && t2);
  });
}

double exact_fwer_grid(const ThresholdRule& rule, const GridModel& model,
                       std::array<GridConfig, 2> config) {
  return exact_fwer_grid(to_grid_rule(rule, model.m), model, config);
}

double max_fwer_grid(const GridRule& rule, const GridModel& model) {
  double worst = 0.0;
  for (GridConfig c1 : kConfigs) {
    for (GridConfig c2 : kConfigs) worst = std::max(worst, exact_fwer_grid(rule, model, {c1, c2}));
  }
  return worst;
}

double criterion_value(const GridRule& rule, const GridModel& model, GridCriterion criterion) {
  const auto alt = model.alt_pmf;
  if (criterion == GridCriterion::A2) {
    return rule_probability(rule, alt, alt, [](std::uint8_t l) { return l == 3; });
  }
  const auto bottom = point_mass(model.m, 1);
  auto any = [](std::uint8_t l) { return l != 0; };
  return std::min(rule_probability(rule, alt, bottom, any),
                  rule_probability(rule, bottom, alt, any));
}

bool is_monotone_rule(const GridRule& rule) {
  const int m = rule.m;
  for (int x2 = 1; x2 <= m; ++x2) {
    for (int x1 = 1; x1 <= m; ++x1) {
      const std::uint8_t ix = rule.at(x1, x2);
      const std::array<int, 2> x{x1, x2};
      for (int y2 = 1; y2 <= m; ++y2) {
        for (int y1 = 1; y1 <= m; ++y1) {
          const std::array<int, 2> y{y1, y2};
          bool premise = true;
          for (int i = 0; i < 2 && premise; ++i) {
            premise = (ix >> i & 1) ? y[i] >= x[i] : y[i] < x[i];
          }
          if (premise && rule.at(y1, y2) != ix) return false;
        }
      }
    }
  }
  return true;
}

MaximinResult brute_force_maximin(const GridModel& model, double alpha, GridCriterion criterion,
                                  std::optional<std::array<int, 2>> fixed_a) {
  const int m = model.m;
  if (m > 12) throw InvalidArgument("brute_force_maximin supports m <= 12");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  MaximinResult result{{}, -1.0, 0};
  auto consider = [&](const ThresholdRule& rule) {
    const GridRule g = to_grid_rule(rule, m);
    if (max_fwer_grid(g, model) > alpha) return;
    ++result.feasible;
    const double v = criterion_value(g, model, criterion);
    if (v > result.value + kTieTolerance) {
      result.value = v;
      result.maximizers.clear();
    }
    if (v >= result.value - kTieTolerance) result.maximizers.push_back(rule);
  };
  for (int a1 = 1; a1 <= m + 1; ++a1) {
    for (int a2 = 1; a2 <= m + 1; ++a2) {
      if (fixed_a && (a1 != (*fixed_a)[0] || a2 != (*fixed_a)[1])) continue;
      for (int b1 = 1; b1 <= a1; ++b1) {
        for (int b2 = 1; b2 <= a2; ++b2) consider({{a1, a2}, {b1, b2}});
      }
    }
  }
  if (result.feasible == 0) throw InvalidArgument("no threshold rule controls the FWER at alpha");
  return result;
}

MonotoneSearchResult enumerate_monotone_rules(
    const GridModel& model, double alpha, GridCriterion criterion,
    const std::optional<std::vector<std::uint8_t>>& required_accept_none) {
  const int m = model.m;
  if (m > 3) throw InvalidArgument("full monotone-rule enumeration supports m <= 3");
  const int cells = m * m;
  if (required_accept_none && static_cast<int>(required_accept_none->size()) != cells) {
    throw InvalidArgument("accept-none mask has the wrong size");
  }
  std::size_t total = 1;
  for (int c = 0; c < cells; ++c) total *= 4;
  MonotoneSearchResult result{-1.0, {}, 0, 0};
  GridRule rule{m, std::vector<std::uint8_t>(cells)};
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (int c = 0; c < cells; ++c) {
      rule.labels[c] = static_cast<std::uint8_t>(rest & 3);
      rest >>= 2;
    }
    if (required_accept_none) {
      bool match = true;
      for (int c = 0; c < cells && match; ++c) {
        match = (rule.labels[c] == 0) == ((*required_accept_none)[c] != 0);
      }
      if (!match) continue;
    }
    if (!is_monotone_rule(rule)) continue;
    ++result.monotone_rules;
    if (max_fwer_grid(rule, model) > alpha) continue;
    ++result.feasible;
    const double v = criterion_value(rule, model, criterion);
    if (v > result.value + kTieTolerance) {
      result.value = v;
      result.maximizers.clear();
    }
    if (v >= result.value - kTieTolerance) result.maximizers.push_back(rule);
  }
  if (result.feasible == 0) throw InvalidArgument("no monotone rule controls the FWER at alpha");
  return result;
}

ThresholdRule discretized_continuous_rule(const GridModel& model, double alpha) {
  const int m = model.m;
  // Upper tails S(t) = P(X >= t), t = 1..m+1.
  auto tails = [m](const std::vector<double>& pmf) {
    std::vector<double> s(m + 2, 0.0);
    for (int t = m; t >= 1; --t) s[t] = s[t + 1] + pmf[t - 1];
    return s;
  };
  const auto s0 = tails(model.null_pmf);
  const auto s1 = tails(model.alt_pmf);
  int b = m + 1;
  while (b > 1 && s0[b - 1] <= alpha) --b;
  ThresholdRule best{{m + 1, m + 1}, {b, b}};
  double best_min = -1.0;
  double best_sum = -1.0;
  for (int a1 = 1; a1 <= m + 1; ++a1) {
    for (int a2 = 1; a2 <= m + 1; ++a2) {
      const double level = 1.0 - (1.0 - s0[a1]) * (1.0 - s0[a2]);
      if (level > alpha) continue;
      const double lo = std::min(s1[a1], s1[a2]);
      const double sum = s1[a1] + s1[a2];
      if (lo > best_min + kTieTolerance ||
          (std::abs(lo - best_min) <= kTieTolerance && sum > best_sum + kTieTolerance)) {
        best_min = lo;
        best_sum = sum;
        best.a = {a1, a2};
      }
    }
  }
  best.b = {std::min(b, best.a[0]), std::min(b, best.a[1])};
  return best;
}

// --- regions ----------------------------------------------------------------

namespace {

std::size_t cell_count(int m, int dims) {
  std::size_t n = 1;
  for (int d = 0; d < dims; ++d) n *= static_cast<std::size_t>(m);
  return n;
}

void decode(std::size_t index, int m, std::vector<int>& x) {
  for (int& xi : x) {
    xi = static_cast<int>(index % m) + 1;
    index /= m;
  }
}

std::size_t encode(std::span<const int> x, int m) {
  std::size_t index = 0;
  for (std::size_t i = x.size(); i-- > 0;) index = index * m + static_cast<std::size_t>(x[i] - 1);
  return index;
}

void check_axis(const GridRegion& region, int axis) {
  if (region.dims < 2) throw InvalidArgument("slicing needs at least 2 dimensions");
  if (axis < 0 || axis >= region.dims) throw InvalidArgument("slice axis out of range");
}

template <class Combine>
GridRegion fold_slices(const GridRegion& region, int axis, std::uint8_t init, Combine combine) {
  check_axis(region, axis);
  if (!is_monotone(region)) throw InvalidArgument("slice operators need a monotone region");
  GridRegion out{region.m, region.dims - 1,
                 std::vector<std::uint8_t>(cell_count(region.m, region.dims - 1), init)};
  std::vector<int> y(out.dims);
  std::vector<int> x(region.dims);
  for (std::size_t idx = 0; idx < out.cells.size(); ++idx) {
    decode(idx, out.m, y);
    for (int z = 1; z <= region.m; ++z) {
      for (int d = 0, s = 0; d < region.dims; ++d) x[d] = d == axis ? z : y[s++];
      out.cells[idx] = combine(out.cells[idx], region.cells[encode(x, region.m)]);
    }
  }
  return out;
}

}  // namespace

GridRegion GridRegion::full(int m, int dims) {
  return {m, dims, std::vector<std::uint8_t>(cell_count(m, dims), 1)};
}

GridRegion GridRegion::empty(int m, int dims) {
  return {m, dims, std::vector<std::uint8_t>(cell_count(m, dims), 0)};
}

bool GridRegion::contains(std::span<const int> x) const { return cells[encode(x, m)] != 0; }

bool is_monotone(const GridRegion& region) {
  std::vector<int> x(region.dims);
  for (std::size_t idx = 0; idx < region.cells.size(); ++idx) {
    if (!region.cells[idx]) continue;
    decode(idx, region.m, x);
    for (int d = 0; d < region.dims; ++d) {
      if (x[d] == region.m) continue;
      ++x[d];
      const bool up = region.cells[encode(x, region.m)] != 0;
      --x[d];
      if (!up) return false;
    }
  }
  return true;
}

GridRegion slice_union(const GridRegion& region, int axis) {
  return fold_slices(region, axis, 0, [](std::uint8_t acc, std::uint8_t v) -> std::uint8_t {
    return acc || v;
  });
}

GridRegion slice_intersection(const GridRegion& region, int axis) {
  return fold_slices(region, axis, 1, [](std::uint8_t acc, std::uint8_t v) -> std::uint8_t {
    return acc && v;
  });
}

GridRegion slice_at(const GridRegion& region, int axis, int z) {
  check_axis(region, axis);
  if (z < 1 || z > region.m) throw InvalidArgument("slice position outside the grid");
  GridRegion out = GridRegion::empty(region.m, region.dims - 1);
  std::vector<int> y(out.dims);
  std::vector<int> x(region.dims);
  for (std::size_t idx = 0; idx < out.cells.size(); ++idx) {
    decode(idx, out.m, y);
    for (int d = 0, s = 0; d < region.dims; ++d) x[d] = d == axis ? z : y[s++];
    out.cells[idx] = region.cells[encode(x, region.m)];
  }
  return out;
}

double region_probability(const GridRegion& region, std::span<const std::vector<double>> pmfs) {
  if (static_cast<int>(pmfs.size()) != region.dims) {
    throw InvalidArgument("need one pmf per region dimension");
  }
  double total = 0.0;
  std::vector<int> x(region.dims);
  for (std::size_t idx = 0; idx < region.cells.size(); ++idx) {
    if (!region.cells[idx]) continue;
    decode(idx, region.m, x);
    double p = 1.0;
    for (int d = 0; d < region.dims; ++d) p *= pmfs[d][x[d] - 1];
    total += p;
  }
  return total;
}

GridRegion random_monotone_region(int m, int dims, int orthants, std::uint64_t seed) {
  GridRegion out = GridRegion::empty(m, dims);
  SplitMix64 engine(seed);
  std::uniform_int_distribution<int> coord(1, m);
  std::vector<int> corner(dims);
  std::vector<int> x(dims);
  for (int o = 0; o < orthants; ++o) {
    for (int& c : corner) c = coord(engine);
    for (std::size_t idx = 0; idx < out.cells.size(); ++idx) {
      decode(idx, m, x);
      bool above = true;
      for (int d = 0; d < dims && above; ++d) above = x[d] >= corner[d];
      if (above) out.cells[idx] = 1;
    }
  }
  return out;
}

}  // namespace stepwise::grid
