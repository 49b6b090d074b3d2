#include "stepwise/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "stepwise/normal.hpp"

namespace stepwise::quadrature {
namespace {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

using Panel = boost::math::quadrature::gauss<double, kPanelNodes>;

// Composite Gauss-Legendre on [-kHalfWidth, kHalfWidth] with n / 16 equal
// panels, weights multiplied by phi. The mass outside is below 1e-22.
Rule build_rule(int n) {
  const int panels = n / kPanelNodes;
  const double h = 2.0 * kHalfWidth / panels;
  // gauss<> stores the nonnegative half of the symmetric rule.
  const auto& abscissa = Panel::abscissa();
  const auto& weight = Panel::weights();
  Rule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  for (int p = 0; p < panels; ++p) {
    const double mid = -kHalfWidth + (p + 0.5) * h;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        if (abscissa[i] == 0.0 && sign > 0) continue;
        const double z = mid + sign * 0.5 * h * abscissa[i];
        rule.nodes.push_back(z);
        rule.weights.push_back(0.5 * h * weight[i] * normal::pdf(z));
      }
    }
  }
  return rule;
}

}  // namespace

NormalRule normal_rule(int n) {
  if (n < kPanelNodes || n > kMaxNodes || n % kPanelNodes != 0) {
    throw InvalidArgument("quadrature node count must be a multiple of 16 in [16, 4096]");
  }
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  // std::map nodes are stable, so the spans stay valid after unlocking.
  return {it->second.nodes, it->second.weights};
}

}  // namespace stepwise::quadrature
