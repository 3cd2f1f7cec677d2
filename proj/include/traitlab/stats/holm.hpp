#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "traitlab/util/errors.hpp"

namespace traitlab::stats {

// Holm step-down adjustment. Sort ascending, adjusted_(i) is the running
// maximum of min(1, (m-j+1) * p_(j)) over j <= i, returned in input order.
inline std::vector<double> holm_adjust(const std::vector<double>& p) {
  const std::size_t m = p.size();
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0))
      throw validation_error("holm_adjust: p-values must lie in [0,1]");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&p](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  std::vector<double> adjusted(m, 0.0);
  double running_max = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double scaled =
        std::min(1.0, static_cast<double>(m - rank) * p[order[rank]]);
    running_max = std::max(running_max, scaled);
    adjusted[order[rank]] = running_max;
  }
  return adjusted;
}

} // namespace traitlab::stats
