#include "drrl/stats.hpp"

#include <cmath>

namespace drrl {

Summary summarize(std::span<const double> xs) {
    Summary s;
    s.n = static_cast<int>(xs.size());
    if (xs.empty()) return s;
    double total = 0.0;
    for (double x : xs) total += x;
    s.mean = total / s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / (s.n - 1));
    }
    const double half = 1.96 * s.sd / std::sqrt(static_cast<double>(s.n));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    return s;
}

} // namespace drrl
