#pragma once

#include <span>

namespace drrl {

struct Summary {
    double mean = 0.0;
    double sd = 0.0; ///< sample standard deviation (n - 1)
    double ci_low = 0.0;
    double ci_high = 0.0;
    int n = 0;
};

/// Mean with a normal-approximation 95% interval, mean +- 1.96 sd / sqrt(n).
Summary summarize(std::span<const double> xs);

} // namespace drrl
