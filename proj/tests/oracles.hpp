#pragma once

// Independent oracles for the test suites. Everything here recomputes the
// quantity under test by a different route (enumeration, brute force,
// textbook formula) and must stay decoupled from the library internals.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracles {

// Gini by explicit Lorenz-polyline area: build the (population share,
// income share) points, integrate trapezoids, G = 1 - 2 * area.
inline double lorenz_gini(std::vector<std::pair<double, double>> groups /* (count, mass) */) {
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        double wa = a.first > 0 ? a.second / a.first : 0.0;
        double wb = b.first > 0 ? b.second / b.first : 0.0;
        return wa < wb;
    });
    double total_n = 0.0, total_m = 0.0;
    for (const auto& [n, m] : groups) {
        total_n += n;
        total_m += m;
    }
    std::vector<std::pair<double, double>> points{{0.0, 0.0}};
    double cn = 0.0, cm = 0.0;
    for (const auto& [n, m] : groups) {
        if (n == 0.0) continue;
        cn += n;
        cm += m;
        points.push_back({cn / total_n, cm / total_m});
    }
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].first - points[i - 1].first) * (points[i].second + points[i - 1].second) / 2.0;
    return 1.0 - 2.0 * area;
}

// Best KL over the probability simplex grid with step `step`, restricted
// to grid points whose mean matches `target` within `band`. Enumerates
// the first (n-1) coordinates and solves the last two analytically per
// scan line, which visits exactly the same feasible set as a full scan.
// Returns +inf when no grid point is feasible.
inline double simplex_grid_best_kl(const std::vector<double>& w, const std::vector<double>& q,
                                   double target, double step, double band) {
    const int n = static_cast<int>(w.size());
    const int m = static_cast<int>(std::llround(1.0 / step));
    double best = std::numeric_limits<double>::infinity();

    auto kl_of = [&](const std::vector<int>& counts) {
        double kl = 0.0;
        for (int i = 0; i < n; ++i) {
            double p = counts[i] * step;
            if (p == 0.0) continue;
            if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
            kl += p * std::log(p / q[i]);
        }
        return kl;
    };
    auto mean_of = [&](const std::vector<int>& counts) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += counts[i] * step * w[i];
        return mean;
    };
    auto consider = [&](std::vector<int>& counts, int free_a, int free_b, int remaining) {
        // counts[free_a] + counts[free_b] = remaining; mean is affine in
        // counts[free_b], so only a couple of candidate values can land in
        // the band. Check them all by solving and probing the neighbors.
        double base = 0.0;
        for (int i = 0; i < n; ++i)
            if (i != free_a && i != free_b) base += counts[i] * step * w[i];
        base += remaining * step * w[free_a];
        double slope = step * (w[free_b] - w[free_a]);
        long long center = slope != 0.0 ? std::llround((target - base) / slope) : 0;
        for (long long j = center - 2; j <= center + 2; ++j) {
            if (j < 0 || j > remaining) continue;
            counts[free_b] = static_cast<int>(j);
            counts[free_a] = remaining - static_cast<int>(j);
            if (std::abs(mean_of(counts) - target) <= band) best = std::min(best, kl_of(counts));
        }
        counts[free_a] = counts[free_b] = 0;
    };

    std::vector<int> counts(n, 0);
    if (n == 1) {
        counts[0] = m;
        if (std::abs(mean_of(counts) - target) <= band) best = kl_of(counts);
    } else if (n == 2) {
        consider(counts, 0, 1, m);
    } else if (n == 3) {
        for (int i = 0; i <= m; ++i) {
            counts[0] = i;
            consider(counts, 1, 2, m - i);
            counts[0] = 0;
        }
    } else if (n == 4) {
        for (int i = 0; i <= m; ++i) {
            for (int j = 0; j <= m - i; ++j) {
                counts[0] = i;
                counts[1] = j;
                consider(counts, 2, 3, m - i - j);
                counts[0] = counts[1] = 0;
            }
        }
    }
    return best;
}

// Type-7 quantile by direct order statistics (sort-based reference).
inline double sorted_quantile(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    double h = (static_cast<double>(x.size()) - 1.0) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] * (1.0 - (h - lo)) + x[hi] * (h - lo);
}

}  // namespace oracles
