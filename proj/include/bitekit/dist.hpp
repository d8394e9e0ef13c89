#pragma once

#include "bitekit/types.hpp"

namespace bitekit {

// Percentile of the wage distribution at which an income level falls,
// linearly interpolated inside its bracket.
struct EffectiveBite {
    double percentile = 0.0;           // in [0, 100]
    std::size_t bracket_index = 0;
    double interpolation_fraction = 0.0;  // in [0, 1]
};

struct KaitzRatio {
    double smi = 0.0;        // annualized wage floor, real euros/year
    double mean_wage = 0.0;  // real euros/year
    double ratio = 0.0;
};

// Employment-weighted mean wage. EmptyDistribution when no employees.
double grouped_mean(const GroupedDistribution& g);

// Population percentile of `smi` under employment-count interpolation:
// 100 * [F(edge_below) + share_in_bracket * (smi - edge_below)/width].
// Below the first edge -> 0, at or above the top edge -> 100.
EffectiveBite effective_bite(const GroupedDistribution& g, double smi);

// Gini on grouped data via the trapezoid rule on the Lorenz curve,
// G = 1 - sum_k (F_k - F_{k-1})(Phi_k + Phi_{k-1}), with brackets in
// income order. Within-bracket wages use the implied mean wage_mass /
// employees (all information in the two arrays), so G is exact under
// within-bracket equality.
double grouped_gini(const GroupedDistribution& g);

KaitzRatio kaitz_ratio(double smi, double mean_wage);

}  // namespace bitekit
