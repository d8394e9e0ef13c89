#pragma once

#include <vector>

#include "bitekit/fe.hpp"

namespace bitekit {

enum class TrendAccumulation { PerPeriodLinear };

struct SensitivitySpec {
    std::vector<double> mbar_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    double alpha = 0.05;
    int target_year = 2019;  // post-period coefficient under scrutiny
    TrendAccumulation accumulation = TrendAccumulation::PerPeriodLinear;

    void validate() const;
};

// Conventional interval widened by the trend-violation bias bound
// B = mbar * maxpre * h, where maxpre is the largest absolute pre-period
// coefficient and h the horizon from the reference year.
struct RobustInterval {
    double mbar = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double bias_bound = 0.0;
};

struct BreakdownPoint {
    double mbar_star = 0.0;
    bool unbounded = false;  // no finite mbar brings zero into the interval
};

// Pieces shared by the sensitivity operations: target estimate and SE,
// maximum observed pre-trend, and the horizon.
struct SensitivityContext {
    double estimate = 0.0;
    double se = 0.0;
    double maxpre = 0.0;
    double horizon = 1.0;
    double z = 0.0;  // normal critical value at 1 - alpha/2
};

SensitivityContext sensitivity_context(const FixedEffectsFit& fit, const SensitivitySpec& spec);

RobustInterval robust_interval(const FixedEffectsFit& fit, const SensitivitySpec& spec,
                               double mbar);

// One interval per grid point, in grid order.
std::vector<RobustInterval> sensitivity_curve(const FixedEffectsFit& fit,
                                              const SensitivitySpec& spec);

// Closed form: mbar* = max(0, (|estimate| - z se) / (maxpre h)); zero when
// the conventional interval already contains zero, unbounded when there is
// no observed pre-trend to scale against.
BreakdownPoint breakdown_mbar(const FixedEffectsFit& fit, const SensitivitySpec& spec);

}  // namespace bitekit
