#include "bitekit/honest.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace bitekit {

void SensitivitySpec::validate() const {
    if (mbar_grid.empty() || mbar_grid.front() != 0.0)
        raise(ErrorCode::InvalidSpec, "sensitivity grid must start at 0");
    for (std::size_t i = 0; i + 1 < mbar_grid.size(); ++i)
        if (mbar_grid[i + 1] < mbar_grid[i])
            raise(ErrorCode::InvalidSpec, "sensitivity grid must be nondecreasing");
    for (double m : mbar_grid)
        if (m < 0.0) raise(ErrorCode::InvalidSpec, "sensitivity grid must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0)) raise(ErrorCode::InvalidSpec, "alpha must be in (0,1)");
}

SensitivityContext sensitivity_context(const FixedEffectsFit& fit, const SensitivitySpec& spec) {
    spec.validate();
    const Coefficient* target = fit.find(CoefRole::TreatEvent, spec.target_year);
    if (target == nullptr)
        raise(ErrorCode::MissingTarget,
              "no event coefficient for target year " + std::to_string(spec.target_year));

    SensitivityContext ctx;
    ctx.estimate = target->estimate;
    ctx.se = target->se;
    bool any_pre = false;
    for (const auto& c : fit.coefficients) {
        if (c.role != CoefRole::TreatEvent || c.year >= fit.reference_year) continue;
        any_pre = true;
        ctx.maxpre = std::max(ctx.maxpre, std::abs(c.estimate));
    }
    if (!any_pre) raise(ErrorCode::NoPrePeriods, "fit has no pre-period coefficients");
    ctx.horizon = static_cast<double>(spec.target_year - fit.reference_year);
    boost::math::normal norm;
    ctx.z = boost::math::quantile(norm, 1.0 - spec.alpha / 2.0);
    return ctx;
}

RobustInterval robust_interval(const FixedEffectsFit& fit, const SensitivitySpec& spec,
                               double mbar) {
    SensitivityContext ctx = sensitivity_context(fit, spec);
    RobustInterval interval;
    interval.mbar = mbar;
    interval.bias_bound = mbar * ctx.maxpre * ctx.horizon;
    const double half_width = interval.bias_bound + ctx.z * ctx.se;
    interval.lower = ctx.estimate - half_width;
    interval.upper = ctx.estimate + half_width;
    return interval;
}

std::vector<RobustInterval> sensitivity_curve(const FixedEffectsFit& fit,
                                              const SensitivitySpec& spec) {
    std::vector<RobustInterval> curve;
    curve.reserve(spec.mbar_grid.size());
    for (double mbar : spec.mbar_grid) curve.push_back(robust_interval(fit, spec, mbar));
    return curve;
}

BreakdownPoint breakdown_mbar(const FixedEffectsFit& fit, const SensitivitySpec& spec) {
    SensitivityContext ctx = sensitivity_context(fit, spec);
    BreakdownPoint bp;
    const double excess = std::abs(ctx.estimate) - ctx.z * ctx.se;
    if (excess <= 0.0) {
        bp.mbar_star = 0.0;  // conventional interval already contains zero
        return bp;
    }
    if (ctx.maxpre == 0.0) {
        bp.unbounded = true;  // nothing to scale the violation against
        return bp;
    }
    bp.mbar_star = excess / (ctx.maxpre * ctx.horizon);
    return bp;
}

}  // namespace bitekit
