#include "bitekit/dist.hpp"

#include <cmath>

namespace bitekit {

double grouped_mean(const GroupedDistribution& g) {
    double total_employees = g.total_employees();
    if (!(total_employees > 0.0))
        raise(ErrorCode::EmptyDistribution, "grouped_mean: no employees in region " + g.region);
    return g.total_wage_mass() / total_employees;
}

EffectiveBite effective_bite(const GroupedDistribution& g, double smi) {
    double total = g.total_employees();
    if (!(total > 0.0))
        raise(ErrorCode::EmptyDistribution, "effective_bite: no employees in region " + g.region);
    const auto& edges = g.scheme.lower_edges;
    EffectiveBite bite;
    if (smi < edges.front()) {
        bite.percentile = 0.0;
        bite.bracket_index = 0;
        bite.interpolation_fraction = 0.0;
        return bite;
    }
    if (smi >= g.scheme.upper_edge()) {
        bite.percentile = 100.0;
        bite.bracket_index = g.scheme.count() - 1;
        bite.interpolation_fraction = 1.0;
        return bite;
    }
    // Uniform grid: the containing bracket is a direct index computation.
    std::size_t k = static_cast<std::size_t>((smi - edges.front()) / g.scheme.width);
    if (k >= g.scheme.count()) k = g.scheme.count() - 1;
    while (k > 0 && smi < edges[k]) --k;
    while (k + 1 < g.scheme.count() && smi >= edges[k] + g.scheme.width) ++k;

    double below = 0.0;
    for (std::size_t j = 0; j < k; ++j) below += g.employees[j];
    double below_share = below / total;
    double in_share = g.employees[k] / total;
    double fraction = (smi - edges[k]) / g.scheme.width;
    bite.percentile = 100.0 * (below_share + fraction * in_share);
    bite.bracket_index = k;
    bite.interpolation_fraction = fraction;
    return bite;
}

double grouped_gini(const GroupedDistribution& g) {
    double total_employees = g.total_employees();
    if (!(total_employees > 0.0))
        raise(ErrorCode::EmptyDistribution, "grouped_gini: no employees in region " + g.region);
    double total_mass = g.total_wage_mass();
    if (!(total_mass > 0.0))
        raise(ErrorCode::ZeroWageMass, "grouped_gini: zero wage mass in region " + g.region);
    // Brackets are in edge order, and implied bracket means are in
    // nondecreasing income order by the bracket invariants, so the
    // cumulative shares trace the Lorenz curve directly.
    double gini = 1.0;
    double cum_emp = 0.0;
    double cum_mass = 0.0;
    for (std::size_t k = 0; k < g.scheme.count(); ++k) {
        if (g.employees[k] == 0.0) continue;
        double f_prev = cum_emp / total_employees;
        double phi_prev = cum_mass / total_mass;
        cum_emp += g.employees[k];
        cum_mass += g.wage_mass[k];
        double f = cum_emp / total_employees;
        double phi = cum_mass / total_mass;
        gini -= (f - f_prev) * (phi + phi_prev);
    }
    return gini;
}

KaitzRatio kaitz_ratio(double smi, double mean_wage) {
    if (!(mean_wage > 0.0))
        raise(ErrorCode::NonpositiveMeanWage, "kaitz_ratio: mean wage must be positive");
    return KaitzRatio{smi, mean_wage, smi / mean_wage};
}

}  // namespace bitekit
