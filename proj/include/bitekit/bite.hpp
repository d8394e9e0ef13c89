#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bitekit/tilt.hpp"
#include "bitekit/types.hpp"

namespace bitekit {

enum class BiteMeasure { Youth, Gap, Kaitz, Sectoral };

const char* bite_measure_name(BiteMeasure m);
BiteMeasure bite_measure_from_name(const std::string& name);

// The four treatment-intensity measures plus tourism dependence for one
// region x sector unit, all frozen at pre-reform data.
struct ExposureVector {
    std::string unit;
    std::string region;
    int sector = 0;
    double d_youth = 0.0;     // share of young workers in the affected tiers
    double d_gap = 0.0;       // wage-bill increase needed / total wage bill
    double d_kaitz = 0.0;     // wage floor / unit mean wage
    double d_sectoral = 0.0;  // share of all workers in the affected tiers
    double tourism = 0.0;     // standardized tourism dependence
    double tourism_raw = 0.0; // pre-standardization employment share

    double measure(BiteMeasure m) const;
};

// (young employees in T1 u T2) / (all young employees) of the unit.
double youth_incidence(const std::vector<ImputedCell>& young_cells_of_unit);

// sum over affected brackets of (floor_post - w_k) * young employees at
// w_k, over the unit's total wage bill (all ages). Wages enter in
// annualized real euros.
double monetary_gap(const std::vector<ImputedCell>& young_cells_of_unit,
                    const std::vector<double>& support_wages, const TierScheme& tiers,
                    double floor_post, double unit_total_wage_bill);

// floor_pre / unit mean wage (all ages).
double kaitz_index(double unit_mean_wage, double floor_pre);

// (all-age employees in T1 u T2) / total unit employees.
double sectoral_incidence(const std::vector<ImputedCell>& all_cells_of_unit);

// Region tourism shares assigned to units through the tourism-sector
// dummy, then standardized to mean zero and unit variance across units
// (sample variance). A degenerate cross-section standardizes to all
// zeros. Returns pairs (raw, standardized) in unit order.
struct TourismScore {
    double raw = 0.0;
    double standardized = 0.0;
};
std::vector<TourismScore> tourism_intensity(
    const std::vector<std::pair<std::string, int>>& units,  // (region, sector)
    const std::map<std::string, double>& region_shares, int tourism_sector);

// Builds the full exposure table for the pre-reform year from imputed
// cells; every input must already be deflated.
struct ExposureInputs {
    std::vector<ImputedCell> imputed;          // pre-reform year, all cells
    std::map<std::string, std::vector<double>> support_by_region;
    TierScheme tiers;
    double floor_pre = 0.0;   // annualized real wage floor, pre reform
    double floor_post = 0.0;  // post reform
    std::map<std::string, double> tourism_shares;
    int tourism_sector = 4;
};

std::vector<ExposureVector> build_exposures(const ExposureInputs& inputs);

// Moments, type-7 quantiles, CV, and the Pearson correlation matrix over
// the exposure cross-section. Undefined correlations (zero variance) are
// reported as NaN with the flag set, never fabricated.
struct MeasureDescriptives {
    std::string name;
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    double cv = 0.0;
    double min = 0.0;
    double p25 = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

struct ExposureDescriptives {
    std::vector<MeasureDescriptives> measures;
    std::vector<std::vector<double>> correlation;  // NaN where undefined
    bool has_undefined_correlations = false;
    int n_units = 0;
};

ExposureDescriptives exposure_descriptives(const std::vector<ExposureVector>& vectors);

// Type-7 quantile (linear interpolation between closest ranks) on a copy.
double quantile_type7(std::vector<double> values, double p);

}  // namespace bitekit
