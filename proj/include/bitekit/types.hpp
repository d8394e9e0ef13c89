#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bitekit/errors.hpp"

namespace bitekit {

// ---------------------------------------------------------------------------
// Grouped wage distributions (Modelo-100 shape)
// ---------------------------------------------------------------------------

// Uniform income bracket grid. The census convention is 400 brackets of
// 200 euros covering [0, 80000).
struct BracketScheme {
    std::vector<double> lower_edges;
    double width = 0.0;

    std::size_t count() const { return lower_edges.size(); }
    double upper_edge() const { return lower_edges.back() + width; }
    double midpoint(std::size_t k) const { return lower_edges[k] + 0.5 * width; }

    // Edges must be strictly increasing and uniformly spaced by `width`.
    void validate() const;

    static BracketScheme uniform(double first_edge, double width, std::size_t count);

    // The census grid: 400 x 200 euros starting at 0.
    static BracketScheme census_default() { return uniform(0.0, 200.0, 400); }
};

// Employment counts and wage mass over a bracket grid for one region-year.
// Employee counts are reals: administrative tables report annualized
// person-weights, not headcounts.
struct GroupedDistribution {
    BracketScheme scheme;
    std::vector<double> employees;
    std::vector<double> wage_mass;
    std::string region;
    int year = 0;

    double total_employees() const;
    double total_wage_mass() const;

    // Implied within-bracket mean when employees > 0, midpoint otherwise.
    double representative_wage(std::size_t k) const;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Cell aggregates (Modelo-190 shape, after dimensionality reduction)
// ---------------------------------------------------------------------------

enum class AgeGroup { Young = 0, Adult = 1, Mature = 2 };

const char* age_group_name(AgeGroup g);
AgeGroup age_group_from_name(const std::string& name);

// One region x sector x age x year record. `sector` is the analytical
// 6-sector code; mean_wage == wage_bill / employees whenever employees > 0.
struct CellAggregate {
    std::string region;
    int sector = 0;  // 1..6
    AgeGroup age_group = AgeGroup::Young;
    int year = 0;
    double employees = 0.0;
    double wage_bill = 0.0;
    double mean_wage = 0.0;

    std::string unit_id() const;   // region x sector (estimation unit)
    std::string cell_id() const;   // region x sector x age (imputation unit)
};

std::string make_unit_id(const std::string& region, int sector);

// Modelo-390 shape after harmonization to the 6 analytical sectors.
struct FirmOutcomeRow {
    std::string region;
    int sector = 0;
    int year = 0;
    double sales = 0.0;
    double value_added = 0.0;
    double n_firms = 0.0;
};

// ---------------------------------------------------------------------------
// Deflation and dimension mapping
// ---------------------------------------------------------------------------

// CPI index by year, index[base_year] == 1. real = nominal / index.
struct Deflator {
    int base_year = 2019;
    std::map<int, double> index_by_year;

    void validate() const;
};

// Raw fiscal sector codes (10) -> analytical sectors (1..6) and raw age
// bands (7) -> 3 age groups. Must be total and surjective. region_map
// harmonizes raw region ids across the three sources (the distributional
// source carries one extra territory); identity when empty.
struct DimensionMapping {
    std::map<int, int> sector_map;
    std::map<int, AgeGroup> age_map;
    std::map<std::string, std::string> region_map;

    const std::string& harmonize_region(const std::string& raw) const {
        auto it = region_map.find(raw);
        return it == region_map.end() ? raw : it->second;
    }

    void validate() const;

    // Synthetic default documented in the README; the published
    // administrative mapping ships as a config file when available.
    static DimensionMapping builtin_default();
};

// ---------------------------------------------------------------------------
// Wage tiers
// ---------------------------------------------------------------------------

// Four wage bands partitioning [0, inf): T1 = [0, t1], T2 = (t1, t2],
// T3 = (t2, t3], T4 = (t3, inf). The "affected" set is T1 u T2.
struct TierScheme {
    std::array<double, 3> thresholds{};
    std::array<std::string, 4> labels{"T1", "T2", "T3", "T4"};

    void validate() const;
    int tier_of(double wage) const;  // 0..3

    // t1 = pre-reform wage floor, t2 = post-reform floor, t3 = 2x post floor.
    static TierScheme from_wage_floors(double floor_pre, double floor_post);
};

}  // namespace bitekit
