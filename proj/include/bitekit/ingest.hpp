#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bitekit/types.hpp"

namespace bitekit {

// modelo100.csv: region,year,bracket_index,employees,wage_mass
// One distribution per (region, year). Rows with a bracket index outside
// the scheme, negative counts, or mass without employees are rejected
// with the offending row named.
std::vector<GroupedDistribution> load_grouped_distributions(const std::string& path,
                                                            const BracketScheme& scheme);

// modelo190.csv: region,sector_code,age_band,year,employees,wage_bill
// Raw 10-sector x 7-age rows are aggregated into 6 analytical sectors x
// 3 age groups (sums of employees and wage bill, mean wage recomputed).
std::vector<CellAggregate> load_cell_aggregates(const std::string& path,
                                                const DimensionMapping& mapping);

// modelo390.csv: region,sector_code,year,sales,value_added,n_firms
// harmonized to the analytical sectors.
std::vector<FirmOutcomeRow> load_firm_outcomes(const std::string& path,
                                               const DimensionMapping& mapping);

// cpi.csv: year,index
Deflator load_deflator(const std::string& path, int base_year);

// mapping.json: {"sector_map": {...}, "age_map": {...}, "region_map": {...}}
// region_map is optional (identity when absent) and harmonizes raw region
// ids across the three sources.
DimensionMapping load_mapping(const std::string& path);

double deflate(double nominal, int year, const Deflator& d);

// In-place deflation of monetary fields, mean wages recomputed.
void deflate_distributions(std::vector<GroupedDistribution>& dists, const Deflator& d);
void deflate_cells(std::vector<CellAggregate>& cells, const Deflator& d);
void deflate_firm_outcomes(std::vector<FirmOutcomeRow>& rows, const Deflator& d);

struct PanelSkeleton {
    std::vector<int> years;
    std::vector<std::string> estimation_units;   // region x sector
    std::vector<std::string> imputation_units;   // region x sector x age
};

// Confirms every (region, sector, age) cell appears in every year of the
// range; UnbalancedPanel lists the missing (cell, year) pairs.
PanelSkeleton validate_balanced_panel(const std::vector<CellAggregate>& cells, int first_year,
                                      int last_year);

// Region employment share in the given raw sector codes over years before
// `cutoff_year`, from raw modelo190 rows (pre-aggregation, since the
// tourism-characteristic codes are raw codes).
std::map<std::string, double> tourism_employment_shares(const std::string& modelo190_path,
                                                        const std::set<int>& tourism_codes,
                                                        int cutoff_year);

}  // namespace bitekit
