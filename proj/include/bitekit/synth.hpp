#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bitekit/bite.hpp"
#include "bitekit/fe.hpp"
#include "bitekit/rng.hpp"
#include "bitekit/tilt.hpp"
#include "bitekit/types.hpp"

namespace bitekit {

// Per-region wage law (log-normal around a real mean) and composition.
struct RegionSpec {
    std::string id;
    double employment = 0.0;           // base wage earners
    double mean_wage = 0.0;            // real euros/year
    double sigma = 0.6;                // log-sd of the wage law
    double tourism_sector_share = 0.25;  // employment share of the tourism sector
    double young_tilt = 1.0;           // regional deviation of young relative wages
};

// Ground-truth data generating process. Outcomes live in logs with
// additive unit and year effects, so the panel estimators are unbiased by
// construction and any Monte Carlo bias is implementation error.
struct DgpSpec {
    std::uint64_t seed = 190101;
    int first_year = 2009;
    int last_year = 2023;
    int reference_year = 2018;
    int post_year = 2019;

    std::vector<RegionSpec> regions;
    std::array<double, 6> sector_wage_shifts{};   // multiplicative on the region mean
    std::array<double, 3> age_wage_shifts{};
    // Young wages do not track sector means one-for-one; this tilt scales
    // the young shift per sector (1 = proportional).
    std::array<double, 6> young_sector_tilt{1, 1, 1, 1, 1, 1};
    std::array<double, 6> base_sector_shares{};   // employment composition
    std::array<double, 3> age_shares{};
    // Young employment share per sector (0 = use age_shares[0]); the
    // adult/mature split keeps its proportions.
    std::array<double, 6> young_share_by_sector{};

    double planted_beta = 0.0;         // true effect of D x post
    double planted_delta_2020 = 0.0;   // true tourism effect in 2020
    double pretrend_slope = 0.0;       // differential trend per year of D
    double noise_sd = 0.0;             // sd of log outcome noise
    BiteMeasure planted_on = BiteMeasure::Youth;

    std::map<int, double> year_effects;   // common log-employment path
    std::map<int, double> smi_real;       // annualized wage floor, real euros
    std::map<int, double> cpi_index;      // deflator, 1 at the base year
    int deflator_base_year = 2019;

    // Raw-code splits used when emitting the administrative shapes.
    std::array<std::vector<std::pair<int, double>>, 6> raw_sector_split;
    std::array<std::vector<std::pair<int, double>>, 3> raw_age_split;
    std::set<int> tourism_codes = {5, 10};
    int tourism_sector = 4;

    BracketScheme scheme = BracketScheme::census_default();

    void validate() const;

    // Defaults calibrated against published aggregate targets (national
    // mean wage, exposure saturation, tourism dependence range).
    static DgpSpec calibrated_default(std::uint64_t seed = 190101);
};

// In-memory census in real euros, internally consistent: every regional
// distribution is the exact sum of its cells' bracket allocations.
struct SyntheticCensus {
    BracketScheme scheme;
    std::vector<GroupedDistribution> distributions;  // per region-year
    std::vector<CellAggregate> cells;                // analytical level
    std::vector<FirmOutcomeRow> firm_rows;           // analytical level
    Deflator deflator;
    std::map<int, double> smi_real;
    DgpSpec ground_truth;

    // Skeleton exposures (pre-reform structure, noise-free), the values
    // the outcome equations were planted with.
    std::vector<ExposureVector> planted_exposures;
};

SyntheticCensus generate_census(const DgpSpec& spec);

// Writes the census in the administrative CSV schemas (nominal euros plus
// the CPI), the dimension mapping, ground_truth.json, and a ready-to-run
// pipeline config. Returns the config path.
std::string write_census(const SyntheticCensus& census, const std::string& out_dir);

struct McOptions {
    int reps = 500;
    bool antithetic = false;  // pair replications with mirrored noise
    double ci_alpha = 0.05;
};

struct McReport {
    int reps = 0;
    // bite x post (static) or bite x post_year (event/ddd) coefficient
    double mean_beta = 0.0;
    double bias_beta = 0.0;
    double sd_beta = 0.0;
    double mean_se = 0.0;
    double coverage_beta = 0.0;
    // D x 2020 and tourism x 2020 when the design includes them
    double mean_beta_2020 = 0.0;
    double mean_delta_2020 = 0.0;
    double bias_delta_2020 = 0.0;
    // pre-trend Wald test at alpha = 0.05 (event designs)
    double pretrend_rejection_rate = 0.0;
    int pretrend_reps = 0;
};

// Monte Carlo over the outcome noise with predetermined exposures: the
// pre-reform structure is generated once (noise-free) and pushed through
// the imputation and exposure pipeline; each replication redraws outcome
// noise (seed = base + rep) and re-estimates.
McReport monte_carlo(const DgpSpec& spec, int reps, const DesignSpec& design,
                     const McOptions& options = {});

// The deterministic skeleton the Monte Carlo builds once: exposures plus
// the fixed effects of the outcome equation. Exposed for calibration and
// the acceptance tests.
struct OutcomeSkeleton {
    std::vector<ExposureVector> exposures;
    std::vector<std::string> units;         // sorted
    std::map<std::string, double> alpha;    // unit effect (log young employment)
    std::map<int, double> lambda;           // year effect
    std::vector<int> years;
    std::map<std::string, std::string> cluster_of;  // unit -> region
};

OutcomeSkeleton build_skeleton(const DgpSpec& spec);

// One replication's outcome panel given the skeleton and a noise draw
// (one standard normal per unit-year, unit-major order).
std::vector<PanelObservation> outcome_panel(const DgpSpec& spec, const OutcomeSkeleton& skeleton,
                                            const std::vector<double>& noise);

}  // namespace bitekit
