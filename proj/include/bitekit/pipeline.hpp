#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bitekit/bite.hpp"
#include "bitekit/fe.hpp"
#include "bitekit/honest.hpp"
#include "bitekit/ingest.hpp"
#include "bitekit/tilt.hpp"

namespace bitekit {

// One JSON document drives the batch pipeline; see the README for the
// schema. Values not present fall back to the documented defaults.
struct PipelineConfig {
    std::string modelo100, modelo190, modelo390, cpi, mapping;
    int deflator_base_year = 2019;
    std::map<int, double> smi_nominal_by_year;
    std::optional<std::array<double, 3>> tier_thresholds;  // real euros
    std::vector<BiteMeasure> bites{BiteMeasure::Youth, BiteMeasure::Kaitz, BiteMeasure::Gap,
                                   BiteMeasure::Sectoral};
    std::vector<DesignKind> designs{DesignKind::StaticDiD, DesignKind::EventStudy,
                                    DesignKind::TripleDiff};
    std::vector<std::string> outcomes{"employment", "firms", "sales"};
    int first_year = 2009;
    int last_year = 2023;
    int reference_year = 2018;
    int post_year = 2019;
    std::set<int> tourism_codes{5, 10};
    int tourism_sector = 4;
    SensitivitySpec sensitivity;
    double tilt_tol = 1e-9;
    std::string out_dir = "out";
    std::uint64_t seed = 0;

    std::string config_hash;  // of the canonical config document

    static PipelineConfig load(const std::string& path);
    void validate() const;

    double smi_real(int year, const Deflator& d) const;
    TierScheme tiers(const Deflator& d) const;
};

// Inputs loaded, harmonized, and deflated to base-year euros.
struct LoadedData {
    std::vector<GroupedDistribution> distributions;
    std::vector<CellAggregate> cells;
    std::vector<FirmOutcomeRow> firm_rows;
    Deflator deflator;
    DimensionMapping mapping;
    std::map<std::string, double> tourism_shares;
};

LoadedData load_inputs(const PipelineConfig& config);

struct ImputationResult {
    std::vector<ImputedCell> imputed;  // aligned with LoadedData::cells
    ClosureReport closure;
    std::map<std::string, std::vector<double>> support_by_region;  // reference year
};

// Imputes every cell-year against its region-year prior. `threads` > 1
// parallelizes over cells with preassigned output slots, so results are
// bit-identical at any thread count.
ImputationResult run_imputation(const PipelineConfig& config, const LoadedData& data,
                                int threads = 1);

std::vector<ExposureVector> compute_exposures(const PipelineConfig& config, const LoadedData& data,
                                              const ImputationResult& imputation);

// Outcome panels at the estimation-unit level (log levels).
std::vector<PanelObservation> employment_panel(const std::vector<CellAggregate>& cells,
                                               AgeGroup group = AgeGroup::Young);
std::vector<PanelObservation> firm_outcome_panel(const std::vector<FirmOutcomeRow>& rows,
                                                 const std::string& outcome);  // firms | sales

// Stage drivers used by the CLI; each writes its artifacts under
// config.out_dir and returns a process exit code (0/2/3).
int cmd_impute(const PipelineConfig& config, int threads);
int cmd_bite(const PipelineConfig& config, int threads);
int cmd_estimate(const PipelineConfig& config, int threads);
int cmd_honest(const PipelineConfig& config);
int cmd_report(const PipelineConfig& config);

// FNV-1a 64-bit, used for artifact provenance.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace bitekit
