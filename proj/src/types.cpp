#include "bitekit/types.hpp"

#include <cmath>
#include <cstdio>

namespace bitekit {

void BracketScheme::validate() const {
    if (lower_edges.empty()) raise(ErrorCode::NonMonotoneBrackets, "bracket scheme has no edges");
    if (!(width > 0.0)) raise(ErrorCode::NonMonotoneBrackets, "bracket width must be positive");
    for (std::size_t k = 0; k + 1 < lower_edges.size(); ++k) {
        if (!(lower_edges[k + 1] > lower_edges[k]))
            raise(ErrorCode::NonMonotoneBrackets,
                  "bracket edges not strictly increasing at index " + std::to_string(k + 1));
        if (std::abs((lower_edges[k + 1] - lower_edges[k]) - width) > 1e-9 * std::max(1.0, width))
            raise(ErrorCode::NonMonotoneBrackets,
                  "bracket spacing differs from width at index " + std::to_string(k + 1));
    }
}

BracketScheme BracketScheme::uniform(double first_edge, double width, std::size_t count) {
    BracketScheme scheme;
    scheme.width = width;
    scheme.lower_edges.resize(count);
    for (std::size_t k = 0; k < count; ++k) scheme.lower_edges[k] = first_edge + width * static_cast<double>(k);
    scheme.validate();
    return scheme;
}

double GroupedDistribution::total_employees() const {
    double total = 0.0;
    for (double e : employees) total += e;
    return total;
}

double GroupedDistribution::total_wage_mass() const {
    double total = 0.0;
    for (double m : wage_mass) total += m;
    return total;
}

double GroupedDistribution::representative_wage(std::size_t k) const {
    if (employees[k] > 0.0) return wage_mass[k] / employees[k];
    return scheme.midpoint(k);
}

void GroupedDistribution::validate() const {
    scheme.validate();
    if (employees.size() != scheme.count() || wage_mass.size() != scheme.count())
        raise(ErrorCode::InvalidRow, "distribution arrays do not match scheme for region " + region);
    for (std::size_t k = 0; k < scheme.count(); ++k) {
        if (employees[k] < 0.0)
            raise(ErrorCode::NegativeCount,
                  "negative employees in region " + region + " bracket " + std::to_string(k));
        if (wage_mass[k] < 0.0)
            raise(ErrorCode::NegativeCount,
                  "negative wage mass in region " + region + " bracket " + std::to_string(k));
        if (employees[k] == 0.0 && wage_mass[k] != 0.0)
            raise(ErrorCode::InvalidRow,
                  "wage mass without employees in region " + region + " bracket " + std::to_string(k));
    }
}

const char* age_group_name(AgeGroup g) {
    switch (g) {
        case AgeGroup::Young: return "young";
        case AgeGroup::Adult: return "adult";
        case AgeGroup::Mature: return "mature";
    }
    return "?";
}

AgeGroup age_group_from_name(const std::string& name) {
    if (name == "young") return AgeGroup::Young;
    if (name == "adult") return AgeGroup::Adult;
    if (name == "mature") return AgeGroup::Mature;
    raise(ErrorCode::UnmappedCode, "unknown age group '" + name + "'");
}

std::string make_unit_id(const std::string& region, int sector) {
    return region + "-S" + std::to_string(sector);
}

std::string CellAggregate::unit_id() const { return make_unit_id(region, sector); }

std::string CellAggregate::cell_id() const {
    return unit_id() + "-" + age_group_name(age_group);
}

void Deflator::validate() const {
    auto base = index_by_year.find(base_year);
    if (base == index_by_year.end())
        raise(ErrorCode::UnknownYear, "deflator lacks its base year " + std::to_string(base_year));
    if (std::abs(base->second - 1.0) > 1e-12)
        raise(ErrorCode::InvalidSpec, "deflator index at base year must equal 1");
    for (const auto& [year, index] : index_by_year) {
        if (!(index > 0.0))
            raise(ErrorCode::InvalidSpec, "nonpositive deflator index for year " + std::to_string(year));
    }
}

void DimensionMapping::validate() const {
    if (sector_map.empty() || age_map.empty())
        raise(ErrorCode::InvalidSpec, "dimension mapping must cover sector and age codes");
    bool sector_seen[7] = {};
    for (const auto& [raw, analytical] : sector_map) {
        if (analytical < 1 || analytical > 6)
            raise(ErrorCode::InvalidSpec,
                  "sector code " + std::to_string(raw) + " maps outside 1..6");
        sector_seen[analytical] = true;
    }
    for (int s = 1; s <= 6; ++s)
        if (!sector_seen[s])
            raise(ErrorCode::InvalidSpec, "sector map misses analytical sector " + std::to_string(s));
    bool age_seen[3] = {};
    for (const auto& [raw, group] : age_map) age_seen[static_cast<int>(group)] = true;
    for (int g = 0; g < 3; ++g)
        if (!age_seen[g]) raise(ErrorCode::InvalidSpec, "age map misses one of the 3 groups");
}

DimensionMapping DimensionMapping::builtin_default() {
    DimensionMapping m;
    // 10 raw fiscal activity codes onto the six analytical sectors:
    // 1 agriculture; 2 industry, 3 energy -> industry & energy;
    // 4 construction; 5 trade, 6 transport, 10 hospitality -> trade,
    // tourism & transport; 7 information/finance, 8 professional ->
    // advanced services; 9 public/social services.
    m.sector_map = {{1, 1}, {2, 2}, {3, 2}, {4, 3}, {5, 4},
                    {6, 4}, {7, 5}, {8, 5}, {9, 6}, {10, 4}};
    // Seven raw age bands collapsed by band midpoint; the 25-30 boundary
    // band goes to the younger group.
    m.age_map = {{1, AgeGroup::Young},  {2, AgeGroup::Young},  {3, AgeGroup::Young},
                 {4, AgeGroup::Adult},  {5, AgeGroup::Adult},
                 {6, AgeGroup::Mature}, {7, AgeGroup::Mature}};
    return m;
}

void TierScheme::validate() const {
    if (!(thresholds[0] < thresholds[1] && thresholds[1] < thresholds[2]))
        raise(ErrorCode::InvalidSpec, "tier thresholds must be strictly increasing");
    if (!(thresholds[0] >= 0.0)) raise(ErrorCode::InvalidSpec, "tier thresholds must be nonnegative");
}

int TierScheme::tier_of(double wage) const {
    if (wage <= thresholds[0]) return 0;
    if (wage <= thresholds[1]) return 1;
    if (wage <= thresholds[2]) return 2;
    return 3;
}

TierScheme TierScheme::from_wage_floors(double floor_pre, double floor_post) {
    TierScheme tiers;
    tiers.thresholds = {floor_pre, floor_post, 2.0 * floor_post};
    tiers.labels = {"below_pre_floor", "pre_to_post_floor", "post_to_2x_floor", "above_2x_floor"};
    tiers.validate();
    return tiers;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonMonotoneBrackets: return "NonMonotoneBrackets";
        case ErrorCode::NegativeCount: return "NegativeCount";
        case ErrorCode::InvalidRow: return "InvalidRow";
        case ErrorCode::UnmappedCode: return "UnmappedCode";
        case ErrorCode::UnknownYear: return "UnknownYear";
        case ErrorCode::UnbalancedPanel: return "UnbalancedPanel";
        case ErrorCode::EmptyDistribution: return "EmptyDistribution";
        case ErrorCode::ZeroWageMass: return "ZeroWageMass";
        case ErrorCode::NonpositiveMeanWage: return "NonpositiveMeanWage";
        case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::IndexMismatch: return "IndexMismatch";
        case ErrorCode::NoYoungEmployment: return "NoYoungEmployment";
        case ErrorCode::ZeroWageBill: return "ZeroWageBill";
        case ErrorCode::NoEmployment: return "NoEmployment";
        case ErrorCode::MissingPrePeriod: return "MissingPrePeriod";
        case ErrorCode::InsufficientUnits: return "InsufficientUnits";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::ExposureMissing: return "ExposureMissing";
        case ErrorCode::SingleCluster: return "SingleCluster";
        case ErrorCode::SingularSubmatrix: return "SingularSubmatrix";
        case ErrorCode::MissingTarget: return "MissingTarget";
        case ErrorCode::NoPrePeriods: return "NoPrePeriods";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::MissingFit: return "MissingFit";
        case ErrorCode::MissingArtifacts: return "MissingArtifacts";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace bitekit
