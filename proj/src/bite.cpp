#include "bitekit/bite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bitekit {

const char* bite_measure_name(BiteMeasure m) {
    switch (m) {
        case BiteMeasure::Youth: return "youth";
        case BiteMeasure::Gap: return "gap";
        case BiteMeasure::Kaitz: return "kaitz";
        case BiteMeasure::Sectoral: return "sectoral";
    }
    return "?";
}

BiteMeasure bite_measure_from_name(const std::string& name) {
    if (name == "youth") return BiteMeasure::Youth;
    if (name == "gap") return BiteMeasure::Gap;
    if (name == "kaitz") return BiteMeasure::Kaitz;
    if (name == "sectoral") return BiteMeasure::Sectoral;
    raise(ErrorCode::InvalidConfig, "unknown bite measure '" + name + "'");
}

double ExposureVector::measure(BiteMeasure m) const {
    switch (m) {
        case BiteMeasure::Youth: return d_youth;
        case BiteMeasure::Gap: return d_gap;
        case BiteMeasure::Kaitz: return d_kaitz;
        case BiteMeasure::Sectoral: return d_sectoral;
    }
    return 0.0;
}

namespace {

double affected_employees(const ImputedCell& cell) {
    return cell.employees_by_tier[0] + cell.employees_by_tier[1];
}

}  // namespace

double youth_incidence(const std::vector<ImputedCell>& young_cells_of_unit) {
    double affected = 0.0, total = 0.0;
    for (const auto& cell : young_cells_of_unit) {
        affected += affected_employees(cell);
        total += cell.cell.employees;
    }
    if (!(total > 0.0))
        raise(ErrorCode::NoYoungEmployment, "youth_incidence: unit has no young employment");
    return affected / total;
}

double monetary_gap(const std::vector<ImputedCell>& young_cells_of_unit,
                    const std::vector<double>& support_wages, const TierScheme& tiers,
                    double floor_post, double unit_total_wage_bill) {
    if (!(unit_total_wage_bill > 0.0))
        raise(ErrorCode::ZeroWageBill, "monetary_gap: unit has zero total wage bill");
    double required = 0.0;
    for (const auto& cell : young_cells_of_unit) {
        for (std::size_t k = 0; k < cell.employees_by_bracket.size(); ++k) {
            double wage = support_wages[k];
            if (tiers.tier_of(wage) > 1) continue;  // affected set is T1 u T2
            required += std::max(0.0, floor_post - wage) * cell.employees_by_bracket[k];
        }
    }
    return required / unit_total_wage_bill;
}

double kaitz_index(double unit_mean_wage, double floor_pre) {
    if (!(unit_mean_wage > 0.0))
        raise(ErrorCode::NonpositiveMeanWage, "kaitz_index: unit mean wage must be positive");
    return floor_pre / unit_mean_wage;
}

double sectoral_incidence(const std::vector<ImputedCell>& all_cells_of_unit) {
    double affected = 0.0, total = 0.0;
    for (const auto& cell : all_cells_of_unit) {
        affected += affected_employees(cell);
        total += cell.cell.employees;
    }
    if (!(total > 0.0)) raise(ErrorCode::NoEmployment, "sectoral_incidence: unit has no employment");
    return affected / total;
}

std::vector<TourismScore> tourism_intensity(
    const std::vector<std::pair<std::string, int>>& units,
    const std::map<std::string, double>& region_shares, int tourism_sector) {
    if (region_shares.empty())
        raise(ErrorCode::MissingPrePeriod, "tourism_intensity: no pre-period shares");
    std::vector<TourismScore> scores(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        auto it = region_shares.find(units[i].first);
        if (it == region_shares.end())
            raise(ErrorCode::MissingPrePeriod,
                  "tourism_intensity: no pre-period share for region " + units[i].first);
        scores[i].raw = (units[i].second == tourism_sector) ? it->second : 0.0;
    }
    double mean = 0.0;
    for (const auto& s : scores) mean += s.raw;
    mean /= static_cast<double>(scores.size());
    double ss = 0.0;
    for (const auto& s : scores) ss += (s.raw - mean) * (s.raw - mean);
    double sd = scores.size() > 1 ? std::sqrt(ss / static_cast<double>(scores.size() - 1)) : 0.0;
    for (auto& s : scores) s.standardized = sd > 0.0 ? (s.raw - mean) / sd : 0.0;
    return scores;
}

std::vector<ExposureVector> build_exposures(const ExposureInputs& inputs) {
    // Group the pre-reform imputed cells by estimation unit.
    struct UnitCells {
        std::string region;
        int sector = 0;
        std::vector<ImputedCell> all;
        std::vector<ImputedCell> young;
        double wage_bill = 0.0;
        double employees = 0.0;
    };
    std::map<std::string, UnitCells> by_unit;
    for (const auto& cell : inputs.imputed) {
        auto& unit = by_unit[cell.cell.unit_id()];
        unit.region = cell.cell.region;
        unit.sector = cell.cell.sector;
        unit.wage_bill += cell.cell.wage_bill;
        unit.employees += cell.cell.employees;
        if (cell.cell.age_group == AgeGroup::Young) unit.young.push_back(cell);
        unit.all.push_back(cell);
    }

    std::vector<std::pair<std::string, int>> unit_keys;
    for (const auto& [id, unit] : by_unit) unit_keys.emplace_back(unit.region, unit.sector);
    auto tourism =
        tourism_intensity(unit_keys, inputs.tourism_shares, inputs.tourism_sector);

    std::vector<ExposureVector> exposures;
    exposures.reserve(by_unit.size());
    std::size_t i = 0;
    for (const auto& [id, unit] : by_unit) {
        const auto& support = inputs.support_by_region.at(unit.region);
        ExposureVector v;
        v.unit = id;
        v.region = unit.region;
        v.sector = unit.sector;
        v.d_youth = youth_incidence(unit.young);
        v.d_gap = monetary_gap(unit.young, support, inputs.tiers, inputs.floor_post, unit.wage_bill);
        v.d_kaitz = kaitz_index(unit.wage_bill / unit.employees, inputs.floor_pre);
        v.d_sectoral = sectoral_incidence(unit.all);
        v.tourism_raw = tourism[i].raw;
        v.tourism = tourism[i].standardized;
        exposures.push_back(std::move(v));
        ++i;
    }
    return exposures;
}

double quantile_type7(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

MeasureDescriptives describe(const std::string& name, const std::vector<double>& x) {
    MeasureDescriptives d;
    d.name = name;
    double n = static_cast<double>(x.size());
    for (double v : x) d.mean += v;
    d.mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - d.mean) * (v - d.mean);
    d.sd = std::sqrt(ss / (n - 1.0));
    d.cv = d.mean > 0.0 ? d.sd / d.mean : 0.0;
    d.median = quantile_type7(x, 0.5);
    d.p25 = quantile_type7(x, 0.25);
    d.p75 = quantile_type7(x, 0.75);
    d.min = *std::min_element(x.begin(), x.end());
    d.max = *std::max_element(x.begin(), x.end());
    return d;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y, bool& undefined) {
    double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        undefined = true;
        return std::numeric_limits<double>::quiet_NaN();
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

ExposureDescriptives exposure_descriptives(const std::vector<ExposureVector>& vectors) {
    if (vectors.size() < 2)
        raise(ErrorCode::InsufficientUnits, "exposure_descriptives: need at least 2 units");
    ExposureDescriptives out;
    out.n_units = static_cast<int>(vectors.size());

    std::vector<std::pair<std::string, std::vector<double>>> columns = {
        {"youth", {}}, {"kaitz", {}}, {"gap", {}}, {"sectoral", {}}, {"tourism", {}}};
    for (const auto& v : vectors) {
        columns[0].second.push_back(v.d_youth);
        columns[1].second.push_back(v.d_kaitz);
        columns[2].second.push_back(v.d_gap);
        columns[3].second.push_back(v.d_sectoral);
        columns[4].second.push_back(v.tourism);
    }
    for (const auto& [name, values] : columns) out.measures.push_back(describe(name, values));

    out.correlation.assign(columns.size(), std::vector<double>(columns.size(), 1.0));
    for (std::size_t a = 0; a < columns.size(); ++a) {
        for (std::size_t b = a + 1; b < columns.size(); ++b) {
            bool undefined = false;
            double r = pearson(columns[a].second, columns[b].second, undefined);
            out.correlation[a][b] = out.correlation[b][a] = r;
            if (undefined) out.has_undefined_correlations = true;
        }
    }
    return out;
}

}  // namespace bitekit
