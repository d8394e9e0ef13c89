#include "bitekit/ingest.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <cmath>

#include "json.hpp"

#include "bitekit/csv.hpp"
#include "bitekit/log.hpp"

namespace bitekit {

namespace {

std::string row_tag(const std::string& path, std::size_t row) {
    return path + " row " + std::to_string(row + 2);  // +1 header, +1 one-based
}

}  // namespace

std::vector<GroupedDistribution> load_grouped_distributions(const std::string& path,
                                                            const BracketScheme& scheme) {
    scheme.validate();
    CsvTable table = CsvTable::read_file(path);
    std::size_t c_region = table.column("region");
    std::size_t c_year = table.column("year");
    std::size_t c_bracket = table.column("bracket_index");
    std::size_t c_employees = table.column("employees");
    std::size_t c_mass = table.column("wage_mass");

    // Addends are collected per key and summed in a canonical sorted
    // order, so permuting input rows yields bit-identical aggregates.
    std::map<std::tuple<std::string, int, std::size_t>, std::vector<std::pair<double, double>>>
        addends;
    for (std::size_t i = 0; i < table.row_count(); ++i) {
        std::string region = table.text_at(i, c_region);
        int year = static_cast<int>(table.integer_at(i, c_year));
        long long bracket = table.integer_at(i, c_bracket);
        double employees = table.number_at(i, c_employees);
        double mass = table.number_at(i, c_mass);
        if (bracket < 0 || bracket >= static_cast<long long>(scheme.count()))
            raise(ErrorCode::InvalidRow,
                  row_tag(path, i) + ": bracket index " + std::to_string(bracket) +
                      " outside scheme of " + std::to_string(scheme.count()));
        if (employees < 0.0)
            raise(ErrorCode::NegativeCount, row_tag(path, i) + ": negative employees");
        if (mass < 0.0)
            raise(ErrorCode::NegativeCount, row_tag(path, i) + ": negative wage mass");
        addends[{region, year, static_cast<std::size_t>(bracket)}].push_back({employees, mass});
    }

    std::map<std::pair<std::string, int>, GroupedDistribution> by_key;
    for (auto& [key, values] : addends) {
        const auto& [region, year, bracket] = key;
        auto& dist = by_key[{region, year}];
        if (dist.employees.empty()) {
            dist.scheme = scheme;
            dist.employees.assign(scheme.count(), 0.0);
            dist.wage_mass.assign(scheme.count(), 0.0);
            dist.region = region;
            dist.year = year;
        }
        std::sort(values.begin(), values.end());
        for (const auto& [employees, mass] : values) {
            dist.employees[bracket] += employees;
            dist.wage_mass[bracket] += mass;
        }
    }

    std::vector<GroupedDistribution> out;
    out.reserve(by_key.size());
    for (auto& [key, dist] : by_key) {
        dist.validate();
        out.push_back(std::move(dist));
    }
    return out;
}

std::vector<CellAggregate> load_cell_aggregates(const std::string& path,
                                                const DimensionMapping& mapping) {
    mapping.validate();
    CsvTable table = CsvTable::read_file(path);
    std::size_t c_region = table.column("region");
    std::size_t c_sector = table.column("sector_code");
    std::size_t c_age = table.column("age_band");
    std::size_t c_year = table.column("year");
    std::size_t c_employees = table.column("employees");
    std::size_t c_bill = table.column("wage_bill");

    struct Key {
        std::string region;
        int sector;
        int age;
        int year;
        auto operator<=>(const Key&) const = default;
    };
    // Canonical summation order keeps aggregation order-insensitive.
    std::map<Key, std::vector<std::pair<double, double>>> addends;
    for (std::size_t i = 0; i < table.row_count(); ++i) {
        std::string region = mapping.harmonize_region(table.text_at(i, c_region));
        int raw_sector = static_cast<int>(table.integer_at(i, c_sector));
        int raw_age = static_cast<int>(table.integer_at(i, c_age));
        int year = static_cast<int>(table.integer_at(i, c_year));
        double employees = table.number_at(i, c_employees);
        double bill = table.number_at(i, c_bill);
        auto sector_it = mapping.sector_map.find(raw_sector);
        if (sector_it == mapping.sector_map.end())
            raise(ErrorCode::UnmappedCode,
                  row_tag(path, i) + ": sector code " + std::to_string(raw_sector) + " not mapped");
        auto age_it = mapping.age_map.find(raw_age);
        if (age_it == mapping.age_map.end())
            raise(ErrorCode::UnmappedCode,
                  row_tag(path, i) + ": age band " + std::to_string(raw_age) + " not mapped");
        if (employees < 0.0)
            raise(ErrorCode::NegativeCount, row_tag(path, i) + ": negative employees");
        if (bill < 0.0)
            raise(ErrorCode::NegativeCount, row_tag(path, i) + ": negative wage bill");
        Key key{region, sector_it->second, static_cast<int>(age_it->second), year};
        addends[key].push_back({employees, bill});
    }

    std::vector<CellAggregate> cells;
    cells.reserve(addends.size());
    for (auto& [key, values] : addends) {
        std::sort(values.begin(), values.end());
        CellAggregate cell;
        cell.region = key.region;
        cell.sector = key.sector;
        cell.age_group = static_cast<AgeGroup>(key.age);
        cell.year = key.year;
        for (const auto& [employees, bill] : values) {
            cell.employees += employees;
            cell.wage_bill += bill;
        }
        cell.mean_wage = cell.employees > 0.0 ? cell.wage_bill / cell.employees : 0.0;
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::vector<FirmOutcomeRow> load_firm_outcomes(const std::string& path,
                                               const DimensionMapping& mapping) {
    mapping.validate();
    CsvTable table = CsvTable::read_file(path);
    std::size_t c_region = table.column("region");
    std::size_t c_sector = table.column("sector_code");
    std::size_t c_year = table.column("year");
    std::size_t c_sales = table.column("sales");
    std::size_t c_va = table.column("value_added");
    std::size_t c_firms = table.column("n_firms");

    struct Key {
        std::string region;
        int sector;
        int year;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::vector<std::array<double, 3>>> addends;
    for (std::size_t i = 0; i < table.row_count(); ++i) {
        int raw_sector = static_cast<int>(table.integer_at(i, c_sector));
        auto sector_it = mapping.sector_map.find(raw_sector);
        if (sector_it == mapping.sector_map.end())
            raise(ErrorCode::UnmappedCode,
                  row_tag(path, i) + ": sector code " + std::to_string(raw_sector) + " not mapped");
        double sales = table.number_at(i, c_sales);
        double n_firms = table.number_at(i, c_firms);
        if (sales < 0.0) raise(ErrorCode::NegativeCount, row_tag(path, i) + ": negative sales");
        if (n_firms < 0.0) raise(ErrorCode::NegativeCount, row_tag(path, i) + ": negative firm count");
        Key key{mapping.harmonize_region(table.text_at(i, c_region)), sector_it->second,
                static_cast<int>(table.integer_at(i, c_year))};
        addends[key].push_back({sales, table.number_at(i, c_va), n_firms});
    }
    std::vector<FirmOutcomeRow> out;
    out.reserve(addends.size());
    for (auto& [key, values] : addends) {
        std::sort(values.begin(), values.end());
        FirmOutcomeRow row;
        row.region = key.region;
        row.sector = key.sector;
        row.year = key.year;
        for (const auto& v : values) {
            row.sales += v[0];
            row.value_added += v[1];
            row.n_firms += v[2];
        }
        out.push_back(std::move(row));
    }
    return out;
}

Deflator load_deflator(const std::string& path, int base_year) {
    CsvTable table = CsvTable::read_file(path);
    std::size_t c_year = table.column("year");
    std::size_t c_index = table.column("index");
    Deflator d;
    d.base_year = base_year;
    for (std::size_t i = 0; i < table.row_count(); ++i)
        d.index_by_year[static_cast<int>(table.integer_at(i, c_year))] = table.number_at(i, c_index);
    d.validate();
    return d;
}

DimensionMapping load_mapping(const std::string& path) {
    nlohmann::json doc = nlohmann::json::parse(read_text_file(path));
    DimensionMapping mapping;
    if (!doc.contains("sector_map") || !doc.contains("age_map"))
        raise(ErrorCode::InvalidConfig, path + ": mapping needs sector_map and age_map");
    for (const auto& [raw, analytical] : doc["sector_map"].items())
        mapping.sector_map[std::stoi(raw)] = analytical.get<int>();
    for (const auto& [raw, group] : doc["age_map"].items())
        mapping.age_map[std::stoi(raw)] = age_group_from_name(group.get<std::string>());
    if (doc.contains("region_map"))
        for (const auto& [raw, harmonized] : doc["region_map"].items())
            mapping.region_map[raw] = harmonized.get<std::string>();
    mapping.validate();
    return mapping;
}

double deflate(double nominal, int year, const Deflator& d) {
    auto it = d.index_by_year.find(year);
    if (it == d.index_by_year.end())
        raise(ErrorCode::UnknownYear, "deflate: no index for year " + std::to_string(year));
    return nominal / it->second;
}

void deflate_distributions(std::vector<GroupedDistribution>& dists, const Deflator& d) {
    for (auto& dist : dists)
        for (auto& mass : dist.wage_mass) mass = deflate(mass, dist.year, d);
}

void deflate_cells(std::vector<CellAggregate>& cells, const Deflator& d) {
    for (auto& cell : cells) {
        cell.wage_bill = deflate(cell.wage_bill, cell.year, d);
        cell.mean_wage = cell.employees > 0.0 ? cell.wage_bill / cell.employees : 0.0;
    }
}

void deflate_firm_outcomes(std::vector<FirmOutcomeRow>& rows, const Deflator& d) {
    for (auto& row : rows) {
        row.sales = deflate(row.sales, row.year, d);
        row.value_added = deflate(row.value_added, row.year, d);
    }
}

PanelSkeleton validate_balanced_panel(const std::vector<CellAggregate>& cells, int first_year,
                                      int last_year) {
    if (first_year > last_year)
        raise(ErrorCode::InvalidConfig, "validate_balanced_panel: empty year range");
    std::set<std::string> cell_ids;
    std::set<std::string> unit_ids;
    std::set<std::pair<std::string, int>> present;
    for (const auto& cell : cells) {
        cell_ids.insert(cell.cell_id());
        unit_ids.insert(cell.unit_id());
        present.insert({cell.cell_id(), cell.year});
    }
    std::vector<std::string> missing;
    if (cell_ids.empty()) missing.push_back("(no cells at all)");
    for (const auto& id : cell_ids)
        for (int year = first_year; year <= last_year; ++year)
            if (!present.count({id, year}))
                missing.push_back(id + "@" + std::to_string(year));
    if (!missing.empty()) {
        std::string detail;
        std::size_t shown = std::min<std::size_t>(missing.size(), 12);
        for (std::size_t i = 0; i < shown; ++i) detail += (i ? ", " : "") + missing[i];
        if (missing.size() > shown)
            detail += ", ... (" + std::to_string(missing.size()) + " total)";
        raise(ErrorCode::UnbalancedPanel, "missing cell-years: " + detail);
    }
    PanelSkeleton skeleton;
    for (int year = first_year; year <= last_year; ++year) skeleton.years.push_back(year);
    skeleton.estimation_units.assign(unit_ids.begin(), unit_ids.end());
    skeleton.imputation_units.assign(cell_ids.begin(), cell_ids.end());
    return skeleton;
}

std::map<std::string, double> tourism_employment_shares(const std::string& modelo190_path,
                                                        const std::set<int>& tourism_codes,
                                                        int cutoff_year) {
    CsvTable table = CsvTable::read_file(modelo190_path);
    std::size_t c_region = table.column("region");
    std::size_t c_sector = table.column("sector_code");
    std::size_t c_year = table.column("year");
    std::size_t c_employees = table.column("employees");

    std::map<std::string, double> tourism_emp;
    std::map<std::string, double> total_emp;
    bool any_pre = false;
    for (std::size_t i = 0; i < table.row_count(); ++i) {
        int year = static_cast<int>(table.integer_at(i, c_year));
        if (year >= cutoff_year) continue;
        any_pre = true;
        std::string region = table.text_at(i, c_region);
        double employees = table.number_at(i, c_employees);
        total_emp[region] += employees;
        if (tourism_codes.count(static_cast<int>(table.integer_at(i, c_sector))))
            tourism_emp[region] += employees;
    }
    if (!any_pre)
        raise(ErrorCode::MissingPrePeriod,
              modelo190_path + ": no rows before year " + std::to_string(cutoff_year));
    std::map<std::string, double> shares;
    for (const auto& [region, total] : total_emp)
        shares[region] = total > 0.0 ? tourism_emp[region] / total : 0.0;
    return shares;
}

}  // namespace bitekit
