#include "doctest.h"

#include <cmath>

#include "bitekit/bite.hpp"
#include "bitekit/rng.hpp"
#include "oracles.hpp"

using namespace bitekit;

namespace {

// An imputed cell with a hand-chosen allocation over a small wage grid.
ImputedCell hand_cell(const std::string& region, int sector, AgeGroup age,
                      const std::vector<double>& support, const std::vector<double>& employees,
                      const TierScheme& tiers) {
    ImputedCell cell;
    cell.cell.region = region;
    cell.cell.sector = sector;
    cell.cell.age_group = age;
    cell.cell.year = 2018;
    cell.employees_by_bracket = employees;
    cell.wage_bill_by_bracket.resize(employees.size());
    for (std::size_t k = 0; k < employees.size(); ++k) {
        cell.wage_bill_by_bracket[k] = employees[k] * support[k];
        cell.cell.employees += employees[k];
        cell.cell.wage_bill += employees[k] * support[k];
        cell.employees_by_tier[tiers.tier_of(support[k])] += employees[k];
        cell.wage_bill_by_tier[tiers.tier_of(support[k])] += employees[k] * support[k];
    }
    cell.cell.mean_wage =
        cell.cell.employees > 0 ? cell.cell.wage_bill / cell.cell.employees : 0.0;
    return cell;
}

}  // namespace

TEST_CASE("youth incidence saturation and emptiness") {
    TierScheme tiers = TierScheme::from_wage_floors(10375, 12600);
    std::vector<double> support = {8000, 11000, 20000, 30000};

    auto all_low = hand_cell("A", 1, AgeGroup::Young, support, {5, 5, 0, 0}, tiers);
    CHECK(youth_incidence({all_low}) == 1.0);

    auto all_high = hand_cell("A", 1, AgeGroup::Young, support, {0, 0, 5, 5}, tiers);
    CHECK(youth_incidence({all_high}) == 0.0);

    auto mixed = hand_cell("A", 1, AgeGroup::Young, support, {2, 3, 4, 1}, tiers);
    CHECK(youth_incidence({mixed}) == doctest::Approx(0.5));

    auto empty = hand_cell("A", 1, AgeGroup::Young, support, {0, 0, 0, 0}, tiers);
    CHECK_THROWS_AS(youth_incidence({empty}), Error);
}

TEST_CASE("monetary gap forced arithmetic") {
    TierScheme tiers = TierScheme::from_wage_floors(10375, 12600);
    std::vector<double> support = {10000, 15000, 25000, 40000};

    // 10 young workers at 10k, floor 12.6k, unit bill 1M -> 0.026
    auto young = hand_cell("A", 1, AgeGroup::Young, support, {10, 0, 0, 0}, tiers);
    CHECK(monetary_gap({young}, support, tiers, 12600, 1e6) == doctest::Approx(0.026).epsilon(1e-12));

    // everyone at or above the floor -> 0
    auto high = hand_cell("A", 1, AgeGroup::Young, support, {0, 4, 4, 2}, tiers);
    CHECK(monetary_gap({high}, support, tiers, 12600, 1e6) == 0.0);

    CHECK_THROWS_AS(monetary_gap({young}, support, tiers, 12600, 0.0), Error);
}

TEST_CASE("kaitz index at the unit level") {
    CHECK(kaitz_index(10375.0, 10375.0) == 1.0);
    CHECK(kaitz_index(20090.0, 10375.0) == doctest::Approx(0.516).epsilon(1e-3));
    CHECK(kaitz_index(5326.0, 10375.0) > 1.0);  // floor above the unit mean
    CHECK_THROWS_AS(kaitz_index(0.0, 10375.0), Error);
}

TEST_CASE("sectoral incidence degenerate equality with youth incidence") {
    TierScheme tiers = TierScheme::from_wage_floors(10375, 12600);
    std::vector<double> support = {9000, 14000, 22000};
    auto young = hand_cell("A", 2, AgeGroup::Young, support, {6, 3, 1}, tiers);
    CHECK(sectoral_incidence({young}) == youth_incidence({young}));

    auto adult = hand_cell("A", 2, AgeGroup::Adult, support, {0, 0, 10}, tiers);
    CHECK(sectoral_incidence({young, adult}) == doctest::Approx(0.3));
    CHECK(sectoral_incidence({adult}) == 0.0);
}

TEST_CASE("tourism intensity standardization") {
    std::vector<std::pair<std::string, int>> units;
    std::map<std::string, double> shares;
    for (int r = 0; r < 5; ++r) {
        std::string region = "R" + std::to_string(r);
        shares[region] = 0.2 + 0.05 * r;
        for (int s = 1; s <= 3; ++s) units.emplace_back(region, s);
    }
    auto scores = tourism_intensity(units, shares, 2);
    double mean = 0.0, var = 0.0;
    for (const auto& s : scores) mean += s.standardized;
    mean /= scores.size();
    for (const auto& s : scores) var += (s.standardized - mean) * (s.standardized - mean);
    var /= (scores.size() - 1);
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(var - 1.0) < 1e-12);

    // raw scores only on the tourism sector
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (units[i].second == 2)
            CHECK(scores[i].raw == doctest::Approx(shares[units[i].first]));
        else
            CHECK(scores[i].raw == 0.0);
    }

    // identical shares -> degenerate -> all zeros
    std::map<std::string, double> flat;
    for (int r = 0; r < 5; ++r) flat["R" + std::to_string(r)] = 0.3;
    std::vector<std::pair<std::string, int>> one_sector;
    for (int r = 0; r < 5; ++r) one_sector.emplace_back("R" + std::to_string(r), 2);
    for (const auto& s : tourism_intensity(one_sector, flat, 2))
        CHECK(s.standardized == 0.0);
}

TEST_CASE("exposure descriptives: quantiles, cv, and correlation handling") {
    // type-7 quantile on {1..100}: p25 = 25.75, against the sort oracle
    std::vector<double> x;
    for (int i = 1; i <= 100; ++i) x.push_back(i);
    CHECK(quantile_type7(x, 0.25) == doctest::Approx(25.75).epsilon(1e-12));
    CHECK(quantile_type7(x, 0.25) ==
          doctest::Approx(oracles::sorted_quantile(x, 0.25)).epsilon(1e-12));
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v;
        for (int i = 0; i < 37; ++i) v.push_back(rng.normal());
        for (double p : {0.1, 0.25, 0.5, 0.75, 0.9})
            CHECK(quantile_type7(v, p) ==
                  doctest::Approx(oracles::sorted_quantile(v, p)).epsilon(1e-12));
    }

    // published Table-style arithmetic: mean .794, sd .092 -> cv .116
    std::vector<ExposureVector> vectors(3);
    vectors[0].d_youth = 0.794 - 0.092;
    vectors[1].d_youth = 0.794;
    vectors[2].d_youth = 0.794 + 0.092;
    for (std::size_t i = 0; i < 3; ++i) {
        vectors[i].unit = "U" + std::to_string(i);
        vectors[i].d_kaitz = 0.5;
        vectors[i].d_gap = 0.05;
        vectors[i].d_sectoral = 0.4;
        vectors[i].tourism = 0.0;
    }
    ExposureDescriptives desc = exposure_descriptives(vectors);
    CHECK(desc.measures[0].name == "youth");
    CHECK(desc.measures[0].mean == doctest::Approx(0.794).epsilon(1e-12));
    CHECK(desc.measures[0].cv == doctest::Approx(0.092 / 0.794).epsilon(1e-9));

    // constant columns: sd 0, cv 0, correlations flagged undefined
    CHECK(desc.measures[1].sd == 0.0);
    CHECK(desc.measures[1].cv == 0.0);
    CHECK(desc.has_undefined_correlations);
    CHECK(std::isnan(desc.correlation[0][1]));
    CHECK(desc.correlation[0][0] == 1.0);

    CHECK_THROWS_AS(exposure_descriptives({vectors[0]}), Error);
}

TEST_CASE("gap ratio invariance under joint scaling") {
    TierScheme tiers = TierScheme::from_wage_floors(10375, 12600);
    std::vector<double> support = {8000, 11500, 21000};
    auto young = hand_cell("A", 1, AgeGroup::Young, support, {4, 6, 2}, tiers);
    double bill = 2.4e6;
    double gap = monetary_gap({young}, support, tiers, 12600, bill);

    const double c = 3.7;
    std::vector<double> support2 = {c * 8000, c * 11500, c * 21000};
    TierScheme tiers2 = TierScheme::from_wage_floors(c * 10375, c * 12600);
    auto young2 = hand_cell("A", 1, AgeGroup::Young, support2, {4, 6, 2}, tiers2);
    double gap2 = monetary_gap({young2}, support2, tiers2, c * 12600, c * bill);
    CHECK(gap2 == doctest::Approx(gap).epsilon(1e-12));
}

TEST_CASE("incidence measures are invariant to uniform employment scaling") {
    TierScheme tiers = TierScheme::from_wage_floors(10375, 12600);
    std::vector<double> support = {9000, 11800, 16000, 30000};
    auto y1 = hand_cell("A", 3, AgeGroup::Young, support, {5, 2, 7, 1}, tiers);
    auto y2 = hand_cell("A", 3, AgeGroup::Young, support, {15, 6, 21, 3}, tiers);
    CHECK(youth_incidence({y1}) == doctest::Approx(youth_incidence({y2})).epsilon(1e-12));
    CHECK(sectoral_incidence({y1}) == doctest::Approx(sectoral_incidence({y2})).epsilon(1e-12));
}
