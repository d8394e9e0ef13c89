#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "bitekit/csv.hpp"
#include "bitekit/ingest.hpp"
#include "bitekit/rng.hpp"

using namespace bitekit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("bitekit_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int counter;
};
int TempDir::counter = 0;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("load_grouped_distributions: well-formed file") {
    TempDir dir;
    write_file(dir.file("m100.csv"),
               "region,year,bracket_index,employees,wage_mass\n"
               "A,2018,0,10,1000\n"
               "A,2018,1,20,6000\n"
               "A,2018,2,5,2200\n"
               "B,2018,0,8,900\n"
               "B,2018,2,4,1800\n");
    auto scheme = BracketScheme::uniform(0, 200, 3);
    auto dists = load_grouped_distributions(dir.file("m100.csv"), scheme);
    REQUIRE(dists.size() == 2);
    CHECK(dists[0].region == "A");
    CHECK(dists[0].total_employees() == doctest::Approx(35));
    CHECK(dists[0].total_wage_mass() == doctest::Approx(9200));
    CHECK(dists[1].employees[1] == 0.0);
}

TEST_CASE("load_grouped_distributions: validation errors name the row") {
    TempDir dir;
    write_file(dir.file("neg.csv"), "region,year,bracket_index,employees,wage_mass\n"
                                    "A,2018,0,-1,0\n");
    try {
        load_grouped_distributions(dir.file("neg.csv"), BracketScheme::uniform(0, 200, 3));
        FAIL("expected NegativeCount");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NegativeCount);
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }

    write_file(dir.file("overflow.csv"), "region,year,bracket_index,employees,wage_mass\n"
                                         "A,2018,9,1,150\n");
    CHECK_THROWS_AS(
        load_grouped_distributions(dir.file("overflow.csv"), BracketScheme::uniform(0, 200, 3)),
        Error);

    write_file(dir.file("nocol.csv"), "region,year,employees,wage_mass\nA,2018,1,100\n");
    try {
        load_grouped_distributions(dir.file("nocol.csv"), BracketScheme::uniform(0, 200, 3));
        FAIL("expected MissingColumn");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingColumn);
    }
}

TEST_CASE("load_grouped_distributions: census-scale shape") {
    TempDir dir;
    std::string content = "region,year,bracket_index,employees,wage_mass\n";
    for (int r = 0; r < 16; ++r)
        for (int k = 0; k < 400; ++k)
            content += "R" + std::to_string(r) + ",2019," + std::to_string(k) + ",5," +
                       std::to_string(5 * (k * 200 + 90)) + "\n";
    write_file(dir.file("m100.csv"), content);
    auto dists =
        load_grouped_distributions(dir.file("m100.csv"), BracketScheme::census_default());
    CHECK(dists.size() == 16);
    std::size_t records = 0;
    for (const auto& d : dists) records += d.scheme.count();
    CHECK(records == 6400);
}

TEST_CASE("load_cell_aggregates: additive aggregation and the 270-cell skeleton") {
    TempDir dir;
    write_file(dir.file("m190.csv"),
               "region,sector_code,age_band,year,employees,wage_bill\n"
               "A,2,1,2018,10,100\n"   // industry, young
               "A,3,2,2018,30,500\n"); // energy -> same analytical sector, young band
    auto cells = load_cell_aggregates(dir.file("m190.csv"), DimensionMapping::builtin_default());
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].sector == 2);
    CHECK(cells[0].age_group == AgeGroup::Young);
    CHECK(cells[0].employees == doctest::Approx(40));
    CHECK(cells[0].wage_bill == doctest::Approx(600));
    CHECK(cells[0].mean_wage == doctest::Approx(15));

    std::string content = "region,sector_code,age_band,year,employees,wage_bill\n";
    for (int r = 0; r < 15; ++r)
        for (int s = 1; s <= 10; ++s)
            for (int a = 1; a <= 7; ++a)
                content += "R" + std::to_string(r) + "," + std::to_string(s) + "," +
                           std::to_string(a) + ",2018,10,200000\n";
    write_file(dir.file("full.csv"), content);
    auto full = load_cell_aggregates(dir.file("full.csv"), DimensionMapping::builtin_default());
    CHECK(full.size() == 270);

    write_file(dir.file("bad.csv"), "region,sector_code,age_band,year,employees,wage_bill\n"
                                    "A,11,1,2018,1,10\n");
    try {
        load_cell_aggregates(dir.file("bad.csv"), DimensionMapping::builtin_default());
        FAIL("expected UnmappedCode");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnmappedCode);
    }
}

TEST_CASE("loading is order-insensitive") {
    TempDir dir;
    std::vector<std::string> rows;
    Rng rng(3);
    for (int r = 0; r < 3; ++r)
        for (int s = 1; s <= 10; ++s)
            for (int a = 1; a <= 7; ++a)
                rows.push_back("R" + std::to_string(r) + "," + std::to_string(s) + "," +
                               std::to_string(a) + ",2018," + fmt_double(rng.uniform(1, 50)) + "," +
                               fmt_double(rng.uniform(1000, 90000)));
    std::string forward = "region,sector_code,age_band,year,employees,wage_bill\n";
    for (const auto& row : rows) forward += row + "\n";
    std::string reversed = "region,sector_code,age_band,year,employees,wage_bill\n";
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) reversed += *it + "\n";
    write_file(dir.file("fwd.csv"), forward);
    write_file(dir.file("rev.csv"), reversed);
    auto a = load_cell_aggregates(dir.file("fwd.csv"), DimensionMapping::builtin_default());
    auto b = load_cell_aggregates(dir.file("rev.csv"), DimensionMapping::builtin_default());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].cell_id() == b[i].cell_id());
        CHECK(a[i].employees == b[i].employees);
        CHECK(a[i].wage_bill == b[i].wage_bill);
    }
}

TEST_CASE("aggregation conserves mass") {
    TempDir dir;
    Rng rng(5);
    std::string content = "region,sector_code,age_band,year,employees,wage_bill\n";
    double total_e = 0.0, total_w = 0.0;
    for (int i = 0; i < 500; ++i) {
        double e = rng.uniform(0.0, 80.0);
        double w = e * rng.uniform(5000.0, 40000.0);
        total_e += e;
        total_w += w;
        content += "R" + std::to_string(i % 4) + "," + std::to_string(1 + i % 10) + "," +
                   std::to_string(1 + i % 7) + ",2018," + fmt_double(e) + "," + fmt_double(w) + "\n";
    }
    write_file(dir.file("m190.csv"), content);
    auto cells = load_cell_aggregates(dir.file("m190.csv"), DimensionMapping::builtin_default());
    double sum_e = 0.0, sum_w = 0.0;
    for (const auto& c : cells) {
        sum_e += c.employees;
        sum_w += c.wage_bill;
    }
    CHECK(std::abs(sum_e - total_e) / total_e < 1e-9);
    CHECK(std::abs(sum_w - total_w) / total_w < 1e-9);
}

TEST_CASE("deflate and its inverse") {
    Deflator d;
    d.base_year = 2019;
    d.index_by_year = {{2018, 1.05}, {2019, 1.0}};
    d.validate();
    CHECK(deflate(100.0, 2019, d) == 100.0);
    CHECK(deflate(105.0, 2018, d) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK_THROWS_AS(deflate(1.0, 1999, d), Error);

    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        double value = rng.uniform(1.0, 1e6);
        double real = deflate(value, 2018, d);
        CHECK(std::abs(real * d.index_by_year[2018] - value) / value < 1e-12);
    }
}

TEST_CASE("validate_balanced_panel") {
    std::vector<CellAggregate> cells;
    for (int r = 0; r < 15; ++r)
        for (int s = 1; s <= 6; ++s)
            for (int a = 0; a < 3; ++a)
                for (int y = 2009; y <= 2023; ++y) {
                    CellAggregate c;
                    c.region = "R" + std::to_string(r);
                    c.sector = s;
                    c.age_group = static_cast<AgeGroup>(a);
                    c.year = y;
                    c.employees = 1.0;
                    c.wage_bill = 20000.0;
                    c.mean_wage = 20000.0;
                    cells.push_back(c);
                }
    PanelSkeleton skeleton = validate_balanced_panel(cells, 2009, 2023);
    CHECK(skeleton.estimation_units.size() == 90);
    CHECK(skeleton.imputation_units.size() == 270);
    CHECK(skeleton.years.size() == 15);
    CHECK(skeleton.estimation_units.size() * skeleton.years.size() == 1350);

    auto missing = cells;
    missing.pop_back();
    try {
        validate_balanced_panel(missing, 2009, 2023);
        FAIL("expected UnbalancedPanel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnbalancedPanel);
        CHECK(std::string(e.what()).find("R14-S6-mature@2023") != std::string::npos);
    }

    CHECK_THROWS_AS(validate_balanced_panel({}, 2009, 2023), Error);
}

TEST_CASE("tourism_employment_shares pools pre-cutoff years") {
    TempDir dir;
    write_file(dir.file("m190.csv"),
               "region,sector_code,age_band,year,employees,wage_bill\n"
               "A,5,1,2018,30,300\n"
               "A,1,1,2018,70,700\n"
               "A,10,1,2017,20,200\n"
               "A,1,1,2017,80,800\n"
               "A,5,1,2020,999,9990\n");  // post-cutoff, ignored
    auto shares = tourism_employment_shares(dir.file("m190.csv"), {5, 10}, 2019);
    CHECK(shares.at("A") == doctest::Approx(50.0 / 200.0));

    write_file(dir.file("late.csv"), "region,sector_code,age_band,year,employees,wage_bill\n"
                                     "A,5,1,2020,10,100\n");
    CHECK_THROWS_AS(tourism_employment_shares(dir.file("late.csv"), {5, 10}, 2019), Error);
}

TEST_CASE("mapping json round trip with region harmonization") {
    TempDir dir;
    write_file(dir.file("mapping.json"), R"({
      "sector_map": {"1":1,"2":2,"3":2,"4":3,"5":4,"6":4,"7":5,"8":5,"9":6,"10":4},
      "age_map": {"1":"young","2":"young","3":"young","4":"adult","5":"adult","6":"mature","7":"mature"},
      "region_map": {"CEU": "CEU-MEL", "MEL": "CEU-MEL"}
    })");
    auto mapping = load_mapping(dir.file("mapping.json"));
    CHECK(mapping.sector_map.at(10) == 4);
    CHECK(mapping.age_map.at(3) == AgeGroup::Young);
    CHECK(mapping.harmonize_region("CEU") == "CEU-MEL");
    CHECK(mapping.harmonize_region("AND") == "AND");

    write_file(dir.file("m190.csv"), "region,sector_code,age_band,year,employees,wage_bill\n"
                                     "CEU,1,1,2018,10,100\n"
                                     "MEL,1,1,2018,5,50\n");
    auto cells = load_cell_aggregates(dir.file("m190.csv"), mapping);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].region == "CEU-MEL");
    CHECK(cells[0].employees == doctest::Approx(15));
}
