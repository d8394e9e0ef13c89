#include "doctest.h"

#include <cmath>

#include "bitekit/rng.hpp"
#include "bitekit/tilt.hpp"
#include "oracles.hpp"

using namespace bitekit;

namespace {

TiltProblem two_point(double target) {
    return TiltProblem{{1.0, 2.0}, {0.5, 0.5}, target};
}

TiltProblem random_problem(Rng& rng, std::size_t n) {
    TiltProblem p;
    double w = rng.uniform(500.0, 2000.0);
    for (std::size_t k = 0; k < n; ++k) {
        p.support.push_back(w);
        w += rng.uniform(100.0, 1500.0);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double q = rng.uniform() < 0.15 ? 0.0 : rng.uniform(0.05, 1.0);
        p.prior.push_back(q);
        total += q;
    }
    if (total == 0.0) {
        p.prior[0] = 1.0;
        total = 1.0;
    }
    for (auto& q : p.prior) q /= total;
    // renormalization drift guard, applied to the largest entry
    double sum = 0.0;
    std::size_t largest = 0;
    for (std::size_t k = 0; k < p.prior.size(); ++k) {
        sum += p.prior[k];
        if (p.prior[k] > p.prior[largest]) largest = k;
    }
    p.prior[largest] += 1.0 - sum;
    return p;
}

double supported_min(const TiltProblem& p) {
    for (std::size_t k = 0; k < p.support.size(); ++k)
        if (p.prior[k] > 0.0) return p.support[k];
    return p.support.front();
}

double supported_max(const TiltProblem& p) {
    for (std::size_t k = p.support.size(); k-- > 0;)
        if (p.prior[k] > 0.0) return p.support[k];
    return p.support.back();
}

}  // namespace

TEST_CASE("tilting to the prior mean is the identity") {
    TiltSolution sol = solve_tilt(two_point(1.5));
    CHECK(sol.status == TiltStatus::Interior);
    CHECK(std::abs(sol.lambda) < 1e-9);
    CHECK(sol.posterior[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sol.posterior[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sol.kl_divergence == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-point closed form: p2/p1 = exp(lambda (w2-w1))") {
    TiltSolution sol = solve_tilt(two_point(1.8), 1e-12);
    CHECK(sol.status == TiltStatus::Interior);
    CHECK(sol.posterior[0] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(sol.posterior[1] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(sol.lambda == doctest::Approx(std::log(4.0)).epsilon(1e-8));
    CHECK(sol.achieved_mean == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("simplex-grid KL oracle on a 3-point problem") {
    TiltProblem p;
    p.support = {1.0, 2.0, 3.0};
    p.prior = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    p.target_mean = 2.4;
    TiltSolution sol = solve_tilt(p, 1e-12);
    CHECK(sol.achieved_mean == doctest::Approx(2.4).epsilon(1e-11));

    // fine grid search over lambda, minimizing |mean(lambda) - target|
    double best_lambda = 0.0, best_gap = 1e300;
    for (double lam = -8.0; lam <= 8.0; lam += 1e-4) {
        double gap = std::abs(tilted_mean(p, lam) - 2.4);
        if (gap < best_gap) {
            best_gap = gap;
            best_lambda = lam;
        }
    }
    CHECK(sol.lambda == doctest::Approx(best_lambda).epsilon(2e-4));

    // no feasible simplex-grid point does better than the solution
    double grid_best =
        oracles::simplex_grid_best_kl(p.support, p.prior, 2.4, 1e-3, 1e-9 * 2.4 + 1e-12);
    REQUIRE(std::isfinite(grid_best));
    CHECK(sol.kl_divergence <= grid_best + 1e-6);
}

TEST_CASE("corner and degenerate handling") {
    // target at the supported boundary
    TiltSolution lo = solve_tilt(two_point(1.0));
    CHECK(lo.status == TiltStatus::CornerLow);
    CHECK(lo.posterior[0] == 1.0);
    CHECK(lo.achieved_mean == 1.0);

    TiltSolution hi = solve_tilt(two_point(2.0));
    CHECK(hi.status == TiltStatus::CornerHigh);
    CHECK(hi.posterior[1] == 1.0);

    // within the 0.1% slack beyond the boundary: snap
    CHECK(solve_tilt(two_point(2.0015)).status == TiltStatus::CornerHigh);
    CHECK(solve_tilt(two_point(0.9995)).status == TiltStatus::CornerLow);

    // farther: infeasible
    CHECK_THROWS_AS(solve_tilt(two_point(2.01)), Error);
    CHECK_THROWS_AS(solve_tilt(two_point(0.98)), Error);

    // zero-prior boundary points are not part of the supported range
    TiltProblem masked{{1.0, 2.0, 3.0}, {0.0, 0.6, 0.4}, 2.0};
    TiltSolution masked_sol = solve_tilt(masked);
    CHECK(masked_sol.status == TiltStatus::CornerLow);
    CHECK(masked_sol.posterior[1] == 1.0);

    TiltProblem degen{{1.0, 2.0}, {0.0, 1.0}, 2.0};
    TiltSolution d = solve_tilt(degen);
    CHECK(d.status == TiltStatus::Degenerate);
    CHECK(d.posterior[1] == 1.0);
}

TEST_CASE("monotonicity of the tilted mean in lambda") {
    Rng rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        TiltProblem p = random_problem(rng, 2 + static_cast<std::size_t>(rng.uniform() * 20));
        int n_supported = 0;
        for (double q : p.prior) n_supported += q > 0.0;
        if (n_supported < 2) continue;
        for (double lam : {-3e-4, -1e-5, 0.0, 1e-5, 3e-4}) {
            double eps = 1e-6;
            CHECK(tilted_mean(p, lam + eps) > tilted_mean(p, lam));
        }
    }
}

TEST_CASE("zero-prior points stay at zero exactly") {
    TiltProblem p{{1000.0, 2000.0, 3000.0, 4000.0}, {0.4, 0.0, 0.3, 0.3}, 2600.0};
    TiltSolution sol = solve_tilt(p);
    CHECK(sol.posterior[1] == 0.0);
    CHECK(sol.status == TiltStatus::Interior);
    CHECK(sol.achieved_mean == doctest::Approx(2600.0).epsilon(1e-9));
}

TEST_CASE("random interior problems hit the target mean") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        TiltProblem p = random_problem(rng, 2 + static_cast<std::size_t>(rng.uniform() * 60));
        double lo = supported_min(p), hi = supported_max(p);
        if (!(hi > lo)) continue;
        p.target_mean = lo + (hi - lo) * rng.uniform(0.05, 0.95);
        TiltSolution sol = solve_tilt(p, 1e-10);
        CHECK(sol.status == TiltStatus::Interior);
        CHECK(std::abs(sol.achieved_mean - p.target_mean) <= 1e-10 * p.target_mean);
        double total = 0.0;
        for (double pk : sol.posterior) total += pk;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("build_prior uses implied means and employment shares") {
    GroupedDistribution g;
    g.scheme = BracketScheme::uniform(0, 200, 4);
    g.employees = {10, 10, 10, 10};
    g.wage_mass = {10 * 100.0, 10 * 250.0, 10 * 470.0, 10 * 690.0};
    g.region = "T";
    TiltProblem p = build_prior(g);
    for (double q : p.prior) CHECK(q == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p.support[1] == doctest::Approx(250.0));

    GroupedDistribution gz;
    gz.scheme = BracketScheme::uniform(0, 200, 2);
    gz.employees = {0, 10};
    gz.wage_mass = {0, 3100.0};
    gz.region = "T";
    TiltProblem pz = build_prior(gz);
    CHECK(pz.prior[0] == 0.0);
    CHECK(pz.prior[1] == 1.0);
    CHECK(pz.support.size() == 2);  // zero-employment bracket keeps its midpoint
    CHECK(pz.support[0] == doctest::Approx(100.0));
}

TEST_CASE("impute_cell closes the accounts") {
    Rng rng(41);
    GroupedDistribution g;
    g.scheme = BracketScheme::uniform(0, 200, 400);
    g.employees.assign(400, 0.0);
    g.wage_mass.assign(400, 0.0);
    g.region = "T";
    for (std::size_t k = 0; k < 400; ++k) {
        g.employees[k] = std::exp(-std::pow((static_cast<double>(k) - 100.0) / 45.0, 2)) * 1000.0;
        g.wage_mass[k] = g.employees[k] * (g.scheme.lower_edges[k] + rng.uniform(40.0, 160.0));
    }
    TiltProblem prior = build_prior(g);
    TierScheme tiers = TierScheme::from_wage_floors(10375, 12600);

    std::vector<ImputedCell> imputed;
    std::vector<CellAggregate> cells;
    for (int trial = 0; trial < 60; ++trial) {
        CellAggregate cell;
        cell.region = "T";
        cell.sector = 1 + trial % 6;
        cell.age_group = static_cast<AgeGroup>(trial % 3);
        cell.year = 2018;
        cell.employees = rng.uniform(5.0, 5000.0);
        cell.mean_wage = rng.uniform(4000.0, 60000.0);
        cell.wage_bill = cell.employees * cell.mean_wage;
        ImputedCell result = impute_cell(cell, prior, tiers);

        double emp = 0.0, bill = 0.0;
        for (double e : result.employees_by_bracket) emp += e;
        for (double b : result.wage_bill_by_bracket) bill += b;
        CHECK(std::abs(emp - cell.employees) / cell.employees < 1e-9);
        CHECK(std::abs(bill - cell.wage_bill) / cell.wage_bill < 1e-9);

        // tier sums equal bracket sums exactly additively
        double tier_emp = 0.0, tier_bill = 0.0;
        for (double e : result.employees_by_tier) tier_emp += e;
        for (double b : result.wage_bill_by_tier) tier_bill += b;
        CHECK(tier_emp == doctest::Approx(emp).epsilon(1e-12));
        CHECK(tier_bill == doctest::Approx(bill).epsilon(1e-12));

        imputed.push_back(std::move(result));
        cells.push_back(cell);
    }

    ClosureReport report = validate_closure(imputed, cells);
    CHECK(report.pass);
    CHECK(report.max_employee_error < 1e-9);
    CHECK(report.max_wage_bill_error < 1e-9);

    // a perturbed cell is caught and named
    imputed[7].employees_by_bracket[50] += 0.01 * cells[7].employees;
    ClosureReport bad = validate_closure(imputed, cells);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.failing_cells.size() == 1);
    CHECK(bad.failing_cells[0].find(cells[7].cell_id()) != std::string::npos);
}

TEST_CASE("impute_cell at lambda = 0 allocates proportionally to the prior") {
    GroupedDistribution g;
    g.scheme = BracketScheme::uniform(0, 200, 3);
    g.employees = {20, 30, 50};
    g.wage_mass = {20 * 100.0, 30 * 300.0, 50 * 500.0};
    g.region = "T";
    TiltProblem prior = build_prior(g);
    double regional_mean = (20 * 100.0 + 30 * 300.0 + 50 * 500.0) / 100.0;

    CellAggregate cell;
    cell.region = "T";
    cell.sector = 1;
    cell.age_group = AgeGroup::Young;
    cell.year = 2018;
    cell.employees = 100.0;
    cell.mean_wage = regional_mean;
    cell.wage_bill = cell.employees * cell.mean_wage;
    ImputedCell result = impute_cell(cell, prior, TierScheme::from_wage_floors(250, 450));
    CHECK(result.employees_by_bracket[0] == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(result.employees_by_bracket[1] == doctest::Approx(30.0).epsilon(1e-9));
    CHECK(result.employees_by_bracket[2] == doctest::Approx(50.0).epsilon(1e-9));

    // corner cell: all employees land on the boundary bracket
    CellAggregate corner = cell;
    corner.mean_wage = 100.0;
    corner.wage_bill = corner.employees * corner.mean_wage;
    ImputedCell corner_result = impute_cell(corner, prior, TierScheme::from_wage_floors(250, 450));
    CHECK(corner_result.status == TiltStatus::CornerLow);
    CHECK(corner_result.employees_by_bracket[0] == doctest::Approx(100.0));
}
