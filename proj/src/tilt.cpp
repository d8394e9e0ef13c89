#include "bitekit/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bitekit {

namespace {

constexpr double kWageUnit = 1e4;      // internal wage scale, euros
constexpr double kCornerSlack = 1e-3;  // relative slack beyond the support
constexpr int kIterationBudget = 200;

struct Workspace {
    std::vector<double> wages;    // rescaled supported wages
    std::vector<double> log_q;    // log prior on supported points
    std::vector<std::size_t> index;  // original indices
};

// Tilted moments at one lambda via log-weights with max-subtraction;
// lambda * w_k would overflow on euro supports otherwise.
struct Moments {
    double mean;
    double variance;
};

Moments tilted_moments(const Workspace& ws, double lambda) {
    double max_a = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ws.wages.size(); ++i)
        max_a = std::max(max_a, ws.log_q[i] + lambda * ws.wages[i]);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < ws.wages.size(); ++i) {
        double e = std::exp(ws.log_q[i] + lambda * ws.wages[i] - max_a);
        s0 += e;
        s1 += e * ws.wages[i];
        s2 += e * ws.wages[i] * ws.wages[i];
    }
    double mean = s1 / s0;
    double variance = std::max(0.0, s2 / s0 - mean * mean);
    return {mean, variance};
}

std::vector<double> tilted_posterior(const Workspace& ws, double lambda, std::size_t n_total) {
    double max_a = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ws.wages.size(); ++i)
        max_a = std::max(max_a, ws.log_q[i] + lambda * ws.wages[i]);
    double s0 = 0.0;
    std::vector<double> weights(ws.wages.size());
    for (std::size_t i = 0; i < ws.wages.size(); ++i) {
        weights[i] = std::exp(ws.log_q[i] + lambda * ws.wages[i] - max_a);
        s0 += weights[i];
    }
    std::vector<double> posterior(n_total, 0.0);
    for (std::size_t i = 0; i < ws.wages.size(); ++i)
        posterior[ws.index[i]] = weights[i] / s0;
    return posterior;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    double kl = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] > 0.0) kl += p[k] * std::log(p[k] / q[k]);
    return std::max(0.0, kl);
}

TiltSolution corner_solution(const TiltProblem& problem, const Workspace& ws, bool high) {
    TiltSolution sol;
    sol.status = high ? TiltStatus::CornerHigh : TiltStatus::CornerLow;
    sol.lambda = high ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
    std::size_t at = high ? ws.index.back() : ws.index.front();
    sol.posterior.assign(problem.support.size(), 0.0);
    sol.posterior[at] = 1.0;
    sol.achieved_mean = problem.support[at];
    sol.kl_divergence = -std::log(problem.prior[at]);
    return sol;
}

}  // namespace

void TiltProblem::validate() const {
    if (support.empty() || support.size() != prior.size())
        raise(ErrorCode::InvalidSpec, "tilt problem: support and prior sizes differ or are empty");
    for (std::size_t k = 0; k + 1 < support.size(); ++k)
        if (!(support[k + 1] > support[k]))
            raise(ErrorCode::InvalidSpec,
                  "tilt problem: support not strictly increasing at index " + std::to_string(k + 1));
    double total = 0.0;
    bool any_positive = false;
    for (double q : prior) {
        if (q < 0.0) raise(ErrorCode::InvalidSpec, "tilt problem: negative prior probability");
        if (q > 0.0) any_positive = true;
        total += q;
    }
    if (!any_positive) raise(ErrorCode::InvalidSpec, "tilt problem: prior has no positive mass");
    if (std::abs(total - 1.0) > 1e-12)
        raise(ErrorCode::InvalidSpec, "tilt problem: prior sums to " + std::to_string(total));
}

const char* tilt_status_name(TiltStatus status) {
    switch (status) {
        case TiltStatus::Interior: return "interior";
        case TiltStatus::CornerLow: return "corner_low";
        case TiltStatus::CornerHigh: return "corner_high";
        case TiltStatus::Degenerate: return "degenerate";
    }
    return "?";
}

double tilted_mean(const TiltProblem& problem, double lambda) {
    Workspace ws;
    for (std::size_t k = 0; k < problem.support.size(); ++k) {
        if (problem.prior[k] <= 0.0) continue;
        ws.wages.push_back(problem.support[k] / kWageUnit);
        ws.log_q.push_back(std::log(problem.prior[k]));
        ws.index.push_back(k);
    }
    return tilted_moments(ws, lambda * kWageUnit).mean * kWageUnit;
}

TiltSolution solve_tilt(const TiltProblem& problem, double tol) {
    problem.validate();
    if (!(tol > 0.0)) raise(ErrorCode::InvalidSpec, "solve_tilt: tolerance must be positive");

    Workspace ws;
    for (std::size_t k = 0; k < problem.support.size(); ++k) {
        if (problem.prior[k] <= 0.0) continue;
        ws.wages.push_back(problem.support[k] / kWageUnit);
        ws.log_q.push_back(std::log(problem.prior[k]));
        ws.index.push_back(k);
    }

    const double target = problem.target_mean / kWageUnit;
    const double lo_w = ws.wages.front();
    const double hi_w = ws.wages.back();

    if (ws.wages.size() == 1) {
        // One effective point: the only feasible target is that point.
        if (std::abs(target - lo_w) > kCornerSlack * std::abs(lo_w))
            raise(ErrorCode::InfeasibleTarget,
                  "solve_tilt: degenerate support cannot reach the target mean");
        TiltSolution sol;
        sol.status = TiltStatus::Degenerate;
        sol.lambda = 0.0;
        sol.posterior.assign(problem.support.size(), 0.0);
        sol.posterior[ws.index.front()] = 1.0;
        sol.achieved_mean = problem.support[ws.index.front()];
        sol.kl_divergence = 0.0;
        return sol;
    }

    if (target <= lo_w) {
        if (target < lo_w * (1.0 - kCornerSlack))
            raise(ErrorCode::InfeasibleTarget, "solve_tilt: target mean below the supported range");
        return corner_solution(problem, ws, /*high=*/false);
    }
    if (target >= hi_w) {
        if (target > hi_w * (1.0 + kCornerSlack))
            raise(ErrorCode::InfeasibleTarget, "solve_tilt: target mean above the supported range");
        return corner_solution(problem, ws, /*high=*/true);
    }

    // Interior: root of mean(lambda) = target; mean is strictly increasing.
    int iterations = 0;
    double lambda = 0.0;
    Moments m = tilted_moments(ws, lambda);

    // Geometric expansion to a sign-changing bracket.
    double lo, hi;
    if (m.mean < target) {
        lo = 0.0;
        hi = 1.0;
        while (tilted_moments(ws, hi).mean < target) {
            lo = hi;
            hi *= 2.0;
            if (++iterations > kIterationBudget)
                raise(ErrorCode::NonConvergence, "solve_tilt: bracket expansion exhausted");
        }
    } else {
        hi = 0.0;
        lo = -1.0;
        while (tilted_moments(ws, lo).mean > target) {
            hi = lo;
            lo *= 2.0;
            if (++iterations > kIterationBudget)
                raise(ErrorCode::NonConvergence, "solve_tilt: bracket expansion exhausted");
        }
    }

    lambda = 0.5 * (lo + hi);
    m = tilted_moments(ws, lambda);
    const double scale = std::max(std::abs(target), 1e-300);
    double best_gap = std::abs(m.mean - target);
    double best_lambda = lambda;
    while (++iterations <= kIterationBudget) {
        double gap = m.mean - target;
        if (std::abs(gap) < best_gap) {
            best_gap = std::abs(gap);
            best_lambda = lambda;
        }
        // Converge to solver precision, then stop once Newton stalls.
        if (std::abs(gap) <= scale * std::min(tol, 1e-13)) break;
        if (gap > 0.0) hi = std::min(hi, lambda);
        else lo = std::max(lo, lambda);

        double step_lambda = lambda;
        if (m.variance > 0.0) step_lambda = lambda - gap / m.variance;
        if (!(step_lambda > lo && step_lambda < hi))
            step_lambda = 0.5 * (lo + hi);  // Newton left the bracket, bisect
        if (step_lambda == lambda) break;   // no representable progress
        lambda = step_lambda;
        m = tilted_moments(ws, lambda);
    }

    m = tilted_moments(ws, best_lambda);
    if (std::abs(m.mean - target) > scale * tol)
        raise(ErrorCode::NonConvergence, "solve_tilt: iteration budget exhausted at gap " +
                                             std::to_string(std::abs(m.mean - target) / scale));

    TiltSolution sol;
    sol.status = TiltStatus::Interior;
    sol.lambda = best_lambda / kWageUnit;
    sol.posterior = tilted_posterior(ws, best_lambda, problem.support.size());
    sol.achieved_mean = m.mean * kWageUnit;
    sol.kl_divergence = kl_divergence(sol.posterior, problem.prior);
    sol.iterations = iterations;
    return sol;
}

TiltProblem build_prior(const GroupedDistribution& regional) {
    double total = regional.total_employees();
    if (!(total > 0.0))
        raise(ErrorCode::EmptyDistribution, "build_prior: no employees in region " + regional.region);
    TiltProblem problem;
    problem.support.resize(regional.scheme.count());
    problem.prior.resize(regional.scheme.count());
    for (std::size_t k = 0; k < regional.scheme.count(); ++k) {
        problem.support[k] = regional.representative_wage(k);
        problem.prior[k] = regional.employees[k] / total;
    }
    problem.target_mean = regional.total_wage_mass() / total;
    return problem;
}

ImputedCell impute_cell(const CellAggregate& cell, const TiltProblem& prior_base,
                        const TierScheme& tiers, double tol) {
    if (!(cell.employees > 0.0))
        raise(ErrorCode::EmptyDistribution, "impute_cell: cell " + cell.cell_id() + " has no employees");
    TiltProblem problem = prior_base;
    problem.target_mean = cell.mean_wage;
    TiltSolution sol = solve_tilt(problem, tol);

    ImputedCell imputed;
    imputed.cell = cell;
    imputed.lambda = sol.lambda;
    imputed.status = sol.status;
    imputed.achieved_mean = sol.achieved_mean;
    imputed.kl_divergence = sol.kl_divergence;

    std::size_t n = problem.support.size();
    imputed.employees_by_bracket.resize(n);
    imputed.wage_bill_by_bracket.resize(n);
    double raw_bill = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        imputed.employees_by_bracket[k] = cell.employees * sol.posterior[k];
        imputed.wage_bill_by_bracket[k] = imputed.employees_by_bracket[k] * problem.support[k];
        raw_bill += imputed.wage_bill_by_bracket[k];
    }
    // One common factor reconciles the allocated wage bill with the cell
    // total; the tilted mean only matches to tol, the accounts must close.
    imputed.wage_bill_rescale = (raw_bill > 0.0) ? cell.wage_bill / raw_bill : 1.0;
    for (std::size_t k = 0; k < n; ++k) imputed.wage_bill_by_bracket[k] *= imputed.wage_bill_rescale;

    for (std::size_t k = 0; k < n; ++k) {
        int tier = tiers.tier_of(problem.support[k]);
        imputed.employees_by_tier[tier] += imputed.employees_by_bracket[k];
        imputed.wage_bill_by_tier[tier] += imputed.wage_bill_by_bracket[k];
    }
    return imputed;
}

ClosureReport validate_closure(const std::vector<ImputedCell>& imputed,
                               const std::vector<CellAggregate>& cells, double threshold) {
    if (imputed.size() != cells.size())
        raise(ErrorCode::IndexMismatch, "validate_closure: " + std::to_string(imputed.size()) +
                                            " imputed cells vs " + std::to_string(cells.size()) +
                                            " aggregates");
    ClosureReport report;
    report.threshold = threshold;
    for (std::size_t i = 0; i < imputed.size(); ++i) {
        if (imputed[i].cell.cell_id() != cells[i].cell_id() || imputed[i].cell.year != cells[i].year)
            raise(ErrorCode::IndexMismatch,
                  "validate_closure: cell order mismatch at index " + std::to_string(i));
        double emp = 0.0, bill = 0.0;
        for (double e : imputed[i].employees_by_bracket) emp += e;
        for (double b : imputed[i].wage_bill_by_bracket) bill += b;
        double emp_err = cells[i].employees > 0.0
                             ? std::abs(emp - cells[i].employees) / cells[i].employees
                             : std::abs(emp);
        double bill_err = cells[i].wage_bill > 0.0
                              ? std::abs(bill - cells[i].wage_bill) / cells[i].wage_bill
                              : std::abs(bill);
        if (emp_err > report.max_employee_error) report.max_employee_error = emp_err;
        if (bill_err > report.max_wage_bill_error) report.max_wage_bill_error = bill_err;
        if (emp_err >= threshold || bill_err >= threshold)
            report.failing_cells.push_back(cells[i].cell_id() + "@" + std::to_string(cells[i].year));
    }
    report.pass = report.max_employee_error < threshold && report.max_wage_bill_error < threshold;
    return report;
}

}  // namespace bitekit
