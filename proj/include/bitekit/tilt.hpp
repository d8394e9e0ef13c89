#pragma once

#include <optional>
#include <vector>

#include "bitekit/types.hpp"

namespace bitekit {

// Minimum-KL reweighting of a discrete prior subject to a mean constraint.
// The optimum has the exponential form p_k proportional to q_k exp(lambda w_k).
struct TiltProblem {
    std::vector<double> support;  // wage points, strictly increasing, real euros
    std::vector<double> prior;    // probabilities, sum 1, q_k >= 0
    double target_mean = 0.0;     // euros

    void validate() const;
};

enum class TiltStatus { Interior, CornerLow, CornerHigh, Degenerate };

const char* tilt_status_name(TiltStatus status);

struct TiltSolution {
    double lambda = 0.0;  // per euro; +-inf for corner solutions
    std::vector<double> posterior;
    double achieved_mean = 0.0;
    double kl_divergence = 0.0;  // nats
    TiltStatus status = TiltStatus::Interior;
    int iterations = 0;
};

// Solves for lambda by bracketed bisection with geometric bracket
// expansion, switching to safeguarded Newton once bracketed; the tilted
// mean is strictly increasing in lambda so the root is unique. Targets at
// or within `corner_slack` (relative) beyond the supported range collapse
// to corner solutions; farther targets raise InfeasibleTarget.
TiltSolution solve_tilt(const TiltProblem& problem, double tol = 1e-9);

// Tilted mean as a function of lambda (lambda in 1/euros). Exposed for
// the monotonicity property checks.
double tilted_mean(const TiltProblem& problem, double lambda);

// Prior construction from a regional distribution: support = implied mean
// wage per bracket (midpoint where empty), prior = employment shares.
TiltProblem build_prior(const GroupedDistribution& regional);

struct ImputedCell {
    CellAggregate cell;
    std::vector<double> employees_by_bracket;
    std::vector<double> wage_bill_by_bracket;
    std::array<double, 4> employees_by_tier{};
    std::array<double, 4> wage_bill_by_tier{};
    double lambda = 0.0;
    TiltStatus status = TiltStatus::Interior;
    double achieved_mean = 0.0;
    double kl_divergence = 0.0;
    double wage_bill_rescale = 1.0;
};

// Allocates a cell's employees and wage bill over the prior's wage grid by
// tilting the prior to the cell mean. The per-bracket wage bill gets one
// common rescale so its total matches the cell wage bill exactly; the
// factor is kept as a diagnostic.
ImputedCell impute_cell(const CellAggregate& cell, const TiltProblem& prior_base,
                        const TierScheme& tiers, double tol = 1e-9);

struct ClosureReport {
    double max_employee_error = 0.0;   // relative
    double max_wage_bill_error = 0.0;  // relative
    bool pass = false;
    double threshold = 1e-5;
    std::vector<std::string> failing_cells;
};

// Accounting validation: imputed totals must reproduce the administrative
// cell totals. Pass threshold defaults to 1e-5, well inside the 0.001%
// bound the pipeline is expected to beat.
ClosureReport validate_closure(const std::vector<ImputedCell>& imputed,
                               const std::vector<CellAggregate>& cells,
                               double threshold = 1e-5);

}  // namespace bitekit
