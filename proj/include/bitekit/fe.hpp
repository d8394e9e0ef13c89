#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bitekit/bite.hpp"
#include "bitekit/types.hpp"

namespace bitekit {

struct PanelObservation {
    std::string unit;
    int year = 0;
    double outcome = 0.0;  // log level
    std::map<std::string, double> covariates;
    std::string cluster;  // region id
};

enum class DesignKind { StaticDiD, EventStudy, TripleDiff };

const char* design_kind_name(DesignKind kind);
DesignKind design_kind_from_name(const std::string& name);

struct DesignSpec {
    DesignKind kind = DesignKind::StaticDiD;
    BiteMeasure treatment = BiteMeasure::Youth;
    int post_year = 2019;
    int reference_year = 2018;
    bool include_covariates = false;
    bool tourism_interactions = true;  // TripleDiff only
};

enum class CoefRole { TreatPost, TreatEvent, TourismEvent, Covariate };

struct Coefficient {
    std::string name;
    CoefRole role = CoefRole::TreatPost;
    int year = 0;  // event year for the interaction roles
    double estimate = 0.0;
    double se = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

struct FixedEffectsFit {
    DesignKind kind = DesignKind::StaticDiD;
    BiteMeasure treatment = BiteMeasure::Youth;
    int reference_year = 2018;
    int post_year = 2019;
    std::vector<Coefficient> coefficients;
    Eigen::MatrixXd vcov_clustered;
    double within_r2 = 0.0;
    int n_obs = 0;
    int n_clusters = 0;
    std::vector<double> residuals;  // in (unit, year)-sorted panel order

    const Coefficient* find(CoefRole role, int year) const;
    int coef_index(CoefRole role, int year) const;  // -1 when absent
};

struct WaldResult {
    double statistic = 0.0;  // F value
    int df_num = 0;
    int df_den = 0;
    double p_value = 1.0;
};

// Closed-form two-way demeaning, exact on balanced panels:
// v <- v_it - v-bar_i - v-bar_t + v-bar. Columns transformed in place.
void two_way_demean(Eigen::MatrixXd& columns, const std::vector<int>& unit_of,
                    const std::vector<int>& year_of, int n_units, int n_years);

// Demeaned design for a panel plus arbitrary regressor columns; validates
// balance. Observations are sorted by (unit, year) first so results do
// not depend on input row order.
struct DemeanedDesign {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    std::vector<std::string> column_names;
    std::vector<int> unit_of;
    std::vector<int> year_of;
    std::vector<int> cluster_of;
    std::vector<std::string> unit_ids;
    std::vector<int> years;
    std::vector<std::string> cluster_ids;
    bool unit_nested_in_cluster = true;
};

// OLS via column-pivoted QR; RankDeficient names the collinear columns.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const std::vector<std::string>& column_names);

// CR1 sandwich: c (X'X)^-1 [sum_g X_g'u_g u_g'X_g] (X'X)^-1 with
// c = [G/(G-1)] [(N-1)/(N-K)]. K is supplied by the caller: non-absorbed
// coefficients plus absorbed fixed effects not nested within clusters.
Eigen::MatrixXd cluster_vcov(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                             const std::vector<int>& cluster_of, int n_clusters, int dof_k);

// Full estimation path for one design: build interactions from the
// exposure table, absorb the two-way fixed effects, estimate, and attach
// cluster-robust inference (t with G-1 degrees of freedom).
FixedEffectsFit fit(const DesignSpec& design, const std::vector<PanelObservation>& panel,
                    const std::vector<ExposureVector>& exposures);

// Joint test that all pre-period event coefficients are zero:
// W = b' V^-1 b, F = W/q, p from F(q, G-1). Pre years default to every
// treatment event year before the reference.
WaldResult wald_pretrend_test(const FixedEffectsFit& fit,
                              const std::optional<std::vector<int>>& pre_years = std::nullopt);

}  // namespace bitekit
