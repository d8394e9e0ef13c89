#include "bitekit/fe.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "bitekit/log.hpp"

namespace bitekit {

const char* design_kind_name(DesignKind kind) {
    switch (kind) {
        case DesignKind::StaticDiD: return "static";
        case DesignKind::EventStudy: return "event";
        case DesignKind::TripleDiff: return "ddd";
    }
    return "?";
}

DesignKind design_kind_from_name(const std::string& name) {
    if (name == "static") return DesignKind::StaticDiD;
    if (name == "event") return DesignKind::EventStudy;
    if (name == "ddd") return DesignKind::TripleDiff;
    raise(ErrorCode::InvalidConfig, "unknown design '" + name + "'");
}

const Coefficient* FixedEffectsFit::find(CoefRole role, int year) const {
    for (const auto& c : coefficients)
        if (c.role == role && c.year == year) return &c;
    return nullptr;
}

int FixedEffectsFit::coef_index(CoefRole role, int year) const {
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        if (coefficients[i].role == role && coefficients[i].year == year)
            return static_cast<int>(i);
    return -1;
}

void two_way_demean(Eigen::MatrixXd& columns, const std::vector<int>& unit_of,
                    const std::vector<int>& year_of, int n_units, int n_years) {
    const Eigen::Index n = columns.rows();
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        Eigen::VectorXd unit_mean = Eigen::VectorXd::Zero(n_units);
        Eigen::VectorXd year_mean = Eigen::VectorXd::Zero(n_years);
        double grand = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double v = columns(i, c);
            unit_mean[unit_of[i]] += v;
            year_mean[year_of[i]] += v;
            grand += v;
        }
        unit_mean /= static_cast<double>(n_years);
        year_mean /= static_cast<double>(n_units);
        grand /= static_cast<double>(n);
        for (Eigen::Index i = 0; i < n; ++i)
            columns(i, c) += grand - unit_mean[unit_of[i]] - year_mean[year_of[i]];
    }
}

namespace {

struct IndexedPanel {
    std::vector<const PanelObservation*> rows;  // sorted by (unit, year)
    std::vector<int> unit_of;
    std::vector<int> year_of;
    std::vector<int> cluster_of;
    std::vector<std::string> unit_ids;
    std::vector<int> years;
    std::vector<std::string> cluster_ids;
    bool unit_nested_in_cluster = true;
};

IndexedPanel index_panel(const std::vector<PanelObservation>& panel) {
    if (panel.empty()) raise(ErrorCode::UnbalancedPanel, "panel is empty");
    IndexedPanel ix;
    ix.rows.reserve(panel.size());
    for (const auto& obs : panel) ix.rows.push_back(&obs);
    std::sort(ix.rows.begin(), ix.rows.end(), [](const auto* a, const auto* b) {
        return std::tie(a->unit, a->year) < std::tie(b->unit, b->year);
    });

    std::set<std::string> units;
    std::set<int> years;
    std::set<std::string> clusters;
    for (const auto* obs : ix.rows) {
        units.insert(obs->unit);
        years.insert(obs->year);
        clusters.insert(obs->cluster);
    }
    ix.unit_ids.assign(units.begin(), units.end());
    ix.years.assign(years.begin(), years.end());
    ix.cluster_ids.assign(clusters.begin(), clusters.end());

    if (ix.rows.size() != units.size() * years.size())
        raise(ErrorCode::UnbalancedPanel,
              "panel is not balanced: " + std::to_string(ix.rows.size()) + " rows vs " +
                  std::to_string(units.size()) + " units x " + std::to_string(years.size()) +
                  " years");

    std::map<std::string, int> unit_index, cluster_index;
    std::map<int, int> year_index;
    for (std::size_t i = 0; i < ix.unit_ids.size(); ++i) unit_index[ix.unit_ids[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < ix.years.size(); ++i) year_index[ix.years[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < ix.cluster_ids.size(); ++i)
        cluster_index[ix.cluster_ids[i]] = static_cast<int>(i);

    std::set<std::pair<int, int>> seen;
    std::vector<int> unit_cluster(ix.unit_ids.size(), -1);
    for (const auto* obs : ix.rows) {
        int u = unit_index[obs->unit];
        int t = year_index.at(obs->year);
        int g = cluster_index[obs->cluster];
        if (!seen.insert({u, t}).second)
            raise(ErrorCode::UnbalancedPanel,
                  "duplicate observation for unit " + obs->unit + " year " + std::to_string(obs->year));
        ix.unit_of.push_back(u);
        ix.year_of.push_back(t);
        ix.cluster_of.push_back(g);
        if (unit_cluster[u] == -1) unit_cluster[u] = g;
        else if (unit_cluster[u] != g) ix.unit_nested_in_cluster = false;
    }
    return ix;
}

}  // namespace

Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const std::vector<std::string>& column_names) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
        std::string collinear;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index j = qr.rank(); j < X.cols(); ++j) {
            if (!collinear.empty()) collinear += ", ";
            Eigen::Index col = perm[j];
            collinear += col < static_cast<Eigen::Index>(column_names.size())
                             ? column_names[col]
                             : ("col" + std::to_string(col));
        }
        raise(ErrorCode::RankDeficient, "design is rank deficient in: " + collinear);
    }
    return qr.solve(y);
}

Eigen::MatrixXd cluster_vcov(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                             const std::vector<int>& cluster_of, int n_clusters, int dof_k) {
    if (n_clusters < 2) raise(ErrorCode::SingleCluster, "cluster_vcov: need at least 2 clusters");
    const double n = static_cast<double>(X.rows());
    const double g = static_cast<double>(n_clusters);
    const double k = static_cast<double>(dof_k);
    if (!(n - k > 0.0))
        raise(ErrorCode::InvalidSpec, "cluster_vcov: nonpositive residual degrees of freedom");

    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n_clusters, X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        scores.row(cluster_of[i]) += residuals[i] * X.row(i);
    Eigen::MatrixXd meat = scores.transpose() * scores;

    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success)
        raise(ErrorCode::SingularSubmatrix, "cluster_vcov: X'X is singular");
    Eigen::MatrixXd bread = ldlt.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));

    const double c = (g / (g - 1.0)) * ((n - 1.0) / (n - k));
    Eigen::MatrixXd vcov = c * bread * meat * bread;
    return 0.5 * (vcov + vcov.transpose());  // enforce exact symmetry
}

FixedEffectsFit fit(const DesignSpec& design, const std::vector<PanelObservation>& panel,
                    const std::vector<ExposureVector>& exposures) {
    IndexedPanel ix = index_panel(panel);
    const int n_units = static_cast<int>(ix.unit_ids.size());
    const int n_years = static_cast<int>(ix.years.size());
    const Eigen::Index n = static_cast<Eigen::Index>(ix.rows.size());

    std::map<std::string, const ExposureVector*> exposure_of;
    for (const auto& e : exposures) exposure_of[e.unit] = &e;
    std::vector<double> d_of_unit(n_units), tourism_of_unit(n_units);
    for (int u = 0; u < n_units; ++u) {
        auto it = exposure_of.find(ix.unit_ids[u]);
        if (it == exposure_of.end())
            raise(ErrorCode::ExposureMissing, "no exposure for unit " + ix.unit_ids[u]);
        d_of_unit[u] = it->second->measure(design.treatment);
        tourism_of_unit[u] = it->second->tourism;
    }

    // Regressor columns, in a fixed order: treatment interactions first,
    // then tourism interactions, then covariates.
    std::vector<std::string> names;
    std::vector<CoefRole> roles;
    std::vector<int> coef_years;
    std::vector<std::string> covariate_names;
    if (design.include_covariates) {
        for (const auto& [name, value] : ix.rows.front()->covariates) covariate_names.push_back(name);
        if (covariate_names.empty())
            log_info("fit: covariates requested but none present; estimating without them");
    }

    if (design.kind == DesignKind::StaticDiD) {
        names.push_back(bite_measure_name(design.treatment) + std::string("_x_post"));
        roles.push_back(CoefRole::TreatPost);
        coef_years.push_back(design.post_year);
    } else {
        for (int year : ix.years) {
            if (year == design.reference_year) continue;
            names.push_back(bite_measure_name(design.treatment) + std::string("_x_") +
                            std::to_string(year));
            roles.push_back(CoefRole::TreatEvent);
            coef_years.push_back(year);
        }
        if (design.kind == DesignKind::TripleDiff && design.tourism_interactions) {
            for (int year : ix.years) {
                if (year == design.reference_year) continue;
                names.push_back("tourism_x_" + std::to_string(year));
                roles.push_back(CoefRole::TourismEvent);
                coef_years.push_back(year);
            }
        }
    }
    for (const auto& cov : covariate_names) {
        names.push_back(cov);
        roles.push_back(CoefRole::Covariate);
        coef_years.push_back(0);
    }

    if (names.empty()) raise(ErrorCode::InvalidSpec, "fit: design yields no regressors");

    const Eigen::Index k = static_cast<Eigen::Index>(names.size());
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const PanelObservation& obs = *ix.rows[i];
        y[i] = obs.outcome;
        if (!std::isfinite(obs.outcome))
            raise(ErrorCode::InvalidSpec,
                  "non-finite outcome for unit " + obs.unit + " year " + std::to_string(obs.year));
        int u = ix.unit_of[i];
        for (Eigen::Index j = 0; j < k; ++j) {
            switch (roles[j]) {
                case CoefRole::TreatPost:
                    X(i, j) = (obs.year >= design.post_year) ? d_of_unit[u] : 0.0;
                    break;
                case CoefRole::TreatEvent:
                    X(i, j) = (obs.year == coef_years[j]) ? d_of_unit[u] : 0.0;
                    break;
                case CoefRole::TourismEvent:
                    X(i, j) = (obs.year == coef_years[j]) ? tourism_of_unit[u] : 0.0;
                    break;
                case CoefRole::Covariate: {
                    auto it = obs.covariates.find(names[j]);
                    if (it == obs.covariates.end())
                        raise(ErrorCode::InvalidSpec, "observation missing covariate " + names[j]);
                    X(i, j) = it->second;
                    break;
                }
            }
        }
    }

    Eigen::MatrixXd stacked(n, k + 1);
    stacked.col(0) = y;
    if (k > 0) stacked.rightCols(k) = X;
    two_way_demean(stacked, ix.unit_of, ix.year_of, n_units, n_years);
    Eigen::VectorXd y_w = stacked.col(0);
    Eigen::MatrixXd x_w = stacked.rightCols(k);

    // Columns absorbed by the fixed effects survive only as rounding
    // noise; the relative-pivot rank test cannot see that, so compare
    // against the pre-demeaning scale directly.
    {
        std::string absorbed;
        for (Eigen::Index j = 0; j < k; ++j) {
            double before = X.col(j).norm();
            if (x_w.col(j).norm() <= 1e-10 * std::max(before, 1e-300)) {
                if (!absorbed.empty()) absorbed += ", ";
                absorbed += names[j];
            }
        }
        if (!absorbed.empty())
            raise(ErrorCode::RankDeficient,
                  "design is rank deficient (absorbed by fixed effects): " + absorbed);
    }

    Eigen::VectorXd beta = least_squares(x_w, y_w, names);
    Eigen::VectorXd resid = y_w - x_w * beta;

    double sst = y_w.squaredNorm();
    double ssr = resid.squaredNorm();
    double within_r2 = sst > 0.0 ? 1.0 - ssr / sst : 0.0;

    // CR1 degrees of freedom: slopes plus absorbed year effects; absorbed
    // unit effects are excluded when units nest inside clusters (the
    // applied convention for region-clustered region-by-sector panels).
    int dof_k = static_cast<int>(k) + (n_years - 1);
    if (!ix.unit_nested_in_cluster) dof_k += n_units;
    const int n_clusters = static_cast<int>(ix.cluster_ids.size());
    Eigen::MatrixXd vcov = cluster_vcov(x_w, resid, ix.cluster_of, n_clusters, dof_k);

    boost::math::students_t t_dist(static_cast<double>(n_clusters - 1));
    FixedEffectsFit out;
    out.kind = design.kind;
    out.treatment = design.treatment;
    out.reference_year = design.reference_year;
    out.post_year = design.post_year;
    out.vcov_clustered = vcov;
    out.within_r2 = within_r2;
    out.n_obs = static_cast<int>(n);
    out.n_clusters = n_clusters;
    out.residuals.assign(resid.data(), resid.data() + resid.size());
    for (Eigen::Index j = 0; j < k; ++j) {
        Coefficient c;
        c.name = names[j];
        c.role = roles[j];
        c.year = coef_years[j];
        c.estimate = beta[j];
        c.se = std::sqrt(std::max(0.0, vcov(j, j)));
        c.t_stat = c.se > 0.0 ? c.estimate / c.se : 0.0;
        c.p_value = c.se > 0.0 ? 2.0 * boost::math::cdf(boost::math::complement(
                                           t_dist, std::abs(c.t_stat)))
                               : 1.0;
        out.coefficients.push_back(std::move(c));
    }
    return out;
}

WaldResult wald_pretrend_test(const FixedEffectsFit& fit,
                              const std::optional<std::vector<int>>& pre_years) {
    std::vector<int> selected;
    if (pre_years.has_value()) {
        selected = *pre_years;
    } else {
        for (const auto& c : fit.coefficients)
            if (c.role == CoefRole::TreatEvent && c.year < fit.reference_year)
                selected.push_back(c.year);
    }
    if (selected.empty())
        raise(ErrorCode::NoPrePeriods, "wald_pretrend_test: no pre-period coefficients");

    const int q = static_cast<int>(selected.size());
    Eigen::VectorXd b(q);
    Eigen::MatrixXd v(q, q);
    std::vector<int> idx(q);
    for (int a = 0; a < q; ++a) {
        int i = fit.coef_index(CoefRole::TreatEvent, selected[a]);
        if (i < 0)
            raise(ErrorCode::NoPrePeriods,
                  "wald_pretrend_test: no event coefficient for year " + std::to_string(selected[a]));
        idx[a] = i;
        b[a] = fit.coefficients[i].estimate;
    }
    for (int a = 0; a < q; ++a)
        for (int c = 0; c < q; ++c) v(a, c) = fit.vcov_clustered(idx[a], idx[c]);

    Eigen::LDLT<Eigen::MatrixXd> ldlt(v);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        raise(ErrorCode::SingularSubmatrix, "wald_pretrend_test: vcov submatrix not positive definite");
    double wald = b.dot(ldlt.solve(b));

    WaldResult result;
    result.statistic = wald / static_cast<double>(q);
    result.df_num = q;
    result.df_den = fit.n_clusters - 1;
    boost::math::fisher_f f_dist(static_cast<double>(result.df_num),
                                 static_cast<double>(result.df_den));
    result.p_value = boost::math::cdf(boost::math::complement(f_dist, result.statistic));
    return result;
}

}  // namespace bitekit
