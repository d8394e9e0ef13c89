#include "bitekit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"

#include "bitekit/csv.hpp"
#include "bitekit/dist.hpp"
#include "bitekit/log.hpp"
#include "bitekit/svg.hpp"
#include "bitekit/version.hpp"

namespace bitekit {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ordered_json parse_json_file(const std::string& path) {
    try {
        return ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
    ordered_json doc = parse_json_file(path);
    PipelineConfig config;
    try {
        const auto& inputs = doc.at("inputs");
        config.modelo100 = inputs.at("modelo100").get<std::string>();
        config.modelo190 = inputs.at("modelo190").get<std::string>();
        config.modelo390 = inputs.value("modelo390", std::string{});
        config.cpi = inputs.at("cpi").get<std::string>();
        config.mapping = inputs.at("mapping").get<std::string>();
        config.deflator_base_year = doc.value("deflator_base_year", 2019);
        for (const auto& [year, value] : doc.at("smi_nominal_by_year").items())
            config.smi_nominal_by_year[std::stoi(year)] = value.get<double>();
        if (doc.contains("tiers")) {
            config.tier_thresholds = std::array<double, 3>{
                doc["tiers"].at("t1_max").get<double>(), doc["tiers"].at("t2_max").get<double>(),
                doc["tiers"].at("t3_max").get<double>()};
        }
        if (doc.contains("bites")) {
            config.bites.clear();
            for (const auto& b : doc["bites"]) config.bites.push_back(bite_measure_from_name(b));
        }
        if (doc.contains("designs")) {
            config.designs.clear();
            for (const auto& d : doc["designs"]) config.designs.push_back(design_kind_from_name(d));
        }
        if (doc.contains("outcomes"))
            config.outcomes = doc["outcomes"].get<std::vector<std::string>>();
        config.first_year = doc.at("years").at("first").get<int>();
        config.last_year = doc.at("years").at("last").get<int>();
        config.reference_year = doc.value("reference_year", 2018);
        config.post_year = doc.value("post_year", 2019);
        if (doc.contains("tourism")) {
            if (doc["tourism"].contains("codes")) {
                config.tourism_codes.clear();
                for (const auto& c : doc["tourism"]["codes"]) config.tourism_codes.insert(c.get<int>());
            }
            config.tourism_sector = doc["tourism"].value("sector", 4);
        }
        if (doc.contains("sensitivity")) {
            const auto& s = doc["sensitivity"];
            if (s.contains("mbar_grid"))
                config.sensitivity.mbar_grid = s["mbar_grid"].get<std::vector<double>>();
            config.sensitivity.alpha = s.value("alpha", 0.05);
            config.sensitivity.target_year = s.value("target_year", config.post_year);
        } else {
            config.sensitivity.target_year = config.post_year;
        }
        config.tilt_tol = doc.value("tilt_tol", 1e-9);
        config.out_dir = doc.value("out_dir", std::string{"out"});
        config.seed = doc.value("seed", 0ull);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
    config.config_hash = hash_hex(fnv1a64(doc.dump()));
    config.validate();
    return config;
}

void PipelineConfig::validate() const {
    if (first_year > last_year) raise(ErrorCode::InvalidConfig, "empty year range");
    if (!(reference_year < post_year))
        raise(ErrorCode::InvalidConfig, "reference year must precede the post year");
    for (int year = first_year; year <= last_year; ++year)
        if (!smi_nominal_by_year.count(year))
            raise(ErrorCode::InvalidConfig,
                  "smi series does not cover year " + std::to_string(year));
    sensitivity.validate();
    if (out_dir.empty()) raise(ErrorCode::InvalidConfig, "out_dir must not be empty");
}

double PipelineConfig::smi_real(int year, const Deflator& d) const {
    auto it = smi_nominal_by_year.find(year);
    if (it == smi_nominal_by_year.end())
        raise(ErrorCode::UnknownYear, "no wage floor configured for year " + std::to_string(year));
    return deflate(it->second, year, d);
}

TierScheme PipelineConfig::tiers(const Deflator& d) const {
    if (tier_thresholds.has_value()) {
        TierScheme tiers;
        tiers.thresholds = *tier_thresholds;
        tiers.validate();
        return tiers;
    }
    return TierScheme::from_wage_floors(smi_real(reference_year, d), smi_real(post_year, d));
}

LoadedData load_inputs(const PipelineConfig& config) {
    LoadedData data;
    data.mapping = load_mapping(config.mapping);
    data.deflator = load_deflator(config.cpi, config.deflator_base_year);
    data.distributions =
        load_grouped_distributions(config.modelo100, BracketScheme::census_default());
    data.cells = load_cell_aggregates(config.modelo190, data.mapping);
    if (!config.modelo390.empty())
        data.firm_rows = load_firm_outcomes(config.modelo390, data.mapping);
    deflate_distributions(data.distributions, data.deflator);
    deflate_cells(data.cells, data.deflator);
    deflate_firm_outcomes(data.firm_rows, data.deflator);
    data.tourism_shares =
        tourism_employment_shares(config.modelo190, config.tourism_codes, config.post_year);
    // Harmonize tourism-share region ids the same way the loaders do.
    if (!data.mapping.region_map.empty()) {
        std::map<std::string, double> harmonized;
        for (const auto& [region, share] : data.tourism_shares)
            harmonized[data.mapping.harmonize_region(region)] = share;
        data.tourism_shares = std::move(harmonized);
    }
    return data;
}

ImputationResult run_imputation(const PipelineConfig& config, const LoadedData& data,
                                int threads) {
    validate_balanced_panel(data.cells, config.first_year, config.last_year);

    // One prior per region-year.
    std::map<std::pair<std::string, int>, TiltProblem> prior_of;
    for (const auto& dist : data.distributions)
        prior_of.emplace(std::make_pair(dist.region, dist.year), build_prior(dist));

    ImputationResult result;
    TierScheme tiers = config.tiers(data.deflator);
    for (const auto& dist : data.distributions)
        if (dist.year == config.reference_year)
            result.support_by_region[dist.region] = prior_of.at({dist.region, dist.year}).support;

    result.imputed.resize(data.cells.size());
    auto solve_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const CellAggregate& cell = data.cells[i];
            auto it = prior_of.find({cell.region, cell.year});
            if (it == prior_of.end())
                raise(ErrorCode::IndexMismatch, "no regional distribution for " + cell.region +
                                                    " year " + std::to_string(cell.year));
            result.imputed[i] = impute_cell(cell, it->second, tiers, config.tilt_tol);
        }
    };

    int n_threads = std::max(1, threads);
    if (n_threads == 1 || data.cells.size() < 64) {
        solve_range(0, data.cells.size());
    } else {
        // Preassigned output slots keep results identical at any thread count.
        std::vector<std::thread> workers;
        std::size_t chunk = (data.cells.size() + n_threads - 1) / n_threads;
        for (int w = 0; w < n_threads; ++w) {
            std::size_t begin = w * chunk;
            std::size_t end = std::min(data.cells.size(), begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(solve_range, begin, end);
        }
        for (auto& worker : workers) worker.join();
    }

    result.closure = validate_closure(result.imputed, data.cells);
    return result;
}

std::vector<ExposureVector> compute_exposures(const PipelineConfig& config, const LoadedData& data,
                                              const ImputationResult& imputation) {
    ExposureInputs inputs;
    for (std::size_t i = 0; i < data.cells.size(); ++i)
        if (data.cells[i].year == config.reference_year)
            inputs.imputed.push_back(imputation.imputed[i]);
    inputs.support_by_region = imputation.support_by_region;
    inputs.tiers = config.tiers(data.deflator);
    inputs.floor_pre = config.smi_real(config.reference_year, data.deflator);
    inputs.floor_post = config.smi_real(config.post_year, data.deflator);
    inputs.tourism_shares = data.tourism_shares;
    inputs.tourism_sector = config.tourism_sector;
    return build_exposures(inputs);
}

std::vector<PanelObservation> employment_panel(const std::vector<CellAggregate>& cells,
                                               AgeGroup group) {
    std::vector<PanelObservation> panel;
    for (const auto& cell : cells) {
        if (cell.age_group != group) continue;
        if (!(cell.employees > 0.0))
            raise(ErrorCode::InvalidSpec,
                  "employment panel: nonpositive employment in " + cell.cell_id());
        PanelObservation obs;
        obs.unit = cell.unit_id();
        obs.year = cell.year;
        obs.outcome = std::log(cell.employees);
        obs.cluster = cell.region;
        panel.push_back(std::move(obs));
    }
    return panel;
}

std::vector<PanelObservation> firm_outcome_panel(const std::vector<FirmOutcomeRow>& rows,
                                                 const std::string& outcome) {
    std::vector<PanelObservation> panel;
    for (const auto& row : rows) {
        double value = outcome == "firms" ? row.n_firms : row.sales;
        if (!(value > 0.0))
            raise(ErrorCode::InvalidSpec, "panel: nonpositive " + outcome + " in " +
                                              make_unit_id(row.region, row.sector));
        PanelObservation obs;
        obs.unit = make_unit_id(row.region, row.sector);
        obs.year = row.year;
        obs.outcome = std::log(value);
        obs.cluster = row.region;
        panel.push_back(std::move(obs));
    }
    return panel;
}

// ---------------------------------------------------------------------------
// Stage drivers
// ---------------------------------------------------------------------------

namespace {

void write_error_json(const std::string& path, const Error& e) {
    ordered_json doc;
    doc["error"]["code"] = e.code_name();
    doc["error"]["message"] = e.what();
    write_text_file(path, doc.dump(2) + "\n");
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::RankDeficient:
        case ErrorCode::SingleCluster:
        case ErrorCode::SingularSubmatrix:
        case ErrorCode::ExposureMissing:
        case ErrorCode::MissingTarget:
        case ErrorCode::NoPrePeriods:
            return 3;
        default:
            return 2;
    }
}

void write_imputed_csv(const PipelineConfig& config, const std::vector<ImputedCell>& imputed,
                       const std::string& path) {
    CsvWriter w(path);
    w.comment("config_hash=" + config.config_hash);
    w.row({"region", "sector", "age_group", "year", "employees", "wage_bill", "emp_t1", "emp_t2",
           "emp_t3", "emp_t4", "bill_t1", "bill_t2", "bill_t3", "bill_t4"});
    for (const auto& cell : imputed) {
        std::vector<std::string> fields = {
            cell.cell.region, std::to_string(cell.cell.sector), age_group_name(cell.cell.age_group),
            std::to_string(cell.cell.year), fmt_double(cell.cell.employees),
            fmt_double(cell.cell.wage_bill)};
        for (double e : cell.employees_by_tier) fields.push_back(fmt_double(e));
        for (double b : cell.wage_bill_by_tier) fields.push_back(fmt_double(b));
        w.row(fields);
    }
}

void write_tilt_diagnostics(const PipelineConfig& config, const std::vector<ImputedCell>& imputed,
                            const std::string& path) {
    CsvWriter w(path);
    w.comment("config_hash=" + config.config_hash);
    w.row({"cell", "year", "lambda", "status", "achieved_mean", "kl_divergence",
           "wage_bill_rescale"});
    for (const auto& cell : imputed)
        w.row({cell.cell.cell_id(), std::to_string(cell.cell.year), fmt_double(cell.lambda),
               tilt_status_name(cell.status), fmt_double(cell.achieved_mean),
               fmt_double(cell.kl_divergence), fmt_double(cell.wage_bill_rescale)});
}

ordered_json closure_json(const PipelineConfig& config, const ClosureReport& closure) {
    ordered_json doc;
    doc["config_hash"] = config.config_hash;
    doc["max_employee_error"] = closure.max_employee_error;
    doc["max_wage_bill_error"] = closure.max_wage_bill_error;
    doc["threshold"] = closure.threshold;
    doc["pass"] = closure.pass;
    doc["failing_cells"] = closure.failing_cells;
    return doc;
}

void write_exposures_csv(const PipelineConfig& config, const std::vector<ExposureVector>& exposures,
                         const std::string& path) {
    CsvWriter w(path);
    w.comment("config_hash=" + config.config_hash);
    w.row({"unit", "region", "sector", "d_youth", "d_gap", "d_kaitz", "d_sectoral", "tourism"});
    for (const auto& e : exposures)
        w.row({e.unit, e.region, std::to_string(e.sector), fmt_double(e.d_youth),
               fmt_double(e.d_gap), fmt_double(e.d_kaitz), fmt_double(e.d_sectoral),
               fmt_double(e.tourism)});
}

ordered_json fit_json(const PipelineConfig& config, const DesignSpec& design,
                      const std::string& outcome, const FixedEffectsFit& fit) {
    ordered_json doc;
    doc["config_hash"] = config.config_hash;
    doc["design"] = design_kind_name(design.kind);
    doc["bite"] = bite_measure_name(design.treatment);
    doc["outcome"] = outcome;
    doc["reference_year"] = fit.reference_year;
    doc["post_year"] = fit.post_year;
    doc["n_obs"] = fit.n_obs;
    doc["n_clusters"] = fit.n_clusters;
    doc["within_r2"] = fit.within_r2;
    for (const auto& c : fit.coefficients) {
        ordered_json coef;
        coef["name"] = c.name;
        coef["role"] = static_cast<int>(c.role);
        coef["year"] = c.year;
        coef["estimate"] = c.estimate;
        coef["se"] = c.se;
        coef["t"] = c.t_stat;
        coef["p"] = c.p_value;
        doc["coefficients"].push_back(coef);
    }
    if (design.kind != DesignKind::StaticDiD) {
        try {
            WaldResult wald = wald_pretrend_test(fit);
            doc["wald_pretrend"]["f"] = wald.statistic;
            doc["wald_pretrend"]["df_num"] = wald.df_num;
            doc["wald_pretrend"]["df_den"] = wald.df_den;
            doc["wald_pretrend"]["p"] = wald.p_value;
        } catch (const Error& e) {
            doc["wald_pretrend"]["error"] = e.what();
        }
    }
    return doc;
}

// Reconstructs the slices of a fit that the sensitivity stage needs.
FixedEffectsFit fit_from_json(const ordered_json& doc) {
    FixedEffectsFit fit;
    fit.kind = design_kind_from_name(doc.at("design").get<std::string>());
    fit.treatment = bite_measure_from_name(doc.at("bite").get<std::string>());
    fit.reference_year = doc.at("reference_year").get<int>();
    fit.post_year = doc.at("post_year").get<int>();
    fit.n_obs = doc.at("n_obs").get<int>();
    fit.n_clusters = doc.at("n_clusters").get<int>();
    fit.within_r2 = doc.at("within_r2").get<double>();
    for (const auto& coef : doc.at("coefficients")) {
        Coefficient c;
        c.name = coef.at("name").get<std::string>();
        c.role = static_cast<CoefRole>(coef.at("role").get<int>());
        c.year = coef.at("year").get<int>();
        c.estimate = coef.at("estimate").get<double>();
        c.se = coef.at("se").get<double>();
        c.t_stat = coef.at("t").get<double>();
        c.p_value = coef.at("p").get<double>();
        fit.coefficients.push_back(std::move(c));
    }
    return fit;
}

std::string fit_stem(const DesignSpec& design, const std::string& outcome) {
    return std::string(bite_measure_name(design.treatment)) + "_" +
           design_kind_name(design.kind) + "_" + outcome;
}

void write_event_csv(const PipelineConfig& config, const FixedEffectsFit& fit,
                     const std::string& path) {
    CsvWriter w(path);
    w.comment("config_hash=" + config.config_hash);
    w.row({"year", "estimate", "ci_low", "ci_high"});
    // Reference year plotted at zero by construction.
    std::vector<std::pair<int, const Coefficient*>> events;
    for (const auto& c : fit.coefficients)
        if (c.role == CoefRole::TreatEvent) events.emplace_back(c.year, &c);
    events.emplace_back(fit.reference_year, nullptr);
    std::sort(events.begin(), events.end());
    const double crit = fit.n_clusters > 1
                            ? boost::math::quantile(
                                  boost::math::students_t(fit.n_clusters - 1.0), 0.975)
                            : 1.96;
    for (const auto& [year, coef] : events) {
        if (coef == nullptr) {
            w.row({std::to_string(year), "0", "0", "0"});
        } else {
            w.row({std::to_string(year), fmt_double(coef->estimate),
                   fmt_double(coef->estimate - crit * coef->se),
                   fmt_double(coef->estimate + crit * coef->se)});
        }
    }
}

}  // namespace

int cmd_impute(const PipelineConfig& config, int threads) {
    fs::create_directories(config.out_dir);
    try {
        LoadedData data = load_inputs(config);
        ImputationResult imputation = run_imputation(config, data, threads);
        write_imputed_csv(config, imputation.imputed, config.out_dir + "/imputed_cells.csv");
        write_tilt_diagnostics(config, imputation.imputed, config.out_dir + "/tilt_diagnostics.csv");
        write_text_file(config.out_dir + "/closure_report.json",
                        closure_json(config, imputation.closure).dump(2) + "\n");
        if (!imputation.closure.pass) {
            log_error("closure validation failed; see closure_report.json");
            return 2;
        }
        return 0;
    } catch (const Error& e) {
        write_error_json(config.out_dir + "/error.json", e);
        log_error(e.what());
        return exit_code_for(e);
    }
}

int cmd_bite(const PipelineConfig& config, int threads) {
    fs::create_directories(config.out_dir);
    try {
        LoadedData data = load_inputs(config);
        ImputationResult imputation = run_imputation(config, data, threads);
        auto exposures = compute_exposures(config, data, imputation);
        write_exposures_csv(config, exposures, config.out_dir + "/exposures.csv");

        ExposureDescriptives desc = exposure_descriptives(exposures);
        ordered_json doc;
        doc["config_hash"] = config.config_hash;
        doc["n_units"] = desc.n_units;
        for (const auto& m : desc.measures) {
            ordered_json row;
            row["mean"] = m.mean;
            row["median"] = m.median;
            row["sd"] = m.sd;
            row["cv"] = m.cv;
            row["min"] = m.min;
            row["p25"] = m.p25;
            row["p75"] = m.p75;
            row["max"] = m.max;
            doc["measures"][m.name] = row;
        }
        for (std::size_t a = 0; a < desc.measures.size(); ++a)
            for (std::size_t b = 0; b < desc.measures.size(); ++b) {
                double r = desc.correlation[a][b];
                doc["correlation"][desc.measures[a].name][desc.measures[b].name] =
                    std::isfinite(r) ? ordered_json(r) : ordered_json(nullptr);
            }
        doc["has_undefined_correlations"] = desc.has_undefined_correlations;
        // Raw (pre-standardization) tourism shares, for reference alongside
        // the standardized scores used in estimation.
        for (const auto& e : exposures)
            doc["tourism_raw"][e.unit] = e.tourism_raw;
        write_text_file(config.out_dir + "/exposure_descriptives.json", doc.dump(2) + "\n");
        return 0;
    } catch (const Error& e) {
        write_error_json(config.out_dir + "/error.json", e);
        log_error(e.what());
        return exit_code_for(e);
    }
}

int cmd_estimate(const PipelineConfig& config, int threads) {
    fs::create_directories(config.out_dir + "/fits");
    LoadedData data;
    std::vector<ExposureVector> exposures;
    try {
        data = load_inputs(config);
        ImputationResult imputation = run_imputation(config, data, threads);
        exposures = compute_exposures(config, data, imputation);
    } catch (const Error& e) {
        write_error_json(config.out_dir + "/error.json", e);
        log_error(e.what());
        return exit_code_for(e);
    }

    std::map<std::string, std::vector<PanelObservation>> panels;
    for (const auto& outcome : config.outcomes) {
        try {
            if (outcome == "employment")
                panels[outcome] = employment_panel(data.cells);
            else
                panels[outcome] = firm_outcome_panel(data.firm_rows, outcome);
        } catch (const Error& e) {
            log_warn("skipping outcome " + outcome + ": " + e.what());
        }
    }

    int successes = 0, failures = 0;
    std::map<std::string, std::pair<double, double>> static_row;  // bite -> (est, se)
    std::map<std::string, std::pair<int, double>> static_meta;    // bite -> (nobs, r2)

    for (const auto& outcome : config.outcomes) {
        if (!panels.count(outcome)) continue;
        // Event-study panels per bite, one figure per outcome.
        std::vector<PlotPanel> event_panels;
        for (BiteMeasure bite : config.bites) {
            for (DesignKind kind : config.designs) {
                DesignSpec design;
                design.kind = kind;
                design.treatment = bite;
                design.post_year = config.post_year;
                design.reference_year = config.reference_year;
                std::string stem = fit_stem(design, outcome);
                try {
                    FixedEffectsFit f = fit(design, panels[outcome], exposures);
                    write_text_file(config.out_dir + "/fits/" + stem + ".json",
                                    fit_json(config, design, outcome, f).dump(2) + "\n");
                    if (kind != DesignKind::StaticDiD)
                        write_event_csv(config, f,
                                        config.out_dir + "/fits/" + stem + "_events.csv");
                    if (kind == DesignKind::StaticDiD) {
                        const Coefficient* c = f.find(CoefRole::TreatPost, config.post_year);
                        if (c != nullptr && outcome == "employment") {
                            static_row[bite_measure_name(bite)] = {c->estimate, c->se};
                            static_meta[bite_measure_name(bite)] = {f.n_obs, f.within_r2};
                        }
                    }
                    if (kind == DesignKind::EventStudy) {
                        PlotPanel panel;
                        panel.title = bite_measure_name(bite);
                        panel.x_label = "year";
                        panel.draw_vline = true;
                        panel.vline_x = static_cast<double>(config.post_year);
                        const double crit = boost::math::quantile(
                            boost::math::students_t(f.n_clusters - 1.0), 0.975);
                        for (const auto& c : f.coefficients) {
                            if (c.role != CoefRole::TreatEvent) continue;
                            panel.points.push_back({static_cast<double>(c.year), c.estimate,
                                                    c.estimate - crit * c.se,
                                                    c.estimate + crit * c.se});
                        }
                        panel.points.push_back(
                            {static_cast<double>(config.reference_year), 0.0, 0.0, 0.0});
                        std::sort(panel.points.begin(), panel.points.end(),
                                  [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
                        event_panels.push_back(std::move(panel));
                    }
                    ++successes;
                } catch (const Error& e) {
                    write_error_json(config.out_dir + "/fits/" + stem + "_error.json", e);
                    log_warn("fit " + stem + " failed: " + std::string(e.what()));
                    ++failures;
                }
            }
        }
        if (!event_panels.empty())
            write_text_file(config.out_dir + "/event_study_" + outcome + ".svg",
                            render_panels("event-study estimates: " + outcome, event_panels));
    }

    // Static estimates with the treatment definitions across the columns.
    std::ostringstream summary;
    summary << "static estimates by treatment definition (outcome: employment)\n";
    summary << "config_hash: " << config.config_hash << "\n\n";
    std::vector<std::string> order;
    for (BiteMeasure bite : config.bites) order.push_back(bite_measure_name(bite));
    auto emit_row = [&](const std::string& label, auto value_of) {
        char cell[48];
        std::snprintf(cell, sizeof(cell), "%-22s", label.c_str());
        summary << cell;
        for (const auto& bite : order) {
            if (static_row.count(bite)) {
                std::snprintf(cell, sizeof(cell), " %14s", value_of(bite).c_str());
                summary << cell;
            } else {
                summary << std::string(15, ' ');
            }
        }
        summary << "\n";
    };
    {
        char cell[48];
        std::snprintf(cell, sizeof(cell), "%-22s", "");
        summary << cell;
        for (const auto& bite : order) {
            std::snprintf(cell, sizeof(cell), " %14s", bite.c_str());
            summary << cell;
        }
        summary << "\n";
    }
    auto fmt = [](double v, const char* format) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), format, v);
        return std::string(buf);
    };
    emit_row("treatment x post", [&](const std::string& b) { return fmt(static_row[b].first, "%.4f"); });
    emit_row("(clustered se)", [&](const std::string& b) { return "(" + fmt(static_row[b].second, "%.4f") + ")"; });
    emit_row("observations", [&](const std::string& b) { return std::to_string(static_meta[b].first); });
    emit_row("within r2", [&](const std::string& b) { return fmt(static_meta[b].second, "%.4f"); });
    write_text_file(config.out_dir + "/estimate_summary.txt", summary.str());

    if (successes == 0 && failures > 0) return 3;
    return 0;
}

int cmd_honest(const PipelineConfig& config) {
    fs::create_directories(config.out_dir);
    try {
        std::vector<PlotPanel> panels;
        for (BiteMeasure bite : config.bites) {
            std::string stem = std::string(bite_measure_name(bite)) + "_event_employment";
            std::string fit_path = config.out_dir + "/fits/" + stem + ".json";
            if (!fs::exists(fit_path))
                raise(ErrorCode::MissingFit, "event-study fit not found: " + fit_path +
                                                 " (run the estimate stage first)");
            FixedEffectsFit f = fit_from_json(parse_json_file(fit_path));
            auto curve = sensitivity_curve(f, config.sensitivity);
            BreakdownPoint breakdown = breakdown_mbar(f, config.sensitivity);

            CsvWriter w(config.out_dir + "/sensitivity_" + bite_measure_name(bite) + ".csv");
            w.comment("config_hash=" + config.config_hash);
            w.row({"measure", "mbar", "lower", "upper", "contains_zero"});
            for (const auto& interval : curve)
                w.row({bite_measure_name(bite), fmt_double(interval.mbar),
                       fmt_double(interval.lower), fmt_double(interval.upper),
                       (interval.lower <= 0.0 && interval.upper >= 0.0) ? "1" : "0"});

            ordered_json doc;
            doc["config_hash"] = config.config_hash;
            doc["measure"] = bite_measure_name(bite);
            doc["breakdown_mbar"] = breakdown.unbounded ? ordered_json(nullptr)
                                                        : ordered_json(breakdown.mbar_star);
            doc["unbounded"] = breakdown.unbounded;
            write_text_file(
                config.out_dir + "/breakdown_" + bite_measure_name(bite) + ".json",
                doc.dump(2) + "\n");

            PlotPanel panel;
            panel.title = bite_measure_name(bite);
            panel.x_label = "mbar";
            for (const auto& interval : curve) {
                double mid = 0.5 * (interval.lower + interval.upper);
                panel.points.push_back({interval.mbar, mid, interval.lower, interval.upper});
            }
            panels.push_back(std::move(panel));
        }
        write_text_file(config.out_dir + "/sensitivity_panels.svg",
                        render_panels("robust confidence intervals by trend allowance", panels));
        return 0;
    } catch (const Error& e) {
        write_error_json(config.out_dir + "/error.json", e);
        log_error(e.what());
        return exit_code_for(e);
    }
}

int cmd_report(const PipelineConfig& config) {
    fs::create_directories(config.out_dir);
    try {
        std::ostringstream report;
        report << "=== grouped-wage minimum-wage analysis report ===\n";
        report << "config_hash: " << config.config_hash << "\n";
        report << "toolkit_version: " << BITEKIT_VERSION << "\n";
        report << "seed: " << config.seed << "\n";
        auto now = std::chrono::system_clock::now();
        report << "generated_at: "
               << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
               << "\n\n";

        LoadedData data = load_inputs(config);

        report << "[macro context by year]\n";
        report << "year  floor_real  mean_wage  kaitz_pct  bite_pct  gini\n";
        for (int year = config.first_year; year <= config.last_year; ++year) {
            // National aggregates over the regional distributions.
            GroupedDistribution national;
            national.scheme = BracketScheme::census_default();
            national.employees.assign(national.scheme.count(), 0.0);
            national.wage_mass.assign(national.scheme.count(), 0.0);
            national.region = "(all)";
            national.year = year;
            bool any = false;
            for (const auto& dist : data.distributions) {
                if (dist.year != year) continue;
                any = true;
                for (std::size_t k = 0; k < dist.scheme.count(); ++k) {
                    national.employees[k] += dist.employees[k];
                    national.wage_mass[k] += dist.wage_mass[k];
                }
            }
            if (!any) continue;
            double floor_real = config.smi_real(year, data.deflator);
            double mean = grouped_mean(national);
            KaitzRatio kaitz = kaitz_ratio(floor_real, mean);
            EffectiveBite bite = effective_bite(national, floor_real);
            double gini = grouped_gini(national);
            char line[160];
            std::snprintf(line, sizeof(line), "%d  %10.0f  %9.0f  %8.1f  %8.1f  %.3f\n", year,
                          floor_real, mean, 100.0 * kaitz.ratio, bite.percentile, gini);
            report << line;
        }
        report << "\n";

        std::string desc_path = config.out_dir + "/exposure_descriptives.json";
        if (fs::exists(desc_path)) {
            ordered_json desc = parse_json_file(desc_path);
            report << "[treatment intensity descriptives over " << desc.value("n_units", 0)
                   << " units]\n";
            report << "measure    mean     median   sd       cv       min      p25      p75      max\n";
            for (const auto& [name, m] : desc.at("measures").items()) {
                char line[200];
                std::snprintf(line, sizeof(line),
                              "%-9s %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f\n",
                              name.c_str(), m.value("mean", 0.0), m.value("median", 0.0),
                              m.value("sd", 0.0), m.value("cv", 0.0), m.value("min", 0.0),
                              m.value("p25", 0.0), m.value("p75", 0.0), m.value("max", 0.0));
                report << line;
            }
            report << "\n";
        } else {
            report << "[treatment intensity descriptives] missing (run the bite stage)\n\n";
        }

        bool any_fit = false;
        report << "[fits]\n";
        if (fs::exists(config.out_dir + "/fits")) {
            std::vector<std::string> fit_files;
            for (const auto& entry : fs::directory_iterator(config.out_dir + "/fits"))
                if (entry.path().extension() == ".json" &&
                    entry.path().string().find("_error") == std::string::npos)
                    fit_files.push_back(entry.path().string());
            std::sort(fit_files.begin(), fit_files.end());
            for (const auto& path : fit_files) {
                ordered_json doc = parse_json_file(path);
                any_fit = true;
                report << doc.value("bite", "?") << " x " << doc.value("design", "?") << " x "
                       << doc.value("outcome", "?") << ": n=" << doc.value("n_obs", 0)
                       << " clusters=" << doc.value("n_clusters", 0)
                       << " within_r2=" << doc.value("within_r2", 0.0) << "\n";
                if (doc.contains("wald_pretrend") && doc["wald_pretrend"].contains("f")) {
                    char line[120];
                    std::snprintf(line, sizeof(line),
                                  "  wald pre-trend: F(%d,%d) = %.2f, p = %.4g\n",
                                  doc["wald_pretrend"].value("df_num", 0),
                                  doc["wald_pretrend"].value("df_den", 0),
                                  doc["wald_pretrend"].value("f", 0.0),
                                  doc["wald_pretrend"].value("p", 1.0));
                    report << line;
                }
                for (const auto& coef : doc.at("coefficients")) {
                    char line[160];
                    std::snprintf(line, sizeof(line), "  %-22s % .4f (%.4f) t=% .2f p=%.4g\n",
                                  coef.value("name", std::string{"?"}).c_str(),
                                  coef.value("estimate", 0.0), coef.value("se", 0.0),
                                  coef.value("t", 0.0), coef.value("p", 1.0));
                    report << line;
                }
            }
        }
        if (!any_fit) report << "(no fits found; run the estimate stage)\n";
        report << "\n";

        report << "[sensitivity to trend violations]\n";
        bool any_sens = false;
        for (BiteMeasure bite : config.bites) {
            std::string path =
                config.out_dir + "/breakdown_" + bite_measure_name(bite) + ".json";
            if (!fs::exists(path)) continue;
            any_sens = true;
            ordered_json doc = parse_json_file(path);
            report << bite_measure_name(bite) << ": breakdown mbar = ";
            if (doc.value("unbounded", false))
                report << "unbounded\n";
            else
                report << doc.value("breakdown_mbar", 0.0) << "\n";
        }
        if (!any_sens) report << "(no sensitivity artifacts; run the honest stage)\n";

        if (!any_fit && !fs::exists(desc_path) && !any_sens)
            raise(ErrorCode::MissingArtifacts, "no upstream artifacts found in " + config.out_dir);

        write_text_file(config.out_dir + "/report.txt", report.str());
        return 0;
    } catch (const Error& e) {
        write_error_json(config.out_dir + "/error.json", e);
        log_error(e.what());
        return exit_code_for(e);
    }
}

}  // namespace bitekit
