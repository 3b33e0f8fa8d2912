#include "srmusic/json_io.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "srmusic/errors.hpp"

namespace srmusic
{

namespace
{

/// JSON has no NaN; emit null instead.
json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback)
{
    return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

} // namespace

void to_json(json& j, const ClumpSpec& spec)
{
    j = json{{"num_clumps", spec.num_clumps},
             {"clump_sizes", spec.clump_sizes},
             {"alpha", spec.alpha},
             {"beta", spec.beta},
             {"M", spec.M},
             {"anchors", spec.anchors ? json(*spec.anchors) : json(nullptr)},
             {"jitter", spec.jitter}};
}

void from_json(const json& j, ClumpSpec& spec)
{
    try {
        spec.num_clumps = j.at("num_clumps").get<int>();
        spec.clump_sizes = j.at("clump_sizes").get<std::vector<int>>();
        spec.alpha = j.at("alpha").get<double>();
        spec.beta = j.at("beta").get<double>();
        spec.M = j.at("M").get<int>();
        spec.anchors.reset();
        if (j.contains("anchors") && !j.at("anchors").is_null()) {
            spec.anchors = j.at("anchors").get<std::vector<double>>();
        }
        spec.jitter = get_or(j, "jitter", 0.0);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("clump spec: ") + e.what());
    }
}

void to_json(json& j, const AmplitudeModel& model)
{
    j = json{{"type", to_string(model.type)}};
    if (model.type == AmplitudeModel::Type::RandomModulus) {
        j["range"] = {model.low, model.high};
    }
}

void from_json(const json& j, AmplitudeModel& model)
{
    if (j.is_string()) {
        model.type = amplitude_type_from_string(j.get<std::string>());
        return;
    }
    model.type = amplitude_type_from_string(j.at("type").get<std::string>());
    if (j.contains("range")) {
        const auto r = j.at("range").get<std::vector<double>>();
        if (r.size() != 2) throw InvalidInput("amplitude model: range must have two entries");
        model.low = r[0];
        model.high = r[1];
    }
}

void to_json(json& j, const ExperimentConfig& c)
{
    j = json{{"schema", c.schema},
             {"kind", to_string(c.kind)},
             {"clump_spec", c.clump_spec},
             {"alphas", c.alphas},
             {"sigmas", c.sigmas},
             {"trials_per_cell", c.trials_per_cell},
             {"M", c.M},
             {"L", c.L},
             {"S", c.S},
             {"N", c.N},
             {"nu", c.nu},
             {"epsilon", c.epsilon},
             {"amplitude_model", c.amplitude},
             {"base_seed", c.base_seed},
             {"noise_kind", to_string(c.noise_kind)},
             {"refine", c.refine},
             {"allow_small_M", c.allow_small_M},
             {"upper_bound_c", c.upper_bound_c}};
}

void from_json(const json& j, ExperimentConfig& c)
{
    try {
        c = ExperimentConfig{};
        c.schema = j.at("schema").get<int>();
        if (c.schema != ExperimentConfig::current_schema) {
            throw InvalidInput("experiment config: unsupported schema " + std::to_string(c.schema));
        }
        c.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("clump_spec")) c.clump_spec = j.at("clump_spec").get<ClumpSpec>();
        c.alphas = get_or(j, "alphas", std::vector<double>{});
        c.sigmas = get_or(j, "sigmas", std::vector<double>{});
        c.trials_per_cell = get_or(j, "trials_per_cell", 1);
        c.M = get_or(j, "M", c.clump_spec.M);
        c.L = get_or(j, "L", -1);
        c.S = get_or(j, "S", 0);
        c.N = get_or(j, "N", 0);
        c.nu = get_or(j, "nu", 2.0);
        c.epsilon = get_or(j, "epsilon", 0.1);
        if (j.contains("amplitude_model")) c.amplitude = j.at("amplitude_model").get<AmplitudeModel>();
        c.base_seed = get_or<std::uint64_t>(j, "base_seed", 0);
        c.noise_kind = noise_kind_from_string(get_or<std::string>(j, "noise_kind", "complex-circular"));
        c.refine = get_or(j, "refine", true);
        c.allow_small_M = get_or(j, "allow_small_M", false);
        c.upper_bound_c = get_or(j, "upper_bound_c", 1.0);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("experiment config: ") + e.what());
    }
}

void to_json(json& j, const ConcentrationReport& r)
{
    j = json{{"kind", to_string(r.kind)},
             {"M", r.M},
             {"L", r.L},
             {"sigma", r.sigma},
             {"trials", r.trials},
             {"empirical_mean_norm", r.empirical_mean_norm},
             {"expectation_bound", r.expectation_bound},
             {"tail_t", r.tail_t},
             {"empirical_tail_prob", r.empirical_tail_prob},
             {"tail_wilson95", {r.tail_interval.lower, r.tail_interval.upper}},
             {"tail_bound", r.tail_bound},
             {"mean_within_bound", r.mean_within_bound()},
             {"tail_within_bound", r.tail_within_bound()}};
}

void to_json(json& j, const ScalingFit& fit)
{
    json samples = json::array();
    for (const auto& s : fit.samples) {
        samples.push_back({{"alpha", s.alpha}, {"sigma_min", s.sigma_min}});
    }
    j = json{{"slope", fit.slope},
             {"intercept", fit.intercept},
             {"r_squared", fit.r_squared},
             {"reliable", fit.reliable()},
             {"samples", samples}};
}

void to_json(json& j, const PhaseTransitionSummary& s)
{
    auto vec = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(number_or_null(x));
        return a;
    };
    json intervals = json::array();
    for (const auto& row : s.intervals) {
        json r = json::array();
        for (const auto& w : row) r.push_back({w.lower, w.upper});
        intervals.push_back(r);
    }
    j = json{{"srf", s.srfs},
             {"noise_levels", s.noise_levels},
             {"success_rate", s.success_rate},
             {"success_wilson95", intervals},
             {"correlation_rate", s.correlation_rate},
             {"trials", s.trials},
             {"threshold", s.threshold},
             {"critical_noise", vec(s.critical_noise)},
             {"critical_noise_correlation", vec(s.critical_noise_correlation)},
             {"critical_slope", s.critical_slope ? json(*s.critical_slope) : json(nullptr)},
             {"critical_slope_correlation",
              s.critical_slope_correlation ? json(*s.critical_slope_correlation) : json(nullptr)},
             {"monotone", s.monotone}};
}

json support_to_json(const SupportSet& omega)
{
    return json{{"support", std::vector<double>(omega.begin(), omega.end())}};
}

SupportSet support_from_json(const json& j)
{
    try {
        if (j.is_array()) return SupportSet(j.get<std::vector<double>>());
        if (j.contains("support")) return SupportSet(j.at("support").get<std::vector<double>>());
        if (j.contains("points")) return SupportSet(j.at("points").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("support: ") + e.what());
    }
    throw InvalidInput("support: expected an array or an object with 'support' or 'points'");
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) {
        throw InvalidInput("cannot write " + path.string());
    }
}

json make_manifest(std::string_view subcommand, const json& options, const json& config, std::uint64_t seed)
{
    return json{{"tool", "srmusic"},
                {"version", SRMUSIC_VERSION},
                {"subcommand", subcommand},
                {"seed", seed},
                {"options", options},
                {"config", config}};
}

ExperimentConfig config_from_document(const json& doc)
{
    if (doc.contains("config") && doc.contains("tool")) {
        return doc.at("config").get<ExperimentConfig>();
    }
    return doc.get<ExperimentConfig>();
}

namespace
{

json summarize_sweep(const ExperimentConfig& cfg, std::span<const ExperimentRecord> records)
{
    // Geometric mean of sigma_min over trials, per alpha.
    std::map<double, std::pair<double, int>> acc;
    std::size_t bound_holds = 0;
    std::size_t valid = 0;
    for (const auto& r : records) {
        if (!r.error.empty() || !(r.sigma_min > 0.0)) continue;
        ++valid;
        bound_holds += r.success ? 1 : 0;
        auto& [s, n] = acc[r.alpha];
        s += std::log(r.sigma_min);
        ++n;
    }
    std::vector<ScalingSample> samples;
    for (const auto& [a, sn] : acc) {
        samples.push_back({a, std::exp(sn.first / sn.second)});
    }
    json j{{"valid_records", valid}};
    if (cfg.kind == ExperimentKind::SigmaMinSweep) {
        j["lower_bound_holds"] = bound_holds;
    } else {
        j["alpha_in_regime"] = bound_holds;
        j["alpha_limit"] = cfg.upper_bound_c / std::sqrt(cfg.M + 1.0);
        for (const auto& r : records) {
            if (r.error.empty() && std::isfinite(r.upper_bound)) {
                j["C_lambda"] = r.upper_bound / std::pow(r.alpha, r.lambda_max - 1);
                break;
            }
        }
    }
    try {
        j["fit"] = fit_scaling_exponent(samples);
    } catch (const Error& e) {
        j["fit"] = nullptr;
        j["fit_error"] = e.what();
    }
    return j;
}

json summarize_perturbation(std::span<const ExperimentRecord> records)
{
    std::size_t ok = 0, violations = 0, errors = 0;
    double worst_ratio = 0.0;
    for (const auto& r : records) {
        if (!r.error.empty()) {
            ++errors;
            continue;
        }
        if (!r.precondition_ok) continue;
        ++ok;
        if (r.sup_diff > r.wedin_bound) ++violations;
        if (r.wedin_bound > 0.0) worst_ratio = std::max(worst_ratio, r.sup_diff / r.wedin_bound);
    }
    return json{{"trials", records.size()},
                {"errors", errors},
                {"precondition_ok", ok},
                {"precondition_fraction", records.empty() ? 0.0 : double(ok) / records.size()},
                {"violations", violations},
                {"max_sup_diff_over_bound", worst_ratio}};
}

json summarize_concentration(const ExperimentConfig& cfg, std::span<const ExperimentRecord> records)
{
    std::map<double, std::vector<double>> by_sigma;
    for (const auto& r : records) {
        if (r.error.empty()) by_sigma[r.sigma].push_back(r.hankel_norm);
    }
    json reports = json::array();
    for (const auto& [sigma, norms] : by_sigma) {
        ConcentrationReport rep;
        rep.kind = cfg.noise_kind;
        rep.M = cfg.M;
        rep.L = cfg.L;
        rep.sigma = sigma;
        rep.trials = norms.size();
        rep.expectation_bound = expectation_bound(sigma, cfg.M, cfg.L);
        rep.tail_t = 1.2 * rep.expectation_bound;
        rep.tail_bound = tail_bound(rep.tail_t, sigma, cfg.M, cfg.L);
        double sum = 0.0;
        std::size_t exceed = 0;
        for (double n : norms) {
            sum += n;
            exceed += n >= rep.tail_t ? 1 : 0;
        }
        rep.empirical_mean_norm = sum / norms.size();
        rep.empirical_tail_prob = double(exceed) / norms.size();
        rep.tail_interval = wilson_interval(exceed, norms.size());
        reports.push_back(rep);
    }
    return json{{"reports", reports}};
}

} // namespace

json summarize_campaign(const ExperimentConfig& config, std::span<const ExperimentRecord> records)
{
    const auto cfg = config.resolved();
    double wall = 0.0;
    std::size_t errors = 0;
    for (const auto& r : records) {
        wall += r.wall_time;
        errors += r.error.empty() ? 0 : 1;
    }
    json j{{"config_hash", config_hash(cfg)},
           {"kind", to_string(cfg.kind)},
           {"records", records.size()},
           {"records_with_errors", errors},
           {"wall_time_seconds", wall}};
    switch (cfg.kind) {
    case ExperimentKind::SigmaMinSweep:
    case ExperimentKind::UpperBoundSweep:
        j["sweep"] = summarize_sweep(cfg, records);
        break;
    case ExperimentKind::PerturbationCheck:
        j["perturbation"] = summarize_perturbation(records);
        break;
    case ExperimentKind::Concentration:
        j["concentration"] = summarize_concentration(cfg, records);
        break;
    case ExperimentKind::PhaseTransition:
        j["success_criterion"] = "match_supports(truth, estimate) < alpha/(2M)";
        j["correlation_criterion"] = "grid sup |R_noisy - R| <= epsilon (epsilon = " + std::to_string(cfg.epsilon) + ")";
        j["phase_transition"] = phase_transition_summary(records, cfg.amplitude.nominal_x_min());
        break;
    }
    return j;
}

} // namespace srmusic
