#include "srmusic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "srmusic/bounds.hpp"
#include "srmusic/errors.hpp"
#include "srmusic/fourier.hpp"
#include "srmusic/json_io.hpp"
#include "srmusic/music.hpp"

namespace srmusic
{

std::string_view to_string(ExperimentKind kind) noexcept
{
    switch (kind) {
    case ExperimentKind::SigmaMinSweep: return "sigma-min-sweep";
    case ExperimentKind::UpperBoundSweep: return "upper-bound-sweep";
    case ExperimentKind::PerturbationCheck: return "perturbation-check";
    case ExperimentKind::Concentration: return "concentration";
    case ExperimentKind::PhaseTransition: return "phase-transition";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view name)
{
    for (auto k : {ExperimentKind::SigmaMinSweep, ExperimentKind::UpperBoundSweep, ExperimentKind::PerturbationCheck,
                   ExperimentKind::Concentration, ExperimentKind::PhaseTransition}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidInput("unknown experiment kind '" + std::string(name) + "'");
}

std::string_view to_string(AmplitudeModel::Type type) noexcept
{
    switch (type) {
    case AmplitudeModel::Type::Unit: return "unit";
    case AmplitudeModel::Type::RandomPhaseUnit: return "random-phase-unit";
    case AmplitudeModel::Type::RandomModulus: return "random-modulus";
    }
    return "unknown";
}

AmplitudeModel::Type amplitude_type_from_string(std::string_view name)
{
    for (auto t : {AmplitudeModel::Type::Unit, AmplitudeModel::Type::RandomPhaseUnit,
                   AmplitudeModel::Type::RandomModulus}) {
        if (to_string(t) == name) return t;
    }
    throw InvalidInput("unknown amplitude model '" + std::string(name) + "'");
}

void AmplitudeModel::validate() const
{
    if (type == Type::RandomModulus && !(low > 0.0 && high >= low)) {
        throw InvalidInput("amplitude model: random-modulus needs 0 < low <= high");
    }
}

CVectorXd AmplitudeModel::sample(Index S, Rng& rng) const
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CVectorXd x(S);
    for (Index j = 0; j < S; ++j) {
        switch (type) {
        case Type::Unit:
            x(j) = 1.0;
            break;
        case Type::RandomPhaseUnit:
            x(j) = std::polar(1.0, two_pi<double> * unit(rng));
            break;
        case Type::RandomModulus: {
            const double r = low + (high - low) * unit(rng);
            x(j) = std::polar(r, two_pi<double> * unit(rng));
            break;
        }
        }
    }
    return x;
}

ExperimentConfig ExperimentConfig::resolved() const
{
    ExperimentConfig c = *this;
    if (c.L < 0) c.L = c.M / 2;
    if (c.S <= 0) c.S = c.clump_spec.total_points();
    if (c.N <= 0) c.N = static_cast<int>(default_grid(c.M));
    c.clump_spec.M = c.M;
    return c;
}

void ExperimentConfig::validate() const
{
    std::vector<std::string> failed;
    if (schema != current_schema) failed.push_back("schema == 1");
    if (trials_per_cell < 1) failed.push_back("trials_per_cell >= 1");
    if (M < 1) failed.push_back("M >= 1");
    if (!failed.empty()) throw PreconditionError(std::move(failed));
    amplitude.validate();

    const bool uses_alpha = kind != ExperimentKind::Concentration;
    const bool uses_sigma = kind == ExperimentKind::Concentration || kind == ExperimentKind::PerturbationCheck ||
                            kind == ExperimentKind::PhaseTransition;
    if (uses_alpha && alphas.empty()) failed.push_back("alphas nonempty");
    if (uses_sigma && sigmas.empty()) failed.push_back("sigmas nonempty");
    if (std::any_of(alphas.begin(), alphas.end(), [](double a) { return !(a > 0.0); })) {
        failed.push_back("alphas positive");
    }
    if (std::any_of(sigmas.begin(), sigmas.end(), [](double s) { return !(s >= 0.0); })) {
        failed.push_back("sigmas nonnegative");
    }

    switch (kind) {
    case ExperimentKind::SigmaMinSweep:
        if (alphas.size() < 4) failed.push_back("at least 4 alphas for a scaling fit");
        if (!allow_small_M && static_cast<long long>(M) < static_cast<long long>(S) * S) {
            failed.push_back("M >= S^2 (set allow_small_M to override)");
        }
        break;
    case ExperimentKind::UpperBoundSweep:
        if (alphas.size() < 4) failed.push_back("at least 4 alphas for a scaling fit");
        if (S < clump_spec.lambda_max()) failed.push_back("lambda <= S");
        if (S > M - 1) failed.push_back("S <= M - 1");
        break;
    case ExperimentKind::Concentration:
        if (std::any_of(sigmas.begin(), sigmas.end(), [](double s) { return !(s > 0.0); })) {
            failed.push_back("sigmas positive");
        }
        if (L < 0 || L > M) failed.push_back("0 <= L <= M");
        break;
    case ExperimentKind::PerturbationCheck:
    case ExperimentKind::PhaseTransition:
        if (S < 1 || L < S || L > M + 1 - S) failed.push_back("S <= L <= M+1-S");
        if (S != clump_spec.total_points()) failed.push_back("S equals the clump spec's point count");
        if (kind == ExperimentKind::PhaseTransition && N < 8 * M) failed.push_back("N >= 8M");
        if (kind == ExperimentKind::PerturbationCheck && N < L + 1) failed.push_back("N >= L+1");
        if (!(epsilon > 0.0)) failed.push_back("epsilon > 0");
        break;
    }
    if (!failed.empty()) throw PreconditionError(std::move(failed));

    const bool bare_progression = kind == ExperimentKind::SigmaMinSweep && clump_spec.num_clumps == 1;
    if (uses_alpha && kind != ExperimentKind::UpperBoundSweep && !bare_progression) {
        for (double a : alphas) {
            ClumpSpec s = clump_spec;
            s.alpha = a;
            s.validate();
        }
    }
}

std::string config_hash(const ExperimentConfig& config)
{
    const std::string canonical = json(config.resolved()).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace
{

using Clock = std::chrono::steady_clock;

struct TrialSeeds
{
    std::uint64_t root, geometry, amplitude, noise;

    TrialSeeds(std::uint64_t base, int trial)
        : root(derive_seed(base, {static_cast<std::uint64_t>(trial)})), geometry(derive_seed(root, {0})),
          amplitude(derive_seed(root, {1})), noise(derive_seed(root, {2}))
    {
    }
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double min_modulus(const CVectorXd& x)
{
    return x.cwiseAbs().minCoeff();
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn)
{
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

ExperimentRecord base_record(const ExperimentConfig& cfg, const std::string& hash, std::size_t cell, double alpha,
                             double sigma, int trial, std::uint64_t seed)
{
    ExperimentRecord r;
    r.config_hash = hash;
    r.cell = cell;
    r.alpha = alpha;
    r.sigma = sigma;
    r.trial = trial;
    r.seed = seed;
    r.M = cfg.M;
    r.S = cfg.S;
    r.A = cfg.clump_spec.num_clumps;
    r.lambda_max = cfg.clump_spec.lambda_max();
    return r;
}

std::map<int, double> calibrate_lower_constants(const ExperimentConfig& cfg)
{
    std::map<int, double> constants;
    for (int lambda : cfg.clump_spec.clump_sizes) {
        if (constants.contains(lambda)) continue;
        ClumpSpec single;
        single.num_clumps = 1;
        single.clump_sizes = {lambda};
        single.alpha = cfg.alphas.front();
        single.beta = cfg.clump_spec.beta;
        single.M = cfg.M;
        single.jitter = 0.0;
        constants[lambda] = fit_clump_constants(single, cfg.alphas, cfg.base_seed).constants.front();
    }
    return constants;
}

void run_sigma_min_sweep(const ExperimentConfig& cfg, const std::string& hash, unsigned jobs,
                         std::vector<ExperimentRecord>& out)
{
    const auto constants = calibrate_lower_constants(cfg);
    const auto T = static_cast<std::size_t>(cfg.trials_per_cell);
    out.resize(cfg.alphas.size() * T);
    parallel_for(out.size(), jobs, [&](std::size_t cell) {
        const auto t0 = Clock::now();
        const double alpha = cfg.alphas[cell / T];
        const int trial = static_cast<int>(cell % T);
        const TrialSeeds seeds(cfg.base_seed, trial);
        auto rec = base_record(cfg, hash, cell, alpha, 0.0, trial, seeds.root);
        try {
            ClumpSpec spec = cfg.clump_spec;
            spec.alpha = alpha;
            std::vector<int> sizes;
            if (spec.num_clumps == 1) {
                const auto samples = sigma_min_sweep(spec, std::span<const double>(&alpha, 1), seeds.geometry);
                rec.sigma_min = samples.front().sigma_min;
                sizes = spec.clump_sizes;
            } else {
                const auto gen = generate_clumps(spec, seeds.geometry);
                rec.A = static_cast<int>(gen.partition.num_clumps());
                rec.lambda_max = gen.partition.lambda_max();
                rec.sigma_min = fourier_sigma_min(gen.support, cfg.M);
                sizes = gen.partition.clump_sizes();
            }
            ClumpBoundTerms terms;
            terms.alpha = alpha;
            terms.M = cfg.M;
            for (int l : sizes) {
                terms.clump_sizes.push_back(l);
                terms.constants.push_back(constants.at(l));
            }
            rec.lower_bound = lower_bound_value(terms);
            rec.success = rec.lower_bound <= rec.sigma_min * (1.0 + 1e-9);
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_time = seconds_since(t0);
        out[cell] = std::move(rec);
    });
}

void run_upper_bound_sweep(const ExperimentConfig& cfg, const std::string& hash, unsigned jobs,
                           std::vector<ExperimentRecord>& out)
{
    const auto T = static_cast<std::size_t>(cfg.trials_per_cell);
    const int lambda = cfg.clump_spec.lambda_max();
    out.resize(cfg.alphas.size() * T);
    parallel_for(out.size(), jobs, [&](std::size_t cell) {
        const auto t0 = Clock::now();
        const double alpha = cfg.alphas[cell / T];
        const int trial = static_cast<int>(cell % T);
        const TrialSeeds seeds(cfg.base_seed, trial);
        auto rec = base_record(cfg, hash, cell, alpha, 0.0, trial, seeds.root);
        rec.A = 1;
        rec.lambda_max = lambda;
        try {
            Rng rng(seeds.geometry);
            const double omega0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const auto w = upper_bound_witness(lambda, alpha, cfg.M, cfg.S, omega0, seeds.geometry,
                                               cfg.upper_bound_c);
            rec.sigma_min = w.sigma_min;
            rec.success = w.alpha_in_regime;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_time = seconds_since(t0);
        out[cell] = std::move(rec);
    });

    // C_lambda fitted as the smallest constant valid on every sample.
    double C = 0.0;
    for (const auto& r : out) {
        if (r.error.empty()) C = std::max(C, r.sigma_min / std::pow(r.alpha, lambda - 1));
    }
    for (auto& r : out) {
        if (r.error.empty()) r.upper_bound = C * std::pow(r.alpha, lambda - 1);
    }
}

void run_concentration_kind(const ExperimentConfig& cfg, const std::string& hash, unsigned jobs,
                            std::vector<ExperimentRecord>& out)
{
    const auto T = static_cast<std::size_t>(cfg.trials_per_cell);
    out.resize(cfg.sigmas.size() * T);
    parallel_for(out.size(), jobs, [&](std::size_t cell) {
        const auto t0 = Clock::now();
        const double sigma = cfg.sigmas[cell / T];
        const int trial = static_cast<int>(cell % T);
        const TrialSeeds seeds(cfg.base_seed, trial);
        auto rec = base_record(cfg, hash, cell, 0.0, sigma, trial, seeds.root);
        try {
            const auto eta = sample_noise({sigma, cfg.noise_kind, seeds.noise}, cfg.M);
            rec.hankel_norm = spectral_norm(hankel(eta, cfg.L));
            rec.success = true;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_time = seconds_since(t0);
        out[cell] = std::move(rec);
    });
}

/// Perturbation check and phase transition share the per-(alpha, trial)
/// noiseless setup; each work unit then sweeps every sigma.
void run_noisy_kind(const ExperimentConfig& cfg, const std::string& hash, unsigned jobs,
                    std::vector<ExperimentRecord>& out)
{
    const auto T = static_cast<std::size_t>(cfg.trials_per_cell);
    const auto nsig = cfg.sigmas.size();
    const bool phase = cfg.kind == ExperimentKind::PhaseTransition;
    out.resize(cfg.alphas.size() * nsig * T);

    parallel_for(cfg.alphas.size() * T, jobs, [&](std::size_t unit) {
        const std::size_t ia = unit / T;
        const int trial = static_cast<int>(unit % T);
        const double alpha = cfg.alphas[ia];
        const TrialSeeds seeds(cfg.base_seed, trial);
        auto cell_of = [&](std::size_t js) { return (ia * nsig + js) * T + static_cast<std::size_t>(trial); };

        std::optional<GeneratedClumps> gen;
        CVectorXd x, y0;
        CMatrixXd W_clean;
        ImagingGrid clean_grid;
        double smin_L = NAN, smin_ML = NAN;
        std::string setup_error;
        try {
            ClumpSpec spec = cfg.clump_spec;
            spec.alpha = alpha;
            gen = generate_clumps(spec, seeds.geometry);
            Rng amp_rng(seeds.amplitude);
            x = cfg.amplitude.sample(cfg.S, amp_rng);
            y0 = vandermonde(gen->support, cfg.M) * x;
            W_clean = svd_split(hankel(y0, cfg.L), cfg.S).noise_space;
            clean_grid = evaluate_grid(W_clean, cfg.N);
            if (!phase) {
                smin_L = fourier_sigma_min(gen->support, cfg.L);
                smin_ML = fourier_sigma_min(gen->support, cfg.M - cfg.L);
            }
        } catch (const std::exception& e) {
            setup_error = e.what();
        }

        for (std::size_t js = 0; js < nsig; ++js) {
            const auto t0 = Clock::now();
            const double sigma = cfg.sigmas[js];
            auto rec = base_record(cfg, hash, cell_of(js), alpha, sigma, trial, seeds.root);
            if (!setup_error.empty()) {
                rec.error = setup_error;
                out[rec.cell] = std::move(rec);
                continue;
            }
            rec.A = static_cast<int>(gen->partition.num_clumps());
            rec.lambda_max = gen->partition.lambda_max();
            rec.x_min = min_modulus(x);
            try {
                const CVectorXd eta = sample_noise({sigma, cfg.noise_kind, seeds.noise}, cfg.M);
                const CVectorXd y = y0 + eta;
                if (phase) {
                    try {
                        const auto est = music_estimate(y, {cfg.S, cfg.L, cfg.N, cfg.refine});
                        rec.matched_error = match_supports(gen->support, est.recovered);
                        rec.success = rec.matched_error < alpha / (2.0 * cfg.M);
                        rec.sup_diff = grid_sup_diff(clean_grid, est.grid);
                    } catch (const UnderdeterminedPeaks& e) {
                        rec.error = e.what();
                        const auto W = svd_split(hankel(y, cfg.L), cfg.S).noise_space;
                        rec.sup_diff = grid_sup_diff(clean_grid, evaluate_grid(W, cfg.N));
                    }
                    rec.correlation_success = rec.sup_diff <= cfg.epsilon;
                } else {
                    const auto W = svd_split(hankel(y, cfg.L), cfg.S).noise_space;
                    rec.sup_diff = grid_sup_diff(clean_grid, evaluate_grid(W, cfg.N));
                    rec.hankel_norm = sigma > 0.0 ? spectral_norm(hankel(eta, cfg.L)) : 0.0;
                    const auto rep = wedin_bound(rec.hankel_norm, rec.x_min, smin_L, smin_ML);
                    rec.sigma_min_L = smin_L;
                    rec.sigma_min_ML = smin_ML;
                    rec.wedin_bound = rep.wedin_bound;
                    rec.precondition_ok = rep.precondition_ok;
                    rec.success = !rep.precondition_ok || rec.sup_diff <= rep.wedin_bound;
                }
            } catch (const std::exception& e) {
                rec.error = e.what();
                rec.success = false;
            }
            rec.wall_time = seconds_since(t0);
            out[rec.cell] = std::move(rec);
        }
    });
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else if (c == '\n') out += ' ';
        else out += c;
    }
    return out + "\"";
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, unsigned jobs)
{
    const auto cfg = config.resolved();
    cfg.validate();
    const auto hash = config_hash(cfg);
    std::vector<ExperimentRecord> out;
    switch (cfg.kind) {
    case ExperimentKind::SigmaMinSweep: run_sigma_min_sweep(cfg, hash, jobs, out); break;
    case ExperimentKind::UpperBoundSweep: run_upper_bound_sweep(cfg, hash, jobs, out); break;
    case ExperimentKind::Concentration: run_concentration_kind(cfg, hash, jobs, out); break;
    case ExperimentKind::PerturbationCheck:
    case ExperimentKind::PhaseTransition: run_noisy_kind(cfg, hash, jobs, out); break;
    }
    return out;
}

void write_records_csv(std::ostream& os, ExperimentKind kind, std::span<const ExperimentRecord> records)
{
    switch (kind) {
    case ExperimentKind::SigmaMinSweep:
    case ExperimentKind::UpperBoundSweep: {
        std::vector<SweepRow> rows;
        rows.reserve(records.size());
        for (const auto& r : records) {
            rows.push_back({r.alpha, r.M, r.S, r.lambda_max, r.A, r.sigma_min, r.lower_bound, r.upper_bound, r.seed});
        }
        write_sweep_csv(os, rows);
        return;
    }
    case ExperimentKind::Concentration:
        os << "sigma,trial,seed,hankel_norm\n";
        for (const auto& r : records) {
            os << num(r.sigma) << ',' << r.trial << ',' << r.seed << ',' << num(r.hankel_norm) << '\n';
        }
        return;
    case ExperimentKind::PerturbationCheck:
        os << "alpha,sigma,trial,seed,x_min,hankel_noise_norm,sigma_min_L,sigma_min_ML,sup_diff,wedin_bound,"
              "precondition_ok,bound_holds,error\n";
        for (const auto& r : records) {
            os << num(r.alpha) << ',' << num(r.sigma) << ',' << r.trial << ',' << r.seed << ',' << num(r.x_min) << ','
               << num(r.hankel_norm) << ',' << num(r.sigma_min_L) << ',' << num(r.sigma_min_ML) << ','
               << num(r.sup_diff) << ',' << num(r.wedin_bound) << ',' << int(r.precondition_ok) << ','
               << int(r.success) << ',' << csv_escape(r.error) << '\n';
        }
        return;
    case ExperimentKind::PhaseTransition:
        os << "alpha,srf,sigma,trial,seed,x_min,matched_error,success,sup_diff,correlation_success,error\n";
        for (const auto& r : records) {
            os << num(r.alpha) << ',' << num(1.0 / r.alpha) << ',' << num(r.sigma) << ',' << r.trial << ','
               << r.seed << ',' << num(r.x_min) << ',' << num(r.matched_error) << ',' << int(r.success) << ','
               << num(r.sup_diff) << ',' << int(r.correlation_success) << ',' << csv_escape(r.error) << '\n';
        }
        return;
    }
}

PhaseTransitionSummary phase_transition_summary(std::span<const ExperimentRecord> records, double x_min_nominal,
                                                double threshold)
{
    if (records.empty()) {
        throw InvalidInput("phase_transition_summary: no records");
    }
    if (!(x_min_nominal > 0.0)) {
        throw InvalidInput("phase_transition_summary: x_min must be positive");
    }
    PhaseTransitionSummary s;
    s.threshold = threshold;

    std::map<double, std::size_t> alpha_idx, sigma_idx;
    for (const auto& r : records) {
        alpha_idx.emplace(r.alpha, 0);
        sigma_idx.emplace(r.sigma, 0);
    }
    // Ascending SRF means descending alpha.
    std::size_t k = alpha_idx.size();
    for (auto& [a, i] : alpha_idx) {
        i = --k;
    }
    s.srfs.resize(alpha_idx.size());
    for (const auto& [a, i] : alpha_idx) s.srfs[i] = 1.0 / a;
    k = 0;
    for (auto& [sg, i] : sigma_idx) {
        i = k++;
        s.noise_levels.push_back(sg / x_min_nominal);
    }

    const auto na = s.srfs.size();
    const auto ns = s.noise_levels.size();
    std::vector<std::vector<std::size_t>> wins(na, std::vector<std::size_t>(ns, 0));
    auto corr = wins;
    s.trials.assign(na, std::vector<std::size_t>(ns, 0));
    for (const auto& r : records) {
        const auto i = alpha_idx[r.alpha];
        const auto j = sigma_idx[r.sigma];
        ++s.trials[i][j];
        wins[i][j] += r.success ? 1 : 0;
        corr[i][j] += r.correlation_success ? 1 : 0;
    }

    s.success_rate.assign(na, std::vector<double>(ns, 0.0));
    s.correlation_rate = s.success_rate;
    s.intervals.assign(na, std::vector<WilsonInterval>(ns));
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < ns; ++j) {
            const double n = static_cast<double>(s.trials[i][j]);
            s.success_rate[i][j] = n > 0 ? wins[i][j] / n : 0.0;
            s.correlation_rate[i][j] = n > 0 ? corr[i][j] / n : 0.0;
            s.intervals[i][j] = wilson_interval(wins[i][j], s.trials[i][j]);
        }
    }

    auto critical = [&](const std::vector<std::vector<double>>& rate, std::size_t i) {
        double crit = NAN;
        for (std::size_t j = 0; j < ns; ++j) {
            if (rate[i][j] < threshold) break;
            if (s.noise_levels[j] > 0.0) crit = s.noise_levels[j];
        }
        return crit;
    };
    auto slope = [&](const std::vector<double>& crit) -> std::optional<double> {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < na; ++i) {
            if (std::isfinite(crit[i])) pts.emplace_back(std::log(s.srfs[i]), std::log(crit[i]));
        }
        if (pts.size() < 2) return std::nullopt;
        double mx = 0, my = 0;
        for (auto [x, y] : pts) { mx += x; my += y; }
        mx /= pts.size();
        my /= pts.size();
        double sxx = 0, sxy = 0;
        for (auto [x, y] : pts) { sxx += (x - mx) * (x - mx); sxy += (x - mx) * (y - my); }
        if (sxx == 0.0) return std::nullopt;
        return sxy / sxx;
    };
    for (std::size_t i = 0; i < na; ++i) {
        s.critical_noise.push_back(critical(s.success_rate, i));
        s.critical_noise_correlation.push_back(critical(s.correlation_rate, i));
    }
    s.critical_slope = slope(s.critical_noise);
    s.critical_slope_correlation = slope(s.critical_noise_correlation);

    // One-sided two-proportion z test: success must not rise significantly with noise.
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j + 1 < ns; ++j) {
            const double n1 = static_cast<double>(s.trials[i][j]);
            const double n2 = static_cast<double>(s.trials[i][j + 1]);
            if (n1 == 0 || n2 == 0) continue;
            const double p1 = s.success_rate[i][j];
            const double p2 = s.success_rate[i][j + 1];
            const double p = (wins[i][j] + wins[i][j + 1]) / (n1 + n2);
            const double se = std::sqrt(p * (1 - p) * (1 / n1 + 1 / n2));
            if (se > 0 && (p2 - p1) / se > 1.645) s.monotone = false;
        }
    }
    return s;
}

std::filesystem::path write_campaign(const std::filesystem::path& out_root, const ExperimentConfig& config,
                                     std::span<const ExperimentRecord> records)
{
    const auto cfg = config.resolved();
    const auto dir = out_root / config_hash(cfg);
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / (std::string(to_string(cfg.kind)) + ".csv"), std::ios::binary);
        write_records_csv(csv, cfg.kind, records);
        if (!csv) throw InvalidInput("cannot write records under " + dir.string());
    }
    write_json_file(dir / "summary.json", summarize_campaign(cfg, records));
    return dir;
}

} // namespace srmusic
