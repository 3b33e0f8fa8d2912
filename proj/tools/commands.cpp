#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "srmusic/bounds.hpp"
#include "srmusic/errors.hpp"
#include "srmusic/fourier.hpp"
#include "srmusic/harness.hpp"
#include "srmusic/json_io.hpp"
#include "srmusic/matrix_io.hpp"
#include "srmusic/measurements.hpp"
#include "srmusic/music.hpp"
#include "srmusic/noise.hpp"
#include "srmusic/rng.hpp"

namespace fs = std::filesystem;
using namespace srmusic;

namespace
{

struct GlobalOptions
{
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;
    std::string out = "out";

    std::uint64_t seed_or_default() const { return seed.value_or(0); }
};

/// Returns the "config" of a manifest, or the document itself.
json unwrap(const json& doc)
{
    return doc.is_object() && doc.contains("tool") && doc.contains("config") ? doc.at("config") : doc;
}

void write_manifest(const fs::path& dir, std::string_view sub, const json& options, const json& config,
                    std::uint64_t seed)
{
    fs::create_directories(dir);
    write_json_file(dir / "manifest.json", make_manifest(sub, options, config, seed));
}

// ---------------------------------------------------------------- gen-support

struct GenSupportArgs
{
    std::string spec;
    std::optional<int> M;
};

int run_gen_support(const GlobalOptions& g, const GenSupportArgs& a)
{
    auto spec = unwrap(read_json_file(a.spec)).get<ClumpSpec>();
    if (a.M) spec.M = *a.M;
    const auto seed = g.seed_or_default();
    const auto gen = generate_clumps(spec, seed);
    const auto beta = check_beta_condition(gen.partition, gen.support.size(), spec.alpha);

    json clumps = json::array();
    for (const auto& c : gen.partition.clumps) clumps.push_back({{"start", c.start}, {"size", c.size}});
    json out = support_to_json(gen.support);
    out["M"] = spec.M;
    out["clumps"] = clumps;
    out["alpha"] = spec.alpha;
    out["beta"] = spec.beta;
    out["observed_beta"] = std::isfinite(gen.partition.observed_beta) ? json(gen.partition.observed_beta) : json(nullptr);
    out["beta_condition"] = {{"required_beta", beta.required_beta}, {"satisfied", beta.satisfied}};

    const fs::path dir = g.out;
    fs::create_directories(dir);
    write_json_file(dir / "support.json", out);
    write_manifest(dir, "gen-support", {{"M", spec.M}}, spec, seed);

    std::cout << "generated " << gen.support.size() << " points in " << gen.partition.num_clumps()
              << " clump(s); beta condition " << (beta.satisfied ? "satisfied" : "NOT satisfied")
              << " (required beta = " << beta.required_beta << ")\n"
              << "wrote " << (dir / "support.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- sigma-min

struct SigmaMinArgs
{
    std::string support;
    int M = 0;
    std::string export_matrix;
};

int run_sigma_min(const GlobalOptions& g, const SigmaMinArgs& a)
{
    const auto omega = support_from_json(unwrap(read_json_file(a.support)));
    const auto phi = vandermonde(omega, a.M);
    const auto s = singular_values(phi);
    json out{{"M", a.M}, {"S", omega.size()}, {"sigma_min", s(s.size() - 1)}, {"sigma_max", s(0)}};
    if (omega.size() >= 2) {
        const double delta = min_separation(omega);
        out["min_separation"] = delta;
        out["srf"] = super_resolution_factor(a.M, delta);
    }
    const fs::path dir = g.out;
    fs::create_directories(dir);
    write_json_file(dir / "sigma_min.json", out);
    if (!a.export_matrix.empty()) {
        std::ofstream m(a.export_matrix);
        write_matrix_text(m, phi);
    }
    write_manifest(dir, "sigma-min", {{"M", a.M}, {"export_matrix", a.export_matrix}}, support_to_json(omega),
                   g.seed_or_default());

    std::printf("sigma_min = %.12g\nsigma_max = %.12g\n", s(s.size() - 1), s(0));
    return 0;
}

// ---------------------------------------------------------------- campaigns

struct CampaignArgs
{
    std::string config;
    std::optional<int> M, L, S, N;
};

ExperimentConfig load_campaign(const GlobalOptions& g, const CampaignArgs& a)
{
    auto cfg = config_from_document(read_json_file(a.config));
    if (g.seed) cfg.base_seed = *g.seed;
    if (a.M) cfg.M = *a.M;
    if (a.L) cfg.L = *a.L;
    if (a.S) cfg.S = *a.S;
    if (a.N) cfg.N = *a.N;
    return cfg.resolved();
}

int run_campaign(const GlobalOptions& g, std::string_view sub, ExperimentConfig cfg,
                 std::initializer_list<ExperimentKind> allowed)
{
    if (std::find(allowed.begin(), allowed.end(), cfg.kind) == allowed.end()) {
        throw InvalidInput(std::string(sub) + ": config kind '" + std::string(to_string(cfg.kind)) +
                           "' is not handled by this subcommand");
    }
    const auto records = run_experiment(cfg, g.jobs);
    const auto dir = write_campaign(g.out, cfg, records);
    write_manifest(dir, sub, {{"jobs", g.jobs}}, cfg, cfg.base_seed);
    const auto summary = read_json_file(dir / "summary.json");

    std::cout << to_string(cfg.kind) << ": " << records.size() << " records";
    if (summary.at("records_with_errors").get<std::size_t>() > 0) {
        std::cout << " (" << summary.at("records_with_errors") << " with errors)";
    }
    std::cout << "\n";
    if (summary.contains("sweep") && !summary["sweep"]["fit"].is_null()) {
        const auto& fit = summary["sweep"]["fit"];
        std::printf("log-log slope %.4f, r^2 %.5f%s\n", fit["slope"].get<double>(), fit["r_squared"].get<double>(),
                    fit["reliable"].get<bool>() ? "" : " (unreliable fit)");
    }
    if (summary.contains("perturbation")) {
        const auto& p = summary["perturbation"];
        std::cout << "precondition held in " << p["precondition_ok"] << " trials; bound violated in "
                  << p["violations"] << "\n";
    }
    if (summary.contains("concentration")) {
        for (const auto& r : summary["concentration"]["reports"]) {
            std::printf("sigma %.4g: mean |H(eta)| %.4f vs bound %.4f; tail %.4f vs bound %.4f\n",
                        r["sigma"].get<double>(), r["empirical_mean_norm"].get<double>(),
                        r["expectation_bound"].get<double>(), r["empirical_tail_prob"].get<double>(),
                        r["tail_bound"].get<double>());
        }
    }
    if (summary.contains("phase_transition")) {
        const auto& p = summary["phase_transition"];
        std::cout << "success: " << summary["success_criterion"].get<std::string>() << "\n";
        const auto srf = p["srf"].get<std::vector<double>>();
        for (std::size_t i = 0; i < srf.size(); ++i) {
            std::printf("SRF %.3g: 90%% noise level %s\n", srf[i], p["critical_noise"][i].dump().c_str());
        }
        if (!p["critical_slope"].is_null()) {
            std::printf("critical-noise slope vs SRF: %.3f\n", p["critical_slope"].get<double>());
        }
    }
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

struct ConcentrationArgs
{
    CampaignArgs campaign;
    int M = 100;
    int L = -1;
    double sigma = 1.0;
    int trials = 1000;
    std::string noise_kind = "real";
};

int run_concentration_cmd(const GlobalOptions& g, const ConcentrationArgs& a)
{
    if (!a.campaign.config.empty()) {
        return run_campaign(g, "concentration", load_campaign(g, a.campaign), {ExperimentKind::Concentration});
    }
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Concentration;
    cfg.M = a.M;
    cfg.L = a.L;
    cfg.sigmas = {a.sigma};
    cfg.trials_per_cell = a.trials;
    cfg.noise_kind = noise_kind_from_string(a.noise_kind);
    cfg.base_seed = g.seed_or_default();
    return run_campaign(g, "concentration", cfg.resolved(), {ExperimentKind::Concentration});
}

// ---------------------------------------------------------------- music

struct MusicArgs
{
    std::string measurements;
    std::string synthesize;
    std::optional<int> M, L, S, N;
    std::optional<double> sigma;
    std::string noise_kind;
    bool refine = false;
};

int run_music(const GlobalOptions& g, const MusicArgs& a)
{
    const auto seed = g.seed_or_default();
    const fs::path dir = g.out;
    fs::create_directories(dir);

    CVectorXd y;
    std::optional<SupportSet> truth;
    json config;
    if (!a.synthesize.empty()) {
        config = unwrap(read_json_file(a.synthesize));
        int M = a.M.value_or(config.value("M", 0));
        if (M < 1 && config.contains("clump_spec")) M = config["clump_spec"].value("M", 0);
        if (M < 1) throw InvalidInput("music: synthesis needs M (in the spec or via --M)");
        config["M"] = M;

        if (config.contains("support")) {
            truth = support_from_json(config["support"]);
        } else if (config.contains("clump_spec")) {
            auto spec = config["clump_spec"].get<ClumpSpec>();
            spec.M = M;
            truth = generate_clumps(spec, derive_seed(seed, {0})).support;
        } else {
            throw InvalidInput("music: synthesis spec needs 'support' or 'clump_spec'");
        }
        const auto S = static_cast<Index>(truth->size());

        CVectorXd x(S);
        if (config.contains("amplitudes")) {
            const auto amps = config["amplitudes"];
            if (amps.size() != truth->size()) throw InvalidInput("music: one amplitude per source is required");
            for (Index j = 0; j < S; ++j) {
                const auto& e = amps[static_cast<std::size_t>(j)];
                x(j) = e.is_array() ? std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>())
                                    : std::complex<double>(e.get<double>(), 0.0);
            }
        } else {
            AmplitudeModel model;
            if (config.contains("amplitude_model")) model = config["amplitude_model"].get<AmplitudeModel>();
            Rng rng(derive_seed(seed, {1}));
            x = model.sample(S, rng);
        }
        const double sigma = a.sigma.value_or(config.value("sigma", 0.0));
        const auto kind = noise_kind_from_string(
            a.noise_kind.empty() ? config.value("noise_kind", std::string("complex-circular")) : a.noise_kind);
        config["sigma"] = sigma;
        config["noise_kind"] = to_string(kind);
        y = vandermonde(*truth, M) * x + sample_noise({sigma, kind, derive_seed(seed, {2})}, M);

        std::ofstream meas(dir / "measurements.csv");
        write_measurements_csv(meas, y);
    } else if (!a.measurements.empty()) {
        y = read_measurements(a.measurements);
        config = {{"measurements", a.measurements}};
    } else {
        throw InvalidInput("music: give --measurements or --synthesize");
    }

    const Index M = y.size() - 1;
    MusicOptions opt;
    opt.S = a.S ? *a.S : truth ? static_cast<Index>(truth->size()) : 0;
    if (opt.S < 1) throw InvalidInput("music: --S is required with --measurements");
    opt.L = a.L ? *a.L : M / 2;
    opt.N = a.N ? *a.N : default_grid(M);
    opt.refine = a.refine;

    const auto est = music_estimate(y, opt);
    {
        std::ofstream grid(dir / "imaging_grid.csv");
        write_imaging_grid_csv(grid, est.grid);
    }
    json rec = support_to_json(est.recovered);
    rec["peak_values"] = json::array();
    for (double v : est.peak_values) rec["peak_values"].push_back(std::isfinite(v) ? json(v) : json("inf"));
    rec["refined"] = est.refined;
    rec["M"] = M;
    rec["L"] = opt.L;
    rec["grid"] = opt.N;
    if (truth) {
        rec["truth"] = std::vector<double>(truth->begin(), truth->end());
        rec["matched_error"] = match_supports(*truth, est.recovered);
    }
    write_json_file(dir / "recovered.json", rec);
    write_manifest(dir, "music", {{"S", opt.S}, {"L", opt.L}, {"grid", opt.N}, {"refine", opt.refine}}, config, seed);

    std::cout << "recovered support:";
    for (double w : est.recovered) std::printf(" %.10f", w);
    std::cout << "\n";
    if (truth) std::printf("matched error vs truth: %.3g\n", rec["matched_error"].get<double>());
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

} // namespace

int srmusic_main(int argc, char** argv)
{
    CLI::App app{"Single-snapshot MUSIC and restricted Fourier matrix conditioning experiments"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--seed", g.seed, "RNG seed (default 0)");
    app.add_option("--jobs", g.jobs, "worker threads (default: all cores)");
    app.add_option("--out", g.out, "output directory")->capture_default_str();

    GenSupportArgs gen;
    auto* c_gen = app.add_subcommand("gen-support", "generate a separated-clumps support");
    c_gen->add_option("--spec", gen.spec, "clump spec JSON")->required();
    c_gen->add_option("--M", gen.M, "override the spec's M");

    SigmaMinArgs smin;
    auto* c_smin = app.add_subcommand("sigma-min", "exact singular values of the Fourier matrix on a support");
    c_smin->add_option("--support", smin.support, "support JSON")->required();
    c_smin->add_option("--M", smin.M, "frequency cutoff")->required();
    c_smin->add_option("--export-matrix", smin.export_matrix, "write the matrix in text form");

    CampaignArgs sweep;
    auto* c_sweep = app.add_subcommand("bounds-sweep", "sigma_min scaling sweep (lower or upper bound)");
    c_sweep->add_option("--config", sweep.config, "experiment config or manifest")->required();
    c_sweep->add_option("--M", sweep.M);
    c_sweep->add_option("--S", sweep.S);

    CampaignArgs pert;
    auto* c_pert = app.add_subcommand("perturbation", "check the Wedin-type correlation bound");
    c_pert->add_option("--config", pert.config, "experiment config or manifest")->required();
    c_pert->add_option("--M", pert.M);
    c_pert->add_option("--L", pert.L);
    c_pert->add_option("--grid", pert.N);

    ConcentrationArgs conc;
    auto* c_conc = app.add_subcommand("concentration", "Hankel noise norm concentration");
    c_conc->add_option("--config", conc.campaign.config, "experiment config or manifest");
    c_conc->add_option("--M", conc.M)->capture_default_str();
    c_conc->add_option("--L", conc.L, "default floor(M/2)");
    c_conc->add_option("--sigma", conc.sigma)->capture_default_str();
    c_conc->add_option("--trials", conc.trials)->capture_default_str();
    c_conc->add_option("--noise-kind", conc.noise_kind)->capture_default_str();

    CampaignArgs phase;
    auto* c_phase = app.add_subcommand("phase-transition", "MUSIC success over (SRF, noise) grids");
    c_phase->add_option("--config", phase.config, "experiment config or manifest")->required();
    c_phase->add_option("--M", phase.M);
    c_phase->add_option("--L", phase.L);
    c_phase->add_option("--grid", phase.N);

    MusicArgs music;
    auto* c_music = app.add_subcommand("music", "run MUSIC on measurements");
    auto* src = c_music->add_option("--measurements", music.measurements, "CSV (index,re,im) or JSON");
    c_music->add_option("--synthesize", music.synthesize, "synthesis spec JSON")->excludes(src);
    c_music->add_option("--M", music.M);
    c_music->add_option("--L", music.L, "default floor(M/2)");
    c_music->add_option("--S", music.S);
    c_music->add_option("--grid", music.N, "default 16M");
    c_music->add_option("--sigma", music.sigma);
    c_music->add_option("--noise-kind", music.noise_kind);
    c_music->add_flag("--refine", music.refine, "golden-section peak polish");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        std::cerr << app.help();
        return 1;
    }

    try {
        if (*c_gen) return run_gen_support(g, gen);
        if (*c_smin) return run_sigma_min(g, smin);
        if (*c_sweep) {
            return run_campaign(g, "bounds-sweep", load_campaign(g, sweep),
                                {ExperimentKind::SigmaMinSweep, ExperimentKind::UpperBoundSweep});
        }
        if (*c_pert) {
            return run_campaign(g, "perturbation", load_campaign(g, pert), {ExperimentKind::PerturbationCheck});
        }
        if (*c_conc) return run_concentration_cmd(g, conc);
        if (*c_phase) {
            return run_campaign(g, "phase-transition", load_campaign(g, phase), {ExperimentKind::PhaseTransition});
        }
        if (*c_music) return run_music(g, music);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
