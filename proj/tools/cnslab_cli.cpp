#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cnslab.hpp"

namespace fs = std::filesystem;
using namespace cnslab;

namespace {

struct CommonFlags {
    std::string manifest;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    std::optional<int> dim;

    void attach(CLI::App* app, bool manifest_required)
    {
        auto* opt = app->add_option("--manifest", manifest, "manifest file (key = value)");
        if (manifest_required)
            opt->required()->check(CLI::ExistingFile);
        app->add_option("--out", out, "output directory");
        app->add_option("--seed", seed, "override the manifest seed");
        app->add_option("--grid", grid, "override points per axis");
        app->add_option("--dim", dim, "override dimension")->check(CLI::IsMember({2, 3}));
    }

    ManifestOverrides overrides() const
    {
        ManifestOverrides o;
        o.seed = seed;
        o.points = grid;
        o.dim = dim;
        if (!out.empty())
            o.output = out;
        return o;
    }

    RunManifest load(const std::string& fallback_text = "") const
    {
        if (manifest.empty())
            return parse_manifest(fallback_text, overrides());
        return load_manifest(manifest, overrides());
    }
};

// Wall-clock data goes here only, so the other artifacts stay byte-identical.
void append_log(const fs::path& dir, const std::string& command, double seconds, int code)
{
    fs::create_directories(dir);
    std::ofstream log(dir / "run.log", std::ios::app);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::localtime(&now));
    log << stamp << " " << command << " exit=" << code << " wall=" << seconds << "s\n";
}

int report(const char* label, Verdict v)
{
    std::cout << label << ": " << (v == Verdict::pass ? "PASS" : "FAIL") << " (exit " << exit_code(v) << ")\n";
    return exit_code(v);
}

Verdict verdict_if(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cnslab: mild solutions of chemotaxis-fluid systems on the periodic box"};
    app.require_subcommand(1);

    CommonFlags solve_f, verify_f, scaling_f, uniq_f, emb_f, sweep_f, norms_f;
    std::string trajectory_dir, field_path;
    std::vector<std::string> verify_which{"mass", "nonnegativity", "l1", "decay", "norms"};
    int verify_stride = 4;
    int embedding_samples = 0;

    auto* solve_cmd = app.add_subcommand("solve", "Picard solve plus the diagnostics listed in the manifest");
    solve_f.attach(solve_cmd, true);

    auto* norms_cmd = app.add_subcommand("norms", "norm report for a stored field");
    norms_f.attach(norms_cmd, false);
    norms_cmd->add_option("--field", field_path, "MFLD file (instead of a norms manifest)")->check(CLI::ExistingFile);

    auto* verify_cmd = app.add_subcommand("verify", "diagnostics on an existing trajectory directory");
    verify_f.attach(verify_cmd, false);
    verify_cmd->add_option("--trajectory", trajectory_dir, "trajectory directory")->required()->check(CLI::ExistingDirectory);
    verify_cmd->add_option("--checks", verify_which, "diagnostics to run")->delimiter(',');
    verify_cmd->add_option("--ball-stride", verify_stride, "ball centre stride")->check(CLI::PositiveNumber);

    auto* scaling_cmd = app.add_subcommand("scaling-test", "delta = 2 parabolic rescaling check");
    scaling_f.attach(scaling_cmd, true);

    auto* uniq_cmd = app.add_subcommand("uniqueness-test", "two Picard runs from different starting guesses");
    uniq_f.attach(uniq_cmd, true);

    auto* emb_cmd = app.add_subcommand("embedding-suite", "embedding ratios on random 3D fields");
    emb_f.attach(emb_cmd, false);
    emb_cmd->add_option("--samples", embedding_samples, "number of random fields (>= 30)");

    auto* sweep_cmd = app.add_subcommand("sweep", "contraction ratios over an amplitude grid");
    sweep_f.attach(sweep_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help exits 0; every other command-line problem is a config error
        return app.exit(e) == 0 ? 0 : exit_code(Verdict::config_error);
    }

    const auto start = std::chrono::steady_clock::now();
    fs::path log_dir = "out";
    int code = 0;
    try {
        if (solve_cmd->parsed()) {
            const RunManifest m = solve_f.load();
            log_dir = m.output;
            const auto r = run(m);
            std::cout << "picard iterations " << r.trace.iterations() << ", converged " << r.trace.converged << "\n";
            code = report("solve", r.verdict);
        } else if (norms_cmd->parsed()) {
            NormsRequest req;
            if (!norms_f.manifest.empty()) {
                std::ifstream is(norms_f.manifest);
                std::stringstream ss;
                ss << is.rdbuf();
                const fs::path base = fs::path(norms_f.manifest).parent_path();
                req = parse_norms_request(ss.str(), base.empty() ? "." : base, norms_f.manifest);
            } else if (!field_path.empty()) {
                req = parse_norms_request("field = " + field_path);
            } else {
                throw ConfigError("norms needs --manifest or --field");
            }
            log_dir = norms_f.out.empty() ? fs::path("out") : fs::path(norms_f.out);
            const NormReport rep = compute_norms(read_mfld(req.field), req);
            write_json(log_dir / "norms.json", to_json(rep));
            write_text(log_dir / "norms.txt", norm_report_text(rep));
            std::cout << norm_report_text(rep);
            code = report("norms", Verdict::pass);
        } else if (verify_cmd->parsed()) {
            log_dir = verify_f.out.empty() ? fs::path(trajectory_dir) / "verify" : fs::path(verify_f.out);
            for (const auto& w : verify_which)
                if (!known_diagnostics().count(w) || w == "smallness" || w == "uniqueness")
                    throw ConfigError("verify cannot run '" + w + "' on a stored trajectory");
            code = report("verify", verify(trajectory_dir, verify_which, verify_stride, log_dir));
        } else if (scaling_cmd->parsed()) {
            const RunManifest m = scaling_f.load();
            log_dir = m.output;
            const auto r = scaling_covariance_test(m.system, build_state(m), build_config(m), m.scaling_delta);
            write_json(m.output / "scaling.json", to_json(r));
            std::cout << "max relative discrepancy " << r.max_discrepancy << "\n";
            code = report("scaling-test", verdict_if(r.base_converged && r.rescaled_converged && r.max_discrepancy <= 1e-2));
        } else if (uniq_cmd->parsed()) {
            const RunManifest m = uniq_f.load();
            log_dir = m.output;
            const auto r = uniqueness_probe(m.system, build_state(m), build_config(m), InitialGuess::caloric,
                                            InitialGuess::perturbed);
            write_json(m.output / "uniqueness.json", to_json(r));
            if (r.distance)
                std::cout << "sup distance between limits " << *r.distance << "\n";
            code = report("uniqueness-test", verdict_if(r.distance && *r.distance <= 1e-8));
        } else if (emb_cmd->parsed()) {
            const RunManifest m = emb_f.load("dim = 3\ngrid = 32\noutput = out\n");
            log_dir = m.output;
            const int samples = embedding_samples > 0 ? embedding_samples : m.embedding_samples;
            const auto r = embedding_suite(samples, m.seed, m.grid());
            write_json(m.output / "embedding.json", to_json(r));
            std::cout << "max ratios " << r.max_ratio_chain_lower << " " << r.max_ratio_chain_upper << " "
                      << r.max_ratio_bmo << "\n";
            code = report("embedding-suite", verdict_if(r.all_finite));
        } else if (sweep_cmd->parsed()) {
            const RunManifest m = sweep_f.load();
            log_dir = m.output;
            const auto rows = amplitude_sweep(m);
            write_sweep_csv(m.output / "sweep.csv", rows);
            bool monotone = true;
            for (std::size_t i = 1; i < rows.size(); ++i)
                if (rows[i].converged && rows[i - 1].converged && rows[i].factor > rows[i - 1].factor)
                    monotone = monotone && rows[i].first_ratio >= rows[i - 1].first_ratio;
            code = report("sweep", verdict_if(monotone));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        code = exit_code(Verdict::config_error);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        code = exit_code(Verdict::config_error);
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        code = exit_code(Verdict::numerical_failure);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (code != exit_code(Verdict::config_error))
        append_log(log_dir, app.get_subcommands().front()->get_name(), secs, code);
    return code;
}
