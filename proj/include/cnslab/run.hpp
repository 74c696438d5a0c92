#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cnslab/diagnostics.hpp"
#include "cnslab/manifest.hpp"
#include "cnslab/path_norms.hpp"
#include "cnslab/report_io.hpp"
#include "cnslab/snapshot_io.hpp"
#include "cnslab/solver.hpp"

namespace cnslab {

enum class Verdict { pass = 0, fail = 1, config_error = 2, numerical_failure = 3 };

inline int exit_code(Verdict v) { return static_cast<int>(v); }

inline Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

// ---------------- data ----------------

inline ScalarField load_scalar_source(const FieldSource& s, const Grid& g, const std::string& name)
{
    if (!s.path)
        return generate_scalar(s.preset, g);
    ScalarField f = read_scalar(*s.path);
    if (!(f.grid() == g))
        throw ConfigError(name + ": snapshot grid does not match the manifest grid");
    return f;
}

inline VectorField load_vector_source(const FieldSource& s, const Grid& g, const std::string& name, bool divergence_free)
{
    if (!s.path)
        return generate_vector(s.preset, g, divergence_free);
    VectorField v = read_vector(*s.path);
    if (!(v.grid() == g))
        throw ConfigError(name + ": snapshot grid does not match the manifest grid");
    return v;
}

inline SolutionState build_state(const RunManifest& m)
{
    const Grid g = m.grid();
    SolutionState s{load_scalar_source(m.c, g, "c"), load_scalar_source(m.n, g, "n"),
                    load_vector_source(m.u, g, "u", true), {}};
    if (m.v)
        s.v = load_scalar_source(*m.v, g, "v");
    return s;
}

inline SolverConfig build_config(const RunManifest& m)
{
    SolverConfig cfg;
    cfg.kappa = m.kappa;
    cfg.times = m.times();
    cfg.picard_tol = m.picard_tol;
    cfg.picard_max_iter = m.picard_max_iter;
    cfg.epsilon = m.epsilon;
    cfg.ball_stride = m.ball_stride;
    cfg.guess = m.guess;
    cfg.couple_v = m.couple_v;
    cfg.v_sensitivity = m.v_sensitivity;
    const Grid g = m.grid();
    if (m.forcing) {
        VectorField f = load_vector_source(*m.forcing, g, "forcing", false);
        if (m.system == SystemKind::cns)
            cfg.grad_phi = std::move(f);
        else
            cfg.psi = std::move(f);
    }
    if (m.d0) {
        cfg.d0 = load_scalar_source(*m.d0, g, "d0");
        cfg.delta0 = m.delta0;
    }
    cfg.validate();
    return cfg;
}

inline SolveResult solve(const RunManifest& m, const SolutionState& init, const SolverConfig& cfg)
{
    return m.system == SystemKind::cns ? solve_cns_picard(init, cfg) : solve_dcns_picard(init, cfg);
}

inline Verdict trace_verdict(const PicardTrace& t)
{
    if (t.converged)
        return Verdict::pass;
    return t.note.find("non-finite") != std::string::npos ? Verdict::numerical_failure : Verdict::fail;
}

// ---------------- norm reports ----------------

/// Data norms that enter the smallness conditions, plus a few companions.
inline NormReport initial_norm_report(const SolutionState& s, const BallFamily& balls)
{
    NormReport r;
    r.center_stride = balls.center_stride();
    r.radii = balls.radii();
    const int dim = s.grid().dim();
    r.set("c0.sup", s.c.sup_norm());
    r.set("c0.bmo", bmo_caloric_seminorm(s.c, balls));
    r.set("n0.sup", s.n.sup_norm());
    r.set("n0.mean", s.n.mean());
    r.set("n0.carleson_2", carleson_caloric_norm(s.n, 2.0, balls));
    r.set("n0.besov_caloric_m2", besov_caloric_sup_norm(s.n, -2.0, balls));
    if (dim == 2)
        r.set("n0.besov_m1_22", besov_minus_one_caloric(s.n));
    r.set("u0.sup", s.u.sup_norm());
    r.set("u0.carleson_0", carleson_caloric_norm(s.u, 0.0, balls));
    if (s.v)
        r.set("v0.bmo", bmo_caloric_seminorm(*s.v, balls));
    return r;
}

inline Json path_norm_json(const Trajectory& t, const BallFamily& balls)
{
    const double T = t.times.horizon();
    Json j{{"horizon", T},
           {"X1_c", to_json(path_norm_X1(t.c, T, balls))},
           {"X2_n", to_json(path_norm_X2(t.n, T, balls))},
           {"X3_u", to_json(path_norm_X3(t.u, T, balls))}};
    if (t.v)
        j["X1_v"] = to_json(path_norm_X1(*t.v, T, balls));
    return j;
}

// ---------------- trajectory diagnostics ----------------

struct DiagnosticOutcome {
    Json verdicts = Json::object();
    Verdict verdict = Verdict::pass;
};

/// Writes CSV/JSON for each requested diagnostic on an existing trajectory.
inline DiagnosticOutcome run_diagnostics(const Trajectory& traj, const std::vector<std::string>& which,
                                         const BallFamily& balls, const std::filesystem::path& out)
{
    DiagnosticOutcome d;
    auto wants = [&](const char* name) { return std::find(which.begin(), which.end(), name) != which.end(); };
    auto record = [&](const char* name, bool pass) {
        d.verdicts[name] = pass;
        if (!pass)
            d.verdict = worst(d.verdict, Verdict::fail);
    };
    if (wants("mass")) {
        const auto mv = check_mass_conservation(traj);
        write_conservation_csv(out / "conservation.csv", mv.series);
        d.verdicts["mass_drift"] = mv.max_drift;
        record("mass", mv.pass);
    }
    if (wants("nonnegativity")) {
        const auto nn = check_nonnegativity(traj);
        d.verdicts["nonnegativity_hypothesis"] = nn.hypothesis_met;
        d.verdicts["nonnegativity_worst"] = nn.worst;
        if (nn.pass)
            record("nonnegativity", *nn.pass);
    }
    if (wants("l1")) {
        const auto l1 = check_l1_contraction(traj);
        d.verdicts["l1_max_increase"] = l1.max_increase;
        // the L1 bound is stated for nonnegative cell densities
        if (traj.n[0].min() >= 0.0)
            record("l1", l1.pass);
    }
    if (wants("decay")) {
        const auto dec = decay_weight_series(traj);
        write_decay_csv(out / "decay.csv", dec);
        d.verdicts["decay_bounded"] = dec.pass;
    }
    if (wants("norms"))
        write_json(out / "path_norms.json", path_norm_json(traj, balls));
    return d;
}

// ---------------- run ----------------

struct RunOutcome {
    Verdict verdict = Verdict::pass;
    PicardTrace trace;
    std::filesystem::path directory;
};

namespace detail {

inline void mark_status(const std::filesystem::path& out, const std::string& status)
{
    write_text(out / "STATUS", status + "\n");
}

} // namespace detail

/// Solve plus every requested diagnostic. STATUS reads "incomplete" until the
/// last artifact is written, or "failed: ..." if a module error escaped.
inline RunOutcome run(const RunManifest& m)
{
    const auto out = m.output;
    std::filesystem::create_directories(out);
    detail::mark_status(out, "incomplete");
    write_text(out / "manifest.txt", to_text(m));
    RunOutcome r;
    r.directory = out;
    try {
        const SolutionState init = build_state(m);
        const SolverConfig cfg = build_config(m);
        const BallFamily balls = BallFamily::dyadic(init.grid(), cfg.ball_stride);

        const auto wants = [&](const char* name) {
            return std::find(m.diagnostics.begin(), m.diagnostics.end(), name) != m.diagnostics.end();
        };
        if (wants("smallness"))
            write_json(out / "smallness.json", to_json(smallness_report(init, cfg, balls, m.system)));
        if (wants("norms")) {
            const auto report = initial_norm_report(init, balls);
            write_json(out / "initial_norms.json", to_json(report));
            write_text(out / "initial_norms.txt", norm_report_text(report));
        }

        const SolveResult res = solve(m, init, cfg);
        r.trace = res.trace;
        write_trace_csv(out / "picard_trace.csv", res.trace);
        write_json(out / "picard_trace.json", to_json(res.trace));
        r.verdict = trace_verdict(res.trace);

        Json verdicts{{"picard_converged", res.trace.converged}};
        if (res.trace.converged) {
            const auto diag = run_diagnostics(res.trajectory, m.diagnostics, balls, out);
            verdicts.update(diag.verdicts);
            r.verdict = worst(r.verdict, diag.verdict);
            if (wants("uniqueness")) {
                const auto other = m.guess == InitialGuess::perturbed ? InitialGuess::caloric : InitialGuess::perturbed;
                const auto u = uniqueness_probe(m.system, init, cfg, m.guess, other);
                write_json(out / "uniqueness.json", to_json(u));
                const bool same = u.distance && *u.distance <= 1e-8;
                verdicts["uniqueness"] = same;
                if (!same)
                    r.verdict = worst(r.verdict, Verdict::fail);
            }
            if (m.write_snapshots)
                write_trajectory(out / "trajectory", res.trajectory);
        }
        verdicts["exit_code"] = exit_code(r.verdict);
        write_json(out / "verdicts.json", verdicts);
        detail::mark_status(out, "complete");
    } catch (const std::exception& e) {
        detail::mark_status(out, std::string("failed: ") + e.what());
        throw;
    }
    return r;
}

/// Diagnostics on a trajectory directory written by run().
inline Verdict verify(const std::filesystem::path& trajectory_dir, const std::vector<std::string>& which,
                      int ball_stride, const std::filesystem::path& out)
{
    const Trajectory traj = read_trajectory(trajectory_dir);
    const BallFamily balls = BallFamily::dyadic(traj.grid(), ball_stride);
    std::filesystem::create_directories(out);
    const auto d = run_diagnostics(traj, which, balls, out);
    Json verdicts = d.verdicts;
    verdicts["exit_code"] = exit_code(d.verdict);
    write_json(out / "verdicts.json", verdicts);
    return d.verdict;
}

// ---------------- norms on a stored field ----------------

struct NormsRequest {
    std::filesystem::path field;
    std::vector<std::string> norms{"sup", "mean", "morrey", "campanato", "carleson", "bmo", "besov_caloric"};
    int ball_stride = 4;
    double morrey_p = 2.0, morrey_mu = 0.0;
    double campanato_p = 2.0, campanato_lambda = 0.0;
    double carleson_lambda = 0.0;
    double besov_s = -1.0;
    double bm_s = -0.5, bm_p = 2.0, bm_lambda = 0.0, bm_q = std::numeric_limits<double>::infinity();
};

inline const std::set<std::string>& known_norms()
{
    static const std::set<std::string> names{"sup",      "mean", "morrey",        "campanato",
                                             "carleson", "bmo",  "besov_caloric", "besov_morrey"};
    return names;
}

inline NormsRequest parse_norms_request(const std::string& text, const std::filesystem::path& base = ".",
                                        const std::string& origin = "norms manifest")
{
    const KeyValues kv = KeyValues::parse(text, origin);
    NormsRequest r;
    auto field = kv.text("field");
    if (!field)
        throw ConfigError(origin + ": 'field' is required");
    r.field = *field;
    if (r.field.is_relative())
        r.field = base / r.field;
    if (!std::filesystem::exists(r.field))
        throw ConfigError(kv.context("field") + ": no such file " + r.field.string());
    if (kv.has("norms"))
        r.norms = kv.get_words("norms");
    for (const auto& n : r.norms)
        if (!known_norms().count(n))
            throw ConfigError(kv.context("norms") + ": unknown norm '" + n + "'");
    r.ball_stride = static_cast<int>(kv.get_int("ball_stride", r.ball_stride));
    r.morrey_p = kv.get("morrey.p", r.morrey_p);
    r.morrey_mu = kv.get("morrey.mu", r.morrey_mu);
    r.campanato_p = kv.get("campanato.p", r.campanato_p);
    r.campanato_lambda = kv.get("campanato.lambda", r.campanato_lambda);
    r.carleson_lambda = kv.get("carleson.lambda", r.carleson_lambda);
    r.besov_s = kv.get("besov.s", r.besov_s);
    r.bm_s = kv.get("besov_morrey.s", r.bm_s);
    r.bm_p = kv.get("besov_morrey.p", r.bm_p);
    r.bm_lambda = kv.get("besov_morrey.lambda", r.bm_lambda);
    if (auto q = kv.text("besov_morrey.q"); q && *q != "inf")
        r.bm_q = kv.get("besov_morrey.q", 0.0);
    kv.reject_unknown();
    if (r.ball_stride < 1)
        throw ConfigError(kv.context("ball_stride") + ": must be >= 1");
    if (!(r.morrey_p >= 1.0) || !(r.campanato_p >= 1.0) || !(r.bm_p >= 1.0))
        throw ConfigError(origin + ": exponents p must be >= 1");
    if (!(r.carleson_lambda > -2.0 && r.carleson_lambda <= 2.0))
        throw ConfigError(kv.context("carleson.lambda") + ": lambda must lie in (-2, 2]");
    if (!(r.besov_s < 0.0))
        throw ConfigError(kv.context("besov.s") + ": the caloric Besov form needs s < 0");
    return r;
}

/// Norms of every component; ids carry a [j] suffix when the file holds more
/// than one component, and "carleson.vector" is added for N-component files.
inline NormReport compute_norms(const std::vector<ScalarField>& comps, const NormsRequest& req)
{
    const Grid g = comps.front().grid();
    const BallFamily balls = BallFamily::dyadic(g, std::min(req.ball_stride, g.points_per_axis()));
    std::optional<LPBank> bank;
    NormReport r;
    r.center_stride = balls.center_stride();
    r.radii = balls.radii();
    r.params = {{"morrey.p", req.morrey_p},         {"morrey.mu", req.morrey_mu},
                {"campanato.p", req.campanato_p},   {"campanato.lambda", req.campanato_lambda},
                {"carleson.lambda", req.carleson_lambda}, {"besov.s", req.besov_s},
                {"besov_morrey.s", req.bm_s},       {"besov_morrey.p", req.bm_p},
                {"besov_morrey.lambda", req.bm_lambda}, {"besov_morrey.q", req.bm_q}};
    for (std::size_t j = 0; j < comps.size(); ++j) {
        const ScalarField& f = comps[j];
        const std::string sfx = comps.size() > 1 ? "[" + std::to_string(j) + "]" : "";
        for (const auto& name : req.norms) {
            if (name == "sup")
                r.set("sup" + sfx, f.sup_norm());
            else if (name == "mean")
                r.set("mean" + sfx, f.mean());
            else if (name == "morrey")
                r.set("morrey" + sfx, morrey_norm(f, req.morrey_p, req.morrey_mu, balls));
            else if (name == "campanato")
                r.set("campanato" + sfx, campanato_seminorm(f, req.campanato_p, req.campanato_lambda, balls));
            else if (name == "carleson")
                r.set("carleson" + sfx, carleson_caloric_norm(f, req.carleson_lambda, balls));
            else if (name == "bmo")
                r.set("bmo" + sfx, bmo_caloric_seminorm(f, balls));
            else if (name == "besov_caloric")
                r.set("besov_caloric" + sfx, besov_caloric_sup_norm(f, req.besov_s, balls));
            else if (name == "besov_morrey") {
                if (!bank)
                    bank.emplace(g);
                const auto bm = besov_morrey_norm(f, req.bm_s, req.bm_p, req.bm_lambda, req.bm_q, *bank, balls);
                NormValue nv;
                nv.value = bm.value;
                r.set("besov_morrey" + sfx, nv);
            }
        }
    }
    const bool wants_carleson = std::find(req.norms.begin(), req.norms.end(), "carleson") != req.norms.end();
    if (wants_carleson && static_cast<int>(comps.size()) == g.dim())
        r.set("carleson.vector", carleson_caloric_norm(VectorField(g, comps), req.carleson_lambda, balls));
    return r;
}

// ---------------- parameter sweep ----------------

struct SweepRow {
    double factor = 0.0;
    double data_size = 0.0;  // smallness total
    int iterations = 0;
    double first_ratio = 0.0;
    double max_ratio = 0.0;  // over iterations >= 2
    bool converged = false;
};

/// Scales every preset amplitude (and snapshot data) by each factor and records
/// the contraction behaviour.
inline std::vector<SweepRow> amplitude_sweep(const RunManifest& m)
{
    const SolutionState base = build_state(m);
    const SolverConfig cfg = build_config(m);
    const BallFamily balls = BallFamily::dyadic(base.grid(), cfg.ball_stride);
    std::vector<SweepRow> rows;
    for (double f : m.sweep_factors) {
        SolutionState s{base.c * f, base.n * f, base.u * f, {}};
        if (base.v)
            s.v = *base.v * f;
        const auto res = solve(m, s, cfg);
        SweepRow row;
        row.factor = f;
        row.data_size = smallness_report(s, cfg, balls, m.system).total;
        row.iterations = res.trace.iterations();
        row.converged = res.trace.converged;
        if (!res.trace.ratios.empty()) {
            row.first_ratio = res.trace.ratios.front();
            for (double q : res.trace.ratios)
                row.max_ratio = std::max(row.max_ratio, q);
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows)
{
    std::vector<double> f, size, it, first, mx, conv;
    for (const auto& r : rows) {
        f.push_back(r.factor);
        size.push_back(r.data_size);
        it.push_back(r.iterations);
        first.push_back(r.first_ratio);
        mx.push_back(r.max_ratio);
        conv.push_back(r.converged ? 1.0 : 0.0);
    }
    write_csv(path, {"factor", "data_size", "iterations", "first_ratio", "max_ratio", "converged"},
              {f, size, it, first, mx, conv});
}

} // namespace cnslab
