#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cnslab/errors.hpp"
#include "cnslab/presets.hpp"
#include "cnslab/solver.hpp"

namespace cnslab {

// Flat `key = value` text, one pair per line, '#' starts a comment. Every key
// is typed; unknown keys and malformed values are ConfigErrors. The full list
// lives in README.md.

/// Raw key/value pairs with the line each came from.
class KeyValues {
public:
    static KeyValues parse(const std::string& text, const std::string& origin = "manifest")
    {
        KeyValues kv;
        kv.origin_ = origin;
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty())
                continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(kv.where(lineno) + ": expected 'key = value'");
            std::string key = trim(trimmed.substr(0, eq));
            std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError(kv.where(lineno) + ": empty key");
            if (kv.entries_.count(key))
                throw ConfigError(kv.where(lineno) + ": duplicate key '" + key + "'");
            kv.entries_[key] = {value, lineno};
        }
        return kv;
    }

    void set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }
    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::optional<std::string> text(const std::string& key) const
    {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return std::nullopt;
        used_.insert(key);
        return it->second.value;
    }

    std::string get(const std::string& key, const std::string& fallback) const { return text(key).value_or(fallback); }

    double get(const std::string& key, double fallback) const
    {
        auto s = text(key);
        if (!s)
            return fallback;
        return to_double(key, *s);
    }

    long long get_int(const std::string& key, long long fallback) const
    {
        auto s = text(key);
        if (!s)
            return fallback;
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(*s, &pos);
        } catch (const std::exception&) {
            throw ConfigError(context(key) + ": '" + *s + "' is not an integer");
        }
        if (pos != s->size())
            throw ConfigError(context(key) + ": '" + *s + "' is not an integer");
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) const
    {
        auto s = text(key);
        if (!s)
            return fallback;
        if (*s == "true" || *s == "1" || *s == "yes")
            return true;
        if (*s == "false" || *s == "0" || *s == "no")
            return false;
        throw ConfigError(context(key) + ": '" + *s + "' is not a boolean");
    }

    std::vector<double> get_list(const std::string& key) const
    {
        std::vector<double> out;
        auto s = text(key);
        if (!s)
            return out;
        for (const auto& item : split(*s))
            out.push_back(to_double(key, item));
        return out;
    }

    std::vector<std::string> get_words(const std::string& key) const
    {
        auto s = text(key);
        return s ? split(*s) : std::vector<std::string>{};
    }

    /// Keys present in the text but never read.
    void reject_unknown() const
    {
        for (const auto& [key, e] : entries_)
            if (!used_.count(key))
                throw ConfigError(context(key) + ": unknown key '" + key + "'");
    }

    std::string context(const std::string& key) const
    {
        auto it = entries_.find(key);
        if (it == entries_.end() || it->second.line == 0)
            return origin_ + " [" + key + "]";
        return where(it->second.line);
    }

    static std::vector<std::string> split(const std::string& s)
    {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : s + ",") {
            if (ch == ',') {
                if (auto t = trim(cur); !t.empty())
                    out.push_back(t);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        return out;
    }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static std::string trim(const std::string& s)
    {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos)
            return "";
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    double to_double(const std::string& key, const std::string& s) const
    {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ConfigError(context(key) + ": '" + s + "' is not a number");
        }
        if (pos != s.size() || !std::isfinite(v))
            throw ConfigError(context(key) + ": '" + s + "' is not a finite number");
        return v;
    }

    std::string where(int line) const { return origin_ + ":" + std::to_string(line); }

    std::string origin_;
    std::map<std::string, Entry> entries_;
    mutable std::set<std::string> used_;
};

/// A data preset or a snapshot file for one component.
struct FieldSource {
    DataPreset preset;
    std::optional<std::filesystem::path> path;
};

struct RunManifest {
    // grid
    int dim = 2;
    int points = 64;
    double box_length = 2.0 * std::numbers::pi;
    // time
    double horizon = 1.0;
    std::string time_grid = "geometric_uniform";
    int panels = 32;
    int geometric_levels = -1;
    // system
    SystemKind system = SystemKind::cns;
    double kappa = 0.0;
    double v_sensitivity = 1.0;
    bool couple_v = true;
    // data
    std::uint64_t seed = 0;
    FieldSource c, n, u;
    std::optional<FieldSource> v;
    std::optional<FieldSource> forcing;
    std::optional<FieldSource> d0;
    double delta0 = 0.0;
    // solver
    double picard_tol = 1e-12;
    int picard_max_iter = 60;
    double epsilon = 1.0;
    int ball_stride = 4;
    InitialGuess guess = InitialGuess::caloric;
    // outputs
    std::vector<std::string> diagnostics{"mass", "nonnegativity", "l1", "decay", "smallness", "norms"};
    bool write_snapshots = true;
    std::filesystem::path output = "out";
    // subcommand-specific
    double scaling_delta = 2.0;
    int embedding_samples = 50;
    std::vector<double> sweep_factors{0.25, 0.5, 1.0, 2.0, 4.0};

    Grid grid() const { return Grid(dim, box_length, points); }

    TimeGrid times() const
    {
        if (time_grid == "uniform")
            return TimeGrid::uniform(horizon, panels);
        return TimeGrid::geometric_uniform(horizon, panels, geometric_levels);
    }
};

inline const std::set<std::string>& known_diagnostics()
{
    static const std::set<std::string> names{"mass", "nonnegativity", "l1", "decay", "smallness", "norms", "uniqueness"};
    return names;
}

namespace detail {

inline std::array<int, 3> parse_mode(const KeyValues& kv, const std::string& key)
{
    std::array<int, 3> m{1, 0, 0};
    const auto vals = kv.get_list(key);
    if (vals.empty())
        return m;
    if (vals.size() > 3)
        throw ConfigError(kv.context(key) + ": at most three mode indices");
    m = {0, 0, 0};
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] != std::round(vals[i]))
            throw ConfigError(kv.context(key) + ": mode indices must be integers");
        m[i] = static_cast<int>(vals[i]);
    }
    return m;
}

inline FieldSource parse_source(const KeyValues& kv, const std::string& prefix, std::uint64_t default_seed,
                                const std::filesystem::path& base)
{
    FieldSource s;
    const std::string kind = kv.get(prefix + ".kind", std::string("zero"));
    if (kind == "snapshot") {
        auto p = kv.text(prefix + ".path");
        if (!p)
            throw ConfigError(kv.context(prefix + ".kind") + ": snapshot source needs " + prefix + ".path");
        std::filesystem::path path(*p);
        if (path.is_relative())
            path = base / path;
        if (!std::filesystem::exists(path))
            throw ConfigError(kv.context(prefix + ".path") + ": no such file " + path.string());
        s.path = path;
        return s;
    }
    try {
        s.preset.kind = parse_preset_kind(kind);
    } catch (const ConfigError& e) {
        throw ConfigError(kv.context(prefix + ".kind") + ": " + e.what());
    }
    s.preset.amplitude = kv.get(prefix + ".amplitude", 0.0);
    const long long seed = kv.get_int(prefix + ".seed", static_cast<long long>(default_seed));
    if (seed < 0)
        throw ConfigError(kv.context(prefix + ".seed") + ": seed must be non-negative");
    s.preset.seed = static_cast<std::uint64_t>(seed);
    s.preset.mode = parse_mode(kv, prefix + ".mode");
    s.preset.width = kv.get(prefix + ".width", 0.0);
    s.preset.band = static_cast<int>(kv.get_int(prefix + ".band", 4));
    s.preset.degree = static_cast<int>(kv.get_int(prefix + ".degree", 0));
    if (s.preset.width < 0.0)
        throw ConfigError(kv.context(prefix + ".width") + ": width must be non-negative");
    if (s.preset.band < 1)
        throw ConfigError(kv.context(prefix + ".band") + ": band must be >= 1");
    if (s.preset.degree < 0 || s.preset.degree > 2)
        throw ConfigError(kv.context(prefix + ".degree") + ": degree must be 0, 1 or 2");
    return s;
}

inline void check_source(const FieldSource& s, const Grid& g, const std::string& name)
{
    if (s.path)
        return;
    const int M = g.points_per_axis();
    if (s.preset.kind == PresetKind::random_bandlimited || s.preset.kind == PresetKind::random_divfree)
        if (3 * s.preset.band >= M)
            throw ConfigError(name + ": band " + std::to_string(s.preset.band) + " is not resolved on M = " +
                              std::to_string(M));
    if (s.preset.kind == PresetKind::single_mode)
        for (int d = 0; d < 3; ++d)
            if (2 * std::abs(s.preset.mode[d]) >= M || (d >= g.dim() && s.preset.mode[d] != 0))
                throw ConfigError(name + ": mode index out of range for this grid");
}

} // namespace detail

inline std::string to_string(InitialGuess g)
{
    switch (g) {
    case InitialGuess::caloric: return "caloric";
    case InitialGuess::zero: return "zero";
    case InitialGuess::perturbed: return "perturbed";
    }
    return "caloric";
}

struct ManifestOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    std::optional<int> dim;
    std::optional<std::filesystem::path> output;
};

/// Parses and validates; touches no field storage. Relative snapshot paths
/// resolve against `base`.
inline RunManifest parse_manifest(const std::string& text, const ManifestOverrides& over = {},
                                  const std::filesystem::path& base = ".", const std::string& origin = "manifest")
{
    KeyValues kv = KeyValues::parse(text, origin);
    if (over.seed)
        kv.set("seed", std::to_string(*over.seed));
    if (over.points)
        kv.set("grid", std::to_string(*over.points));
    if (over.dim)
        kv.set("dim", std::to_string(*over.dim));
    if (over.output)
        kv.set("output", over.output->string());

    RunManifest m;
    m.dim = static_cast<int>(kv.get_int("dim", m.dim));
    m.points = static_cast<int>(kv.get_int("grid", m.points));
    m.box_length = kv.get("box_length", m.box_length);
    try {
        (void)m.grid();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(kv.context("grid") + ": " + e.what());
    }

    m.horizon = kv.get("horizon", m.horizon);
    m.time_grid = kv.get("time_grid", m.time_grid);
    m.panels = static_cast<int>(kv.get_int("panels", m.panels));
    m.geometric_levels = static_cast<int>(kv.get_int("geometric_levels", m.geometric_levels));
    if (m.time_grid != "uniform" && m.time_grid != "geometric_uniform")
        throw ConfigError(kv.context("time_grid") + ": expected 'uniform' or 'geometric_uniform'");
    if (!(m.horizon > 0.0))
        throw ConfigError(kv.context("horizon") + ": horizon must be positive");
    if (m.panels < 1 || m.panels > 100000)
        throw ConfigError(kv.context("panels") + ": panels must be in [1, 100000]");
    if (m.geometric_levels > 40)
        throw ConfigError(kv.context("geometric_levels") + ": at most 40 levels");

    const std::string system = kv.get("system", std::string("cns"));
    if (system == "cns")
        m.system = SystemKind::cns;
    else if (system == "dcns")
        m.system = SystemKind::dcns;
    else
        throw ConfigError(kv.context("system") + ": expected 'cns' or 'dcns'");
    m.kappa = kv.get("kappa", m.kappa);
    if (m.kappa < 0.0)
        throw ConfigError(kv.context("kappa") + ": kappa must be non-negative");
    m.v_sensitivity = kv.get("v_sensitivity", m.v_sensitivity);
    m.couple_v = kv.get_bool("couple_v", m.couple_v);

    const long long seed = kv.get_int("seed", 0);
    if (seed < 0)
        throw ConfigError(kv.context("seed") + ": seed must be non-negative");
    m.seed = static_cast<std::uint64_t>(seed);
    m.c = detail::parse_source(kv, "c", m.seed, base);
    m.n = detail::parse_source(kv, "n", m.seed + 1, base);
    m.u = detail::parse_source(kv, "u", m.seed + 2, base);
    const bool has_v = m.system == SystemKind::dcns;
    if (has_v)
        m.v = detail::parse_source(kv, "v", m.seed + 3, base);
    else if (kv.has("v.kind"))
        throw ConfigError(kv.context("v.kind") + ": v data only apply to system = dcns");
    if (kv.has("forcing.kind"))
        m.forcing = detail::parse_source(kv, "forcing", m.seed + 4, base);
    if (kv.has("d0.kind")) {
        if (m.system != SystemKind::cns)
            throw ConfigError(kv.context("d0.kind") + ": the d0 shift applies to system = cns");
        m.d0 = detail::parse_source(kv, "d0", m.seed + 5, base);
        m.delta0 = kv.get("delta0", 0.0);
        if (!(m.delta0 > 0.0))
            throw ConfigError(kv.context("d0.kind") + ": d0 needs delta0 > 0");
    }

    m.picard_tol = kv.get("picard_tol", m.picard_tol);
    m.picard_max_iter = static_cast<int>(kv.get_int("picard_max_iter", m.picard_max_iter));
    m.epsilon = kv.get("epsilon", m.epsilon);
    m.ball_stride = static_cast<int>(kv.get_int("ball_stride", m.ball_stride));
    const std::string guess = kv.get("guess", std::string("caloric"));
    if (guess == "caloric")
        m.guess = InitialGuess::caloric;
    else if (guess == "zero")
        m.guess = InitialGuess::zero;
    else if (guess == "perturbed")
        m.guess = InitialGuess::perturbed;
    else
        throw ConfigError(kv.context("guess") + ": expected 'caloric', 'zero' or 'perturbed'");
    if (!(m.picard_tol > 0.0))
        throw ConfigError(kv.context("picard_tol") + ": tolerance must be positive");
    if (m.picard_max_iter < 1 || m.picard_max_iter > 10000)
        throw ConfigError(kv.context("picard_max_iter") + ": must be in [1, 10000]");
    if (m.ball_stride < 1 || m.ball_stride > m.points)
        throw ConfigError(kv.context("ball_stride") + ": must be in [1, grid]");

    if (kv.has("diagnostics"))
        m.diagnostics = kv.get_words("diagnostics");
    for (const auto& d : m.diagnostics)
        if (!known_diagnostics().count(d))
            throw ConfigError(kv.context("diagnostics") + ": unknown diagnostic '" + d + "'");
    m.write_snapshots = kv.get_bool("snapshots", m.write_snapshots);
    m.output = kv.get("output", m.output.string());

    m.scaling_delta = kv.get("scaling.delta", m.scaling_delta);
    if (m.scaling_delta != 2.0)
        throw ConfigError(kv.context("scaling.delta") + ": only delta = 2 is supported");
    m.embedding_samples = static_cast<int>(kv.get_int("embedding.samples", m.embedding_samples));
    if (m.embedding_samples < 30)
        throw ConfigError(kv.context("embedding.samples") + ": at least 30 samples");
    if (kv.has("sweep.factors"))
        m.sweep_factors = kv.get_list("sweep.factors");
    for (double f : m.sweep_factors)
        if (!(f > 0.0))
            throw ConfigError(kv.context("sweep.factors") + ": factors must be positive");

    kv.reject_unknown();

    const Grid g = m.grid();
    detail::check_source(m.c, g, "c");
    detail::check_source(m.n, g, "n");
    detail::check_source(m.u, g, "u");
    if (m.v)
        detail::check_source(*m.v, g, "v");
    if (m.forcing)
        detail::check_source(*m.forcing, g, "forcing");
    if (m.d0)
        detail::check_source(*m.d0, g, "d0");
    if (!m.u.path && m.u.preset.kind == PresetKind::gaussian_blob && m.u.preset.amplitude != 0.0)
        throw ConfigError("u: gaussian_blob has no divergence-free vector form");
    return m;
}

inline RunManifest load_manifest(const std::filesystem::path& path, const ManifestOverrides& over = {})
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read manifest " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_manifest(ss.str(), over, path.parent_path().empty() ? "." : path.parent_path(), path.string());
}

namespace detail {

inline std::string format_double(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline void emit_source(std::ostream& os, const std::string& prefix, const FieldSource& s)
{
    if (s.path) {
        os << prefix << ".kind = snapshot\n" << prefix << ".path = " << s.path->string() << '\n';
        return;
    }
    const auto& p = s.preset;
    os << prefix << ".kind = " << to_string(p.kind) << '\n'
       << prefix << ".amplitude = " << format_double(p.amplitude) << '\n'
       << prefix << ".seed = " << p.seed << '\n'
       << prefix << ".mode = " << p.mode[0] << ", " << p.mode[1] << ", " << p.mode[2] << '\n'
       << prefix << ".width = " << format_double(p.width) << '\n'
       << prefix << ".band = " << p.band << '\n'
       << prefix << ".degree = " << p.degree << '\n';
}

} // namespace detail

/// Canonical text with every key explicit; parse_manifest(to_text(m)) == m.
inline std::string to_text(const RunManifest& m)
{
    using detail::format_double;
    std::ostringstream os;
    os << "dim = " << m.dim << "\ngrid = " << m.points << "\nbox_length = " << format_double(m.box_length) << '\n'
       << "horizon = " << format_double(m.horizon) << "\ntime_grid = " << m.time_grid << "\npanels = " << m.panels
       << "\ngeometric_levels = " << m.geometric_levels << '\n'
       << "system = " << (m.system == SystemKind::cns ? "cns" : "dcns") << "\nkappa = " << format_double(m.kappa)
       << "\nv_sensitivity = " << format_double(m.v_sensitivity) << "\ncouple_v = " << (m.couple_v ? "true" : "false")
       << "\nseed = " << m.seed << '\n';
    detail::emit_source(os, "c", m.c);
    detail::emit_source(os, "n", m.n);
    detail::emit_source(os, "u", m.u);
    if (m.v)
        detail::emit_source(os, "v", *m.v);
    if (m.forcing)
        detail::emit_source(os, "forcing", *m.forcing);
    if (m.d0) {
        detail::emit_source(os, "d0", *m.d0);
        os << "delta0 = " << format_double(m.delta0) << '\n';
    }
    os << "picard_tol = " << format_double(m.picard_tol) << "\npicard_max_iter = " << m.picard_max_iter
       << "\nepsilon = " << format_double(m.epsilon) << "\nball_stride = " << m.ball_stride
       << "\nguess = " << to_string(m.guess) << "\ndiagnostics = ";
    for (std::size_t i = 0; i < m.diagnostics.size(); ++i)
        os << (i ? ", " : "") << m.diagnostics[i];
    os << "\nsnapshots = " << (m.write_snapshots ? "true" : "false") << "\noutput = " << m.output.string()
       << "\nscaling.delta = " << format_double(m.scaling_delta) << "\nembedding.samples = " << m.embedding_samples
       << "\nsweep.factors = ";
    for (std::size_t i = 0; i < m.sweep_factors.size(); ++i)
        os << (i ? ", " : "") << format_double(m.sweep_factors[i]);
    os << '\n';
    return os.str();
}

} // namespace cnslab
