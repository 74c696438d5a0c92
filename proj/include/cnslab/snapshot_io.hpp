#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cnslab/errors.hpp"
#include "cnslab/field.hpp"
#include "cnslab/solver.hpp"

namespace cnslab {

// MFLD layout (little endian):
//   "MFLD" | u32 version (1) | u32 dim | u32 M | f64 L | u32 ncomp | ncomp * M^dim f64, row-major
namespace detail {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::istream& is, const std::string& path)
{
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw ConfigError("truncated snapshot " + path);
    return v;
}

} // namespace detail

inline void write_mfld(const std::filesystem::path& path, const std::vector<ScalarField>& comps)
{
    if (comps.empty())
        throw std::invalid_argument("write_mfld: no components");
    const Grid& g = comps.front().grid();
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write("MFLD", 4);
    detail::put<std::uint32_t>(os, 1);
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.points_per_axis()));
    detail::put<double>(os, g.box_length());
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(comps.size()));
    for (const auto& c : comps) {
        require_same_grid(c.grid(), g, "write_mfld");
        os.write(reinterpret_cast<const char*>(c.values().data()),
                 static_cast<std::streamsize>(c.size() * sizeof(double)));
    }
    if (!os)
        throw std::runtime_error("write failed: " + path.string());
}

inline std::vector<ScalarField> read_mfld(const std::filesystem::path& path)
{
    const std::string name = path.string();
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError("snapshot not found: " + name);
    char magic[4];
    if (!is.read(magic, 4) || std::string(magic, 4) != "MFLD")
        throw ConfigError("not an MFLD file: " + name);
    const auto version = detail::take<std::uint32_t>(is, name);
    if (version != 1)
        throw ConfigError("unsupported MFLD version " + std::to_string(version) + " in " + name);
    const auto dim = detail::take<std::uint32_t>(is, name);
    const auto M = detail::take<std::uint32_t>(is, name);
    const auto L = detail::take<double>(is, name);
    const auto ncomp = detail::take<std::uint32_t>(is, name);
    Grid g;
    try {
        g = Grid(static_cast<int>(dim), L, static_cast<int>(M));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(name + ": " + e.what());
    }
    if (ncomp == 0 || ncomp > 8)
        throw ConfigError("bad component count in " + name);
    std::vector<ScalarField> out;
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        std::vector<double> vals(g.size());
        if (!is.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(double))))
            throw ConfigError("truncated snapshot " + name);
        out.emplace_back(g, std::move(vals));
    }
    return out;
}

inline void write_scalar(const std::filesystem::path& path, const ScalarField& f) { write_mfld(path, {f}); }

inline void write_vector(const std::filesystem::path& path, const VectorField& v) { write_mfld(path, v.components()); }

inline ScalarField read_scalar(const std::filesystem::path& path)
{
    auto comps = read_mfld(path);
    if (comps.size() != 1)
        throw ConfigError(path.string() + ": expected a scalar field, found " + std::to_string(comps.size()) + " components");
    return comps.front();
}

inline VectorField read_vector(const std::filesystem::path& path)
{
    auto comps = read_mfld(path);
    const Grid g = comps.front().grid();
    if (static_cast<int>(comps.size()) != g.dim())
        throw ConfigError(path.string() + ": expected " + std::to_string(g.dim()) + " components");
    return VectorField(g, std::move(comps));
}

/// One snapshot per node: [c, n, u_1..u_N, v?].
inline std::vector<ScalarField> pack_state(const SolutionState& s)
{
    std::vector<ScalarField> out{s.c, s.n};
    for (const auto& c : s.u.components())
        out.push_back(c);
    if (s.v)
        out.push_back(*s.v);
    return out;
}

inline SolutionState unpack_state(std::vector<ScalarField> comps, const std::string& where)
{
    if (comps.empty())
        throw ConfigError(where + ": empty snapshot");
    const Grid g = comps.front().grid();
    const std::size_t n = comps.size();
    const std::size_t base = 2 + static_cast<std::size_t>(g.dim());
    if (n != base && n != base + 1)
        throw ConfigError(where + ": " + std::to_string(n) + " components do not form a state");
    std::vector<ScalarField> u(comps.begin() + 2, comps.begin() + base);
    SolutionState s{comps[0], comps[1], VectorField(g, std::move(u)), {}};
    if (n == base + 1)
        s.v = comps[base];
    return s;
}

inline std::string snapshot_name(std::size_t k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%05zu.mfld", k);
    return buf;
}

/// Directory with times.txt and one snap_%05d.mfld per node.
inline void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj)
{
    std::filesystem::create_directories(dir);
    std::ofstream times(dir / "times.txt");
    times.precision(17);
    for (double t : traj.times.nodes())
        times << t << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k)
        write_mfld(dir / snapshot_name(k), pack_state(traj.at(k)));
}

inline Trajectory read_trajectory(const std::filesystem::path& dir)
{
    std::ifstream is(dir / "times.txt");
    if (!is)
        throw ConfigError("no times.txt in " + dir.string());
    std::vector<double> nodes;
    for (double t; is >> t;)
        nodes.push_back(t);
    TimeGrid tg;
    try {
        tg = TimeGrid(nodes);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(dir.string() + "/times.txt: " + e.what());
    }
    std::vector<ScalarField> c, n, v;
    std::vector<VectorField> u;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        auto s = unpack_state(read_mfld(dir / snapshot_name(k)), (dir / snapshot_name(k)).string());
        if (k > 0 && s.v.has_value() != !v.empty())
            throw ConfigError(dir.string() + ": snapshots disagree on the presence of v");
        c.push_back(std::move(s.c));
        n.push_back(std::move(s.n));
        u.push_back(std::move(s.u));
        if (s.v)
            v.push_back(std::move(*s.v));
    }
    Trajectory traj{tg, ScalarTrajectory(tg, std::move(c)), ScalarTrajectory(tg, std::move(n)),
                    VectorTrajectory(tg, std::move(u)), {}};
    if (!v.empty())
        traj.v = ScalarTrajectory(tg, std::move(v));
    return traj;
}

} // namespace cnslab
