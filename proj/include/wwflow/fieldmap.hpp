#pragma once

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "wwflow/classical.hpp"
#include "wwflow/currents.hpp"
#include "wwflow/ensembles.hpp"
#include "wwflow/errors.hpp"
#include "wwflow/grid.hpp"
#include "wwflow/hamiltonian.hpp"

namespace wwflow {

enum class Quantifier { stationarity_total, stationarity_classical, stationarity_quantum, liouvillianity };
enum class Normalization { linear, log_magnitude };

inline const char* to_string(Quantifier q) {
    switch (q) {
        case Quantifier::stationarity_total: return "stationarity_total";
        case Quantifier::stationarity_classical: return "stationarity_classical";
        case Quantifier::stationarity_quantum: return "stationarity_quantum";
        case Quantifier::liouvillianity: return "liouvillianity";
    }
    return "?";
}

inline std::optional<Quantifier> parse_quantifier(std::string_view s) {
    for (auto q : {Quantifier::stationarity_total, Quantifier::stationarity_classical, Quantifier::stationarity_quantum,
                   Quantifier::liouvillianity}) {
        if (s == to_string(q)) return q;
    }
    return std::nullopt;
}

inline const char* to_string(Normalization n) { return n == Normalization::linear ? "linear" : "log"; }

inline std::optional<Normalization> parse_normalization(std::string_view s) {
    if (s == "linear") return Normalization::linear;
    if (s == "log" || s == "log_magnitude") return Normalization::log_magnitude;
    return std::nullopt;
}

/// Default overlay levels (typical LV, g = 1).
inline const std::vector<double>& default_overlay_epsilons() {
    static const std::vector<double> eps{6.0, 5.0, 4.0, 3.0, 2.5, 2.2, 2.1, 2.05};
    return eps;
}

struct RenderSpec {
    RenderSpec(SeparableHamiltonian h, Ensemble e) : hamiltonian(std::move(h)), ensemble(std::move(e)) {}

    SeparableHamiltonian hamiltonian;
    Ensemble ensemble;
    Quantifier quantifier = Quantifier::stationarity_total;
    Method method = Method::closed_form;
    SeriesOptions series{};
    double w_floor = 1e-12;
    Normalization normalization = Normalization::linear;
    std::vector<double> overlay_epsilons;
    OrbitOptions orbit{};
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;
};

struct RenderResult {
    FieldGrid field;
    /// Cells masked because W fell below the Liouvillianity floor.
    std::size_t masked_floor = 0;
    /// Cells masked because the evaluator threw.
    std::size_t masked_error = 0;
    std::string first_error;
};

/// Absolute quantifier value at every node of `grid`. Rows in k are split
/// across workers and gathered in order, so the result does not depend on
/// the worker count.
inline RenderResult render_field(const RenderSpec& spec, const FieldGrid& grid) {
    if (std::holds_alternative<GammaEnsemble>(spec.ensemble) && (grid.x_min() <= 0.0 || grid.k_min() <= 0.0)) {
        throw DomainError("render_field: gamma ensembles need a grid inside the open first quadrant");
    }
    const CurrentField cf(spec.hamiltonian, spec.ensemble, spec.method, spec.series, spec.w_floor);
    RenderResult out{grid.like(), 0, 0, {}};

    const std::size_t nk = grid.nk();
    std::vector<std::size_t> row_floor(nk, 0), row_error(nk, 0);
    std::vector<std::string> row_message(nk);

    auto eval_row = [&](std::size_t j) {
        const double k = grid.k(j);
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double x = grid.x(i);
            try {
                double v = 0.0;
                switch (spec.quantifier) {
                    case Quantifier::stationarity_total: v = cf.stationarity(x, k).total; break;
                    case Quantifier::stationarity_classical: v = cf.stationarity(x, k).classical; break;
                    case Quantifier::stationarity_quantum: v = cf.stationarity(x, k).quantum; break;
                    case Quantifier::liouvillianity: {
                        const auto l = cf.liouvillianity(x, k);
                        if (!l) {
                            out.field.mask(i, j);
                            ++row_floor[j];
                            continue;
                        }
                        v = *l;
                        break;
                    }
                }
                if (!std::isfinite(v)) throw NumericalConsistencyError("non-finite quantifier value");
                out.field.at(i, j) = std::abs(v);
            } catch (const std::exception& ex) {
                out.field.mask(i, j);
                if (row_error[j]++ == 0) row_message[j] = ex.what();
            }
        }
    };

    unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, nk));
    if (workers <= 1) {
        for (std::size_t j = 0; j < nk; ++j) eval_row(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t j = next++; j < nk; j = next++) eval_row(j);
            });
        }
        for (auto& t : pool) t.join();
    }

    for (std::size_t j = 0; j < nk; ++j) {
        out.masked_floor += row_floor[j];
        out.masked_error += row_error[j];
        if (out.first_error.empty() && !row_message[j].empty()) out.first_error = row_message[j];
    }
    return out;
}

struct FieldSummary {
    double max = 0.0;
    double mean = 0.0;
    std::size_t masked = 0;
};

inline FieldSummary summarize(const FieldGrid& fg) {
    FieldSummary s;
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : fg.values()) {
        if (std::isnan(v)) {
            ++s.masked;
            continue;
        }
        s.max = std::max(s.max, v);
        sum += v;
        ++n;
    }
    s.mean = n ? sum / static_cast<double>(n) : 0.0;
    return s;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string format_g17(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_for_write(const std::string& path, bool binary = false) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
    return f;
}

inline void finish_write(std::ofstream& f, const std::string& path) {
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

inline std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_double(const std::string& s, const std::string& path) {
    if (s == "NaN") return FieldGrid::masked_value();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw IoError("'" + path + "': bad number '" + s + "'");
    return v;
}

}  // namespace detail

/// Header "k\x,x_0,...,x_{nx-1}", then one row per k (ascending): k, cells.
/// Numbers use 17 significant digits; masked cells are written as NaN.
inline void export_csv(const FieldGrid& fg, const std::string& path) {
    auto f = detail::open_for_write(path);
    std::string line = "k\\x";
    for (std::size_t i = 0; i < fg.nx(); ++i) line += "," + detail::format_g17(fg.x(i));
    f << line << '\n';
    for (std::size_t j = 0; j < fg.nk(); ++j) {
        line = detail::format_g17(fg.k(j));
        for (std::size_t i = 0; i < fg.nx(); ++i) line += "," + detail::format_g17(fg.at(i, j));
        f << line << '\n';
    }
    detail::finish_write(f, path);
}

inline FieldGrid read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for reading: " + std::strerror(errno));
    std::string line;
    if (!std::getline(f, line)) throw IoError("'" + path + "': empty file");
    const auto header = detail::split_commas(line);
    if (header.size() < 3) throw IoError("'" + path + "': header needs at least two x values");
    std::vector<double> xs;
    for (std::size_t i = 1; i < header.size(); ++i) xs.push_back(detail::parse_double(header[i], path));
    std::vector<double> ks;
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != header.size()) throw IoError("'" + path + "': ragged row");
        ks.push_back(detail::parse_double(cells[0], path));
        std::vector<double> row;
        for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(detail::parse_double(cells[i], path));
        rows.push_back(std::move(row));
    }
    if (ks.size() < 2) throw IoError("'" + path + "': need at least two k rows");
    FieldGrid fg(xs.front(), xs.back(), ks.front(), ks.back(), xs.size(), ks.size());
    for (std::size_t j = 0; j < ks.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) fg.at(i, j) = rows[j][i];
    return fg;
}

// ---------------------------------------------------------------------------
// PGM

/// Log-magnitude pixels map log10(|v|/v_max + 1e-16) from [-16, 0] onto the grey range.
inline constexpr double kLogFloorDecades = 16.0;

struct PgmScale {
    Normalization normalization = Normalization::linear;
    double lo = 0.0;  // value mapped to 0 (linear) / unused (log)
    double hi = 0.0;  // value mapped to 65535 (linear) / v_max (log)
};

inline std::vector<std::uint16_t> pgm_pixels(const FieldGrid& fg, Normalization norm, PgmScale* scale = nullptr) {
    double lo = INFINITY, hi = -INFINITY, vmax = 0.0;
    for (double v : fg.values()) {
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        vmax = std::max(vmax, std::abs(v));
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    PgmScale s{norm, lo, norm == Normalization::linear ? hi : vmax};
    if (scale) *scale = s;

    std::vector<std::uint16_t> px;
    px.reserve(fg.nx() * fg.nk());
    for (std::size_t r = 0; r < fg.nk(); ++r) {
        const std::size_t j = fg.nk() - 1 - r;
        for (std::size_t i = 0; i < fg.nx(); ++i) {
            const double v = fg.at(i, j);
            double t = 0.0;
            if (!std::isnan(v)) {
                if (norm == Normalization::linear) {
                    t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
                } else if (vmax > 0.0) {
                    t = (std::log10(std::abs(v) / vmax + 1e-16) + kLogFloorDecades) / kLogFloorDecades;
                }
            }
            t = std::clamp(t, 0.0, 1.0);
            px.push_back(static_cast<std::uint16_t>(std::lround(t * 65535.0)));
        }
    }
    return px;
}

/// Binary P5, maxval 65535 (big-endian samples), top row = largest k.
inline PgmScale export_pgm(const FieldGrid& fg, const std::string& path, Normalization norm) {
    PgmScale scale;
    const auto px = pgm_pixels(fg, norm, &scale);
    auto f = detail::open_for_write(path, true);
    f << "P5\n" << fg.nx() << ' ' << fg.nk() << "\n65535\n";
    std::vector<char> bytes;
    bytes.reserve(px.size() * 2);
    for (auto p : px) {
        bytes.push_back(static_cast<char>(p >> 8));
        bytes.push_back(static_cast<char>(p & 0xff));
    }
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    detail::finish_write(f, path);
    return scale;
}

/// Plain "key = value" sidecar.
inline void write_metadata(const std::string& path, const std::vector<std::pair<std::string, std::string>>& entries) {
    auto f = detail::open_for_write(path);
    for (const auto& [k, v] : entries) f << k << " = " << v << '\n';
    detail::finish_write(f, path);
}

// ---------------------------------------------------------------------------
// Trajectory overlays

struct OverlayOrbit {
    double epsilon = 0.0;
    std::optional<Orbit> orbit;
    std::string error;
};

/// One orbit per overlay level, integrated concurrently. Failures are
/// reported per level instead of aborting the batch.
inline std::vector<OverlayOrbit> overlay_trajectories(const RenderSpec& spec) {
    std::vector<std::future<OverlayOrbit>> jobs;
    jobs.reserve(spec.overlay_epsilons.size());
    for (double eps : spec.overlay_epsilons) {
        jobs.push_back(std::async(std::launch::async, [&spec, eps] {
            OverlayOrbit r;
            r.epsilon = eps;
            try {
                r.orbit = orbit_for_energy(spec.hamiltonian, eps, spec.orbit);
            } catch (const std::exception& ex) {
                r.error = ex.what();
            }
            return r;
        }));
    }
    std::vector<OverlayOrbit> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

/// Columns tau,x,k,y,z with y = e^{-x}, z = e^{-k}.
inline void export_orbit_csv(const Orbit& o, const std::string& path) {
    auto f = detail::open_for_write(path);
    f << "tau,x,k,y,z\n";
    for (const auto& s : o.samples) {
        f << detail::format_g17(s.tau) << ',' << detail::format_g17(s.x) << ',' << detail::format_g17(s.k) << ','
          << detail::format_g17(std::exp(-s.x)) << ',' << detail::format_g17(std::exp(-s.k)) << '\n';
    }
    detail::finish_write(f, path);
}

/// All overlay orbits in one file, keyed by epsilon; failed levels are skipped.
inline void export_overlay_csv(const std::vector<OverlayOrbit>& overlays, const std::string& path) {
    auto f = detail::open_for_write(path);
    f << "epsilon,tau,x,k\n";
    for (const auto& ov : overlays) {
        if (!ov.orbit) continue;
        for (const auto& s : ov.orbit->samples) {
            f << detail::format_g17(ov.epsilon) << ',' << detail::format_g17(s.tau) << ',' << detail::format_g17(s.x)
              << ',' << detail::format_g17(s.k) << '\n';
        }
    }
    detail::finish_write(f, path);
}

}  // namespace wwflow
