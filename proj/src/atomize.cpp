// SPDX-License-Identifier: Apache-2.0
#include "gapclock/atomize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gapclock {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double trunc_norm_total(const MeasureComponent& c) {
    return norm_cdf((c.hi - c.mean) / c.sigma) - norm_cdf((c.lo - c.mean) / c.sigma);
}

/// Gauss-Legendre nodes/weights on [-1, 1], 16 points.
constexpr int kGl = 16;
constexpr double kGlX[kGl] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGlW[kGl] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
double gl_integrate(double a, double b, F&& f) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < kGl; ++i) acc += kGlW[i] * f(mid + half * kGlX[i]);
    return acc * half;
}

bool point_in_support(const std::vector<SupportInterval>& sup, double x) {
    for (const auto& iv : sup)
        if (x >= iv.lo && x <= iv.hi) return true;
    return false;
}

/// Integral of the support-restricted field over an interval, the continuous
/// part by overlap lengths, atoms by the inclusion flags at the endpoints.
double field_integral(const FieldTable& f, const std::vector<SupportInterval>& sup, double lo,
                      double hi, bool include_lo_atom, bool include_hi_atom, bool absolute) {
    if (!(lo <= hi)) std::swap(lo, hi);
    double acc = 0.0;
    for (const auto& piece : f.pieces) {
        for (const auto& iv : sup) {
            const double a = std::max({piece.lo, iv.lo, lo});
            const double b = std::min({piece.hi, iv.hi, hi});
            if (b > a) acc += (absolute ? std::abs(piece.value) : piece.value) * (b - a);
        }
    }
    for (const auto& atom : f.atoms) {
        if (!point_in_support(sup, atom.x)) continue;
        const bool inside = atom.x > lo && atom.x < hi;
        const bool at_lo = atom.x == lo && include_lo_atom;
        const bool at_hi = atom.x == hi && include_hi_atom;
        if (inside || at_lo || at_hi) acc += absolute ? std::abs(atom.w) : atom.w;
    }
    return acc;
}

}  // namespace

void Measure::validate() const {
    if (components.empty()) throw std::invalid_argument("measure: no components");
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0)) throw std::invalid_argument("measure: component weight must be > 0");
        total += c.weight;
        switch (c.kind) {
            case MeasureComponent::Kind::Point:
                break;
            case MeasureComponent::Kind::Uniform:
                if (!(c.hi > c.lo)) throw std::invalid_argument("measure: uniform needs hi > lo");
                break;
            case MeasureComponent::Kind::TruncNormal:
                if (!(c.hi > c.lo) || !(c.sigma > 0.0))
                    throw std::invalid_argument("measure: bad truncated normal");
                if (!(trunc_norm_total(c) > 0.0))
                    throw std::invalid_argument("measure: truncated normal has no mass");
                break;
            case MeasureComponent::Kind::QuantileTable: {
                const std::size_t n = c.levels.size();
                if (n < 2 || c.values.size() != n)
                    throw std::invalid_argument("measure: quantile table needs matching arrays");
                if (c.levels.front() != 0.0 || c.levels.back() != 1.0)
                    throw std::invalid_argument("measure: quantile levels must span [0, 1]");
                for (std::size_t i = 1; i < n; ++i) {
                    if (!(c.levels[i] >= c.levels[i - 1]) || !(c.values[i] >= c.values[i - 1]))
                        throw std::invalid_argument("measure: quantile table must be monotone");
                }
                break;
            }
        }
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("measure: component weights must sum to 1");
}

double Measure::cdf(double x) const {
    double acc = 0.0;
    for (const auto& c : components) {
        switch (c.kind) {
            case MeasureComponent::Kind::Point:
                if (x >= c.x) acc += c.weight;
                break;
            case MeasureComponent::Kind::Uniform:
                acc += c.weight * std::clamp((x - c.lo) / (c.hi - c.lo), 0.0, 1.0);
                break;
            case MeasureComponent::Kind::TruncNormal: {
                if (x < c.lo) break;
                const double xx = std::min(x, c.hi);
                acc += c.weight *
                       (norm_cdf((xx - c.mean) / c.sigma) - norm_cdf((c.lo - c.mean) / c.sigma)) /
                       trunc_norm_total(c);
                break;
            }
            case MeasureComponent::Kind::QuantileTable: {
                for (std::size_t i = 0; i + 1 < c.values.size(); ++i) {
                    const double mass = c.weight * (c.levels[i + 1] - c.levels[i]);
                    if (c.values[i + 1] <= x) {
                        acc += mass;
                    } else if (c.values[i] < x && c.values[i + 1] > c.values[i]) {
                        acc += mass * (x - c.values[i]) / (c.values[i + 1] - c.values[i]);
                    }
                }
                break;
            }
        }
    }
    return acc;
}

double Measure::density(double x) const {
    double acc = 0.0;
    for (const auto& c : components) {
        switch (c.kind) {
            case MeasureComponent::Kind::Point:
                break;
            case MeasureComponent::Kind::Uniform:
                if (x >= c.lo && x <= c.hi) acc += c.weight / (c.hi - c.lo);
                break;
            case MeasureComponent::Kind::TruncNormal:
                if (x >= c.lo && x <= c.hi)
                    acc += c.weight * norm_pdf((x - c.mean) / c.sigma) /
                           (c.sigma * trunc_norm_total(c));
                break;
            case MeasureComponent::Kind::QuantileTable:
                for (std::size_t i = 0; i + 1 < c.values.size(); ++i) {
                    if (c.values[i + 1] > c.values[i] && x >= c.values[i] && x <= c.values[i + 1])
                        acc += c.weight * (c.levels[i + 1] - c.levels[i]) /
                               (c.values[i + 1] - c.values[i]);
                }
                break;
        }
    }
    return acc;
}

double Measure::atom_mass_at(double x) const {
    double acc = 0.0;
    for (const auto& c : components) {
        if (c.kind == MeasureComponent::Kind::Point && c.x == x) acc += c.weight;
        if (c.kind == MeasureComponent::Kind::QuantileTable) {
            for (std::size_t i = 0; i + 1 < c.values.size(); ++i)
                if (c.values[i] == x && c.values[i + 1] == x)
                    acc += c.weight * (c.levels[i + 1] - c.levels[i]);
        }
    }
    return acc;
}

std::vector<std::pair<double, double>> Measure::atom_list() const {
    std::map<double, double> atoms;
    for (const auto& c : components) {
        if (c.kind == MeasureComponent::Kind::Point) atoms[c.x] += c.weight;
        if (c.kind == MeasureComponent::Kind::QuantileTable) {
            for (std::size_t i = 0; i + 1 < c.values.size(); ++i)
                if (c.values[i] == c.values[i + 1])
                    atoms[c.values[i]] += c.weight * (c.levels[i + 1] - c.levels[i]);
        }
    }
    return {atoms.begin(), atoms.end()};
}

double Measure::support_lo() const {
    double lo = kInf;
    for (const auto& c : components) {
        switch (c.kind) {
            case MeasureComponent::Kind::Point: lo = std::min(lo, c.x); break;
            case MeasureComponent::Kind::QuantileTable: lo = std::min(lo, c.values.front()); break;
            default: lo = std::min(lo, c.lo); break;
        }
    }
    return lo;
}

double Measure::support_hi() const {
    double hi = -kInf;
    for (const auto& c : components) {
        switch (c.kind) {
            case MeasureComponent::Kind::Point: hi = std::max(hi, c.x); break;
            case MeasureComponent::Kind::QuantileTable: hi = std::max(hi, c.values.back()); break;
            default: hi = std::max(hi, c.hi); break;
        }
    }
    return hi;
}

std::vector<SupportInterval> Measure::support_intervals() const {
    std::vector<SupportInterval> raw;
    for (const auto& c : components) {
        switch (c.kind) {
            case MeasureComponent::Kind::Point:
                raw.push_back({c.x, c.x});
                break;
            case MeasureComponent::Kind::Uniform:
            case MeasureComponent::Kind::TruncNormal:
                raw.push_back({c.lo, c.hi});
                break;
            case MeasureComponent::Kind::QuantileTable:
                for (std::size_t i = 0; i + 1 < c.values.size(); ++i)
                    raw.push_back({c.values[i], c.values[i + 1]});
                break;
        }
    }
    std::sort(raw.begin(), raw.end(),
              [](const SupportInterval& a, const SupportInterval& b) {
                  return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
              });
    std::vector<SupportInterval> merged;
    for (const auto& iv : raw) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

std::vector<double> Measure::breakpoints() const {
    std::vector<double> bps;
    for (const auto& c : components) {
        switch (c.kind) {
            case MeasureComponent::Kind::Point:
                bps.push_back(c.x);
                break;
            case MeasureComponent::Kind::Uniform:
            case MeasureComponent::Kind::TruncNormal:
                bps.push_back(c.lo);
                bps.push_back(c.hi);
                break;
            case MeasureComponent::Kind::QuantileTable:
                for (double v : c.values) bps.push_back(v);
                break;
        }
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    return bps;
}

double Measure::quantile(double p) const {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("quantile: level must lie in (0, 1]");
    const std::vector<double> bps = breakpoints();
    double prev = bps.front();
    double cdf_prev = 0.0;  // cdf left of the first breakpoint
    for (double bp : bps) {
        const double here = cdf(bp);
        const double left = here - atom_mass_at(bp);
        if (p > cdf_prev && p <= left && bp > prev) {
            // Invert the smooth stretch (prev, bp): safeguarded Newton with an
            // exact-root early return so representable quantiles come out
            // bit-exact.
            double a = prev, b = bp, x = 0.5 * (a + b);
            for (int it = 0; it < 200; ++it) {
                const double g = cdf(x) - p;
                if (g == 0.0) return x;
                if (g > 0.0)
                    b = x;
                else
                    a = x;
                const double d = density(x);
                double step = d > 0.0 ? x - g / d : 0.5 * (a + b);
                if (!(step >= a && step <= b)) step = 0.5 * (a + b);
                if (std::abs(step - x) <= 1e-17 * std::max(1.0, std::abs(x))) return step;
                x = step;
            }
            return x;
        }
        if (p > left && p <= here) return bp;  // the atom (or exact node) covers p
        prev = bp;
        cdf_prev = here;
    }
    return bps.back();
}

double FieldTable::density(double x) const {
    double acc = 0.0;
    for (const auto& piece : pieces)
        if (x >= piece.lo && x <= piece.hi) acc += piece.value;
    return acc;
}

double FieldTable::atom_at(double x) const {
    double acc = 0.0;
    for (const auto& atom : atoms)
        if (atom.x == x) acc += atom.w;
    return acc;
}

double part3_weight(double x) {
    if (!(x > 0.0)) return kInf;
    if (x >= 1.0) return 0.5;
    const double om = 1.0 - x;
    if (om < 1e-6) return 0.5 + om / 3.0;  // series tail near x = 1
    return (std::log(1.0 / x) - om) / (om * om);
}

double killing_per_mass(const ContinuousSpec& spec, double x) {
    const double lo = spec.measure.support_lo(), hi = spec.measure.support_hi();
    if (x < lo || x > hi) return 0.0;
    const double atom = spec.measure.atom_mass_at(x);
    const auto sup = spec.measure.support_intervals();
    if (atom > 0.0) {
        const double katom = point_in_support(sup, x) ? spec.killing.atom_at(x) : 0.0;
        return katom / atom;
    }
    const double dens = spec.measure.density(x);
    if (dens > 0.0) return spec.killing.density(x) / dens;
    return 0.0;
}

AtomizedInstance atomize(const ContinuousSpec& spec, int level) {
    spec.measure.validate();
    if (level < 1) throw std::invalid_argument("atomize: level must be >= 1");

    auto build_grid = [&](int N) {
        const double thr = std::ldexp(1.0, -N);
        Vec atoms;
        double cum = 0.0;
        while (1.0 - cum >= thr * (1.0 - 1e-12)) {
            const double target = std::min(cum + thr, 1.0);
            const double x = spec.measure.quantile(target);
            atoms.push_back(x);
            cum = spec.measure.cdf(x);
            if (atoms.size() > (1u << std::min(N, 26)) + 4u) break;  // 2^N + 2 is the true cap
        }
        return atoms;
    };

    Vec atoms = build_grid(level);
    if (atoms.size() < 3) {
        int min_level = -1;
        for (int n = level + 1; n <= 24; ++n) {
            if (build_grid(n).size() >= 3) {
                min_level = n;
                break;
            }
        }
        std::ostringstream os;
        os << "atomize: level " << level << " produces only " << atoms.size() << " atoms; ";
        if (min_level > 0)
            os << "minimum usable level is " << min_level;
        else
            os << "the measure cannot produce 3 atoms at any level up to 24";
        throw std::invalid_argument(os.str());
    }

    const int M = static_cast<int>(atoms.size());
    Vec pmf(M);
    pmf[0] = spec.measure.cdf(atoms[0]);
    for (int j = 1; j + 1 < M; ++j) pmf[j] = spec.measure.cdf(atoms[j]) - spec.measure.cdf(atoms[j - 1]);
    // Mass-conserving last bin: everything beyond the second-to-last atom.
    pmf[M - 1] = 1.0 - spec.measure.cdf(atoms[M - 2]);

    AtomizedInstance out;
    out.level = level;
    out.instance.grid.states = atoms;
    out.instance.probs = pmf;
    auto fields = discretize_fields(spec, out.instance.grid);
    out.instance.drift = std::move(fields.first);
    out.instance.killing = std::move(fields.second);
    out.instance.law = spec.law;
    return out;
}

std::pair<Vec, Vec> discretize_fields(const ContinuousSpec& spec, const StateGrid& grid) {
    const int M = grid.size();
    const auto sup = spec.measure.support_intervals();
    Vec b(M - 2, 0.0), k(M - 2, 0.0);
    for (int j = 1; j + 1 < M; ++j) {
        const double span = grid.states[j + 1] - grid.states[j - 1];
        b[j - 1] = field_integral(spec.drift, sup, grid.states[j - 1], grid.states[j + 1],
                                  false, false, false) /
                   span;
        k[j - 1] = field_integral(spec.killing, sup, grid.states[j], grid.states[j + 1], true,
                                  false, false) /
                   grid.gap(j + 1);
    }
    return {b, k};
}

namespace {

/// Closed-interval mass of |drift| restricted to the support.
double abs_drift_mass(const ContinuousSpec& spec, const std::vector<SupportInterval>& sup,
                      double lo, double hi) {
    return field_integral(spec.drift, sup, lo, hi, true, true, true);
}

double part2_sup(const ContinuousSpec& spec) {
    const auto sup = spec.measure.support_intervals();
    double best = 0.0;
    // Probes at drift atoms sitting inside the support.
    for (const auto& atom : spec.drift.atoms)
        if (point_in_support(sup, atom.x)) best = std::max(best, std::abs(atom.w));
    // Probes across support gaps (closed neighborhoods include both edges), and
    // around isolated support points the neighborhood spans both flanking gaps.
    for (std::size_t i = 0; i < sup.size(); ++i) {
        if (i + 1 < sup.size())
            best = std::max(best, abs_drift_mass(spec, sup, sup[i].hi, sup[i + 1].lo));
        if (sup[i].lo == sup[i].hi) {
            const double lo = i > 0 ? sup[i - 1].hi : sup[i].lo;
            const double hi = i + 1 < sup.size() ? sup[i + 1].lo : sup[i].hi;
            best = std::max(best, abs_drift_mass(spec, sup, lo, hi));
        }
    }
    return best;
}

/// Integration grid for the part-3 inner/outer integrals: every structural
/// breakpoint of the measure and the drift, plus 0.
Vec part3_breaks(const ContinuousSpec& spec) {
    Vec pts = spec.measure.breakpoints();
    for (const auto& piece : spec.drift.pieces) {
        pts.push_back(piece.lo);
        pts.push_back(piece.hi);
    }
    for (const auto& atom : spec.drift.atoms) pts.push_back(atom.x);
    pts.push_back(0.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

HypothesisReport hypothesis_check(const ContinuousSpec& spec) {
    spec.measure.validate();
    HypothesisReport rep;
    const auto sup = spec.measure.support_intervals();

    rep.neighborhood_sup = part2_sup(spec);
    rep.part2_pass = rep.neighborhood_sup < 1.0;
    rep.gamma = 0.5 * (1.0 - rep.neighborhood_sup);
    rep.c_gamma = part3_weight(rep.gamma);

    if (!rep.part2_pass) {
        rep.part3_literal = rep.part3_atoms = kInf;
        rep.part3_pass = false;
    } else {
        const Vec breaks = part3_breaks(spec);
        auto abs_mass_from_zero = [&](double y) {
            return abs_drift_mass(spec, sup, std::min(0.0, y), std::max(0.0, y));
        };
        auto atom_square_sum = [&](double y) {
            const double lo = std::min(0.0, y), hi = std::max(0.0, y);
            double s = 0.0;
            for (const auto& atom : spec.drift.atoms)
                if (point_in_support(sup, atom.x) && atom.x >= lo && atom.x <= hi)
                    s += atom.w * atom.w;
            return s;
        };
        auto inner = [&](double x, FReading reading) {
            const double lo = std::min(0.0, x), hi = std::max(0.0, x);
            Vec seg{lo};
            for (double b : breaks)
                if (b > lo && b < hi) seg.push_back(b);
            seg.push_back(hi);
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
                acc += gl_integrate(seg[i], seg[i + 1], [&](double y) {
                    const double A = abs_mass_from_zero(y);
                    const double V = reading == FReading::Literal ? A * A : atom_square_sum(y);
                    return std::exp(2.0 * (A + rep.c_gamma * V));
                });
            }
            return acc;
        };
        auto outer = [&](FReading reading) {
            double acc = 0.0;
            for (const auto& atom : spec.measure.atom_list())
                acc += atom.second * inner(atom.first, reading);
            const Vec breaks2 = part3_breaks(spec);
            for (std::size_t i = 0; i + 1 < breaks2.size(); ++i) {
                const double a = breaks2[i], b = breaks2[i + 1];
                if (b <= a) continue;
                acc += gl_integrate(a, b, [&](double x) {
                    const double d = spec.measure.density(x);
                    return d > 0.0 ? d * inner(x, reading) : 0.0;
                });
            }
            return acc;
        };
        rep.part3_literal = outer(FReading::Literal);
        rep.part3_atoms = outer(FReading::Atoms);
        rep.part3_pass = std::isfinite(rep.part3_literal);
    }

    // Part 4: dK/dmu vanishes beyond the support by convention; probe outside
    // first, then at tail quantiles moving inward.
    const double lo = spec.measure.support_lo(), hi = spec.measure.support_hi();
    const double pad = std::max(1.0, 0.05 * (hi - lo));
    rep.part4_probe_x.push_back(lo - pad);
    rep.part4_probe_x.push_back(hi + pad);
    for (int j = 12; j >= 2; --j) {
        const double q = std::ldexp(1.0, -j);
        rep.part4_probe_x.push_back(spec.measure.quantile(q));
        rep.part4_probe_x.push_back(spec.measure.quantile(1.0 - q));
    }
    for (double x : rep.part4_probe_x) rep.part4_probe_value.push_back(killing_per_mass(spec, x));
    rep.part4_pass = rep.part4_probe_value[0] == 0.0 && rep.part4_probe_value[1] == 0.0;
    return rep;
}

SweepReport refinement_sweep(const ContinuousSpec& spec, int n_lo, int n_hi,
                             const SolverOptions& opts) {
    if (n_lo < 2 || n_hi < n_lo)
        throw std::invalid_argument("refinement_sweep: need 2 <= n_lo <= n_hi");
    SweepReport rep;
    rep.hypothesis = hypothesis_check(spec);
    if (!rep.hypothesis.all_pass()) {
        rep.gated = true;
        return rep;
    }

    const double lo = spec.measure.support_lo(), hi = spec.measure.support_hi();
    const double w = hi - lo;
    rep.window_lo = lo + 0.2 * w;
    rep.window_hi = hi - 0.2 * w;

    for (int n = n_lo; n <= n_hi; ++n) {
        SweepLevel lvl;
        lvl.level = n;
        try {
            const AtomizedInstance at = atomize(spec, n);
            lvl.states = at.instance.size();
            const ValidationReport val = validate_instance(at.instance);
            if (!val.ok()) throw std::invalid_argument("invalid atomized instance: " + val.joined());
            lvl.solution = solve(at.instance, opts);
            lvl.solved = true;

            const CoordinateMap map =
                build_kappa(at.instance.grid, at.instance.drift, at.instance.probs,
                            opts.anchor_quantile);
            for (int j = 0; j < at.instance.size(); ++j)
                lvl.kappa_abs_moment += std::abs(map.kappa[j]) * at.instance.probs[j];

            lvl.drift_margin = kInf;
            for (int j = 1; j + 1 < at.instance.size(); ++j) {
                const double b = at.instance.drift[j - 1];
                lvl.drift_margin = std::min(
                    lvl.drift_margin,
                    std::min(b + 1.0 / at.instance.grid.gap(j + 1),
                             1.0 / at.instance.grid.gap(j) - b));
            }
        } catch (const std::exception& e) {
            lvl.error = e.what();
        }
        rep.levels.push_back(std::move(lvl));
    }

    // Interior discrepancy between consecutive levels: sup over probe-point
    // pairs of the interval-mass difference, i.e. the spread of the cumulative
    // difference. Probe points carry an irrational offset so dyadic quantile
    // atoms never sit exactly on a probe.
    const int P = 17;
    Vec probes(P);
    for (int i = 0; i < P; ++i)
        probes[i] = rep.window_lo + (i + 0.381966011250105) / P * (rep.window_hi - rep.window_lo);
    for (std::size_t i = 0; i + 1 < rep.levels.size(); ++i) {
        if (!rep.levels[i].solved || !rep.levels[i + 1].solved) {
            rep.discrepancy.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const auto& ta = rep.levels[i].solution.string_measure;
        const auto& tb = rep.levels[i + 1].solution.string_measure;
        double dmin = kInf, dmax = -kInf;
        for (double x : probes) {
            const double d = ta.mass(rep.window_lo, x) - tb.mass(rep.window_lo, x);
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        rep.discrepancy.push_back(dmax - dmin);
    }
    rep.discrepancy_decreasing = rep.discrepancy.size() >= 1;
    for (std::size_t i = 0; i + 1 < rep.discrepancy.size(); ++i)
        if (!(rep.discrepancy[i + 1] < rep.discrepancy[i])) rep.discrepancy_decreasing = false;
    return rep;
}

}  // namespace gapclock
