#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "cyclenet/learning.hpp"

namespace cyclenet {

/// Membrane potentials and firing rates on a uniform time grid, together with
/// the constant history segment the delayed term needs.
struct Trajectory {
    double dt = 0.0;
    double tau = 0.0;
    Vector history_value;                 // phi(theta) on [-tau, 0]
    std::vector<double> times;            // 0, dt, 2 dt, ...
    std::vector<Vector> u;
    std::vector<Vector> v;                // tanh(lambda u), stored alongside

    int samples() const { return static_cast<int>(times.size()); }
};

struct InitialState {
    double amplitude = 0.0;   // 0 means "use the memory amplitude beta_k * beta1"
    PatternVec pattern;
};

inline Vector firing_rates(const Vector& u, double lambda) {
    return (lambda * u.array()).tanh().matrix();
}

namespace detail {

struct DdeRhs {
    Matrix a0;  // c0 * beta_k * W0
    Matrix a1;  // c1 * beta_k * W
    double lambda;

    Vector operator()(const Vector& u, const Vector& u_delayed) const {
        return -u + a0 * firing_rates(u, lambda) + a1 * firing_rates(u_delayed, lambda);
    }
};

}  // namespace detail

/// Integrate the delayed network from the constant history phi = a * xi with a
/// fixed-step classical Runge-Kutta scheme. The step must divide the delay so
/// every breakpoint of the solution falls on a grid point; whole-step stages
/// read the delayed state straight off the grid and the two half-step stages
/// read it from a cubic Hermite on one already-computed delayed grid cell,
/// which keeps the scheme fourth order. tau = 0 degenerates to the plain ODE.
inline Trajectory simulate(const Connectivity& conn, const NetworkParams& params,
                           const InitialState& initial, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("simulate: need dt > 0 and t_end > 0");
    if (initial.pattern.size() != conn.neurons())
        throw std::invalid_argument("simulate: initial pattern size mismatch");
    const double tau = params.tau;
    long delay_steps = 0;
    if (tau > 0.0) {
        delay_steps = std::lround(tau / dt);
        if (delay_steps < 1 || std::abs(delay_steps * dt - tau) > 1e-9 * tau)
            throw std::invalid_argument("simulate: dt must divide tau exactly");
    }

    const double amplitude = initial.amplitude > 0.0 ? initial.amplitude
                                                     : params.memory_amplitude();
    if (!(amplitude > 0.0))
        throw std::invalid_argument("simulate: amplitude must be positive");

    const detail::DdeRhs rhs{params.c0 * params.beta_k() * conn.projection(),
                             params.c1() * params.beta_k() * conn.transition(),
                             params.lambda};

    const int n = conn.neurons();
    const long steps = std::lround(std::ceil(t_end / dt - 1e-12));
    const Vector phi = amplitude * initial.pattern.cast<double>();

    // state and derivative on the grid, history slots included (index shift m)
    const long m = delay_steps;
    std::vector<Vector> u(static_cast<size_t>(steps + m + 1), phi);
    std::vector<Vector> f(static_cast<size_t>(steps + m + 1), Vector::Zero(n));

    auto value_at = [&](long k) -> const Vector& { return u[static_cast<size_t>(k + m)]; };
    auto deriv_slot = [&](long k) -> Vector& { return f[static_cast<size_t>(k + m)]; };
    // derivative used when interpolating on [k, k+1]: history cells keep the
    // constant-history derivative 0, the first solution cell uses f(0+)
    auto deriv_left = [&](long k) -> Vector {
        return k < 0 ? Vector::Zero(n) : f[static_cast<size_t>(k + m)];
    };
    auto deriv_right = [&](long k1) -> Vector {
        return k1 <= 0 ? Vector::Zero(n) : f[static_cast<size_t>(k1 + m)];
    };
    auto delayed_mid = [&](long k) -> Vector {
        // cubic Hermite midpoint of the cell [k, k+1]
        return 0.5 * (value_at(k) + value_at(k + 1)) +
               (dt / 8.0) * (deriv_left(k) - deriv_right(k + 1));
    };

    if (tau > 0.0) {
        deriv_slot(0) = rhs(value_at(0), value_at(-m));
        for (long k = 0; k < steps; ++k) {
            const Vector& uk = value_at(k);
            const Vector k1 = deriv_slot(k);
            const Vector dm = delayed_mid(k - m);
            const Vector k2 = rhs(uk + 0.5 * dt * k1, dm);
            const Vector k3 = rhs(uk + 0.5 * dt * k2, dm);
            const Vector k4 = rhs(uk + dt * k3, value_at(k + 1 - m));
            Vector next = uk + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!next.allFinite())
                throw IntegrationError("simulate: state became non-finite");
            u[static_cast<size_t>(k + 1 + m)] = next;
            deriv_slot(k + 1) = rhs(next, value_at(k + 1 - m));
        }
    } else {
        for (long k = 0; k < steps; ++k) {
            const Vector& uk = value_at(k);
            const Vector k1 = rhs(uk, uk);
            const Vector u2 = uk + 0.5 * dt * k1;
            const Vector k2 = rhs(u2, u2);
            const Vector u3 = uk + 0.5 * dt * k2;
            const Vector k3 = rhs(u3, u3);
            const Vector u4 = uk + dt * k3;
            const Vector k4 = rhs(u4, u4);
            Vector next = uk + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!next.allFinite())
                throw IntegrationError("simulate: state became non-finite");
            u[static_cast<size_t>(k + 1 + m)] = next;
        }
    }

    Trajectory traj;
    traj.dt = dt;
    traj.tau = tau;
    traj.history_value = phi;
    traj.times.reserve(static_cast<size_t>(steps + 1));
    traj.u.reserve(static_cast<size_t>(steps + 1));
    traj.v.reserve(static_cast<size_t>(steps + 1));
    for (long k = 0; k <= steps; ++k) {
        traj.times.push_back(k * dt);
        traj.u.push_back(value_at(k));
        traj.v.push_back(firing_rates(value_at(k), params.lambda));
    }
    return traj;
}

/// Default step sizes: tau/100 with delay, 0.01 without.
inline double default_dt(double tau) { return tau > 0.0 ? tau / 100.0 : 0.01; }

/// Sign pattern per delay interval [n tau, (n+1) tau). Samples inside the
/// leading settle_fraction of each interval are skipped; the interval is
/// reported only when the remaining samples agree componentwise.
inline std::vector<std::optional<PatternVec>> extract_sign_sequence(const Trajectory& traj,
                                                                    double settle_fraction = 0.2) {
    if (!(traj.tau > 0.0))
        throw std::invalid_argument("extract_sign_sequence: needs a delayed trajectory");
    if (!(settle_fraction >= 0.0 && settle_fraction < 1.0))
        throw std::invalid_argument("extract_sign_sequence: settle_fraction in [0,1)");

    const long m = std::lround(traj.tau / traj.dt);
    const long total = traj.samples();
    const long intervals = (total - 1) / m;  // complete intervals only
    std::vector<std::optional<PatternVec>> out;
    out.reserve(static_cast<size_t>(intervals));
    for (long iv = 0; iv < intervals; ++iv) {
        const long first = iv * m + static_cast<long>(std::ceil(settle_fraction * m - 1e-9));
        const long last = (iv + 1) * m - 1;
        PatternVec pattern;
        bool ok = true;
        for (long k = first; k <= last && ok; ++k) {
            const Vector& uk = traj.u[static_cast<size_t>(k)];
            PatternVec sgn(uk.size());
            for (Eigen::Index i = 0; i < uk.size(); ++i) {
                if (uk(i) == 0.0) {
                    ok = false;
                    break;
                }
                sgn(i) = uk(i) > 0.0 ? 1 : -1;
            }
            if (!ok)
                break;
            if (pattern.size() == 0)
                pattern = sgn;
            else if (pattern != sgn)
                ok = false;
        }
        if (ok && pattern.size() > 0)
            out.emplace_back(std::move(pattern));
        else
            out.emplace_back(std::nullopt);
    }
    return out;
}

/// Maximal spans of constant sign, shorter than min_dwell ones dropped (they
/// are flickers while a component crosses zero).
struct SignRun {
    PatternVec pattern;
    double t_begin = 0.0;
    double t_end = 0.0;

    double duration() const { return t_end - t_begin; }
};

inline std::vector<SignRun> sign_runs(const Trajectory& traj, double min_dwell) {
    std::vector<SignRun> raw;
    for (int k = 0; k < traj.samples(); ++k) {
        const Vector& uk = traj.u[static_cast<size_t>(k)];
        PatternVec sgn(uk.size());
        bool definite = true;
        for (Eigen::Index i = 0; i < uk.size(); ++i) {
            if (uk(i) == 0.0) {
                definite = false;
                break;
            }
            sgn(i) = uk(i) > 0.0 ? 1 : -1;
        }
        const double t = traj.times[static_cast<size_t>(k)];
        if (!definite) {
            if (!raw.empty())
                raw.back().t_end = t;
            continue;
        }
        if (raw.empty() || raw.back().pattern != sgn)
            raw.push_back({sgn, t, t});
        else
            raw.back().t_end = t;
    }
    std::vector<SignRun> runs;
    for (const auto& run : raw) {
        if (run.duration() < min_dwell)
            continue;
        if (!runs.empty() && runs.back().pattern == run.pattern)
            runs.back().t_end = run.t_end;
        else
            runs.push_back(run);
    }
    return runs;
}

/// The sequence of settled sign patterns the trajectory visits, one entry per
/// transition, read from the sign-change events themselves. The retrieved
/// orbit's period exceeds p*tau by the accumulated misalignment of the zero
/// crossings, so the interval-aligned reading dephases after a few traversals
/// while this one does not. The leading run carrying the initial pattern is
/// dropped. When stall_after is finite, a run that lasts longer is reported
/// as its pattern followed by a null entry, marking the trajectory as stuck.
inline std::vector<std::optional<PatternVec>> extract_pattern_sequence(
    const Trajectory& traj, double min_dwell,
    double stall_after = std::numeric_limits<double>::infinity()) {
    auto runs = sign_runs(traj, min_dwell);
    std::vector<std::optional<PatternVec>> out;
    size_t first = 0;
    if (!runs.empty()) {
        PatternVec init(traj.history_value.size());
        for (Eigen::Index i = 0; i < traj.history_value.size(); ++i)
            init(i) = traj.history_value(i) >= 0.0 ? 1 : -1;
        if (runs.front().pattern == init && runs.front().t_begin == 0.0) {
            if (runs.front().duration() > stall_after)
                return {std::nullopt};
            first = 1;
        }
    }
    for (size_t r = first; r < runs.size(); ++r) {
        out.emplace_back(runs[r].pattern);
        if (runs[r].duration() > stall_after) {
            out.emplace_back(std::nullopt);
            break;
        }
    }
    return out;
}

/// Result of matching a sign sequence against the transitions a cycle imposes,
/// starting from history pattern number start_index (0-based column).
struct RetrievalReport {
    std::vector<std::optional<PatternVec>> sign_sequence;
    int matched_count = 0;       // maximal initial run of correct intervals
    int full_traversals = 0;
    std::optional<int> first_failure_interval;
};

inline RetrievalReport check_retrieval(std::vector<std::optional<PatternVec>> seq,
                                       const BinaryCycle& cycle, int start_index) {
    RetrievalReport rep;
    rep.sign_sequence = std::move(seq);
    const int p = cycle.period();
    for (size_t nint = 0; nint < rep.sign_sequence.size(); ++nint) {
        const auto& got = rep.sign_sequence[nint];
        const PatternVec want = cycle.column((start_index + static_cast<int>(nint) + 1) % p);
        if (got && *got == want) {
            ++rep.matched_count;
        } else {
            rep.first_failure_interval = static_cast<int>(nint);
            break;
        }
    }
    rep.full_traversals = rep.matched_count / p;
    return rep;
}

/// Overlap time series m_mu(t) = xi_mu . v(t) / N, one column per pattern.
inline Matrix overlap(const Trajectory& traj, const BinaryCycle& cycle) {
    const int p = cycle.period();
    const int n = cycle.neurons();
    Matrix out(traj.samples(), p);
    for (int k = 0; k < traj.samples(); ++k)
        for (int mu = 0; mu < p; ++mu)
            out(k, mu) = cycle.column(mu).cast<double>().dot(traj.v[static_cast<size_t>(k)]) / n;
    return out;
}

inline void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const int n = static_cast<int>(traj.history_value.size());
    out << "t";
    for (int i = 1; i <= n; ++i)
        out << ",u" << i;
    for (int i = 1; i <= n; ++i)
        out << ",v" << i;
    out << '\n';
    char buf[64];
    auto emit = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf;
    };
    for (int k = 0; k < traj.samples(); ++k) {
        emit(traj.times[static_cast<size_t>(k)]);
        for (int i = 0; i < n; ++i) {
            out << ',';
            emit(traj.u[static_cast<size_t>(k)](i));
        }
        for (int i = 0; i < n; ++i) {
            out << ',';
            emit(traj.v[static_cast<size_t>(k)](i));
        }
        out << '\n';
    }
}

inline void write_raster_csv(const std::vector<std::optional<PatternVec>>& seq,
                             std::ostream& out) {
    out << "interval,neuron,sign\n";
    for (size_t nint = 0; nint < seq.size(); ++nint) {
        if (seq[nint]) {
            const auto& pat = *seq[nint];
            for (Eigen::Index i = 0; i < pat.size(); ++i)
                out << nint << ',' << (i + 1) << ',' << pat(i) << '\n';
        } else {
            out << nint << ",0,0\n";  // unresolved interval stays visible
        }
    }
}

}  // namespace cyclenet
