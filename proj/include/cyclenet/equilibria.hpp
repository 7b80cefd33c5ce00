#pragma once

#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include <nlohmann/json.hpp>

#include "cyclenet/learning.hpp"

namespace cyclenet {

/// The ordinary system that governs one delay interval once the delayed term
/// has settled on a stored pattern: per component
///   f_i(u) = -u_i + c0 beta_k sum_j W0_ij tanh(lambda u_j) + c1 beta_k beta1 xi_i,
/// where xi is the successor pattern the delayed coupling is forcing.
struct DerivedSystem {
    Matrix projection;     // W0
    NetworkParams params;
    PatternVec forcing;    // xi^{(mu+1)}

    int size() const { return static_cast<int>(projection.rows()); }

    Vector rhs(const Vector& u) const {
        const double bk = params.beta_k();
        return -u + params.c0 * bk * (projection * (params.lambda * u.array()).tanh().matrix()) +
               params.c1() * bk * params.beta1 * forcing.cast<double>();
    }

    Matrix jacobian(const Vector& u) const {
        const Vector th = (params.lambda * u.array()).tanh().matrix();
        Matrix jac = params.c0 * params.beta_k() * params.lambda * projection *
                     (1.0 - th.array().square()).matrix().asDiagonal();
        jac.diagonal().array() -= 1.0;
        return jac;
    }
};

inline DerivedSystem derived_system(const Connectivity& conn, const NetworkParams& params,
                                    int mu) {
    const int p = conn.cycle().period();
    return DerivedSystem{conn.projection(), params,
                         conn.cycle().column(((mu % p) + p + 1) % p)};
}

struct MemoryEigenvalues {
    double sigma_plus = 0.0;   // c0 arctanh(beta1)(1 - beta1^2)/beta1 - 1
    double sigma_minus = -1.0;
};

/// The two possible eigenvalues of the derived system linearized at the memory
/// state u* = beta_k beta1 xi; both negative, so stored patterns attract.
inline MemoryEigenvalues memory_eigenvalues(const NetworkParams& params) {
    MemoryEigenvalues ev;
    ev.sigma_plus =
        params.c0 * std::atanh(params.beta1) * (1.0 - params.beta1 * params.beta1) / params.beta1 -
        1.0;
    ev.sigma_minus = -1.0;
    return ev;
}

/// Zeros of d f_i / d u_i for one component: present only when
/// c0 beta W0_ii > 1, at u = -+ arctanh(sqrt((c0 beta W0_ii - 1)/(c0 beta W0_ii)))/lambda.
inline std::optional<std::pair<double, double>> turning_points(double c0, double beta,
                                                               double lambda, double w0_ii) {
    if (w0_ii < 0.0)
        throw std::invalid_argument("turning_points: diagonal element must be nonnegative");
    const double g = c0 * beta * w0_ii;
    if (!(g > 1.0))
        return std::nullopt;
    const double q = std::atanh(std::sqrt((g - 1.0) / g)) / lambda;
    return std::make_pair(-q, q);
}

/// Componentwise envelope data: f is squeezed between f_bar + k_minus and
/// f_bar + k_plus with f_bar(u) = -u + c0 beta_k W0_ii tanh(lambda u) and
/// k_-+ = -+(c0 beta_k sum_{j != i} |W0_ij| + c1 beta_k beta1).
struct EnvelopeBounds {
    double k_minus = 0.0;
    double k_plus = 0.0;
    double f_check_at_q = 0.0;  // lower envelope at the positive turning point
    double f_hat_at_p = 0.0;    // upper envelope at the negative turning point
};

namespace detail {

inline double f_bar(double u, double c0, double beta_k, double lambda, double w0_ii) {
    return -u + c0 * beta_k * w0_ii * std::tanh(lambda * u);
}

inline double offdiag_abs_sum(const Matrix& m, int i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (j != i)
            s += std::abs(m(i, j));
    return s;
}

}  // namespace detail

/// Envelope values at the turning points of component i; empty when the
/// turning points do not exist.
inline std::optional<EnvelopeBounds> envelope_bounds(const DerivedSystem& sys, int i) {
    const auto& prm = sys.params;
    const double w0_ii = sys.projection(i, i);
    const auto tp = turning_points(prm.c0, prm.beta(), prm.lambda, std::max(0.0, w0_ii));
    if (!tp)
        return std::nullopt;
    const double bk = prm.beta_k();
    EnvelopeBounds env;
    const double slack =
        prm.c0 * bk * detail::offdiag_abs_sum(sys.projection, i) + prm.c1() * bk * prm.beta1;
    env.k_minus = -slack;
    env.k_plus = slack;
    env.f_check_at_q = detail::f_bar(tp->second, prm.c0, bk, prm.lambda, w0_ii) + env.k_minus;
    env.f_hat_at_p = detail::f_bar(tp->first, prm.c0, bk, prm.lambda, w0_ii) + env.k_plus;
    return env;
}

enum class CountClass { One, OneOrThree, ThreeToTheN };

struct NeuronConditions {
    bool h1 = false;  // c0 beta W0_ii > 1
    bool h2 = false;  // lower envelope positive at q, upper negative at p
    bool h3 = false;  // row contraction bound at the outer envelope roots
    std::optional<std::pair<double, double>> turning;
    std::optional<EnvelopeBounds> envelope;
    double eta = 0.0;  // outer envelope root used in the h3 bound
};

struct EquilibriumReport {
    CountClass count_class = CountClass::One;
    bool stable_two_to_n = false;  // 2^N attractors guaranteed (h1 & h2 & h3 everywhere)
    std::vector<NeuronConditions> neurons;
    std::vector<Vector> equilibria;  // enumerated for N <= 3 only
};

namespace detail {

// all roots of f_bar + shift on a generous interval
inline std::vector<double> envelope_roots(double shift, double c0, double beta_k, double lambda,
                                          double w0_ii) {
    const double span = std::abs(shift) + c0 * beta_k * w0_ii + 1.0;
    return bracketed_roots(
        [&](double u) { return f_bar(u, c0, beta_k, lambda, w0_ii) + shift; }, -span, span,
        20001, 1e-14);
}

inline double largest_magnitude(const std::vector<double>& xs) {
    double best = 0.0;
    for (double x : xs)
        if (std::abs(x) > std::abs(best))
            best = x;
    return best;
}

}  // namespace detail

/// Count classification of the derived system's equilibria, the per-component
/// conditions behind it, and (for N <= 3) the located equilibria themselves.
inline EquilibriumReport count_equilibria(const DerivedSystem& sys) {
    EquilibriumReport rep;
    const int n = sys.size();
    const auto& prm = sys.params;
    const double beta = prm.beta();
    const double bk = prm.beta_k();

    bool all_below = true, all_h1 = true, all_h2 = true, all_h3 = true;
    for (int i = 0; i < n; ++i) {
        NeuronConditions nc;
        const double w0_ii = std::max(0.0, sys.projection(i, i));
        const double gain = prm.c0 * beta * w0_ii;
        nc.h1 = gain > 1.0;
        all_below = all_below && (gain < 1.0);
        nc.turning = turning_points(prm.c0, beta, prm.lambda, w0_ii);
        nc.envelope = envelope_bounds(sys, i);
        if (nc.envelope)
            nc.h2 = nc.envelope->f_check_at_q > 0.0 && nc.envelope->f_hat_at_p < 0.0;

        // eta_i: the envelope root of least slope magnitude under tanh^2, taken
        // from the outermost roots of the two envelopes
        const double slack = nc.envelope ? nc.envelope->k_plus
                                         : prm.c1() * bk * prm.beta1 +
                                               prm.c0 * bk * detail::offdiag_abs_sum(sys.projection, i);
        const double lower = detail::largest_magnitude(
            detail::envelope_roots(-slack, prm.c0, bk, prm.lambda, w0_ii));
        const double upper = detail::largest_magnitude(
            detail::envelope_roots(+slack, prm.c0, bk, prm.lambda, w0_ii));
        const double t_lower = sqr(std::tanh(prm.lambda * lower));
        const double t_upper = sqr(std::tanh(prm.lambda * upper));
        nc.eta = (t_lower < t_upper) ? lower : upper;
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            row += std::abs(sys.projection(i, j));
        nc.h3 = prm.c0 * beta * row * (1.0 - sqr(std::tanh(prm.lambda * nc.eta))) < 1.0;

        all_h1 = all_h1 && nc.h1;
        all_h2 = all_h2 && nc.h2;
        all_h3 = all_h3 && nc.h3;
        rep.neurons.push_back(std::move(nc));
    }

    if (all_below)
        rep.count_class = CountClass::One;
    else if (all_h1 && all_h2)
        rep.count_class = CountClass::ThreeToTheN;
    else
        rep.count_class = CountClass::OneOrThree;
    rep.stable_two_to_n = all_h1 && all_h2 && all_h3;

    if (n <= 3) {
        // multi-start Newton from the roots of the decoupled per-component maps
        std::vector<std::vector<double>> candidates(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double w0_ii = std::max(0.0, sys.projection(i, i));
            const double shift = prm.c1() * bk * prm.beta1 * sys.forcing(i);
            auto roots = detail::envelope_roots(shift, prm.c0, bk, prm.lambda, w0_ii);
            if (roots.empty())
                roots.push_back(shift);
            candidates[static_cast<size_t>(i)] = roots;
        }
        std::vector<size_t> idx(static_cast<size_t>(n), 0);
        while (true) {
            Vector u(n);
            for (int i = 0; i < n; ++i)
                u(i) = candidates[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]];
            for (int it = 0; it < 60; ++it) {
                Vector f = sys.rhs(u);
                if (f.cwiseAbs().maxCoeff() < 1e-13)
                    break;
                Vector du = sys.jacobian(u).partialPivLu().solve(f);
                if (!du.allFinite())
                    break;
                u -= du;
            }
            if (sys.rhs(u).cwiseAbs().maxCoeff() < 1e-11) {
                bool dup = false;
                for (const auto& e : rep.equilibria)
                    if ((e - u).cwiseAbs().maxCoeff() < 1e-8) {
                        dup = true;
                        break;
                    }
                if (!dup)
                    rep.equilibria.push_back(u);
            }
            int pos = n - 1;
            while (pos >= 0) {
                if (++idx[static_cast<size_t>(pos)] < candidates[static_cast<size_t>(pos)].size())
                    break;
                idx[static_cast<size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0)
                break;
        }
    }
    return rep;
}

inline nlohmann::json equilibrium_report_to_json(const EquilibriumReport& rep) {
    nlohmann::json j;
    switch (rep.count_class) {
        case CountClass::One: j["count_class"] = "one"; break;
        case CountClass::OneOrThree: j["count_class"] = "one_or_three"; break;
        case CountClass::ThreeToTheN: j["count_class"] = "three_to_the_n"; break;
    }
    j["stable_two_to_n"] = rep.stable_two_to_n;
    nlohmann::json per = nlohmann::json::array();
    for (const auto& nc : rep.neurons) {
        nlohmann::json e;
        e["h1"] = nc.h1;
        e["h2"] = nc.h2;
        e["h3"] = nc.h3;
        e["eta"] = nc.eta;  // outer envelope root the contraction bound uses
        if (nc.turning) {
            e["turning_points"] = {nc.turning->first, nc.turning->second};
        }
        if (nc.envelope) {
            e["k_minus"] = nc.envelope->k_minus;
            e["k_plus"] = nc.envelope->k_plus;
            e["f_check_at_q"] = nc.envelope->f_check_at_q;
            e["f_hat_at_p"] = nc.envelope->f_hat_at_p;
        }
        per.push_back(std::move(e));
    }
    j["neurons"] = std::move(per);
    nlohmann::json eq = nlohmann::json::array();
    for (const auto& u : rep.equilibria) {
        std::vector<double> v(u.data(), u.data() + u.size());
        eq.push_back(v);
    }
    j["equilibria"] = std::move(eq);
    return j;
}

/// The parameter curve where the derived system's saddle-node pairs appear and
/// cycle retrieval breaks:
///   arctanh(sqrt((c0 beta - 1)/(c0 beta))) - sqrt(c0 beta (c0 beta - 1))
///     + (1 - c0) arctanh(beta1) = 0,   beta = arctanh(beta1)/beta1.
inline std::vector<std::pair<double, double>> saddle_node_curve(
    const std::vector<double>& beta_grid) {
    std::vector<std::pair<double, double>> curve;
    for (double beta : beta_grid) {
        if (!(beta > 1.0))
            continue;
        const double atb1 = std::atanh(beta1_from_beta(beta));
        auto residual = [&](double c0) {
            const double g = c0 * beta;
            const double s = std::sqrt(std::max(0.0, (g - 1.0) / g));
            return std::atanh(s) - std::sqrt(std::max(0.0, g * (g - 1.0))) +
                   (1.0 - c0) * atb1;
        };
        const double lo = 1.0 / beta + 1e-12;
        if (residual(lo) <= 0.0 || residual(1.0) >= 0.0)
            continue;
        curve.emplace_back(beta, bisect(residual, lo, 1.0, 1e-15));
    }
    return curve;
}

struct RingEquilibrium {
    double u_star = 0.0;
    bool nontrivial_exists = false;
    bool stable = false;  // beta < 1/(1 - tanh^2(lambda u*))
};

/// Symmetric equilibria +-(u*, ..., u*) of the all-excitatory ring: u* solves
/// x = beta_k tanh(lambda x); together with 0 that makes at least three.
inline RingEquilibrium ring_equilibria(const NetworkParams& params) {
    RingEquilibrium out;
    const double beta = params.beta();
    if (!(beta > 1.0))
        return out;  // only the trivial equilibrium
    const double bk = params.beta_k();
    auto f = [&](double x) { return x - bk * std::tanh(params.lambda * x); };
    double lo = 1e-14 * bk, hi = bk;
    if (f(lo) >= 0.0 || f(hi) <= 0.0)
        return out;
    out.u_star = bisect(f, lo, hi, 1e-16);
    out.nontrivial_exists = true;
    out.stable = beta < 1.0 / (1.0 - sqr(std::tanh(params.lambda * out.u_star)));
    return out;
}

}  // namespace cyclenet
