#pragma once

#include <algorithm>
#include <complex>
#include <optional>
#include <ostream>
#include <vector>

#include "cyclenet/binary_cycle.hpp"
#include "cyclenet/learning.hpp"

namespace cyclenet {

/// One factor of the characteristic equation of the trivial solution in the
/// time-rescaled system (delay 1, rate multiplier tau):
///   F(s) = s + tau (1 - c0 beta) - tau (1 - c0) beta e^{-s + i 2 pi n / p}.
/// With tau = 0 the factor of the unscaled equation is used instead:
///   F(s) = s + (1 - c0 beta) - (1 - c0) beta e^{i 2 pi n / p}.
struct CharFactor {
    int n_index = 0;
    int p = 2;
    double tau = 0.0;
    double c0 = 0.0;
    double beta = 2.0;

    double angle() const { return 2.0 * M_PI * n_index / p; }

    Complex eval(Complex s) const {
        const Complex rot(std::cos(angle()), std::sin(angle()));
        if (tau == 0.0)
            return s + (1.0 - c0 * beta) - (1.0 - c0) * beta * rot;
        return s + tau * (1.0 - c0 * beta) - tau * (1.0 - c0) * beta * rot * std::exp(-s);
    }

    Complex deriv(Complex s) const {
        if (tau == 0.0)
            return Complex(1.0, 0.0);
        const Complex rot(std::cos(angle()), std::sin(angle()));
        return 1.0 + tau * (1.0 - c0) * beta * rot * std::exp(-s);
    }

    Complex second_deriv(Complex s) const {
        if (tau == 0.0)
            return Complex(0.0, 0.0);
        const Complex rot(std::cos(angle()), std::sin(angle()));
        return -tau * (1.0 - c0) * beta * rot * std::exp(-s);
    }
};

struct ComplexRect {
    double re_min = -10.0, re_max = 10.0;
    double im_min = -40.0, im_max = 40.0;

    bool contains(Complex s, double slack = 1e-9) const {
        return s.real() >= re_min - slack && s.real() <= re_max + slack &&
               s.imag() >= im_min - slack && s.imag() <= im_max + slack;
    }
};

/// Roots of one characteristic factor inside a rectangle. Newton iteration is
/// run from a uniform seed grid plus logarithm-branch predictions (the roots
/// satisfy (s + a) e^{s} = const, so every root sits near a branch of the
/// complex logarithm); results are deduplicated and sorted by real part.
inline std::vector<Complex> char_roots(const CharFactor& factor, const ComplexRect& region,
                                       int max_roots = 64) {
    std::vector<Complex> roots;
    const double a = factor.tau * (1.0 - factor.c0 * factor.beta);
    const double b = factor.tau * (1.0 - factor.c0) * factor.beta;

    if (factor.tau == 0.0) {
        const Complex rot(std::cos(factor.angle()), std::sin(factor.angle()));
        const Complex s = (1.0 - factor.c0) * factor.beta * rot - (1.0 - factor.c0 * factor.beta);
        if (region.contains(s))
            roots.push_back(s);
        return roots;
    }

    std::vector<Complex> seeds;
    const int grid = 41;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            seeds.emplace_back(region.re_min + (region.re_max - region.re_min) * i / (grid - 1),
                               region.im_min + (region.im_max - region.im_min) * j / (grid - 1));
    if (b > 1e-300) {
        // (s + a) e^{s} = b e^{i theta}: seed from log branches
        const Complex logz = Complex(std::log(b) + a, factor.angle());
        const int branches = static_cast<int>(std::ceil(std::abs(region.im_max) / (2.0 * M_PI))) + 2;
        for (int k = -branches; k <= branches; ++k) {
            Complex l1 = logz + Complex(0.0, 2.0 * M_PI * k);
            Complex w = (std::abs(l1) > 1e-3) ? l1 - std::log(l1) : l1;
            seeds.push_back(w - a);
        }
    } else {
        // c0 = 1 leaves a single real root
        const Complex s(-a, 0.0);
        if (region.contains(s) && std::abs(factor.eval(s)) < 1e-10)
            roots.push_back(s);
        return roots;
    }

    for (Complex s : seeds) {
        bool converged = false;
        for (int it = 0; it < 80; ++it) {
            const Complex f = factor.eval(s);
            const Complex df = factor.deriv(s);
            if (std::abs(df) < 1e-14)
                break;
            const Complex step = f / df;
            s -= step;
            if (std::abs(s.imag()) > 10.0 * (std::abs(region.im_max) + std::abs(region.im_min) + 10.0))
                break;
            if (std::abs(step) < 1e-13 && std::abs(factor.eval(s)) < 1e-11) {
                converged = true;
                break;
            }
        }
        if (!converged || !region.contains(s) || std::abs(factor.eval(s)) >= 1e-11)
            continue;
        bool dup = false;
        for (const Complex& r : roots)
            if (std::abs(r - s) < 1e-6) {
                dup = true;
                break;
            }
        if (!dup)
            roots.push_back(s);
    }
    std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
        if (x.real() != y.real())
            return x.real() > y.real();
        return x.imag() < y.imag();
    });
    if (static_cast<int>(roots.size()) > max_roots)
        roots.resize(static_cast<size_t>(max_roots));
    return roots;
}

struct CurvePoint {
    double beta = 0.0;
    double c0 = 0.0;
    double omega = 0.0;  // |Im| of the crossing root pair; 0 on the zero-root branch
};

using CurveBranch = std::vector<CurvePoint>;

namespace detail {

// cos of the delayed phase at a zero-real-part crossing
inline double crossing_ratio(double beta, double c0) {
    const double denom = (1.0 - c0) * beta;
    double r = (1.0 - c0 * beta) / denom;
    return std::clamp(r, -1.0, 1.0);
}

// |Im| of the crossing root from the squared boundary relation
inline double crossing_omega(double beta, double c0, double tau) {
    const double arg = (beta - 1.0) * (beta + 1.0 - 2.0 * c0 * beta);
    return tau * std::sqrt(std::max(0.0, arg));
}

inline void attach_to_branches(std::vector<CurveBranch>& branches,
                               const std::vector<CurvePoint>& pts, double jump) {
    std::vector<bool> taken(branches.size(), false);
    for (const CurvePoint& pt : pts) {
        int best = -1;
        double best_gap = jump;
        for (size_t bi = 0; bi < branches.size(); ++bi) {
            if (taken[bi])
                continue;
            const double gap = std::abs(branches[bi].back().c0 - pt.c0);
            if (gap < best_gap) {
                best_gap = gap;
                best = static_cast<int>(bi);
            }
        }
        if (best >= 0) {
            branches[static_cast<size_t>(best)].push_back(pt);
            taken[static_cast<size_t>(best)] = true;
        } else {
            branches.push_back(CurveBranch{pt});
            taken.push_back(true);
        }
    }
}

}  // namespace detail

inline double pitchfork_c0(double beta) { return (1.0 + beta) / (2.0 * beta); }

/// Zero-real-part boundary curves of one factor in the (beta, c0) plane for a
/// delayed network. For each beta the residual
///   omega(c0) - (2 n pi / p - arccos((1 - c0 beta)/((1 - c0) beta)))
/// with omega(c0) = tau sqrt((beta-1)(beta+1-2 c0 beta)) is solved for c0 in
/// [0, (1+beta)/(2 beta)]; only crossings with nonnegative phase survive, which
/// filters the sign-inconsistent solutions of the squared relation. For
/// n = p/2 the omega = 0 endpoint c0 = (1+beta)/(2 beta) is emitted as its own
/// (delay-independent) branch; interior roots are the "extra" Hopf branches.
inline std::vector<CurveBranch> boundary_curve_delay(int n_index, int p, double tau,
                                                     const std::vector<double>& beta_grid) {
    if (!(tau > 0.0))
        throw std::invalid_argument("boundary_curve_delay: tau must be positive");
    std::vector<CurveBranch> branches;
    CurveBranch zero_root_branch;  // the omega = 0 endpoint family, n = p/2 only
    const double phase = 2.0 * M_PI * n_index / p;
    for (double beta : beta_grid) {
        if (!(beta > 1.0))
            continue;
        const double hi = pitchfork_c0(beta);
        auto residual = [&](double c0) {
            return detail::crossing_omega(beta, c0, tau) -
                   (phase - std::acos(detail::crossing_ratio(beta, c0)));
        };
        auto found = bracketed_roots(residual, 0.0, hi * (1.0 - 1e-9), 2400, 1e-13);
        std::vector<CurvePoint> pts;
        for (double c0 : found) {
            if (2 * n_index == p && std::abs(c0 - hi) < 1e-7)
                continue;  // coincides with the endpoint root
            pts.push_back({beta, c0, detail::crossing_omega(beta, c0, tau)});
        }
        if (2 * n_index == p)
            zero_root_branch.push_back({beta, hi, 0.0});
        std::sort(pts.begin(), pts.end(),
                  [](const CurvePoint& x, const CurvePoint& y) { return x.c0 < y.c0; });
        detail::attach_to_branches(branches, pts, 0.05);
    }
    if (!zero_root_branch.empty())
        branches.push_back(std::move(zero_root_branch));
    return branches;
}

/// Instantaneous-coupling boundary: c0 = (1 - beta cos(2 n pi / p)) / ((1 - cos(2 n pi / p)) beta),
/// clipped to [0, 1]. Undefined for n = 0 (that factor never crosses for beta > 1).
inline CurveBranch boundary_curve_no_delay(int n_index, int p,
                                           const std::vector<double>& beta_grid) {
    if (n_index % p == 0)
        throw std::invalid_argument("boundary_curve_no_delay: index 0 has no boundary curve");
    CurveBranch branch;
    const double c = std::cos(2.0 * M_PI * n_index / p);
    const double s = std::sin(2.0 * M_PI * n_index / p);
    for (double beta : beta_grid) {
        if (!(beta > 1.0))
            continue;
        const double c0 = (1.0 - beta * c) / ((1.0 - c) * beta);
        if (c0 < 0.0 || c0 > 1.0)
            continue;
        branch.push_back({beta, c0, std::abs((1.0 - c0) * beta * s)});
    }
    return branch;
}

struct BTPoint {
    double tau = 0.0;
    double beta = 0.0;
    double c0 = 0.0;
};

/// Double-zero point of the n = p/2 factor: F(0) = 0 and F'(0) = 0 meet at the
/// end of the first extra Hopf branch on the pitchfork curve. The two real
/// equations 1 + beta - 2 c0 beta = 0 and 1 - tau (1 - c0) beta = 0 are solved
/// by Newton iteration from the closed-form intersection.
inline std::optional<BTPoint> bt_point(double tau) {
    if (!(tau > 0.0))
        return std::nullopt;
    double beta = 1.0 + 2.0 / tau;
    double c0 = pitchfork_c0(beta);
    for (int it = 0; it < 30; ++it) {
        const double f1 = 1.0 + beta - 2.0 * c0 * beta;
        const double f2 = 1.0 - tau * (1.0 - c0) * beta;
        if (std::abs(f1) < 1e-15 && std::abs(f2) < 1e-15)
            break;
        // jacobian of (f1, f2) in (beta, c0)
        const double j11 = 1.0 - 2.0 * c0, j12 = -2.0 * beta;
        const double j21 = -tau * (1.0 - c0), j22 = tau * beta;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14)
            break;
        beta -= (f1 * j22 - f2 * j12) / det;
        c0 -= (j11 * f2 - j21 * f1) / det;
    }
    if (!(beta > 1.0) || !(c0 >= 0.0 && c0 <= 1.0))
        return std::nullopt;
    return BTPoint{tau, beta, c0};
}

inline std::vector<BTPoint> bt_locus(int p, const std::vector<double>& tau_grid) {
    if (p % 2 != 0)
        throw std::invalid_argument("bt_locus: needs even p (index p/2)");
    std::vector<BTPoint> locus;
    for (double tau : tau_grid)
        if (auto pt = bt_point(tau))
            locus.push_back(*pt);
    return locus;
}

struct ScenarioHopfSet {
    int n_index = 0;  // representative min(n, p - n) of the conjugate pair
    std::vector<CurveBranch> branches;
};

/// Complete local-bifurcation picture of the trivial solution that a cycle's
/// selected indices admit: Hopf boundary curves per index pair, the
/// delay-independent pitchfork branch when p/2 is selected, the double-zero
/// point when it exists, and the always-unstable flag when index 0 is present.
struct BifurcationScenario {
    int period = 0;
    IndexSelection selection;
    std::vector<ScenarioHopfSet> hopf_sets;
    std::optional<CurveBranch> pitchfork_curve;
    std::vector<BTPoint> bt_points;
    bool always_unstable = false;
};

inline BifurcationScenario scenario(const BinaryCycle& cycle, double tau,
                                    const std::vector<double>& beta_grid) {
    if (!is_admissible(cycle))
        throw NotAdmissibleError("scenario: cycle is not admissible");
    const int p = cycle.period();
    BifurcationScenario sc;
    sc.period = p;
    sc.selection = selected_indices(cycle);
    sc.always_unstable = std::find(sc.selection.indices.begin(), sc.selection.indices.end(), 0) !=
                         sc.selection.indices.end();

    std::vector<int> reps;
    for (int n : sc.selection.indices) {
        const int rep = std::min(n, p - n) % p;
        if (rep != 0 && std::find(reps.begin(), reps.end(), rep) == reps.end())
            reps.push_back(rep);
    }
    std::sort(reps.begin(), reps.end());

    for (int rep : reps) {
        if (2 * rep == p) {
            CurveBranch pf;
            for (double beta : beta_grid)
                if (beta > 1.0)
                    pf.push_back({beta, pitchfork_c0(beta), 0.0});
            sc.pitchfork_curve = std::move(pf);
            if (tau > 0.0) {
                ScenarioHopfSet set{rep, {}};
                for (auto& branch : boundary_curve_delay(rep, p, tau, beta_grid)) {
                    double max_omega = 0.0;
                    for (const auto& pt : branch)
                        max_omega = std::max(max_omega, pt.omega);
                    if (max_omega > 1e-8)
                        set.branches.push_back(std::move(branch));  // the extra Hopf branches
                }
                if (!set.branches.empty())
                    sc.hopf_sets.push_back(std::move(set));
                if (auto bt = bt_point(tau))
                    sc.bt_points.push_back(*bt);
            }
        } else {
            ScenarioHopfSet set{rep, {}};
            if (tau > 0.0)
                set.branches = boundary_curve_delay(rep, p, tau, beta_grid);
            else
                set.branches.push_back(boundary_curve_no_delay(rep, p, beta_grid));
            sc.hopf_sets.push_back(std::move(set));
        }
    }
    return sc;
}

/// Largest real part over the characteristic roots of all selected factors in a
/// fixed search rectangle. When the cycle does not span the whole space, the
/// complementary directions contribute a stable root (-tau resp. -1).
inline double max_real_part(const Connectivity& conn, const NetworkParams& params, double tau) {
    const ComplexRect region{-10.0, 10.0, -40.0, 40.0};
    const auto sel = selected_indices(conn.cycle());
    double best = -std::numeric_limits<double>::infinity();
    for (int n : sel.indices) {
        CharFactor factor{n, conn.cycle().period(), tau, params.c0, params.beta()};
        for (const Complex& root : char_roots(factor, region))
            best = std::max(best, root.real());
    }
    if (sel.rank < conn.neurons())
        best = std::max(best, tau > 0.0 ? -tau : -1.0);
    return best;
}

/// CSV rows "beta,c0,n_index,branch_id,kind" with kind in {hopf,pitchfork,bt}.
inline void write_scenario_csv(const BifurcationScenario& sc, std::ostream& out) {
    out << "beta,c0,n_index,branch_id,kind\n";
    char buf[64];
    auto emit = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf;
    };
    int branch_id = 0;
    for (const auto& set : sc.hopf_sets) {
        for (const auto& branch : set.branches) {
            for (const auto& pt : branch) {
                emit(pt.beta);
                out << ',';
                emit(pt.c0);
                out << ',' << set.n_index << ',' << branch_id << ",hopf\n";
            }
            ++branch_id;
        }
    }
    if (sc.pitchfork_curve) {
        for (const auto& pt : *sc.pitchfork_curve) {
            emit(pt.beta);
            out << ',';
            emit(pt.c0);
            out << ',' << sc.period / 2 << ',' << branch_id << ",pitchfork\n";
        }
        ++branch_id;
    }
    for (const auto& bt : sc.bt_points) {
        emit(bt.beta);
        out << ',';
        emit(bt.c0);
        out << ',' << sc.period / 2 << ',' << branch_id << ",bt\n";
        ++branch_id;
    }
}

}  // namespace cyclenet
