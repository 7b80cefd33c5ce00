#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cyclenet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using PatternVec = Eigen::VectorXi;
using Complex = std::complex<double>;

/// Cycle fails the storage condition (classification / construction refused).
struct NotAdmissibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested enumeration exceeds the supported state-space size.
struct EnumerationBoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integration produced a non-finite state.
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// gain relation: beta = arctanh(beta1)/beta1, increasing from 1 on (0,1)
inline double beta_from_beta1(double beta1) {
    if (!(beta1 > 0.0 && beta1 < 1.0))
        throw std::invalid_argument("beta1 must lie in (0,1)");
    return std::atanh(beta1) / beta1;
}

inline double beta1_from_beta(double beta) {
    if (!(beta > 1.0))
        throw std::invalid_argument("beta must exceed 1");
    double lo = 1e-12, hi = 1.0 - 1e-16;
    if (beta_from_beta1(hi) < beta)
        throw std::invalid_argument("beta out of invertible range");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (beta_from_beta1(mid) < beta ? lo : hi) = mid;
        if (hi - lo < 1e-17)
            break;
    }
    return 0.5 * (lo + hi);
}

/// Bisection on a bracketing interval [lo, hi]; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-14, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: interval does not bracket a root");
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// All sign-change roots of f on [lo, hi], located by a uniform scan plus bisection.
inline std::vector<double> bracketed_roots(const std::function<double(double)>& f, double lo,
                                           double hi, int samples, double xtol = 1e-13) {
    std::vector<double> roots;
    if (samples < 2 || !(hi > lo))
        return roots;
    double prev_x = lo, prev_f = f(lo);
    for (int i = 1; i < samples; ++i) {
        double x = lo + (hi - lo) * i / (samples - 1);
        double fx = f(x);
        if (prev_f == 0.0) {
            roots.push_back(prev_x);
        } else if (fx != 0.0 && (fx > 0.0) != (prev_f > 0.0)) {
            roots.push_back(bisect(f, prev_x, x, xtol));
        }
        prev_x = x;
        prev_f = fx;
    }
    if (prev_f == 0.0)
        roots.push_back(prev_x);
    return roots;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<size_t>(std::max(n, 0)));
    if (n == 1) {
        xs[0] = lo;
        return xs;
    }
    for (int i = 0; i < n; ++i)
        xs[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

inline double sqr(double x) { return x * x; }

}  // namespace cyclenet
