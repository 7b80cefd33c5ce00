#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <nlohmann/json.hpp>

#include "cyclenet/binary_cycle.hpp"
#include "cyclenet/numerics.hpp"

namespace cyclenet {

/// Moore-Penrose pseudoinverse via SVD; singular values below the rank cutoff
/// are treated as zero so that rank and projector agree with admissibility().
inline Matrix pseudoinverse(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0)
        return Matrix::Zero(m.cols(), m.rows());
    const double cut = kRankTolFactor * sv(0);
    Vector inv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        inv(i) = (sv(i) > cut) ? 1.0 / sv(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Gain/coupling parameters of the network
///   du/dt = -u + c0 * beta_k * W0 tanh(lambda u) + c1 * beta_k * W tanh(lambda u(t - tau)).
/// beta1 fixes the firing-rate amplitude of the stored patterns; derived
/// quantities: beta_k = arctanh(beta1)/(lambda beta1), beta = lambda beta_k > 1.
struct NetworkParams {
    double c0 = 0.0;
    double beta1 = 0.5;
    double lambda = 10.0;
    double tau = 0.0;  // delay, in units of the membrane time constant (ms)

    NetworkParams() = default;
    NetworkParams(double c0_, double beta1_, double lambda_, double tau_)
        : c0(c0_), beta1(beta1_), lambda(lambda_), tau(tau_) {
        if (!(c0 >= 0.0 && c0 <= 1.0))
            throw std::invalid_argument("c0 must lie in [0,1]");
        if (!(beta1 > 0.0 && beta1 < 1.0))
            throw std::invalid_argument("beta1 must lie in (0,1)");
        if (!(lambda > 0.0))
            throw std::invalid_argument("lambda must be positive");
        if (!(tau >= 0.0))
            throw std::invalid_argument("tau must be nonnegative");
    }

    static NetworkParams from_beta(double c0, double beta, double lambda, double tau) {
        return NetworkParams(c0, beta1_from_beta(beta), lambda, tau);
    }

    double c1() const { return 1.0 - c0; }
    double beta_k() const { return std::atanh(beta1) / (lambda * beta1); }
    double beta() const { return std::atanh(beta1) / beta1; }
    /// Membrane-potential amplitude of a stored pattern.
    double memory_amplitude() const { return beta_k() * beta1; }
};

/// Connectivity pair learned from a cycle: the projection component stores the
/// individual patterns as fixed points, the transition component maps each
/// pattern onto its successor.
class Connectivity {
  public:
    Connectivity(Matrix projection, Matrix transition, BinaryCycle cycle)
        : projection_(std::move(projection)),
          transition_(std::move(transition)),
          cycle_(std::move(cycle)) {}

    const Matrix& projection() const { return projection_; }  // exported as "j0"
    const Matrix& transition() const { return transition_; }  // exported as "j"
    const BinaryCycle& cycle() const { return cycle_; }
    int neurons() const { return cycle_.neurons(); }

  private:
    Matrix projection_;
    Matrix transition_;
    BinaryCycle cycle_;
};

inline bool verify_storage(const Matrix& transition, const BinaryCycle& cycle,
                           double tol = 1e-9) {
    const Matrix sigma = cycle.real();
    const Matrix shifted = sigma * permutation_matrix(cycle.period());
    return ((transition * sigma - shifted).cwiseAbs().maxCoeff() < tol);
}

inline bool verify_storage(const Connectivity& conn, double tol = 1e-9) {
    return verify_storage(conn.transition(), conn.cycle(), tol);
}

/// Learn both connectivity components from an admissible cycle.
inline Connectivity build_connectivity(const BinaryCycle& cycle) {
    if (!is_admissible(cycle))
        throw NotAdmissibleError("build_connectivity: storage identity would fail");
    const Matrix sigma = cycle.real();
    const Matrix pinv = pseudoinverse(sigma);
    Matrix projection = sigma * pinv;
    Matrix transition = sigma * permutation_matrix(cycle.period()) * pinv;
    return Connectivity(std::move(projection), std::move(transition), cycle);
}

inline nlohmann::json connectivity_to_json(const Connectivity& conn) {
    const int n = conn.neurons();
    auto flatten = [n](const Matrix& m) {
        std::vector<double> flat;
        flat.reserve(static_cast<size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                flat.push_back(m(i, j));
        return flat;
    };
    nlohmann::json j;
    j["n"] = n;
    j["p"] = conn.cycle().period();
    j["j0"] = flatten(conn.projection());
    j["j"] = flatten(conn.transition());
    std::vector<std::vector<int>> rows;
    for (int i = 0; i < n; ++i) {
        std::vector<int> row;
        for (int mu = 0; mu < conn.cycle().period(); ++mu)
            row.push_back(conn.cycle().entry(i, mu));
        rows.push_back(std::move(row));
    }
    j["cycle"] = rows;
    return j;
}

}  // namespace cyclenet
