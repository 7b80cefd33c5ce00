#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cyclenet/numerics.hpp"

namespace cyclenet {

// numerical-rank cutoff, relative to the largest singular value
inline constexpr double kRankTolFactor = 1e-10;
// nonzero test for Fourier columns, relative to sqrt(N*p)
inline constexpr double kDftTolFactor = 1e-8;

/// A cycle of p binary patterns over N neurons, stored as an N x p matrix of +-1.
/// Columns are the patterns in prescribed order; adjacent equal columns are legal
/// but flagged, since transitions between identical patterns are degenerate.
class BinaryCycle {
  public:
    explicit BinaryCycle(Eigen::MatrixXi entries) : entries_(std::move(entries)) {
        if (entries_.rows() < 1 || entries_.cols() < 2)
            throw std::invalid_argument("cycle needs N >= 1 neurons and p >= 2 patterns");
        for (Eigen::Index i = 0; i < entries_.rows(); ++i)
            for (Eigen::Index j = 0; j < entries_.cols(); ++j)
                if (entries_(i, j) != 1 && entries_(i, j) != -1)
                    throw std::invalid_argument("cycle entries must be +1 or -1");
        const Eigen::Index p = entries_.cols();
        for (Eigen::Index j = 0; j < p; ++j)
            if (entries_.col(j) == entries_.col((j + 1) % p))
                adjacent_duplicate_ = true;
    }

    int neurons() const { return static_cast<int>(entries_.rows()); }
    int period() const { return static_cast<int>(entries_.cols()); }
    const Eigen::MatrixXi& entries() const { return entries_; }
    int entry(int i, int mu) const { return entries_(i, mu); }
    PatternVec column(int mu) const { return entries_.col(mu); }
    bool has_adjacent_duplicate_columns() const { return adjacent_duplicate_; }

    Matrix real() const { return entries_.cast<double>(); }

    /// Columns rotated left by k (pattern mu of the result is pattern mu+k of *this).
    BinaryCycle rotated(int k) const {
        const int p = period();
        k = ((k % p) + p) % p;
        Eigen::MatrixXi m(neurons(), p);
        for (int j = 0; j < p; ++j)
            m.col(j) = entries_.col((j + k) % p);
        return BinaryCycle(m);
    }

    BinaryCycle negated() const { return BinaryCycle(-entries_); }

    bool operator==(const BinaryCycle& other) const { return entries_ == other.entries_; }

    bool equals_up_to_rotation(const BinaryCycle& other) const {
        if (neurons() != other.neurons() || period() != other.period())
            return false;
        for (int k = 0; k < period(); ++k)
            if (rotated(k).entries_ == other.entries_)
                return true;
        return false;
    }

    static BinaryCycle parse(std::istream& in) {
        int n = 0, p = 0;
        if (!(in >> n >> p))
            throw std::invalid_argument("cycle file: expected header \"N p\"");
        if (n < 1 || p < 2)
            throw std::invalid_argument("cycle file: need N >= 1 and p >= 2");
        Eigen::MatrixXi m(n, p);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < p; ++j) {
                std::string tok;
                if (!(in >> tok))
                    throw std::invalid_argument("cycle file: too few entries");
                if (tok == "+" || tok == "+1" || tok == "1")
                    m(i, j) = 1;
                else if (tok == "-" || tok == "-1")
                    m(i, j) = -1;
                else
                    throw std::invalid_argument("cycle file: bad token '" + tok + "'");
            }
        }
        return BinaryCycle(m);
    }

    static BinaryCycle load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("cannot open cycle file: " + path);
        return parse(in);
    }

    /// Normalized text form: header line "N p", then +1/-1 rows.
    void write(std::ostream& out) const {
        out << neurons() << ' ' << period() << '\n';
        for (int i = 0; i < neurons(); ++i) {
            for (int j = 0; j < period(); ++j)
                out << (j ? " " : "") << (entries_(i, j) > 0 ? "+1" : "-1");
            out << '\n';
        }
    }

  private:
    Eigen::MatrixXi entries_;
    bool adjacent_duplicate_ = false;
};

/// Cyclic permutation matrix: ones on the subdiagonal plus the top-right corner,
/// so that right-multiplying a cycle shifts its patterns left by one.
inline Matrix permutation_matrix(int p) {
    if (p < 2)
        throw std::invalid_argument("permutation_matrix: p must be at least 2");
    Matrix perm = Matrix::Zero(p, p);
    perm(0, p - 1) = 1.0;
    for (int i = 1; i < p; ++i)
        perm(i, i - 1) = 1.0;
    return perm;
}

inline int numerical_rank(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0)
        return 0;
    const double cut = kRankTolFactor * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut)
            ++r;
    return r;
}

/// Norm of each column of the discrete Fourier transform of the cycle matrix,
/// i.e. of Sigma * v(k) with v(k) = (1, rho^k, ..., rho^{(p-1)k}), rho = e^{2 pi i / p}.
inline std::vector<double> dft_column_norms(const BinaryCycle& cycle) {
    const int n = cycle.neurons(), p = cycle.period();
    std::vector<double> norms(static_cast<size_t>(p), 0.0);
    for (int k = 0; k < p; ++k) {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
        for (int j = 0; j < p; ++j) {
            const double phase = 2.0 * M_PI * j * k / p;
            const Complex w(std::cos(phase), std::sin(phase));
            for (int i = 0; i < n; ++i)
                acc(i) += static_cast<double>(cycle.entry(i, j)) * w;
        }
        norms[static_cast<size_t>(k)] = acc.norm();
    }
    return norms;
}

struct AdmissibilityReport {
    bool admissible = false;
    int rank = 0;
    int nonzero_dft_columns = 0;
    std::vector<double> dft_column_norms;
};

/// A cycle is storable exactly when its Fourier transform has as many nonzero
/// columns as the matrix rank.
inline AdmissibilityReport admissibility(const BinaryCycle& cycle) {
    AdmissibilityReport rep;
    rep.rank = numerical_rank(cycle.real());
    rep.dft_column_norms = dft_column_norms(cycle);
    const double tol =
        kDftTolFactor * std::sqrt(static_cast<double>(cycle.neurons()) * cycle.period());
    for (double nrm : rep.dft_column_norms)
        if (nrm > tol)
            ++rep.nonzero_dft_columns;
    rep.admissible = (rep.nonzero_dft_columns == rep.rank);
    return rep;
}

inline bool is_admissible(const BinaryCycle& cycle) { return admissibility(cycle).admissible; }

enum class CycleKind { Simple, SeparableComposite, InseparableComposite };

struct CycleClass {
    CycleKind kind = CycleKind::Simple;
    bool anti_symmetric = false;
    bool mc = false;          // rank equals the number of neurons
    bool consecutive = false; // each row is the previous row shifted by one
};

namespace detail {

inline std::vector<int> shift_left(const std::vector<int>& row, int k) {
    const int p = static_cast<int>(row.size());
    std::vector<int> out(row.size());
    for (int j = 0; j < p; ++j)
        out[static_cast<size_t>(j)] = row[static_cast<size_t>((j + k) % p)];
    return out;
}

inline std::vector<int> cycle_row(const BinaryCycle& c, int i) {
    std::vector<int> row(static_cast<size_t>(c.period()));
    for (int j = 0; j < c.period(); ++j)
        row[static_cast<size_t>(j)] = c.entry(i, j);
    return row;
}

inline bool in_shift_orbit(const std::vector<int>& gen, const std::vector<int>& row) {
    const int p = static_cast<int>(gen.size());
    for (int k = 0; k < p; ++k)
        if (shift_left(gen, k) == row)
            return true;
    return false;
}

// span of all cyclic shifts of a generator row, as a p x p matrix
inline Matrix loop_matrix(const std::vector<int>& gen) {
    const int p = static_cast<int>(gen.size());
    Matrix m(p, p);
    for (int k = 0; k < p; ++k) {
        auto s = shift_left(gen, k);
        for (int j = 0; j < p; ++j)
            m(k, j) = static_cast<double>(s[static_cast<size_t>(j)]);
    }
    return m;
}

}  // namespace detail

/// Structural classification. Requires an admissible cycle.
inline CycleClass classify(const BinaryCycle& cycle) {
    const auto rep = admissibility(cycle);
    if (!rep.admissible)
        throw NotAdmissibleError("classify: cycle is not admissible");

    const int n = cycle.neurons(), p = cycle.period();
    CycleClass cls;
    cls.mc = (rep.rank == n);

    std::vector<std::vector<int>> rows;
    rows.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        rows.push_back(detail::cycle_row(cycle, i));

    bool simple = true;
    for (int i = 1; i < n && simple; ++i)
        simple = detail::in_shift_orbit(rows[0], rows[static_cast<size_t>(i)]);

    cls.anti_symmetric = (p % 2 == 0);
    for (int i = 0; i < n && cls.anti_symmetric; ++i)
        for (int j = 0; j < p / 2 && cls.anti_symmetric; ++j)
            cls.anti_symmetric = (rows[static_cast<size_t>(i)][static_cast<size_t>(j + p / 2)] ==
                                  -rows[static_cast<size_t>(i)][static_cast<size_t>(j)]);

    cls.consecutive = true;
    for (int i = 0; i + 1 < n && cls.consecutive; ++i)
        cls.consecutive =
            (detail::shift_left(rows[static_cast<size_t>(i)], 1) == rows[static_cast<size_t>(i + 1)]);

    if (simple) {
        cls.kind = CycleKind::Simple;
        return cls;
    }

    // group rows into shift-equivalence classes and test whether the generator
    // loops span independent subspaces
    std::vector<std::vector<int>> generators;
    for (const auto& row : rows) {
        bool found = false;
        for (const auto& gen : generators)
            if (detail::in_shift_orbit(gen, row)) {
                found = true;
                break;
            }
        if (!found)
            generators.push_back(row);
    }

    int rank_sum = 0;
    Matrix stacked(static_cast<Eigen::Index>(generators.size()) * p, p);
    for (size_t g = 0; g < generators.size(); ++g) {
        Matrix lm = detail::loop_matrix(generators[g]);
        rank_sum += numerical_rank(lm);
        stacked.middleRows(static_cast<Eigen::Index>(g) * p, p) = lm;
    }
    const int rank_union = numerical_rank(stacked);
    cls.kind = (rank_union == rank_sum) ? CycleKind::SeparableComposite
                                        : CycleKind::InseparableComposite;
    return cls;
}

struct IndexSelection {
    std::vector<int> indices;  // sorted, distinct k with Sigma * v(k) != 0
    int rank = 0;
};

/// Indices k whose Fourier column survives; these are exactly the rotation
/// eigenvalues the stored cycle excites, and they drive the characteristic
/// equation of the trivial solution.
inline IndexSelection selected_indices(const BinaryCycle& cycle) {
    IndexSelection sel;
    const auto rep = admissibility(cycle);
    sel.rank = rep.rank;
    const double tol =
        kDftTolFactor * std::sqrt(static_cast<double>(cycle.neurons()) * cycle.period());
    for (int k = 0; k < cycle.period(); ++k)
        if (rep.dft_column_norms[static_cast<size_t>(k)] > tol)
            sel.indices.push_back(k);
    return sel;
}

/// Anti-symmetric simple cycle with rows generated by consecutive shifts:
/// rows are gen, gen shifted by 1, ..., N-1 shifts.
inline BinaryCycle cycle_from_generator(const std::vector<int>& generator, int n_rows) {
    const int p = static_cast<int>(generator.size());
    if (n_rows < 1 || p < 2)
        throw std::invalid_argument("cycle_from_generator: bad size");
    Eigen::MatrixXi m(n_rows, p);
    for (int i = 0; i < n_rows; ++i) {
        auto row = detail::shift_left(generator, i);
        for (int j = 0; j < p; ++j)
            m(i, j) = row[static_cast<size_t>(j)];
    }
    return BinaryCycle(m);
}

}  // namespace cyclenet
