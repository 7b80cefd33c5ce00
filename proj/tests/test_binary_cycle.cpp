#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "cyclenet/binary_cycle.hpp"
#include "cyclenet/learning.hpp"
#include "fixtures.hpp"

using namespace cyclenet;

namespace {

// storage-identity oracle, independent of the Fourier-count route:
// admissible <=> Sigma P pinv(Sigma) Sigma == Sigma P
bool storage_oracle(const BinaryCycle& c) {
    const Matrix sigma = c.real();
    const Matrix shifted = sigma * permutation_matrix(c.period());
    const Matrix j = shifted * pseudoinverse(sigma);
    return (j * sigma - shifted).cwiseAbs().maxCoeff() < 1e-9;
}

BinaryCycle cycle_from_mask(int n, int p, unsigned mask) {
    Eigen::MatrixXi m(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            m(i, j) = (mask >> (i * p + j)) & 1u ? 1 : -1;
    return BinaryCycle(m);
}

}  // namespace

TEST_CASE("permutation matrix basics") {
    Matrix p2 = permutation_matrix(2);
    Matrix want(2, 2);
    want << 0, 1, 1, 0;
    REQUIRE((p2 - want).cwiseAbs().maxCoeff() == 0.0);

    Matrix p6 = permutation_matrix(6);
    REQUIRE(p6(0, 5) == 1.0);
    for (int i = 1; i < 6; ++i)
        REQUIRE(p6(i, i - 1) == 1.0);
    REQUIRE(p6.sum() == 6.0);
    // each row and column has exactly one 1
    REQUIRE(p6.rowwise().sum().maxCoeff() == 1.0);
    REQUIRE(p6.colwise().sum().maxCoeff() == 1.0);

    Matrix p4 = permutation_matrix(4);
    Matrix pow = p4 * p4 * p4 * p4;
    REQUIRE((pow - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

    REQUIRE_THROWS_AS(permutation_matrix(1), std::invalid_argument);
}

TEST_CASE("permutation matrix shifts columns left") {
    auto c = fixtures::antisym3x6();
    Matrix shifted = c.real() * permutation_matrix(6);
    for (int j = 0; j < 6; ++j)
        REQUIRE((shifted.col(j) - c.real().col((j + 1) % 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("admissibility of the stock fixtures") {
    auto r5 = admissibility(fixtures::simple5x6());
    REQUIRE(r5.admissible);
    REQUIRE(r5.rank == 5);
    REQUIRE(r5.nonzero_dft_columns == 5);

    auto r3 = admissibility(fixtures::antisym3x6());
    REQUIRE(r3.admissible);
    REQUIRE(r3.rank == 3);

    auto rc = admissibility(fixtures::composite3x6());
    REQUIRE(rc.admissible);
    REQUIRE(rc.rank == 3);
}

TEST_CASE("admissibility: mixed 2x4 cycle agrees with the storage oracle") {
    Eigen::MatrixXi m(2, 4);
    m << 1, 1, 1, 1,
         1, -1, 1, -1;
    BinaryCycle c(m);
    REQUIRE(is_admissible(c) == storage_oracle(c));
}

TEST_CASE("admissibility matches the storage oracle exhaustively (N <= 2, p <= 4)") {
    for (int n = 1; n <= 2; ++n) {
        for (int p = 2; p <= 4; ++p) {
            const unsigned count = 1u << (n * p);
            for (unsigned mask = 0; mask < count; ++mask) {
                BinaryCycle c = cycle_from_mask(n, p, mask);
                INFO("n=" << n << " p=" << p << " mask=" << mask);
                REQUIRE(is_admissible(c) == storage_oracle(c));
            }
        }
    }
}

TEST_CASE("classification of the stock fixtures") {
    auto cls = classify(fixtures::antisym3x6());
    REQUIRE(cls.kind == CycleKind::Simple);
    REQUIRE(cls.anti_symmetric);
    REQUIRE(cls.mc);
    REQUIRE(cls.consecutive);

    auto cc = classify(fixtures::composite3x6());
    REQUIRE(cc.kind == CycleKind::InseparableComposite);
    REQUIRE(cc.mc);
    REQUIRE(cc.anti_symmetric);  // every row is (zeta, -zeta)
    REQUIRE_FALSE(cc.consecutive);

    auto cs = classify(fixtures::simple5x6());
    REQUIRE(cs.kind == CycleKind::Simple);
    REQUIRE(cs.mc);
}

TEST_CASE("one-neuron alternating cycle is anti-symmetric simple") {
    Eigen::MatrixXi m(1, 2);
    m << 1, -1;
    auto cls = classify(BinaryCycle(m));
    REQUIRE(cls.kind == CycleKind::Simple);
    REQUIRE(cls.anti_symmetric);
}

TEST_CASE("classification refuses non-admissible cycles") {
    Eigen::MatrixXi m(1, 4);
    m << 1, 1, -1, -1;  // two nonzero Fourier columns but rank 1
    REQUIRE_FALSE(is_admissible(BinaryCycle(m)));
    REQUIRE_THROWS_AS(classify(BinaryCycle(m)), NotAdmissibleError);
}

TEST_CASE("classification is invariant under column rotation") {
    for (const auto& c : {fixtures::simple5x6(), fixtures::antisym3x6(), fixtures::composite3x6()}) {
        auto base = classify(c);
        for (int k = 1; k < c.period(); ++k) {
            auto rot = classify(c.rotated(k));
            REQUIRE(rot.kind == base.kind);
            REQUIRE(rot.anti_symmetric == base.anti_symmetric);
            REQUIRE(rot.mc == base.mc);
        }
    }
}

TEST_CASE("separable composite: generators on disjoint Fourier modes") {
    // the alternating row lives on the half-period mode, the other two rows
    // span the odd modes: the loops are independent subspaces
    Eigen::MatrixXi m(3, 4);
    m << 1, -1, 1, -1,
         1, 1, -1, -1,
         1, -1, -1, 1;
    BinaryCycle c(m);
    REQUIRE(is_admissible(c));
    auto cls = classify(c);
    REQUIRE(cls.kind == CycleKind::SeparableComposite);
}

TEST_CASE("selected indices of the stock fixtures") {
    auto s3 = selected_indices(fixtures::antisym3x6());
    REQUIRE(s3.indices == std::vector<int>{1, 3, 5});

    auto s5 = selected_indices(fixtures::simple5x6());
    REQUIRE(s5.indices == std::vector<int>{1, 2, 3, 4, 5});

    auto sr = selected_indices(fixtures::ring6x6());
    REQUIRE(sr.indices == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("selected index count equals rank for admissible cycles") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> bit(0, 1);
    int tested = 0;
    while (tested < 40) {
        int n = 1 + static_cast<int>(rng() % 4);
        int p = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXi m(n, p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j)
                m(i, j) = bit(rng) ? 1 : -1;
        BinaryCycle c(m);
        if (!is_admissible(c))
            continue;
        ++tested;
        auto sel = selected_indices(c);
        REQUIRE(static_cast<int>(sel.indices.size()) == sel.rank);
    }
}

TEST_CASE("anti-symmetric cycles never select even indices") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int p = 4; p <= 12; p += 2) {
        for (int rep = 0; rep < 8; ++rep) {
            std::vector<int> gen(static_cast<size_t>(p));
            for (int j = 0; j < p / 2; ++j) {
                gen[static_cast<size_t>(j)] = bit(rng) ? 1 : -1;
                gen[static_cast<size_t>(j + p / 2)] = -gen[static_cast<size_t>(j)];
            }
            int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(p / 2));
            auto c = cycle_from_generator(gen, n);
            for (int k : selected_indices(c).indices)
                REQUIRE(k % 2 == 1);
        }
    }
}

TEST_CASE("cycle file round trip, tolerant token forms") {
    std::istringstream in("3 6\n+ + + - - -\n+ + - - - +\n+ - - - + +\n");
    auto c = BinaryCycle::parse(in);
    REQUIRE(c == fixtures::antisym3x6());

    std::ostringstream out;
    c.write(out);
    std::istringstream back(out.str());
    REQUIRE(BinaryCycle::parse(back) == c);
}

TEST_CASE("adjacent duplicate columns are flagged, not rejected") {
    Eigen::MatrixXi m(1, 2);
    m << 1, 1;
    BinaryCycle c(m);
    REQUIRE(c.has_adjacent_duplicate_columns());
    REQUIRE_FALSE(fixtures::antisym3x6().has_adjacent_duplicate_columns());
}

TEST_CASE("entry validation") {
    Eigen::MatrixXi bad(1, 2);
    bad << 1, 0;
    REQUIRE_THROWS_AS(BinaryCycle(bad), std::invalid_argument);
    Eigen::MatrixXi tiny(1, 1);
    tiny << 1;
    REQUIRE_THROWS_AS(BinaryCycle(tiny), std::invalid_argument);
}
