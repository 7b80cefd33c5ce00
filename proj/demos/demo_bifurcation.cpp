// Print the local-bifurcation scenario of the trivial solution for the
// three-neuron ring network: which boundary curves exist, where the
// double-zero point sits, and the retrieval-breaking saddle-node curve.

#include <iostream>

#include "cyclenet/binary_cycle.hpp"
#include "cyclenet/equilibria.hpp"
#include "cyclenet/stability.hpp"

int main() {
    Eigen::MatrixXi entries(3, 6);
    entries << 1, 1, 1, -1, -1, -1,
               1, 1, -1, -1, -1, 1,
               1, -1, -1, -1, 1, 1;
    cyclenet::BinaryCycle cycle(entries);

    const double tau = 2.0;
    auto grid = cyclenet::linspace(1.2, 5.0, 40);
    auto sc = cyclenet::scenario(cycle, tau, grid);

    std::cout << "selected indices:";
    for (int k : sc.selection.indices)
        std::cout << ' ' << k;
    std::cout << "\nhopf curve sets: " << sc.hopf_sets.size()
              << "\npitchfork: " << (sc.pitchfork_curve ? "yes" : "no")
              << "\nalways unstable: " << (sc.always_unstable ? "yes" : "no") << '\n';
    for (const auto& bt : sc.bt_points)
        std::cout << "double-zero point at beta=" << bt.beta << ", c0=" << bt.c0 << '\n';

    auto sn = cyclenet::saddle_node_curve({2.0, 3.0, 4.0});
    for (const auto& [beta, c0] : sn)
        std::cout << "saddle-node curve: beta=" << beta << " -> c0*=" << c0 << '\n';
    return 0;
}
