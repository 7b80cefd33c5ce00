// Store a three-neuron cycle, run the delayed network from its first pattern,
// and print the sign pattern retrieved in each delay interval.

#include <iostream>

#include "cyclenet/binary_cycle.hpp"
#include "cyclenet/dde.hpp"
#include "cyclenet/learning.hpp"

int main() {
    Eigen::MatrixXi entries(3, 6);
    entries << 1, 1, 1, -1, -1, -1,
               1, 1, -1, -1, -1, 1,
               1, -1, -1, -1, 1, 1;
    cyclenet::BinaryCycle cycle(entries);

    auto conn = cyclenet::build_connectivity(cycle);
    auto params = cyclenet::NetworkParams::from_beta(0.0, 3.0, 20.0, 10.0);
    auto traj = cyclenet::simulate(conn, params, {0.0, cycle.column(0)}, 140.0, 0.1);

    auto seq = cyclenet::extract_pattern_sequence(traj, 2.5);
    for (size_t n = 0; n < seq.size(); ++n) {
        std::cout << "pattern " << n << ": ";
        if (seq[n]) {
            for (Eigen::Index i = 0; i < seq[n]->size(); ++i)
                std::cout << ((*seq[n])(i) > 0 ? '+' : '-');
        } else {
            std::cout << "stalled";
        }
        std::cout << '\n';
    }

    auto rep = cyclenet::check_retrieval(seq, cycle, 0);
    std::cout << "matched " << rep.matched_count << " intervals, " << rep.full_traversals
              << " full traversals\n";
    return 0;
}
