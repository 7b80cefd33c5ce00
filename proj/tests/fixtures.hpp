#pragma once

#include <Eigen/Dense>

#include "cyclenet/binary_cycle.hpp"

namespace fixtures {

// 5-neuron simple cycle of period 6; its network stores three more cycles
// besides the prescribed one.
inline cyclenet::BinaryCycle simple5x6() {
    Eigen::MatrixXi m(5, 6);
    m << 1, 1, -1, 1, -1, -1,
         1, -1, 1, -1, -1, 1,
        -1, 1, -1, -1, 1, 1,
         1, -1, -1, 1, 1, -1,
        -1, -1, 1, 1, -1, 1;
    return cyclenet::BinaryCycle(m);
}

// anti-symmetric simple MC cycle, N = p/2 = 3; its network is a ring of three
// unidirectionally coupled neurons with a single inhibitory connection
inline cyclenet::BinaryCycle antisym3x6() {
    Eigen::MatrixXi m(3, 6);
    m << 1, 1, 1, -1, -1, -1,
         1, 1, -1, -1, -1, 1,
         1, -1, -1, -1, 1, 1;
    return cyclenet::BinaryCycle(m);
}

// inseparable composite MC cycle: the alternating third row lies in the span
// of the cyclic shifts of the first two rows
inline cyclenet::BinaryCycle composite3x6() {
    Eigen::MatrixXi m(3, 6);
    m << 1, 1, -1, -1, -1, 1,
         1, -1, -1, -1, 1, 1,
        -1, 1, -1, 1, -1, 1;
    return cyclenet::BinaryCycle(m);
}

// simple MC cycle with N = p = 6; its network is the all-excitatory ring
inline cyclenet::BinaryCycle ring6x6() {
    std::vector<int> gen{1, 1, 1, 1, 1, -1};
    return cyclenet::cycle_from_generator(gen, 6);
}

}  // namespace fixtures
