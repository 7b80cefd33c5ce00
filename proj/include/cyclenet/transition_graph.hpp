#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cyclenet/learning.hpp"

namespace cyclenet {

inline constexpr int kMaxGraphNeurons = 24;
inline constexpr std::uint32_t kDegenerateState = std::numeric_limits<std::uint32_t>::max();
inline constexpr double kSignTol = 1e-9;

/// Pattern -> integer code, +1 mapped to bit 1, first component most significant.
inline std::uint32_t encode(const PatternVec& pattern) {
    const int n = static_cast<int>(pattern.size());
    std::uint32_t code = 0;
    for (int i = 0; i < n; ++i) {
        if (pattern(i) != 1 && pattern(i) != -1)
            throw std::invalid_argument("encode: entries must be +1 or -1");
        code = (code << 1) | (pattern(i) > 0 ? 1u : 0u);
    }
    return code;
}

inline PatternVec decode(std::uint32_t code, int n) {
    PatternVec pattern(n);
    for (int i = 0; i < n; ++i)
        pattern(i) = (code >> (n - 1 - i)) & 1u ? 1 : -1;
    return pattern;
}

/// One application of the discrete transition xi -> sgn(W xi). Returns nothing
/// when some component of W xi is too close to zero to carry a sign.
inline std::optional<PatternVec> transition_step(const Matrix& transition,
                                                 const PatternVec& pattern,
                                                 double tol = kSignTol) {
    Vector y = transition * pattern.cast<double>();
    PatternVec out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (std::abs(y(i)) < tol)
            return std::nullopt;
        out(i) = y(i) > 0.0 ? 1 : -1;
    }
    return out;
}

/// Functional graph of all 2^N states under the transition operation, with its
/// loop decomposition. tail[s] is the number of steps from s to its loop, or -1
/// when the successor chain runs into a sign-degenerate state.
struct TransitionGraph {
    int n = 0;
    std::vector<std::uint32_t> successor;
    std::vector<std::vector<std::uint32_t>> loops;  // rotated so the smallest code is first
    std::vector<std::int32_t> tail;

    bool state_in_loop(std::uint32_t code) const {
        return tail[code] == 0 && successor[code] != kDegenerateState;
    }
};

namespace detail {

inline std::vector<std::uint32_t> canonical_rotation(std::vector<std::uint32_t> loop) {
    auto it = std::min_element(loop.begin(), loop.end());
    std::rotate(loop.begin(), it, loop.end());
    return loop;
}

}  // namespace detail

inline TransitionGraph build_graph(const Connectivity& conn) {
    const int n = conn.neurons();
    if (n > kMaxGraphNeurons)
        throw EnumerationBoundError("build_graph: state space too large (N > 24)");
    const std::uint32_t count = 1u << n;
    const Matrix& w = conn.transition();

    TransitionGraph graph;
    graph.n = n;
    graph.successor.assign(count, kDegenerateState);

    // walk the states in Gray-code order so W*state is updated by one column
    // flip per visit; refresh periodically to keep accumulation error in check
    PatternVec state = decode(0, n);
    Vector y = w * state.cast<double>();
    std::uint32_t gray_prev = 0;
    for (std::uint32_t i = 0;; ++i) {
        const std::uint32_t code = encode(state);
        bool degenerate = false;
        std::uint32_t succ = 0;
        for (int b = 0; b < n; ++b) {
            const double v = y(b);
            if (std::abs(v) < kSignTol) {
                degenerate = true;
                break;
            }
            succ = (succ << 1) | (v > 0.0 ? 1u : 0u);
        }
        graph.successor[code] = degenerate ? kDegenerateState : succ;

        if (i + 1 == count)
            break;
        const std::uint32_t gray = (i + 1) ^ ((i + 1) >> 1);
        const std::uint32_t flip = gray ^ gray_prev;
        gray_prev = gray;
        int bit = 0;
        while (!((flip >> bit) & 1u))
            ++bit;
        const int comp = n - 1 - bit;
        state(comp) = -state(comp);
        y += w.col(comp) * (2.0 * state(comp));
        if ((i & 0xfffu) == 0xfffu)
            y = w * state.cast<double>();  // drift refresh
    }

    // loop decomposition by successor-chain traversal
    graph.tail.assign(count, -1);
    std::vector<std::uint8_t> color(count, 0);  // 0 new, 1 on path, 2 done
    std::vector<std::uint32_t> path;
    for (std::uint32_t s = 0; s < count; ++s) {
        if (color[s])
            continue;
        path.clear();
        std::uint32_t cur = s;
        while (true) {
            if (cur == kDegenerateState) {
                for (auto v : path) {
                    color[v] = 2;
                    graph.tail[v] = -1;
                }
                break;
            }
            if (color[cur] == 2) {
                std::int32_t t = graph.tail[cur];
                for (auto it = path.rbegin(); it != path.rend(); ++it) {
                    t = (t < 0) ? -1 : t + 1;
                    color[*it] = 2;
                    graph.tail[*it] = t;
                }
                break;
            }
            if (color[cur] == 1) {
                auto start = std::find(path.begin(), path.end(), cur);
                std::vector<std::uint32_t> loop(start, path.end());
                for (auto v : loop) {
                    color[v] = 2;
                    graph.tail[v] = 0;
                }
                std::int32_t t = 0;
                for (auto it = std::make_reverse_iterator(start); it != path.rend(); ++it) {
                    ++t;
                    color[*it] = 2;
                    graph.tail[*it] = t;
                }
                graph.loops.push_back(detail::canonical_rotation(std::move(loop)));
                break;
            }
            color[cur] = 1;
            path.push_back(cur);
            cur = graph.successor[cur];
        }
    }
    std::sort(graph.loops.begin(), graph.loops.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return graph;
}

/// Each loop as a cycle matrix whose columns follow the loop order. Length-1
/// loops (fixed points) are emitted with the column doubled, since a cycle
/// needs at least two patterns; the storage identity still holds for them.
inline std::vector<BinaryCycle> loops_as_cycles(const TransitionGraph& graph) {
    std::vector<BinaryCycle> cycles;
    cycles.reserve(graph.loops.size());
    for (const auto& loop : graph.loops) {
        const int p = std::max<int>(2, static_cast<int>(loop.size()));
        Eigen::MatrixXi m(graph.n, p);
        for (int j = 0; j < p; ++j)
            m.col(j) = decode(loop[static_cast<size_t>(j) % loop.size()], graph.n);
        cycles.emplace_back(m);
    }
    return cycles;
}

inline nlohmann::json graph_to_json(const TransitionGraph& graph) {
    nlohmann::json j;
    j["n"] = graph.n;
    j["loops"] = graph.loops;
    std::map<std::int32_t, std::uint64_t> hist;
    for (auto t : graph.tail)
        ++hist[t];
    nlohmann::json h = nlohmann::json::object();
    for (const auto& [dist, cnt] : hist)
        h[std::to_string(dist)] = cnt;
    j["tails_histogram"] = h;
    return j;
}

inline std::string graph_to_dot(const TransitionGraph& graph) {
    std::string dot = "digraph transitions {\n  rankdir=LR;\n";
    for (std::uint32_t s = 0; s < graph.successor.size(); ++s) {
        if (graph.successor[s] == kDegenerateState) {
            dot += "  " + std::to_string(s) + " [shape=diamond];\n";
            continue;
        }
        dot += "  " + std::to_string(s) + " -> " + std::to_string(graph.successor[s]);
        if (graph.state_in_loop(s))
            dot += " [penwidth=2]";
        dot += ";\n";
    }
    dot += "}\n";
    return dot;
}

}  // namespace cyclenet
