// cyclenet: store binary cycles in delayed Hopfield-type networks, simulate
// retrieval, enumerate coexisting cycles, and export bifurcation curves.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cyclenet/binary_cycle.hpp"
#include "cyclenet/dde.hpp"
#include "cyclenet/equilibria.hpp"
#include "cyclenet/learning.hpp"
#include "cyclenet/stability.hpp"
#include "cyclenet/transition_graph.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitCapability = 3;
constexpr int kExitNumerical = 4;

struct ConfigFile {
    std::map<std::string, std::string> kv;

    static ConfigFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("cannot open config file: " + path);
        ConfigFile cfg;
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            auto trim = [](std::string s) {
                const char* ws = " \t\r\n";
                s.erase(0, s.find_first_not_of(ws));
                auto last = s.find_last_not_of(ws);
                s.erase(last == std::string::npos ? 0 : last + 1);
                return s;
            };
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (!key.empty())
                cfg.kv[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string str(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument("config: missing key '" + key + "'");
        return it->second;
    }
    double num(const std::string& key) const {
        try {
            return std::stod(str(key));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad number for key '" + key + "'");
        }
    }
    double num_or(const std::string& key, double fallback) const {
        return has(key) ? num(key) : fallback;
    }
    long integer_or(const std::string& key, long fallback) const {
        return has(key) ? std::stol(str(key)) : fallback;
    }
};

std::string kind_name(cyclenet::CycleKind k) {
    switch (k) {
        case cyclenet::CycleKind::Simple: return "simple";
        case cyclenet::CycleKind::SeparableComposite: return "separable-composite";
        case cyclenet::CycleKind::InseparableComposite: return "inseparable-composite";
    }
    return "?";
}

int cmd_admissible(const std::string& cycle_file, const std::string& emit_path,
                   const std::string& connectivity_path) {
    auto cycle = cyclenet::BinaryCycle::load(cycle_file);
    auto rep = cyclenet::admissibility(cycle);
    std::cout << "neurons " << cycle.neurons() << ", period " << cycle.period() << '\n'
              << "rank " << rep.rank << '\n'
              << "nonzero dft columns " << rep.nonzero_dft_columns << '\n';
    std::cout << "dft column norms";
    for (double nrm : rep.dft_column_norms) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.6g", nrm);
        std::cout << buf;
    }
    std::cout << '\n';
    if (cycle.has_adjacent_duplicate_columns())
        std::cout << "warning: adjacent equal patterns\n";
    std::cout << "admissible " << (rep.admissible ? "yes" : "no") << '\n';
    if (rep.admissible) {
        auto cls = cyclenet::classify(cycle);
        std::cout << "class " << kind_name(cls.kind) << (cls.anti_symmetric ? ", anti-symmetric" : "")
                  << (cls.mc ? ", maximal-rank" : "") << (cls.consecutive ? ", consecutive" : "")
                  << '\n';
        auto sel = cyclenet::selected_indices(cycle);
        std::cout << "selected indices";
        for (int k : sel.indices)
            std::cout << ' ' << k;
        std::cout << '\n';
    }
    if (!emit_path.empty()) {
        std::ofstream out(emit_path);
        cycle.write(out);
    }
    if (!connectivity_path.empty() && rep.admissible) {
        std::ofstream out(connectivity_path);
        out << cyclenet::connectivity_to_json(cyclenet::build_connectivity(cycle)).dump(2)
            << '\n';
    }
    return rep.admissible ? 0 : 1;
}

int cmd_graph(const std::string& cycle_file, const std::string& json_path,
              const std::string& dot_path) {
    auto cycle = cyclenet::BinaryCycle::load(cycle_file);
    auto conn = cyclenet::build_connectivity(cycle);
    auto graph = cyclenet::build_graph(conn);
    std::cout << "states " << graph.successor.size() << ", loops " << graph.loops.size() << '\n';
    for (const auto& loop : graph.loops) {
        std::cout << "loop length " << loop.size() << ":";
        for (auto code : loop)
            std::cout << ' ' << code;
        std::cout << '\n';
    }
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << cyclenet::graph_to_json(graph).dump(2) << '\n';
    }
    if (!dot_path.empty()) {
        std::ofstream out(dot_path);
        out << cyclenet::graph_to_dot(graph);
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_prefix_override) {
    auto cfg = ConfigFile::load(config_path);
    auto cycle = cyclenet::BinaryCycle::load(cfg.str("cycle_file"));

    const double c0 = cfg.num("c0");
    const double lambda = cfg.num("lambda");
    const double tau = cfg.num("tau_ms");
    cyclenet::NetworkParams params =
        cfg.has("beta1")
            ? cyclenet::NetworkParams(c0, cfg.num("beta1"), lambda, tau)
            : cyclenet::NetworkParams::from_beta(c0, cfg.num("beta"), lambda, tau);

    const double t_end = cfg.num("t_end_ms");
    const double dt = cfg.num_or("dt_ms", cyclenet::default_dt(tau));
    const long seed = cfg.integer_or("seed", 0);
    const int start_index = static_cast<int>(cfg.integer_or("start_index", 0));
    const double settle = cfg.num_or("settle_fraction", 0.2);

    auto conn = cyclenet::build_connectivity(cycle);

    cyclenet::InitialState init;
    if (cfg.has("init") && cfg.str("init") == "random") {
        // seeded uniform initial data close to the origin
        std::mt19937_64 rng(static_cast<unsigned long long>(seed));
        const double amp = cfg.num_or("random_amplitude", 0.05);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        cyclenet::Vector u0(cycle.neurons());
        for (int i = 0; i < cycle.neurons(); ++i)
            u0(i) = amp * dist(rng);
        // represent as pattern * amplitude componentwise via a direct trajectory:
        // fold the draw into a pattern of signs and per-run amplitude
        cyclenet::PatternVec pat(cycle.neurons());
        for (int i = 0; i < cycle.neurons(); ++i)
            pat(i) = u0(i) >= 0.0 ? 1 : -1;
        init.pattern = pat;
        init.amplitude = std::max(1e-6, u0.cwiseAbs().maxCoeff());
    } else {
        init.pattern = cycle.column(start_index % cycle.period());
        init.amplitude = cfg.num_or("a", params.memory_amplitude());
    }

    auto traj = cyclenet::simulate(conn, params, init, t_end, dt);

    std::string prefix = !out_prefix_override.empty()
                             ? out_prefix_override
                             : (cfg.has("out_prefix") ? cfg.str("out_prefix") : "run");
    {
        std::ofstream out(prefix + "_trajectory.csv");
        cyclenet::write_trajectory_csv(traj, out);
    }
    nlohmann::json jrep;
    if (tau > 0.0) {
        auto interval_seq = cyclenet::extract_sign_sequence(traj, settle);
        {
            std::ofstream out(prefix + "_raster.csv");
            cyclenet::write_raster_csv(interval_seq, out);
        }
        // retrieval is scored on the visited-pattern sequence, which tracks the
        // transitions themselves instead of the drifting delay grid
        const double stall_after = cfg.num_or("stall_after_ms",
                                              std::numeric_limits<double>::infinity());
        auto seq = cyclenet::extract_pattern_sequence(traj, 0.25 * tau, stall_after);
        auto rep = cyclenet::check_retrieval(seq, cycle, start_index);
        jrep["matched_count"] = rep.matched_count;
        jrep["full_traversals"] = rep.full_traversals;
        if (rep.first_failure_interval)
            jrep["first_failure_index"] = *rep.first_failure_interval;
        else
            jrep["first_failure_index"] = nullptr;
    }
    jrep["seed"] = seed;
    jrep["config"] = config_path;
    jrep["t_end_ms"] = t_end;
    jrep["dt_ms"] = dt;
    std::ofstream out(prefix + "_retrieval.json");
    out << jrep.dump(2) << '\n';
    std::cout << "wrote " << prefix << "_trajectory.csv";
    if (tau > 0.0)
        std::cout << ", " << prefix << "_raster.csv";
    std::cout << ", " << prefix << "_retrieval.json\n";
    return 0;
}

int cmd_curves(const std::string& cycle_file, double tau, double beta_min, double beta_max,
               int beta_steps, const std::string& out_path) {
    auto cycle = cyclenet::BinaryCycle::load(cycle_file);
    auto grid = cyclenet::linspace(beta_min, beta_max, beta_steps);
    auto sc = cyclenet::scenario(cycle, tau, grid);
    std::ofstream out(out_path);
    cyclenet::write_scenario_csv(sc, out);
    std::cout << "selected indices";
    for (int k : sc.selection.indices)
        std::cout << ' ' << k;
    std::cout << '\n';
    std::cout << "hopf sets " << sc.hopf_sets.size() << ", pitchfork "
              << (sc.pitchfork_curve ? "yes" : "no") << ", bt points " << sc.bt_points.size()
              << ", always unstable " << (sc.always_unstable ? "yes" : "no") << '\n';
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

int cmd_sn_curve(double beta_min, double beta_max, int steps, const std::string& out_path,
                 double report_beta, double report_c0, double lambda,
                 const std::string& cycle_file) {
    auto curve = cyclenet::saddle_node_curve(cyclenet::linspace(beta_min, beta_max, steps));
    std::ofstream out(out_path);
    out << "beta,c0_star\n";
    char buf[64];
    for (const auto& [beta, c0] : curve) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", beta, c0);
        out << buf;
    }
    std::cout << "wrote " << out_path << " (" << curve.size() << " points)\n";

    if (report_beta > 0.0) {
        // equilibrium report of the per-interval system at the requested point
        auto params = cyclenet::NetworkParams::from_beta(report_c0, report_beta, lambda, 0.0);
        cyclenet::DerivedSystem sys{cyclenet::Matrix::Identity(1, 1), params,
                                    cyclenet::PatternVec::Ones(1)};
        if (!cycle_file.empty()) {
            auto conn = cyclenet::build_connectivity(cyclenet::BinaryCycle::load(cycle_file));
            sys = cyclenet::derived_system(conn, params, 0);
        }
        std::cout << cyclenet::equilibrium_report_to_json(cyclenet::count_equilibria(sys)).dump(2)
                  << '\n';
    }
    return 0;
}

int cmd_ring(double beta, double lambda) {
    auto params = cyclenet::NetworkParams::from_beta(0.0, beta, lambda, 0.0);
    auto ring = cyclenet::ring_equilibria(params);
    nlohmann::json j;
    j["beta"] = beta;
    j["lambda"] = lambda;
    j["nontrivial_exists"] = ring.nontrivial_exists;
    j["u_star"] = ring.u_star;
    j["stable"] = ring.stable;
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary-cycle networks: learning, retrieval, bifurcation scenarios"};
    app.require_subcommand(1);

    std::string cycle_file, emit_path, json_path, dot_path, config_path, out_path, out_prefix;
    std::string connectivity_path, report_cycle;
    double tau = 0.0, beta_min = 1.02, beta_max = 5.0, beta = 3.0, lambda = 10.0;
    double report_beta = 0.0, report_c0 = 0.9;
    int beta_steps = 160;

    auto* adm = app.add_subcommand("admissible", "validate a cycle file and classify it");
    adm->add_option("cycle_file", cycle_file)->required();
    adm->add_option("--emit-normalized", emit_path, "write the normalized cycle file");
    adm->add_option("--export-connectivity", connectivity_path,
                    "write the learned couplings as JSON");

    auto* gr = app.add_subcommand("graph", "enumerate the discrete transition graph");
    gr->add_option("cycle_file", cycle_file)->required();
    gr->add_option("--json", json_path, "write loops and tail histogram as JSON");
    gr->add_option("--dot", dot_path, "write the graph in DOT format");

    auto* sim = app.add_subcommand("simulate", "integrate the delayed network per a config file");
    sim->add_option("config_file", config_path)->required();
    sim->add_option("--out-prefix", out_prefix, "override the output file prefix");

    auto* cur = app.add_subcommand("curves", "export the local-bifurcation scenario curves");
    cur->add_option("cycle_file", cycle_file)->required();
    cur->add_option("--tau", tau, "delay (time-constant units)")->required();
    cur->add_option("--beta-min", beta_min);
    cur->add_option("--beta-max", beta_max);
    cur->add_option("--beta-steps", beta_steps);
    cur->add_option("--out", out_path)->required();

    auto* sn = app.add_subcommand("sn-curve", "export the retrieval-breaking saddle-node curve");
    sn->add_option("--beta-min", beta_min);
    sn->add_option("--beta-max", beta_max);
    sn->add_option("--steps", beta_steps);
    sn->add_option("--out", out_path)->required();
    sn->add_option("--report-beta", report_beta,
                   "also print the equilibrium report at this beta");
    sn->add_option("--report-c0", report_c0);
    sn->add_option("--lambda", lambda);
    sn->add_option("--cycle", report_cycle, "report on this cycle's derived system");

    auto* ring = app.add_subcommand("ring", "symmetric equilibria of the all-excitatory ring");
    ring->add_option("--beta", beta)->required();
    ring->add_option("--lambda", lambda);

    CLI11_PARSE(app, argc, argv);

    try {
        if (adm->parsed())
            return cmd_admissible(cycle_file, emit_path, connectivity_path);
        if (gr->parsed())
            return cmd_graph(cycle_file, json_path, dot_path);
        if (sim->parsed())
            return cmd_simulate(config_path, out_prefix);
        if (cur->parsed())
            return cmd_curves(cycle_file, tau, beta_min, beta_max, beta_steps, out_path);
        if (sn->parsed())
            return cmd_sn_curve(beta_min, beta_max, beta_steps, out_path, report_beta, report_c0,
                                lambda, report_cycle);
        if (ring->parsed())
            return cmd_ring(beta, lambda);
    } catch (const cyclenet::EnumerationBoundError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapability;
    } catch (const cyclenet::IntegrationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const cyclenet::NotAdmissibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
