#include "shufflecast/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shufflecast/analysis.hpp"
#include "shufflecast/codec.hpp"
#include "shufflecast/core.hpp"
#include "shufflecast/sim.hpp"

namespace shufflecast {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitVerify = 3;

ShufflePair load_pair(const std::string& prev_path, const std::string& next_path) {
    ShufflePair pair;
    pair.prev = read_assignment_file(prev_path, 0);
    pair.next = read_assignment_file(next_path, 1);
    validate_pair(pair);
    return pair;
}

template <typename CellFn>
void print_matrix(std::ostream& out, int k, CellFn&& cell) {
    int width = 1;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            width = std::max(width, static_cast<int>(std::to_string(cell(i, j)).size()));
        }
    }
    for (int i = 0; i < k; ++i) {
        out << " ";
        for (int j = 0; j < k; ++j) {
            out << ' ' << std::setw(width) << cell(i, j);
        }
        out << '\n';
    }
}

std::string sigma_to_text(const std::vector<int>& sigma) {
    std::string text;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (i) text += ',';
        text += 'w' + std::to_string(sigma[i] + 1);
    }
    return text;
}

// --sigma takes 1-based worker indices, e.g. "1,3,2".
std::vector<int> parse_sigma(const std::string& text) {
    std::vector<int> sigma;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            const int w = std::stoi(tok);
            if (w < 1) throw InputError("");
            sigma.push_back(w - 1);
        } catch (const std::exception&) {
            throw InputError("bad --sigma entry '" + tok + "': expected 1-based worker indices");
        }
    }
    if (sigma.empty()) throw InputError("--sigma must list at least one worker");
    return sigma;
}

int cmd_analyze(const std::string& prev_path, const std::string& next_path, int exact_lb_limit,
                std::ostream& out) {
    const ShufflePair pair = load_pair(prev_path, next_path);
    const ShuffleMatrix s = compute_shuffle_matrix(pair);
    const LeftoverMatrix omega = compute_leftover_matrix(s);
    const LowerBoundMode mode =
        s.k <= exact_lb_limit ? LowerBoundMode::Exact : LowerBoundMode::Greedy;
    const RateReport rates = make_rate_report(s, omega, mode, exact_lb_limit);

    out << "shuffle: K=" << s.k << " workers, N=" << pair.prev.total_points()
        << " points, N/K=" << s.n_over_k << "\n\n";
    out << "shuffle matrix (rows hold, columns need):\n";
    print_matrix(out, s.k, [&](int i, int j) { return s.at(i, j); });
    out << "\nleftover matrix after pairwise cancellation:\n";
    print_matrix(out, omega.k, [&](int i, int j) { return omega.at(i, j); });
    out << "\nconservation: " << verify_conservation(s, omega).summary() << "\n";
    out << "\nrates (data points):\n";
    out << "  uncoded      " << rates.uncoded << "\n";
    out << "  coded        " << rates.proposed_total << " (phase1 " << rates.phase1 << " + phase2 "
        << rates.phase2 << ", ignoring w" << rates.ignored_worker + 1 << ")\n";
    out << "  lower bound  " << rates.lower_bound << " ("
        << (rates.lower_bound_exact ? "exact" : "greedy")
        << ", sigma = " << sigma_to_text(rates.best_sigma) << ")\n";
    out << "  gap          " << rates.proposed_total - rates.lower_bound << "\n";
    return kExitOk;
}

int cmd_encode(const std::string& prev_path, const std::string& next_path, std::uint64_t seed,
               std::size_t block_size, std::ostream& out) {
    const ShufflePair pair = load_pair(prev_path, next_path);
    const Dataset data = make_dataset(pair.prev.total_points(), block_size, seed);
    write_plan(out, encode(pair, data));
    return kExitOk;
}

// Decodes at every worker and byte-compares against the dataset. Returns the
// number of mismatched points (decode_worker itself throws when points are
// unresolvable).
int verify_all_workers(const ShufflePair& pair, const Dataset& data, const TransmissionPlan& plan,
                       std::ostream& err) {
    int mismatches = 0;
    for (int w = 0; w < pair.prev.workers(); ++w) {
        BlockMap cache;
        for (PointId id : pair.prev.batches[w]) {
            const auto block = data.block(id);
            cache.emplace(id, Block(block.begin(), block.end()));
        }
        const DecodeResult decoded = decode_worker(plan, w, cache, pair);
        for (const auto& [id, block] : decoded.recovered) {
            const auto want = data.block(id);
            if (!std::equal(block.begin(), block.end(), want.begin(), want.end())) {
                err << "worker w" << w + 1 << ": point " << id << " decoded with wrong bytes\n";
                ++mismatches;
            }
        }
    }
    return mismatches;
}

int cmd_verify(const std::string& prev_path, const std::string& next_path, std::uint64_t seed,
               std::size_t block_size, std::ostream& out, std::ostream& err) {
    const ShufflePair pair = load_pair(prev_path, next_path);
    const Dataset data = make_dataset(pair.prev.total_points(), block_size, seed);
    const TransmissionPlan plan = encode(pair, data);
    const int mismatches = verify_all_workers(pair, data, plan, err);
    if (mismatches > 0) {
        err << "verification failed: " << mismatches << " point(s) decoded incorrectly\n";
        return kExitVerify;
    }
    out << plan.rate_points() << " symbols, all " << pair.prev.workers() << " workers decoded\n";
    return kExitOk;
}

int cmd_worstcase(std::int64_t n, int k, const std::vector<int>& sigma, std::uint64_t seed,
                  std::size_t block_size, std::ostream& out, std::ostream& err) {
    const ShufflePair pair = worst_case_pair(n, k, sigma);
    const Dataset data = make_dataset(static_cast<std::size_t>(n), block_size, seed);
    const TransmissionPlan plan = encode(pair, data);
    const int mismatches = verify_all_workers(pair, data, plan, err);
    const std::int64_t ceiling = (n / k) * (k - 1);
    const auto rate = static_cast<std::int64_t>(plan.rate_points());
    if (mismatches > 0 || rate != ceiling) {
        err << "worst-case check failed: rate " << rate << ", expected " << ceiling << ", "
            << mismatches << " mismatched point(s)\n";
        return kExitVerify;
    }
    out << "worst-case rate " << rate << " = (K-1)N/K for K=" << k << ", N=" << n
        << "; decode verified at all " << k << " workers\n";
    return kExitOk;
}

struct SimulateArgs {
    SimConfig cfg;
    std::string csv_target = "-";
    std::string prev_path, next_path;
    std::string shuffle = "random";
    std::string sigma_text;
    bool k_given = false, n_given = false;
};

int cmd_simulate(SimulateArgs& args, std::ostream& out, std::ostream& err) {
    SimConfig& cfg = args.cfg;
    if (args.shuffle == "random") {
        cfg.shuffle_kind = ShuffleKind::Random;
    } else if (args.shuffle == "worst-case") {
        cfg.shuffle_kind = ShuffleKind::WorstCaseCyclic;
    } else {
        cfg.shuffle_kind = ShuffleKind::FromFile;
    }
    if (!args.sigma_text.empty()) cfg.sigma = parse_sigma(args.sigma_text);

    if (cfg.shuffle_kind == ShuffleKind::FromFile) {
        if (args.prev_path.empty() || args.next_path.empty()) {
            throw InputError("--shuffle files needs --prev and --next assignment files");
        }
        if (cfg.epochs != 1) {
            throw InputError("--shuffle files runs exactly one epoch");
        }
        const ShufflePair pair = load_pair(args.prev_path, args.next_path);
        const auto n = static_cast<std::int64_t>(pair.prev.total_points());
        if (args.k_given && cfg.k_workers != pair.prev.workers()) {
            throw InputError("-k does not match the assignment files");
        }
        if (args.n_given && cfg.n_points != n) {
            throw InputError("-n does not match the assignment files");
        }
        cfg.k_workers = pair.prev.workers();
        cfg.n_points = n;
        cfg.scripted = {pair.prev, pair.next};
    } else if (!args.k_given || !args.n_given) {
        throw InputError("simulate needs -k and -n (unless --shuffle files)");
    }

    const Dataset data = make_dataset(static_cast<std::size_t>(cfg.n_points),
                                      cfg.block_size_bytes, cfg.seed);
    const std::vector<EpochMetrics> metrics = run_simulation(cfg, data);

    std::ofstream file;
    std::ostream* csv = &out;
    if (args.csv_target != "-") {
        file.open(args.csv_target, std::ios::binary);
        if (!file) throw InputError("cannot open CSV output '" + args.csv_target + "'");
        csv = &file;
    }
    *csv << "epoch,rate,uncoded,theorem1,lower_bound,lb_exact,ignored_worker,max_chain_depth,"
            "decode_ok\n";
    std::int64_t total = 0, worst = 0;
    for (const EpochMetrics& m : metrics) {
        *csv << m.epoch << ',' << m.rate_points << ',' << m.uncoded << ',' << m.coded_bound << ','
             << m.lower_bound << ',' << (m.lower_bound_exact ? 1 : 0) << ','
             << m.ignored_worker + 1 << ',' << m.max_chain_depth << ',' << (m.decode_ok ? 1 : 0)
             << '\n';
        total += m.rate_points;
        worst = std::max(worst, m.rate_points);
    }
    std::ostringstream mean;
    mean << std::fixed << std::setprecision(2)
         << static_cast<double>(total) / static_cast<double>(metrics.size());
    err << "epochs " << metrics.size() << ": mean rate " << mean.str() << ", worst rate " << worst
        << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"coded data shuffling: broadcast planning, verification and simulation"};
    app.require_subcommand(1);

    std::string prev_path, next_path;
    std::uint64_t seed = 0;
    std::size_t block_size = 64;
    int exact_lb_limit = 8;
    std::string sigma_text;

    auto* analyze = app.add_subcommand(
        "analyze", "shuffle/leftover matrices, conservation checks and rate bounds");
    analyze->add_option("prev", prev_path, "assignment file for epoch t")->required();
    analyze->add_option("next", next_path, "assignment file for epoch t+1")->required();
    analyze->add_option("--exact-lb-limit", exact_lb_limit,
                        "largest K for the exact permutation search");

    auto* encode_cmd =
        app.add_subcommand("encode", "print the coded broadcast plan for a shuffle");
    encode_cmd->add_option("prev", prev_path, "assignment file for epoch t")->required();
    encode_cmd->add_option("next", next_path, "assignment file for epoch t+1")->required();
    encode_cmd->add_option("--seed", seed, "dataset seed");
    encode_cmd->add_option("-d,--block-size", block_size, "payload bytes per point");

    auto* verify =
        app.add_subcommand("verify", "encode, decode at all workers and compare byte-exactly");
    verify->add_option("prev", prev_path, "assignment file for epoch t")->required();
    verify->add_option("next", next_path, "assignment file for epoch t+1")->required();
    verify->add_option("--seed", seed, "dataset seed");
    verify->add_option("-d,--block-size", block_size, "payload bytes per point");

    SimulateArgs sim_args;
    auto* simulate =
        app.add_subcommand("simulate", "multi-epoch master/worker simulation, CSV metrics");
    auto* k_opt = simulate->add_option("-k,--workers", sim_args.cfg.k_workers, "worker count K");
    auto* n_opt = simulate->add_option("-n,--points", sim_args.cfg.n_points, "point count N");
    simulate->add_option("-d,--block-size", sim_args.cfg.block_size_bytes,
                         "payload bytes per point");
    simulate->add_option("-t,--epochs", sim_args.cfg.epochs, "number of shuffles to run");
    simulate->add_option("--seed", sim_args.cfg.seed, "seed for shuffles and payloads");
    simulate->add_option("--shuffle", sim_args.shuffle, "shuffle generator")
        ->check(CLI::IsMember({"random", "worst-case", "files"}));
    simulate->add_option("--sigma", sim_args.sigma_text,
                         "worst-case rotation order, 1-based comma list");
    simulate->add_option("--exact-lb-limit", sim_args.cfg.exact_lb_limit,
                         "largest K for the exact permutation search");
    simulate->add_option("--csv", sim_args.csv_target, "CSV output path, or - for stdout");
    simulate->add_option("--prev", sim_args.prev_path, "epoch-t file for --shuffle files");
    simulate->add_option("--next", sim_args.next_path, "epoch-t+1 file for --shuffle files");

    std::int64_t wc_n = 0;
    int wc_k = 0;
    auto* worstcase =
        app.add_subcommand("worstcase", "generate and verify the cyclic worst-case shuffle");
    worstcase->add_option("-k,--workers", wc_k, "worker count K")->required();
    worstcase->add_option("-n,--points", wc_n, "point count N")->required();
    worstcase->add_option("--sigma", sigma_text, "rotation order, 1-based comma list");
    worstcase->add_option("--seed", seed, "dataset seed");
    worstcase->add_option("-d,--block-size", block_size, "payload bytes per point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(prev_path, next_path, exact_lb_limit, out);
        if (encode_cmd->parsed()) return cmd_encode(prev_path, next_path, seed, block_size, out);
        if (verify->parsed()) return cmd_verify(prev_path, next_path, seed, block_size, out, err);
        if (simulate->parsed()) {
            sim_args.k_given = k_opt->count() > 0;
            sim_args.n_given = n_opt->count() > 0;
            return cmd_simulate(sim_args, out, err);
        }
        if (worstcase->parsed()) {
            const std::vector<int> sigma = sigma_text.empty() ? std::vector<int>{}
                                                              : parse_sigma(sigma_text);
            return cmd_worstcase(wc_n, wc_k, sigma, seed, block_size, out, err);
        }
        err << "error: no subcommand given\n";
        return kExitInput;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DecodeError& e) {
        err << "verification failed: " << e.what() << "\n";
        return kExitVerify;
    } catch (const std::logic_error& e) {
        err << "internal check failed: " << e.what() << "\n";
        return kExitVerify;
    }
}

}  // namespace shufflecast
