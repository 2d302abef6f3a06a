// keyact: device-independent key activation from the command line.
#include <atomic>
#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "keyact/attack.hpp"
#include "keyact/entropy.hpp"
#include "keyact/error.hpp"
#include "keyact/io.hpp"
#include "keyact/rates.hpp"
#include "keyact/search.hpp"
#include "keyact/wirings.hpp"

using namespace keyact;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

struct BoundOptions {
    int nodes = 12;
    int level = 2;
    double tolerance = 1e-8;
    std::string mode = "full";
    std::string basis = "extended";

    entropy::RelaxationConfig relaxation() const {
        entropy::RelaxationConfig c;
        c.nodes = nodes;
        c.level = level;
        c.mode = mode == "coarse" ? entropy::ConstraintMode::Coarse : entropy::ConstraintMode::Full;
        c.eve_basis = basis == "compact" ? entropy::EveBasis::Compact : entropy::EveBasis::Extended;
        return c;
    }
    entropy::SolverConfig solver() const {
        entropy::SolverConfig s;
        s.sdp.tolerance = tolerance;
        return s;
    }
};

void add_bound_options(CLI::App* cmd, BoundOptions& o) {
    cmd->add_option("--nodes,-m", o.nodes, "Gauss-Radau nodes")->check(CLI::Range(2, 64));
    cmd->add_option("--level,-n", o.level, "NPA level")->check(CLI::Range(1, 3));
    cmd->add_option("--tolerance", o.tolerance, "SDP stopping tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--mode", o.mode, "observed statistics imposed")->check(CLI::IsMember({"full", "coarse"}));
    cmd->add_option("--basis", o.basis, "Eve operator basis")->check(CLI::IsMember({"extended", "compact"}));
}

struct BoxSource {
    std::string path;
    double alpha = 0.02;
    double v = 0.90236;

    Box load() const {
        if (!path.empty()) return io::read_box(path);
        return family_box({alpha, v});
    }
};

void add_box_options(CLI::App* cmd, BoxSource& s) {
    cmd->add_option("--box", s.path, "box file (JSON); default: family box at --alpha/--v");
    cmd->add_option("--alpha", s.alpha, "family weight alpha")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--v", s.v, "family visibility v")->check(CLI::Range(0.0, 1.0));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

const char* kRateHeader = "alpha,v,copies,S,Q,H_AE_lb,H_cc_ub,H_AB,r_lb,r_ub";

Box xor_wired(const FamilyPoint& p, int copies) {
    const Box b = family_box(p);
    if (copies == 1) return b;
    const std::vector<Box> boxes(copies, b);
    return apply_wiring(xor_pair(copies), boxes);
}

struct RateRow {
    FamilyPoint p;
    int copies = 1;
    double s = 0.0, q = 0.0, h_ab = 0.0, h_cc = 0.0;
    std::optional<double> h_ae;

    double r_ub() const { return h_cc - h_ab; }
    std::optional<double> r_lb() const {
        if (!h_ae) return std::nullopt;
        return *h_ae - h_ab;
    }
    std::string csv() const {
        std::ostringstream s;
        s << fmt(p.alpha) << ',' << fmt(p.v) << ',' << copies << ',' << fmt(this->s) << ',' << fmt(q) << ','
          << fmt(h_ae) << ',' << fmt(h_cc) << ',' << fmt(h_ab) << ',' << fmt(r_lb()) << ',' << fmt(r_ub());
        return s.str();
    }
};

RateRow evaluate(const FamilyPoint& p, int copies, const BoundOptions* sdp) {
    check_family_point(p);
    if (copies < 1 || copies > 3) throw DomainError("copies must be 1, 2 or 3");
    const Box wired = xor_wired(p, copies);
    RateRow row;
    row.p = p;
    row.copies = copies;
    row.s = chsh(wired);
    row.q = qber(wired);
    row.h_ab = cond_entropy_ab(wired);
    row.h_cc = h_cc(copies == 1 ? p : wired_params(p, copies));
    if (sdp) row.h_ae = entropy::entropy_lower_bound(wired, sdp->relaxation(), sdp->solver()).value;
    return row;
}

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> out;
    if (steps == 1) return {lo};
    for (int i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * i / (steps - 1));
    return out;
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return &std::cout;
    file.open(path);
    if (!file) throw IoError("cannot open " + path + " for writing");
    return &file;
}

// Evaluates jobs on a worker pool and writes their rows in index order as
// soon as each prefix is complete, so an interrupt keeps every finished row.
template <class Job>
bool run_ordered(int count, int threads, std::ostream& out, Job job) {
    std::vector<std::optional<std::string>> rows(count);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<int> next{0};
    std::exception_ptr failure;
    int finished_workers = 0;
    threads = std::max(1, std::min(threads, count));
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i; !g_interrupted && (i = next++) < count;) {
                try {
                    std::string row = job(i);
                    std::lock_guard lock(mu);
                    rows[i] = std::move(row);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                    g_interrupted = true;
                }
                cv.notify_all();
            }
            std::lock_guard lock(mu);
            ++finished_workers;
            cv.notify_all();
        });
    int written = 0;
    {
        std::unique_lock lock(mu);
        while (true) {
            while (written < count && rows[written]) {
                out << *rows[written] << '\n';
                ++written;
            }
            out.flush();
            if (written == count || finished_workers == threads) break;
            cv.wait(lock);
        }
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return written == count;
}

int cmd_rate(const FamilyPoint& p, int copies, const BoundOptions& o, bool header) {
    const RateRow row = evaluate(p, copies, &o);
    std::cerr << "S = " << fmt(row.s) << ", Q = " << fmt(row.q) << "\n"
              << "H(A|E) >= " << fmt(row.h_ae) << " (m = " << o.nodes << ", level " << o.level << ")\n"
              << "H_cc(A|E) = " << fmt(row.h_cc) << ", H(A|B) = " << fmt(row.h_ab) << "\n"
              << "r >= " << fmt(row.r_lb()) << ", r <= " << fmt(row.r_ub()) << "\n";
    if (header) std::cout << kRateHeader << '\n';
    std::cout << row.csv() << '\n';
    return 0;
}

struct GridOptions {
    double alpha_min = 0.0, alpha_max = 0.05;
    int alpha_steps = 11;
    double v_min = 0.85, v_max = 1.0;
    int v_steps = 16;
    std::vector<int> copies{1, 2, 3};
    int sdp_stride = 0;
    std::string output, boundary_output;
    int threads = 0;
    bool header = true;
};

int cmd_grid(const GridOptions& g, const BoundOptions& o) {
    const auto alphas = linspace(g.alpha_min, g.alpha_max, g.alpha_steps);
    const auto vs = linspace(g.v_min, g.v_max, g.v_steps);
    struct Point {
        FamilyPoint p;
        int copies;
        bool sdp;
    };
    std::vector<Point> points;
    for (double a : alphas)
        for (double v : vs)
            for (int k : g.copies) {
                const int idx = static_cast<int>(points.size());
                points.push_back({{a, v}, k, g.sdp_stride > 0 && idx % g.sdp_stride == 0});
            }
    std::ofstream file;
    std::ostream& out = *open_output(g.output, file);
    if (g.header) out << kRateHeader << '\n';
    const int threads = g.threads > 0 ? g.threads : default_thread_count();
    const bool complete = run_ordered(static_cast<int>(points.size()), threads, out, [&](int i) {
        const Point& pt = points[i];
        return evaluate(pt.p, pt.copies, pt.sdp ? &o : nullptr).csv();
    });

    if (!g.boundary_output.empty()) {
        std::ofstream bf;
        std::ostream& bout = *open_output(g.boundary_output, bf);
        if (g.header) bout << "alpha,copies,v_cc\n";
        for (double a : alphas) {
            if (a <= 0.0) continue;
            for (int k : g.copies) {
                std::string v;
                try {
                    v = fmt(cc_boundary(a, k));
                } catch (const NoRoot&) {
                }
                bout << fmt(a) << ',' << k << ',' << v << '\n';
            }
        }
    }
    return complete ? 0 : kExitInterrupted;
}

int cmd_boost(double alpha, const GridOptions& g, const BoundOptions& o) {
    const auto vs = linspace(g.v_min, g.v_max, g.v_steps);
    std::vector<std::pair<double, int>> points;
    for (double v : vs)
        for (int k : g.copies) points.emplace_back(v, k);
    std::ofstream file;
    std::ostream& out = *open_output(g.output, file);
    if (g.header) out << "alpha,v,copies,r_lb,r_lb_per_copy,r_ub,r_ub_per_copy\n";
    const int threads = g.threads > 0 ? g.threads : default_thread_count();
    const bool complete = run_ordered(static_cast<int>(points.size()), threads, out, [&](int i) {
        const auto [v, k] = points[i];
        const RateRow row = evaluate({alpha, v}, k, &o);
        std::ostringstream s;
        s << fmt(alpha) << ',' << fmt(v) << ',' << k << ',' << fmt(row.r_lb()) << ',' << fmt(*row.r_lb() / k) << ','
          << fmt(row.r_ub()) << ',' << fmt(row.r_ub() / k);
        return s.str();
    });
    return complete ? 0 : kExitInterrupted;
}

std::string signs_string(const ChshSigns& s) {
    std::string out;
    for (int v : s.s) out += v > 0 ? '+' : '-';
    return out;
}

int cmd_search(const BoxSource& src, bool all_variants, const std::string& wired_path, const std::string& sdpa_path,
               int node, const BoundOptions& o) {
    const Box b = src.load();
    SearchOptions opts;
    opts.all_variants = all_variants;
    const SearchResult r = distill_search(b, opts);
    const char* names[4] = {"chi_0", "chi_1", "xi_0", "xi_1"};
    std::cout << "variant " << signs_string(r.signs) << "\n"
              << "s_before " << fmt(r.s_before) << "\n"
              << "s_after " << fmt(r.s_after) << "\n";
    for (int k = 0; k < 4; ++k)
        std::cout << names[k] << " " << io::format_wiring(r.wirings[k]) << " label " << r.wirings[k].label() << "\n";
    std::cout << "catalog " << r.catalog_size << " per setting\n"
              << "elapsed " << fmt(r.elapsed_seconds) << " s\n";

    if (b.scenario().ny < 3) return 0;
    const KeyWiringResult key = optimize_key_wiring(b, r.wirings[0]);
    std::cout << "xi_2 " << io::format_wiring(key.wiring) << " label " << key.wiring.label() << "\n"
              << "p_agree " << fmt(key.p_agree) << "\n";
    const WiringPair pair{{r.wirings[0], r.wirings[1]},
                          {r.wirings[2].with_side_inputs(3), r.wirings[3].with_side_inputs(3), key.wiring}};
    const std::vector<Box> copies{b, b};
    const Box wired = apply_wiring(pair, copies);
    if (!wired_path.empty()) io::write_box(wired, wired_path);
    if (!sdpa_path.empty()) {
        const entropy::Relaxation rel = entropy::build_relaxation(wired, o.relaxation());
        entropy::export_sdpa(rel, node, sdpa_path);
    }
    return 0;
}

int cmd_wire(const BoxSource& src, bool use_xor, int copies, const std::vector<std::string>& alice,
             const std::vector<std::string>& bob, const std::string& output) {
    const Box b = src.load();
    WiringPair pair;
    if (use_xor || (alice.empty() && bob.empty())) {
        if (copies < 1) throw DomainError("copies must be positive");
        pair = xor_pair(copies, b.scenario());
    } else {
        if (alice.empty() || bob.empty()) throw DomainError("give wirings for both parties");
        for (const auto& s : alice) pair.alice.push_back(io::parse_wiring(s, b.scenario().nx));
        for (const auto& s : bob) pair.bob.push_back(io::parse_wiring(s, b.scenario().ny));
        copies = pair.alice.front().copies();
    }
    for (const auto* side : {&pair.alice, &pair.bob})
        for (const Wiring& w : *side) check_wiring(w);
    const std::vector<Box> boxes(copies, b);
    const Box wired = apply_wiring(pair, boxes);
    if (output.empty() || output == "-")
        std::cout << io::box_to_json(wired);
    else
        io::write_box(wired, output);
    return 0;
}

int cmd_export(const BoxSource& src, int copies, int node, const BoundOptions& o, const std::string& output) {
    Box b = src.load();
    if (copies > 1) {
        const std::vector<Box> boxes(copies, b);
        b = apply_wiring(xor_pair(copies, b.scenario()), boxes);
    }
    const entropy::Relaxation rel = entropy::build_relaxation(b, o.relaxation());
    if (node < 0 || node >= rel.num_nodes()) throw IndexOutOfRange("node index outside the quadrature rule");
    entropy::export_sdpa(rel, node, output);
    std::cerr << "wrote node " << node << " of " << rel.num_nodes() << " (" << rel.num_vars << " variables, weight "
              << fmt(entropy::node_weight(rel.rule, node)) << ") to " << output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Device-independent key activation: rates, wirings and distillation search"};
    app.require_subcommand(1);

    BoundOptions bound;
    BoxSource source;
    GridOptions grid;
    FamilyPoint point{0.02, 0.90236};
    int copies = 1, node = 0;
    bool header = true, all_variants = false, use_xor = false;
    double boost_alpha = 0.01;
    std::string output, wired_path, sdpa_path;
    std::vector<std::string> alice_specs, bob_specs;

    auto* rate = app.add_subcommand("rate", "key-rate bounds at one family point");
    rate->add_option("--alpha", point.alpha, "family weight alpha")->check(CLI::Range(0.0, 1.0));
    rate->add_option("--v", point.v, "family visibility v")->check(CLI::Range(0.0, 1.0));
    rate->add_option("--copies,-k", copies, "XOR-wired copies")->check(CLI::Range(1, 3));
    rate->add_flag("!--no-header", header, "omit the CSV header");
    add_bound_options(rate, bound);

    auto add_grid_common = [&](CLI::App* cmd) {
        cmd->add_option("--v-min", grid.v_min)->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--v-max", grid.v_max)->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--v-steps", grid.v_steps)->check(CLI::PositiveNumber);
        cmd->add_option("--copies,-k", grid.copies, "copy counts")->check(CLI::Range(1, 3));
        cmd->add_option("--output,-o", grid.output, "CSV path (default stdout)");
        cmd->add_option("--threads", grid.threads, "workers (default KEYACT_THREADS or all cores)");
        cmd->add_flag("!--no-header", grid.header, "omit the CSV header");
        add_bound_options(cmd, bound);
    };

    auto* grid_cmd = app.add_subcommand("grid", "rate bounds over an (alpha, v) grid");
    grid_cmd->add_option("--alpha-min", grid.alpha_min)->check(CLI::Range(0.0, 1.0));
    grid_cmd->add_option("--alpha-max", grid.alpha_max)->check(CLI::Range(0.0, 1.0));
    grid_cmd->add_option("--alpha-steps", grid.alpha_steps)->check(CLI::PositiveNumber);
    grid_cmd->add_option("--sdp-stride", grid.sdp_stride, "solve the SDP on every n-th row (0: never)")
        ->check(CLI::NonNegativeNumber);
    grid_cmd->add_option("--boundary-output", grid.boundary_output, "CSV of attack boundaries v*(alpha, copies)");
    add_grid_common(grid_cmd);

    auto* boost = app.add_subcommand("boost", "per-copy rates at fixed alpha across v");
    boost->add_option("--alpha", boost_alpha, "family weight alpha")->check(CLI::Range(0.0, 1.0));
    add_grid_common(boost);

    auto* search = app.add_subcommand("search", "distillation search over the extremal wirings");
    add_box_options(search, source);
    search->add_flag("--all-variants", all_variants, "scan every CHSH variant");
    search->add_option("--wired-output", wired_path, "write the wired 2x3 box here");
    search->add_option("--sdpa", sdpa_path, "export the wired box relaxation here");
    search->add_option("--node", node, "quadrature node for --sdpa")->check(CLI::NonNegativeNumber);
    add_bound_options(search, bound);

    auto* wire = app.add_subcommand("wire", "wire copies of a box");
    add_box_options(wire, source);
    wire->add_flag("--xor", use_xor, "XOR wiring on every setting");
    wire->add_option("--copies,-k", copies, "copies for --xor")->check(CLI::Range(1, 8));
    wire->add_option("--alice", alice_specs, "Alice's wiring per setting, e.g. xor:0,0,0");
    wire->add_option("--bob", bob_specs, "Bob's wiring per setting");
    wire->add_option("--output,-o", output, "box path (default stdout)");

    auto* exp = app.add_subcommand("export-sdp", "write one node SDP in SDPA sparse format");
    add_box_options(exp, source);
    exp->add_option("--copies,-k", copies, "XOR-wired copies")->check(CLI::Range(1, 3));
    exp->add_option("--node", node, "quadrature node")->check(CLI::NonNegativeNumber);
    exp->add_option("--output,-o", output, "SDPA path")->required();
    add_bound_options(exp, bound);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    std::signal(SIGINT, on_sigint);
    try {
        if (*rate) return cmd_rate(point, copies, bound, header);
        if (*grid_cmd) return cmd_grid(grid, bound);
        if (*boost) return cmd_boost(boost_alpha, grid, bound);
        if (*search) return cmd_search(source, all_variants, wired_path, sdpa_path, node, bound);
        if (*wire) return cmd_wire(source, use_xor, copies, alice_specs, bob_specs, output);
        if (*exp) return cmd_export(source, copies, node, bound, output);
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const ParseError& e) {
        std::cerr << "parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << "\n";
        return kExitParse;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
