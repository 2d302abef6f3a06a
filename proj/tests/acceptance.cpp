// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "keyact/attack.hpp"
#include "keyact/boxes.hpp"
#include "keyact/entropy.hpp"
#include "keyact/quadrature.hpp"
#include "keyact/quantum.hpp"
#include "keyact/rates.hpp"
#include "keyact/search.hpp"
#include "keyact/wirings.hpp"
#include "oracles.hpp"

using namespace keyact;

namespace {

constexpr FamilyPoint kBench{0.02, 0.90236};

// Collects the sub-checks of one criterion.
class Criterion {
public:
    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            failures_ += (failures_.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
    bool pass() const { return pass_; }
    std::string summary() const { return pass_ ? notes_ : "failed: " + failures_ + (notes_.empty() ? "" : " | " + notes_); }

private:
    bool pass_ = true;
    std::string failures_, notes_;
};

std::string num(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

entropy::RelaxationConfig nodes(int m) {
    entropy::RelaxationConfig c;
    c.nodes = m;
    return c;
}

Box xor_wired(const FamilyPoint& p, int copies) {
    const Box b = family_box(p);
    if (copies == 1) return b;
    const std::vector<Box> boxes(copies, b);
    return apply_wiring(xor_pair(copies), boxes);
}

// Every entropy bound computed in this run, for the range property.
std::vector<double> g_bounds;

double bound(const Box& b, int m) {
    const double v = entropy::entropy_lower_bound(b, nodes(m)).value;
    g_bounds.push_back(v);
    return v;
}

std::vector<Box> reference_vertices() {
    std::vector<Box> out;
    auto make = [&](auto rule) {
        std::vector<double> t(16, 0.0);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) t[((x * 2 + y) * 2 + a) * 2 + b] = rule(x, y, a, b);
        out.push_back(make_box({2, 2, 2, 2}, t));
    };
    for (int f = 0; f < 4; ++f)
        for (int g = 0; g < 4; ++g)
            make([=](int x, int y, int a, int b) { return double(a == ((f >> x) & 1) && b == ((g >> y) & 1)); });
    for (int s = 0; s < 8; ++s)
        make([=](int x, int y, int a, int b) {
            const int parity = (x * y) ^ ((s & 1) * x) ^ (((s >> 1) & 1) * y) ^ (s >> 2);
            return (a ^ b) == parity ? 0.5 : 0.0;
        });
    return out;
}

// Deterministic local 2x3 box: a = f(x), b = g(y).
Box local_2x3(int f, int g) {
    std::vector<double> t(24, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 3; ++y) t[((x * 3 + y) * 2 + ((f >> x) & 1)) * 2 + ((g >> y) & 1)] = 1.0;
    return make_box({2, 3, 2, 2}, t);
}

Box random_mix(std::mt19937_64& rng, const std::vector<Box>& parts) {
    std::exponential_distribution<double> e;
    std::vector<double> w(parts.size());
    double sum = 0.0;
    for (double& v : w) sum += v = e(rng);
    for (double& v : w) v /= sum;
    return mix(w, parts);
}

// ---------------------------------------------------------------------------

Criterion benchmark(double& h_before_m12) {
    Criterion c;
    PipelineConfig config;
    config.relaxation = nodes(12);
    config.family = kBench;
    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult r = activation_pipeline(family_box(kBench), config);
    c.note("m=12 in " + num(seconds_since(t0), 3) + " s");
    h_before_m12 = r.before.h_ae_lower;
    g_bounds.push_back(r.before.h_ae_lower);
    c.check(std::abs(r.before.h_ae_lower - 0.0108) <= 0.002, "H(A|E) = " + num(r.before.h_ae_lower));
    c.check(std::abs(r.before.h_ab - 0.0111) <= 0.0002, "H(A|B) = " + num(r.before.h_ab));
    c.check(r.before.rate_lower <= 0.0, "r = " + num(r.before.rate_lower));
    c.note("H(A|E)=" + num(r.before.h_ae_lower) + " H(A|B)=" + num(r.before.h_ab) + " r=" + num(r.before.rate_lower));
    c.check(r.activation_needed && r.after.has_value(), "pipeline did not wire");
    if (r.after) {
        g_bounds.push_back(r.after->h_ae_lower);
        c.check(std::abs(r.after->h_ae_lower - 0.0206) <= 0.002, "H'(A|E) = " + num(r.after->h_ae_lower));
        c.check(std::abs(r.after->h_ab - 0.0203) <= 0.0002, "H'(A|B) = " + num(r.after->h_ab));
        c.check(r.after->rate_lower > 0.0, "r' = " + num(r.after->rate_lower));
        c.check(r.activated, "activation flag");
        c.note("H'(A|E)=" + num(r.after->h_ae_lower) + " H'(A|B)=" + num(r.after->h_ab) +
               " r'=" + num(r.after->rate_lower));
    }
    // Independent of the pipeline: the XOR-wired box directly.
    const Box wired = xor_wired(kBench, 2);
    c.check(max_abs_difference(wired, *r.wired_box) < 1e-15, "pipeline wiring differs from the two-copy XOR");

    const double before8 = bound(family_box(kBench), 8) - cond_entropy_ab(family_box(kBench));
    const double after8 = bound(wired, 8) - cond_entropy_ab(wired);
    c.check(after8 > before8, "m=8: r' = " + num(after8) + " <= r = " + num(before8));
    c.note("m=8 r=" + num(before8) + " r'=" + num(after8));
    return c;
}

Criterion closed_form() {
    Criterion c;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_w1 = 0.0, worst_beta = 0.0;
    for (int i = 0; i < 100; ++i) {
        const FamilyPoint p{0.001 + 0.999 * u(rng), u(rng)};
        const auto [a2, v2] = oracle::w1(p.alpha, p.v);
        const Box wired = xor_wired(p, 2);
        const Box closed = family_box({a2, v2});
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        worst_w1 = std::max(worst_w1, std::abs(wired(x, y, a, b) - closed(x, y, a, b)));
        const double agree = wired(0, 2, 0, 0) + wired(0, 2, 1, 1);
        worst_beta = std::max(worst_beta, std::abs(agree - oracle::xor_key_agreement(p.alpha, p.v)));
    }
    c.check(worst_w1 <= 1e-10, "two-copy parameters off by " + num(worst_w1));
    c.check(worst_beta <= 1e-10, "key agreement off by " + num(worst_beta));
    c.note("max deviation " + num(worst_w1, 3) + " (Bell part), " + num(worst_beta, 3) + " (key setting)");
    return c;
}

Criterion quantum_truth() {
    Criterion c;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const FamilyPoint p{u(rng), u(rng)};
        const Box born = quantum::born_box(quantum::build_state(p), quantum::observables());
        worst = std::max(worst, max_abs_difference(born, family_box(p)));
    }
    c.check(worst <= 1e-12, "Born box off by " + num(worst));
    const double s = chsh(quantum::born_box(quantum::build_state({1.0, 1.0}), quantum::observables()));
    c.check(std::abs(s - 2.0 * std::numbers::sqrt2) <= 1e-9, "CHSH(1,1) = " + num(s, 12));
    c.note("max deviation " + num(worst, 3) + ", CHSH(1,1)=" + num(s, 12));
    return c;
}

Criterion search() {
    Criterion c;
    const Box b = family_box(kBench).restrict_inputs(2, 2);
    const SearchResult full = distill_search(b);
    c.check(full.catalog_size == 80, "catalog size " + std::to_string(full.catalog_size));
    c.check(full.elapsed_seconds < 10.0, "scan took " + num(full.elapsed_seconds) + " s");
    c.check(full.s_after >= 2.021173, "s_after = " + num(full.s_after, 10));
    c.note("80^4 scan " + num(full.elapsed_seconds, 3) + " s, s_before=" + num(full.s_before, 10) +
           " s_after=" + num(full.s_after, 10));

    std::vector<Wiring> xors;
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            for (int s = 0; s < 2; ++s) xors.push_back(xor_wiring(2, mu, nu, s));
    const std::vector<Box> copies{b, b};
    double brute = -1e9;
    for (const Wiring& a0 : xors)
        for (const Wiring& a1 : xors)
            for (const Wiring& b0 : xors)
                for (const Wiring& b1 : xors)
                    brute = std::max(brute, signed_chsh(apply_wiring({{a0, a1}, {b0, b1}}, copies)));
    SearchOptions opt;
    opt.catalog = xors;
    const SearchResult reduced = distill_search(b, opt);
    c.check(std::abs(reduced.s_after - brute) <= 1e-12,
            "XOR-only scan " + num(reduced.s_after, 12) + " vs brute force " + num(brute, 12));
    c.note("XOR-only scan = brute force = " + num(brute, 10));
    return c;
}

Criterion quadrature() {
    Criterion c;
    const QuadratureRule r2 = gauss_radau(2);
    c.check(std::abs(r2.nodes[0] - 1.0 / 3) <= 1e-14 && r2.nodes[1] == 1.0, "m=2 nodes");
    c.check(std::abs(r2.weights[0] - 0.75) <= 1e-14 && std::abs(r2.weights[1] - 0.25) <= 1e-14, "m=2 weights");
    double worst = 0.0;
    for (int m = 2; m <= 12; ++m) {
        const QuadratureRule r = gauss_radau(m);
        for (int k = 0; k <= 2 * m - 2; ++k) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
            worst = std::max(worst, std::abs(s - 1.0 / (k + 1)));
        }
    }
    c.check(worst <= 1e-10, "exactness error " + num(worst));
    c.note("max monomial error " + num(worst, 3) + " for m=2..12");
    return c;
}

Criterion attack() {
    Criterion c;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_sum = 0.0, worst_rec = 0.0;
    bool exact = true;
    for (int i = 0; i < 1000; ++i) {
        const double alpha = u(rng);
        const FamilyPoint p{alpha, 1.0 / std::numbers::sqrt2 + u(rng) * (1.0 - 1.0 / std::numbers::sqrt2)};
        const CCDecomposition d = cc_decompose(p);
        worst_sum = std::max(worst_sum, std::abs(d.q_nl1 + d.q_loc + d.q_c - 1.0));
        worst_rec = std::max(worst_rec, max_abs_difference(cc_reconstruct(d), family_box(p)));
        exact = exact && h_cc({alpha, 1.0}) == alpha && h_cc({alpha, 1.0 / std::numbers::sqrt2}) == 0.0;
    }
    c.check(worst_sum <= 1e-12, "weights sum off by " + num(worst_sum));
    c.check(worst_rec <= 1e-12, "reconstruction off by " + num(worst_rec));
    c.check(exact, "h_cc endpoints not exact");

    // Sandwich: the attack upper-bounds any certified entropy.
    const std::vector<FamilyPoint> points{{0.02, 0.90236}, {0.05, 0.95}, {0.1, 0.8},  {0.2, 0.99}, {0.3, 0.75},
                                          {0.5, 0.9},      {0.7, 0.85},  {0.9, 0.97}, {1.0, 0.8},  {1.0, 1.0}};
    double worst_gap = -1e9;
    for (const FamilyPoint& p : points) {
        const double lb = bound(family_box(p), 6);
        worst_gap = std::max(worst_gap, lb - h_cc(p));
        c.check(h_cc(p) >= lb - 1e-3, "sandwich at (" + num(p.alpha) + ", " + num(p.v) + ")");
    }
    c.note("max(H_lb - h_cc) = " + num(worst_gap, 3) + " over 10 points (m=6)");

    // Boundary ordering where the curves are compared.
    int ordered = 0, total = 0;
    for (int i = 0; i < 20; ++i) {
        const double alpha = 0.001 + i * (0.02 - 0.001) / 19;
        const double v1 = cc_boundary(alpha, 1), v2 = cc_boundary(alpha, 2), v3 = cc_boundary(alpha, 3);
        ++total;
        if (v2 <= v1 && v3 <= v2) ++ordered;
    }
    c.check(ordered == total, "ordering holds at " + std::to_string(ordered) + "/" + std::to_string(total) + " points");
    c.note("v3 <= v2 <= v1 at " + std::to_string(ordered) + "/" + std::to_string(total) + " alpha in [0.001, 0.02]");
    return c;
}

Criterion properties(double h_before_m12) {
    Criterion c;
    std::mt19937_64 rng(99);

    c.check(catalog_2in().size() == 82, "2-input catalog " + std::to_string(catalog_2in().size()));
    c.check(catalog_3in().size() == 252, "3-input catalog " + std::to_string(catalog_3in().size()));

    // No-signalling preservation for every ordered pair of 2-input wirings.
    const auto vertices = reference_vertices();
    const auto& cat2 = catalog_2in();
    double worst = 0.0;
    for (std::size_t i = 0; i < cat2.size(); ++i)
        for (std::size_t j = 0; j < cat2.size(); ++j) {
            const std::vector<Box> copies{random_mix(rng, vertices), random_mix(rng, vertices)};
            const Box out = apply_wiring({{cat2[i], cat2[j]}, {cat2[j], cat2[i]}}, copies);
            worst = std::max(worst, is_no_signalling(out, 1.0).max_deviation);
        }
    // Every 3-input wiring on Bob's side of 2x3 boxes.
    std::vector<Box> parts;
    for (int f = 0; f < 4; ++f)
        for (int g = 0; g < 8; ++g) parts.push_back(local_2x3(f, g));
    for (const Candidate& q : sample_candidates(8, 3)) parts.push_back(q.box);
    const auto& cat3 = catalog_3in();
    std::uniform_int_distribution<std::size_t> pick2(0, cat2.size() - 1), pick3(0, cat3.size() - 1);
    for (std::size_t k = 0; k < cat3.size(); ++k) {
        const std::vector<Box> copies{random_mix(rng, parts), random_mix(rng, parts)};
        const WiringPair pair{{cat2[pick2(rng)], cat2[pick2(rng)]}, {cat3[k], cat3[pick3(rng)], cat3[pick3(rng)]}};
        worst = std::max(worst, is_no_signalling(apply_wiring(pair, copies), 1.0).max_deviation);
    }
    c.check(worst <= 1e-9, "signalling " + num(worst));
    c.note("max signalling " + num(worst, 3) + " over " + std::to_string(cat2.size() * cat2.size() + cat3.size()) +
           " wired pairs");

    // |Lambda| = 16 per (chi, xi) and 64 per quadruple.
    bool sizes = true;
    for (const Wiring& a : cat2)
        for (const Wiring& b : cat2) sizes = sizes && support_terms(a, b).size() == 16;
    for (int i = 0; i < 2000; ++i) {
        const WiringPair pair{{cat2[pick2(rng)], cat2[pick2(rng)]}, {cat2[pick2(rng)], cat2[pick2(rng)]}};
        sizes = sizes && support_set(pair).size() == 64;
    }
    c.check(sizes, "support sizes");

    double lo = 1e9, hi = -1e9;
    for (double v : g_bounds) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    c.check(!g_bounds.empty() && lo >= 0.0 && hi <= 1.0 + 1e-6,
            "entropy bounds in [" + num(lo) + ", " + num(hi) + "]");
    c.note(std::to_string(g_bounds.size()) + " entropy bounds in [" + num(lo, 4) + ", " + num(hi, 4) + "]");

    const entropy::GuessingResult g = entropy::guessing_probability(family_box(kBench));
    c.check(g.h_min <= h_before_m12 + 1e-4, "h_min " + num(g.h_min) + " > BFF " + num(h_before_m12));
    c.note("h_min=" + num(g.h_min) + " <= H_m12=" + num(h_before_m12));
    return c;
}

Criterion boost() {
    Criterion c;
    constexpr double alpha = 0.01;
    bool found = false;
    for (double v : {0.92, 0.915, 0.925, 0.91, 0.93}) {
        const Box one = xor_wired({alpha, v}, 1);
        const double r1 = bound(one, 12) - cond_entropy_ab(one);
        c.note("v=" + num(v) + " r1=" + num(r1));
        if (!(r1 > 0.0 && r1 < 1e-3)) continue;
        found = true;
        const Box two = xor_wired({alpha, v}, 2);
        const double r2 = (bound(two, 12) - cond_entropy_ab(two)) / 2.0;
        c.note("r2/2=" + num(r2));
        c.check(r2 > r1, "two-copy rate per copy " + num(r2) + " <= " + num(r1));
        break;
    }
    c.check(found, "no v with a small positive single-copy rate");
    return c;
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int n, const std::function<Criterion()>& run) {
        const auto t0 = std::chrono::steady_clock::now();
        Criterion c;
        try {
            c = run();
        } catch (const std::exception& e) {
            c.check(false, std::string("exception: ") + e.what());
        }
        std::printf("criterion %d: %s (%s) [%.1f s]\n", n, c.pass() ? "PASS" : "FAIL", c.summary().c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        failed += !c.pass();
    };
    double h_before_m12 = -1.0;
    report(1, [&] { return benchmark(h_before_m12); });
    report(2, closed_form);
    report(3, quantum_truth);
    report(4, search);
    report(5, quadrature);
    report(6, attack);
    report(7, [&] { return properties(h_before_m12); });
    report(8, boost);
    std::printf("%s: %d of 8 criteria failed\n", failed ? "FAIL" : "PASS", failed);
    return failed ? 1 : 0;
}
