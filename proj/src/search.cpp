#include "keyact/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "keyact/attack.hpp"
#include "keyact/error.hpp"

namespace keyact {
namespace {

double term_value(const Box& b, const SupportTerm& t) {
    double p = 1.0;
    for (std::size_t i = 0; i < t.alice->inputs.size(); ++i)
        p *= b(t.alice->inputs[i], t.bob->inputs[i], t.alice->outcomes[i], t.bob->outcomes[i]);
    return t.sign * p;
}

struct Best {
    double value = -1e300;
    std::array<int, 4> index{};
};

bool better(const Best& a, const Best& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.index < b.index;
}

// Scans chi0 in [begin, end) over all quadruples, in lexicographic order.
Best scan(const std::vector<std::vector<double>>& c, const ChshSigns& signs, int begin, int end) {
    const int n = static_cast<int>(c.size());
    // Signed copies of the table so that each quadruple costs 4 lookups and 3 additions.
    std::array<std::vector<double>, 4> t;
    for (int k = 0; k < 4; ++k) {
        t[k].resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) t[k][i * n + j] = signs.s[k] * c[i][j];
    }
    Best best;
    for (int c0 = begin; c0 < end; ++c0) {
        const double* r00 = &t[0][c0 * n];
        const double* r01 = &t[1][c0 * n];
        for (int c1 = 0; c1 < n; ++c1) {
            const double* r10 = &t[2][c1 * n];
            const double* r11 = &t[3][c1 * n];
            for (int x0 = 0; x0 < n; ++x0)
                for (int x1 = 0; x1 < n; ++x1) {
                    const double v = r00[x0] + r01[x1] + r10[x0] + r11[x1];
                    if (v > best.value) best = {v, {c0, c1, x0, x1}};
                }
        }
    }
    return best;
}

Best parallel_scan(const std::vector<std::vector<double>>& c, const ChshSigns& signs, int threads) {
    const int n = static_cast<int>(c.size());
    threads = std::clamp(threads, 1, std::max(1, n));
    std::vector<Best> partial(threads);
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        const int begin = n * w / threads, end = n * (w + 1) / threads;
        if (threads == 1)
            partial[w] = scan(c, signs, begin, end);
        else
            pool.emplace_back([&, w, begin, end] { partial[w] = scan(c, signs, begin, end); });
    }
    for (auto& th : pool) th.join();
    Best best = partial[0];
    for (const Best& b : partial)
        if (better(b, best)) best = b;
    return best;
}

}  // namespace

int default_thread_count() {
    if (const char* env = std::getenv("KEYACT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::array<ChshSigns, 8> chsh_variants() {
    std::array<ChshSigns, 8> out;
    constexpr std::array<int, 4> odd_positions{1, 0, 2, 3};
    int k = 0;
    for (int global : {1, -1})
        for (int pos : odd_positions) {
            ChshSigns s;
            s.s = {global, global, global, global};
            s.s[pos] = -global;
            out[k++] = s;
        }
    return out;
}

ChshVariant best_chsh_variant(const Box& b) {
    ChshVariant best{kCanonicalChsh, -1e300};
    for (const ChshSigns& s : chsh_variants()) {
        const double v = signed_chsh(b, s);
        if (v > best.value + 1e-15) best = {s, v};
    }
    return best;
}

std::vector<SupportTerm> support_terms(const Wiring& chi, const Wiring& xi, int x, int y) {
    if (chi.copies() != xi.copies()) throw ShapeMismatch("wirings consume different numbers of boxes");
    std::vector<SupportTerm> terms;
    terms.reserve(chi.support().size() * xi.support().size() / 2);
    for (const auto& ea : chi.support())
        for (const auto& eb : xi.support()) terms.push_back({x, y, &ea, &eb, (ea.output ^ eb.output) ? -1 : 1});
    return terms;
}

std::vector<SupportTerm> support_set(const WiringPair& pair) {
    std::vector<SupportTerm> out;
    for (int x = 0; x < static_cast<int>(pair.alice.size()); ++x)
        for (int y = 0; y < static_cast<int>(pair.bob.size()); ++y) {
            auto t = support_terms(pair.alice[x], pair.bob[y], x, y);
            out.insert(out.end(), t.begin(), t.end());
        }
    return out;
}

double wired_correlator(const Box& b, const Wiring& chi, const Wiring& xi) {
    double sum = 0.0;
    for (const SupportTerm& t : support_terms(chi, xi)) sum += term_value(b, t);
    return sum;
}

std::vector<Wiring> nonconstant_catalog_2in() {
    std::vector<Wiring> out;
    for (const Wiring& w : catalog_2in())
        if (w.wiring_class() != WiringClass::Constant) out.push_back(w);
    return out;
}

SearchResult distill_search(const Box& b, const SearchOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const Scenario& s = b.scenario();
    if (s.nx < 2 || s.ny < 2) throw ScenarioTooSmall("distillation needs two settings per party");
    if (s.na != 2 || s.nb != 2) throw ShapeMismatch("distillation acts on binary-outcome boxes");
    const Box bell = (s.nx == 2 && s.ny == 2) ? b : b.restrict_inputs(2, 2);

    const std::vector<Wiring> catalog = options.catalog ? *options.catalog : nonconstant_catalog_2in();
    if (catalog.empty()) throw DomainError("empty wiring catalog");
    for (const Wiring& w : catalog)
        if (w.copies() != 2 || w.side_inputs() != std::vector<int>{2, 2})
            throw ShapeMismatch("distillation catalog must hold 2-copy, 2-input wirings");
    const int n = static_cast<int>(catalog.size());

    SearchResult r;
    r.catalog_size = catalog.size();
    r.correlator_table.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.correlator_table[i][j] = wired_correlator(bell, catalog[i], catalog[j]);

    const ChshVariant chosen = best_chsh_variant(bell);
    r.signs = chosen.signs;
    r.s_before = chosen.value;
    const int threads = options.threads > 0 ? options.threads : default_thread_count();

    Best best;
    if (options.all_variants) {
        for (const ChshSigns& v : chsh_variants()) {
            const Best cand = parallel_scan(r.correlator_table, v, threads);
            if (cand.value > best.value) {
                best = cand;
                r.signs = v;
            }
        }
    } else {
        best = parallel_scan(r.correlator_table, chosen.signs, threads);
    }
    r.best = best.index;
    r.s_after = best.value;
    r.wirings = {catalog[best.index[0]], catalog[best.index[1]], catalog[best.index[2]], catalog[best.index[3]]};
    r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

KeyWiringResult optimize_key_wiring(const Box& b, const Wiring& alice_key_wiring) {
    const Scenario& s = b.scenario();
    if (s.nx < 1 || s.ny < 3) throw ScenarioTooSmall("key wiring needs Bob's setting y=2");
    if (alice_key_wiring.copies() != 2 || alice_key_wiring.side_inputs() != std::vector<int>{s.nx, s.nx})
        throw ShapeMismatch("Alice's key wiring must act on two copies of her settings");
    const auto& catalog = catalog_3in();
    std::vector<double> agree(catalog.size(), 0.0);
    for (std::size_t k = 0; k < catalog.size(); ++k) {
        // Bob's wiring is used only at his key setting, so only y = 2 rows matter.
        for (const SupportTerm& t : support_terms(alice_key_wiring, catalog[k]))
            if (t.sign > 0) agree[k] += term_value(b, t);
    }
    KeyWiringResult r{catalog[0], 0, agree[0], {}};
    for (std::size_t k = 1; k < catalog.size(); ++k)
        if (agree[k] > r.p_agree) r = {catalog[k], static_cast<int>(k), agree[k], {}};
    for (std::size_t k = 0; k < catalog.size(); ++k)
        if (agree[k] >= r.p_agree - 1e-12) r.maximizers.push_back(static_cast<int>(k));
    return r;
}

KeyWiringResult optimize_key_wiring(const Box& b) {
    return optimize_key_wiring(b, parallel_xor_wiring(2, b.scenario().nx, 0));
}

namespace {

RateReport bound_report(const Box& b, const PipelineConfig& config, std::optional<double> h_cc_upper) {
    const entropy::EntropyBound h = entropy::entropy_lower_bound(b, config.relaxation, config.solver);
    RateMeta meta{h.nodes, h.level, sdp::to_string(h.status), h.tolerance};
    return assemble_report(b, h.value, h_cc_upper, meta);
}

bool is_xor_pair(const WiringPair& pair) {
    const WiringPair x = xor_pair(2);
    return pair.alice == x.alice && pair.bob == x.bob;
}

}  // namespace

PipelineResult activation_pipeline(const Box& b, const PipelineConfig& config) {
    const Scenario& s = b.scenario();
    if (s.nx != 2 || s.ny != 3 || s.na != 2 || s.nb != 2) throw ShapeMismatch("pipeline expects a 2x3 binary box");
    PipelineResult out;
    std::optional<double> cc_before;
    if (config.family) cc_before = h_cc(*config.family);
    out.before = bound_report(b, config, cc_before);
    if (config.skip_if_positive && out.before.rate_lower > 0.0) {
        out.activation_needed = false;
        return out;
    }

    out.search = distill_search(b.restrict_inputs(2, 2), config.search);
    const auto& w = out.search->wirings;
    // Alice's key setting is her x = 0 Bell setting, so its wiring is fixed by the search.
    out.key_wiring = optimize_key_wiring(b, w[0]);
    WiringPair pair{{w[0], w[1]}, {w[2].with_side_inputs(3), w[3].with_side_inputs(3), out.key_wiring->wiring}};
    const std::vector<Box> copies{b, b};
    out.wired_box = apply_wiring(pair, copies);

    std::optional<double> cc_after;
    if (config.family && is_xor_pair(pair)) cc_after = h_cc(wired_params(*config.family, 2));
    out.after = bound_report(*out.wired_box, config, cc_after);
    out.wiring = std::move(pair);
    out.activated = out.before.rate_lower <= 0.0 && out.after->rate_lower > 0.0;
    return out;
}

std::vector<Candidate> sample_candidates(int n, std::uint64_t seed) {
    if (n < 1) throw DomainError("sample count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> alpha_dist(0.005, 1.0);
    // High visibility keeps the white-noise weight alpha (1 - v / sqrt 2) small.
    std::uniform_real_distribution<double> v_dist(0.85, 1.0);
    std::normal_distribution<double> jitter(0.0, 0.02);
    std::vector<Candidate> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const FamilyPoint p{alpha_dist(rng), v_dist(rng)};
        quantum::MeasurementAngles angles = quantum::default_angles();
        for (double& t : angles.alice) t += jitter(rng);
        for (double& t : angles.bob) t += jitter(rng);
        out.push_back({p, angles, quantum::born_box(quantum::build_state(p), quantum::observables(angles))});
    }
    return out;
}

}  // namespace keyact
