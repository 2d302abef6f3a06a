#include <doctest.h>

#include <algorithm>
#include <set>

#include "keyact/boxes.hpp"
#include "keyact/error.hpp"
#include "keyact/rates.hpp"
#include "keyact/search.hpp"
#include "oracles.hpp"

using namespace keyact;

namespace {

const FamilyPoint kBench{0.02, 0.90236};

Box bell_part(const FamilyPoint& p) { return family_box(p).restrict_inputs(2, 2); }

std::vector<Wiring> xor_catalog() {
    std::vector<Wiring> out;
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            for (int s = 0; s < 2; ++s) out.push_back(xor_wiring(2, mu, nu, s));
    return out;
}

Box pr_variant(int parity_x, int parity_y, int flip) {
    std::vector<double> t(16);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    t[((x * 2 + y) * 2 + a) * 2 + b] =
                        (a ^ b) == ((x * y) ^ (parity_x * x) ^ (parity_y * y) ^ flip) ? 0.5 : 0.0;
    return make_box({2, 2, 2, 2}, t);
}

}  // namespace

TEST_CASE("CHSH variants") {
    const auto variants = chsh_variants();
    CHECK(variants[0] == kCanonicalChsh);
    std::set<std::array<int, 4>> distinct;
    for (const auto& v : variants) {
        distinct.insert(v.s);
        CHECK(v.s[0] * v.s[1] * v.s[2] * v.s[3] == -1);
    }
    CHECK(distinct.size() == 8);

    const ChshVariant canonical = best_chsh_variant(pr_box());
    CHECK(canonical.signs == kCanonicalChsh);
    CHECK(canonical.value == doctest::Approx(4.0));
    for (int px = 0; px < 2; ++px)
        for (int py = 0; py < 2; ++py)
            for (int f = 0; f < 2; ++f) {
                const Box b = pr_variant(px, py, f);
                const ChshVariant best = best_chsh_variant(b);
                CHECK(best.value == doctest::Approx(4.0));
                CHECK(signed_chsh(b, best.signs) == doctest::Approx(4.0));
            }
    CHECK(best_chsh_variant(bell_part(kBench)).signs == kCanonicalChsh);
}

TEST_CASE("support sets") {
    const Wiring x = xor_wiring(2, 0, 0, 0), y = sequential_wiring(2, 0, 1, 0, 1, 1);
    CHECK(support_terms(x, y).size() == 16);
    const WiringPair pair{{x, y}, {y, x}};
    CHECK(support_set(pair).size() == 64);
    for (const SupportTerm& t : support_terms(x, y))
        CHECK(t.sign == ((t.alice->output ^ t.bob->output) ? -1 : 1));
}

TEST_CASE("wired correlators agree with the wiring engine") {
    const Box b = bell_part(kBench);
    const std::vector<Box> copies{b, b};
    const auto cat = nonconstant_catalog_2in();
    CHECK(cat.size() == 80);
    for (std::size_t i = 0; i < cat.size(); i += 9)
        for (std::size_t j = 0; j < cat.size(); j += 11) {
            const WiringPair pair{{cat[i]}, {cat[j]}};
            const double ref = correlator(apply_wiring(pair, copies), 0, 0);
            CHECK(wired_correlator(b, cat[i], cat[j]) == doctest::Approx(ref).epsilon(1e-13));
        }
}

TEST_CASE("XOR-only search matches brute force through the engine") {
    const Box b = bell_part(kBench);
    const std::vector<Box> copies{b, b};
    const auto cat = xor_catalog();
    double brute = -1e9;
    std::array<int, 4> arg{};
    for (int i0 = 0; i0 < 8; ++i0)
        for (int i1 = 0; i1 < 8; ++i1)
            for (int j0 = 0; j0 < 8; ++j0)
                for (int j1 = 0; j1 < 8; ++j1) {
                    const WiringPair pair{{cat[i0], cat[i1]}, {cat[j0], cat[j1]}};
                    const double s = signed_chsh(apply_wiring(pair, copies));
                    if (s > brute + 1e-12) {
                        brute = s;
                        arg = {i0, i1, j0, j1};
                    }
                }
    SearchOptions opt;
    opt.catalog = cat;
    const SearchResult r = distill_search(b, opt);
    CHECK(r.s_after == doctest::Approx(brute).epsilon(1e-12));
    CHECK(r.best == arg);
    CHECK(r.catalog_size == 8);
}

TEST_CASE("full search at the benchmark point") {
    const Box b = bell_part(kBench);
    const SearchResult r = distill_search(b);
    CHECK(r.catalog_size == 80);
    CHECK(r.elapsed_seconds < 10.0);
    CHECK(r.s_before == doctest::Approx(signed_chsh(b)).epsilon(1e-14));
    CHECK(r.s_after >= 2.021173);
    CHECK(r.s_after >= r.s_before);
    REQUIRE(r.wirings.size() == 4);
    for (const Wiring& w : r.wirings) CHECK(w.wiring_class() == WiringClass::Xor);

    const std::vector<Box> copies{b, b};
    const WiringPair pair{{r.wirings[0], r.wirings[1]}, {r.wirings[2], r.wirings[3]}};
    CHECK(signed_chsh(apply_wiring(pair, copies), r.signs) == doctest::Approx(r.s_after).epsilon(1e-12));

    const auto [a2, v2] = oracle::w1(kBench.alpha, kBench.v);
    CHECK(r.s_after == doctest::Approx(2.0 + 2.0 * a2 * (std::sqrt(2.0) * v2 - 1.0)).epsilon(1e-9));

    SearchOptions all;
    all.all_variants = true;
    CHECK(distill_search(b, all).s_after >= r.s_after - 1e-12);
}

TEST_CASE("search extremes and ties") {
    const SearchResult pr = distill_search(pr_box());
    CHECK(pr.s_after == doctest::Approx(4.0));

    // White noise: every wired correlator factorises into biased marginals, so
    // many quadruples tie; the lexicographically smallest maximiser wins.
    const SearchResult noise = distill_search(white_noise({2, 2, 2, 2}));
    const auto& c = noise.correlator_table;
    const auto& s = noise.signs.s;
    const int n = static_cast<int>(c.size());
    double best = -1e9;
    std::array<int, 4> first{};
    for (int a0 = 0; a0 < n; ++a0)
        for (int a1 = 0; a1 < n; ++a1)
            for (int b0 = 0; b0 < n; ++b0)
                for (int b1 = 0; b1 < n; ++b1) {
                    const double v = s[0] * c[a0][b0] + s[1] * c[a0][b1] + s[2] * c[a1][b0] + s[3] * c[a1][b1];
                    if (v > best + 1e-12) {
                        best = v;
                        first = {a0, a1, b0, b1};
                    }
                }
    CHECK(noise.s_after == doctest::Approx(best).epsilon(1e-12));
    CHECK(noise.best == first);
    CHECK(noise.s_after <= 2.0 + 1e-12);

    // The thread count does not change the result.
    SearchOptions one, many;
    one.threads = 1;
    many.threads = 3;
    const Box b = bell_part({0.3, 0.8});
    const auto r1 = distill_search(b, one), r3 = distill_search(b, many);
    CHECK(r1.best == r3.best);
    CHECK(r1.s_after == r3.s_after);
}

TEST_CASE("key wiring") {
    const Box b = family_box(kBench);
    const KeyWiringResult k = optimize_key_wiring(b);
    const auto& cat = catalog_3in();
    const Wiring target = xor_wiring(3, 2, 2, 0);
    const auto pos = std::find(cat.begin(), cat.end(), target) - cat.begin();
    CHECK(std::find(k.maximizers.begin(), k.maximizers.end(), pos) != k.maximizers.end());
    CHECK(k.p_agree == doctest::Approx(oracle::xor_key_agreement(kBench.alpha, kBench.v)).epsilon(1e-12));
    CHECK(k.wiring == cat[k.index]);

    CHECK(optimize_key_wiring(family_box({0.0, 0.5})).p_agree == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("candidate sampler") {
    const auto a = sample_candidates(50, 42), b = sample_candidates(50, 42);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(max_abs_difference(a[i].box, b[i].box) == 0.0);
        CHECK(is_no_signalling(a[i].box).ok);
        CHECK(chsh(a[i].box) <= 2.0 * std::sqrt(2.0) + 1e-6);
        CHECK(to_mixture(a[i].point).p_c > 0.0);
    }
    CHECK(max_abs_difference(sample_candidates(1, 1)[0].box, sample_candidates(1, 2)[0].box) > 0.0);
    CHECK_THROWS_AS(sample_candidates(0, 1), DomainError);
}

TEST_CASE("pipeline endpoints") {
    PipelineConfig config;
    config.relaxation.nodes = 2;

    config.family = FamilyPoint{1.0, 1.0};
    const PipelineResult tsirelson = activation_pipeline(family_box(*config.family), config);
    CHECK_FALSE(tsirelson.activation_needed);
    CHECK(tsirelson.before.rate_lower > 0.0);
    CHECK_FALSE(tsirelson.after.has_value());

    config.family = FamilyPoint{0.0, 1.0};
    const PipelineResult classical = activation_pipeline(family_box(*config.family), config);
    CHECK(classical.activation_needed);
    CHECK_FALSE(classical.activated);
    REQUIRE(classical.after.has_value());
    CHECK(classical.after->rate_lower <= 1e-6);
    CHECK(classical.search->s_after == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(activation_pipeline(pr_box(), config), ShapeMismatch);
}
