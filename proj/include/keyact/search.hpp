#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "keyact/boxes.hpp"
#include "keyact/entropy.hpp"
#include "keyact/quantum.hpp"
#include "keyact/rates.hpp"
#include "keyact/wirings.hpp"

namespace keyact {

struct ChshVariant {
    ChshSigns signs;
    double value = 0.0;
};

/// The 8 CHSH expressions obtained by relabelling inputs and outputs:
/// the odd sign may sit on any of the 4 terms, and the overall sign flips.
std::array<ChshSigns, 8> chsh_variants();

/// Variant maximally violated by the Bell part of b (first maximum in
/// chsh_variants() order on ties).
ChshVariant best_chsh_variant(const Box& b);

/// Nonzero term of a wired correlator: one supported history per party at
/// final settings (x, y), weighted by the sign of the final outputs.
struct SupportTerm {
    int x = 0;
    int y = 0;
    const Wiring::SupportEntry* alice = nullptr;
    const Wiring::SupportEntry* bob = nullptr;
    int sign = 1;
};

/// Terms of one (chi, xi) pair.
std::vector<SupportTerm> support_terms(const Wiring& chi, const Wiring& xi, int x = 0, int y = 0);
/// The support Lambda of a full pair: the terms of every (x, y) combination.
std::vector<SupportTerm> support_set(const WiringPair& pair);

/// Correlator <A B> of the box obtained by wiring two copies of b with chi and xi.
double wired_correlator(const Box& b, const Wiring& chi, const Wiring& xi);

struct SearchOptions {
    /// Wirings to scan per setting; default: the non-constant 2-input catalog.
    std::optional<std::vector<Wiring>> catalog;
    /// Scan every CHSH variant rather than the one b violates most.
    bool all_variants = false;
    /// Worker threads; 0 picks KEYACT_THREADS or the hardware concurrency.
    int threads = 0;
};

struct SearchResult {
    /// Catalog indices (chi_0, chi_1, xi_0, xi_1).
    std::array<int, 4> best{};
    /// The same wirings, with their class and label.
    std::vector<Wiring> wirings;
    ChshSigns signs;
    double s_before = 0.0;
    double s_after = 0.0;
    /// C[i][j] = wired correlator for Alice wiring i and Bob wiring j.
    std::vector<std::vector<double>> correlator_table;
    std::size_t catalog_size = 0;
    double elapsed_seconds = 0.0;
};

/// Exhaustive search for the wiring pair maximizing the CHSH value of two
/// wired copies of b's Bell part. Ties go to the lexicographically smallest
/// (chi_0, chi_1, xi_0, xi_1).
SearchResult distill_search(const Box& b, const SearchOptions& options = {});

/// Non-constant 2-input wirings (80 entries).
std::vector<Wiring> nonconstant_catalog_2in();

struct KeyWiringResult {
    Wiring wiring;
    int index = 0;
    double p_agree = 0.0;
    /// Catalog indices attaining the maximum within 1e-12.
    std::vector<int> maximizers;
};

/// Bob's 3-input wiring maximizing P'(a = b | x = 0, y = 2) for two copies of
/// the 2x3 box b, given Alice's wiring of her key setting.
KeyWiringResult optimize_key_wiring(const Box& b, const Wiring& alice_key_wiring);
KeyWiringResult optimize_key_wiring(const Box& b);

struct PipelineConfig {
    entropy::RelaxationConfig relaxation;
    entropy::SolverConfig solver;
    SearchOptions search;
    /// Stop after the single-copy bound when it is already positive.
    bool skip_if_positive = true;
    /// Family parameters of b, when known, to report the attack bound.
    std::optional<FamilyPoint> family;
};

struct PipelineResult {
    RateReport before;
    std::optional<RateReport> after;
    std::optional<SearchResult> search;
    std::optional<KeyWiringResult> key_wiring;
    std::optional<WiringPair> wiring;
    std::optional<Box> wired_box;
    bool activation_needed = true;
    bool activated = false;
};

PipelineResult activation_pipeline(const Box& b, const PipelineConfig& config = {});

struct Candidate {
    FamilyPoint point;
    quantum::MeasurementAngles angles;
    Box box;
};

/// Reproducible candidate boxes near the quantum boundary: family points with
/// small white-noise weight, measured with slightly perturbed angles.
std::vector<Candidate> sample_candidates(int n, std::uint64_t seed);

/// Worker count from KEYACT_THREADS, else the hardware concurrency.
int default_thread_count();

}  // namespace keyact
