#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "keyact/boxes.hpp"

namespace keyact {

enum class WiringClass { Constant, OneSided, Xor, And, Sequential, Custom };

std::string to_string(WiringClass c);
WiringClass wiring_class_from_string(const std::string& name);

/// Generator parameters (mu, nu, tau, sigma, delta, epsilon); unused ones are 0.
using WiringParams = std::array<int, 6>;

/// Deterministic local wiring of k boxes for one final input.
///
/// The indicator chi(a, x_1..x_k, a_1..a_k) is stored densely, indexed
/// [a][x-tuple][a-tuple] with copy 1 the most significant digit of each tuple.
class Wiring {
public:
    struct SupportEntry {
        int output;
        std::vector<int> inputs;
        std::vector<int> outcomes;
    };

    Wiring(std::vector<int> side_inputs, std::vector<std::uint8_t> table, WiringClass cls = WiringClass::Custom,
           int label = 0, WiringParams params = {});

    int copies() const { return static_cast<int>(side_inputs_.size()); }
    const std::vector<int>& side_inputs() const { return side_inputs_; }
    int input_histories() const { return input_histories_; }
    int outcome_histories() const { return 1 << copies(); }

    bool at(int a, int input_history, int outcome_history) const {
        return table_[(static_cast<std::size_t>(a) * input_histories_ + input_history) * outcome_histories() +
                      outcome_history] != 0;
    }
    const std::vector<std::uint8_t>& table() const { return table_; }
    /// Histories with indicator 1, decoded per copy.
    const std::vector<SupportEntry>& support() const { return support_; }

    WiringClass wiring_class() const { return class_; }
    int label() const { return label_; }
    const WiringParams& params() const { return params_; }

    /// Same wiring acting on boxes with more inputs per copy; extra inputs are never used.
    Wiring with_side_inputs(int inputs) const;

    std::string describe() const;

    friend bool operator==(const Wiring& a, const Wiring& b) {
        return a.side_inputs_ == b.side_inputs_ && a.table_ == b.table_;
    }

private:
    std::vector<int> side_inputs_;
    int input_histories_ = 1;
    std::vector<std::uint8_t> table_;
    std::vector<SupportEntry> support_;
    WiringClass class_;
    int label_;
    WiringParams params_;
};

// Generators for two-copy wirings with `inputs` settings per box; labels follow
// the 2-input (inputs == 2) or 3-input (inputs == 3) label scheme.
Wiring constant_wiring(int inputs, int mu, int value);
Wiring one_sided_wiring(int inputs, int mu, int which, int sigma);
Wiring xor_wiring(int inputs, int mu, int nu, int sigma);
Wiring and_wiring(int inputs, int mu, int nu, int sigma, int delta, int epsilon);
/// First box `first` gets input nu; the other gets (a_first xor sigma) + shift mod inputs;
/// output a_other xor delta a_first xor epsilon.
Wiring sequential_wiring(int inputs, int first, int nu, int sigma, int delta, int epsilon, int shift = 0);

/// Parallel XOR over k copies: every copy gets `input`, output is the parity.
Wiring parallel_xor_wiring(int copies, int inputs, int input);

/// Every generated 2-input wiring before deduplication (84 entries).
std::vector<Wiring> catalog_2in_all();
/// The 82 distinct extremal 2-input wirings: duplicates by action on every
/// no-signalling box (the constants with different unused inputs) are removed.
const std::vector<Wiring>& catalog_2in();
/// The 252 3-input wirings generated from the 3-input label table.
const std::vector<Wiring>& catalog_3in();

/// Alice's wiring per final input x and Bob's per final input y.
struct WiringPair {
    std::vector<Wiring> alice;
    std::vector<Wiring> bob;
};

enum class ValidationMethod { Auto, Vertices, LinearProgram };

struct WiringValidation {
    bool valid = true;
    std::string violation;
    double min_output = 0.0;  // min over outputs a and NS boxes of the output probability
    double max_output = 1.0;
    double min_total = 1.0;   // range of the total probability
    double max_total = 1.0;
};

/// Checks determinism and that the wiring maps every no-signalling k-box to a
/// normalised distribution. Two 2-input copies are checked on the 24 extremal
/// boxes; everything else through linear programs over the NS polytope.
WiringValidation validate_wiring(const Wiring& w, ValidationMethod method = ValidationMethod::Auto);
/// Throws InvalidWiring naming the violated condition.
void check_wiring(const Wiring& w);

/// The 24 extremal no-signalling boxes of the (2,2;2,2) scenario.
const std::vector<Box>& ns_vertices_2x2();

/// Wired box P'(ab|xy) over copies.size() == k boxes.
Box apply_wiring(const WiringPair& pair, std::span<const Box> copies);

/// XOR wiring on k copies for every final input (Bob includes the key setting).
WiringPair xor_pair(int copies, Scenario scenario = {2, 3, 2, 2});

MixtureWeights compose_mixture(const MixtureWeights& first, const MixtureWeights& second);

/// Family parameters of the Bell part after XOR-wiring k in {2, 3} copies.
FamilyPoint wired_params(const FamilyPoint& p, int copies);

}  // namespace keyact
