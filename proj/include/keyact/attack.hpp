#pragma once

#include "keyact/boxes.hpp"

namespace keyact {

/// Split of a family box into a maximally nonlocal part (v = 1), the most
/// noisy box that is still local (v = 1/sqrt 2) and the correlated box.
struct CCDecomposition {
    double q_nl1 = 0.0;
    double q_loc = 0.0;
    double q_c = 0.0;
    /// Eve's uncertainty about Alice's key outcome under this attack.
    double h_cc = 0.0;
};

/// Below v = 1/sqrt 2 the whole alpha weight is local.
CCDecomposition cc_decompose(const FamilyPoint& p);

/// Reassembles the mixture q_nl1 P(alpha=1, v=1) + q_loc P(1, 1/sqrt 2) + q_c P_C.
Box cc_reconstruct(const CCDecomposition& d);

/// alpha (sqrt2 v - 1) / (sqrt2 - 1), clamped to [0, alpha].
double h_cc(const FamilyPoint& p);

/// Upper bound on the key rate under the attack, for 1 to 3 XOR-wired copies;
/// the attack is evaluated on the wired family parameters.
double cc_rate_upper(const FamilyPoint& p, int copies = 1);

/// v in [1/sqrt 2, 1] where cc_rate_upper crosses zero (bisection, 1e-8).
/// Throws NoRoot if the rate has one sign on the whole interval.
double cc_boundary(double alpha, int copies = 1, double tolerance = 1e-8);

/// Probability that Alice's and Bob's outputs agree at the key settings after
/// XOR-wiring `copies` family boxes, computed with the wiring engine.
double xor_key_agreement(const FamilyPoint& p, int copies);

}  // namespace keyact
