#include "keyact/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "keyact/error.hpp"
#include "keyact/rates.hpp"
#include "keyact/wirings.hpp"

namespace keyact {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLocalVisibility = 1.0 / std::numbers::sqrt2;

}  // namespace

CCDecomposition cc_decompose(const FamilyPoint& p) {
    check_family_point(p);
    CCDecomposition d;
    d.q_c = 1.0 - p.alpha;
    d.q_nl1 = h_cc(p);
    d.q_loc = p.alpha - d.q_nl1;
    d.h_cc = d.q_nl1;
    return d;
}

Box cc_reconstruct(const CCDecomposition& d) {
    const std::vector<Box> parts{family_box({1.0, 1.0}), family_box({1.0, kLocalVisibility}), correlated_box()};
    const std::vector<double> w{d.q_nl1, d.q_loc, d.q_c};
    return mix(w, parts);
}

double h_cc(const FamilyPoint& p) {
    check_family_point(p);
    if (p.v <= kLocalVisibility) return 0.0;
    // Nonlocal fraction of the Bell part; exactly 1 at v = 1.
    return p.alpha * std::min(1.0, (kSqrt2 * p.v - 1.0) / (kSqrt2 - 1.0));
}

double xor_key_agreement(const FamilyPoint& p, int copies) {
    const Box b = family_box(p);
    const std::vector<Box> boxes(copies, b);
    const Box wired = apply_wiring(xor_pair(copies), boxes);
    return 1.0 - qber(wired);
}

double cc_rate_upper(const FamilyPoint& p, int copies) {
    check_family_point(p);
    switch (copies) {
        case 1:
            return h_cc(p) - error_term_family(p);
        case 2:
            return h_cc(wired_params(p, 2)) - wired_error_term(p);
        case 3:
            return h_cc(wired_params(p, 3)) - binary_entropy(xor_key_agreement(p, 3));
        default:
            throw DomainError("the attack covers 1 to 3 copies");
    }
}

double cc_boundary(double alpha, int copies, double tolerance) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
    double lo = kLocalVisibility, hi = 1.0;
    const double f_lo = cc_rate_upper({alpha, lo}, copies);
    const double f_hi = cc_rate_upper({alpha, hi}, copies);
    if ((f_lo > 0.0) == (f_hi > 0.0)) throw NoRoot("attack rate has one sign on [1/sqrt 2, 1]");
    const bool rising = f_hi > 0.0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const bool positive = cc_rate_upper({alpha, mid}, copies) > 0.0;
        (positive == rising ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace keyact
