#pragma once

#include <array>
#include <optional>
#include <string>

#include "keyact/boxes.hpp"

namespace keyact {

/// <A_x B_y> = sum_{ab} (-1)^{a xor b} P(ab|xy).
double correlator(const Box& b, int x, int y);

/// Sign pattern of a CHSH expression sum_{xy} s_xy <A_x B_y>, each s_xy = +-1.
struct ChshSigns {
    std::array<int, 4> s{1, -1, 1, 1};  // (00, 01, 10, 11)
    friend bool operator==(const ChshSigns&, const ChshSigns&) = default;
};

inline constexpr ChshSigns kCanonicalChsh{};

double signed_chsh(const Box& b, const ChshSigns& signs = kCanonicalChsh);
/// |<A0B0> - <A0B1> + <A1B0> + <A1B1>|.
double chsh(const Box& b);

/// P(a != b | x = 0, y = 2).
double qber(const Box& b);

/// Binary entropy in bits; h(0) = h(1) = 0.
double binary_entropy(double p);

/// h[1 - alpha (1 - v) / 2], the key-setting error term of a family box.
double error_term_family(const FamilyPoint& p);

/// H(A|B) in bits at settings (x, y), computed from the joint table.
double cond_entropy_ab(const Box& b, int x = 0, int y = 2);

/// h[((1 - alpha (1 - v))^2 + 1) / 2], the key-setting error after two-copy XOR wiring.
double wired_error_term(const FamilyPoint& p);

/// Devetak-Winter rate H(A|E) - H(A|B).
inline double dw_rate(double h_ae, double h_ab) { return h_ae - h_ab; }

struct RateMeta {
    int nodes = 0;
    int npa_level = 0;
    std::string solver_status;
    double solver_tolerance = 0.0;
};

struct RateReport {
    double chsh = 0.0;
    double qber = 0.0;
    double h_ae_lower = 0.0;
    std::optional<double> h_cc_upper;
    double h_ab = 0.0;
    double rate_lower = 0.0;
    std::optional<double> rate_upper;
    RateMeta meta;
};

/// Fills chsh, qber, h_ab and both rates from the entropy terms.
RateReport assemble_report(const Box& b, double h_ae_lower, std::optional<double> h_cc_upper, RateMeta meta);

}  // namespace keyact
