#include "keyact/rates.hpp"

#include <cmath>

#include "keyact/error.hpp"

namespace keyact {

double correlator(const Box& b, int x, int y) {
    const Scenario& s = b.scenario();
    if (x < 0 || y < 0 || x >= s.nx || y >= s.ny) throw IndexOutOfRange("correlator setting out of range");
    if (s.na != 2 || s.nb != 2) throw ShapeMismatch("correlator needs binary outcomes");
    return b(x, y, 0, 0) + b(x, y, 1, 1) - b(x, y, 0, 1) - b(x, y, 1, 0);
}

double signed_chsh(const Box& b, const ChshSigns& signs) {
    if (b.scenario().nx < 2 || b.scenario().ny < 2) throw ScenarioTooSmall("CHSH needs two settings per party");
    double s = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) s += signs.s[x * 2 + y] * correlator(b, x, y);
    return s;
}

double chsh(const Box& b) { return std::abs(signed_chsh(b, kCanonicalChsh)); }

double qber(const Box& b) {
    if (b.scenario().nx < 1 || b.scenario().ny < 3) throw ScenarioTooSmall("QBER needs Bob's key setting y=2");
    return b(0, 2, 0, 1) + b(0, 2, 1, 0);
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary entropy argument outside [0,1]");
    auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
    return term(p) + term(1.0 - p);
}

double error_term_family(const FamilyPoint& p) {
    check_family_point(p);
    return binary_entropy(1.0 - p.alpha * (1.0 - p.v) / 2.0);
}

double cond_entropy_ab(const Box& b, int x, int y) {
    const Scenario& s = b.scenario();
    if (x >= s.nx || y >= s.ny) throw ScenarioTooSmall("settings not present in box");
    // H(A|B) = H(AB) - H(B)
    double h_ab = 0.0;
    double h_b = 0.0;
    for (int bb = 0; bb < s.nb; ++bb) {
        double pb = 0.0;
        for (int a = 0; a < s.na; ++a) {
            const double p = b(x, y, a, bb);
            pb += p;
            if (p > 0.0) h_ab -= p * std::log2(p);
        }
        if (pb > 0.0) h_b -= pb * std::log2(pb);
    }
    return h_ab - h_b;
}

double wired_error_term(const FamilyPoint& p) {
    check_family_point(p);
    const double beta = std::pow(1.0 - p.alpha * (1.0 - p.v), 2);
    return binary_entropy((beta + 1.0) / 2.0);
}

RateReport assemble_report(const Box& b, double h_ae_lower, std::optional<double> h_cc_upper, RateMeta meta) {
    RateReport r;
    r.chsh = chsh(b);
    r.qber = qber(b);
    r.h_ab = cond_entropy_ab(b, 0, 2);
    r.h_ae_lower = h_ae_lower;
    r.rate_lower = dw_rate(h_ae_lower, r.h_ab);
    r.h_cc_upper = h_cc_upper;
    if (h_cc_upper) r.rate_upper = dw_rate(*h_cc_upper, r.h_ab);
    r.meta = std::move(meta);
    return r;
}

}  // namespace keyact
