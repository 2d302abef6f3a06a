#include "keyact/boxes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "keyact/error.hpp"
#include "keyact/quantum.hpp"

namespace keyact {

Box::Box(Scenario scenario, std::vector<double> table) : scenario_(scenario), table_(std::move(table)) {
    const Scenario& s = scenario_;
    if (s.nx < 1 || s.ny < 1 || s.na < 1 || s.nb < 1)
        throw ShapeMismatch("box cardinalities must be positive");
    if (table_.size() != s.size()) {
        std::ostringstream msg;
        msg << "box table has " << table_.size() << " entries, expected " << s.size();
        throw ShapeMismatch(msg.str());
    }
    for (double& p : table_) {
        if (!std::isfinite(p) || p < -kProbabilityTolerance) {
            std::ostringstream msg;
            msg << "negative or non-finite probability " << p;
            throw NegativeProbability(msg.str());
        }
        if (p > 1.0 + kProbabilityTolerance) {
            std::ostringstream msg;
            msg << "probability " << p << " exceeds 1";
            throw NotNormalized(msg.str());
        }
        p = std::clamp(p, 0.0, 1.0);
    }
    for (int x = 0; x < s.nx; ++x) {
        for (int y = 0; y < s.ny; ++y) {
            double sum = 0.0;
            for (int a = 0; a < s.na; ++a)
                for (int b = 0; b < s.nb; ++b) sum += table_[index(x, y, a, b)];
            if (std::abs(sum - 1.0) > kProbabilityTolerance) {
                std::ostringstream msg;
                msg << "distribution at (x=" << x << ", y=" << y << ") sums to " << sum << " (deviation "
                    << sum - 1.0 << ")";
                throw NotNormalized(msg.str());
            }
        }
    }
}

double Box::marginal_a(int x, int y, int a) const noexcept {
    double sum = 0.0;
    for (int b = 0; b < scenario_.nb; ++b) sum += (*this)(x, y, a, b);
    return sum;
}

double Box::marginal_b(int x, int y, int b) const noexcept {
    double sum = 0.0;
    for (int a = 0; a < scenario_.na; ++a) sum += (*this)(x, y, a, b);
    return sum;
}

Box Box::restrict_inputs(int nx, int ny) const {
    if (nx < 1 || ny < 1 || nx > scenario_.nx || ny > scenario_.ny)
        throw ScenarioTooSmall("cannot restrict box to the requested settings");
    const Scenario s{nx, ny, scenario_.na, scenario_.nb};
    std::vector<double> table;
    table.reserve(s.size());
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int a = 0; a < s.na; ++a)
                for (int b = 0; b < s.nb; ++b) table.push_back((*this)(x, y, a, b));
    return Box(s, std::move(table));
}

Box make_box(Scenario scenario, std::vector<double> table) {
    return Box(scenario, std::move(table));
}

void check_family_point(const FamilyPoint& p) {
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0) || !(p.v >= 0.0 && p.v <= 1.0))
        throw DomainError("family point (alpha, v) must lie in [0,1]^2");
}

Box pr_box() {
    const Scenario s{2, 2, 2, 2};
    std::vector<double> table(s.size(), 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if ((a ^ b) == ((x ^ 1) & y)) table[((x * 2 + y) * 2 + a) * 2 + b] = 0.5;
    return Box(s, std::move(table));
}

Box white_noise(Scenario scenario) {
    const double p = 1.0 / (scenario.na * scenario.nb);
    return Box(scenario, std::vector<double>(scenario.size(), p));
}

Box correlated_box(Scenario scenario) {
    if (scenario.na != 2 || scenario.nb != 2) throw ShapeMismatch("correlated box needs binary outcomes");
    std::vector<double> table(scenario.size(), 0.0);
    for (std::size_t i = 0; i < table.size(); i += 4) {
        table[i] = 0.5;
        table[i + 3] = 0.5;
    }
    return Box(scenario, std::move(table));
}

Box tsirelson_box() {
    return quantum::born_box(quantum::build_state({1.0, 1.0}), quantum::observables());
}

Box mix(std::span<const double> weights, std::span<const Box> boxes) {
    if (weights.size() != boxes.size() || boxes.empty()) throw ShapeMismatch("mix needs one weight per box");
    const Scenario s = boxes.front().scenario();
    std::vector<double> table(s.size(), 0.0);
    for (std::size_t k = 0; k < boxes.size(); ++k) {
        if (!(boxes[k].scenario() == s)) throw ShapeMismatch("mixed boxes must share a scenario");
        const auto t = boxes[k].table();
        for (std::size_t i = 0; i < table.size(); ++i) table[i] += weights[k] * t[i];
    }
    return Box(s, std::move(table));
}

Box family_box(const FamilyPoint& p) {
    check_family_point(p);
    static const Box tsirelson = tsirelson_box();
    const Box parts[] = {tsirelson, white_noise(), correlated_box()};
    const double weights[] = {p.alpha * p.v, p.alpha * (1.0 - p.v), 1.0 - p.alpha};
    return mix(weights, parts);
}

MixtureWeights to_mixture(const FamilyPoint& p) {
    check_family_point(p);
    const double w = p.v / std::numbers::sqrt2;
    return {p.alpha * w, p.alpha * (1.0 - w), 1.0 - p.alpha};
}

FamilyPoint from_mixture(const MixtureWeights& w) {
    constexpr double tol = 1e-12;
    if (w.p_pr < -tol || w.p_0 < -tol || w.p_c < -tol || std::abs(w.p_pr + w.p_0 + w.p_c - 1.0) > tol)
        throw NotRepresentable("mixture weights are not a probability vector");
    const double alpha = std::clamp(1.0 - w.p_c, 0.0, 1.0);
    if (alpha <= tol) {
        if (w.p_pr > tol) throw NotRepresentable("PR weight without a nonlocal part");
        return {alpha, 0.0};
    }
    const double v = std::numbers::sqrt2 * std::max(w.p_pr, 0.0) / alpha;
    if (v > 1.0 + 1e-12)
        throw NotRepresentable("PR fraction exceeds 1/sqrt(2) of the non-correlated weight");
    return {alpha, std::min(v, 1.0)};
}

Box product(const Box& first, const Box& second) {
    const Scenario& s1 = first.scenario();
    const Scenario& s2 = second.scenario();
    const Scenario s{s1.nx * s2.nx, s1.ny * s2.ny, s1.na * s2.na, s1.nb * s2.nb};
    std::vector<double> table(s.size());
    for (int x1 = 0; x1 < s1.nx; ++x1)
        for (int x2 = 0; x2 < s2.nx; ++x2)
            for (int y1 = 0; y1 < s1.ny; ++y1)
                for (int y2 = 0; y2 < s2.ny; ++y2)
                    for (int a1 = 0; a1 < s1.na; ++a1)
                        for (int a2 = 0; a2 < s2.na; ++a2)
                            for (int b1 = 0; b1 < s1.nb; ++b1)
                                for (int b2 = 0; b2 < s2.nb; ++b2) {
                                    const int x = x1 * s2.nx + x2;
                                    const int y = y1 * s2.ny + y2;
                                    const int a = a1 * s2.na + a2;
                                    const int b = b1 * s2.nb + b2;
                                    table[((static_cast<std::size_t>(x) * s.ny + y) * s.na + a) * s.nb + b] =
                                        first(x1, y1, a1, b1) * second(x2, y2, a2, b2);
                                }
    return Box(s, std::move(table));
}

NoSignallingReport is_no_signalling(const Box& b, double tol) {
    const Scenario& s = b.scenario();
    double dev = 0.0;
    for (int x = 0; x < s.nx; ++x)
        for (int a = 0; a < s.na; ++a)
            for (int y = 1; y < s.ny; ++y)
                dev = std::max(dev, std::abs(b.marginal_a(x, y, a) - b.marginal_a(x, 0, a)));
    for (int y = 0; y < s.ny; ++y)
        for (int bb = 0; bb < s.nb; ++bb)
            for (int x = 1; x < s.nx; ++x)
                dev = std::max(dev, std::abs(b.marginal_b(x, y, bb) - b.marginal_b(0, y, bb)));
    return {dev <= tol, dev};
}

double max_abs_difference(const Box& lhs, const Box& rhs) {
    if (!(lhs.scenario() == rhs.scenario())) throw ShapeMismatch("boxes have different scenarios");
    double d = 0.0;
    for (std::size_t i = 0; i < lhs.table().size(); ++i) d = std::max(d, std::abs(lhs.table()[i] - rhs.table()[i]));
    return d;
}

}  // namespace keyact
