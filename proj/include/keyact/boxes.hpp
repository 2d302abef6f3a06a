#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace keyact {

inline constexpr double kProbabilityTolerance = 1e-9;

/// Input/output cardinalities of a bipartite box.
///
/// Elementary boxes always have binary outcomes. Composite boxes produced by
/// `product` carry the joint outcome (a1, a2) as a single index, so na/nb may
/// exceed 2 there.
struct Scenario {
    int nx = 2;
    int ny = 2;
    int na = 2;
    int nb = 2;

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(nx) * ny * na * nb;
    }
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Immutable conditional distribution P(ab|xy), stored row-major as [x][y][a][b].
class Box {
public:
    /// Validates and normalizes `table`; see make_box.
    Box(Scenario scenario, std::vector<double> table);

    const Scenario& scenario() const noexcept { return scenario_; }
    std::span<const double> table() const noexcept { return table_; }

    double operator()(int x, int y, int a, int b) const noexcept {
        return table_[index(x, y, a, b)];
    }
    std::size_t index(int x, int y, int a, int b) const noexcept {
        return ((static_cast<std::size_t>(x) * scenario_.ny + y) * scenario_.na + a) * scenario_.nb + b;
    }

    double marginal_a(int x, int y, int a) const noexcept;
    double marginal_b(int x, int y, int b) const noexcept;

    /// Sub-box on the first `nx` Alice and `ny` Bob settings.
    Box restrict_inputs(int nx, int ny) const;

private:
    Scenario scenario_;
    std::vector<double> table_;
};

/// Builds a validated box. Entries within 1e-9 of [0,1] are clamped.
/// Throws NegativeProbability or NotNormalized naming the offending (x, y).
Box make_box(Scenario scenario, std::vector<double> table);

/// Parameters (alpha, v) of the noisy-singlet family; both in [0, 1].
struct FamilyPoint {
    double alpha = 0.0;
    double v = 0.0;
};

void check_family_point(const FamilyPoint& p);

/// Weights of the PR-box / white-noise / correlated-box decomposition of the
/// Bell part of a family box.
struct MixtureWeights {
    double p_pr = 0.0;
    double p_0 = 0.0;
    double p_c = 0.0;
};

Box pr_box();
Box white_noise(Scenario scenario = {2, 3, 2, 2});
Box correlated_box(Scenario scenario = {2, 3, 2, 2});
/// Noiseless quantum box, the Born-rule box at (alpha, v) = (1, 1).
Box tsirelson_box();

/// alpha v P_T + alpha (1 - v) P_0 + (1 - alpha) P_C on the 2x3 scenario.
Box family_box(const FamilyPoint& p);

/// Convex combination sum_i w_i b_i of boxes sharing a scenario.
Box mix(std::span<const double> weights, std::span<const Box> boxes);

MixtureWeights to_mixture(const FamilyPoint& p);
/// Inverse of to_mixture. Throws NotRepresentable when no (alpha, v) in [0,1]^2 fits.
FamilyPoint from_mixture(const MixtureWeights& w);

/// Two independent copies as one box; copy 1 is the most significant index.
Box product(const Box& first, const Box& second);

struct NoSignallingReport {
    bool ok = true;
    double max_deviation = 0.0;
};

NoSignallingReport is_no_signalling(const Box& b, double tol = kProbabilityTolerance);

/// Largest entrywise absolute difference; scenarios must match.
double max_abs_difference(const Box& lhs, const Box& rhs);

}  // namespace keyact
