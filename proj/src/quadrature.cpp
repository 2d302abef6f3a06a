#include "keyact/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "keyact/error.hpp"

namespace keyact {

QuadratureRule gauss_radau(int m) {
    if (m < 2) throw DomainError("Gauss-Radau rule needs at least two nodes");

    // Legendre recurrence on [-1, 1]: diagonal 0, off-diagonal k / sqrt(4k^2 - 1).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd off(m - 1);
    for (int k = 1; k < m; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);

    // Place an eigenvalue at x0 = 1: solve (J_{m-1} - x0 I) d = b_{m-1}^2 e_{m-1}
    // and set the last diagonal entry to x0 + d_{m-1}.
    const double x0 = 1.0;
    Eigen::MatrixXd lead = Eigen::MatrixXd::Zero(m - 1, m - 1);
    for (int k = 0; k < m - 1; ++k) {
        lead(k, k) = diag[k] - x0;
        if (k + 1 < m - 1) lead(k, k + 1) = lead(k + 1, k) = off[k];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m - 1);
    rhs[m - 2] = off[m - 2] * off[m - 2];
    const Eigen::VectorXd d = lead.partialPivLu().solve(rhs);
    diag[m - 1] = x0 + d[m - 2];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);

    QuadratureRule rule;
    rule.m = m;
    const double mu0 = 2.0;
    for (int i = 0; i < m; ++i) {
        const double x = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        rule.nodes.push_back((x + 1.0) / 2.0);
        rule.weights.push_back(mu0 * v0 * v0 / 2.0);
    }
    // The fixed endpoint is exact by construction; remove eigensolver rounding.
    rule.nodes.back() = 1.0;
    for (int i = 0; i + 1 < m; ++i) rule.c_m += rule.weights[i] / (rule.nodes[i] * std::numbers::ln2);
    return rule;
}

}  // namespace keyact
