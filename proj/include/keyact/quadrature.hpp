#pragma once

#include <vector>

namespace keyact {

/// Gauss-Radau rule on [0,1] with the fixed node t = 1, unit weight function.
struct QuadratureRule {
    int m = 0;
    std::vector<double> nodes;    // strictly increasing, nodes.back() == 1
    std::vector<double> weights;  // positive, summing to 1
    /// sum_{i < m} w_i / (t_i ln 2), i.e. every node except t = 1.
    double c_m = 0.0;
};

/// Built from the Legendre Jacobi matrix with its last diagonal entry modified
/// so that the endpoint becomes an eigenvalue (Golub 1973).
/// Exact for polynomials of degree <= 2m - 2. Throws DomainError for m < 2.
QuadratureRule gauss_radau(int m);

}  // namespace keyact
