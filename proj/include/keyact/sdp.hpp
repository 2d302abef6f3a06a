#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace keyact::sdp {

/// One upper-triangular (row <= col) nonzero of a constraint matrix; 0-based.
struct Entry {
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Semidefinite program in SDPA orientation:
///
///   minimize   c^T y + offset
///   subject to S = sum_i y_i F_i - F_0  is PSD (block diagonal),
///
/// whose dual is  maximize F_0 . X + offset  s.t.  F_i . X = c_i, X PSD.
///
/// A negative block size marks a diagonal (LP) block as in the SDPA format.
struct Problem {
    std::vector<int> block_sizes;
    std::vector<double> c;
    /// matrices[0] is F_0; matrices[i] belongs to y_i (1-based, as in SDPA).
    std::vector<std::vector<Entry>> matrices;
    double offset = 0.0;

    int num_vars() const { return static_cast<int>(c.size()); }
};

enum class Status { Optimal, NearOptimal, MaxIterations, NumericalError };

std::string to_string(Status s);

struct Settings {
    double tolerance = 1e-8;
    int max_iterations = 100;
    double step_fraction = 0.95;
    bool verbose = false;
    /// When positive, adds tr X <= trace_bound. Restricting the maximisation keeps
    /// F_0 . X a valid lower bound and keeps X bounded on problems whose moment
    /// side has no interior point.
    double trace_bound = 0.0;
};

struct Result {
    Status status = Status::NumericalError;
    /// F_0 . X + offset: a valid lower bound on the minimum when X is feasible.
    double primal_objective = 0.0;
    /// c^T y + offset.
    double dual_objective = 0.0;
    /// max_i |F_i . X - c_i| / (1 + max|c|).
    double primal_residual = 0.0;
    /// ||sum y F - F_0 - S||_F / (1 + ||F_0||_F).
    double dual_residual = 0.0;
    double relative_gap = 0.0;
    int iterations = 0;
    std::vector<double> y;
    std::vector<Eigen::MatrixXd> x;
    std::vector<Eigen::MatrixXd> s;
};

/// Primal-dual path-following interior-point method (HKM direction with a
/// Mehrotra predictor-corrector step).
Result solve(const Problem& problem, const Settings& settings = {});

/// Throws ShapeMismatch when entries fall outside their block or are
/// off-diagonal inside a diagonal block.
void check_problem(const Problem& problem);

}  // namespace keyact::sdp
