#pragma once

#include <string>
#include <vector>

#include "keyact/boxes.hpp"
#include "keyact/npa.hpp"
#include "keyact/quadrature.hpp"
#include "keyact/sdp.hpp"

namespace keyact::entropy {

/// Which observed statistics are imposed on the moment matrix.
enum class ConstraintMode {
    Full,    // every <M_A^{x,0} M_B^{y,0}> plus marginals
    Coarse,  // only the CHSH value and the QBER
};

/// How Eve's operators enter the monomial basis.
enum class EveBasis {
    /// Level-n words over the projectors plus Z, Z*, M_A Z, M_A Z*, M_B Z, M_B Z*.
    Compact,
    /// Level-n words over projectors and Z letters, plus M_A M_B Z, M_A M_B Z*
    /// and M_A^{0,0} Z* Z.
    Extended,
};

struct RelaxationConfig {
    int nodes = 12;
    int level = 2;
    ConstraintMode mode = ConstraintMode::Full;
    EveBasis eve_basis = EveBasis::Extended;
};

/// Affine expression const + sum coeff * y_var.
struct Affine {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;
};

/// NPA relaxation of the quadrature objective. One SDP per node t_i < 1; all
/// nodes share the moment matrix and constraints and differ in the objective.
struct Relaxation {
    RelaxationConfig config;
    QuadratureRule rule;
    npa::MomentMatrix moments;
    /// Affine expression of each moment id in the free SDP variables.
    std::vector<Affine> moment_values;
    int num_vars = 0;
    /// Number of observed-statistics equalities, including <1> = 1.
    int distribution_constraints = 0;
    /// Objective for node i as a reduced polynomial.
    std::vector<npa::Polynomial> node_objectives;

    /// SDP (SDPA orientation) whose minimum is the infimum for node `node`.
    sdp::Problem problem(int node) const;
    int num_nodes() const { return static_cast<int>(node_objectives.size()); }
};

/// Node weight w_i / (t_i ln 2).
double node_weight(const QuadratureRule& rule, int node);

Relaxation build_relaxation(const Box& b, const RelaxationConfig& config = {});

struct EntropyBound {
    /// Lower bound on H(A|E, X=0) in bits.
    double value = 0.0;
    /// Per-node infima, each lowered by its duality gap plus tolerance * (1 + |value|).
    std::vector<double> node_values;
    sdp::Status status = sdp::Status::Optimal;
    double max_primal_residual = 0.0;
    double max_dual_residual = 0.0;
    double max_gap = 0.0;
    int nodes = 0;
    int level = 0;
    double tolerance = 0.0;
};

struct SolverConfig {
    /// The trace bound keeps the certificate finite at extremal boxes (e.g. the
    /// Tsirelson and correlated boxes) where the moment matrix is rank deficient;
    /// certificates of interior boxes have trace O(10).
    sdp::Settings sdp{.trace_bound = 1e3};
    /// Residual of the certificate X above which NumericalInstability is raised.
    double residual_threshold = 1e-7;
    /// Relative gap above which a non-converged solve is a SolverFailure.
    double max_gap = 1e-4;
    /// Trace bound used by guessing_probability, whose certificate scales differently.
    double guessing_trace_bound = 1e5;
};

/// Solves every node SDP and combines the results with the quadrature weights.
/// Throws SolverFailure / NumericalInstability.
EntropyBound solve_relaxation(const Relaxation& r, const SolverConfig& solver = {});

EntropyBound entropy_lower_bound(const Box& b, const RelaxationConfig& config = {}, const SolverConfig& solver = {});

struct GuessingResult {
    double p_guess = 1.0;
    double h_min = 0.0;
    sdp::Status status = sdp::Status::Optimal;
};

/// Eve's guessing probability of Alice's x = 0 outcome, bounded through a
/// level-n decomposition of the box into Eve-labelled sub-normalised boxes.
GuessingResult guessing_probability(const Box& b, int level = 2, const SolverConfig& solver = {});

/// Writes node `node` of the relaxation in SDPA sparse format.
void export_sdpa(const Relaxation& r, int node, const std::string& path);

}  // namespace keyact::entropy
