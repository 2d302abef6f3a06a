#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "keyact/boxes.hpp"

namespace keyact::quantum {

using Complex = std::complex<double>;
using Matrix4 = Eigen::Matrix<Complex, 4, 4>;
using Matrix16 = Eigen::Matrix<Complex, 16, 16>;

/// Two-party state on C^4 (x) C^4.
struct DensityMatrix {
    Matrix16 rho;
};

/// A +-1 valued observable on C^4.
struct Observable {
    Matrix4 op;
};

struct ObservableSet {
    std::array<Observable, 2> alice;
    std::array<Observable, 3> bob;
};

/// Angles in the x-z plane of the {|0>,|1>} block: cos(t) sigma_z + sin(t) sigma_x.
/// The {|2>,|3>} block always measures sigma_z.
struct MeasurementAngles {
    std::array<double, 2> alice;
    std::array<double, 3> bob;
};

/// Angles realising the default observable set.
MeasurementAngles default_angles();

/// alpha (v |psi0><psi0| + (1 - v) I_4 / 4) + (1 - alpha)/2 (|22><22| + |33><33|),
/// with |psi0> = (|01> - |10>)/sqrt(2) inside the {|0>,|1>} qubit blocks.
DensityMatrix build_state(const FamilyPoint& p);

ObservableSet observables();
ObservableSet observables(const MeasurementAngles& angles);

/// (I + (-1)^a O) / 2.
Matrix4 projector(const Observable& o, int a);

/// P(ab|xy) = Tr[rho (M_A^{x,a} (x) M_B^{y,b})] on the 2x3 scenario.
Box born_box(const DensityMatrix& rho, const ObservableSet& obs);

bool is_hermitian(const Matrix16& m, double tol);
double min_eigenvalue(const Matrix16& m);

}  // namespace keyact::quantum
