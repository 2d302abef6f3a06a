#include "keyact/quantum.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace keyact::quantum {
namespace {

// Qubit Pauli matrix placed on span{|i>, |j>} of C^4, zero elsewhere.
Matrix4 embed(const Eigen::Matrix2cd& pauli, int i, int j) {
    Matrix4 m = Matrix4::Zero();
    const int idx[2] = {i, j};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m(idx[r], idx[c]) = pauli(r, c);
    return m;
}

Eigen::Matrix2cd sigma_x() {
    Eigen::Matrix2cd s;
    s << 0, 1, 1, 0;
    return s;
}

Eigen::Matrix2cd sigma_z() {
    Eigen::Matrix2cd s;
    s << 1, 0, 0, -1;
    return s;
}

Observable angled(double theta) {
    const Eigen::Matrix2cd q = std::cos(theta) * sigma_z() + std::sin(theta) * sigma_x();
    return {embed(q, 0, 1) + embed(sigma_z(), 2, 3)};
}

int basis(int alice, int bob) { return alice * 4 + bob; }

}  // namespace

MeasurementAngles default_angles() {
    using std::numbers::pi;
    return {{pi / 2, 0.0}, {-3 * pi / 4, 3 * pi / 4, -pi / 2}};
}

DensityMatrix build_state(const FamilyPoint& p) {
    check_family_point(p);
    Eigen::Matrix<Complex, 16, 1> psi = Eigen::Matrix<Complex, 16, 1>::Zero();
    psi(basis(0, 1)) = 1.0 / std::numbers::sqrt2;
    psi(basis(1, 0)) = -1.0 / std::numbers::sqrt2;

    Matrix16 werner = p.v * (psi * psi.adjoint());
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) werner(basis(a, b), basis(a, b)) += (1.0 - p.v) / 4.0;

    Matrix16 rho = p.alpha * werner;
    rho(basis(2, 2), basis(2, 2)) += (1.0 - p.alpha) / 2.0;
    rho(basis(3, 3), basis(3, 3)) += (1.0 - p.alpha) / 2.0;
    return {rho};
}

ObservableSet observables(const MeasurementAngles& angles) {
    ObservableSet set;
    for (int x = 0; x < 2; ++x) set.alice[x] = angled(angles.alice[x]);
    for (int y = 0; y < 3; ++y) set.bob[y] = angled(angles.bob[y]);
    return set;
}

ObservableSet observables() {
    // Built from explicit Pauli combinations rather than angles so the
    // ground-truth box does not inherit trigonometric rounding.
    const double r = 1.0 / std::numbers::sqrt2;
    const Matrix4 x01 = embed(sigma_x(), 0, 1);
    const Matrix4 z01 = embed(sigma_z(), 0, 1);
    const Matrix4 z23 = embed(sigma_z(), 2, 3);
    ObservableSet set;
    set.alice[0] = {x01 + z23};
    set.alice[1] = {z01 + z23};
    set.bob[0] = {-r * (x01 + z01) + z23};
    set.bob[1] = {r * (x01 - z01) + z23};
    set.bob[2] = {-x01 + z23};
    return set;
}

Matrix4 projector(const Observable& o, int a) {
    const double sign = a == 0 ? 1.0 : -1.0;
    return (Matrix4::Identity() + sign * o.op) / 2.0;
}

Box born_box(const DensityMatrix& state, const ObservableSet& obs) {
    const Scenario s{2, 3, 2, 2};
    std::vector<double> table(s.size());
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 3; ++y) {
            for (int a = 0; a < 2; ++a) {
                const Matrix4 ma = projector(obs.alice[x], a);
                for (int b = 0; b < 2; ++b) {
                    const Matrix4 mb = projector(obs.bob[y], b);
                    Complex tr = 0.0;
                    // Tr[rho (ma (x) mb)] without materialising the Kronecker product.
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j)
                            for (int k = 0; k < 4; ++k)
                                for (int l = 0; l < 4; ++l)
                                    tr += state.rho(basis(k, l), basis(i, j)) * ma(i, k) * mb(j, l);
                    table[((x * 3 + y) * 2 + a) * 2 + b] = tr.real();
                }
            }
        }
    }
    return make_box(s, std::move(table));
}

bool is_hermitian(const Matrix16& m, double tol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Matrix16& m) {
    Eigen::SelfAdjointEigenSolver<Matrix16> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace keyact::quantum
