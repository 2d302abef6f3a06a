#include "keyact/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "keyact/error.hpp"

namespace keyact::sdp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Blocks = std::vector<MatrixXd>;

// Symmetric expansion of one constraint matrix: (r, c) and (c, r) both listed.
struct Expanded {
    std::vector<Entry> entries;
    std::vector<int> blocks;  // distinct blocks touched
};

Expanded expand(const std::vector<Entry>& upper) {
    Expanded e;
    for (const Entry& en : upper) {
        if (en.value == 0.0) continue;
        e.entries.push_back(en);
        if (en.row != en.col) e.entries.push_back({en.block, en.col, en.row, en.value});
        if (std::find(e.blocks.begin(), e.blocks.end(), en.block) == e.blocks.end()) e.blocks.push_back(en.block);
    }
    return e;
}

double inner(const Blocks& a, const Blocks& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
    return s;
}

// tr(F A) for a (possibly nonsymmetric) A.
double trace_with(const Expanded& f, const Blocks& a) {
    double s = 0.0;
    for (const Entry& en : f.entries) s += en.value * a[en.block](en.col, en.row);
    return s;
}

void add_scaled(Blocks& out, const Expanded& f, double scale) {
    for (const Entry& en : f.entries) out[en.block](en.row, en.col) += scale * en.value;
}

Blocks zeros(const std::vector<int>& dims) {
    Blocks b;
    for (int n : dims) b.push_back(MatrixXd::Zero(n, n));
    return b;
}

Blocks identity(const std::vector<int>& dims, const std::vector<double>& scale) {
    Blocks b;
    for (std::size_t k = 0; k < dims.size(); ++k) b.push_back(scale[k] * MatrixXd::Identity(dims[k], dims[k]));
    return b;
}

double frobenius(const Blocks& b) {
    double s = 0.0;
    for (const auto& m : b) s += m.squaredNorm();
    return std::sqrt(s);
}

// Largest step t such that a + t da stays PSD (infinity when unconstrained).
double max_step(const MatrixXd& a, const MatrixXd& da) {
    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) return 0.0;
    MatrixXd w = llt.matrixL().solve(da);
    w = llt.matrixL().solve(w.transpose()).transpose();
    w = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(w, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

double max_step(const Blocks& a, const Blocks& da) {
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.size(); ++k) t = std::min(t, max_step(a[k], da[k]));
    return t;
}

bool invert_spd(const MatrixXd& a, MatrixXd& inv) {
    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) return false;
    inv = llt.solve(MatrixXd::Identity(a.rows(), a.cols()));
    inv = 0.5 * (inv + inv.transpose());
    return true;
}

class Solver {
public:
    Solver(const Problem& p, const Settings& s) : problem_(p), settings_(s) {
        for (int n : p.block_sizes) dims_.push_back(std::abs(n));
        m_ = p.num_vars();
        f0_ = zeros(dims_);
        for (const Entry& en : p.matrices[0]) {
            f0_[en.block](en.row, en.col) += en.value;
            if (en.row != en.col) f0_[en.block](en.col, en.row) += en.value;
        }
        for (int i = 1; i <= m_; ++i) f_.push_back(expand(p.matrices[i]));
        c_ = VectorXd::Map(p.c.data(), m_);
    }

    Result run() {
        initial_point();
        Result best;
        best.status = Status::NumericalError;
        double best_merit = std::numeric_limits<double>::infinity();
        const double c_scale = 1.0 + (m_ > 0 ? c_.cwiseAbs().maxCoeff() : 0.0);
        const double f0_scale = 1.0 + frobenius(f0_);
        int stalled = 0;

        for (int it = 0; it <= settings_.max_iterations; ++it) {
            const double pobj = inner(f0_, x_) + problem_.offset;
            const double dobj = c_.dot(y_) + problem_.offset;
            VectorXd rp = c_ - constraint_values(x_);
            Blocks rd = assemble(y_);
            for (std::size_t k = 0; k < rd.size(); ++k) rd[k] -= s_[k];
            const double pinf = rp.size() ? rp.cwiseAbs().maxCoeff() / c_scale : 0.0;
            const double dinf = frobenius(rd) / f0_scale;
            const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
            const double merit = std::max({pinf, dinf, gap});

            if (settings_.verbose)
                std::cerr << "it " << it << " pobj " << pobj << " dobj " << dobj << " pinf " << pinf << " dinf "
                          << dinf << " gap " << gap << "\n";

            if (merit < best_merit) {
                best_merit = merit;
                stalled = 0;
                best.primal_objective = pobj;
                best.dual_objective = dobj;
                best.primal_residual = pinf;
                best.dual_residual = dinf;
                best.relative_gap = gap;
                best.iterations = it;
                best.y.assign(y_.data(), y_.data() + m_);
                best.x = x_;
                best.s = s_;
                best.status = merit < std::sqrt(settings_.tolerance) ? Status::NearOptimal : Status::MaxIterations;
            } else if (++stalled > 8) {
                break;
            }
            if (merit < settings_.tolerance) {
                best.status = Status::Optimal;
                break;
            }
            if (it == settings_.max_iterations) break;
            if (!step(rp, rd)) break;
        }
        return best;
    }

private:
    void initial_point() {
        std::vector<double> xs(dims_.size()), ss(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const double n = dims_[k];
            double xi = std::max(10.0, std::sqrt(n));
            double eta = std::max({10.0, std::sqrt(n), f0_[k].norm()});
            for (int i = 0; i < m_; ++i) {
                double nrm = 0.0;
                for (const Entry& en : f_[i].entries)
                    if (en.block == static_cast<int>(k)) nrm += en.value * en.value;
                nrm = std::sqrt(nrm);
                if (nrm == 0.0) continue;
                xi = std::max(xi, n * (1.0 + std::abs(c_[i])) / (1.0 + nrm));
                eta = std::max(eta, nrm);
            }
            xs[k] = xi;
            ss[k] = eta;
        }
        x_ = identity(dims_, xs);
        s_ = identity(dims_, ss);
        y_ = VectorXd::Zero(m_);
    }

    Blocks assemble(const VectorXd& y) const {
        Blocks out = f0_;
        for (auto& b : out) b = -b;
        for (int i = 0; i < m_; ++i)
            if (y[i] != 0.0) add_scaled(out, f_[i], y[i]);
        return out;
    }

    VectorXd constraint_values(const Blocks& x) const {
        VectorXd v(m_);
        for (int i = 0; i < m_; ++i) v[i] = trace_with(f_[i], x);
        return v;
    }

    // Schur complement M_ij = tr(F_i X F_j S^{-1}).
    MatrixXd schur(const Blocks& sinv) const {
        MatrixXd mm = MatrixXd::Zero(m_, m_);
        Blocks t = zeros(dims_);
        for (int j = 0; j < m_; ++j) {
            for (int b : f_[j].blocks) t[b].setZero();
            for (const Entry& en : f_[j].entries)
                t[en.block].noalias() += en.value * x_[en.block].col(en.row) * sinv[en.block].row(en.col);
            for (int i = 0; i <= j; ++i) {
                double s = 0.0;
                for (const Entry& en : f_[i].entries) {
                    if (std::find(f_[j].blocks.begin(), f_[j].blocks.end(), en.block) == f_[j].blocks.end()) continue;
                    s += en.value * t[en.block](en.col, en.row);
                }
                mm(i, j) = s;
                mm(j, i) = s;
            }
        }
        return mm;
    }

    bool step(const VectorXd& rp, const Blocks& rd) {
        (void)rp;
        Blocks sinv(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k)
            if (!invert_spd(s_[k], sinv[k])) return false;
        double n_total = 0.0;
        for (int n : dims_) n_total += n;
        const double mu = inner(x_, s_) / n_total;

        const MatrixXd mm = schur(sinv);
        Eigen::LLT<MatrixXd> llt(mm);
        Eigen::LDLT<MatrixXd> ldlt;
        bool use_llt = llt.info() == Eigen::Success;
        if (!use_llt) {
            ldlt.compute(mm);
            if (ldlt.info() != Eigen::Success) return false;
        }
        auto solve_m = [&](const VectorXd& rhs) -> VectorXd {
            if (use_llt) return llt.solve(rhs);
            return ldlt.solve(rhs);
        };

        // Terms shared by predictor and corrector.
        Blocks x_rd_sinv(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k) x_rd_sinv[k] = x_[k] * rd[k] * sinv[k];
        VectorXd tr_sinv(m_), tr_xrs(m_);
        for (int i = 0; i < m_; ++i) {
            tr_sinv[i] = trace_with(f_[i], sinv);
            tr_xrs[i] = trace_with(f_[i], x_rd_sinv);
        }

        auto direction = [&](double target_mu, const Blocks* corr, VectorXd& dy, Blocks& dx, Blocks& ds) {
            VectorXd rhs = target_mu * tr_sinv - c_ - tr_xrs;
            if (corr)
                for (int i = 0; i < m_; ++i) rhs[i] -= trace_with(f_[i], *corr);
            dy = solve_m(rhs);
            ds = rd;
            for (int i = 0; i < m_; ++i)
                if (dy[i] != 0.0) add_scaled(ds, f_[i], dy[i]);
            dx.resize(dims_.size());
            for (std::size_t k = 0; k < dims_.size(); ++k) {
                MatrixXd t = x_[k] * ds[k] * sinv[k];
                if (corr) t += (*corr)[k];
                dx[k] = target_mu * sinv[k] - x_[k] - 0.5 * (t + t.transpose());
            }
        };

        VectorXd dy;
        Blocks dx, ds;
        direction(0.0, nullptr, dy, dx, ds);
        const double ap = std::min(1.0, max_step(x_, dx));
        const double ad = std::min(1.0, max_step(s_, ds));
        Blocks xa = x_, sa = s_;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            xa[k] += ap * dx[k];
            sa[k] += ad * ds[k];
        }
        const double mu_aff = inner(xa, sa) / n_total;
        double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
        sigma = std::clamp(sigma, 0.0, 1.0);

        Blocks corr(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k) corr[k] = dx[k] * ds[k] * sinv[k];
        direction(sigma * mu, &corr, dy, dx, ds);

        const double gamma = settings_.step_fraction;
        const double tp = std::min(1.0, gamma * max_step(x_, dx));
        const double td = std::min(1.0, gamma * max_step(s_, ds));
        if (!(tp > 0.0) || !(td > 0.0)) return false;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            x_[k] += tp * dx[k];
            x_[k] = 0.5 * (x_[k] + x_[k].transpose());
            s_[k] += td * ds[k];
            s_[k] = 0.5 * (s_[k] + s_[k].transpose());
        }
        y_ += td * dy;
        return y_.allFinite();
    }

    const Problem& problem_;
    Settings settings_;
    std::vector<int> dims_;
    int m_ = 0;
    Blocks f0_;
    std::vector<Expanded> f_;
    VectorXd c_;
    Blocks x_, s_;
    VectorXd y_;
};

}  // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::NearOptimal: return "near-optimal";
        case Status::MaxIterations: return "max-iterations";
        case Status::NumericalError: return "numerical-error";
    }
    return "unknown";
}

void check_problem(const Problem& problem) {
    if (problem.matrices.size() != problem.c.size() + 1)
        throw ShapeMismatch("SDP needs F_0 plus one matrix per variable");
    for (const auto& mat : problem.matrices) {
        for (const Entry& en : mat) {
            if (en.block < 0 || en.block >= static_cast<int>(problem.block_sizes.size()))
                throw ShapeMismatch("SDP entry refers to a missing block");
            const int n = std::abs(problem.block_sizes[en.block]);
            if (en.row < 0 || en.col < en.row || en.col >= n)
                throw ShapeMismatch("SDP entry outside the upper triangle of its block");
            if (problem.block_sizes[en.block] < 0 && en.row != en.col)
                throw ShapeMismatch("off-diagonal entry in a diagonal block");
        }
    }
}

Result solve(const Problem& problem, const Settings& settings) {
    check_problem(problem);
    if (!(settings.trace_bound > 0.0)) return Solver(problem, settings).run();

    // tr X <= R via one extra variable t >= 0 entering every diagonal with cost R.
    Problem bounded = problem;
    const int slack_block = static_cast<int>(bounded.block_sizes.size());
    std::vector<Entry> trace;
    for (int k = 0; k < slack_block; ++k)
        for (int i = 0; i < std::abs(bounded.block_sizes[k]); ++i) trace.push_back({k, i, i, 1.0});
    trace.push_back({slack_block, 0, 0, 1.0});
    bounded.block_sizes.push_back(-1);
    bounded.c.push_back(settings.trace_bound);
    bounded.matrices.push_back(std::move(trace));

    Result r = Solver(bounded, settings).run();
    if (!r.y.empty()) r.y.pop_back();
    if (!r.x.empty()) r.x.pop_back();
    if (!r.s.empty()) r.s.pop_back();
    return r;
}

}  // namespace keyact::sdp
