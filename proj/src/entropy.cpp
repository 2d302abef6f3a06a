#include "keyact/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "keyact/error.hpp"
#include "keyact/rates.hpp"
#include "keyact/sdpa.hpp"

namespace keyact::entropy {
namespace {

using npa::Polynomial;
using npa::Word;

constexpr int kAliceSettings = 2;
constexpr int kBobSettings = 3;
constexpr int kEveOperators = 2;  // one Z per key outcome

std::vector<Word> projector_letters() {
    std::vector<Word> g;
    for (int x = 0; x < kAliceSettings; ++x) g.push_back(npa::alice(x));
    for (int y = 0; y < kBobSettings; ++y) g.push_back(npa::bob(y));
    return g;
}

std::vector<Word> eve_letters() {
    std::vector<Word> g;
    for (int a = 0; a < kEveOperators; ++a) {
        g.push_back(npa::eve(a, false));
        g.push_back(npa::eve(a, true));
    }
    return g;
}

std::vector<Word> relaxation_basis(const RelaxationConfig& cfg) {
    const auto proj = projector_letters();
    const auto zs = eve_letters();
    std::vector<Word> words;
    if (cfg.eve_basis == EveBasis::Compact) {
        words = npa::words_up_to(proj, cfg.level);
        for (const Word& z : zs) words.push_back(z);
        for (const Word& p : proj)
            for (const Word& z : zs) words.push_back(p * z);
    } else {
        auto gens = proj;
        gens.insert(gens.end(), zs.begin(), zs.end());
        words = npa::words_up_to(gens, cfg.level);
        for (int x = 0; x < kAliceSettings; ++x)
            for (int y = 0; y < kBobSettings; ++y)
                for (const Word& z : zs) words.push_back(npa::alice(x) * npa::bob(y) * z);
        for (int a = 0; a < kEveOperators; ++a)
            words.push_back(npa::alice(0) * npa::eve(a, true) * npa::eve(a, false));
    }
    return npa::unique_basis(words);
}

// Sum_a M_a (Z_a + Z_a* + (1 - t) Z_a* Z_a) + t Z_a Z_a*.
Polynomial node_objective(double t) {
    Polynomial p;
    for (int a = 0; a < kEveOperators; ++a) {
        const Word m = npa::alice(0, a);
        const Word z = npa::eve(a, false);
        const Word zd = npa::eve(a, true);
        p[m * z] += 1.0;
        p[m * zd] += 1.0;
        p[m * zd * z] += 1.0 - t;
        p[z * zd] += t;
    }
    return npa::reduce(p);
}

double observed_moment(const Box& b, const Word& w) {
    // <A_x> and <B_y> from no-signalling marginals, averaged over the other input.
    if (w.is_identity()) return 1.0;
    if (w.alice.size() == 1 && w.bob.empty()) {
        const int x = w.alice[0] >> 1;
        double s = 0.0;
        for (int y = 0; y < kBobSettings; ++y) s += b.marginal_a(x, y, 0);
        return s / kBobSettings;
    }
    if (w.bob.size() == 1 && w.alice.empty()) {
        const int y = w.bob[0] >> 1;
        double s = 0.0;
        for (int x = 0; x < kAliceSettings; ++x) s += b.marginal_b(x, y, 0);
        return s / kAliceSettings;
    }
    return b(w.alice[0] >> 1, w.bob[0] >> 1, 0, 0);
}

void check_box(const Box& b) {
    const Scenario& s = b.scenario();
    if (s.nx < kAliceSettings || s.ny < kBobSettings || s.na != 2 || s.nb != 2)
        throw ScenarioTooSmall("entropy relaxation needs a 2x3 box with binary outcomes");
    if (!is_no_signalling(b, 1e-8).ok) throw Error("entropy relaxation needs a no-signalling box");
}

std::vector<Word> distribution_words() {
    std::vector<Word> w{Word{}};
    for (int x = 0; x < kAliceSettings; ++x) w.push_back(npa::alice(x));
    for (int y = 0; y < kBobSettings; ++y) w.push_back(npa::bob(y));
    for (int x = 0; x < kAliceSettings; ++x)
        for (int y = 0; y < kBobSettings; ++y) w.push_back(npa::alice(x) * npa::bob(y));
    return w;
}

// Adds `scale * value` of a moment to an accumulating affine expression.
void accumulate(Affine& out, const Affine& value, double scale) {
    out.constant += scale * value.constant;
    for (const auto& [v, c] : value.terms) out.terms.emplace_back(v, scale * c);
}

sdp::Problem moment_problem(const npa::MomentMatrix& mm, const std::vector<Affine>& values, int num_vars) {
    sdp::Problem p;
    p.block_sizes = {mm.size()};
    p.c.assign(num_vars, 0.0);
    p.matrices.assign(num_vars + 1, {});
    for (int r = 0; r < mm.size(); ++r) {
        for (int c = r; c < mm.size(); ++c) {
            const int id = mm.at(r, c);
            if (id < 0) continue;
            const Affine& a = values[id];
            if (a.constant != 0.0) p.matrices[0].push_back({0, r, c, -a.constant});
            for (const auto& [v, coeff] : a.terms) p.matrices[v + 1].push_back({0, r, c, coeff});
        }
    }
    return p;
}

}  // namespace

double node_weight(const QuadratureRule& rule, int node) {
    return rule.weights[node] / (rule.nodes[node] * std::numbers::ln2);
}

Relaxation build_relaxation(const Box& b, const RelaxationConfig& config) {
    check_box(b);
    if (config.level < 1) throw DomainError("relaxation level must be at least 1");

    Relaxation r;
    r.config = config;
    r.rule = gauss_radau(config.nodes);
    r.moments = npa::build_moment_matrix(relaxation_basis(config));

    const int n_moments = static_cast<int>(r.moments.moments.size());
    r.moment_values.assign(n_moments, {});
    std::vector<bool> assigned(n_moments, false);

    auto pin = [&](const Word& w, double value) {
        const int id = r.moments.find(npa::moment_key(w));
        if (id < 0) throw Error("distribution word missing from the moment matrix: " + npa::to_string(w));
        r.moment_values[id].constant = value;
        assigned[id] = true;
    };

    const auto dist = distribution_words();
    if (config.mode == ConstraintMode::Full) {
        for (const Word& w : dist) pin(w, observed_moment(b, w));
        r.distribution_constraints = static_cast<int>(dist.size());
    } else {
        pin(Word{}, 1.0);
        r.distribution_constraints = 3;  // normalization, CHSH value, QBER
    }

    int next_var = 0;
    for (int id = 0; id < n_moments; ++id) {
        if (assigned[id]) continue;
        r.moment_values[id].terms.push_back({next_var++, 1.0});
    }

    if (config.mode == ConstraintMode::Coarse) {
        // Eliminate <A1 B1> through the CHSH value and <A0 B2> through the QBER;
        // correlators are E_xy = 1 - 2<A_x> - 2<B_y> + 4<A_x B_y>.
        auto id_of = [&](const Word& w) { return r.moments.find(npa::moment_key(w)); };
        const double s_obs = signed_chsh(b.restrict_inputs(2, 2), kCanonicalChsh);
        const double q_obs = qber(b);

        const int pivot_s = id_of(npa::alice(1) * npa::bob(1));
        const int pivot_q = id_of(npa::alice(0) * npa::bob(2));
        // Free variables previously assigned to the pivots become unused;
        // renumber the remaining ones densely.
        const int var_s = r.moment_values[pivot_s].terms.front().first;
        const int var_q = r.moment_values[pivot_q].terms.front().first;
        auto renumber = [&](int v) { return v - (v > var_s ? 1 : 0) - (v > var_q ? 1 : 0); };
        for (int id = 0; id < n_moments; ++id)
            for (auto& [v, c] : r.moment_values[id].terms) v = renumber(v);
        next_var -= 2;

        auto value = [&](const Word& w) { return r.moment_values[id_of(w)]; };
        Affine s_expr;  // sum_xy s_xy E_xy minus the pivot term
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                const double sign = kCanonicalChsh.s[x * 2 + y];
                s_expr.constant += sign;
                accumulate(s_expr, value(npa::alice(x)), -2.0 * sign);
                accumulate(s_expr, value(npa::bob(y)), -2.0 * sign);
                if (x == 1 && y == 1) continue;
                accumulate(s_expr, value(npa::alice(x) * npa::bob(y)), 4.0 * sign);
            }
        }
        const double pivot_coeff = 4.0 * kCanonicalChsh.s[3];
        Affine a11;
        a11.constant = s_obs / pivot_coeff;
        accumulate(a11, s_expr, -1.0 / pivot_coeff);

        // Q = <A0> + <B2> - 2 <A0 B2>.
        Affine a02;
        a02.constant = -q_obs / 2.0;
        accumulate(a02, value(npa::alice(0)), 0.5);
        accumulate(a02, value(npa::bob(2)), 0.5);

        r.moment_values[pivot_s] = a11;
        r.moment_values[pivot_q] = a02;
    }
    r.num_vars = next_var;

    for (int i = 0; i + 1 < r.rule.m; ++i) r.node_objectives.push_back(node_objective(r.rule.nodes[i]));
    return r;
}

sdp::Problem Relaxation::problem(int node) const {
    sdp::Problem p = moment_problem(moments, moment_values, num_vars);
    Affine obj;
    for (const auto& [w, coeff] : node_objectives.at(node)) {
        const int id = moments.find(npa::moment_key(w));
        if (id < 0) throw Error("objective word missing from the moment matrix: " + npa::to_string(w));
        accumulate(obj, moment_values[id], coeff);
    }
    p.offset = obj.constant;
    for (const auto& [v, c] : obj.terms) p.c[v] += c;
    return p;
}

namespace {

// The reported value F_0 . X is a lower bound as long as X is feasible; the gap
// only measures how far it may sit below the relaxation optimum.
void check_result(const sdp::Result& res, const SolverConfig& solver, const std::string& what) {
    if (res.status == sdp::Status::NumericalError ||
        (res.status != sdp::Status::Optimal && res.relative_gap > solver.max_gap))
        throw SolverFailure(what + " SDP failed: " + sdp::to_string(res.status));
    if (res.primal_residual > solver.residual_threshold) {
        std::ostringstream msg;
        msg << what << " certificate residual " << res.primal_residual << " above " << solver.residual_threshold;
        throw NumericalInstability(msg.str());
    }
}

}  // namespace

EntropyBound solve_relaxation(const Relaxation& r, const SolverConfig& solver) {
    EntropyBound bound;
    bound.nodes = r.rule.m;
    bound.level = r.config.level;
    bound.tolerance = solver.sdp.tolerance;
    bound.value = r.rule.c_m;
    for (int i = 0; i < r.num_nodes(); ++i) {
        const sdp::Result res = sdp::solve(r.problem(i), solver.sdp);
        check_result(res, solver, "node " + std::to_string(i));
        if (res.status != sdp::Status::Optimal) bound.status = res.status;
        // Lowered by the solver's accuracy so that noise cannot certify entropy.
        const double margin = std::abs(res.primal_objective - res.dual_objective) +
                              solver.sdp.tolerance * (1.0 + std::abs(res.primal_objective));
        bound.node_values.push_back(res.primal_objective - margin);
        bound.value += node_weight(r.rule, i) * bound.node_values.back();
        bound.max_primal_residual = std::max(bound.max_primal_residual, res.primal_residual);
        bound.max_dual_residual = std::max(bound.max_dual_residual, res.dual_residual);
        bound.max_gap = std::max(bound.max_gap, res.relative_gap);
    }
    return bound;
}

EntropyBound entropy_lower_bound(const Box& b, const RelaxationConfig& config, const SolverConfig& solver) {
    return solve_relaxation(build_relaxation(b, config), solver);
}

GuessingResult guessing_probability(const Box& b, int level, const SolverConfig& solver) {
    check_box(b);
    const npa::MomentMatrix mm = npa::build_moment_matrix(npa::unique_basis(npa::words_up_to(projector_letters(), level)));
    const int n_moments = static_cast<int>(mm.moments.size());

    // Sub-box e (Eve's guess) has moments y^e; the observed words satisfy
    // y^0_w + y^1_w = P_w, so y^1 is eliminated on them.
    std::vector<bool> observed(n_moments, false);
    std::vector<double> observed_value(n_moments, 0.0);
    for (const Word& w : distribution_words()) {
        const int id = mm.find(npa::moment_key(w));
        observed[id] = true;
        observed_value[id] = observed_moment(b, w);
    }
    std::vector<Affine> sub0(n_moments), sub1(n_moments);
    int next_var = 0;
    for (int id = 0; id < n_moments; ++id) sub0[id].terms.push_back({next_var++, 1.0});
    for (int id = 0; id < n_moments; ++id) {
        if (observed[id]) {
            sub1[id].constant = observed_value[id];
            sub1[id].terms.push_back({sub0[id].terms.front().first, -1.0});
        } else {
            sub1[id].terms.push_back({next_var++, 1.0});
        }
    }
    sdp::Problem p0 = moment_problem(mm, sub0, next_var);
    sdp::Problem p1 = moment_problem(mm, sub1, next_var);
    sdp::Problem p;
    p.block_sizes = {mm.size(), mm.size()};
    p.c.assign(next_var, 0.0);
    p.matrices = p0.matrices;
    for (std::size_t k = 0; k < p1.matrices.size(); ++k)
        for (sdp::Entry e : p1.matrices[k]) {
            e.block = 1;
            p.matrices[k].push_back(e);
        }

    // p_g = <A_{0,0}>_0 + <1>_1 - <A_{0,0}>_1; minimise its negative.
    const int id_one = mm.find(Word{});
    const int id_a0 = mm.find(npa::alice(0));
    Affine pg;
    accumulate(pg, sub0[id_a0], 1.0);
    accumulate(pg, sub1[id_one], 1.0);
    accumulate(pg, sub1[id_a0], -1.0);
    p.offset = -pg.constant;
    for (const auto& [v, c] : pg.terms) p.c[v] -= c;

    sdp::Settings settings = solver.sdp;
    settings.trace_bound = solver.guessing_trace_bound;
    const sdp::Result res = sdp::solve(p, settings);
    check_result(res, solver, "guessing probability");
    GuessingResult g;
    // The primal objective lower-bounds -p_g, so its negative is a valid upper bound on p_g.
    g.p_guess = std::clamp(-res.primal_objective, 0.0, 1.0);
    g.h_min = -std::log2(std::max(g.p_guess, 1e-300));
    g.status = res.status;
    return g;
}

void export_sdpa(const Relaxation& r, int node, const std::string& path) {
    std::ostringstream comment;
    comment << "quadrature entropy relaxation, node " << node << " of " << r.num_nodes() << " (t = "
            << r.rule.nodes.at(node) << ", weight " << node_weight(r.rule, node) << ")\n"
            << "moment matrix " << r.moments.size() << "x" << r.moments.size() << ", level " << r.config.level;
    sdpa::write_file(r.problem(node), path, comment.str());
}

}  // namespace keyact::entropy
