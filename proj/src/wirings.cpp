#include "keyact/wirings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "keyact/error.hpp"
#include "keyact/sdp.hpp"

namespace keyact {
namespace {

using Rule = std::function<int(const std::vector<int>& xs, const std::vector<int>& as)>;

// Mixed-radix digits of `index`, most significant first.
std::vector<int> digits(int index, const std::vector<int>& radix) {
    std::vector<int> d(radix.size());
    for (int i = static_cast<int>(radix.size()) - 1; i >= 0; --i) {
        d[i] = index % radix[i];
        index /= radix[i];
    }
    return d;
}

int product_of(const std::vector<int>& radix) {
    int n = 1;
    for (int r : radix) n *= r;
    return n;
}

Wiring build(std::vector<int> side_inputs, WiringClass cls, int label, WiringParams params, const Rule& rule) {
    const int k = static_cast<int>(side_inputs.size());
    const int nx = product_of(side_inputs);
    const int na = 1 << k;
    const std::vector<int> binary(k, 2);
    std::vector<std::uint8_t> table(static_cast<std::size_t>(2) * nx * na, 0);
    for (int xi = 0; xi < nx; ++xi) {
        const auto xs = digits(xi, side_inputs);
        for (int ai = 0; ai < na; ++ai) {
            const int a = rule(xs, digits(ai, binary));
            if (a >= 0) table[(static_cast<std::size_t>(a) * nx + xi) * na + ai] = 1;
        }
    }
    return Wiring(std::move(side_inputs), std::move(table), cls, label, params);
}

int label_base(int inputs) {
    if (inputs != 2 && inputs != 3) throw DomainError("catalog wirings act on 2- or 3-input boxes");
    return inputs;
}

void check_bit(int v, const char* name) {
    if (v != 0 && v != 1) throw DomainError(std::string(name) + " must be 0 or 1");
}

void check_input(int v, int inputs, const char* name) {
    if (v < 0 || v >= inputs) throw DomainError(std::string(name) + " is not a valid box input");
}

// Probability of each final output on a 2-copy box given as joint table
// P(a1 a2 | x1 x2) with `copy` indexing (x1, x2, a1, a2) like a Box.
std::vector<double> action_on(const Wiring& w, const Box& joint) {
    std::vector<double> out(2, 0.0);
    for (const auto& e : w.support()) out[e.output] += joint(e.inputs[0], e.inputs[1], e.outcomes[0], e.outcomes[1]);
    return out;
}

}  // namespace

std::string to_string(WiringClass c) {
    switch (c) {
        case WiringClass::Constant: return "constant";
        case WiringClass::OneSided: return "one-sided";
        case WiringClass::Xor: return "xor";
        case WiringClass::And: return "and";
        case WiringClass::Sequential: return "sequential";
        case WiringClass::Custom: return "custom";
    }
    return "custom";
}

WiringClass wiring_class_from_string(const std::string& name) {
    std::string n;
    for (char c : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (n == "constant") return WiringClass::Constant;
    if (n == "one-sided" || n == "onesided") return WiringClass::OneSided;
    if (n == "xor") return WiringClass::Xor;
    if (n == "and") return WiringClass::And;
    if (n == "sequential") return WiringClass::Sequential;
    if (n == "custom") return WiringClass::Custom;
    throw DomainError("unknown wiring class '" + name + "'");
}

Wiring::Wiring(std::vector<int> side_inputs, std::vector<std::uint8_t> table, WiringClass cls, int label,
               WiringParams params)
    : side_inputs_(std::move(side_inputs)), table_(std::move(table)), class_(cls), label_(label), params_(params) {
    if (side_inputs_.empty() || side_inputs_.size() > 8) throw ShapeMismatch("a wiring consumes between 1 and 8 boxes");
    for (int n : side_inputs_)
        if (n < 1) throw ShapeMismatch("box input cardinality must be positive");
    input_histories_ = product_of(side_inputs_);
    const std::size_t expected = static_cast<std::size_t>(2) * input_histories_ * outcome_histories();
    if (table_.size() != expected) {
        std::ostringstream msg;
        msg << "wiring table has " << table_.size() << " entries, expected " << expected;
        throw ShapeMismatch(msg.str());
    }
    const std::vector<int> binary(copies(), 2);
    for (int a = 0; a < 2; ++a)
        for (int xi = 0; xi < input_histories_; ++xi)
            for (int ai = 0; ai < outcome_histories(); ++ai)
                if (at(a, xi, ai)) support_.push_back({a, digits(xi, side_inputs_), digits(ai, binary)});
}

Wiring Wiring::with_side_inputs(int inputs) const {
    for (int n : side_inputs_)
        if (inputs < n) throw ShapeMismatch("cannot shrink the inputs of a wiring");
    const auto rule = [&](const std::vector<int>& xs, const std::vector<int>& as) {
        for (int x : xs)
            if (x >= inputs) return -1;
        for (const auto& e : support_)
            if (e.inputs == xs && e.outcomes == as) return e.output;
        return -1;
    };
    return build(std::vector<int>(side_inputs_.size(), inputs), class_, label_, params_, rule);
}

std::string Wiring::describe() const {
    std::ostringstream s;
    s << to_string(class_);
    if (class_ != WiringClass::Custom) {
        s << "#" << label_ << "(";
        for (std::size_t i = 0; i < params_.size(); ++i) s << (i ? "," : "") << params_[i];
        s << ")";
    }
    s << "[k=" << copies() << "]";
    return s.str();
}

Wiring constant_wiring(int inputs, int mu, int value) {
    label_base(inputs);
    check_input(mu, inputs, "mu");
    check_bit(value, "output");
    const int label = 2 * mu + value + 1;
    return build({inputs, inputs}, WiringClass::Constant, label, {mu, value, 0, 0, 0, 0},
                 [=](const std::vector<int>& xs, const std::vector<int>&) {
                     return xs[0] == mu && xs[1] == mu ? value : -1;
                 });
}

Wiring one_sided_wiring(int inputs, int mu, int which, int sigma) {
    label_base(inputs);
    check_input(mu, inputs, "mu");
    check_bit(which, "box index");
    check_bit(sigma, "sigma");
    const int label = 4 * mu + 2 * which + sigma + 1 + 4;
    return build({inputs, inputs}, WiringClass::OneSided, label, {mu, which, 0, sigma, 0, 0},
                 [=](const std::vector<int>& xs, const std::vector<int>& as) {
                     return xs[0] == mu && xs[1] == mu ? as[which] ^ sigma : -1;
                 });
}

Wiring xor_wiring(int inputs, int mu, int nu, int sigma) {
    label_base(inputs);
    check_input(mu, inputs, "mu");
    check_input(nu, inputs, "nu");
    check_bit(sigma, "sigma");
    const int label = inputs == 2 ? 4 * mu + 2 * nu + sigma + 1 + 12 : 6 * mu + 2 * nu + sigma + 1 + 16;
    return build({inputs, inputs}, WiringClass::Xor, label, {mu, nu, 0, sigma, 0, 0},
                 [=](const std::vector<int>& xs, const std::vector<int>& as) {
                     return xs[0] == mu && xs[1] == nu ? as[0] ^ as[1] ^ sigma : -1;
                 });
}

Wiring and_wiring(int inputs, int mu, int nu, int sigma, int delta, int epsilon) {
    label_base(inputs);
    check_input(mu, inputs, "mu");
    check_input(nu, inputs, "nu");
    check_bit(sigma, "sigma");
    check_bit(delta, "delta");
    check_bit(epsilon, "epsilon");
    const int tail = 4 * sigma + 2 * delta + epsilon + 1;
    const int label = inputs == 2 ? 16 * mu + 8 * nu + tail + 20 : 24 * mu + 8 * nu + tail + 34;
    return build({inputs, inputs}, WiringClass::And, label, {mu, nu, 0, sigma, delta, epsilon},
                 [=](const std::vector<int>& xs, const std::vector<int>& as) {
                     return xs[0] == mu && xs[1] == nu ? ((as[0] ^ sigma) & (as[1] ^ delta)) ^ epsilon : -1;
                 });
}

Wiring sequential_wiring(int inputs, int first, int nu, int sigma, int delta, int epsilon, int shift) {
    label_base(inputs);
    check_bit(first, "first box");
    check_input(nu, inputs, "nu");
    check_input(shift, inputs, "shift");
    check_bit(sigma, "sigma");
    check_bit(delta, "delta");
    check_bit(epsilon, "epsilon");
    if (inputs == 2 && shift != 0) throw DomainError("2-input sequential wirings have no shift");
    const int tail = 4 * sigma + 2 * delta + epsilon + 1;
    const int label = inputs == 2 ? 16 * first + 8 * nu + tail + 52 : 48 * shift + 16 * nu + 8 * first + tail + 106;
    const WiringParams params = inputs == 2 ? WiringParams{first, nu, 0, sigma, delta, epsilon}
                                            : WiringParams{shift, nu, first, sigma, delta, epsilon};
    const int other = first ^ 1;
    return build({inputs, inputs}, WiringClass::Sequential, label, params,
                 [=](const std::vector<int>& xs, const std::vector<int>& as) {
                     if (xs[first] != nu) return -1;
                     if (xs[other] != ((as[first] ^ sigma) + shift) % inputs) return -1;
                     return as[other] ^ (delta & as[first]) ^ epsilon;
                 });
}

Wiring parallel_xor_wiring(int copies, int inputs, int input) {
    if (copies < 1) throw DomainError("XOR wiring needs at least one box");
    check_input(input, inputs, "input");
    int label = 0;
    if (copies == 2 && (inputs == 2 || inputs == 3)) label = xor_wiring(inputs, input, input, 0).label();
    return build(std::vector<int>(copies, inputs), WiringClass::Xor, label, {input, input, 0, 0, 0, 0},
                 [=](const std::vector<int>& xs, const std::vector<int>& as) {
                     int parity = 0;
                     for (int i = 0; i < copies; ++i) {
                         if (xs[i] != input) return -1;
                         parity ^= as[i];
                     }
                     return parity;
                 });
}

std::vector<Wiring> catalog_2in_all() {
    std::vector<Wiring> out;
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu) out.push_back(constant_wiring(2, mu, nu));
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            for (int s = 0; s < 2; ++s) out.push_back(one_sided_wiring(2, mu, nu, s));
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            for (int s = 0; s < 2; ++s) out.push_back(xor_wiring(2, mu, nu, s));
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            for (int s = 0; s < 2; ++s)
                for (int d = 0; d < 2; ++d)
                    for (int e = 0; e < 2; ++e) out.push_back(and_wiring(2, mu, nu, s, d, e));
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            for (int s = 0; s < 2; ++s)
                for (int d = 0; d < 2; ++d)
                    for (int e = 0; e < 2; ++e) out.push_back(sequential_wiring(2, mu, nu, s, d, e));
    return out;
}

const std::vector<Wiring>& catalog_2in() {
    static const std::vector<Wiring> catalog = [] {
        std::vector<Wiring> out;
        std::vector<std::vector<double>> seen;
        for (Wiring& w : catalog_2in_all()) {
            // A wiring is determined by its action on the extremal NS boxes.
            std::vector<double> action;
            for (const Box& v : ns_vertices_2x2()) {
                const auto f = action_on(w, v);
                action.insert(action.end(), f.begin(), f.end());
            }
            if (std::find(seen.begin(), seen.end(), action) != seen.end()) continue;
            seen.push_back(std::move(action));
            out.push_back(std::move(w));
        }
        return out;
    }();
    return catalog;
}

const std::vector<Wiring>& catalog_3in() {
    static const std::vector<Wiring> catalog = [] {
        std::vector<Wiring> out;
        for (int mu = 0; mu < 3; ++mu)
            for (int s = 0; s < 2; ++s) out.push_back(constant_wiring(3, mu, s));
        for (int mu = 0; mu < 3; ++mu)
            for (int t = 0; t < 2; ++t)
                for (int s = 0; s < 2; ++s) out.push_back(one_sided_wiring(3, mu, t, s));
        for (int mu = 0; mu < 3; ++mu)
            for (int nu = 0; nu < 3; ++nu)
                for (int s = 0; s < 2; ++s) out.push_back(xor_wiring(3, mu, nu, s));
        for (int mu = 0; mu < 3; ++mu)
            for (int nu = 0; nu < 3; ++nu)
                for (int s = 0; s < 2; ++s)
                    for (int d = 0; d < 2; ++d)
                        for (int e = 0; e < 2; ++e) out.push_back(and_wiring(3, mu, nu, s, d, e));
        for (int mu = 0; mu < 3; ++mu)
            for (int nu = 0; nu < 3; ++nu)
                for (int t = 0; t < 2; ++t)
                    for (int s = 0; s < 2; ++s)
                        for (int d = 0; d < 2; ++d)
                            for (int e = 0; e < 2; ++e) out.push_back(sequential_wiring(3, t, nu, s, d, e, mu));
        return out;
    }();
    return catalog;
}

const std::vector<Box>& ns_vertices_2x2() {
    static const std::vector<Box> vertices = [] {
        std::vector<Box> out;
        const Scenario s{2, 2, 2, 2};
        // Deterministic boxes a = f(x), b = g(y) with f, g among the 4 bit functions.
        for (int f = 0; f < 4; ++f)
            for (int g = 0; g < 4; ++g) {
                std::vector<double> t(s.size(), 0.0);
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) {
                        const int a = x ? (f >> 1) & 1 : f & 1;
                        const int b = y ? (g >> 1) & 1 : g & 1;
                        t[((x * 2 + y) * 2 + a) * 2 + b] = 1.0;
                    }
                out.push_back(make_box(s, std::move(t)));
            }
        // PR boxes a xor b = xy xor al x xor be y xor ga.
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be)
                for (int ga = 0; ga < 2; ++ga) {
                    std::vector<double> t(s.size(), 0.0);
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y)
                            for (int a = 0; a < 2; ++a) {
                                const int b = a ^ (x & y) ^ (al & x) ^ (be & y) ^ ga;
                                t[((x * 2 + y) * 2 + a) * 2 + b] = 0.5;
                            }
                    out.push_back(make_box(s, std::move(t)));
                }
        return out;
    }();
    return vertices;
}

namespace {

struct LinearRow {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;
};

// Linear parametrisation of the NS polytope of k binary-output parties by
// g_S(x_S) = P(a_i = 0 for all i in S | x_S) over nonempty subsets S.
class NsPolytope {
public:
    explicit NsPolytope(std::vector<int> inputs) : inputs_(std::move(inputs)), k_(static_cast<int>(inputs_.size())) {
        offsets_.assign(1 << k_, -1);
        for (int mask = 1; mask < (1 << k_); ++mask) {
            offsets_[mask] = num_vars_;
            int n = 1;
            for (int i = 0; i < k_; ++i)
                if (mask >> i & 1) n *= inputs_[i];
            num_vars_ += n;
        }
    }

    int num_vars() const { return num_vars_; }

    /// P(as | xs) as constant + sparse linear terms (party i <-> bit k-1-i).
    LinearRow probability(const std::vector<int>& xs, const std::vector<int>& as) const {
        int zeros = 0, ones = 0;
        for (int i = 0; i < k_; ++i) (as[i] ? ones : zeros) |= 1 << i;
        LinearRow out;
        // Inclusion-exclusion over the parties that must output 1.
        for (int u = ones;; u = (u - 1) & ones) {
            const double sign = (std::popcount(static_cast<unsigned>(u)) % 2) ? -1.0 : 1.0;
            const int s = zeros | u;
            if (s == 0)
                out.constant += sign;
            else
                out.terms.emplace_back(var(s, xs), sign);
            if (u == 0) break;
        }
        return out;
    }

private:
    int var(int mask, const std::vector<int>& xs) const {
        int idx = 0;
        for (int i = 0; i < k_; ++i)
            if (mask >> i & 1) idx = idx * inputs_[i] + xs[i];
        return offsets_[mask] + idx;
    }

    std::vector<int> inputs_;
    int k_;
    std::vector<int> offsets_;
    int num_vars_ = 0;
};

// min over the NS polytope of constant + coeffs . g.
double minimize_over_polytope(const NsPolytope& poly, const std::vector<LinearRow>& rows,
                              double constant, const std::vector<double>& coeffs) {
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale < 1e-14) return constant;
    sdp::Problem p;
    p.block_sizes = {-static_cast<int>(rows.size())};
    p.c = coeffs;
    p.offset = constant;
    p.matrices.assign(poly.num_vars() + 1, {});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const int ri = static_cast<int>(r);
        if (rows[r].constant != 0.0) p.matrices[0].push_back({0, ri, ri, -rows[r].constant});
        for (const auto& [v, c] : rows[r].terms) p.matrices[v + 1].push_back({0, ri, ri, c});
    }
    sdp::Settings settings;
    settings.tolerance = 1e-10;
    const sdp::Result res = sdp::solve(p, settings);
    if (res.status == sdp::Status::NumericalError || res.status == sdp::Status::MaxIterations)
        throw SolverFailure("wiring validation LP did not converge: " + sdp::to_string(res.status));
    return res.primal_objective;
}

}  // namespace

WiringValidation validate_wiring(const Wiring& w, ValidationMethod method) {
    WiringValidation report;
    constexpr double tol = 1e-7;
    // Determinism: at most one final output per history.
    for (int xi = 0; xi < w.input_histories(); ++xi)
        for (int ai = 0; ai < w.outcome_histories(); ++ai)
            if (w.at(0, xi, ai) && w.at(1, xi, ai)) {
                report.valid = false;
                report.violation = "determinism: a history is assigned both final outputs";
                return report;
            }

    const bool two_by_two = w.copies() == 2 && w.side_inputs()[0] == 2 && w.side_inputs()[1] == 2;
    if (method == ValidationMethod::Auto)
        method = two_by_two ? ValidationMethod::Vertices : ValidationMethod::LinearProgram;
    if (method == ValidationMethod::Vertices && !two_by_two)
        throw DomainError("vertex validation covers two 2-input boxes only");

    report.min_output = report.min_total = 1e300;
    report.max_output = report.max_total = -1e300;
    if (method == ValidationMethod::Vertices) {
        for (const Box& v : ns_vertices_2x2()) {
            const auto f = action_on(w, v);
            report.min_output = std::min({report.min_output, f[0], f[1]});
            report.max_output = std::max({report.max_output, f[0], f[1]});
            report.min_total = std::min(report.min_total, f[0] + f[1]);
            report.max_total = std::max(report.max_total, f[0] + f[1]);
        }
    } else {
        const NsPolytope poly(w.side_inputs());
        const std::vector<int> binary(w.copies(), 2);
        std::vector<LinearRow> rows;
        std::vector<std::vector<int>> xs_of, as_of;
        for (int xi = 0; xi < w.input_histories(); ++xi)
            for (int ai = 0; ai < w.outcome_histories(); ++ai) {
                xs_of.push_back(digits(xi, w.side_inputs()));
                as_of.push_back(digits(ai, binary));
                rows.push_back(poly.probability(xs_of.back(), as_of.back()));
            }
        auto functional = [&](int which) {  // which = 0, 1 for outputs, 2 for the total
            double constant = 0.0;
            std::vector<double> coeffs(poly.num_vars(), 0.0);
            std::size_t r = 0;
            for (int xi = 0; xi < w.input_histories(); ++xi)
                for (int ai = 0; ai < w.outcome_histories(); ++ai, ++r) {
                    const bool on = which == 2 ? (w.at(0, xi, ai) || w.at(1, xi, ai)) : w.at(which, xi, ai);
                    if (!on) continue;
                    constant += rows[r].constant;
                    for (const auto& [v, c] : rows[r].terms) coeffs[v] += c;
                }
            return std::pair{constant, coeffs};
        };
        for (int which = 0; which < 3; ++which) {
            auto [constant, coeffs] = functional(which);
            const double lo = minimize_over_polytope(poly, rows, constant, coeffs);
            for (double& c : coeffs) c = -c;
            const double hi = -minimize_over_polytope(poly, rows, -constant, coeffs);
            if (which < 2) {
                report.min_output = std::min(report.min_output, lo);
                report.max_output = std::max(report.max_output, hi);
            } else {
                report.min_total = lo;
                report.max_total = hi;
            }
        }
    }
    if (report.min_output < -tol) {
        report.valid = false;
        report.violation = "positivity: some NS box yields a negative output probability";
    } else if (report.max_output > 1.0 + tol) {
        report.valid = false;
        report.violation = "boundedness: some NS box yields an output probability above 1";
    } else if (std::abs(report.min_total - 1.0) > tol || std::abs(report.max_total - 1.0) > tol) {
        report.valid = false;
        report.violation = "normalization: output probabilities do not sum to 1 on every NS box";
    }
    return report;
}

void check_wiring(const Wiring& w) {
    const WiringValidation r = validate_wiring(w);
    if (!r.valid) throw InvalidWiring(w.describe() + " violates " + r.violation);
}

Box apply_wiring(const WiringPair& pair, std::span<const Box> copies) {
    if (pair.alice.empty() || pair.bob.empty()) throw ShapeMismatch("wiring pair needs at least one wiring per party");
    const int k = static_cast<int>(copies.size());
    auto check = [&](const Wiring& w, bool alice) {
        if (w.copies() != k) throw ShapeMismatch("wiring consumes a different number of boxes than supplied");
        for (int i = 0; i < k; ++i) {
            const Scenario& s = copies[i].scenario();
            if (s.na != 2 || s.nb != 2) throw ShapeMismatch("wirings act on binary-outcome boxes");
            if (w.side_inputs()[i] != (alice ? s.nx : s.ny))
                throw ShapeMismatch("wiring input cardinality does not match the box");
        }
    };
    for (const Wiring& w : pair.alice) check(w, true);
    for (const Wiring& w : pair.bob) check(w, false);

    const Scenario out{static_cast<int>(pair.alice.size()), static_cast<int>(pair.bob.size()), 2, 2};
    std::vector<double> table(out.size(), 0.0);
    for (int x = 0; x < out.nx; ++x)
        for (int y = 0; y < out.ny; ++y)
            for (const auto& ea : pair.alice[x].support())
                for (const auto& eb : pair.bob[y].support()) {
                    double p = 1.0;
                    for (int i = 0; i < k && p != 0.0; ++i)
                        p *= copies[i](ea.inputs[i], eb.inputs[i], ea.outcomes[i], eb.outcomes[i]);
                    table[((x * out.ny + y) * 2 + ea.output) * 2 + eb.output] += p;
                }
    return make_box(out, std::move(table));
}

WiringPair xor_pair(int copies, Scenario scenario) {
    WiringPair pair;
    for (int x = 0; x < scenario.nx; ++x) pair.alice.push_back(parallel_xor_wiring(copies, scenario.nx, x));
    for (int y = 0; y < scenario.ny; ++y) pair.bob.push_back(parallel_xor_wiring(copies, scenario.ny, y));
    return pair;
}

MixtureWeights compose_mixture(const MixtureWeights& first, const MixtureWeights& second) {
    // PR (+) C -> PR, PR (+) PR -> C, C (+) C -> C; anything with noise stays noise.
    MixtureWeights out;
    out.p_pr = first.p_pr * second.p_c + first.p_c * second.p_pr;
    out.p_c = first.p_pr * second.p_pr + first.p_c * second.p_c;
    out.p_0 = std::max(0.0, 1.0 - out.p_pr - out.p_c);
    return out;
}

FamilyPoint wired_params(const FamilyPoint& p, int copies) {
    check_family_point(p);
    if (copies < 1 || copies > 3) throw DomainError("closed-form XOR parameters cover 1 to 3 copies");
    const MixtureWeights w = to_mixture(p);
    MixtureWeights acc = w;
    for (int i = 1; i < copies; ++i) acc = compose_mixture(acc, w);
    return from_mixture(acc);
}

}  // namespace keyact
