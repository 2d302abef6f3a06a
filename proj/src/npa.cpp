#include "keyact/npa.hpp"

#include <algorithm>
#include <functional>

#include "keyact/error.hpp"

namespace keyact::npa {
namespace {

using StringPoly = std::map<std::string, double>;

int setting_of(char c) { return static_cast<unsigned char>(c) >> 1; }
int outcome_of(char c) { return c & 1; }

// Canonical expansion of a product of binary-outcome projectors.
StringPoly reduce_projectors(const std::string& s) {
    StringPoly terms{{std::string{}, 1.0}};
    for (char letter : s) {
        const char zero = projector(setting_of(letter), 0);
        StringPoly next;
        for (const auto& [t, coeff] : terms) {
            std::string with = t;
            if (with.empty() || with.back() != zero) with.push_back(zero);
            if (outcome_of(letter) == 0) {
                next[with] += coeff;
            } else {
                next[t] += coeff;
                next[with] -= coeff;
            }
        }
        terms.clear();
        for (auto& [t, coeff] : next)
            if (coeff != 0.0) terms.emplace(t, coeff);
    }
    return terms;
}

}  // namespace

std::size_t WordHash::operator()(const Word& w) const noexcept {
    std::hash<std::string> h;
    std::size_t seed = h(w.alice);
    seed ^= h(w.bob) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    seed ^= h(w.eve) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
}

char projector(int setting, int outcome) { return static_cast<char>(setting * 2 + outcome); }
char eve_letter(int index, bool dagger) { return static_cast<char>(index * 2 + (dagger ? 1 : 0)); }

Word alice(int setting, int outcome) { return {std::string(1, projector(setting, outcome)), {}, {}}; }
Word bob(int setting, int outcome) { return {{}, std::string(1, projector(setting, outcome)), {}}; }
Word eve(int index, bool dagger) { return {{}, {}, std::string(1, eve_letter(index, dagger))}; }

Word operator*(const Word& lhs, const Word& rhs) {
    return {lhs.alice + rhs.alice, lhs.bob + rhs.bob, lhs.eve + rhs.eve};
}

Word adjoint(const Word& w) {
    Word out{std::string(w.alice.rbegin(), w.alice.rend()), std::string(w.bob.rbegin(), w.bob.rend()),
             std::string(w.eve.rbegin(), w.eve.rend())};
    for (char& c : out.eve) c = static_cast<char>(c ^ 1);
    return out;
}

Polynomial reduce(const Word& w) {
    Polynomial out;
    const StringPoly a = reduce_projectors(w.alice);
    const StringPoly b = reduce_projectors(w.bob);
    for (const auto& [sa, ca] : a)
        for (const auto& [sb, cb] : b) out[Word{sa, sb, w.eve}] += ca * cb;
    std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

Polynomial reduce(const Polynomial& p) {
    Polynomial out;
    for (const auto& [w, c] : p)
        for (const auto& [r, rc] : reduce(w)) out[r] += c * rc;
    std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

Word moment_key(const Word& w) {
    Word adj = adjoint(w);
    return std::min(w, adj);
}

std::string to_string(const Word& w) {
    if (w.is_identity()) return "1";
    std::string out;
    auto sep = [&] {
        if (!out.empty()) out += '*';
    };
    for (char c : w.alice) {
        sep();
        out += "A" + std::to_string(setting_of(c)) + "|" + std::to_string(outcome_of(c));
    }
    for (char c : w.bob) {
        sep();
        out += "B" + std::to_string(setting_of(c)) + "|" + std::to_string(outcome_of(c));
    }
    for (char c : w.eve) {
        sep();
        out += "Z" + std::to_string(setting_of(c)) + (outcome_of(c) ? "'" : "");
    }
    return out;
}

Polynomial rewrite_randomly(const std::vector<Letter>& letters, std::mt19937_64& rng) {
    using Seq = std::vector<Letter>;
    std::map<Seq, double> terms{{letters, 1.0}};

    // Redex kinds: 0 commute, 1 idempotence, 2 orthogonality, 3 completeness.
    struct Redex {
        Seq term;
        std::size_t pos;
        int kind;
    };
    for (;;) {
        std::vector<Redex> redexes;
        for (const auto& [seq, coeff] : terms) {
            for (std::size_t i = 0; i < seq.size(); ++i) {
                const Letter& l = seq[i];
                if (l.party < 2 && outcome_of(l.code) == 1) redexes.push_back({seq, i, 3});
                if (i + 1 == seq.size()) continue;
                const Letter& r = seq[i + 1];
                if (l.party > r.party) redexes.push_back({seq, i, 0});
                if (l.party == r.party && l.party < 2 && setting_of(l.code) == setting_of(r.code)) {
                    if (l.code == r.code) redexes.push_back({seq, i, 1});
                    else redexes.push_back({seq, i, 2});
                }
            }
        }
        if (redexes.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, redexes.size() - 1);
        const Redex rd = redexes[pick(rng)];
        const double coeff = terms[rd.term];
        terms.erase(rd.term);
        auto add = [&](const Seq& s, double c) {
            double& slot = terms[s];
            slot += c;
            if (slot == 0.0) terms.erase(s);
        };
        Seq s = rd.term;
        switch (rd.kind) {
            case 0: std::swap(s[rd.pos], s[rd.pos + 1]); add(s, coeff); break;
            case 1: s.erase(s.begin() + static_cast<long>(rd.pos)); add(s, coeff); break;
            case 2: break;
            case 3: {
                Seq without = s;
                without.erase(without.begin() + static_cast<long>(rd.pos));
                add(without, coeff);
                s[rd.pos].code = projector(setting_of(s[rd.pos].code), 0);
                add(s, -coeff);
                break;
            }
        }
    }

    Polynomial out;
    for (const auto& [seq, coeff] : terms) {
        Word w;
        for (const Letter& l : seq) {
            std::string& part = l.party == 0 ? w.alice : (l.party == 1 ? w.bob : w.eve);
            part.push_back(l.code);
        }
        out[w] += coeff;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

int MomentMatrix::find(const Word& w) const {
    auto it = moment_id.find(w);
    return it == moment_id.end() ? -1 : it->second;
}

std::vector<Word> words_up_to(const std::vector<Word>& generators, int level) {
    std::vector<Word> out{Word{}};
    std::vector<Word> frontier{Word{}};
    for (int d = 1; d <= level; ++d) {
        std::vector<Word> next;
        for (const Word& w : frontier) {
            for (const Word& g : generators) {
                const Polynomial p = reduce(w * g);
                // Products of outcome-0 projectors and free letters reduce to one word.
                if (p.size() != 1) continue;
                const Word& r = p.begin()->first;
                if (r.degree() == static_cast<std::size_t>(d)) next.push_back(r);
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

std::vector<Word> unique_basis(const std::vector<Word>& words) {
    std::vector<Word> out;
    std::unordered_map<Word, int, WordHash> seen;
    for (const Word& w : words) {
        const Polynomial p = reduce(w);
        if (p.size() != 1 || p.begin()->second != 1.0) continue;
        const Word& r = p.begin()->first;
        if (seen.emplace(r, 0).second) out.push_back(r);
    }
    return out;
}

MomentMatrix build_moment_matrix(std::vector<Word> basis) {
    MomentMatrix mm;
    mm.basis = std::move(basis);
    const std::size_t n = mm.basis.size();
    mm.entry_moment.assign(n * n, -1);
    for (std::size_t r = 0; r < n; ++r) {
        const Word left = adjoint(mm.basis[r]);
        for (std::size_t c = r; c < n; ++c) {
            const Polynomial p = reduce(left * mm.basis[c]);
            int id = -1;
            if (!p.empty()) {
                if (p.size() != 1 || p.begin()->second != 1.0)
                    throw Error("moment matrix entry does not reduce to a single word");
                const Word key = moment_key(p.begin()->first);
                auto [it, inserted] = mm.moment_id.emplace(key, static_cast<int>(mm.moments.size()));
                if (inserted) mm.moments.push_back(key);
                id = it->second;
            }
            mm.entry_moment[r * n + c] = id;
            mm.entry_moment[c * n + r] = id;
        }
    }
    return mm;
}

}  // namespace keyact::npa
