#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace keyact::npa {

/// Operator word split into its three mutually commuting factors.
///
/// Alice and Bob letters are projectors, encoded as `setting * 2 + outcome`
/// (binary outcomes). Eve letters are free non-Hermitian operators, encoded as
/// `index * 2 + dagger`. Only canonical words (outcome-0 projectors, no
/// adjacent repeats) appear in moment matrices.
struct Word {
    std::string alice;
    std::string bob;
    std::string eve;

    std::size_t degree() const { return alice.size() + bob.size() + eve.size(); }
    bool is_identity() const { return degree() == 0; }
    auto operator<=>(const Word&) const = default;
    bool operator==(const Word&) const = default;
};

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept;
};

char projector(int setting, int outcome);
char eve_letter(int index, bool dagger);

Word alice(int setting, int outcome = 0);
Word bob(int setting, int outcome = 0);
Word eve(int index, bool dagger = false);

/// Concatenation (operator product) without reduction.
Word operator*(const Word& lhs, const Word& rhs);

Word adjoint(const Word& w);

/// Linear combination of words.
using Polynomial = std::map<Word, double>;

/// Canonical expansion: idempotence, same-setting orthogonality and the
/// completeness substitution P_{s,1} = 1 - P_{s,0}. Cross-party commutation is
/// implicit in the factorised representation.
Polynomial reduce(const Word& w);
Polynomial reduce(const Polynomial& p);

/// Representative of {w, w*}: moments of a real moment matrix satisfy <w> = <w*>.
Word moment_key(const Word& w);

std::string to_string(const Word& w);

/// A single operator letter in an unfactorised sequence, used by the
/// random-order rewriting engine.
struct Letter {
    int party = 0;  // 0 Alice, 1 Bob, 2 Eve
    char code = 0;
    bool operator==(const Letter&) const = default;
    auto operator<=>(const Letter&) const = default;
};

/// Rewrites a flat letter sequence by repeatedly applying one randomly chosen
/// rule at a randomly chosen position. Used to test that `reduce` is confluent.
Polynomial rewrite_randomly(const std::vector<Letter>& letters, std::mt19937_64& rng);

/// Moment matrix index structure over a basis of canonical words.
struct MomentMatrix {
    std::vector<Word> basis;
    /// Moment id of entry (r, c), row-major, size basis^2.
    std::vector<int> entry_moment;
    /// Canonical key per moment id.
    std::vector<Word> moments;
    std::unordered_map<Word, int, WordHash> moment_id;

    int size() const { return static_cast<int>(basis.size()); }
    int at(int r, int c) const { return entry_moment[static_cast<std::size_t>(r) * basis.size() + c]; }
    /// Moment id of a canonical word key, or -1.
    int find(const Word& w) const;
};

/// All canonical words of degree <= level over the given generating letters.
std::vector<Word> words_up_to(const std::vector<Word>& generators, int level);

/// Deduplicates, drops zero words and returns the basis in first-seen order.
std::vector<Word> unique_basis(const std::vector<Word>& words);

MomentMatrix build_moment_matrix(std::vector<Word> basis);

}  // namespace keyact::npa
