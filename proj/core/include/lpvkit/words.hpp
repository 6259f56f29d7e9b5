#pragma once

#include <Eigen/Dense>
#include <compare>
#include <span>
#include <string>
#include <vector>

#include "lpvkit/errors.hpp"

namespace lpv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A finite word over the scheduling alphabet {1, ..., n_mu}.
///
/// Letters are stored oldest first, i.e. in the order the word is written;
/// the empty word is rendered as "e" in textual form. Immutable after
/// construction.
class ScheduleWord {
public:
    ScheduleWord() = default;
    explicit ScheduleWord(std::vector<int> letters);

    /// Parses the textual form: concatenated digits, or "e" for the empty word.
    static ScheduleWord parse(const std::string& text);

    std::string str() const;

    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    int at(std::size_t i) const { return letters_[i]; }
    int first() const { return letters_.front(); }
    int last() const { return letters_.back(); }

    /// Concatenation: (*this)(other), this word first.
    ScheduleWord concat(const ScheduleWord& other) const;
    /// Word with `letter` prepended, i.e. letter written first.
    ScheduleWord prefixed(int letter) const;
    /// Word with `letter` appended.
    ScheduleWord suffixed(int letter) const;
    /// Suffix starting at letter index i.
    ScheduleWord tail(std::size_t i) const;

    auto begin() const { return letters_.begin(); }
    auto end() const { return letters_.end(); }

    bool operator==(const ScheduleWord& other) const = default;
    /// Length-then-lexicographic order; total and deterministic.
    std::strong_ordering operator<=>(const ScheduleWord& other) const;

private:
    std::vector<int> letters_;
};

/// Second moments p_sigma of the scheduling channels; p_1 = 1 always.
class ScheduleWeights {
public:
    explicit ScheduleWeights(Vector p);

    int alphabet_size() const { return static_cast<int>(p_.size()); }
    /// p_sigma for a 1-based letter.
    double of(int letter) const;
    /// p_w, the product of per letter weights; p_e = 1.
    double of_word(const ScheduleWord& w) const;

    const Vector& p() const { return p_; }

private:
    Vector p_;
};

/// All words of length <= max_len over {1, ..., n_mu}, in length-then-lex
/// order. The order is part of the external contract; selection files rely
/// on it being stable.
std::vector<ScheduleWord> enumerate_words(int n_mu, int max_len);

/// mu_w(t) = mu_{s1}(t-k+1) * ... * mu_{sk}(t) for the letters s1..sk of w,
/// with t a 0-based row of the scheduling path (rows = time, cols = channel).
/// Returns 1 for the empty word.
double mu_product(const ScheduleWord& w, const Eigen::Ref<const Matrix>& mu, Index t);

/// A_w = A_{sk} * A_{sk-1} * ... * A_{s1}; A_e is the identity.
Matrix word_matrix_product(const ScheduleWord& w, std::span<const Matrix> family);

}  // namespace lpv
