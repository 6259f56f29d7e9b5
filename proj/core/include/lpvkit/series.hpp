#pragma once

#include <map>
#include <vector>

#include "lpvkit/words.hpp"

namespace lpv {

/// A finite map from schedule words to matrices of one common shape.
/// Querying a word that was never stored is an explicit error, never a
/// silent zero. Iteration is in length-then-lex word order.
class MatrixSeries {
public:
    MatrixSeries(Index rows, Index cols) : rows_(rows), cols_(cols) {}

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    std::size_t size() const { return entries_.size(); }

    void set(const ScheduleWord& w, Matrix value);
    bool contains(const ScheduleWord& w) const { return entries_.count(w) > 0; }
    const Matrix& at(const ScheduleWord& w) const;

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    Index rows_;
    Index cols_;
    std::map<ScheduleWord, Matrix> entries_;
};

/// Per-letter symmetric second moments T_sigma, indexed 1..n_mu.
class SecondMomentSet {
public:
    explicit SecondMomentSet(std::vector<Matrix> moments);

    int alphabet_size() const { return static_cast<int>(moments_.size()); }
    const Matrix& of(int letter) const;
    const std::vector<Matrix>& all() const { return moments_; }

private:
    std::vector<Matrix> moments_;
};

}  // namespace lpv
