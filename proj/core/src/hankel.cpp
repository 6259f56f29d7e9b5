#include "lpvkit/hankel.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>

namespace lpv {

void Selection::validate(int n_mu, Index n_rows, Index n_cols) const {
    const auto n = alpha.size();
    if (n == 0 || beta.size() != n)
        throw ValidationError("selection must have card(alpha) = card(beta) >= 1");
    for (const auto& r : alpha) {
        if (r.word.size() > n) throw ValidationError("alpha word longer than selection order");
        if (r.output_index < 1 || r.output_index > n_rows)
            throw ValidationError("alpha output index outside [1, n_y]");
    }
    for (const auto& c : beta) {
        if (c.letter < 1 || c.letter > n_mu) throw ValidationError("beta letter outside alphabet");
        if (c.word.size() > n) throw ValidationError("beta word longer than selection order");
        if (c.col_index < 1 || c.col_index > n_cols)
            throw ValidationError("beta column index outside [1, n_cols]");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (alpha[i] == alpha[j]) throw ValidationError("duplicate entry in alpha");
            if (beta[i] == beta[j]) throw ValidationError("duplicate entry in beta");
        }
}

namespace {

double entry(const MatrixSeries& series, const ScheduleWord& w, int row, int col) {
    return series.at(w)(row - 1, col - 1);
}

}  // namespace

Matrix build_hankel(const MatrixSeries& series, const Selection& sel) {
    const int n = sel.order();
    Matrix h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto& r = sel.alpha[static_cast<std::size_t>(i)];
            const auto& c = sel.beta[static_cast<std::size_t>(j)];
            h(i, j) = entry(series, c.word.prefixed(c.letter).concat(r.word), r.output_index,
                            c.col_index);
        }
    return h;
}

Matrix build_shifted_hankel(const MatrixSeries& series, const Selection& sel, int sigma) {
    const int n = sel.order();
    Matrix h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto& r = sel.alpha[static_cast<std::size_t>(i)];
            const auto& c = sel.beta[static_cast<std::size_t>(j)];
            const ScheduleWord w =
                c.word.prefixed(c.letter).concat(r.word.prefixed(sigma));
            h(i, j) = entry(series, w, r.output_index, c.col_index);
        }
    return h;
}

Matrix build_input_hankel(const MatrixSeries& series, const Selection& sel, int sigma) {
    const int n = sel.order();
    Matrix h(n, series.cols());
    for (int i = 0; i < n; ++i) {
        const auto& r = sel.alpha[static_cast<std::size_t>(i)];
        h.row(i) = series.at(r.word.prefixed(sigma)).row(r.output_index - 1);
    }
    return h;
}

Matrix build_output_hankel(const MatrixSeries& series, const Selection& sel) {
    const int n = sel.order();
    Matrix h(series.rows(), n);
    for (int j = 0; j < n; ++j) {
        const auto& c = sel.beta[static_cast<std::size_t>(j)];
        h.col(j) = series.at(c.word.prefixed(c.letter)).col(c.col_index - 1);
    }
    return h;
}

std::set<ScheduleWord> hankel_word_requirements(const Selection& sel, int n_mu) {
    std::set<ScheduleWord> words;
    words.insert(ScheduleWord{});
    for (const auto& c : sel.beta) {
        const ScheduleWord head = c.word.prefixed(c.letter);
        words.insert(head);
        for (const auto& r : sel.alpha) {
            words.insert(head.concat(r.word));
            for (int s = 1; s <= n_mu; ++s) words.insert(head.concat(r.word.prefixed(s)));
        }
    }
    for (const auto& r : sel.alpha)
        for (int s = 1; s <= n_mu; ++s) words.insert(r.word.prefixed(s));
    return words;
}

namespace {

struct Candidates {
    std::vector<Selection::Row> rows;
    std::vector<Selection::Col> cols;
};

Candidates enumerate_candidates(const MatrixSeries& series, int n, int n_mu) {
    Candidates cand;
    const auto words = enumerate_words(n_mu, n);
    for (const auto& w : words)
        for (int k = 1; k <= series.rows(); ++k) cand.rows.push_back({w, k});
    for (int s = 1; s <= n_mu; ++s)
        for (const auto& w : words)
            for (int l = 1; l <= series.cols(); ++l) cand.cols.push_back({s, w, l});
    return cand;
}

Matrix full_hankel(const MatrixSeries& series, const Candidates& cand) {
    Matrix h(static_cast<Index>(cand.rows.size()), static_cast<Index>(cand.cols.size()));
    for (std::size_t i = 0; i < cand.rows.size(); ++i)
        for (std::size_t j = 0; j < cand.cols.size(); ++j) {
            const auto& r = cand.rows[i];
            const auto& c = cand.cols[j];
            h(static_cast<Index>(i), static_cast<Index>(j)) =
                entry(series, c.word.prefixed(c.letter).concat(r.word), r.output_index,
                      c.col_index);
        }
    return h;
}

int numerical_rank(const Matrix& m, double rank_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0) return 0;
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) / sv(0) > rank_tol) ++rank;
    return rank;
}

// First (in enumeration order) subset of `count` indices whose rows of `m`
// are numerically independent; returns the best achieved rank if none.
std::pair<std::vector<Index>, int> first_independent_subset(const Matrix& m, int count,
                                                            double rank_tol) {
    std::vector<Index> chosen;
    Matrix sel(count, m.cols());
    int best = 0;
    for (Index i = 0; i < m.rows() && static_cast<int>(chosen.size()) < count; ++i) {
        sel.row(static_cast<Index>(chosen.size())) = m.row(i);
        const int r = numerical_rank(sel.topRows(static_cast<Index>(chosen.size()) + 1), rank_tol);
        if (r == static_cast<int>(chosen.size()) + 1) {
            chosen.push_back(i);
            best = r;
        }
    }
    return {chosen, best};
}

}  // namespace

Selection search_selection(const MatrixSeries& series, int n, int n_mu, SearchStrategy strategy,
                           double rank_tol) {
    if (n < 1) throw RangeError("selection order must be >= 1");
    const Candidates cand = enumerate_candidates(series, n, n_mu);
    const Matrix h = full_hankel(series, cand);

    std::vector<Index> rsel, csel;
    if (strategy == SearchStrategy::exhaustive) {
        // Greedily extending with the first independent row (then column) in
        // enumeration order visits exactly the subsets a full scan would
        // accept first; dependent prefixes can never reach rank n.
        auto [rows, rbest] = first_independent_subset(h, n, rank_tol);
        if (static_cast<int>(rows.size()) < n)
            throw RankError("no rank-" + std::to_string(n) + " selection exists (best rank " +
                                std::to_string(rbest) + ")",
                            0.0, 0.0, rbest);
        Matrix hr(n, h.cols());
        for (int i = 0; i < n; ++i) hr.row(i) = h.row(rows[static_cast<std::size_t>(i)]);
        auto [cols, cbest] = first_independent_subset(hr.transpose(), n, rank_tol);
        if (static_cast<int>(cols.size()) < n)
            throw RankError("no rank-" + std::to_string(n) + " selection exists (best rank " +
                                std::to_string(cbest) + ")",
                            0.0, 0.0, cbest);
        rsel = rows;
        csel = cols;
    } else {
        // Maximal-volume pivoting: column-pivoted QR picks the n best
        // columns, then the n best rows restricted to them.
        Eigen::ColPivHouseholderQR<Matrix> qr_cols(h);
        Matrix hc(h.rows(), n);
        for (int j = 0; j < n; ++j) {
            csel.push_back(qr_cols.colsPermutation().indices()(j));
            hc.col(j) = h.col(csel.back());
        }
        Eigen::ColPivHouseholderQR<Matrix> qr_rows(hc.transpose());
        for (int i = 0; i < n; ++i) rsel.push_back(qr_rows.colsPermutation().indices()(i));
        std::sort(rsel.begin(), rsel.end());
        std::sort(csel.begin(), csel.end());
    }

    Selection out;
    for (Index i : rsel) out.alpha.push_back(cand.rows[static_cast<std::size_t>(i)]);
    for (Index j : csel) out.beta.push_back(cand.cols[static_cast<std::size_t>(j)]);

    const Matrix square = build_hankel(series, out);
    Eigen::JacobiSVD<Matrix> svd(square);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(n - 1);
    if (!(smax > 0.0) || smin / smax <= rank_tol) {
        const int best = numerical_rank(h, rank_tol);
        throw RankError("no rank-" + std::to_string(n) + " selection found (best rank " +
                            std::to_string(std::min(best, n)) + ")",
                        smin, smax, std::min(best, n));
    }
    return out;
}

}  // namespace lpv
