#pragma once

#include <set>
#include <string>
#include <vector>

#include "lpvkit/series.hpp"

namespace lpv {

/// An n-selection (alpha, beta): n Hankel row labels (word u_i, output index
/// k_i) and n column labels (letter sigma_j, word v_j, column index l_j).
/// Indices are 1-based, mirroring the notation of the selection files.
struct Selection {
    struct Row {
        ScheduleWord word;
        int output_index = 1;
        bool operator==(const Row&) const = default;
    };
    struct Col {
        int letter = 1;
        ScheduleWord word;
        int col_index = 1;
        bool operator==(const Col&) const = default;
    };

    std::vector<Row> alpha;
    std::vector<Col> beta;

    int order() const { return static_cast<int>(alpha.size()); }

    /// card(alpha) = card(beta), no duplicates, all words in Sigma^n, and
    /// all indices inside [1, n_y] x [1, n_cols] x [1, n_mu].
    void validate(int n_mu, Index n_rows, Index n_cols) const;
};

/// [H]_{i,j} = [M(sigma_j v_j u_i)]_{k_i, l_j}
Matrix build_hankel(const MatrixSeries& series, const Selection& sel);

/// [H_sigma]_{i,j} = [M(sigma_j v_j sigma u_i)]_{k_i, l_j}
Matrix build_shifted_hankel(const MatrixSeries& series, const Selection& sel, int sigma);

/// [H_{alpha,sigma}]_{i,j} = [M(sigma u_i)]_{k_i, j}, j = 1..cols(series)
Matrix build_input_hankel(const MatrixSeries& series, const Selection& sel, int sigma);

/// [H_beta]_{i,j} = [M(sigma_j v_j)]_{i, l_j}, i = 1..rows(series)
Matrix build_output_hankel(const MatrixSeries& series, const Selection& sel);

/// Every word the four Hankel constructions read for this selection,
/// including the empty word (for M(e)).
std::set<ScheduleWord> hankel_word_requirements(const Selection& sel, int n_mu);

enum class SearchStrategy { exhaustive, greedy };

/// Searches for an n-selection whose Hankel has numerical rank n
/// (sigma_min / sigma_max > rank_tol). The exhaustive strategy scans
/// candidate row and column subsets in enumeration order (with rank
/// pruning); the greedy strategy picks pivots of a column-pivoted QR of the
/// rectangular pre-Hankel over all words of length <= n. Both are
/// deterministic. Throws RankError, reporting the best achieved rank, when
/// no rank-n selection exists.
Selection search_selection(const MatrixSeries& series, int n, int n_mu,
                           SearchStrategy strategy = SearchStrategy::greedy,
                           double rank_tol = 1e-8);

Selection load_selection(const std::string& path);
void save_selection(const Selection& sel, const std::string& path);
std::string selection_to_json(const Selection& sel);
Selection selection_from_json(const std::string& text);

}  // namespace lpv
