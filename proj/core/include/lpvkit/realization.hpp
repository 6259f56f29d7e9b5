#pragma once

#include <span>
#include <vector>

#include "lpvkit/hankel.hpp"
#include "lpvkit/model.hpp"
#include "lpvkit/series.hpp"

namespace lpv {

/// Deterministic LPV-SSA tuple ({A_sigma, B_sigma}, C, D).
struct DeterministicRealization {
    std::vector<Matrix> A;
    std::vector<Matrix> B;
    Matrix C;
    Matrix D;

    int n_mu() const { return static_cast<int>(A.size()); }
    Index dim() const { return A.empty() ? 0 : A.front().rows(); }
    Matrix sub_markov(const ScheduleWord& w) const;
};

/// Stochastic realization in forward innovation form: state matrices A
/// (already rescaled by 1/sqrt(p_sigma)), Hankel input blocks G, output map
/// C, and the gain/variance/state-moment limits of the covariance recursion.
struct StochasticRealization {
    std::vector<Matrix> A;
    std::vector<Matrix> G;
    std::vector<Matrix> K;
    std::vector<Matrix> Q;
    std::vector<Matrix> P;
    Matrix C;
    int iterations_used = 0;
    bool converged = false;
    double final_increment = 0.0;

    int n_mu() const { return static_cast<int>(Q.size()); }
    Index dim() const { return C.cols(); }
};

struct HoKalmanOptions {
    double cond_max = 1e10;   // refuse to invert beyond this
    double warn_cond = 1e6;   // warn on stderr above this
    bool svd_truncation = false;  // rank-truncated pseudo-inverse for over-sized selections
    int truncation_rank = -1;     // rank to keep; -1 = numerical rank at rank_tol
    double rank_tol = 1e-8;
};

/// Basis-reduced Ho-Kalman step:
///   A_sigma = H^-1 H_sigma,  B_sigma = H^-1 H_{alpha,sigma},  C = H_beta,
///   D = M(e),
/// with linear solves against H (never an explicit inverse).
DeterministicRealization ho_kalman(const Matrix& hankel, std::span<const Matrix> shifted,
                                   std::span<const Matrix> input, const Matrix& output,
                                   const Matrix& m_eps, const HoKalmanOptions& opts = {});

/// Builds the four Hankel matrices of a sub-Markov series and applies
/// ho_kalman. For an exact rank-n series this reproduces the series exactly.
DeterministicRealization realize_deterministic(const MatrixSeries& psi, const Selection& sel,
                                               const HoKalmanOptions& opts = {});

/// Solves P_sigma = p_sigma * sum_s1 (A_s1 P_s1 A_s1^T + B_s1 Lambda_u B_s1^T)
/// by vectorisation of the shared kernel S with P_sigma = p_sigma S.
/// Requires the stability operator of (A, p) to have spectral radius < 1.
std::vector<Matrix> solve_stationary_lyapunov(std::span<const Matrix> A, std::span<const Matrix> B,
                                              const Matrix& lambda_u,
                                              const ScheduleWeights& weights);

struct RecursionResult {
    std::vector<Matrix> K;
    std::vector<Matrix> Q;
    std::vector<Matrix> P;
    int iterations = 0;
    bool converged = false;
    double final_increment = 0.0;
    std::vector<double> increments;     // per-iteration max_sigma ||P^{i+1}-P^i||_F
    double min_p_eigenvalue = 0.0;      // smallest eigenvalue seen over all P iterates
};

/// Covariance recursion from P^0 = 0:
///   Q^i_sigma = p_sigma T_sigma - C P^i_sigma C^T
///   K^i_sigma = (G_sigma sqrt(p_sigma) - A_sigma P^i_sigma C^T) (Q^i_sigma)^-1
///   P^{i+1}_sigma = p_sigma sum_s1 (A_s1 P^i_s1 A_s1^T + K^i_s1 Q^i_s1 K^i_s1^T)
/// Stops at max_iter or once the increment drops below tol. A Q iterate with
/// minimum eigenvalue <= pd_tol (relative to its trace scale) raises
/// IndefiniteError.
RecursionResult stochastic_recursion(std::span<const Matrix> A, std::span<const Matrix> G,
                                     const Matrix& C, const SecondMomentSet& second_moments,
                                     const ScheduleWeights& weights, int max_iter, double tol);

/// Algorithm: Hankels over the stochastic covariance series (M(e) = I forced),
/// ho_kalman, rescale A_sigma by 1/sqrt(p_sigma), then the covariance
/// recursion.
StochasticRealization realize_stochastic(const MatrixSeries& psi_ys,
                                         const SecondMomentSet& second_moments,
                                         const Selection& sel, const ScheduleWeights& weights,
                                         int max_iter, double tol,
                                         const HoKalmanOptions& opts = {});

/// Block-diagonal composition of the deterministic and stochastic parts:
///   A = diag(A_d, A_s), B = [B_d; 0], K = [0; K_s], C = [C_d C_s], D = D_d,
/// with Q taken from the stochastic part.
LpvSsaModel compose(const DeterministicRealization& det, const StochasticRealization& stoch,
                    const ScheduleWeights& weights);

/// Deterministic part viewed as a full model with K = 0, Q = 0.
LpvSsaModel to_model(const DeterministicRealization& det, const ScheduleWeights& weights);

}  // namespace lpv
