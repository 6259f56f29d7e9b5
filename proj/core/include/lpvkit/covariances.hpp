#pragma once

#include <span>

#include "lpvkit/model.hpp"
#include "lpvkit/realization.hpp"
#include "lpvkit/series.hpp"

namespace lpv {

/// Scheduling-weighted lagged product path
///   z^r_w(t) = r(t - |w|) mu_w(t-1) / sqrt(p_w),
/// defined for 0-based rows t = |w| .. N-1 (every factor has a sample);
/// z^r_e = r. `values.row(i)` holds z(start + i).
struct LaggedPath {
    Index start = 0;
    Matrix values;
};

LaggedPath z_path(const Eigen::Ref<const Matrix>& r, const Eigen::Ref<const Matrix>& mu,
                  const ScheduleWord& w, const ScheduleWeights& weights);

/// Empirical input-output covariances
///   Psi^N(w) = (1/sqrt(p_w)) [(1/N) sum_t y(t) z^u_w(t)^T] Lambda_u^-1,
/// with the empty word handled as (1/N) sum_t y(t) u(t)^T Lambda_u^-1.
/// Sums run over t = |w|+1 .. N with divisor N.
MatrixSeries empirical_psi_uy(const Dataset& data, std::span<const ScheduleWord> words,
                              const ScheduleWeights& weights, const Matrix& lambda_u);

struct OutputMoments {
    MatrixSeries lambda;  // Lambda^{y,N}_w = (1/N) sum_t y(t) z^y_w(t)^T, keyed by the full word
    SecondMomentSet second;  // T^{y,N}_{sigma,sigma} = (1/N) sum_t z^y_sigma z^y_sigma^T
};

OutputMoments empirical_output_moments(const Dataset& data, std::span<const ScheduleWord> words,
                                       const ScheduleWeights& weights);

/// Exact oracle: the input-output covariance function of a stationary model
/// equals the sub-Markov function of its deterministic part.
MatrixSeries exact_psi_uy(const LpvSsaModel& model, std::span<const ScheduleWord> words);

struct DeterministicMoments {
    MatrixSeries lambda;     // Lambda_S keyed by the full word sigma w
    SecondMomentSet second;  // T_{sigma,sigma,S}
};

/// Analytic contribution of the deterministic subsystem to the output
/// covariances:
///   Lambda_S(sigma w) = (1/sqrt(p_{sigma w})) C A_w (A_sigma P_sigma C^T + B_sigma Lambda_u)
///   T_{sigma,sigma,S} = (1/p_sigma) (C P_sigma C^T + Lambda_u)
/// with P_sigma from solve_stationary_lyapunov. Requires n_u = n_y (the
/// displayed formulas only type-check there). Words must be nonempty.
DeterministicMoments exact_deterministic_moments(const DeterministicRealization& det,
                                                 const Matrix& lambda_u,
                                                 const ScheduleWeights& weights,
                                                 std::span<const ScheduleWord> words);

struct ResidualMoments {
    MatrixSeries psi;        // Psi^N_{y^s}(w) = (1/N) sum_t yhat^s(t) z^{yhat^s}_w(t)^T
    SecondMomentSet second;  // T^N_sigma over the residual path
    Matrix residual;         // yhat^s = y - yhat^d
    double power_ratio = 0.0;  // mean |yhat^s|^2 / mean |y|^2
};

/// Residual-based stochastic covariances: simulates the deterministic part
/// on the dataset's (u, mu), forms yhat^s = y - yhat^d and applies the
/// empirical covariance formulas to the residual path.
ResidualMoments residual_psi_ys(const Dataset& data, const DeterministicRealization& det,
                                std::span<const ScheduleWord> words,
                                const ScheduleWeights& weights);

/// Empirical input variance (1/N) sum_t u(t) u(t)^T.
Matrix estimate_lambda_u(const Dataset& data);
/// Empirical scheduling second moments p_sigma = (1/N) sum_t mu_sigma(t)^2,
/// with p_1 forced to exactly 1.
ScheduleWeights estimate_weights(const Dataset& data);

}  // namespace lpv
