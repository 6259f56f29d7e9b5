#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpvkit/covariances.hpp"
#include "lpvkit/hankel.hpp"
#include "lpvkit/model.hpp"
#include "lpvkit/realization.hpp"

namespace lpv {

enum class SplitVariant { analytic, residual };

/// Configuration of the end-to-end identification pipeline.
struct IdentifyConfig {
    Selection selection_det;
    Selection selection_stoch;
    std::optional<ScheduleWeights> weights;  // nullopt: estimate from the data
    std::optional<Matrix> lambda_u;          // nullopt: estimate from the data
    int max_iterations = 50;
    double tolerance = 1e-9;
    SplitVariant split = SplitVariant::residual;
    double rank_tol = 1e-8;
    double cond_max = 1e10;
    bool svd_truncation = false;
    bool stochastic_stage = true;
    // Residual power below this fraction of the output power marks the
    // stochastic part degenerate (zero-dimensional block instead of a rank
    // error); near-zero covariances below 10 * rank_tol do the same.
    double stochastic_power_tol = 1e-3;

    void validate() const;
};

struct RecursionDiagnostics {
    int iterations = 0;
    bool converged = false;
    double final_increment = 0.0;
    double min_p_eigenvalue = 0.0;
    std::vector<double> increments;
};

/// Everything the pipeline produced, including per-stage diagnostics.
struct IdentifyReport {
    LpvSsaModel model;
    DeterministicRealization deterministic;
    std::optional<StochasticRealization> stochastic;

    Vector p_hat;                  // estimated scheduling second moments
    Matrix lambda_u_hat;           // estimated input variance
    double lambda_u_cond = 0.0;    // condition number of the Lambda_u actually used
    Vector hankel_singular_values_det;
    Vector hankel_singular_values_stoch;  // empty when the stage was skipped
    MatrixSeries psi_uy{0, 0};
    MatrixSeries psi_ys{0, 0};
    RecursionDiagnostics recursion;
    bool stochastic_degenerate = false;
    double stochastic_power_ratio = 0.0;

    std::string to_json(int indent = -1) const;
};

/// Runs, in order: empirical input-output covariances over the words the
/// deterministic selection requires, deterministic realization, covariance
/// splitting (analytic or residual variant), stochastic realization, and the
/// block composition. Any stage failure is rethrown as StageError carrying
/// the diagnostics gathered so far.
IdentifyReport identify(const Dataset& data, const IdentifyConfig& config);

struct SweepCell {
    Index n_samples = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double sub_markov_error = 0.0;  // max_{|w| <= 3} max-abs entry of M_hat(w) - M(w)
};

/// Simulates the generator at every (N, seed) pair, identifies, and records
/// the sub-Markov estimation error against the generator. Per-cell failures
/// are recorded and the sweep continues.
std::vector<SweepCell> consistency_sweep(const LpvSsaModel& generator,
                                         std::span<const Index> lengths,
                                         std::span<const std::uint64_t> seeds,
                                         const IdentifyConfig& config,
                                         const GenConfig& generation);

IdentifyConfig load_identify_config(const std::string& path);
void save_identify_config(const IdentifyConfig& config, const std::string& path);

}  // namespace lpv
