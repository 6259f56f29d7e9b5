#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lpvkit/words.hpp"

namespace lpv {

/// Discrete-time LPV state-space model with affine scheduling dependence:
///
///   x(t+1) = sum_i (A_i x(t) + B_i u(t) + K_i v(t)) mu_i(t)
///   y(t)   = C x(t) + D u(t) + v(t)
///
/// together with the scheduling second moments p_sigma. Immutable in spirit:
/// validate() is called by every factory in this library, and all operations
/// take the model by const reference.
struct LpvSsaModel {
    int n_x = 0;
    int n_y = 0;
    int n_u = 0;
    int n_mu = 0;
    std::vector<Matrix> A;  // n_mu matrices, n_x x n_x
    std::vector<Matrix> B;  // n_mu matrices, n_x x n_u
    std::vector<Matrix> K;  // n_mu matrices, n_x x n_y
    std::vector<Matrix> Q;  // n_mu matrices, n_y x n_y, symmetric PSD
    Matrix C;               // n_y x n_x
    Matrix D;               // n_y x n_u
    ScheduleWeights weights{Vector::Ones(1)};

    /// Throws ValidationError / ShapeError when an invariant is broken.
    void validate() const;
};

/// Aligned sample paths, rows = time (t = 1..N maps to rows 0..N-1).
/// Column 1 of mu is identically one.
struct Dataset {
    Matrix y;   // N x n_y
    Matrix u;   // N x n_u
    Matrix mu;  // N x n_mu

    Index size() const { return y.rows(); }
    void validate() const;
};

/// Spectral radius of sum_sigma p_sigma (A_sigma (x) A_sigma); the model is
/// mean-square stable iff the result is < 1.
double stability_operator_spectral_radius(const LpvSsaModel& model);

/// Sub-Markov parameter M(w): D for the empty word, otherwise
/// C * A_s * B_sigma where sigma is the first letter of w and s the rest.
Matrix sub_markov(const LpvSsaModel& model, const ScheduleWord& w);

/// An i.i.d. scalar distribution used by the data generators.
struct ScalarDist {
    enum class Kind { constant, uniform, normal };
    Kind kind = Kind::constant;
    double a = 0.0;  // constant value, uniform lower bound, or normal mean
    double b = 0.0;  // uniform upper bound or normal standard deviation

    static ScalarDist constant(double v) { return {Kind::constant, v, 0.0}; }
    static ScalarDist uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
    static ScalarDist normal(double mean, double stddev) { return {Kind::normal, mean, stddev}; }
    /// Parses "constant:1", "uniform:-1.5,1.5" or "normal:0,1".
    static ScalarDist parse(const std::string& text);

    double sample(std::mt19937_64& rng) const;
    double second_moment() const;
    std::string str() const;
};

struct SimOptions {
    Index burn_in = 1000;
    double divergence_limit = 1e12;
};

/// Iterates the model equations from x = 0 over explicit input, scheduling
/// and noise paths (all of length burn_in + N), discarding the first
/// burn_in samples. Unstable models produce a warning on stderr; a state
/// norm beyond the divergence limit raises DivergenceError.
Dataset simulate(const LpvSsaModel& model, const Eigen::Ref<const Matrix>& u,
                 const Eigen::Ref<const Matrix>& mu, const Eigen::Ref<const Matrix>& v,
                 const SimOptions& opts = {});

/// Configuration of the seeded data generator reproducing the reference
/// experiment by default: u ~ U(-1.5,1.5), mu_2.. ~ U(-1.5,1.5), v ~ N(0,1).
struct GenConfig {
    Index n_samples = 0;
    Index burn_in = 1000;
    std::uint64_t seed = 0;
    ScalarDist input = ScalarDist::uniform(-1.5, 1.5);
    ScalarDist scheduling = ScalarDist::uniform(-1.5, 1.5);
    ScalarDist noise = ScalarDist::normal(0.0, 1.0);
};

struct SimResult {
    Dataset data;
    Matrix noise;  // v aligned with data rows, for SNR bookkeeping
};

/// Draws u, mu, v from the configured distributions (one PRNG stream per
/// signal, split deterministically from the seed) and simulates.
SimResult generate_dataset(const LpvSsaModel& model, const GenConfig& config);

/// Noise-free recursion x^d(t+1) = sum_i (A_i x^d + B_i u) mu_i from x^d = 0
/// over the full path; returns y^d. Equals simulate with K = 0, v = 0 and no
/// burn-in discard.
Matrix simulate_deterministic(const LpvSsaModel& model, const Eigen::Ref<const Matrix>& u,
                              const Eigen::Ref<const Matrix>& mu,
                              double divergence_limit = 1e12);

/// Innovation-form one-step-ahead predictor started from x = 0:
///   yhat(t) = C xhat(t) + D u(t)
///   xhat(t+1) = sum_i (A_i xhat + B_i u + K_i (y - yhat)) mu_i(t)
Matrix predict_one_step(const LpvSsaModel& model, const Dataset& data);

LpvSsaModel load_model(const std::string& path);
void save_model(const LpvSsaModel& model, const std::string& path);

Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& data, const std::string& path);
/// Noise CSV: header t,e1..e{n}, used for SNR bookkeeping.
void save_noise_csv(const Matrix& noise, const std::string& path);
Matrix load_noise_csv(const std::string& path);

}  // namespace lpv
