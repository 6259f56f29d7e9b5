#pragma once

#include <random>
#include <vector>

#include "lpvkit/covariances.hpp"
#include "lpvkit/identify.hpp"
#include "lpvkit/model.hpp"
#include "lpvkit/realization.hpp"

namespace lpvtest {

using lpv::Index;
using lpv::Matrix;
using lpv::ScheduleWord;
using lpv::Vector;

inline ScheduleWord word(const std::string& text) { return ScheduleWord::parse(text); }

/// The three-state, two-channel reference system used throughout the tests.
inline lpv::LpvSsaModel sec6_model() {
    lpv::LpvSsaModel m;
    m.n_x = 3;
    m.n_y = 1;
    m.n_u = 1;
    m.n_mu = 2;
    m.A.resize(2);
    m.A[0] = Matrix::Zero(3, 3);
    m.A[0](0, 0) = 0.4;
    m.A[0](0, 1) = 0.4;
    m.A[1] = Matrix::Zero(3, 3);
    m.A[1].bottomRightCorner(2, 2).setConstant(0.4);
    m.B.resize(2);
    m.B[0] = Matrix::Ones(3, 1);
    m.B[1] = Matrix::Ones(3, 1);
    m.B[1](1, 0) = 0.0;
    m.K.resize(2);
    m.K[0] = Matrix::Zero(3, 1);
    m.K[0](0, 0) = -0.036;
    m.K[0](2, 0) = 1.0;
    m.K[1] = Matrix::Zero(3, 1);
    m.K[1](1, 0) = 0.015;
    m.K[1](2, 0) = 1.17;
    m.Q = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.75)};
    m.C = Matrix::Zero(1, 3);
    m.C(0, 0) = 1.0;
    m.D = Matrix::Constant(1, 1, 1.0);
    m.weights = lpv::ScheduleWeights((Vector(2) << 1.0, 0.75).finished());
    m.validate();
    return m;
}

inline lpv::Selection sec6_selection_det() {
    lpv::Selection sel;
    sel.alpha = {{word("e"), 1}, {word("1"), 1}, {word("21"), 1}};
    sel.beta = {{2, word("e"), 1}, {1, word("2"), 1}, {2, word("21"), 1}};
    return sel;
}

inline lpv::Selection sec6_selection_stoch() {
    lpv::Selection sel;
    sel.alpha = {{word("e"), 1}, {word("1"), 1}, {word("21"), 1}};
    sel.beta = {{1, word("e"), 1}, {1, word("2"), 1}, {1, word("21"), 1}};
    return sel;
}

inline lpv::IdentifyConfig sec6_config() {
    lpv::IdentifyConfig config;
    config.selection_det = sec6_selection_det();
    config.selection_stoch = sec6_selection_stoch();
    return config;
}

/// Exact sub-Markov series of a model over all words up to max_len.
inline lpv::MatrixSeries exact_series(const lpv::LpvSsaModel& model, int max_len) {
    return lpv::exact_psi_uy(model, lpv::enumerate_words(model.n_mu, max_len));
}

/// Random stable model; spectral radius of the stability operator is scaled
/// to `radius`. Noise blocks are zero (deterministic-part tests).
inline lpv::LpvSsaModel random_stable_model(std::mt19937_64& rng, int n_x, int n_y, int n_u,
                                            int n_mu, double radius = 0.6) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.3, 1.5);
    const auto fill = [&](Index r, Index c) {
        Matrix m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) m(i, j) = unit(rng);
        return m;
    };
    lpv::LpvSsaModel m;
    m.n_x = n_x;
    m.n_y = n_y;
    m.n_u = n_u;
    m.n_mu = n_mu;
    Vector p(n_mu);
    p(0) = 1.0;
    for (int s = 1; s < n_mu; ++s) p(s) = wdist(rng);
    m.weights = lpv::ScheduleWeights(p);
    for (int s = 0; s < n_mu; ++s) {
        m.A.push_back(fill(n_x, n_x));
        m.B.push_back(fill(n_x, n_u));
        m.K.push_back(Matrix::Zero(n_x, n_y));
        m.Q.push_back(Matrix::Zero(n_y, n_y));
    }
    m.C = fill(n_y, n_x);
    m.D = fill(n_y, n_u);
    const double rho = lpv::stability_operator_spectral_radius(m);
    if (rho > 0) {
        const double scale = std::sqrt(radius / rho);
        for (auto& a : m.A) a *= scale;
    }
    m.validate();
    return m;
}

/// Random model that is minimal (its rectangular Hankel over words of
/// length <= n_x has rank n_x); regenerates until minimality holds.
inline lpv::LpvSsaModel random_minimal_model(std::mt19937_64& rng, int n_x, int n_y, int n_u,
                                             int n_mu, double radius = 0.6) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        lpv::LpvSsaModel m = random_stable_model(rng, n_x, n_y, n_u, n_mu, radius);
        try {
            const auto series = exact_series(m, 2 * n_x + 1);
            (void)lpv::search_selection(series, n_x, n_mu, lpv::SearchStrategy::greedy, 1e-8);
            return m;
        } catch (const lpv::RankError&) {
            continue;
        }
    }
    throw std::runtime_error("could not draw a minimal model");
}

/// Brute-force truncated series form of the deterministic response:
///   y(t) = D u(t) + sum_{|sigma v| <= t-1} C A_v B_sigma u(t - |sigma v|) mu_{sigma v}(t-1)
/// Only usable for short horizons; this is the test oracle for the
/// state-recursion simulator.
inline Matrix series_form_deterministic(const lpv::LpvSsaModel& model,
                                        const Eigen::Ref<const Matrix>& u,
                                        const Eigen::Ref<const Matrix>& mu) {
    const Index n = u.rows();
    Matrix y(n, model.n_y);
    for (Index t = 0; t < n; ++t) {
        Vector acc = model.D * u.row(t).transpose();
        for (int len = 1; len <= t; ++len) {
            for (const auto& w : lpv::enumerate_words(model.n_mu, len)) {
                if (static_cast<int>(w.size()) != len) continue;
                const Matrix m = lpv::sub_markov(model, w);
                acc += m * u.row(t - len).transpose() * lpv::mu_product(w, mu, t - 1);
            }
        }
        y.row(t) = acc.transpose();
    }
    return y;
}

/// Scalar fixed point of the three coupled recursion equations, iterated
/// directly; independent of the library implementation.
struct ScalarRecursionFixedPoint {
    double k = 0.0;
    double q = 0.0;
    double p = 0.0;
};

inline ScalarRecursionFixedPoint scalar_recursion_oracle(double a, double g, double c, double m,
                                                         double weight, int iterations) {
    double p = 0.0, q = 0.0, k = 0.0;
    for (int i = 0; i < iterations; ++i) {
        q = weight * m - c * p * c;
        k = (g * std::sqrt(weight) - a * p * c) / q;
        p = weight * (a * p * a + k * q * k);
    }
    return {k, q, p};
}

}  // namespace lpvtest
