#include "lpvkit/covariances.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace lpv {

LaggedPath z_path(const Eigen::Ref<const Matrix>& r, const Eigen::Ref<const Matrix>& mu,
                  const ScheduleWord& w, const ScheduleWeights& weights) {
    const Index n = r.rows();
    if (mu.rows() != n) throw ShapeError("signal and scheduling paths must have equal length");
    const Index k = static_cast<Index>(w.size());
    if (n <= k) throw RangeError("path of length " + std::to_string(n) +
                                 " too short for word of length " + std::to_string(k));

    LaggedPath out;
    out.start = k;
    out.values.resize(n - k, r.cols());
    if (k == 0) {
        out.values = r;
        return out;
    }
    const double inv_sqrt_pw = 1.0 / std::sqrt(weights.of_word(w));
    for (Index t = k; t < n; ++t)
        out.values.row(t - k) = r.row(t - k) * (mu_product(w, mu, t - 1) * inv_sqrt_pw);
    return out;
}

namespace {

// (1/N) sum_{t=|w|+1..N} a(t) z^b_w(t)^T with divisor N.
Matrix lagged_average(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b,
                      const Eigen::Ref<const Matrix>& mu, const ScheduleWord& w,
                      const ScheduleWeights& weights) {
    const LaggedPath z = z_path(b, mu, w, weights);
    const Index n = a.rows();
    return a.bottomRows(n - z.start).transpose() * z.values / static_cast<double>(n);
}

Matrix solve_right(const Matrix& a, const Matrix& lambda_u) {
    // X = A * Lambda_u^-1 via a symmetric positive definite solve.
    Eigen::LDLT<Matrix> ldlt(lambda_u);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SolverError("Lambda_u is not symmetric positive definite");
    return ldlt.solve(a.transpose()).transpose();
}

}  // namespace

MatrixSeries empirical_psi_uy(const Dataset& data, std::span<const ScheduleWord> words,
                              const ScheduleWeights& weights, const Matrix& lambda_u) {
    data.validate();
    if (lambda_u.rows() != data.u.cols() || lambda_u.cols() != data.u.cols())
        throw ShapeError("Lambda_u shape does not match the input dimension");

    const Index n = data.size();
    MatrixSeries out(data.y.cols(), data.u.cols());
    for (const auto& w : words) {
        if (w.empty()) {
            const Matrix avg = data.y.transpose() * data.u / static_cast<double>(n);
            out.set(w, solve_right(avg, lambda_u));
            continue;
        }
        const Matrix avg = lagged_average(data.y, data.u, data.mu, w, weights);
        out.set(w, solve_right(avg / std::sqrt(weights.of_word(w)), lambda_u));
    }
    return out;
}

OutputMoments empirical_output_moments(const Dataset& data, std::span<const ScheduleWord> words,
                                       const ScheduleWeights& weights) {
    data.validate();
    const Index n = data.size();
    MatrixSeries lambda(data.y.cols(), data.y.cols());
    for (const auto& w : words) {
        if (w.empty()) throw RangeError("output moments are defined for nonempty words only");
        lambda.set(w, lagged_average(data.y, data.y, data.mu, w, weights));
    }
    std::vector<Matrix> second;
    for (int s = 1; s <= weights.alphabet_size(); ++s) {
        const LaggedPath z = z_path(data.y, data.mu, ScheduleWord({s}), weights);
        Matrix t = z.values.transpose() * z.values / static_cast<double>(n);
        second.push_back(((t + t.transpose()) / 2.0).eval());
    }
    return {std::move(lambda), SecondMomentSet(std::move(second))};
}

MatrixSeries exact_psi_uy(const LpvSsaModel& model, std::span<const ScheduleWord> words) {
    model.validate();
    MatrixSeries out(model.n_y, model.n_u);
    for (const auto& w : words) out.set(w, sub_markov(model, w));
    return out;
}

DeterministicMoments exact_deterministic_moments(const DeterministicRealization& det,
                                                 const Matrix& lambda_u,
                                                 const ScheduleWeights& weights,
                                                 std::span<const ScheduleWord> words) {
    if (det.C.rows() != lambda_u.rows() || lambda_u.rows() != lambda_u.cols())
        throw ShapeError("the analytic moment formulas require n_u = n_y");
    const std::vector<Matrix> p = solve_stationary_lyapunov(det.A, det.B, lambda_u, weights);

    MatrixSeries lambda(det.C.rows(), det.C.rows());
    for (const auto& w : words) {
        if (w.empty()) throw RangeError("analytic moments are defined for nonempty words only");
        const int sigma = w.first();
        const auto i = static_cast<std::size_t>(sigma - 1);
        const ScheduleWord rest = w.tail(1);
        const Matrix inner = det.A[i] * p[i] * det.C.transpose() + det.B[i] * lambda_u;
        lambda.set(w, det.C * word_matrix_product(rest, det.A) * inner /
                          std::sqrt(weights.of_word(w)));
    }
    std::vector<Matrix> second;
    for (int s = 1; s <= weights.alphabet_size(); ++s) {
        const auto i = static_cast<std::size_t>(s - 1);
        second.push_back(
            ((det.C * p[i] * det.C.transpose() + lambda_u) / weights.of(s)).eval());
    }
    return {std::move(lambda), SecondMomentSet(std::move(second))};
}

ResidualMoments residual_psi_ys(const Dataset& data, const DeterministicRealization& det,
                                std::span<const ScheduleWord> words,
                                const ScheduleWeights& weights) {
    data.validate();
    if (det.C.rows() != data.y.cols() || det.D.cols() != data.u.cols())
        throw ShapeError("deterministic part dimensions do not match the dataset");

    const Matrix yd = simulate_deterministic(to_model(det, weights), data.u, data.mu);
    Matrix residual = data.y - yd;
    const double ypow = data.y.squaredNorm();
    const double ratio = ypow > 0 ? residual.squaredNorm() / ypow : 0.0;

    const Index n = data.size();
    MatrixSeries psi(data.y.cols(), data.y.cols());
    for (const auto& w : words) {
        if (w.empty()) continue;  // Psi_{y^s}(e) = I by definition, never estimated
        psi.set(w, lagged_average(residual, residual, data.mu, w, weights));
    }
    std::vector<Matrix> second;
    for (int s = 1; s <= weights.alphabet_size(); ++s) {
        const LaggedPath z = z_path(residual, data.mu, ScheduleWord({s}), weights);
        Matrix t = z.values.transpose() * z.values / static_cast<double>(n);
        second.push_back(((t + t.transpose()) / 2.0).eval());
    }
    return {std::move(psi), SecondMomentSet(std::move(second)), std::move(residual), ratio};
}

Matrix estimate_lambda_u(const Dataset& data) {
    const Index n = data.size();
    Matrix lambda = data.u.transpose() * data.u / static_cast<double>(n);
    return ((lambda + lambda.transpose()) / 2.0).eval();
}

ScheduleWeights estimate_weights(const Dataset& data) {
    const Index n = data.size();
    Vector p(data.mu.cols());
    for (Index j = 0; j < data.mu.cols(); ++j) p(j) = data.mu.col(j).squaredNorm() / static_cast<double>(n);
    p(0) = 1.0;
    return ScheduleWeights(p);
}

}  // namespace lpv
