#include "lpvkit/realization.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <iostream>

namespace lpv {

Matrix DeterministicRealization::sub_markov(const ScheduleWord& w) const {
    if (w.empty()) return D;
    const int sigma = w.first();
    if (sigma > n_mu()) throw RangeError("word letter exceeds n_mu");
    return C * word_matrix_product(w.tail(1), A) * B[static_cast<std::size_t>(sigma - 1)];
}

namespace {

struct Inverter {
    // Either an LU of the square Hankel or a rank-truncated pseudo-inverse.
    Eigen::PartialPivLU<Matrix> lu;
    Matrix pinv;
    bool truncated = false;

    Matrix solve(const Matrix& rhs) const {
        if (truncated) return pinv * rhs;
        return lu.solve(rhs);
    }
};

Inverter make_inverter(const Matrix& h, const HoKalmanOptions& opts) {
    Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;

    if (opts.svd_truncation) {
        int rank = opts.truncation_rank;
        if (rank < 0) {
            rank = 0;
            for (Index i = 0; i < sv.size(); ++i)
                if (smax > 0 && sv(i) / smax > opts.rank_tol) ++rank;
        }
        if (rank == 0)
            throw RankError("Hankel numerically zero", smin, smax, 0);
        Inverter inv;
        inv.truncated = true;
        Vector inv_sv = Vector::Zero(sv.size());
        for (Index i = 0; i < rank; ++i) inv_sv(i) = 1.0 / sv(i);
        inv.pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
        return inv;
    }

    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (smax > 0 && sv(i) / smax > 1.0 / opts.cond_max) ++rank;
    if (!(smin > 0.0) || smax / smin > opts.cond_max)
        throw RankError("Hankel rank deficient or ill conditioned (sigma_min=" +
                            std::to_string(smin) + ", sigma_max=" + std::to_string(smax) + ")",
                        smin, smax, rank);
    if (smax / smin > opts.warn_cond)
        std::cerr << "[lpvkit] warning: Hankel condition number " << smax / smin
                  << " above the warn band\n";
    Inverter inv;
    inv.lu = Eigen::PartialPivLU<Matrix>(h);
    return inv;
}

}  // namespace

DeterministicRealization ho_kalman(const Matrix& hankel, std::span<const Matrix> shifted,
                                   std::span<const Matrix> input, const Matrix& output,
                                   const Matrix& m_eps, const HoKalmanOptions& opts) {
    if (hankel.rows() != hankel.cols()) throw ShapeError("Hankel matrix must be square");
    if (shifted.size() != input.size() || shifted.empty())
        throw ShapeError("need one shifted and one input Hankel per letter");
    const Inverter inv = make_inverter(hankel, opts);

    DeterministicRealization out;
    out.A.reserve(shifted.size());
    out.B.reserve(input.size());
    for (const Matrix& hs : shifted) out.A.push_back(inv.solve(hs));
    for (const Matrix& hi : input) out.B.push_back(inv.solve(hi));
    out.C = output;
    out.D = m_eps;
    return out;
}

DeterministicRealization realize_deterministic(const MatrixSeries& psi, const Selection& sel,
                                               const HoKalmanOptions& opts) {
    int n_mu = 0;
    for (const auto& c : sel.beta) n_mu = std::max(n_mu, c.letter);
    for (const auto& [w, m] : psi)
        for (int s : w) n_mu = std::max(n_mu, s);
    sel.validate(n_mu, psi.rows(), psi.cols());

    const Matrix h = build_hankel(psi, sel);
    std::vector<Matrix> shifted, input;
    for (int s = 1; s <= n_mu; ++s) {
        shifted.push_back(build_shifted_hankel(psi, sel, s));
        input.push_back(build_input_hankel(psi, sel, s));
    }
    return ho_kalman(h, shifted, input, build_output_hankel(psi, sel), psi.at(ScheduleWord{}),
                     opts);
}

std::vector<Matrix> solve_stationary_lyapunov(std::span<const Matrix> A, std::span<const Matrix> B,
                                              const Matrix& lambda_u,
                                              const ScheduleWeights& weights) {
    const int n_mu = static_cast<int>(A.size());
    if (n_mu != weights.alphabet_size() || B.size() != A.size())
        throw ShapeError("family sizes do not match the alphabet");
    const Index n = A[0].rows();

    // Shared kernel S with P_sigma = p_sigma S:
    //   S = sum_s p_s A_s S A_s^T + sum_s B_s Lambda_u B_s^T
    Matrix op = Matrix::Zero(n * n, n * n);
    Matrix rhs = Matrix::Zero(n, n);
    for (int s = 0; s < n_mu; ++s) {
        const Matrix& a = A[static_cast<std::size_t>(s)];
        const double p = weights.of(s + 1);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) op.block(i * n, j * n, n, n) += p * a(i, j) * a;
        rhs += B[static_cast<std::size_t>(s)] * lambda_u * B[static_cast<std::size_t>(s)].transpose();
    }
    Eigen::EigenSolver<Matrix> eig(op, /*computeEigenvectors=*/false);
    if (eig.eigenvalues().cwiseAbs().maxCoeff() >= 1.0)
        throw SolverError("stationary equation has no unique solution: spectral radius " +
                          std::to_string(eig.eigenvalues().cwiseAbs().maxCoeff()) + " >= 1");

    Matrix sys = Matrix::Identity(n * n, n * n) - op;
    Eigen::Map<const Vector> rhs_vec(rhs.data(), n * n);
    Vector s_vec = Eigen::PartialPivLU<Matrix>(sys).solve(rhs_vec);
    Matrix kernel = Eigen::Map<const Matrix>(s_vec.data(), n, n);
    kernel = ((kernel + kernel.transpose()) / 2.0).eval();

    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(n_mu));
    for (int s = 1; s <= n_mu; ++s) out.push_back(weights.of(s) * kernel);
    return out;
}

RecursionResult stochastic_recursion(std::span<const Matrix> A, std::span<const Matrix> G,
                                     const Matrix& C, const SecondMomentSet& second_moments,
                                     const ScheduleWeights& weights, int max_iter, double tol) {
    const int n_mu = weights.alphabet_size();
    if (static_cast<int>(A.size()) != n_mu || static_cast<int>(G.size()) != n_mu ||
        second_moments.alphabet_size() != n_mu)
        throw ShapeError("family sizes do not match the alphabet");
    if (max_iter < 1) throw RangeError("max_iter must be >= 1");
    const Index n = C.cols();
    const Index ny = C.rows();

    RecursionResult res;
    res.P.assign(static_cast<std::size_t>(n_mu), Matrix::Zero(n, n));
    res.K.assign(static_cast<std::size_t>(n_mu), Matrix::Zero(n, ny));
    res.Q.assign(static_cast<std::size_t>(n_mu), Matrix::Zero(ny, ny));
    res.min_p_eigenvalue = 0.0;

    for (int it = 0; it < max_iter; ++it) {
        // Q and K from the current P iterate.
        for (int s = 0; s < n_mu; ++s) {
            const auto i = static_cast<std::size_t>(s);
            const double p = weights.of(s + 1);
            Matrix q = p * second_moments.of(s + 1) - C * res.P[i] * C.transpose();
            q = ((q + q.transpose()) / 2.0).eval();
            const double scale = std::max(std::abs(q.trace()) / static_cast<double>(ny), 1e-300);
            Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
            if (eig.eigenvalues()(0) <= 1e-10 * scale)
                throw IndefiniteError(s + 1, it, eig.eigenvalues()(0));
            res.Q[i] = q;
            res.K[i] = (std::sqrt(p) * G[i] - A[i] * res.P[i] * C.transpose()) *
                       q.inverse();
        }
        // P update.
        Matrix acc = Matrix::Zero(n, n);
        for (int s1 = 0; s1 < n_mu; ++s1) {
            const auto i = static_cast<std::size_t>(s1);
            acc += A[i] * res.P[i] * A[i].transpose() + res.K[i] * res.Q[i] * res.K[i].transpose();
        }
        double inc = 0.0;
        for (int s = 0; s < n_mu; ++s) {
            const auto i = static_cast<std::size_t>(s);
            Matrix next = weights.of(s + 1) * acc;
            next = ((next + next.transpose()) / 2.0).eval();
            inc = std::max(inc, (next - res.P[i]).norm());
            res.P[i] = next;
            if (n > 0) {
                Eigen::SelfAdjointEigenSolver<Matrix> eig(res.P[i]);
                res.min_p_eigenvalue = std::min(res.min_p_eigenvalue, eig.eigenvalues()(0));
            }
        }
        res.increments.push_back(inc);
        res.iterations = it + 1;
        res.final_increment = inc;
        if (inc < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

StochasticRealization realize_stochastic(const MatrixSeries& psi_ys,
                                         const SecondMomentSet& second_moments,
                                         const Selection& sel, const ScheduleWeights& weights,
                                         int max_iter, double tol, const HoKalmanOptions& opts) {
    if (psi_ys.rows() != psi_ys.cols())
        throw ShapeError("stochastic covariance series must be square");
    const int n_mu = weights.alphabet_size();
    sel.validate(n_mu, psi_ys.rows(), psi_ys.cols());

    // M(e) = I by definition, never estimated.
    MatrixSeries series = psi_ys;
    series.set(ScheduleWord{}, Matrix::Identity(psi_ys.rows(), psi_ys.cols()));

    const Matrix h = build_hankel(series, sel);
    std::vector<Matrix> shifted, input;
    for (int s = 1; s <= n_mu; ++s) {
        shifted.push_back(build_shifted_hankel(series, sel, s));
        input.push_back(build_input_hankel(series, sel, s));
    }
    DeterministicRealization base = ho_kalman(h, shifted, input, build_output_hankel(series, sel),
                                              Matrix::Identity(psi_ys.rows(), psi_ys.cols()), opts);

    StochasticRealization out;
    out.G = base.B;
    out.C = base.C;
    out.A.reserve(base.A.size());
    for (int s = 0; s < n_mu; ++s)
        out.A.push_back(base.A[static_cast<std::size_t>(s)] / std::sqrt(weights.of(s + 1)));

    RecursionResult rec =
        stochastic_recursion(out.A, out.G, out.C, second_moments, weights, max_iter, tol);
    out.K = std::move(rec.K);
    out.Q = std::move(rec.Q);
    out.P = std::move(rec.P);
    out.iterations_used = rec.iterations;
    out.converged = rec.converged;
    out.final_increment = rec.final_increment;
    return out;
}

LpvSsaModel compose(const DeterministicRealization& det, const StochasticRealization& stoch,
                    const ScheduleWeights& weights) {
    if (det.C.rows() != stoch.C.rows())
        throw ShapeError("deterministic and stochastic parts disagree on n_y");
    if (det.n_mu() != stoch.n_mu() && stoch.dim() > 0)
        throw ShapeError("deterministic and stochastic parts disagree on n_mu");
    const Index nd = det.dim();
    const Index ns = stoch.dim();
    const Index ny = det.C.rows();
    const Index nu = det.D.cols();
    const int n_mu = det.n_mu();

    LpvSsaModel model;
    model.n_x = static_cast<int>(nd + ns);
    model.n_y = static_cast<int>(ny);
    model.n_u = static_cast<int>(nu);
    model.n_mu = n_mu;
    model.weights = weights;
    model.C = Matrix(ny, nd + ns);
    model.C << det.C, stoch.C;
    model.D = det.D;
    for (int s = 0; s < n_mu; ++s) {
        const auto i = static_cast<std::size_t>(s);
        Matrix a = Matrix::Zero(nd + ns, nd + ns);
        a.topLeftCorner(nd, nd) = det.A[i];
        if (ns > 0) a.bottomRightCorner(ns, ns) = stoch.A[i];
        Matrix b = Matrix::Zero(nd + ns, nu);
        b.topRows(nd) = det.B[i];
        Matrix k = Matrix::Zero(nd + ns, ny);
        if (ns > 0) k.bottomRows(ns) = stoch.K[i];
        model.A.push_back(std::move(a));
        model.B.push_back(std::move(b));
        model.K.push_back(std::move(k));
        model.Q.push_back(i < stoch.Q.size() ? stoch.Q[i] : Matrix::Zero(ny, ny));
    }
    model.validate();
    return model;
}

LpvSsaModel to_model(const DeterministicRealization& det, const ScheduleWeights& weights) {
    StochasticRealization empty;
    empty.C = Matrix(det.C.rows(), 0);
    empty.Q.assign(static_cast<std::size_t>(det.n_mu()),
                   Matrix::Zero(det.C.rows(), det.C.rows()));
    empty.A.assign(static_cast<std::size_t>(det.n_mu()), Matrix(0, 0));
    empty.G.assign(static_cast<std::size_t>(det.n_mu()), Matrix(0, det.C.rows()));
    empty.K.assign(static_cast<std::size_t>(det.n_mu()), Matrix(0, det.C.rows()));
    return compose(det, empty, weights);
}

}  // namespace lpv
