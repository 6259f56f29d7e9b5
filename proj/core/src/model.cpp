#include "lpvkit/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace lpv {

namespace {

void check_family(const std::vector<Matrix>& fam, int n_mu, Index rows, Index cols,
                  const char* name) {
    if (static_cast<int>(fam.size()) != n_mu)
        throw ShapeError(std::string(name) + " family must have n_mu entries");
    for (const auto& m : fam) {
        if (m.rows() != rows || m.cols() != cols)
            throw ShapeError(std::string(name) + " matrix has shape " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                             "x" + std::to_string(cols));
    }
}

}  // namespace

void LpvSsaModel::validate() const {
    if (n_x < 0 || n_y < 1 || n_u < 0 || n_mu < 1)
        throw ValidationError("model dimensions out of range");
    check_family(A, n_mu, n_x, n_x, "A");
    check_family(B, n_mu, n_x, n_u, "B");
    check_family(K, n_mu, n_x, n_y, "K");
    check_family(Q, n_mu, n_y, n_y, "Q");
    for (const auto& q : Q) {
        if (q.size() > 0 && (q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw ValidationError("Q not symmetric within 1e-10");
    }
    if (C.rows() != n_y || C.cols() != n_x) throw ShapeError("C has wrong shape");
    if (D.rows() != n_y || D.cols() != n_u) throw ShapeError("D has wrong shape");
    if (weights.alphabet_size() != n_mu)
        throw ValidationError("weights dimension does not match n_mu");
}

void Dataset::validate() const {
    const Index n = y.rows();
    if (u.rows() != n || mu.rows() != n)
        throw ShapeError("dataset paths have mismatched lengths");
    if (mu.cols() < 1) throw ShapeError("scheduling path needs at least one channel");
    if (!y.allFinite() || !u.allFinite() || !mu.allFinite())
        throw ValidationError("dataset contains non-finite entries");
    for (Index t = 0; t < n; ++t) {
        if (std::abs(mu(t, 0) - 1.0) > 1e-12)
            throw ValidationError("mu column 1 must be identically 1 (row " +
                                  std::to_string(t + 1) + ")");
    }
}

double stability_operator_spectral_radius(const LpvSsaModel& model) {
    const Index n = model.n_x;
    if (n == 0) return 0.0;
    Matrix op = Matrix::Zero(n * n, n * n);
    for (int s = 0; s < model.n_mu; ++s) {
        const Matrix& a = model.A[static_cast<std::size_t>(s)];
        const double p = model.weights.of(s + 1);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                op.block(i * n, j * n, n, n) += p * a(i, j) * a;
    }
    Eigen::EigenSolver<Matrix> eig(op, /*computeEigenvectors=*/false);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix sub_markov(const LpvSsaModel& model, const ScheduleWord& w) {
    if (w.empty()) return model.D;
    const int sigma = w.first();
    if (sigma > model.n_mu) throw RangeError("word letter exceeds n_mu");
    const Matrix a_s = word_matrix_product(w.tail(1), model.A);
    return model.C * a_s * model.B[static_cast<std::size_t>(sigma - 1)];
}

ScalarDist ScalarDist::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    std::replace(args.begin(), args.end(), ',', ' ');
    std::istringstream in(args);
    double a = 0.0, b = 0.0;
    if (kind == "constant") {
        if (!(in >> a)) throw ParseError("constant distribution needs one value");
        return constant(a);
    }
    if (kind == "uniform") {
        if (!(in >> a >> b) || !(a < b)) throw ParseError("uniform distribution needs lo < hi");
        return uniform(a, b);
    }
    if (kind == "normal") {
        if (!(in >> a >> b) || b < 0) throw ParseError("normal distribution needs mean, stddev>=0");
        return normal(a, b);
    }
    throw ParseError("unknown distribution \"" + text + "\"");
}

double ScalarDist::sample(std::mt19937_64& rng) const {
    switch (kind) {
        case Kind::constant: return a;
        case Kind::uniform: return std::uniform_real_distribution<double>(a, b)(rng);
        case Kind::normal: return b == 0.0 ? a : std::normal_distribution<double>(a, b)(rng);
    }
    return 0.0;
}

double ScalarDist::second_moment() const {
    switch (kind) {
        case Kind::constant: return a * a;
        case Kind::uniform: return (a * a + a * b + b * b) / 3.0;
        case Kind::normal: return a * a + b * b;
    }
    return 0.0;
}

std::string ScalarDist::str() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::constant: out << "constant:" << a; break;
        case Kind::uniform: out << "uniform:" << a << "," << b; break;
        case Kind::normal: out << "normal:" << a << "," << b; break;
    }
    return out.str();
}

Dataset simulate(const LpvSsaModel& model, const Eigen::Ref<const Matrix>& u,
                 const Eigen::Ref<const Matrix>& mu, const Eigen::Ref<const Matrix>& v,
                 const SimOptions& opts) {
    model.validate();
    const Index total = u.rows();
    if (mu.rows() != total || v.rows() != total)
        throw ShapeError("input, scheduling and noise paths must have equal length");
    if (u.cols() != model.n_u || mu.cols() != model.n_mu || v.cols() != model.n_y)
        throw ShapeError("path widths do not match model dimensions");
    if (opts.burn_in < 0 || opts.burn_in >= total)
        throw RangeError("burn_in must be in [0, path length)");
    if (model.n_x > 0 && stability_operator_spectral_radius(model) >= 1.0)
        std::cerr << "[lpvkit] warning: simulating a model with spectral radius >= 1\n";

    const Index n = total - opts.burn_in;
    Dataset out;
    out.y.resize(n, model.n_y);
    out.u = u.bottomRows(n);
    out.mu = mu.bottomRows(n);

    Vector x = Vector::Zero(model.n_x);
    for (Index t = 0; t < total; ++t) {
        const Vector yt = model.C * x + model.D * u.row(t).transpose() + v.row(t).transpose();
        if (t >= opts.burn_in) out.y.row(t - opts.burn_in) = yt.transpose();
        Vector xn = Vector::Zero(model.n_x);
        for (int i = 0; i < model.n_mu; ++i) {
            const auto s = static_cast<std::size_t>(i);
            xn += (model.A[s] * x + model.B[s] * u.row(t).transpose() +
                   model.K[s] * v.row(t).transpose()) *
                  mu(t, i);
        }
        x = xn;
        if (model.n_x > 0 && !(x.norm() < opts.divergence_limit))
            throw DivergenceError("state norm exceeded " + std::to_string(opts.divergence_limit) +
                                  " at t=" + std::to_string(t + 1));
    }
    out.validate();
    return out;
}

namespace {

// Deterministic per-signal stream split of the run seed (splitmix64 mixing).
std::uint64_t mix_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

SimResult generate_dataset(const LpvSsaModel& model, const GenConfig& config) {
    if (config.n_samples < 1) throw RangeError("n_samples must be >= 1");
    const Index total = config.n_samples + config.burn_in;
    std::mt19937_64 rng_u(mix_stream(config.seed, 1));
    std::mt19937_64 rng_mu(mix_stream(config.seed, 2));
    std::mt19937_64 rng_v(mix_stream(config.seed, 3));

    Matrix u(total, model.n_u), mu(total, model.n_mu), v(total, model.n_y);
    for (Index t = 0; t < total; ++t) {
        for (Index j = 0; j < model.n_u; ++j) u(t, j) = config.input.sample(rng_u);
        mu(t, 0) = 1.0;
        for (Index j = 1; j < model.n_mu; ++j) mu(t, j) = config.scheduling.sample(rng_mu);
        for (Index j = 0; j < model.n_y; ++j) v(t, j) = config.noise.sample(rng_v);
    }
    SimResult out{simulate(model, u, mu, v, SimOptions{config.burn_in, 1e12}),
                  v.bottomRows(config.n_samples)};
    return out;
}

Matrix simulate_deterministic(const LpvSsaModel& model, const Eigen::Ref<const Matrix>& u,
                              const Eigen::Ref<const Matrix>& mu, double divergence_limit) {
    model.validate();
    const Index n = u.rows();
    if (mu.rows() != n) throw ShapeError("input and scheduling paths must have equal length");
    if (u.cols() != model.n_u || mu.cols() != model.n_mu)
        throw ShapeError("path widths do not match model dimensions");

    Matrix yd(n, model.n_y);
    Vector x = Vector::Zero(model.n_x);
    for (Index t = 0; t < n; ++t) {
        yd.row(t) = (model.C * x + model.D * u.row(t).transpose()).transpose();
        Vector xn = Vector::Zero(model.n_x);
        for (int i = 0; i < model.n_mu; ++i) {
            const auto s = static_cast<std::size_t>(i);
            xn += (model.A[s] * x + model.B[s] * u.row(t).transpose()) * mu(t, i);
        }
        x = xn;
        if (model.n_x > 0 && !(x.norm() < divergence_limit))
            throw DivergenceError("deterministic state norm exceeded divergence limit at t=" +
                                  std::to_string(t + 1));
    }
    return yd;
}

Matrix predict_one_step(const LpvSsaModel& model, const Dataset& data) {
    model.validate();
    data.validate();
    if (data.y.cols() != model.n_y || data.u.cols() != model.n_u || data.mu.cols() != model.n_mu)
        throw ShapeError("dataset dimensions do not match model");

    const Index n = data.size();
    Matrix yhat(n, model.n_y);
    Vector x = Vector::Zero(model.n_x);
    for (Index t = 0; t < n; ++t) {
        const Vector yh = model.C * x + model.D * data.u.row(t).transpose();
        yhat.row(t) = yh.transpose();
        const Vector innov = data.y.row(t).transpose() - yh;
        Vector xn = Vector::Zero(model.n_x);
        for (int i = 0; i < model.n_mu; ++i) {
            const auto s = static_cast<std::size_t>(i);
            xn += (model.A[s] * x + model.B[s] * data.u.row(t).transpose() + model.K[s] * innov) *
                  data.mu(t, i);
        }
        x = xn;
        if (model.n_x > 0 && !(x.norm() < 1e12))
            throw DivergenceError("predictor state diverged at t=" + std::to_string(t + 1));
    }
    return yhat;
}

}  // namespace lpv
