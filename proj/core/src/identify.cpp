#include "lpvkit/identify.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace lpv {

void IdentifyConfig::validate() const {
    if (max_iterations < 1) throw ValidationError("max_iterations must be > 0");
    if (!(tolerance > 0) || !(rank_tol > 0) || !(cond_max > 0) || !(stochastic_power_tol >= 0))
        throw ValidationError("tolerances must be positive");
    if (selection_det.alpha.empty()) throw ValidationError("deterministic selection is empty");
    if (stochastic_stage && selection_stoch.alpha.empty())
        throw ValidationError("stochastic selection is empty");
}

namespace {

Vector hankel_singular_values(const MatrixSeries& series, const Selection& sel) {
    Eigen::JacobiSVD<Matrix> svd(build_hankel(series, sel));
    return svd.singularValues();
}

std::vector<ScheduleWord> sorted_words(const std::set<ScheduleWord>& words) {
    return {words.begin(), words.end()};
}

double max_abs(const MatrixSeries& series) {
    double out = 0.0;
    for (const auto& [w, m] : series)
        if (m.size() > 0) out = std::max(out, m.cwiseAbs().maxCoeff());
    return out;
}

}  // namespace

IdentifyReport identify(const Dataset& data, const IdentifyConfig& config) {
    data.validate();
    config.validate();

    IdentifyReport rep;
    std::string stage = "setup";
    const auto wrap = [&](const std::string& cause) {
        return StageError(stage, cause, rep.to_json());
    };

    try {
        // Inputs of the pipeline: scheduling weights and input variance,
        // either supplied or estimated; the estimates are always reported.
        rep.p_hat = estimate_weights(data).p();
        rep.lambda_u_hat = estimate_lambda_u(data);
        const ScheduleWeights weights =
            config.weights ? *config.weights : ScheduleWeights(rep.p_hat);
        const Matrix lambda_u = config.lambda_u ? *config.lambda_u : rep.lambda_u_hat;
        {
            Eigen::JacobiSVD<Matrix> svd(lambda_u);
            const auto& sv = svd.singularValues();
            rep.lambda_u_cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                                      : std::numeric_limits<double>::infinity();
        }
        const int n_mu = weights.alphabet_size();
        if (n_mu != data.mu.cols())
            throw ValidationError("weights dimension does not match the scheduling path");

        HoKalmanOptions hk;
        hk.cond_max = config.cond_max;
        hk.rank_tol = config.rank_tol;
        hk.svd_truncation = config.svd_truncation;

        // Step 1: empirical covariances over exactly the words the
        // deterministic Hankels read.
        stage = "covariance-estimation";
        const auto det_words = sorted_words(hankel_word_requirements(config.selection_det, n_mu));
        rep.psi_uy = empirical_psi_uy(data, det_words, weights, lambda_u);

        // Step 2: deterministic realization.
        stage = "deterministic-realization";
        rep.hankel_singular_values_det = hankel_singular_values(rep.psi_uy, config.selection_det);
        rep.deterministic = realize_deterministic(rep.psi_uy, config.selection_det, hk);

        if (!config.stochastic_stage) {
            rep.model = to_model(rep.deterministic, weights);
            return rep;
        }

        // Step 3: covariance splitting.
        stage = "covariance-splitting";
        const auto stoch_words =
            sorted_words(hankel_word_requirements(config.selection_stoch, n_mu));
        std::optional<SecondMomentSet> second;
        if (config.split == SplitVariant::residual) {
            ResidualMoments res =
                residual_psi_ys(data, rep.deterministic, stoch_words, weights);
            rep.psi_ys = std::move(res.psi);
            second = std::move(res.second);
            rep.stochastic_power_ratio = res.power_ratio;
        } else {
            std::vector<ScheduleWord> nonempty;
            for (const auto& w : stoch_words)
                if (!w.empty()) nonempty.push_back(w);
            const OutputMoments out_moments = empirical_output_moments(data, nonempty, weights);
            const DeterministicMoments det_moments =
                exact_deterministic_moments(rep.deterministic, lambda_u, weights, nonempty);
            MatrixSeries psi(data.y.cols(), data.y.cols());
            for (const auto& w : nonempty)
                psi.set(w, out_moments.lambda.at(w) - det_moments.lambda.at(w));
            std::vector<Matrix> t;
            double out_power = 0.0, res_power = 0.0;
            for (int s = 1; s <= n_mu; ++s) {
                Matrix ts = out_moments.second.of(s) - det_moments.second.of(s);
                out_power = std::max(out_power, out_moments.second.of(s).cwiseAbs().maxCoeff());
                res_power = std::max(res_power, ts.cwiseAbs().maxCoeff());
                t.push_back(((ts + ts.transpose()) / 2.0).eval());
            }
            rep.psi_ys = std::move(psi);
            second = SecondMomentSet(std::move(t));
            rep.stochastic_power_ratio = out_power > 0 ? res_power / out_power : 0.0;
        }

        // Degenerate stochastic part: near-zero covariances or a residual
        // carrying a negligible share of the output power.
        const bool near_zero = max_abs(rep.psi_ys) < 10.0 * config.rank_tol;
        if (near_zero || rep.stochastic_power_ratio < config.stochastic_power_tol) {
            rep.stochastic_degenerate = true;
            StochasticRealization empty;
            const Index ny = data.y.cols();
            empty.C = Matrix(ny, 0);
            for (int s = 1; s <= n_mu; ++s) {
                empty.A.emplace_back(0, 0);
                empty.G.emplace_back(Matrix(0, ny));
                empty.K.emplace_back(Matrix(0, ny));
                empty.P.emplace_back(0, 0);
                empty.Q.push_back(weights.of(s) * second->of(s));
            }
            empty.converged = true;
            rep.stochastic = std::move(empty);
            stage = "composition";
            rep.model = compose(rep.deterministic, *rep.stochastic, weights);
            return rep;
        }

        // Step 4: stochastic realization.
        stage = "stochastic-realization";
        {
            MatrixSeries with_eps = rep.psi_ys;
            with_eps.set(ScheduleWord{}, Matrix::Identity(data.y.cols(), data.y.cols()));
            rep.hankel_singular_values_stoch =
                hankel_singular_values(with_eps, config.selection_stoch);
        }
        rep.stochastic = realize_stochastic(rep.psi_ys, *second, config.selection_stoch, weights,
                                            config.max_iterations, config.tolerance, hk);
        rep.recursion.iterations = rep.stochastic->iterations_used;
        rep.recursion.converged = rep.stochastic->converged;
        rep.recursion.final_increment = rep.stochastic->final_increment;

        // Step 5: composition.
        stage = "composition";
        rep.model = compose(rep.deterministic, *rep.stochastic, weights);
        return rep;
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw wrap(e.what());
    }
}

std::vector<SweepCell> consistency_sweep(const LpvSsaModel& generator,
                                         std::span<const Index> lengths,
                                         std::span<const std::uint64_t> seeds,
                                         const IdentifyConfig& config,
                                         const GenConfig& generation) {
    generator.validate();
    std::vector<SweepCell> table;
    const auto words = enumerate_words(generator.n_mu, 3);
    for (const Index n : lengths) {
        for (const std::uint64_t seed : seeds) {
            SweepCell cell;
            cell.n_samples = n;
            cell.seed = seed;
            try {
                GenConfig gen = generation;
                gen.n_samples = n;
                gen.seed = seed;
                const SimResult sim = generate_dataset(generator, gen);
                const IdentifyReport rep = identify(sim.data, config);
                double err = 0.0;
                for (const auto& w : words) {
                    const Matrix diff = sub_markov(rep.model, w) - sub_markov(generator, w);
                    err = std::max(err, diff.cwiseAbs().maxCoeff());
                }
                cell.sub_markov_error = err;
                cell.ok = true;
            } catch (const Error& e) {
                cell.error = e.what();
            }
            table.push_back(std::move(cell));
        }
    }
    return table;
}

}  // namespace lpv
