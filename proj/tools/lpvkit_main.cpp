#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "lpvkit/covariances.hpp"
#include "lpvkit/identify.hpp"
#include "lpvkit/metrics.hpp"
#include "lpvkit/model.hpp"

using nlohmann::json;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

json matrix_json(const lpv::Matrix& m) {
    json rows = json::array();
    for (lpv::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (lpv::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_matrix(const lpv::Matrix& m) {
    std::ostringstream out;
    out << std::setprecision(6);
    if (m.rows() == 1 && m.cols() == 1) {
        out << m(0, 0);
        return out.str();
    }
    out << "[";
    for (lpv::Index i = 0; i < m.rows(); ++i) {
        if (i) out << "; ";
        for (lpv::Index j = 0; j < m.cols(); ++j) {
            if (j) out << " ";
            out << m(i, j);
        }
    }
    out << "]";
    return out.str();
}

struct SimulateArgs {
    std::string model_path;
    std::string out_path;
    std::string noise_out;
    long long n = 0;
    long long burn_in = 1000;
    std::uint64_t seed = 0;
    std::string input_dist = "uniform:-1.5,1.5";
    std::string sched_dist = "uniform:-1.5,1.5";
    std::string noise_dist = "normal:0,1";
    std::optional<double> noise_std;
};

int cmd_simulate(const SimulateArgs& args) {
    const lpv::LpvSsaModel model = lpv::load_model(args.model_path);
    lpv::GenConfig config;
    config.n_samples = args.n;
    config.burn_in = args.burn_in;
    config.seed = args.seed;
    config.input = lpv::ScalarDist::parse(args.input_dist);
    config.scheduling = lpv::ScalarDist::parse(args.sched_dist);
    config.noise = args.noise_std ? lpv::ScalarDist::normal(0.0, *args.noise_std)
                                  : lpv::ScalarDist::parse(args.noise_dist);
    const lpv::SimResult result = lpv::generate_dataset(model, config);
    lpv::save_dataset_csv(result.data, args.out_path);
    if (!args.noise_out.empty()) lpv::save_noise_csv(result.noise, args.noise_out);
    const double snr = lpv::snr_db(result.data.y, result.noise);
    std::cout << "wrote " << result.data.size() << " samples to " << args.out_path;
    if (std::isfinite(snr)) std::cout << " (SNR " << std::setprecision(3) << snr << " dB)";
    std::cout << "\n";
    return 0;
}

struct IdentifyArgs {
    std::string data_path;
    std::string config_path;
    std::string model_out;
    std::string report_out;
    std::string reference_path;
    std::string validation_path;
    std::string variant;
    std::optional<int> iters;
    std::optional<double> rank_tol;
    bool as_json = false;
};

void print_table2(const lpv::LpvSsaModel& reference, const lpv::LpvSsaModel& estimated) {
    std::vector<std::string> words;
    if (reference.n_mu >= 2) words = {"11", "21", "111", "221", "1111"};
    else words = {"1", "11", "111", "1111"};
    std::cout << "\nsub-Markov parameters (true vs estimated)\n";
    std::cout << std::left << std::setw(8) << "word" << std::setw(14) << "true"
              << "estimated\n";
    for (const auto& text : words) {
        const auto w = lpv::ScheduleWord::parse(text);
        std::cout << std::left << std::setw(8) << text << std::setw(14)
                  << format_matrix(lpv::sub_markov(reference, w))
                  << format_matrix(lpv::sub_markov(estimated, w)) << "\n";
    }
}

int cmd_identify(const IdentifyArgs& args) {
    const lpv::Dataset data = lpv::load_dataset_csv(args.data_path);
    lpv::IdentifyConfig config = lpv::load_identify_config(args.config_path);
    if (!args.variant.empty()) {
        if (args.variant == "analytic") config.split = lpv::SplitVariant::analytic;
        else if (args.variant == "residual") config.split = lpv::SplitVariant::residual;
        else throw lpv::ParseError("--variant must be analytic or residual");
    }
    if (args.iters) config.max_iterations = *args.iters;
    if (args.rank_tol) config.rank_tol = *args.rank_tol;

    const lpv::IdentifyReport report = lpv::identify(data, config);
    if (!args.model_out.empty()) lpv::save_model(report.model, args.model_out);
    if (!args.report_out.empty()) {
        std::ofstream out(args.report_out);
        if (!out) throw lpv::ParseError("cannot write \"" + args.report_out + "\"");
        out << report.to_json(2) << "\n";
    }

    if (args.as_json) {
        std::cout << report.to_json(2) << "\n";
    } else {
        std::cout << "identified model: n_x=" << report.model.n_x
                  << " (deterministic " << report.deterministic.dim() << " + stochastic "
                  << (report.stochastic ? report.stochastic->dim() : 0) << ")\n";
        std::cout << "recursion: " << report.recursion.iterations << " iterations, "
                  << (report.recursion.converged ? "converged" : "iteration cap reached")
                  << ", final increment " << report.recursion.final_increment << "\n";
        if (report.stochastic_degenerate)
            std::cout << "stochastic part degenerate (residual power ratio "
                      << report.stochastic_power_ratio << "); zero-dimensional block used\n";
    }

    if (!args.reference_path.empty()) {
        const lpv::LpvSsaModel reference = lpv::load_model(args.reference_path);
        print_table2(reference, report.model);
    }
    if (!args.validation_path.empty()) {
        const lpv::Dataset val = lpv::load_dataset_csv(args.validation_path);
        const lpv::Matrix yhat = lpv::predict_one_step(report.model, val);
        const lpv::FitReport fit = lpv::fit_report(val.y, yhat);
        std::cout << "\nvalidation fit (one-step-ahead)\n";
        std::cout << "BFR " << std::setprecision(4) << fit.mean_bfr() << " %\n";
        std::cout << "VAF " << std::setprecision(4) << fit.mean_vaf() << " %\n";
    }
    return 0;
}

int cmd_validate(const std::string& model_path, const std::string& data_path, bool as_json) {
    const lpv::LpvSsaModel model = lpv::load_model(model_path);
    const lpv::Dataset data = lpv::load_dataset_csv(data_path);
    const lpv::Matrix yhat = lpv::predict_one_step(model, data);
    const lpv::FitReport fit = lpv::fit_report(data.y, yhat);
    if (as_json) {
        json j;
        j["bfr"] = std::vector<double>(fit.bfr.data(), fit.bfr.data() + fit.bfr.size());
        j["vaf"] = std::vector<double>(fit.vaf.data(), fit.vaf.data() + fit.vaf.size());
        j["mean_bfr"] = fit.mean_bfr();
        j["mean_vaf"] = fit.mean_vaf();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << std::setprecision(6);
        for (lpv::Index ch = 0; ch < fit.bfr.size(); ++ch)
            std::cout << "channel " << ch + 1 << ": BFR " << fit.bfr(ch) << " %, VAF "
                      << fit.vaf(ch) << " %\n";
        if (fit.bfr.size() > 1)
            std::cout << "mean: BFR " << fit.mean_bfr() << " %, VAF " << fit.mean_vaf() << " %\n";
    }
    return 0;
}

int cmd_markov(const std::string& model_path, int max_len, bool as_json) {
    const lpv::LpvSsaModel model = lpv::load_model(model_path);
    const auto words = lpv::enumerate_words(model.n_mu, max_len);
    if (as_json) {
        json j = json::object();
        for (const auto& w : words) j[w.str()] = matrix_json(lpv::sub_markov(model, w));
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << std::left << std::setw(10) << "word" << "M(word)\n";
        for (const auto& w : words)
            std::cout << std::left << std::setw(10) << w.str()
                      << format_matrix(lpv::sub_markov(model, w)) << "\n";
    }
    return 0;
}

struct CovarianceArgs {
    std::string data_path;
    std::string words_csv;
    int max_len = 2;
    bool as_json = false;
};

int cmd_covariances(const CovarianceArgs& args) {
    const lpv::Dataset data = lpv::load_dataset_csv(args.data_path);
    const lpv::ScheduleWeights weights = lpv::estimate_weights(data);
    const lpv::Matrix lambda_u = lpv::estimate_lambda_u(data);

    std::vector<lpv::ScheduleWord> words;
    if (!args.words_csv.empty()) {
        std::stringstream in(args.words_csv);
        std::string item;
        while (std::getline(in, item, ',')) words.push_back(lpv::ScheduleWord::parse(item));
    } else {
        words = lpv::enumerate_words(static_cast<int>(data.mu.cols()), args.max_len);
    }
    const lpv::MatrixSeries psi = lpv::empirical_psi_uy(data, words, weights, lambda_u);

    Eigen::JacobiSVD<lpv::Matrix> svd(lambda_u);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
    json j;
    j["psi_uy"] = json::object();
    for (const auto& [w, m] : psi) j["psi_uy"][w.str()] = matrix_json(m);
    j["lambda_u_hat"] = matrix_json(lambda_u);
    j["lambda_u_cond"] = cond;
    j["p_hat"] = std::vector<double>(weights.p().data(), weights.p().data() + weights.p().size());
    if (args.as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "p_hat =";
        for (lpv::Index i = 0; i < weights.p().size(); ++i) std::cout << " " << weights.p()(i);
        std::cout << "\nLambda_u_hat = " << format_matrix(lambda_u) << " (cond " << cond << ")\n";
        std::cout << std::left << std::setw(10) << "word" << "Psi_uy(word)\n";
        for (const auto& [w, m] : psi)
            std::cout << std::left << std::setw(10) << w.str() << format_matrix(m) << "\n";
    }
    return 0;
}

struct SearchArgs {
    std::string data_path;
    std::string model_path;
    std::string out_path;
    int n = 0;
    std::string strategy = "greedy";
    double rank_tol = 1e-8;
};

int cmd_search_selection(const SearchArgs& args) {
    const lpv::SearchStrategy strategy = args.strategy == "exhaustive"
                                             ? lpv::SearchStrategy::exhaustive
                                             : lpv::SearchStrategy::greedy;
    lpv::Selection sel;
    if (!args.model_path.empty()) {
        const lpv::LpvSsaModel model = lpv::load_model(args.model_path);
        std::vector<lpv::ScheduleWord> words = lpv::enumerate_words(model.n_mu, 2 * args.n + 1);
        const lpv::MatrixSeries series = lpv::exact_psi_uy(model, words);
        sel = lpv::search_selection(series, args.n, model.n_mu, strategy, args.rank_tol);
    } else {
        const lpv::Dataset data = lpv::load_dataset_csv(args.data_path);
        const int n_mu = static_cast<int>(data.mu.cols());
        const lpv::ScheduleWeights weights = lpv::estimate_weights(data);
        std::vector<lpv::ScheduleWord> words = lpv::enumerate_words(n_mu, 2 * args.n + 1);
        const lpv::MatrixSeries series =
            lpv::empirical_psi_uy(data, words, weights, lpv::estimate_lambda_u(data));
        sel = lpv::search_selection(series, args.n, n_mu, strategy, args.rank_tol);
    }
    const std::string text = lpv::selection_to_json(sel);
    if (!args.out_path.empty()) lpv::save_selection(sel, args.out_path);
    std::cout << text << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Realization and identification toolkit for stochastic LPV state-space models"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate a model to a dataset CSV");
    simulate->add_option("model", sim.model_path, "model JSON file")->required();
    simulate->add_option("--out", sim.out_path, "output dataset CSV")->required();
    simulate->add_option("--n", sim.n, "number of samples")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "PRNG seed")->required();
    simulate->add_option("--burn-in", sim.burn_in, "samples discarded before t=1")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--input-dist", sim.input_dist, "input distribution");
    simulate->add_option("--sched-dist", sim.sched_dist, "scheduling distribution");
    simulate->add_option("--noise-dist", sim.noise_dist, "noise distribution");
    double noise_std_value = 0.0;
    auto* nstd = simulate->add_option("--noise-std", noise_std_value,
                                      "shorthand for --noise-dist normal:0,<std>");
    simulate->add_option("--noise-out", sim.noise_out, "write the noise path CSV here");

    IdentifyArgs idf;
    auto* identify = app.add_subcommand("identify", "Identify a model from a dataset");
    identify->add_option("data", idf.data_path, "dataset CSV")->required();
    identify->add_option("config", idf.config_path, "identification config JSON")->required();
    identify->add_option("--model-out", idf.model_out, "write the identified model JSON here");
    identify->add_option("--report-out", idf.report_out, "write the full report JSON here");
    identify->add_option("--reference", idf.reference_path,
                         "reference model for a true-vs-estimated table");
    identify->add_option("--validation", idf.validation_path,
                         "validation dataset for a BFR/VAF table");
    identify->add_option("--variant", idf.variant, "covariance split: analytic|residual");
    int iters_value = 0;
    auto* iters_opt = identify->add_option("--iters", iters_value, "recursion iteration cap");
    double rank_tol_value = 0.0;
    auto* rank_opt = identify->add_option("--rank-tol", rank_tol_value, "relative rank tolerance");
    identify->add_flag("--json", idf.as_json, "machine-readable output");

    std::string val_model, val_data;
    bool val_json = false;
    auto* validate = app.add_subcommand("validate", "One-step-ahead BFR/VAF of a model on data");
    validate->add_option("model", val_model, "model JSON")->required();
    validate->add_option("data", val_data, "dataset CSV")->required();
    validate->add_flag("--json", val_json, "machine-readable output");

    std::string mk_model;
    int mk_len = 4;
    bool mk_json = false;
    auto* markov = app.add_subcommand("markov", "Sub-Markov parameters up to a word length");
    markov->add_option("model", mk_model, "model JSON")->required();
    markov->add_option("--max-len", mk_len, "maximum word length")->check(CLI::NonNegativeNumber);
    markov->add_flag("--json", mk_json, "machine-readable output");

    CovarianceArgs cov;
    auto* covariances = app.add_subcommand("covariances", "Empirical covariance report");
    covariances->add_option("data", cov.data_path, "dataset CSV")->required();
    covariances->add_option("--words", cov.words_csv, "comma-separated words (e for empty)");
    covariances->add_option("--max-len", cov.max_len, "all words up to this length")
        ->check(CLI::NonNegativeNumber);
    covariances->add_flag("--json", cov.as_json, "machine-readable output");

    SearchArgs search;
    auto* search_sel = app.add_subcommand("search-selection", "Find a full-rank n-selection");
    auto* sdata = search_sel->add_option("--data", search.data_path, "dataset CSV");
    auto* smodel = search_sel->add_option("--model", search.model_path, "model JSON");
    search_sel->add_option("--n", search.n, "selection order")->required()->check(CLI::PositiveNumber);
    search_sel->add_option("--strategy", search.strategy, "greedy|exhaustive")
        ->check(CLI::IsMember({"greedy", "exhaustive"}));
    search_sel->add_option("--rank-tol", search.rank_tol, "relative rank tolerance");
    search_sel->add_option("--out", search.out_path, "write the selection JSON here");
    sdata->excludes(smodel);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            if (nstd->count()) sim.noise_std = noise_std_value;
            return cmd_simulate(sim);
        }
        if (identify->parsed()) {
            if (iters_opt->count()) idf.iters = iters_value;
            if (rank_opt->count()) idf.rank_tol = rank_tol_value;
            return cmd_identify(idf);
        }
        if (validate->parsed()) return cmd_validate(val_model, val_data, val_json);
        if (markov->parsed()) return cmd_markov(mk_model, mk_len, mk_json);
        if (covariances->parsed()) return cmd_covariances(cov);
        if (search_sel->parsed()) {
            if (search.data_path.empty() && search.model_path.empty())
                throw lpv::ParseError("search-selection needs --data or --model");
            return cmd_search_selection(search);
        }
    } catch (const lpv::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lpv::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lpv::RangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lpv::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lpv::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "diagnostics: " << e.diagnostics() << "\n";
        return kExitNumerical;
    } catch (const lpv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
