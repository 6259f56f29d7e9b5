#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lpvkit/identify.hpp"
#include "lpvkit/model.hpp"

namespace lpv {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array of rows");
    const auto rows = j.size();
    if (rows == 0) return Matrix(0, 0);
    if (!j[0].is_array()) throw ParseError(what + ": expected nested arrays (row-major)");
    const auto cols = j[0].size();
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError(what + ": ragged rows at row " + std::to_string(i));
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number()) throw ParseError(what + ": non-numeric entry");
            m(static_cast<Index>(i), static_cast<Index>(c)) = j[i][c].get<double>();
        }
    }
    return m;
}

std::vector<Matrix> family_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected one matrix per scheduling channel");
    std::vector<Matrix> out;
    for (std::size_t s = 0; s < j.size(); ++s)
        out.push_back(matrix_from_json(j[s], what + "[" + std::to_string(s) + "]"));
    return out;
}

json family_to_json(const std::vector<Matrix>& fam) {
    json out = json::array();
    for (const auto& m : fam) out.push_back(matrix_to_json(m));
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write \"" + path + "\"");
    out << text;
}

}  // namespace

// ---------------------------------------------------------------------------
// Model JSON

json model_to_json_obj(const LpvSsaModel& model) {
    json j;
    j["n_x"] = model.n_x;
    j["n_y"] = model.n_y;
    j["n_u"] = model.n_u;
    j["n_mu"] = model.n_mu;
    j["p"] = std::vector<double>(model.weights.p().data(),
                                 model.weights.p().data() + model.weights.p().size());
    j["A"] = family_to_json(model.A);
    j["B"] = family_to_json(model.B);
    j["K"] = family_to_json(model.K);
    j["Q"] = family_to_json(model.Q);
    j["C"] = matrix_to_json(model.C);
    j["D"] = matrix_to_json(model.D);
    return j;
}

LpvSsaModel model_from_json_obj(const json& j) {
    for (const char* key : {"n_x", "n_y", "n_u", "n_mu", "p", "A", "B", "K", "Q", "C", "D"})
        if (!j.contains(key)) throw ParseError(std::string("model: missing field \"") + key + "\"");
    LpvSsaModel model;
    model.n_x = j["n_x"].get<int>();
    model.n_y = j["n_y"].get<int>();
    model.n_u = j["n_u"].get<int>();
    model.n_mu = j["n_mu"].get<int>();
    const auto p = j["p"].get<std::vector<double>>();
    model.weights = ScheduleWeights(Eigen::Map<const Vector>(p.data(), static_cast<Index>(p.size())));
    model.A = family_from_json(j["A"], "A");
    model.B = family_from_json(j["B"], "B");
    model.K = family_from_json(j["K"], "K");
    model.Q = family_from_json(j["Q"], "Q");
    model.C = matrix_from_json(j["C"], "C");
    model.D = matrix_from_json(j["D"], "D");
    model.validate();
    return model;
}

LpvSsaModel load_model(const std::string& path) { return model_from_json_obj(read_json_file(path)); }

void save_model(const LpvSsaModel& model, const std::string& path) {
    model.validate();
    write_file(path, model_to_json_obj(model).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Dataset CSV

void save_dataset_csv(const Dataset& data, const std::string& path) {
    data.validate();
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write \"" + path + "\"");
    out << "t";
    for (Index j = 0; j < data.y.cols(); ++j) out << ",y" << j + 1;
    for (Index j = 0; j < data.u.cols(); ++j) out << ",u" << j + 1;
    for (Index j = 0; j < data.mu.cols(); ++j) out << ",mu" << j + 1;
    out << "\n";
    out.precision(17);
    for (Index t = 0; t < data.size(); ++t) {
        out << t + 1;
        for (Index j = 0; j < data.y.cols(); ++j) out << ',' << data.y(t, j);
        for (Index j = 0; j < data.u.cols(); ++j) out << ',' << data.u(t, j);
        for (Index j = 0; j < data.mu.cols(); ++j) out << ',' << data.mu(t, j);
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw ParseError(path + ": empty file (expected a t,y..,u..,mu.. header)");
    const auto header = split_csv_line(line);
    int ny = 0, nu = 0, nmu = 0;
    if (header.empty() || header[0] != "t")
        throw ParseError(path + ": first header column must be \"t\"");
    for (std::size_t i = 1; i < header.size(); ++i) {
        const auto& h = header[i];
        if (h.rfind("mu", 0) == 0) ++nmu;
        else if (h.rfind('y', 0) == 0) ++ny;
        else if (h.rfind('u', 0) == 0) ++nu;
        else throw ParseError(path + ": unexpected header column \"" + h + "\"");
    }
    if (ny < 1 || nmu < 1) throw ParseError(path + ": need at least y1 and mu1 columns");

    std::vector<double> values;
    Index rows = 0;
    for (Index lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != 1 + ny + nu + nmu)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(1 + ny + nu + nmu) + " fields");
        for (std::size_t i = 1; i < fields.size(); ++i) {
            try {
                std::size_t pos = 0;
                values.push_back(std::stod(fields[i], &pos));
                if (pos != fields[i].size()) throw std::invalid_argument(fields[i]);
            } catch (const std::exception&) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad number \"" +
                                 fields[i] + "\"");
            }
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(path + ": no data rows");

    Dataset data;
    data.y.resize(rows, ny);
    data.u.resize(rows, nu);
    data.mu.resize(rows, nmu);
    const int stride = ny + nu + nmu;
    for (Index t = 0; t < rows; ++t) {
        const double* row = values.data() + t * stride;
        for (int j = 0; j < ny; ++j) data.y(t, j) = row[j];
        for (int j = 0; j < nu; ++j) data.u(t, j) = row[ny + j];
        for (int j = 0; j < nmu; ++j) data.mu(t, j) = row[ny + nu + j];
    }
    data.validate();
    return data;
}

void save_noise_csv(const Matrix& noise, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write \"" + path + "\"");
    out << "t";
    for (Index j = 0; j < noise.cols(); ++j) out << ",e" << j + 1;
    out << "\n";
    out.precision(17);
    for (Index t = 0; t < noise.rows(); ++t) {
        out << t + 1;
        for (Index j = 0; j < noise.cols(); ++j) out << ',' << noise(t, j);
        out << '\n';
    }
}

Matrix load_noise_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    const auto header = split_csv_line(line);
    const int cols = static_cast<int>(header.size()) - 1;
    if (cols < 1) throw ParseError(path + ": expected t,e1.. header");
    std::vector<double> values;
    Index rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != cols + 1)
            throw ParseError(path + ": ragged row");
        for (int j = 1; j <= cols; ++j) values.push_back(std::stod(fields[static_cast<std::size_t>(j)]));
        ++rows;
    }
    Matrix out(rows, cols);
    for (Index t = 0; t < rows; ++t)
        for (int j = 0; j < cols; ++j) out(t, j) = values[static_cast<std::size_t>(t * cols + j)];
    return out;
}

// ---------------------------------------------------------------------------
// Selection JSON

json selection_to_json_obj(const Selection& sel) {
    json alpha = json::array();
    for (const auto& r : sel.alpha) alpha.push_back(json::array({r.word.str(), r.output_index}));
    json beta = json::array();
    for (const auto& c : sel.beta)
        beta.push_back(json::array({c.letter, c.word.str(), c.col_index}));
    return json{{"alpha", alpha}, {"beta", beta}};
}

Selection selection_from_json_obj(const json& j) {
    if (!j.contains("alpha") || !j.contains("beta"))
        throw ParseError("selection: missing alpha or beta");
    Selection sel;
    for (const auto& r : j["alpha"]) {
        if (!r.is_array() || r.size() != 2)
            throw ParseError("selection: alpha entries are [word, output_index]");
        sel.alpha.push_back({ScheduleWord::parse(r[0].get<std::string>()), r[1].get<int>()});
    }
    for (const auto& c : j["beta"]) {
        if (!c.is_array() || c.size() != 3)
            throw ParseError("selection: beta entries are [letter, word, col_index]");
        sel.beta.push_back(
            {c[0].get<int>(), ScheduleWord::parse(c[1].get<std::string>()), c[2].get<int>()});
    }
    return sel;
}

std::string selection_to_json(const Selection& sel) { return selection_to_json_obj(sel).dump(2); }

Selection selection_from_json(const std::string& text) {
    try {
        return selection_from_json_obj(json::parse(text));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("selection: ") + e.what());
    }
}

Selection load_selection(const std::string& path) {
    return selection_from_json_obj(read_json_file(path));
}

void save_selection(const Selection& sel, const std::string& path) {
    write_file(path, selection_to_json(sel) + "\n");
}

// ---------------------------------------------------------------------------
// Identify config JSON

IdentifyConfig load_identify_config(const std::string& path) {
    const json j = read_json_file(path);
    IdentifyConfig config;
    if (!j.contains("selection_det") || !j.contains("selection_stoch"))
        throw ParseError(path + ": missing selection_det or selection_stoch");
    config.selection_det = selection_from_json_obj(j["selection_det"]);
    config.selection_stoch = selection_from_json_obj(j["selection_stoch"]);
    if (j.contains("weights") && !j["weights"].is_string()) {
        const auto p = j["weights"].get<std::vector<double>>();
        config.weights = ScheduleWeights(Eigen::Map<const Vector>(p.data(), static_cast<Index>(p.size())));
    }
    if (j.contains("Lambda_u") && !j["Lambda_u"].is_string())
        config.lambda_u = matrix_from_json(j["Lambda_u"], "Lambda_u");
    config.max_iterations = j.value("max_iterations", config.max_iterations);
    config.tolerance = j.value("tolerance", config.tolerance);
    if (j.contains("split_variant")) {
        const auto v = j["split_variant"].get<std::string>();
        if (v == "analytic") config.split = SplitVariant::analytic;
        else if (v == "residual") config.split = SplitVariant::residual;
        else throw ParseError(path + ": split_variant must be \"analytic\" or \"residual\"");
    }
    config.rank_tol = j.value("rank_tol", config.rank_tol);
    config.cond_max = j.value("cond_max", config.cond_max);
    config.svd_truncation = j.value("svd_truncation", config.svd_truncation);
    config.stochastic_stage = j.value("stochastic_stage", config.stochastic_stage);
    config.stochastic_power_tol = j.value("stochastic_power_tol", config.stochastic_power_tol);
    config.validate();
    return config;
}

void save_identify_config(const IdentifyConfig& config, const std::string& path) {
    json j;
    j["selection_det"] = selection_to_json_obj(config.selection_det);
    j["selection_stoch"] = selection_to_json_obj(config.selection_stoch);
    if (config.weights) {
        const auto& p = config.weights->p();
        j["weights"] = std::vector<double>(p.data(), p.data() + p.size());
    } else {
        j["weights"] = "estimate";
    }
    if (config.lambda_u) j["Lambda_u"] = matrix_to_json(*config.lambda_u);
    else j["Lambda_u"] = "estimate";
    j["max_iterations"] = config.max_iterations;
    j["tolerance"] = config.tolerance;
    j["split_variant"] = config.split == SplitVariant::analytic ? "analytic" : "residual";
    j["rank_tol"] = config.rank_tol;
    j["cond_max"] = config.cond_max;
    j["svd_truncation"] = config.svd_truncation;
    j["stochastic_stage"] = config.stochastic_stage;
    j["stochastic_power_tol"] = config.stochastic_power_tol;
    write_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Identify report JSON

namespace {

json series_to_json(const MatrixSeries& series) {
    json out = json::object();
    for (const auto& [w, m] : series) out[w.str()] = matrix_to_json(m);
    return out;
}

json vector_to_json(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string IdentifyReport::to_json(int indent) const {
    json j;
    if (model.n_mu > 0) j["model"] = model_to_json_obj(model);
    json d;
    d["p_hat"] = vector_to_json(p_hat);
    d["lambda_u_hat"] = matrix_to_json(lambda_u_hat);
    d["lambda_u_cond"] = lambda_u_cond;
    d["hankel_singular_values"] = {
        {"deterministic", vector_to_json(hankel_singular_values_det)},
        {"stochastic", vector_to_json(hankel_singular_values_stoch)},
    };
    d["recursion"] = {{"iterations", recursion.iterations},
                      {"converged", recursion.converged},
                      {"final_increment", recursion.final_increment}};
    d["stochastic_degenerate"] = stochastic_degenerate;
    d["stochastic_power_ratio"] = stochastic_power_ratio;
    d["covariances"] = {{"psi_uy", series_to_json(psi_uy)}, {"psi_ys", series_to_json(psi_ys)}};
    j["diagnostics"] = std::move(d);
    return j.dump(indent);
}

}  // namespace lpv
