#include "ioident/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ioident {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(line);
    while (std::getline(in, token, sep)) out.push_back(token);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& token, std::size_t line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(token, &used);
        while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
            ++used;
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad number '" + token + "' on CSV line " + std::to_string(line_no));
    }
}

std::vector<std::string> non_empty_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

} // namespace

std::string trajectory_to_csv(const Trajectory& traj, const std::vector<std::string>& state_names) {
    if (static_cast<Eigen::Index>(state_names.size()) != traj.states.cols())
        throw InvalidArgument("state name count does not match trajectory width");
    std::string out = "t,u,y";
    for (const auto& name : state_names) out += ",x_" + name;
    out += '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += fmt(traj.times[i]) + ',' + fmt(traj.inputs[i]) + ',' + fmt(traj.outputs[i]);
        for (Eigen::Index j = 0; j < traj.states.cols(); ++j)
            out += ',' + fmt(traj.states(static_cast<Eigen::Index>(i), j));
        out += '\n';
    }
    return out;
}

Trajectory trajectory_from_csv(const std::string& text, std::vector<std::string>* state_names) {
    const auto lines = non_empty_lines(text);
    if (lines.size() < 2) throw ParseError("trajectory CSV needs a header and data rows");
    const auto header = split(lines[0], ',');
    if (header.size() < 4 || header[0] != "t" || header[1] != "u" || header[2] != "y")
        throw ParseError("trajectory CSV header must be t,u,y,x_<name>...");
    std::vector<std::string> names;
    for (std::size_t j = 3; j < header.size(); ++j) {
        if (header[j].rfind("x_", 0) != 0)
            throw ParseError("trajectory state column '" + header[j] + "' must begin with x_");
        names.push_back(header[j].substr(2));
    }
    Trajectory traj;
    const std::size_t rows = lines.size() - 1;
    traj.times.resize(rows);
    traj.inputs.resize(rows);
    traj.outputs.resize(rows);
    traj.states.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < rows; ++i) {
        const auto cells = split(lines[i + 1], ',');
        if (cells.size() != header.size())
            throw ParseError("trajectory CSV row " + std::to_string(i + 2) +
                             " has the wrong column count");
        traj.times[i] = parse_double(cells[0], i + 2);
        traj.inputs[i] = parse_double(cells[1], i + 2);
        traj.outputs[i] = parse_double(cells[2], i + 2);
        for (std::size_t j = 0; j < names.size(); ++j)
            traj.states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_double(cells[3 + j], i + 2);
    }
    if (state_names) *state_names = names;
    return traj;
}

std::string sampled_to_csv(const SampledFunction& f) {
    std::string out = "t,value\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        out += fmt(f.time_at(i)) + ',' + fmt(f.values[i]) + '\n';
    return out;
}

SampledFunction sampled_from_csv(const std::string& text) {
    const auto lines = non_empty_lines(text);
    if (lines.size() < 3) throw ParseError("sampled CSV needs a header and at least two rows");
    const auto header = split(lines[0], ',');
    if (header.size() != 2 || header[0] != "t" || header[1] != "value")
        throw ParseError("sampled CSV header must be t,value");
    std::vector<double> times, values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != 2)
            throw ParseError("sampled CSV row " + std::to_string(i + 1) + " needs two columns");
        times.push_back(parse_double(cells[0], i + 1));
        values.push_back(parse_double(cells[1], i + 1));
    }
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw ParseError("sampled CSV times must increase");
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double expected = times[0] + h * static_cast<double>(i);
        if (std::abs(times[i] - expected) > 1e-9 * h)
            throw ParseError("sampled CSV grid is not uniform at row " + std::to_string(i + 2));
    }
    return make_sampled(h, times[0], std::move(values));
}

std::string observations_to_csv(const std::vector<double>& times, const std::vector<double>& obs) {
    if (times.size() != obs.size()) throw InvalidArgument("times and observations differ in size");
    std::string out = "t,observation\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        out += fmt(times[i]) + ',' + fmt(obs[i]) + '\n';
    return out;
}

void observations_from_csv(const std::string& text, std::vector<double>& times,
                           std::vector<double>& obs) {
    const auto lines = non_empty_lines(text);
    if (lines.size() < 2) throw ParseError("observations CSV needs a header and data rows");
    const auto header = split(lines[0], ',');
    if (header.size() != 2 || header[0] != "t" || header[1] != "observation")
        throw ParseError("observations CSV header must be t,observation");
    times.clear();
    obs.clear();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != 2)
            throw ParseError("observations CSV row " + std::to_string(i + 1) +
                             " needs two columns");
        times.push_back(parse_double(cells[0], i + 1));
        obs.push_back(parse_double(cells[1], i + 1));
    }
}

std::string posterior_to_csv(const PosteriorGrid& grid) {
    std::string out;
    for (const auto& name : grid.param_names) out += name + ',';
    out += "probability\n";
    const auto probs = grid.probabilities();
    for (std::size_t cell = 0; cell < probs.size(); ++cell) {
        for (double v : grid.cell_values(cell)) out += fmt(v) + ',';
        out += fmt(probs[cell]) + '\n';
    }
    return out;
}

PosteriorGrid posterior_from_csv(const std::string& text) {
    const auto lines = non_empty_lines(text);
    if (lines.size() < 2) throw ParseError("posterior CSV needs a header and data rows");
    const auto header = split(lines[0], ',');
    if (header.size() < 2 || header.back() != "probability")
        throw ParseError("posterior CSV header must be <param>,...,probability");

    PosteriorGrid grid;
    grid.param_names.assign(header.begin(), header.end() - 1);
    const std::size_t dims = grid.param_names.size();
    grid.axes.resize(dims);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != header.size())
            throw ParseError("posterior CSV row " + std::to_string(i + 1) +
                             " has the wrong column count");
        std::vector<double> row;
        for (const auto& cell : cells) row.push_back(parse_double(cell, i + 1));
        rows.push_back(std::move(row));
    }
    for (std::size_t d = 0; d < dims; ++d) {
        for (const auto& row : rows) {
            auto& axis = grid.axes[d];
            if (std::find(axis.begin(), axis.end(), row[d]) == axis.end())
                axis.push_back(row[d]);
        }
    }
    if (grid.cell_count() != rows.size())
        throw ParseError("posterior CSV rows do not enumerate a full grid");
    grid.log_weights.resize(rows.size());
    for (std::size_t cell = 0; cell < rows.size(); ++cell) {
        const auto expected = grid.cell_values(cell);
        for (std::size_t d = 0; d < dims; ++d)
            if (expected[d] != rows[cell][d])
                throw ParseError("posterior CSV rows are not in grid enumeration order");
        grid.log_weights[cell] = std::log(rows[cell][dims]);
    }
    return grid;
}

std::string format_ident_report(const GramReport& gram, const CramerRaoReport* crb) {
    std::ostringstream out;
    out << "parameters:";
    for (const auto& name : gram.params) out << ' ' << name;
    out << "\n\ngram matrix (trapezoid integral of S^T S):\n";
    for (Eigen::Index i = 0; i < gram.G.rows(); ++i) {
        out << "  ";
        for (Eigen::Index j = 0; j < gram.G.cols(); ++j)
            out << (j ? "  " : "") << fmt(gram.G(i, j));
        out << '\n';
    }
    out << "\neigenvalues (descending):\n";
    for (Eigen::Index i = 0; i < gram.eigenvalues.size(); ++i) {
        out << "  " << fmt(gram.eigenvalues(i)) << "  direction (";
        for (Eigen::Index j = 0; j < gram.eigenvectors.rows(); ++j)
            out << (j ? ", " : "") << fmt(gram.eigenvectors(j, i));
        out << ")\n";
    }
    out << "\nrank: " << gram.rank << " of " << gram.G.rows() << " (eigenvalue threshold "
        << fmt(gram.threshold) << ")\n";
    if (gram.null_directions.cols() == 0) {
        out << "null directions: none\n";
    } else {
        out << "null directions (locally unidentifiable combinations):\n";
        for (Eigen::Index k = 0; k < gram.null_directions.cols(); ++k) {
            out << "  (";
            for (Eigen::Index j = 0; j < gram.null_directions.rows(); ++j)
                out << (j ? ", " : "") << fmt(gram.null_directions(j, k));
            out << ")\n";
        }
    }
    if (crb) {
        out << "\ncramer-rao variance lower bounds (sigma = " << fmt(crb->sigma_noise) << "):\n";
        for (std::size_t j = 0; j < crb->params.size(); ++j) {
            const double v = crb->crb(static_cast<Eigen::Index>(j));
            out << "  " << crb->params[j] << ": "
                << (std::isinf(v) ? std::string("inf") : fmt(v)) << '\n';
        }
    }
    return out.str();
}

std::string format_fit_report(const FitResult& fit) {
    std::ostringstream out;
    out << (fit.converged ? "converged" : "NOT converged") << " after " << fit.iterations
        << " iterations (" << fit.message << ")\n";
    out << "cost: " << fmt(fit.cost) << '\n';
    for (std::size_t j = 0; j < fit.free_params.size(); ++j) {
        const auto& name = fit.free_params[j];
        const double var = fit.covariance(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
        out << "  " << name << " = " << fmt(fit.theta.at(name)) << "  (std "
            << fmt(std::sqrt(std::max(0.0, var))) << ")\n";
    }
    return out.str();
}

LoadedModel model_from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object()) throw ParseError("model file must be a JSON object");
        LoadedModel model;
        std::vector<std::string> states = doc.at("states").get<std::vector<std::string>>();
        std::vector<std::string> params;
        if (doc.contains("params")) {
            for (const auto& entry : doc.at("params")) {
                if (entry.is_string()) {
                    params.push_back(entry.get<std::string>());
                } else if (entry.is_object()) {
                    std::string name = entry.at("name").get<std::string>();
                    params.push_back(name);
                    if (entry.contains("default"))
                        model.defaults[name] = entry.at("default").get<double>();
                } else {
                    throw ParseError("each params entry must be a name or {name, default}");
                }
            }
        }
        const auto& rhs_obj = doc.at("rhs");
        if (!rhs_obj.is_object()) throw ParseError("rhs must map state names to expressions");
        std::vector<std::string> rhs_text;
        for (const auto& state : states) {
            if (!rhs_obj.contains(state))
                throw ParseError("rhs is missing an equation for state '" + state + "'");
            rhs_text.push_back(rhs_obj.at(state).get<std::string>());
        }
        if (rhs_obj.size() != states.size())
            throw ParseError("rhs mentions a state that is not declared");
        std::string output = doc.at("output").get<std::string>();
        std::vector<double> x0;
        if (doc.contains("x0")) x0 = doc.at("x0").get<std::vector<double>>();
        model.system = make_general_system(states, params, rhs_text, output, x0);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad model file: ") + e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("bad model file: ") + e.what());
    }
}

std::string model_to_json(const GeneralSystem& sys, const ParamMap& defaults) {
    nlohmann::json doc;
    doc["states"] = sys.state_names;
    nlohmann::json params = nlohmann::json::array();
    for (const auto& name : sys.param_names) {
        if (auto it = defaults.find(name); it != defaults.end())
            params.push_back({{"name", name}, {"default", it->second}});
        else
            params.push_back(name);
    }
    doc["params"] = params;
    nlohmann::json rhs = nlohmann::json::object();
    for (std::size_t i = 0; i < sys.state_names.size(); ++i)
        rhs[sys.state_names[i]] = to_string(sys.rhs[i]);
    doc["rhs"] = rhs;
    doc["output"] = to_string(sys.output);
    doc["x0"] = std::vector<double>(sys.x0.data(), sys.x0.data() + sys.x0.size());
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write file '" + path + "'");
    out << content;
    if (!out) throw InvalidArgument("failed while writing '" + path + "'");
}

} // namespace ioident
