#include "ancmm/data_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "ancmm/rng.hpp"

namespace ancmm::io {

namespace {

std::string fmt17(double x) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& token, double* out) {
    const std::string t = trim(token);
    if (t.empty()) return false;
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) return false;
    *out = value;
    return true;
}

bool parse_int(const std::string& token, long* out) {
    const std::string t = trim(token);
    if (t.empty()) return false;
    char* end = nullptr;
    const long value = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) return false;
    *out = value;
    return true;
}

std::vector<std::string> read_nonempty_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (!t.empty()) lines.push_back(t);
    }
    return lines;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw std::runtime_error("failed while writing " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("failed to move " + tmp + " to " + path);
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
    atomic_write(path, content);
}

Preprocess parse_preprocess(const std::string& name) {
    if (name == "zscore") return Preprocess::Zscore;
    if (name == "minmax") return Preprocess::Minmax;
    if (name == "none") return Preprocess::None;
    throw std::invalid_argument("unknown preprocess mode: " + name);
}

std::string preprocess_name(Preprocess mode) {
    switch (mode) {
        case Preprocess::Zscore: return "zscore";
        case Preprocess::Minmax: return "minmax";
        case Preprocess::None: return "none";
    }
    return "unknown";
}

DataMatrix load_csv(const std::string& path, bool has_header,
                    const std::optional<std::string>& label_column) {
    const std::vector<std::string> lines = read_nonempty_lines(path);
    if (lines.empty()) throw ParseError("empty file: " + path, 0);

    std::size_t first_data = 0;
    std::vector<std::string> header;
    if (has_header) {
        header = split_fields(lines[0]);
        first_data = 1;
    }
    if (lines.size() <= first_data) throw ParseError("no data rows in " + path, 1);
    const int columns = static_cast<int>(split_fields(lines[first_data]).size());

    int label_index = -1;
    if (label_column) {
        if (has_header) {
            for (std::size_t j = 0; j < header.size(); ++j) {
                if (trim(header[j]) == *label_column) {
                    label_index = static_cast<int>(j);
                    break;
                }
            }
        }
        if (label_index < 0) {
            long parsed = 0;
            if (parse_int(*label_column, &parsed) && parsed >= 0 && parsed < columns) {
                label_index = static_cast<int>(parsed);
            } else {
                throw std::invalid_argument("label column '" + *label_column +
                                            "' not found in " + path);
            }
        }
    }

    const int n = static_cast<int>(lines.size() - first_data);
    const int d = columns - (label_index >= 0 ? 1 : 0);
    if (n < 2) throw ParseError("need at least two samples in " + path, 1);
    if (d < 1) throw ParseError("need at least one feature column in " + path, 1);

    DataMatrix data;
    data.X.resize(n, d);
    data.provenance = path;
    std::vector<std::string> label_tokens;
    if (label_index >= 0) label_tokens.reserve(n);

    for (int i = 0; i < n; ++i) {
        const int line_number = static_cast<int>(first_data + i + 1);
        const std::vector<std::string> fields = split_fields(lines[first_data + i]);
        if (static_cast<int>(fields.size()) != columns) {
            throw ParseError("line " + std::to_string(line_number) + ": expected " +
                                 std::to_string(columns) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_number);
        }
        int feature = 0;
        for (int j = 0; j < columns; ++j) {
            if (j == label_index) {
                label_tokens.push_back(trim(fields[j]));
                continue;
            }
            double value = 0.0;
            if (!parse_double(fields[j], &value)) {
                throw ParseError("line " + std::to_string(line_number) + ", column " +
                                     std::to_string(j + 1) + ": not a number: '" +
                                     trim(fields[j]) + "'",
                                 line_number);
            }
            if (!std::isfinite(value)) {
                throw ParseError("line " + std::to_string(line_number) + ", column " +
                                     std::to_string(j + 1) + ": non-finite value",
                                 line_number);
            }
            data.X(i, feature++) = value;
        }
    }

    if (has_header) {
        for (int j = 0; j < columns; ++j) {
            if (j != label_index) data.feature_names.push_back(trim(header[j]));
        }
    }
    if (label_index >= 0) {
        // Integer class tokens keep their values (round-trip stability);
        // anything else maps by first occurrence.
        std::vector<int> labels(n);
        bool all_int = true;
        for (const std::string& token : label_tokens) {
            long value = 0;
            if (!parse_int(token, &value)) {
                all_int = false;
                break;
            }
        }
        if (all_int) {
            for (int i = 0; i < n; ++i) {
                long value = 0;
                parse_int(label_tokens[i], &value);
                labels[i] = static_cast<int>(value);
            }
        } else {
            std::unordered_map<std::string, int> ids;
            for (int i = 0; i < n; ++i) {
                labels[i] =
                    ids.try_emplace(label_tokens[i], static_cast<int>(ids.size()))
                        .first->second;
            }
        }
        data.labels = std::move(labels);
    }
    return data;
}

void save_csv(const DataMatrix& data, const std::string& path) {
    std::string out;
    const int d = static_cast<int>(data.X.cols());
    for (int j = 0; j < d; ++j) {
        if (j) out += ',';
        out += j < static_cast<int>(data.feature_names.size()) ? data.feature_names[j]
                                                               : "x" + std::to_string(j);
    }
    if (data.labels) out += ",class";
    out += '\n';
    for (int i = 0; i < data.X.rows(); ++i) {
        for (int j = 0; j < d; ++j) {
            if (j) out += ',';
            out += fmt17(data.X(i, j));
        }
        if (data.labels) out += "," + std::to_string((*data.labels)[i]);
        out += '\n';
    }
    atomic_write(path, out);
}

Matrix load_square_matrix(const std::string& path) {
    const std::vector<std::string> lines = read_nonempty_lines(path);
    if (lines.empty()) throw ParseError("empty matrix file: " + path, 0);
    const int n = static_cast<int>(lines.size());
    const int m = static_cast<int>(split_fields(lines[0]).size());
    if (n != m) {
        throw ParseError("matrix in " + path + " is " + std::to_string(n) + "x" +
                             std::to_string(m) + ", expected square",
                         1);
    }
    Matrix M(n, n);
    for (int i = 0; i < n; ++i) {
        const std::vector<std::string> fields = split_fields(lines[i]);
        if (static_cast<int>(fields.size()) != m) {
            throw ParseError("line " + std::to_string(i + 1) + ": ragged row", i + 1);
        }
        for (int j = 0; j < m; ++j) {
            double value = 0.0;
            if (!parse_double(fields[j], &value) || !std::isfinite(value)) {
                throw ParseError("line " + std::to_string(i + 1) + ", column " +
                                     std::to_string(j + 1) + ": not a finite number",
                                 i + 1);
            }
            M(i, j) = value;
        }
    }
    return M;
}

void save_matrix(const Matrix& M, const std::string& path) {
    std::string out;
    for (int i = 0; i < M.rows(); ++i) {
        for (int j = 0; j < M.cols(); ++j) {
            if (j) out += ',';
            out += fmt17(M(i, j));
        }
        out += '\n';
    }
    atomic_write(path, out);
}

std::vector<int> load_labels(const std::string& path) {
    const std::vector<std::string> lines = read_nonempty_lines(path);
    std::vector<int> labels;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        long value = 0;
        if (!parse_int(lines[i], &value)) {
            if (i == 0) continue;  // header
            throw ParseError("line " + std::to_string(i + 1) + ": bad label",
                             static_cast<int>(i + 1));
        }
        labels.push_back(static_cast<int>(value));
    }
    return labels;
}

DataMatrix preprocess(DataMatrix data, Preprocess mode) {
    const int n = static_cast<int>(data.X.rows());
    const int d = static_cast<int>(data.X.cols());
    if (mode == Preprocess::None || n < 2) return data;
    for (int j = 0; j < d; ++j) {
        auto column = data.X.col(j);
        if (mode == Preprocess::Zscore) {
            const double mean = column.mean();
            const double var = (column.array() - mean).square().sum() / (n - 1);
            const double stddev = std::sqrt(var);
            if (stddev > 0.0) {
                column = (column.array() - mean) / stddev;
            } else {
                column.setZero();
            }
        } else {
            const double lo = column.minCoeff();
            const double hi = column.maxCoeff();
            if (hi > lo) {
                column = (column.array() - lo) / (hi - lo);
            } else {
                column.setZero();
            }
        }
    }
    return data;
}

DataMatrix two_moons(int n, double noise, std::uint64_t seed) {
    require(n >= 4, "two_moons: need n >= 4");
    require(n % 2 == 0, "two_moons: n must be even");
    require(noise >= 0.0, "two_moons: noise must be >= 0");
    const int half = n / 2;

    DataMatrix data;
    data.X.resize(n, 2);
    std::vector<int> labels(n);
    for (int i = 0; i < half; ++i) {
        const double theta = std::numbers::pi * i / (half - 1);
        data.X(i, 0) = std::cos(theta);
        data.X(i, 1) = std::sin(theta);
        labels[i] = 0;
        data.X(half + i, 0) = 1.0 - std::cos(theta);
        data.X(half + i, 1) = 0.5 - std::sin(theta);
        labels[half + i] = 1;
    }
    if (noise > 0.0) {
        rng::Engine engine(seed);
        for (int i = 0; i < n; ++i) {
            data.X(i, 0) += noise * rng::normal(engine);
            data.X(i, 1) += noise * rng::normal(engine);
        }
    }
    data.labels = std::move(labels);
    data.feature_names = {"x0", "x1"};
    data.provenance = "two_moons(n=" + std::to_string(n) + ",noise=" + fmt17(noise) +
                      ",seed=" + std::to_string(seed) + ")";
    return data;
}

Matrix gaussian_affinity(const Matrix& X, double sigma) {
    require(sigma > 0.0, "gaussian_affinity: sigma must be positive");
    const int n = static_cast<int>(X.rows());
    Matrix S = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d2 = (X.row(i) - X.row(j)).squaredNorm();
            const double w = std::exp(-d2 / (2.0 * sigma * sigma));
            S(i, j) = w;
            S(j, i) = w;
        }
    }
    return S;
}

void export_results(const RunRecord& record, const Matrix& graph,
                    const std::string& path_prefix) {
    std::string metrics;
    metrics += "method=" + record.method + '\n';
    metrics += "input=" + record.input + '\n';
    metrics += "preprocess=" + record.preprocess_mode + '\n';
    metrics += "n=" + std::to_string(record.n) + '\n';
    metrics += "d=" + std::to_string(record.d) + '\n';
    metrics += "clusters=" + std::to_string(record.c) + '\n';
    metrics += "k=" + std::to_string(record.k) + '\n';
    metrics += "lambda0=" + fmt17(record.lambda0) + '\n';
    metrics += "seed=" + std::to_string(record.seed) + '\n';
    metrics += "max_outer=" + std::to_string(record.max_outer) + '\n';
    metrics += "marcus_tol=" + fmt17(record.marcus_tol) + '\n';
    metrics += "eps_rank=" + fmt17(record.eps_rank) + '\n';
    metrics += "edge_eps=" + fmt17(record.edge_eps) + '\n';
    metrics += "objective_tol=" + fmt17(record.objective_tol) + '\n';
    metrics += "iterations=" + std::to_string(record.iterations) + '\n';
    metrics += std::string("converged=") + (record.converged ? "true" : "false") + '\n';
    metrics +=
        std::string("rank_satisfied=") + (record.rank_satisfied ? "true" : "false") + '\n';
    metrics += "components=" + std::to_string(record.components) + '\n';
    if (record.has_metrics) {
        metrics += "acc=" + fmt17(record.acc) + '\n';
        metrics += "nmi=" + fmt17(record.nmi) + '\n';
        metrics += "pur=" + fmt17(record.pur) + '\n';
    }
    atomic_write(path_prefix + "_metrics.txt", metrics);

    std::string edges = "i,j,weight\n";
    for (int i = 0; i < graph.rows(); ++i) {
        for (int j = 0; j < graph.cols(); ++j) {
            if (graph(i, j) > record.edge_eps) {
                edges += std::to_string(i) + ',' + std::to_string(j) + ',' +
                         fmt17(graph(i, j)) + '\n';
            }
        }
    }
    atomic_write(path_prefix + "_graph.csv", edges);

    std::string labels = "label\n";
    for (int label : record.labels) labels += std::to_string(label) + '\n';
    atomic_write(path_prefix + "_labels.csv", labels);

    std::string trace = "iter,objective,epsilon,epsilon_ratio,lambda,components\n";
    for (std::size_t t = 0; t < record.objective_trace.size(); ++t) {
        trace += std::to_string(t + 1);
        trace += ',' + fmt17(record.objective_trace[t]);
        trace += ',';
        if (t < record.epsilon_trace.size()) trace += fmt17(record.epsilon_trace[t]);
        trace += ',';
        if (t < record.epsilon_ratio_trace.size()) {
            trace += fmt17(record.epsilon_ratio_trace[t]);
        }
        trace += ',';
        if (t < record.lambda_trace.size()) trace += fmt17(record.lambda_trace[t]);
        trace += ',';
        if (t < record.component_trace.size()) {
            trace += std::to_string(record.component_trace[t]);
        }
        trace += '\n';
    }
    atomic_write(path_prefix + "_trace.csv", trace);

    atomic_write(path_prefix + "_timings.txt",
                 "wall_seconds=" + fmt17(record.wall_seconds) + '\n');
}

}  // namespace ancmm::io
