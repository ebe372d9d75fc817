#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ancmm/common.hpp"

// Dataset ingestion, preprocessing, synthetic data, and result serialization.
namespace ancmm::io {

/// Parse failure with the offending location baked into the message.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct DataMatrix {
    Matrix X;
    std::optional<std::vector<int>> labels;
    std::vector<std::string> feature_names;
    std::string provenance;
};

enum class Preprocess { Zscore, Minmax, None };

Preprocess parse_preprocess(const std::string& name);
std::string preprocess_name(Preprocess mode);

/// Numeric CSV, rows = samples. label_column names a header column, or is a
/// 0-based index for headerless files; its values may be arbitrary class
/// tokens (mapped to ints by first occurrence). NaN/Inf cells are rejected.
DataMatrix load_csv(const std::string& path, bool has_header,
                    const std::optional<std::string>& label_column = std::nullopt);

/// Features (and a trailing "class" column when labels exist), 17 significant
/// digits, atomic replace.
void save_csv(const DataMatrix& data, const std::string& path);

/// Headerless numeric grid as a square matrix.
Matrix load_square_matrix(const std::string& path);
void save_matrix(const Matrix& M, const std::string& path);

std::vector<int> load_labels(const std::string& path);

/// Atomic text write (temp + rename); interrupted runs leave no partial file.
void write_text_atomic(const std::string& path, const std::string& content);

/// Per-feature transform; constant features map to 0 under zscore/minmax.
DataMatrix preprocess(DataMatrix data, Preprocess mode);

/// Two interleaved half-circles of n/2 points each plus isotropic Gaussian
/// noise; labels are the moon index. Deterministic given seed.
DataMatrix two_moons(int n, double noise, std::uint64_t seed);

/// S_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)), zero diagonal.
Matrix gaussian_affinity(const Matrix& X, double sigma);

struct RunRecord {
    // config snapshot
    std::string method;
    std::string input;
    std::string preprocess_mode;
    int n = 0, d = 0, c = 0, k = 0;
    double lambda0 = 0.0;
    std::uint64_t seed = 0;
    int max_outer = 0;
    double marcus_tol = 0.0, eps_rank = 0.0, edge_eps = 0.0, objective_tol = 0.0;

    // outcome
    int iterations = 0;
    bool converged = true;
    bool rank_satisfied = true;
    int components = 0;
    std::vector<int> labels;
    bool has_metrics = false;
    double acc = 0.0, nmi = 0.0, pur = 0.0;

    // traces (may be empty)
    std::vector<double> objective_trace;
    std::vector<double> epsilon_trace;
    std::vector<double> epsilon_ratio_trace;
    std::vector<double> lambda_trace;
    std::vector<int> component_trace;

    double wall_seconds = 0.0;
};

/// Writes <prefix>_metrics.txt (key=value, fixed key order),
/// <prefix>_graph.csv (edge list "i,j,weight" for entries > edge_eps),
/// <prefix>_labels.csv, <prefix>_trace.csv, and <prefix>_timings.txt.
/// Everything except the timing file is byte-deterministic; all writes are
/// atomic (temp + rename).
void export_results(const RunRecord& record, const Matrix& graph,
                    const std::string& path_prefix);

}  // namespace ancmm::io
