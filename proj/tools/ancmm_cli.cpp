// Command-line front end: clustering runs, balancing utilities, the
// transport-oracle comparison, toy-data generation, and benchmarks.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ancmm/ancmm.hpp"
#include "ancmm/data_io.hpp"
#include "ancmm/eval.hpp"
#include "ancmm/marcus.hpp"
#include "ancmm/ot_bridge.hpp"
#include "ancmm/rng.hpp"

namespace {

using namespace ancmm;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNonConvergence = 2;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ClusterOptions {
    std::string input;
    std::string method = "ancmm";
    std::string out_prefix = "run";
    std::string preprocess = "zscore";
    std::string label_column;
    bool has_header = false;
    int clusters = 0;
    int k = 5;
    int knn = 10;
    int restarts = 30;
    int max_outer = 50;
    double lambda0 = 0.0;
    std::uint64_t seed = 0;
};

int distinct_count(const std::vector<int>& labels) {
    return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

void print_metrics(const eval::MetricReport& m, int components) {
    std::printf("ACC=%.4f NMI=%.4f PUR=%.4f components=%d\n", m.acc, m.nmi, m.pur,
                components);
}

io::RunRecord base_record(const ClusterOptions& opt, const io::DataMatrix& data,
                          const AncmmConfig& cfg) {
    io::RunRecord record;
    record.method = opt.method;
    record.input = opt.input;
    record.preprocess_mode = opt.preprocess;
    record.n = static_cast<int>(data.X.rows());
    record.d = static_cast<int>(data.X.cols());
    record.c = opt.clusters;
    record.k = opt.k;
    record.lambda0 = opt.lambda0;
    record.seed = opt.seed;
    record.max_outer = cfg.max_outer;
    record.marcus_tol = cfg.marcus_tol;
    record.eps_rank = cfg.eps_rank;
    record.edge_eps = cfg.edge_eps;
    record.objective_tol = cfg.objective_tol;
    return record;
}

void fill_cluster_result(io::RunRecord& record, const ClusterResult& result) {
    record.iterations = result.iterations;
    record.converged = result.converged;
    record.rank_satisfied = result.rank_satisfied;
    record.components = result.labels.count;
    record.labels = result.labels.labels;
    record.objective_trace = result.objective_trace;
    record.epsilon_trace = result.epsilon_trace;
    record.epsilon_ratio_trace = result.epsilon_ratio_trace;
    record.lambda_trace = result.lambda_trace;
    record.component_trace = result.component_trace;
}

int cmd_cluster(const ClusterOptions& opt) {
    const auto start = Clock::now();
    io::DataMatrix data = io::load_csv(
        opt.input, opt.has_header,
        opt.label_column.empty() ? std::nullopt
                                 : std::optional<std::string>(opt.label_column));
    data = io::preprocess(std::move(data), io::parse_preprocess(opt.preprocess));

    AncmmConfig cfg;
    cfg.c = opt.clusters;
    cfg.k = opt.k;
    cfg.lambda0 = opt.lambda0;
    cfg.seed = opt.seed;
    cfg.max_outer = opt.max_outer;

    io::RunRecord record = base_record(opt, data, cfg);
    Matrix graph = Matrix::Zero(0, 0);
    bool converged = true;

    if (opt.method == "ancmm" || opt.method == "can") {
        const ClusterResult result =
            opt.method == "ancmm" ? run(data.X, cfg) : eval::can_mode(data.X, cfg);
        fill_cluster_result(record, result);
        graph = result.graph;
        converged = result.converged;
    } else if (opt.method == "kmeans") {
        record.labels = eval::kmeans(data.X, opt.clusters, opt.restarts, opt.seed);
        record.components = distinct_count(record.labels);
    } else {  // "sc"
        record.labels =
            eval::spectral_baseline(data.X, opt.clusters, opt.knn, 0.0, opt.seed);
        record.components = distinct_count(record.labels);
    }

    if (data.labels) {
        const eval::MetricReport metrics = eval::evaluate(record.labels, *data.labels);
        record.has_metrics = true;
        record.acc = metrics.acc;
        record.nmi = metrics.nmi;
        record.pur = metrics.pur;
        print_metrics(metrics, record.components);
    } else {
        std::printf("components=%d\n", record.components);
    }
    record.wall_seconds = seconds_since(start);
    io::export_results(record, graph, opt.out_prefix);
    std::printf("results written to %s_*\n", opt.out_prefix.c_str());

    if (!converged) {
        std::fprintf(stderr, "warning: run did not converge within %d iterations\n",
                     record.max_outer);
        return kExitNonConvergence;
    }
    return kExitOk;
}

int cmd_normalize(const std::string& matrix_path, const std::string& algo,
                  std::string out_path, double tol, int max_iter) {
    const Matrix S = io::load_square_matrix(matrix_path);
    if (out_path.empty()) {
        out_path = std::filesystem::path(matrix_path).stem().string() + "_balanced.csv";
    }
    marcus::BalanceReport report;
    Matrix balanced;
    if (algo == "marcus") {
        auto result = marcus::marcus_map(S, tol, max_iter);
        balanced = std::move(result.balanced);
        report = result.report;
    } else {
        auto result = marcus::degree_normalize_iterate(S, tol, max_iter);
        balanced = std::move(result.balanced);
        report = result.report;
    }
    io::save_matrix(balanced, out_path);
    std::printf("algo=%s iterations=%d residual=%.3e -> %s\n", algo.c_str(),
                report.iterations, report.residual, out_path.c_str());
    return kExitOk;
}

int cmd_compare_ot(const std::string& matrix_path, double omega, double tol) {
    const Matrix S = io::load_square_matrix(matrix_path);

    const auto t0 = Clock::now();
    const Matrix balanced = marcus::marcus_map(S, tol).balanced;
    const double marcus_seconds = seconds_since(t0);

    const auto t1 = Clock::now();
    const ot::TransportPlan plan = ot::entropic_plan(S, omega, tol);
    const double ot_seconds = seconds_since(t1);

    const double max_diff = (balanced - plan.P).cwiseAbs().maxCoeff();
    std::printf("omega=%.6g max_elementwise_diff=%.3e\n", omega, max_diff);
    std::printf("marcus_seconds=%.6f ot_seconds=%.6f\n", marcus_seconds, ot_seconds);
    if (omega == 1.0 && max_diff > 1e-6) {
        std::fprintf(stderr, "warning: omega=1 plans disagree beyond 1e-6\n");
        return kExitNonConvergence;
    }
    return kExitOk;
}

int cmd_toy(int n, double noise, std::uint64_t seed, int clusters, int k,
            const std::string& out_prefix) {
    const auto start = Clock::now();
    const io::DataMatrix moons = io::two_moons(n, noise, seed);
    io::save_csv(moons, out_prefix + "_data.csv");

    AncmmConfig cfg;
    cfg.c = clusters;
    cfg.k = k;
    cfg.seed = seed;

    ClusterOptions opt;
    opt.input = moons.provenance;
    opt.clusters = clusters;
    opt.k = k;
    opt.seed = seed;
    opt.preprocess = "none";

    int exit_code = kExitOk;
    eval::MetricReport metrics[2];
    const char* names[2] = {"ancmm", "can"};
    for (int m = 0; m < 2; ++m) {
        const ClusterResult result =
            m == 0 ? run(moons.X, cfg) : eval::can_mode(moons.X, cfg);
        metrics[m] = eval::evaluate(result.labels.labels, *moons.labels);
        opt.method = names[m];
        io::RunRecord record = base_record(opt, moons, cfg);
        fill_cluster_result(record, result);
        record.has_metrics = true;
        record.acc = metrics[m].acc;
        record.nmi = metrics[m].nmi;
        record.pur = metrics[m].pur;
        record.wall_seconds = seconds_since(start);
        io::export_results(record, result.graph,
                           out_prefix + "_" + names[m]);
        if (!result.converged) exit_code = kExitNonConvergence;
    }

    char table[256];
    std::snprintf(table, sizeof(table),
                  "metric      CAN    ANCMM\n"
                  "ACC      %6.1f   %6.1f\n"
                  "NMI      %6.1f   %6.1f\n"
                  "PUR      %6.1f   %6.1f\n",
                  100.0 * metrics[1].acc, 100.0 * metrics[0].acc, 100.0 * metrics[1].nmi,
                  100.0 * metrics[0].nmi, 100.0 * metrics[1].pur, 100.0 * metrics[0].pur);
    std::fputs(table, stdout);
    io::write_text_atomic(out_prefix + "_comparison.txt", table);
    std::printf("results written to %s_{data,comparison,ancmm_*,can_*}\n",
                out_prefix.c_str());
    return exit_code;
}

int cmd_bench(const std::vector<int>& sizes, int reps, std::uint64_t seed,
              const std::string& out_path) {
    std::string csv = "n,algo,rep,iterations,seconds,seconds_per_iteration\n";
    std::printf("n     algo    rep  iters  sec/iter\n");
    for (int n : sizes) {
        rng::Engine engine(seed + n);
        Matrix S(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                S(i, j) = S(j, i) = rng::uniform(engine, 0.1, 1.0);
            }
        }
        for (const char* algo : {"marcus", "degree"}) {
            std::vector<double> per_iter;
            for (int rep = 0; rep < reps; ++rep) {
                const auto t0 = Clock::now();
                int iterations = 0;
                if (algo[0] == 'm') {
                    iterations = marcus::marcus_map(S).report.iterations;
                } else {
                    iterations = marcus::degree_normalize_iterate(S).report.iterations;
                }
                const double elapsed = seconds_since(t0);
                const double rate = elapsed / std::max(iterations, 1);
                per_iter.push_back(rate);
                csv += std::to_string(n) + ',' + algo + ',' + std::to_string(rep) + ',' +
                       std::to_string(iterations) + ',' + std::to_string(elapsed) + ',' +
                       std::to_string(rate) + '\n';
                std::printf("%-5d %-7s %-4d %-6d %.3e\n", n, algo, rep, iterations, rate);
            }
            double mean = 0.0;
            for (double v : per_iter) mean += v;
            mean /= per_iter.size();
            double var = 0.0;
            for (double v : per_iter) var += (v - mean) * (v - mean);
            var /= per_iter.size();
            std::printf("%-5d %-7s mean sec/iter %.3e (stddev %.1e)\n", n, algo, mean,
                        std::sqrt(var));
        }
        const auto [marcus_cost, degree_cost] = marcus::count_flops_per_iteration(n);
        std::printf(
            "n=%d flops/iter: marcus {add %lld, mul %lld, div %lld} "
            "degree {add %lld, mul %lld, div %lld, sqrt %lld} mul ratio %.1f\n",
            n, marcus_cost.adds, marcus_cost.muls, marcus_cost.divs, degree_cost.adds,
            degree_cost.muls, degree_cost.divs, degree_cost.sqrts,
            static_cast<double>(degree_cost.muls) / marcus_cost.muls);
    }
    if (!out_path.empty()) {
        io::write_text_atomic(out_path, csv);
        std::printf("timings written to %s\n", out_path.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Doubly stochastic adaptive-neighbors clustering"};
    app.require_subcommand(1);

    ClusterOptions cluster_opt;
    CLI::App* cluster = app.add_subcommand("cluster", "Cluster a CSV dataset");
    cluster->add_option("--input", cluster_opt.input, "Input CSV file")
        ->required()
        ->check(CLI::ExistingFile);
    cluster->add_option("--clusters", cluster_opt.clusters, "Number of clusters")
        ->required()
        ->check(CLI::PositiveNumber);
    cluster->add_option("--method", cluster_opt.method, "Clustering method")
        ->check(CLI::IsMember({"ancmm", "can", "kmeans", "sc"}));
    cluster->add_option("--k", cluster_opt.k, "Neighbor count (ancmm/can)");
    cluster->add_option("--knn", cluster_opt.knn, "Neighbor count (sc affinity)");
    cluster->add_option("--restarts", cluster_opt.restarts, "k-means restarts");
    cluster->add_option("--lambda0", cluster_opt.lambda0,
                        "Initial lambda (0 = auto from alpha)");
    cluster->add_option("--max-outer", cluster_opt.max_outer, "Outer iteration cap");
    cluster->add_option("--preprocess", cluster_opt.preprocess, "Feature scaling")
        ->check(CLI::IsMember({"zscore", "minmax", "none"}));
    cluster->add_option("--seed", cluster_opt.seed, "RNG seed");
    cluster->add_option("--out", cluster_opt.out_prefix, "Output path prefix");
    cluster->add_flag("--has-header", cluster_opt.has_header, "First row is a header");
    cluster->add_option("--label-column", cluster_opt.label_column,
                        "Ground-truth column (name with --has-header, else 0-based index)");

    std::string matrix_path, algo = "marcus", normalize_out;
    double tol = marcus::kDefaultTol;
    int max_iter = marcus::kDefaultMaxIter;
    CLI::App* normalize =
        app.add_subcommand("normalize", "Balance a symmetric matrix to doubly stochastic");
    normalize->add_option("--matrix", matrix_path, "CSV matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    normalize->add_option("--algo", algo, "Balancing algorithm")
        ->check(CLI::IsMember({"marcus", "degree"}));
    normalize->add_option("--out", normalize_out, "Output CSV path");
    normalize->add_option("--tol", tol, "Row-sum tolerance");
    normalize->add_option("--max-iter", max_iter, "Iteration cap");

    std::string ot_matrix;
    double omega = 1.0, ot_tol = 1e-10;
    CLI::App* compare =
        app.add_subcommand("compare-ot", "Compare balancing with the entropic plan");
    compare->add_option("--matrix", ot_matrix, "CSV matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--omega", omega, "Entropy weight")->check(CLI::PositiveNumber);
    compare->add_option("--tol", ot_tol, "Marginal tolerance");

    int toy_n = 200, toy_clusters = 2, toy_k = 10;
    double toy_noise = 0.13;
    std::uint64_t toy_seed = 1;
    std::string toy_out = "toy";
    CLI::App* toy = app.add_subcommand("toy", "Two-moons comparison run");
    toy->add_option("--n", toy_n, "Sample count (even)");
    toy->add_option("--noise", toy_noise, "Gaussian noise level");
    toy->add_option("--seed", toy_seed, "RNG seed");
    toy->add_option("--clusters", toy_clusters, "Cluster count");
    toy->add_option("--k", toy_k, "Neighbor count");
    toy->add_option("--out", toy_out, "Output path prefix");

    std::string sizes_arg = "100,200,400,800", bench_out = "bench.csv";
    int reps = 3;
    std::uint64_t bench_seed = 0;
    CLI::App* bench =
        app.add_subcommand("bench", "Time balancing iterations across sizes");
    bench->add_option("--sizes", sizes_arg, "Comma-separated matrix sizes");
    bench->add_option("--reps", reps, "Repetitions per size");
    bench->add_option("--seed", bench_seed, "RNG seed");
    bench->add_option("--out", bench_out, "Timings CSV path (empty = skip)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cluster->parsed()) return cmd_cluster(cluster_opt);
        if (normalize->parsed())
            return cmd_normalize(matrix_path, algo, normalize_out, tol, max_iter);
        if (compare->parsed()) return cmd_compare_ot(ot_matrix, omega, ot_tol);
        if (toy->parsed())
            return cmd_toy(toy_n, toy_noise, toy_seed, toy_clusters, toy_k, toy_out);
        if (bench->parsed()) {
            std::vector<int> sizes;
            std::stringstream stream(sizes_arg);
            std::string token;
            while (std::getline(stream, token, ',')) {
                const int value = std::stoi(token);
                if (value < 2) throw std::invalid_argument("sizes must be >= 2");
                sizes.push_back(value);
            }
            if (sizes.empty()) throw std::invalid_argument("no sizes given");
            return cmd_bench(sizes, reps, bench_seed, bench_out);
        }
    } catch (const NonConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitOk;
}
