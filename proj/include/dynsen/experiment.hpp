#pragma once

#include "dynsen/config.hpp"
#include "dynsen/dictionary.hpp"
#include "dynsen/filters.hpp"
#include "dynsen/graph.hpp"
#include "dynsen/graph_generators.hpp"
#include "dynsen/ingest.hpp"
#include "dynsen/linalg.hpp"
#include "dynsen/placement.hpp"
#include "dynsen/random.hpp"
#include "dynsen/sampling.hpp"
#include "dynsen/signal_models.hpp"
#include "dynsen/spectral.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace dynsen {

/// Child-seed streams of a replicate seed. Every random draw in a replicate
/// belongs to exactly one stream, so adding draws to one stage never perturbs
/// the others.
namespace seed_stream {
inline constexpr std::uint64_t graph = 0;
inline constexpr std::uint64_t model = 1;
inline constexpr std::uint64_t train_noise = 2;
inline constexpr std::uint64_t measure = 3;
inline constexpr std::uint64_t ingest = 4;
}  // namespace seed_stream

/// Everything one replicate needs to run any method: the world (graph,
/// sensing matrix, ground truth) plus the shared initialization. Methods run
/// on the same inputs are paired sample-for-sample: per-step measurement
/// noise is reseeded from measure_seed and the step index alone.
struct ReplicateInputs {
  Graph graph;
  Eigen::MatrixXd sensing;           // dense sensing matrix G
  Eigen::MatrixXd x0;                // noisy initial window, N x D
  Eigen::MatrixXd a0;                // initial dictionary from the window's SVD
  Eigen::MatrixXd truth;             // ground-truth test signals, N x n_test
  std::vector<int> initial_sensors;  // greedy selection on the initial design
  std::uint64_t replicate_seed = 0;
  std::uint64_t measure_seed = 0;
};

/// Dense sensing matrix for a configuration: exact spectral synthesis at
/// desk scale, Chebyshev approximation beyond it.
inline Eigen::MatrixXd make_sensing_matrix(const ExperimentConfig& config, const Graph& graph,
                                           const Spectrum& spec) {
  const int n = graph.n_nodes();
  if (config.filter_kind == FilterKind::identity) return Eigen::MatrixXd::Identity(n, n);
  FilterSpec fspec;
  fspec.kind = config.filter_kind;
  fspec.chebyshev_order = config.chebyshev_order;
  if (n <= 512 || config.chebyshev_order == 0)
    return exact_filter_matrix(spec, filter_response(fspec, spec.lambda_max()));
  const double lambda_max = estimate_lambda_max(graph);
  return chebyshev_filter_matrix(graph, filter_response(fspec, lambda_max), lambda_max,
                                 config.chebyshev_order);
}

namespace detail {

inline ReplicateInputs finish_replicate(const ExperimentConfig& config, Graph&& graph,
                                        Eigen::MatrixXd&& sensing, const Eigen::MatrixXd& x_train,
                                        Eigen::MatrixXd&& truth, std::uint64_t rep_seed) {
  const int n = graph.n_nodes();
  Rng train_rng(derive_seed(rep_seed, seed_stream::train_noise));
  Eigen::MatrixXd x0 = x_train.rightCols(config.window);
  if (config.noise_variance > 0.0)
    x0 += gaussian_matrix(n, config.window, std::sqrt(config.noise_variance), train_rng);
  Eigen::MatrixXd a0 = left_singular_vectors(x0, config.window);
  // The design matrix has rank at most D, so fleets larger than the window
  // are completed with zero-gain nodes instead of failing.
  GreedyOptions greedy;
  greedy.allow_rank_deficient = true;
  GreedySelection selection = greedy_select(build_Z(a0, sensing), config.sensor_count, greedy);
  return ReplicateInputs{std::move(graph),
                         std::move(sensing),
                         std::move(x0),
                         std::move(a0),
                         std::move(truth),
                         std::move(selection.nodes),
                         rep_seed,
                         derive_seed(rep_seed, seed_stream::measure)};
}

}  // namespace detail

/// Builds the world and shared initialization for one replicate. Replicates
/// differ only through the seed derived from (config.seed, replicate).
inline ReplicateInputs build_replicate(const ExperimentConfig& config, int replicate) {
  config.validate();
  const std::uint64_t rep_seed = derive_seed(config.seed, static_cast<std::uint64_t>(replicate));

  if (config.scenario == Scenario::real_data) {
    if (config.data_path.empty())
      throw std::invalid_argument("build_replicate: data.path required for the real scenario");
    Rng ingest_rng(derive_seed(rep_seed, seed_stream::ingest));
    GridData data = ingest_grid_csv(config.data_path, config.data_nodes, config.graph_knn, ingest_rng);
    if (data.signals.cols() < config.n_train + config.n_test)
      throw std::runtime_error("build_replicate: table has fewer time columns than the horizon");
    const Spectrum spec = spectrum(data.graph);
    Eigen::MatrixXd sensing = make_sensing_matrix(config, data.graph, spec);
    Eigen::MatrixXd x_train = data.signals.leftCols(config.n_train);
    Eigen::MatrixXd truth = data.signals.middleCols(config.n_train, config.n_test);
    return detail::finish_replicate(config, std::move(data.graph), std::move(sensing), x_train,
                                    std::move(truth), rep_seed);
  }

  Rng graph_rng(derive_seed(rep_seed, seed_stream::graph));
  Graph graph = random_sensor_graph(config.graph_nodes, graph_rng, config.graph_knn);
  const int n = graph.n_nodes();
  const Spectrum spec = spectrum(graph);
  Eigen::MatrixXd sensing = make_sensing_matrix(config, graph, spec);

  const TimeGrid grid{config.sampling_period, config.n_train, config.n_test};
  Eigen::MatrixXd x_train(n, config.n_train);
  Eigen::MatrixXd truth(n, config.n_test);
  if (config.scenario == Scenario::synthetic_bl) {
    BandlimitedModel model(spec, config.bandwidth);
    for (int k = 1; k <= config.n_train; ++k) x_train.col(k - 1) = model.signal(grid.time(k));
    for (int j = 1; j <= config.n_test; ++j)
      truth.col(j - 1) = model.signal(grid.time(config.n_train + j));
  } else {
    Rng model_rng(derive_seed(rep_seed, seed_stream::model));
    PiecewiseConstantModel model(n, random_connected_partition(graph, config.clusters, model_rng));
    for (int k = 1; k <= config.n_train; ++k) x_train.col(k - 1) = model.signal(grid.time(k));
    for (int j = 1; j <= config.n_test; ++j)
      truth.col(j - 1) = model.signal(grid.time(config.n_train + j));
  }
  return detail::finish_replicate(config, std::move(graph), std::move(sensing), x_train,
                                  std::move(truth), rep_seed);
}

/// One method's trace over one replicate.
struct RunRecord {
  Method method = Method::dynamic;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::vector<double> mse;                     // ||x_t - x_hat_t||^2 / N per test step
  std::vector<std::vector<int>> positions;     // sensors used at each step
  std::vector<std::vector<SensorMove>> moves;  // relocation decisions after each step
  std::vector<int> ista_iterations;            // per step; empty for static methods
  int ista_nonconverged = 0;
  double wall_seconds = 0.0;
};

/// Runs one method over the test horizon of a prebuilt replicate. Per step:
/// refresh the dictionary (method-dependent), sample at the current sensors,
/// reconstruct, score against ground truth, then slide the window and (for
/// the dynamic methods) relocate the fleet.
inline RunRecord run_replicate(const ExperimentConfig& config, Method method,
                               const ReplicateInputs& inputs, int replicate) {
  const auto start = std::chrono::steady_clock::now();
  const int n = inputs.graph.n_nodes();
  const int d = config.window;
  const bool is_dynamic = method == Method::dynamic || method == Method::dynamic_pinf;
  const int hop_limit = method == Method::dynamic_pinf ? kInfiniteHops : config.hop_limit;
  const Execution execution =
      config.parallel_relocation ? Execution::parallel : Execution::sequential;

  RunRecord record;
  record.method = method;
  record.replicate = replicate;
  record.seed = inputs.replicate_seed;

  std::vector<int> positions = inputs.initial_sensors;
  std::optional<OnlineDictionaryLearner> learner;
  if (is_dynamic)
    learner.emplace(inputs.a0, Eigen::MatrixXd::Ones(d, d), inputs.x0, config.learning);
  Eigen::MatrixXd window;  // sliding window of static2's per-step SVD
  if (method == Method::static2) window = inputs.x0;

  Eigen::MatrixXd svd_dictionary;
  for (int j = 1; j <= config.n_test; ++j) {
    const Eigen::MatrixXd* dictionary = nullptr;
    if (is_dynamic) {
      const IstaResult ista = learner->learn_step();
      record.ista_iterations.push_back(ista.iterations);
      if (!ista.converged) ++record.ista_nonconverged;
      dictionary = &learner->dictionary();
    } else if (method == Method::static1) {
      dictionary = &inputs.a0;
    } else {
      svd_dictionary = left_singular_vectors(window, d);
      dictionary = &svd_dictionary;
    }

    record.positions.push_back(positions);
    const SamplingOperator op{positions, &inputs.sensing};
    Rng step_rng(derive_seed(inputs.measure_seed, static_cast<std::uint64_t>(j)));
    const Eigen::VectorXd x_true = inputs.truth.col(j - 1);
    const Eigen::VectorXd c = sample(op, x_true, config.noise_variance, step_rng);
    const Eigen::VectorXd x_hat = reconstruct(op, *dictionary, c);
    record.mse.push_back((x_true - x_hat).squaredNorm() / n);

    if (is_dynamic) {
      learner->push_signal(x_hat);
      PlacementStepResult step =
          placement_step(inputs.graph, *dictionary, &inputs.sensing, positions, hop_limit, execution);
      positions = std::move(step.positions);
      record.moves.push_back(std::move(step.moves));
    } else {
      if (method == Method::static2) {
        window.leftCols(d - 1) = window.rightCols(d - 1).eval();
        window.col(d - 1) = x_hat;
      }
      record.moves.emplace_back();  // static fleets never move
    }
  }

  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

struct ExperimentResult {
  /// by_method[m][r]: record of config.methods[m] on replicate r.
  std::vector<std::vector<RunRecord>> by_method;
  /// World of replicate 0, persisted alongside the numeric outputs.
  std::optional<Graph> replicate0_graph;
};

/// Runs every configured method over every replicate. Replicates execute in
/// parallel when hardware allows; each owns all of its randomness, so the
/// result is identical to the sequential order.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int n_methods = static_cast<int>(config.methods.size());
  const int n_replicates = config.replicates;

  ExperimentResult result;
  result.by_method.assign(n_methods, {});
  for (auto& records : result.by_method) records.resize(n_replicates);

  const auto run_one = [&](int r) {
    ReplicateInputs inputs = build_replicate(config, r);
    for (int m = 0; m < n_methods; ++m)
      result.by_method[m][r] = run_replicate(config, config.methods[m], inputs, r);
    if (r == 0) result.replicate0_graph = std::move(inputs.graph);
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min<int>(n_replicates, hw > 0 ? static_cast<int>(hw) : 1);
  if (workers <= 1) {
    for (int r = 0; r < n_replicates; ++r) run_one(r);
    return result;
  }

  std::atomic<int> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= n_replicates) return;
        try {
          run_one(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

/// mse.csv: one row per (method, test step) with the mean and sample standard
/// deviation across replicates, replicate order fixed for bit reproducibility.
inline void write_mse_csv(const ExperimentConfig& config, const ExperimentResult& result,
                          std::ostream& os) {
  os << "t,method,mean_mse,std_mse\n";
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    const auto& records = result.by_method[m];
    const int r_count = static_cast<int>(records.size());
    for (int t = 1; t <= config.n_test; ++t) {
      double sum = 0.0;
      for (int r = 0; r < r_count; ++r) sum += records[r].mse[t - 1];
      const double mean = sum / r_count;
      double ss = 0.0;
      for (int r = 0; r < r_count; ++r) {
        const double dev = records[r].mse[t - 1] - mean;
        ss += dev * dev;
      }
      const double stddev = r_count > 1 ? std::sqrt(ss / (r_count - 1)) : 0.0;
      os << t << "," << method_name(config.methods[m]) << "," << detail::format_double(mean)
         << "," << detail::format_double(stddev) << "\n";
    }
  }
}

/// trajectory.jsonl: the first configured method on replicate 0, one JSON
/// object per test step. Only actual relocations appear under "moves".
inline void write_trajectory_jsonl(const ExperimentResult& result, std::ostream& os) {
  if (result.by_method.empty() || result.by_method[0].empty())
    throw std::invalid_argument("write_trajectory_jsonl: empty result");
  const RunRecord& record = result.by_method[0][0];
  for (std::size_t j = 0; j < record.positions.size(); ++j) {
    os << "{\"t\":" << (j + 1) << ",\"positions\":[";
    const auto& positions = record.positions[j];
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (i) os << ",";
      os << positions[i];
    }
    os << "],\"moves\":[";
    bool first = true;
    for (const SensorMove& move : record.moves[j]) {
      if (move.from_node == move.to_node) continue;
      if (!first) os << ",";
      first = false;
      os << "{\"sensor\":" << move.sensor << ",\"from\":" << move.from_node
         << ",\"to\":" << move.to_node << ",\"score\":" << detail::format_double(move.score) << "}";
    }
    os << "]}\n";
  }
}

/// Writes mse.csv, trajectory.jsonl, config.echo and the replicate-0 graph
/// into out_dir (created if missing).
inline void write_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto open = [&](const std::string& name) {
    std::ofstream os(out_dir + "/" + name);
    if (!os) throw std::runtime_error("write_outputs: cannot open " + out_dir + "/" + name);
    return os;
  };
  {
    auto os = open("mse.csv");
    write_mse_csv(config, result, os);
  }
  {
    auto os = open("trajectory.jsonl");
    write_trajectory_jsonl(result, os);
  }
  {
    auto os = open("config.echo");
    echo_config(config, os);
  }
  if (result.replicate0_graph) {
    auto os = open("graph.txt");
    save_graph(*result.replicate0_graph, os);
  }
}

struct SweepRow {
  int k = 0;
  double mean_mse = 0.0;  // mean over steps, then over replicates
  double std_mse = 0.0;   // across replicates of the per-replicate step mean
};

/// Average reconstruction error of the dynamic method for each sensor count;
/// all counts share the master seed, so rows are paired by replicate.
inline std::vector<SweepRow> sweep_sensor_counts(const ExperimentConfig& base) {
  std::vector<SweepRow> rows;
  for (int k : base.sweep_k) {
    ExperimentConfig config = base;
    config.sensor_count = k;
    config.methods = {Method::dynamic};
    const ExperimentResult result = run_experiment(config);
    const auto& records = result.by_method[0];
    std::vector<double> replicate_means;
    replicate_means.reserve(records.size());
    for (const auto& record : records) {
      const double total = std::accumulate(record.mse.begin(), record.mse.end(), 0.0);
      replicate_means.push_back(total / record.mse.size());
    }
    SweepRow row;
    row.k = k;
    const double sum = std::accumulate(replicate_means.begin(), replicate_means.end(), 0.0);
    row.mean_mse = sum / replicate_means.size();
    double ss = 0.0;
    for (double v : replicate_means) ss += (v - row.mean_mse) * (v - row.mean_mse);
    row.std_mse = replicate_means.size() > 1 ? std::sqrt(ss / (replicate_means.size() - 1)) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "k,mean_mse,std_mse\n";
  for (const auto& row : rows)
    os << row.k << "," << detail::format_double(row.mean_mse) << ","
       << detail::format_double(row.std_mse) << "\n";
}

/// Random instances comparing one distributed relocation round against the
/// centralized greedy, each on a fresh random graph, random dictionary and
/// random initial fleet. config.replicates sets the instance count.
inline std::vector<GapReport> run_gap_instances(const ExperimentConfig& config) {
  config.validate();
  std::vector<GapReport> reports;
  reports.reserve(config.replicates);
  for (int i = 0; i < config.replicates; ++i) {
    const std::uint64_t rep_seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    Rng graph_rng(derive_seed(rep_seed, seed_stream::graph));
    const Graph graph = random_sensor_graph(config.graph_nodes, graph_rng, config.graph_knn);
    Rng model_rng(derive_seed(rep_seed, seed_stream::model));
    const Eigen::MatrixXd dictionary =
        gaussian_matrix(graph.n_nodes(), config.window, 1.0, model_rng);
    const Spectrum spec = spectrum(graph);
    const Eigen::MatrixXd sensing = make_sensing_matrix(config, graph, spec);
    const Eigen::MatrixXd signatures = selection_matrix(dictionary, &sensing);
    std::vector<int> nodes(graph.n_nodes());
    std::iota(nodes.begin(), nodes.end(), 0);
    std::vector<int> positions;
    std::sample(nodes.begin(), nodes.end(), std::back_inserter(positions), config.sensor_count,
                model_rng);
    reports.push_back(gap_check(graph, signatures, positions, config.hop_limit));
  }
  return reports;
}

inline void write_gap_csv(const std::vector<GapReport>& reports, std::ostream& os) {
  os << "instance,centralized_total,distributed_total,lower_bound,upper_holds,lower_holds\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& report = reports[i];
    const double lower = report.centralized_total /
                         std::max<std::size_t>(report.centralized_gains.size(), 1);
    os << i << "," << detail::format_double(report.centralized_total) << ","
       << detail::format_double(report.distributed_total) << "," << detail::format_double(lower)
       << "," << (report.upper_holds ? "true" : "false") << ","
       << (report.lower_holds ? "true" : "false") << "\n";
  }
}

}  // namespace dynsen
