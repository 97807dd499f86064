#include "transferlm/phase_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>

#include "transferlm/rng.hpp"

namespace transferlm {

namespace {

constexpr std::uint64_t kBetaStreamTag = 0x62657461u;  // "beta"

void validate(const PhaseConfig& c) {
  if (c.d < 1) throw DomainError("dimension must be positive");
  if (c.beta_S.size() != c.d || c.beta_T.size() != c.d)
    throw DimensionMismatch("phase config coefficients must have length d");
  if (!(c.sigma2_S > 0.0) || !(c.sigma2_T > 0.0))
    throw DomainError("noise variances must be positive");
  if (c.k_list.empty()) throw DomainError("k list must be nonempty");
  if (c.grid_S.empty() || c.grid_T.empty()) throw DomainError("grids must be nonempty");
  for (int n : c.grid_S)
    if (n <= c.d) throw DomainError("every N_S must exceed d");
  for (int n : c.grid_T)
    if (n <= c.d) throw DomainError("every N_T must exceed d");
  if (c.reps < 1) throw DomainError("replication count must be positive");
  if (!(c.clip > 0.0)) throw DomainError("clip threshold must be positive");
}

std::vector<int> make_range(int lo, int hi, int step) {
  std::vector<int> v;
  for (int x = lo; x <= hi; x += step) v.push_back(x);
  return v;
}

}  // namespace

void sample_beta_pair(int d, double distance, std::uint64_t seed,
                      Eigen::VectorXd& beta_S, Eigen::VectorXd& beta_T) {
  Rng rng(seed);
  beta_S = rng.normal_vector(d);
  Eigen::VectorXd direction = rng.normal_vector(d);
  const double norm = direction.norm();
  if (norm == 0.0) direction.setUnit(0);
  else direction /= norm;
  beta_T = beta_S + distance * direction;
}

PhaseConfig desk_scale_config(std::uint64_t seed) {
  PhaseConfig c;
  c.seed = seed;
  c.grid_S = make_range(20, 300, 20);
  c.grid_T = make_range(20, 150, 10);
  c.reps = 20;
  sample_beta_pair(c.d, 0.25, mix_seed(seed, kBetaStreamTag), c.beta_S, c.beta_T);
  return c;
}

PhaseConfig paper_scale_config(std::uint64_t seed) {
  PhaseConfig c;
  c.seed = seed;
  c.grid_S = make_range(30, 1000, 10);
  c.grid_T = make_range(30, 500, 10);
  c.reps = 50;
  sample_beta_pair(c.d, 0.25, mix_seed(seed, kBetaStreamTag), c.beta_S, c.beta_T);
  return c;
}

std::uint64_t derive_cell_seed(std::uint64_t seed, int n_source, int n_target, long k) {
  std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(n_source));
  s = mix_seed(s, static_cast<std::uint64_t>(n_target));
  return mix_seed(s, static_cast<std::uint64_t>(k));
}

std::uint64_t derive_rep_seed(std::uint64_t cell_seed, int rep) {
  return mix_seed(cell_seed, static_cast<std::uint64_t>(rep));
}

double simulate_replication(int n_source, int n_target, const PhaseConfig& config,
                            long k, std::uint64_t rep_seed, int* failures) {
  Rng rng(rep_seed);
  const int d = config.d;
  const TaskTruth truth{config.beta_S, config.beta_T, config.sigma2_S,
                        config.sigma2_T};

  for (int attempt = 0; attempt < 10; ++attempt) {
    // Draw order is part of the seeding contract: X_S, then X_T, then x.
    const Eigen::MatrixXd x_source = rng.normal_matrix(n_source, d);
    const Eigen::MatrixXd x_target = rng.normal_matrix(n_target, d);
    const Eigen::VectorXd x = rng.normal_vector(d);
    try {
      Eigen::MatrixXd gram_S = Eigen::MatrixXd::Zero(d, d);
      gram_S.selfadjointView<Eigen::Lower>().rankUpdate(x_source.adjoint());
      gram_S = gram_S.selfadjointView<Eigen::Lower>();
      Eigen::MatrixXd gram_T = Eigen::MatrixXd::Zero(d, d);
      gram_T.selfadjointView<Eigen::Lower>().rankUpdate(x_target.adjoint());
      gram_T = gram_T.selfadjointView<Eigen::Lower>();

      const EigenDecomposition eig_S = eigendecompose_spd(gram_S);
      const EigenDecomposition eig_T = eigendecompose_spd(gram_T);

      // Step size re-derived from the sampled target Gram each replication.
      const double alpha =
          2.0 / (eig_T.lambdas(0) + eig_T.lambdas(d - 1)) / config.alpha_divisor;
      const TransferOperator op = make_transfer_operator(eig_T, gram_T, alpha, k);

      const Eigen::MatrixXd gram_S_inv =
          eig_S.P * eig_S.lambdas.cwiseInverse().asDiagonal() * eig_S.P.transpose();
      const Eigen::MatrixXd gram_T_inv =
          eig_T.P * eig_T.lambdas.cwiseInverse().asDiagonal() * eig_T.P.transpose();

      const GainReport report = gain_matrix(truth, gram_S_inv, gram_T_inv, op);
      return gain_at(x, report);
    } catch (const NonSPDGram&) {
      if (failures) ++(*failures);
    }
  }
  throw Error("10 consecutive singular draws in phase cell (N_S=" +
              std::to_string(n_source) + ", N_T=" + std::to_string(n_target) + ")");
}

CellStats simulate_cell(int n_source, int n_target, const PhaseConfig& config, long k,
                        std::uint64_t cell_seed) {
  CellStats stats;
  double sum = 0.0;
  try {
    for (int rep = 0; rep < config.reps; ++rep)
      sum += simulate_replication(n_source, n_target, config, k,
                                  derive_rep_seed(cell_seed, rep), &stats.failures);
    stats.mean_gain = sum / config.reps;
    stats.clipped_gain = std::clamp(stats.mean_gain, -config.clip, config.clip);
  } catch (const Error&) {
    stats.aborted = true;
    stats.mean_gain = std::numeric_limits<double>::quiet_NaN();
    stats.clipped_gain = stats.mean_gain;
  }
  return stats;
}

std::vector<PhaseGrid> run_phase_grid(const PhaseConfig& config) {
  validate(config);
  const std::size_t n_s = config.grid_S.size();
  const std::size_t n_t = config.grid_T.size();

  std::vector<PhaseGrid> grids;
  grids.reserve(config.k_list.size());
  for (long k : config.k_list) {
    PhaseGrid g;
    g.k = k;
    g.grid_S = config.grid_S;
    g.grid_T = config.grid_T;
    g.clipped.setZero(n_s, n_t);
    g.raw.setZero(n_s, n_t);
    g.failures.setZero(n_s, n_t);
    g.aborted.setZero(n_s, n_t);
    grids.push_back(std::move(g));
  }

  struct Cell {
    std::size_t grid_index, i, j;
    int n_source, n_target;
    long k;
  };
  std::vector<Cell> cells;
  cells.reserve(config.k_list.size() * n_s * n_t);
  for (std::size_t gi = 0; gi < config.k_list.size(); ++gi)
    for (std::size_t i = 0; i < n_s; ++i)
      for (std::size_t j = 0; j < n_t; ++j)
        cells.push_back({gi, i, j, config.grid_S[i], config.grid_T[j],
                         config.k_list[gi]});

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const Cell& c = cells[idx];
      const std::uint64_t cell_seed =
          derive_cell_seed(config.seed, c.n_source, c.n_target, c.k);
      const CellStats stats =
          simulate_cell(c.n_source, c.n_target, config, c.k, cell_seed);
      PhaseGrid& g = grids[c.grid_index];
      g.raw(c.i, c.j) = stats.mean_gain;
      g.clipped(c.i, c.j) = stats.clipped_gain;
      g.failures(c.i, c.j) = stats.failures;
      g.aborted(c.i, c.j) = stats.aborted ? 1 : 0;
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(hw, cells.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return grids;
}

void write_phase_csv(const std::string& path, const std::vector<PhaseGrid>& grids) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot open " + path + " for writing");
  std::fputs("k,N_S,N_T,mean_gain,clipped_gain,failures\n", f);
  for (const auto& g : grids) {
    for (std::size_t i = 0; i < g.grid_S.size(); ++i) {
      for (std::size_t j = 0; j < g.grid_T.size(); ++j) {
        std::fprintf(f, "%ld,%d,%d,%.17g,%.17g,%d\n", g.k, g.grid_S[i], g.grid_T[j],
                     g.raw(i, j), g.clipped(i, j), g.failures(i, j));
      }
    }
  }
  std::fclose(f);
}

}  // namespace transferlm
