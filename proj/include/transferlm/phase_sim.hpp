#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "transferlm/errors.hpp"
#include "transferlm/gain.hpp"

namespace transferlm {

/// Monte-Carlo phase-diagram configuration: average gain over an
/// (N_S, N_T) lattice with standard-normal designs and observations.
struct PhaseConfig {
  int d = 15;
  Eigen::VectorXd beta_S;
  Eigen::VectorXd beta_T;
  double sigma2_S = 1.0;
  double sigma2_T = 1.0;
  std::vector<long> k_list = {0, 10, 50};
  double alpha_divisor = 5.0;
  std::vector<int> grid_S;
  std::vector<int> grid_T;
  int reps = 20;
  double clip = 0.4;
  std::uint64_t seed = 0;
};

/// Desk-scale defaults: 15 x 14 lattice, 20 replications; finishes in well
/// under a minute.
PhaseConfig desk_scale_config(std::uint64_t seed);

/// The full lattice used in the original study: I_S = {30,...,1000},
/// I_T = {30,...,500}, both step 10, 50 replications.
PhaseConfig paper_scale_config(std::uint64_t seed);

/// Draws a coefficient pair at prescribed Euclidean distance: base
/// coefficients standard normal, offset in a uniformly random direction.
void sample_beta_pair(int d, double distance, std::uint64_t seed,
                      Eigen::VectorXd& beta_S, Eigen::VectorXd& beta_T);

std::uint64_t derive_cell_seed(std::uint64_t seed, int n_source, int n_target, long k);
std::uint64_t derive_rep_seed(std::uint64_t cell_seed, int rep);

/// One Monte-Carlo replication: sample both designs and a fresh observation,
/// rebuild the gain matrix, and return x' H_k x. Singular draws are retried
/// from the same stream; after 10 consecutive failures an Error is thrown.
/// `failures` (optional) accumulates the retry count.
double simulate_replication(int n_source, int n_target, const PhaseConfig& config,
                            long k, std::uint64_t rep_seed, int* failures = nullptr);

struct CellStats {
  double mean_gain = 0.0;
  double clipped_gain = 0.0;
  int failures = 0;
  bool aborted = false;
};

/// Averages `config.reps` replications with per-replication seeds derived
/// from the cell seed.
CellStats simulate_cell(int n_source, int n_target, const PhaseConfig& config, long k,
                        std::uint64_t cell_seed);

/// Mean-gain lattice for one k; values clipped to [-clip, clip] for display,
/// raw means retained.
struct PhaseGrid {
  long k = 0;
  std::vector<int> grid_S;
  std::vector<int> grid_T;
  Eigen::MatrixXd clipped;      // |grid_S| x |grid_T|
  Eigen::MatrixXd raw;
  Eigen::MatrixXi failures;
  Eigen::MatrixXi aborted;
};

/// Runs every (N_S, N_T, k) cell; cells are independent work items evaluated
/// in parallel, with determinism guaranteed by derived seeds rather than
/// scheduling. Failed cells are flagged, never fatal.
std::vector<PhaseGrid> run_phase_grid(const PhaseConfig& config);

/// Long-format export: one `k,N_S,N_T,mean_gain,clipped_gain,failures` row
/// per cell per k.
void write_phase_csv(const std::string& path, const std::vector<PhaseGrid>& grids);

}  // namespace transferlm
