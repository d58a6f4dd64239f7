#ifndef HAMLET_PIPELINE_HPP
#define HAMLET_PIPELINE_HPP

#include <optional>

#include "core/product_state.hpp"
#include "core/sdp.hpp"

namespace hamlet {

enum class PipelineMode { theory, practical };

struct PipelineConfig {
  PipelineMode mode = PipelineMode::practical;
  Direction direction = Direction::maximize;
  // Theory mode: everything is derived from eps.
  double eps = 0.5;
  // Practical mode: explicit knobs.
  std::optional<int> sample_size;  // |S|, draws with replacement
  std::optional<double> g;         // alternative: |S| = ceil(g log2 n)
  double delta = 0.5;
  double eps_prime = 0.5;
  double eps_sdp = 1e-6;
  std::optional<double> cutoff_fraction;  // defaults to eps_prime / 10

  std::uint64_t seed = 0;
  std::uint64_t iteration_cap = 200;
  int jobs = 1;
};

struct IterationRecord {
  std::uint64_t iter_id = 0;
  std::vector<std::uint64_t> net_indices;  // one per distinct sampled site
  SdpStatus sdp_status = SdpStatus::max_iter;
  double opt2 = 0.0;
  double p1_value = 0.0;
  double wall_ms = 0.0;
};

struct RunReport {
  std::uint64_t seed = 0;
  PipelineMode mode = PipelineMode::practical;
  Direction direction = Direction::maximize;
  SamplerParams sampler;
  double eps_prime = 0.0;
  double eps_sdp = 0.0;
  std::vector<int> sample_sites;
  std::uint64_t net_size = 0;
  double iteration_space_log10 = 0.0;
  bool partial = false;  // the iteration cap truncated the net-assignment space
  std::vector<IterationRecord> iterations;

  int best_iteration = -1;
  double best_value = 0.0;  // degree-k value of the best pre-rounding assignment
  ProductAssignment best_assignment;
  double rounded_value = 0.0;
  ProductAssignment rounded_assignment;
  double wall_ms = 0.0;
};

/// The exhaustive-sampling -> linearize -> SDP -> round pipeline.
RunReport approximate(const LocalHamiltonianInstance& inst, const PipelineConfig& config);

/// Exact extreme eigenpair of the fully embedded Hamiltonian. Diagonal
/// instances avoid the dense eigensolve.
struct ExtremeEig {
  double value = 0.0;
  Vec eigenvector;
};
ExtremeEig oracle_extreme_eig(const LocalHamiltonianInstance& inst, bool maximize,
                              std::uint64_t dim_cap = 1ull << 12);

/// Alternating per-site eigenvector optimization with seeded restarts; for
/// n <= 3 qubit instances additionally cross-checked against a Bloch-sphere
/// product grid (the last site optimized in closed form per grid point).
struct ProductOracleResult {
  ProductAssignment assignment;
  double value = 0.0;
};
ProductOracleResult oracle_product(const LocalHamiltonianInstance& inst,
                                   Direction direction = Direction::maximize, int restarts = 20,
                                   std::uint64_t seed = 0, int grid_theta = 120,
                                   int grid_phi = 240);

struct CompareReport {
  RunReport run;
  double lambda_extreme = 0.0;
  double oracle_product_value = 0.0;
  double rsd_witness_value = 0.0;  // best RSD branch of the extreme eigenvector
  double ratio_vs_product = 0.0;   // pipeline rounded value / oracle product value
  double ratio_vs_lambda = 0.0;
  bool product_ratio_ok = false;   // oracle product >= lambda / d^{k-1} - tol
};

CompareReport compare(const LocalHamiltonianInstance& inst, const PipelineConfig& config,
                      std::uint64_t oracle_cap = 1ull << 12);

// JSON / CSV serialization of reports and configs.
std::string report_to_json(const RunReport& report);
std::string report_to_csv(const RunReport& report);
std::string compare_to_json(const CompareReport& report);
PipelineConfig parse_config(const std::string& json_text);

}  // namespace hamlet

#endif
