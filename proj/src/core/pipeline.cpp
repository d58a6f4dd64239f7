#include "core/pipeline.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "core/rng.hpp"

namespace hamlet {

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double line3_f(int n, int d, int k) {
  return k + std::log(2.0 * std::pow(static_cast<double>(d), 2.0 * k)) /
                 std::log(static_cast<double>(std::max(2, n))) +
         1e-9;
}

bool better(Direction dir, double a, double b) {
  return dir == Direction::maximize ? a > b : a < b;
}

}  // namespace

RunReport approximate(const LocalHamiltonianInstance& inst, const PipelineConfig& config) {
  const double t_start = now_ms();
  RunReport report;
  report.seed = config.seed;
  report.mode = config.mode;
  report.direction = config.direction;

  SamplerParams params;
  int sample_count = 0;
  if (config.mode == PipelineMode::theory) {
    ParamPlan plan = compute_params(config.eps, inst.n, inst.d, inst.k);
    params = plan.sampler;
    sample_count = plan.sample_size;
    report.eps_prime = plan.eps_prime;
    report.eps_sdp = plan.eps_sdp;
  } else {
    params.n = inst.n;
    params.d = inst.d;
    params.k = inst.k;
    params.delta = config.delta;
    params.f = line3_f(inst.n, inst.d, inst.k);
    double log2n = inst.n > 1 ? std::log2(static_cast<double>(inst.n)) : 1.0;
    if (config.sample_size) {
      sample_count = *config.sample_size;
      params.g = sample_count / log2n;
    } else if (config.g) {
      params.g = *config.g;
      sample_count = std::max(1, static_cast<int>(std::ceil(params.g * log2n)));
    } else {
      throw std::invalid_argument("approximate: practical mode needs sample_size or g");
    }
    params.cutoff_fraction = config.cutoff_fraction.value_or(config.eps_prime / 10.0);
    report.eps_prime = config.eps_prime;
    report.eps_sdp = config.eps_sdp;
  }
  if (sample_count < 1) throw std::invalid_argument("approximate: empty sample");
  report.sampler = params;

  const bool maximize = config.direction == Direction::maximize;
  CoordinateTensor tensor = CoordinateTensor::decompose(inst);

  Rng master(config.seed);
  SampleSet sample;
  sample.sites.reserve(sample_count);
  for (int i = 0; i < sample_count; ++i)
    sample.sites.push_back(static_cast<int>(master.uniform_index(inst.n)));
  report.sample_sites = sample.sites;

  DeltaNet net = build_delta_net(inst.d, params.delta);
  report.net_size = net.size();
  std::vector<int> distinct = sample.distinct_sites();

  // The locality-1 objective is linear from the start: no estimates, no net.
  const bool needs_net = inst.k > 1;
  std::uint64_t space = 1;
  if (needs_net) {
    double log10 = std::log10(static_cast<double>(net.size()));
    report.iteration_space_log10 = log10 * static_cast<double>(distinct.size());
    space = 1;
    for (size_t i = 0; i < distinct.size(); ++i) {
      if (space > UINT64_MAX / net.size()) {
        space = UINT64_MAX;
        break;
      }
      space *= net.size();
    }
  }
  std::uint64_t count = std::min<std::uint64_t>(space, std::max<std::uint64_t>(1, config.iteration_cap));
  report.partial = space > count;

  // Pre-generate the net assignment of every iteration so that worker
  // scheduling cannot affect the result.
  std::vector<std::vector<std::uint64_t>> assignments(count);
  for (std::uint64_t it = 0; it < count; ++it) {
    std::vector<std::uint64_t> idx(distinct.size(), 0);
    if (needs_net) {
      if (!report.partial) {
        std::uint64_t rem = it;
        for (size_t s = 0; s < distinct.size(); ++s) {
          idx[s] = rem % net.size();
          rem /= net.size();
        }
      } else {
        for (size_t s = 0; s < distinct.size(); ++s) idx[s] = master.uniform_index(net.size());
      }
    }
    assignments[it] = std::move(idx);
  }

  report.iterations.resize(count);
  std::atomic<std::uint64_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      std::uint64_t it = cursor.fetch_add(1);
      if (it >= count) return;
      double t0 = now_ms();
      SampleSet local = sample;
      for (size_t s = 0; s < distinct.size(); ++s)
        local.net_blocks[distinct[s]] = net.element(assignments[it][s]);
      SdpModel model = linearize(tensor, local, params, report.eps_prime, maximize);
      SdpSolution sol = solve_sdp(model, report.eps_sdp);
      IterationRecord rec;
      rec.iter_id = it;
      rec.net_indices = assignments[it];
      rec.sdp_status = sol.status;
      rec.opt2 = sol.objective_value;
      rec.p1_value = sol.status == SdpStatus::infeasible
                         ? (maximize ? -kInf : kInf)
                         : evaluate_on_p1(tensor, sol);
      rec.wall_ms = now_ms() - t0;
      report.iterations[it] = std::move(rec);
    }
  };

  int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  int best = -1;
  for (std::uint64_t it = 0; it < count; ++it) {
    const IterationRecord& rec = report.iterations[it];
    if (rec.sdp_status == SdpStatus::infeasible) continue;
    if (best < 0 || better(config.direction, rec.p1_value, report.iterations[best].p1_value))
      best = static_cast<int>(it);
  }
  report.best_iteration = best;

  if (best >= 0) {
    SampleSet local = sample;
    for (size_t s = 0; s < distinct.size(); ++s)
      local.net_blocks[distinct[s]] = net.element(assignments[best][s]);
    SdpModel model = linearize(tensor, local, params, report.eps_prime, maximize);
    SdpSolution sol = solve_sdp(model, report.eps_sdp);
    report.best_assignment = sol.assignment;
    report.best_value = report.iterations[best].p1_value;
  } else {
    report.best_assignment = ProductAssignment::maximally_mixed(inst.n, inst.d);
    report.best_value = product_energy(inst, report.best_assignment);
  }

  report.rounded_assignment =
      round_conditional_expectations(inst, report.best_assignment, config.direction);
  report.rounded_value = product_energy(inst, report.rounded_assignment);
  report.wall_ms = now_ms() - t_start;
  return report;
}

ExtremeEig oracle_extreme_eig(const LocalHamiltonianInstance& inst, bool maximize,
                              std::uint64_t dim_cap) {
  std::uint64_t dim = pow_u64(static_cast<std::uint64_t>(inst.d),
                              static_cast<unsigned>(inst.n));
  if (dim > dim_cap)
    throw CapacityError("oracle_extreme_eig: d^n = " + std::to_string(dim) +
                        " exceeds the oracle cap " + std::to_string(dim_cap));
  ExtremeEig out;
  if (is_diagonal_instance(inst)) {
    RVec diag = assemble_diagonal(inst);
    Eigen::Index idx;
    out.value = maximize ? diag.maxCoeff(&idx) : diag.minCoeff(&idx);
    out.eigenvector = Vec::Zero(diag.size());
    out.eigenvector(idx) = 1.0;
    return out;
  }
  Mat h = assemble_dense(inst);
  auto [vals, vecs] = eig_herm(h);
  Eigen::Index idx = maximize ? vals.size() - 1 : 0;
  out.value = vals(idx);
  out.eigenvector = vecs.col(idx);
  return out;
}

namespace {

double alternating_pass(const LocalHamiltonianInstance& inst, ProductAssignment& assign,
                        bool maximize) {
  for (int site = 0; site < inst.n; ++site) {
    Mat env = site_environment(inst, assign, site);
    Eigen::SelfAdjointEigenSolver<Mat> es(env);
    Eigen::Index pick = maximize ? env.rows() - 1 : 0;
    assign.blocks[site] = DensityOp::pure(es.eigenvectors().col(pick));
  }
  return product_energy(inst, assign);
}

double alternating_optimize(const LocalHamiltonianInstance& inst, ProductAssignment& assign,
                            bool maximize) {
  double value = product_energy(inst, assign);
  for (int pass = 0; pass < 500; ++pass) {
    double next = alternating_pass(inst, assign, maximize);
    if (std::abs(next - value) < 1e-10) return next;
    value = next;
  }
  return value;
}

// Exhaustive Bloch-sphere product grid for qubit instances: grid all sites but
// the last, optimize the last in closed form from its environment.
ProductOracleResult bloch_grid_search(const LocalHamiltonianInstance& inst, bool maximize,
                                      int grid_theta, int grid_phi) {
  std::vector<Vec> grid;
  grid.reserve(static_cast<size_t>(grid_theta) * grid_phi);
  for (int ti = 0; ti < grid_theta; ++ti) {
    double theta = grid_theta > 1 ? M_PI * ti / (grid_theta - 1) : 0.0;
    for (int pi = 0; pi < grid_phi; ++pi) {
      double phi = 2.0 * M_PI * pi / grid_phi;
      Vec v(2);
      v(0) = std::cos(0.5 * theta);
      v(1) = std::polar(std::sin(0.5 * theta), phi);
      grid.push_back(std::move(v));
    }
  }

  const int outer_sites = inst.n - 1;
  std::vector<size_t> pick(outer_sites, 0);
  ProductAssignment assign = ProductAssignment::maximally_mixed(inst.n, inst.d);
  ProductOracleResult best;
  bool first = true;
  while (true) {
    for (int s = 0; s < outer_sites; ++s) assign.blocks[s] = DensityOp::pure(grid[pick[s]]);
    Mat env = site_environment(inst, assign, inst.n - 1);
    Eigen::SelfAdjointEigenSolver<Mat> es(env);
    Eigen::Index sel = maximize ? env.rows() - 1 : 0;
    assign.blocks[inst.n - 1] = DensityOp::pure(es.eigenvectors().col(sel));
    double value = product_energy(inst, assign);
    if (first || (maximize ? value > best.value : value < best.value)) {
      best.value = value;
      best.assignment = assign;
      first = false;
    }
    int s = outer_sites - 1;
    while (s >= 0 && ++pick[s] == grid.size()) {
      pick[s] = 0;
      --s;
    }
    if (s < 0) break;
  }
  return best;
}

}  // namespace

ProductOracleResult oracle_product(const LocalHamiltonianInstance& inst, Direction direction,
                                   int restarts, std::uint64_t seed, int grid_theta,
                                   int grid_phi) {
  const bool maximize = direction == Direction::maximize;
  Rng rng(seed);
  ProductOracleResult best;
  bool first = true;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    ProductAssignment assign(ProductAssignment::maximally_mixed(inst.n, inst.d));
    if (r > 0) {
      std::vector<Vec> vs;
      vs.reserve(inst.n);
      for (int i = 0; i < inst.n; ++i) vs.push_back(rng.random_state(inst.d));
      assign = ProductAssignment::from_pure(vs);
    }
    double value = alternating_optimize(inst, assign, maximize);
    if (first || better(direction, value, best.value)) {
      best.value = value;
      best.assignment = std::move(assign);
      first = false;
    }
  }
  if (inst.d == 2 && inst.n <= 3 && grid_theta > 1 && grid_phi > 0) {
    ProductOracleResult gridded = bloch_grid_search(inst, maximize, grid_theta, grid_phi);
    if (better(direction, gridded.value, best.value)) best = std::move(gridded);
  }
  // The grid winner often sits a hair off a local optimum; polish it.
  double polished = alternating_optimize(inst, best.assignment, maximize);
  if (better(direction, polished, best.value)) best.value = polished;
  return best;
}

CompareReport compare(const LocalHamiltonianInstance& inst, const PipelineConfig& config,
                      std::uint64_t oracle_cap) {
  CompareReport rep;
  rep.run = approximate(inst, config);
  const bool maximize = config.direction == Direction::maximize;
  ExtremeEig ext = oracle_extreme_eig(inst, maximize, oracle_cap);
  rep.lambda_extreme = ext.value;
  ProductOracleResult prod = oracle_product(inst, config.direction, 20, config.seed);
  rep.oracle_product_value = prod.value;

  PureState psi = PureState::make(std::vector<int>(inst.n, inst.d), ext.eigenvector);
  BranchResult branch = best_rsd_branch(inst, psi, maximize);
  rep.rsd_witness_value = branch.value;

  double ratio_denom = std::pow(static_cast<double>(inst.d), inst.k - 1);
  rep.product_ratio_ok =
      maximize ? prod.value >= ext.value / ratio_denom - 1e-6
               : prod.value <= ext.value * ratio_denom + 1e-6;
  rep.ratio_vs_product = prod.value != 0.0 ? rep.run.rounded_value / prod.value : 0.0;
  rep.ratio_vs_lambda = ext.value != 0.0 ? rep.run.rounded_value / ext.value : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::json matrix_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json assignment_json(const ProductAssignment& a) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : a.blocks) blocks.push_back(matrix_json(b.op.m));
  return nlohmann::json{{"blocks", std::move(blocks)}};
}

const char* status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    default: return "max_iter";
  }
}

}  // namespace

std::string report_to_json(const RunReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["seed"] = report.seed;
  j["mode"] = report.mode == PipelineMode::theory ? "theory" : "practical";
  j["direction"] = report.direction == Direction::maximize ? "maximize" : "minimize";
  j["params"] = {{"f", report.sampler.f},       {"g", report.sampler.g},
                 {"delta", report.sampler.delta}, {"eps_prime", report.eps_prime},
                 {"eps_sdp", report.eps_sdp},   {"cutoff_fraction", report.sampler.cutoff_fraction}};
  j["sample_sites"] = report.sample_sites;
  j["net_size"] = report.net_size;
  j["iteration_space_log10"] = report.iteration_space_log10;
  j["partial"] = report.partial;
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& rec : report.iterations) {
    iters.push_back({{"iter_id", rec.iter_id},
                     {"net_indices", rec.net_indices},
                     {"sdp_status", status_name(rec.sdp_status)},
                     {"opt2", rec.opt2},
                     {"p1_value", rec.p1_value},
                     {"wall_ms", rec.wall_ms}});
  }
  j["iterations"] = std::move(iters);
  j["best_iteration"] = report.best_iteration;
  j["best_value"] = report.best_value;
  j["best_assignment"] = assignment_json(report.best_assignment);
  j["rounded_value"] = report.rounded_value;
  j["rounded_assignment"] = assignment_json(report.rounded_assignment);
  j["wall_ms"] = report.wall_ms;
  return j.dump(2);
}

std::string report_to_csv(const RunReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "iter_id,sdp_status,opt2,p1_value,wall_ms\n";
  for (const auto& rec : report.iterations)
    os << rec.iter_id << "," << status_name(rec.sdp_status) << "," << rec.opt2 << ","
       << rec.p1_value << "," << rec.wall_ms << "\n";
  return os.str();
}

std::string compare_to_json(const CompareReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["run"] = nlohmann::json::parse(report_to_json(report.run));
  j["lambda_extreme"] = report.lambda_extreme;
  j["oracle_product_value"] = report.oracle_product_value;
  j["rsd_witness_value"] = report.rsd_witness_value;
  j["ratio_vs_product"] = report.ratio_vs_product;
  j["ratio_vs_lambda"] = report.ratio_vs_lambda;
  j["product_ratio_ok"] = report.product_ratio_ok;
  return j.dump(2);
}

PipelineConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
  PipelineConfig c;
  try {
    if (j.contains("mode")) {
      std::string m = j["mode"].get<std::string>();
      if (m == "theory")
        c.mode = PipelineMode::theory;
      else if (m == "practical")
        c.mode = PipelineMode::practical;
      else
        throw ParseError("config JSON: unknown mode \"" + m + "\"");
    }
    if (j.contains("direction")) {
      std::string dir = j["direction"].get<std::string>();
      if (dir == "maximize")
        c.direction = Direction::maximize;
      else if (dir == "minimize")
        c.direction = Direction::minimize;
      else
        throw ParseError("config JSON: unknown direction \"" + dir + "\"");
    }
    if (j.contains("eps")) c.eps = j["eps"].get<double>();
    if (j.contains("sample_size")) c.sample_size = j["sample_size"].get<int>();
    if (j.contains("g")) c.g = j["g"].get<double>();
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("eps_prime")) c.eps_prime = j["eps_prime"].get<double>();
    if (j.contains("eps_sdp")) c.eps_sdp = j["eps_sdp"].get<double>();
    if (j.contains("cutoff_fraction")) c.cutoff_fraction = j["cutoff_fraction"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("iteration_cap")) c.iteration_cap = j["iteration_cap"].get<std::uint64_t>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
  return c;
}

}  // namespace hamlet
