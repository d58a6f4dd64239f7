// hamlet command-line interface. Talks to the shared library exclusively
// through the public C API in hamlet/hamlet.h.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "hamlet/hamlet.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;
constexpr int kExitCapacity = 3;

struct CString {
  char* ptr = nullptr;
  ~CString() { hamlet_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct Instance {
  hamlet_instance* ptr = nullptr;
  ~Instance() { hamlet_instance_free(ptr); }
};

int fail(hamlet_status status, const std::string& context) {
  std::cerr << "hamlet: " << context << ": " << hamlet_last_error() << "\n";
  return status == HAMLET_ERR_CAPACITY ? kExitCapacity : kExitUsage;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << "\n";
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return out.good();
}

int load_instance(const std::string& path, Instance& inst) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "hamlet: cannot read instance file: " << path << "\n";
    return kExitUsage;
  }
  if (auto s = hamlet_instance_parse(text->c_str(), &inst.ptr))
    return fail(s, "parsing " + path);
  return kExitOk;
}

std::string build_config_json(const std::string& mode, const std::string& direction, double eps,
                              std::optional<int> sample_size, std::optional<double> g,
                              double delta, double eps_prime, double eps_sdp,
                              std::optional<double> cutoff, std::uint64_t seed,
                              std::uint64_t iteration_cap, int jobs) {
  nlohmann::json j;
  j["mode"] = mode;
  j["direction"] = direction;
  j["eps"] = eps;
  if (sample_size) j["sample_size"] = *sample_size;
  if (g) j["g"] = *g;
  j["delta"] = delta;
  j["eps_prime"] = eps_prime;
  j["eps_sdp"] = eps_sdp;
  if (cutoff) j["cutoff_fraction"] = *cutoff;
  j["seed"] = seed;
  j["iteration_cap"] = iteration_cap;
  j["jobs"] = jobs;
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hamlet: product-state approximation toolkit for MAX-k-local Hamiltonians"};
  app.require_subcommand(1);

  if (const char* cap = std::getenv("HAMLET_MAX_DIM")) {
    (void)cap;  // the library reads the variable itself; nothing to do here
  }

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  gen->require_subcommand(1);

  std::string out_path = "-";
  int gn = 6, gd = 2, gk = 2;
  std::uint64_t gseed = 0;
  auto* gen_random = gen->add_subcommand("random", "random dense instance");
  gen_random->add_option("--n", gn, "number of sites")->required();
  gen_random->add_option("--d", gd, "local dimension");
  gen_random->add_option("--k", gk, "locality");
  gen_random->add_option("--seed", gseed, "random seed");
  gen_random->add_option("-o,--output", out_path, "output path ('-' for stdout)");

  std::string dimacs_path;
  bool csp_complement = false;
  auto* gen_csp = gen->add_subcommand("csp", "embed a DIMACS CNF formula");
  gen_csp->add_option("--dimacs", dimacs_path, "DIMACS CNF file")->required();
  gen_csp->add_flag("--complement", csp_complement,
                    "emit the maximization form (per-term I - H)");
  gen_csp->add_option("-o,--output", out_path, "output path");

  std::string densify_input;
  int densify_extra = 0;
  auto* gen_densify = gen->add_subcommand("densify", "append |0..0><0..0| padding sites");
  gen_densify->add_option("--input", densify_input, "source instance JSON")->required();
  gen_densify->add_option("--extra", densify_extra, "number of fresh sites")->required();
  gen_densify->add_option("-o,--output", out_path, "output path");

  std::string circuit_path;
  auto* gen_clock = gen->add_subcommand("clock", "circuit-to-Hamiltonian instance");
  gen_clock->add_option("--circuit", circuit_path, "circuit JSON file")->required();
  gen_clock->add_option("-o,--output", out_path, "output path");

  // --- validate ------------------------------------------------------------
  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "structural and spectral diagnostics");
  validate_cmd->add_option("instance", validate_path, "instance JSON file")->required();

  // --- solve ----------------------------------------------------------------
  std::string solve_path, solve_out = "-", solve_csv;
  std::string mode = "practical", direction = "maximize";
  double eps = 0.5, delta = 0.5, eps_prime = 0.5, eps_sdp = 1e-6;
  std::optional<int> sample_size;
  std::optional<double> gee, cutoff;
  std::uint64_t seed = 0, iteration_cap = 200;
  int jobs = 1;
  bool dry_run = false;
  auto* solve_cmd = app.add_subcommand("solve", "run the approximation pipeline");
  solve_cmd->add_option("instance", solve_path, "instance JSON file")->required();
  solve_cmd->add_option("--mode", mode, "practical | theory")
      ->check(CLI::IsMember({"practical", "theory"}));
  solve_cmd->add_option("--direction", direction, "maximize | minimize")
      ->check(CLI::IsMember({"maximize", "minimize"}));
  solve_cmd->add_option("--eps", eps, "theory-mode additive error scale");
  solve_cmd->add_option("--sample-size", [&sample_size](const std::vector<std::string>& v) {
    sample_size = std::stoi(v[0]);
    return true;
  }, "number of sampled sites |S|");
  solve_cmd->add_option("--g", [&gee](const std::vector<std::string>& v) {
    gee = std::stod(v[0]);
    return true;
  }, "sampling constant g (|S| = ceil(g log2 n))");
  solve_cmd->add_option("--delta", delta, "net radius");
  solve_cmd->add_option("--eps-prime", eps_prime, "linearization error parameter");
  solve_cmd->add_option("--eps-sdp", eps_sdp, "SDP additive tolerance");
  solve_cmd->add_option("--cutoff-fraction", [&cutoff](const std::vector<std::string>& v) {
    cutoff = std::stod(v[0]);
    return true;
  }, "sparse-neighbourhood cutoff fraction (default eps'/10)");
  solve_cmd->add_option("--seed", seed, "random seed");
  solve_cmd->add_option("--iteration-cap", iteration_cap, "max net assignments to visit");
  solve_cmd->add_option("--jobs", jobs, "worker threads");
  solve_cmd->add_flag("--dry-run", dry_run, "theory mode: print derived parameters and exit");
  solve_cmd->add_option("-o,--output", solve_out, "report output path");
  solve_cmd->add_option("--csv", solve_csv, "per-iteration CSV output path");

  // --- oracle ----------------------------------------------------------------
  std::string oracle_path, oracle_out = "-", which = "max";
  int restarts = 20;
  std::uint64_t oracle_seed = 0, oracle_cap = 1ull << 12;
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force ground truth");
  oracle_cmd->add_option("instance", oracle_path, "instance JSON file")->required();
  oracle_cmd->add_option("--which", which, "max | min")->check(CLI::IsMember({"max", "min"}));
  oracle_cmd->add_option("--restarts", restarts, "product-oracle restarts");
  oracle_cmd->add_option("--seed", oracle_seed, "product-oracle seed");
  oracle_cmd->add_option("--oracle-cap", oracle_cap, "dense eigensolve dimension cap");
  oracle_cmd->add_option("-o,--output", oracle_out, "output path");

  // --- compare ----------------------------------------------------------------
  std::string compare_path, compare_out = "-";
  auto* compare_cmd = app.add_subcommand("compare", "pipeline vs oracles");
  compare_cmd->add_option("instance", compare_path, "instance JSON file")->required();
  compare_cmd->add_option("--direction", direction, "maximize | minimize")
      ->check(CLI::IsMember({"maximize", "minimize"}));
  compare_cmd->add_option("--sample-size", [&sample_size](const std::vector<std::string>& v) {
    sample_size = std::stoi(v[0]);
    return true;
  }, "number of sampled sites |S|");
  compare_cmd->add_option("--delta", delta, "net radius");
  compare_cmd->add_option("--eps-prime", eps_prime, "linearization error parameter");
  compare_cmd->add_option("--eps-sdp", eps_sdp, "SDP additive tolerance");
  compare_cmd->add_option("--seed", seed, "random seed");
  compare_cmd->add_option("--iteration-cap", iteration_cap, "max net assignments");
  compare_cmd->add_option("--jobs", jobs, "worker threads");
  compare_cmd->add_option("--oracle-cap", oracle_cap, "dense eigensolve dimension cap");
  compare_cmd->add_option("-o,--output", compare_out, "output path");

  // --- kitaev ----------------------------------------------------------------
  std::string kitaev_circuit, kitaev_out = "-";
  auto* kitaev_cmd = app.add_subcommand("kitaev", "spectral checks of a clock Hamiltonian");
  kitaev_cmd->add_option("--circuit", kitaev_circuit, "circuit JSON file")->required();
  kitaev_cmd->add_option("-o,--output", kitaev_out, "output path");

  CLI11_PARSE(app, argc, argv);

  // ---------------------------------------------------------------------------

  if (gen_random->parsed() || gen_csp->parsed() || gen_densify->parsed() || gen_clock->parsed()) {
    Instance inst;
    if (gen_random->parsed()) {
      if (auto s = hamlet_gen_random(gn, gd, gk, gseed, &inst.ptr))
        return fail(s, "gen random");
    } else if (gen_csp->parsed()) {
      auto text = read_file(dimacs_path);
      if (!text) {
        std::cerr << "hamlet: cannot read DIMACS file: " << dimacs_path << "\n";
        return kExitUsage;
      }
      if (auto s = hamlet_gen_csp_dimacs(text->c_str(), &inst.ptr)) return fail(s, "gen csp");
      if (csp_complement) {
        Instance flipped;
        if (auto s = hamlet_instance_complement(inst.ptr, &flipped.ptr))
          return fail(s, "gen csp --complement");
        std::swap(inst.ptr, flipped.ptr);
      }
    } else if (gen_densify->parsed()) {
      Instance source;
      if (int rc = load_instance(densify_input, source)) return rc;
      if (auto s = hamlet_densify(source.ptr, densify_extra, &inst.ptr))
        return fail(s, "gen densify");
    } else {
      auto text = read_file(circuit_path);
      if (!text) {
        std::cerr << "hamlet: cannot read circuit file: " << circuit_path << "\n";
        return kExitUsage;
      }
      CString info;
      if (auto s = hamlet_gen_clock(text->c_str(), &inst.ptr, &info.ptr))
        return fail(s, "gen clock");
      std::cerr << "clock instance info: " << info.str() << "\n";
    }
    CString json;
    if (auto s = hamlet_instance_to_json(inst.ptr, &json.ptr)) return fail(s, "serializing");
    if (!write_file(out_path, json.str())) {
      std::cerr << "hamlet: cannot write " << out_path << "\n";
      return kExitUsage;
    }
    return kExitOk;
  }

  if (validate_cmd->parsed()) {
    Instance inst;
    if (int rc = load_instance(validate_path, inst)) return rc;
    CString diag;
    if (auto s = hamlet_instance_validate(inst.ptr, &diag.ptr)) return fail(s, "validate");
    std::cout << diag.str() << "\n";
    auto parsed = nlohmann::json::parse(diag.str());
    return parsed["ok"].get<bool>() ? kExitOk : kExitUsage;
  }

  if (solve_cmd->parsed()) {
    Instance inst;
    if (int rc = load_instance(solve_path, inst)) return rc;
    if (dry_run) {
      if (mode != "theory") {
        std::cerr << "hamlet: --dry-run is a theory-mode feature\n";
        return kExitUsage;
      }
      CString plan;
      if (auto s = hamlet_theory_plan(inst.ptr, eps, &plan.ptr)) return fail(s, "theory plan");
      std::cout << plan.str() << "\n";
      return kExitOk;
    }
    std::string config = build_config_json(mode, direction, eps, sample_size, gee, delta,
                                           eps_prime, eps_sdp, cutoff, seed, iteration_cap, jobs);
    CString report, csv;
    int partial = 0;
    if (auto s = hamlet_solve(inst.ptr, config.c_str(), &report.ptr,
                              solve_csv.empty() ? nullptr : &csv.ptr, &partial))
      return fail(s, "solve");
    if (!write_file(solve_out, report.str())) {
      std::cerr << "hamlet: cannot write " << solve_out << "\n";
      return kExitUsage;
    }
    if (!solve_csv.empty() && !write_file(solve_csv, csv.str())) {
      std::cerr << "hamlet: cannot write " << solve_csv << "\n";
      return kExitUsage;
    }
    return partial ? kExitPartial : kExitOk;
  }

  if (oracle_cmd->parsed()) {
    Instance inst;
    if (int rc = load_instance(oracle_path, inst)) return rc;
    double extreme = 0.0, product = 0.0;
    int maximize = which == "max" ? 1 : 0;
    if (auto s = hamlet_oracle_extreme(inst.ptr, maximize, oracle_cap, &extreme))
      return fail(s, "oracle extreme");
    CString assignment;
    if (auto s = hamlet_oracle_product(inst.ptr, maximize, restarts, oracle_seed, &product,
                                       &assignment.ptr))
      return fail(s, "oracle product");
    nlohmann::json j;
    j["schema_version"] = 1;
    j["which"] = which;
    j["lambda"] = extreme;
    j["product_value"] = product;
    j["product_assignment"] = nlohmann::json::parse(assignment.str());
    if (!write_file(oracle_out, j.dump(2))) {
      std::cerr << "hamlet: cannot write " << oracle_out << "\n";
      return kExitUsage;
    }
    return kExitOk;
  }

  if (compare_cmd->parsed()) {
    Instance inst;
    if (int rc = load_instance(compare_path, inst)) return rc;
    std::string config = build_config_json("practical", direction, eps, sample_size, gee, delta,
                                           eps_prime, eps_sdp, cutoff, seed, iteration_cap, jobs);
    CString report;
    if (auto s = hamlet_compare(inst.ptr, config.c_str(), oracle_cap, &report.ptr))
      return fail(s, "compare");
    if (!write_file(compare_out, report.str())) {
      std::cerr << "hamlet: cannot write " << compare_out << "\n";
      return kExitUsage;
    }
    return kExitOk;
  }

  if (kitaev_cmd->parsed()) {
    auto text = read_file(kitaev_circuit);
    if (!text) {
      std::cerr << "hamlet: cannot read circuit file: " << kitaev_circuit << "\n";
      return kExitUsage;
    }
    CString report;
    if (auto s = hamlet_kitaev_check(text->c_str(), &report.ptr)) return fail(s, "kitaev");
    if (!write_file(kitaev_out, report.str())) {
      std::cerr << "hamlet: cannot write " << kitaev_out << "\n";
      return kExitUsage;
    }
    return kExitOk;
  }

  std::cerr << app.help();
  return kExitUsage;
}
