#include "hamlet/hamlet.h"

#include <json.hpp>

#include <cstring>
#include <string>

#include "core/clock.hpp"
#include "core/degree_tensor.hpp"
#include "core/instance.hpp"
#include "core/pipeline.hpp"

using namespace hamlet;

struct hamlet_instance {
  LocalHamiltonianInstance inst;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
hamlet_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HAMLET_OK;
  } catch (const CapacityError& e) {
    g_last_error = e.what();
    return HAMLET_ERR_CAPACITY;
  } catch (const ParseError& e) {
    g_last_error = e.what();
    return HAMLET_ERR_PARSE;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return HAMLET_ERR_INVALID;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HAMLET_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HAMLET_ERR_INTERNAL;
  }
}

hamlet_status require(bool ok, const char* message) {
  if (ok) return HAMLET_OK;
  g_last_error = message;
  return HAMLET_ERR_INVALID;
}

}  // namespace

extern "C" {

const char* hamlet_last_error(void) { return g_last_error.c_str(); }

void hamlet_string_free(char* s) { std::free(s); }

void hamlet_instance_free(hamlet_instance* inst) { delete inst; }

hamlet_status hamlet_set_max_dim(uint64_t cap) {
  return guarded([&] { set_max_total_dim(cap); });
}

hamlet_status hamlet_instance_parse(const char* json, hamlet_instance** out) {
  if (auto s = require(json && out, "hamlet_instance_parse: null argument")) return s;
  return guarded([&] { *out = new hamlet_instance{parse_instance(json)}; });
}

hamlet_status hamlet_instance_to_json(const hamlet_instance* inst, char** out_json) {
  if (auto s = require(inst && out_json, "hamlet_instance_to_json: null argument")) return s;
  return guarded([&] { *out_json = dup_string(serialize(inst->inst)); });
}

hamlet_status hamlet_instance_shape(const hamlet_instance* inst, int* n, int* d, int* k,
                                    int* term_count) {
  if (auto s = require(inst != nullptr, "hamlet_instance_shape: null instance")) return s;
  if (n) *n = inst->inst.n;
  if (d) *d = inst->inst.d;
  if (k) *k = inst->inst.k;
  if (term_count) *term_count = static_cast<int>(inst->inst.terms.size());
  return HAMLET_OK;
}

hamlet_status hamlet_instance_density(const hamlet_instance* inst, double* density) {
  if (auto s = require(inst && density, "hamlet_instance_density: null argument")) return s;
  return guarded([&] { *density = density_value(inst->inst); });
}

hamlet_status hamlet_instance_validate(const hamlet_instance* inst, char** diagnostics_json) {
  if (auto s = require(inst && diagnostics_json, "hamlet_instance_validate: null argument"))
    return s;
  return guarded([&] {
    Diagnostics diag = validate(inst->inst);
    nlohmann::json j;
    j["ok"] = diag.ok;
    j["issues"] = diag.issues;
    *diagnostics_json = dup_string(j.dump(2));
  });
}

hamlet_status hamlet_gen_random(int n, int d, int k, uint64_t seed, hamlet_instance** out) {
  if (auto s = require(out != nullptr, "hamlet_gen_random: null output")) return s;
  return guarded([&] { *out = new hamlet_instance{gen_random_dense(n, d, k, seed)}; });
}

hamlet_status hamlet_gen_csp_dimacs(const char* dimacs_text, hamlet_instance** out) {
  if (auto s = require(dimacs_text && out, "hamlet_gen_csp_dimacs: null argument")) return s;
  return guarded([&] { *out = new hamlet_instance{embed_dimacs(parse_dimacs(dimacs_text))}; });
}

hamlet_status hamlet_instance_complement(const hamlet_instance* inst, hamlet_instance** out) {
  if (auto s = require(inst && out, "hamlet_instance_complement: null argument")) return s;
  return guarded([&] { *out = new hamlet_instance{complement_instance(inst->inst)}; });
}

hamlet_status hamlet_densify(const hamlet_instance* inst, int extra_sites, hamlet_instance** out) {
  if (auto s = require(inst && out, "hamlet_densify: null argument")) return s;
  return guarded([&] { *out = new hamlet_instance{densify(inst->inst, extra_sites)}; });
}

hamlet_status hamlet_gen_clock(const char* circuit_json, hamlet_instance** out, char** info_json) {
  if (auto s = require(circuit_json && out, "hamlet_gen_clock: null argument")) return s;
  return guarded([&] {
    VerifierCircuit circuit = parse_circuit(circuit_json);
    EmittedInstance emitted = clock_to_instance(circuit);
    *out = new hamlet_instance{std::move(emitted.instance)};
    if (info_json) {
      nlohmann::json j;
      j["scales"] = emitted.scales;
      j["locality"] = (*out)->inst.k;
      j["qubits"] = (*out)->inst.n;
      *info_json = dup_string(j.dump(2));
    }
  });
}

hamlet_status hamlet_solve(const hamlet_instance* inst, const char* config_json,
                           char** report_json, char** csv_out, int* partial) {
  if (auto s = require(inst && config_json && report_json, "hamlet_solve: null argument"))
    return s;
  return guarded([&] {
    PipelineConfig config = parse_config(config_json);
    RunReport report = approximate(inst->inst, config);
    *report_json = dup_string(report_to_json(report));
    if (csv_out) *csv_out = dup_string(report_to_csv(report));
    if (partial) *partial = report.partial ? 1 : 0;
  });
}

hamlet_status hamlet_theory_plan(const hamlet_instance* inst, double eps, char** plan_json) {
  if (auto s = require(inst && plan_json, "hamlet_theory_plan: null argument")) return s;
  return guarded([&] {
    ParamPlan plan = compute_params(eps, inst->inst.n, inst->inst.d, inst->inst.k);
    nlohmann::json j;
    j["eps"] = plan.eps;
    j["eps_sdp"] = plan.eps_sdp;
    j["eps_prime"] = plan.eps_prime;
    j["f"] = plan.f;
    j["g"] = plan.g;
    j["delta"] = plan.delta;
    j["ladder"] = plan.ladder;
    j["sample_size"] = plan.sample_size;
    j["net_points"] = plan.net_points;
    j["iteration_log10"] = plan.iteration_log10;
    *plan_json = dup_string(j.dump(2));
  });
}

hamlet_status hamlet_oracle_extreme(const hamlet_instance* inst, int maximize, uint64_t dim_cap,
                                    double* value) {
  if (auto s = require(inst && value, "hamlet_oracle_extreme: null argument")) return s;
  return guarded([&] {
    ExtremeEig e = oracle_extreme_eig(inst->inst, maximize != 0, dim_cap ? dim_cap : 1ull << 12);
    *value = e.value;
  });
}

hamlet_status hamlet_oracle_product(const hamlet_instance* inst, int maximize, int restarts,
                                    uint64_t seed, double* value, char** assignment_json) {
  if (auto s = require(inst && value, "hamlet_oracle_product: null argument")) return s;
  return guarded([&] {
    ProductOracleResult r =
        oracle_product(inst->inst, maximize ? Direction::maximize : Direction::minimize,
                       restarts > 0 ? restarts : 20, seed);
    *value = r.value;
    if (assignment_json) {
      nlohmann::json blocks = nlohmann::json::array();
      for (const auto& b : r.assignment.blocks) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index rr = 0; rr < b.op.m.rows(); ++rr) {
          nlohmann::json row = nlohmann::json::array();
          for (Eigen::Index cc = 0; cc < b.op.m.cols(); ++cc)
            row.push_back({b.op.m(rr, cc).real(), b.op.m(rr, cc).imag()});
          rows.push_back(std::move(row));
        }
        blocks.push_back(std::move(rows));
      }
      nlohmann::json j;
      j["blocks"] = std::move(blocks);
      *assignment_json = dup_string(j.dump(2));
    }
  });
}

hamlet_status hamlet_compare(const hamlet_instance* inst, const char* config_json,
                             uint64_t oracle_cap, char** report_json) {
  if (auto s = require(inst && config_json && report_json, "hamlet_compare: null argument"))
    return s;
  return guarded([&] {
    PipelineConfig config = parse_config(config_json);
    CompareReport rep = compare(inst->inst, config, oracle_cap ? oracle_cap : 1ull << 12);
    *report_json = dup_string(compare_to_json(rep));
  });
}

hamlet_status hamlet_kitaev_check(const char* circuit_json, char** report_json) {
  if (auto s = require(circuit_json && report_json, "hamlet_kitaev_check: null argument"))
    return s;
  return guarded([&] {
    VerifierCircuit circuit = parse_circuit(circuit_json);
    KitaevReport rep = check_kitaev_bounds(circuit);
    nlohmann::json j;
    j["acceptance"] = rep.acceptance;
    j["eps"] = rep.eps;
    j["length"] = rep.length;
    j["lambda_min"] = rep.lambda_min;
    j["yes_threshold"] = rep.yes_threshold;
    j["witness_energy"] = rep.witness_energy;
    j["yes_ok"] = rep.yes_ok;
    j["witness_ok"] = rep.witness_ok;
    *report_json = dup_string(j.dump(2));
  });
}

}  // extern "C"
