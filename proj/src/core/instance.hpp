#ifndef HAMLET_INSTANCE_HPP
#define HAMLET_INSTANCE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/operator_core.hpp"

namespace hamlet {

/// One local interaction: a PSD, norm-at-most-1 operator on the listed sites.
struct LocalTerm {
  std::vector<int> support;  // strictly increasing site indices
  Mat matrix;                // dim d^{|support|}
};

/// A MAX-k-local Hamiltonian instance: n sites of local dimension d, locality
/// k, and at most one term per support.
struct LocalHamiltonianInstance {
  int n = 0;
  int d = 2;
  int k = 1;
  std::vector<LocalTerm> terms;

  static LocalHamiltonianInstance make(int n, int d, int k, std::vector<LocalTerm> terms);
  Eigen::Index term_dim(const LocalTerm& t) const;
};

/// Product assignment: one d x d density block per site.
struct ProductAssignment {
  std::vector<DensityOp> blocks;

  static ProductAssignment maximally_mixed(int n, int d);
  static ProductAssignment from_pure(const std::vector<Vec>& site_vectors);
  int sites() const { return static_cast<int>(blocks.size()); }
};

struct Diagnostics {
  bool ok = true;
  std::vector<std::string> issues;
};

/// Structural and spectral diagnostics: PSD / norm bounds per term, duplicate
/// supports, index ranges. Never throws; reports.
Diagnostics validate(const LocalHamiltonianInstance& inst);

/// Sum over terms of Tr(H_T (x)_{i in T} rho_i), contracted per term.
double product_energy(const LocalHamiltonianInstance& inst, const ProductAssignment& assign);

/// <psi|H|psi> for a full-space pure state.
double pure_energy(const LocalHamiltonianInstance& inst, const PureState& psi);

/// Tr(H I/d^n) = sum over terms of Tr(H_T)/d^{|T|}; the denseness measure.
double density_value(const LocalHamiltonianInstance& inst);

/// One random term per k-subset: Haar-random eigenvectors, uniform [0,1]
/// eigenvalues. Deterministic in the seed.
LocalHamiltonianInstance gen_random_dense(int n, int d, int k, std::uint64_t seed);

/// A clause over qudit variables; `satisfied` is the truth table indexed by
/// the base-d encoding of the assignment (first variable most significant).
struct CspClause {
  std::vector<int> vars;
  std::vector<std::uint8_t> satisfied;
};

/// Diagonal penalty embedding: entry 1 on failing assignments, 0 on satisfying
/// ones, so lambda_min(H) equals the minimum number of unsatisfied clauses.
LocalHamiltonianInstance embed_csp(int n, int d, int k, const std::vector<CspClause>& clauses);

/// Per-term complement I - H_T; swaps the minimization and maximization forms.
LocalHamiltonianInstance complement_instance(const LocalHamiltonianInstance& inst);

/// Standard DIMACS CNF: signed 1-based literals, clauses terminated by 0.
struct DimacsFormula {
  int n_vars = 0;
  std::vector<std::vector<int>> clauses;
};
DimacsFormula parse_dimacs(const std::string& text);

/// Penalty embedding of a CNF formula; locality = largest clause arity.
LocalHamiltonianInstance embed_dimacs(const DimacsFormula& formula);

/// Appends m fresh sites with |0...0><0...0| constraints on their k-subsets.
LocalHamiltonianInstance densify(const LocalHamiltonianInstance& inst, int extra_sites);

/// Instance JSON: {"n":..,"d":..,"k":..,"terms":[{"sites":[..],"matrix":[[[re,im],..],..]}]}
std::string serialize(const LocalHamiltonianInstance& inst);
LocalHamiltonianInstance parse_instance(const std::string& text);

/// Assembles the full d^n operator (capacity-capped).
Mat assemble_dense(const LocalHamiltonianInstance& inst);

/// True when every term matrix is diagonal within 1e-12.
bool is_diagonal_instance(const LocalHamiltonianInstance& inst);

/// Diagonal of the full d^n operator, assembled without the dense matrix.
RVec assemble_diagonal(const LocalHamiltonianInstance& inst);

/// Environment operator of `site`: the d x d operator E with
/// Tr(E rho_site) + c = product_energy when every other block is fixed.
/// Returns E; the constant c collects the terms not touching `site` (omitted).
Mat site_environment(const LocalHamiltonianInstance& inst, const ProductAssignment& assign,
                     int site);

}  // namespace hamlet

#endif
