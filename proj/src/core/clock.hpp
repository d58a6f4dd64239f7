#ifndef HAMLET_CLOCK_HPP
#define HAMLET_CLOCK_HPP

#include <optional>

#include "core/instance.hpp"
#include "core/operator_core.hpp"

namespace hamlet {

struct Gate {
  std::vector<int> targets;  // 1 or 2 distinct qubit indices; targets[0] is the
                             // most significant factor of `matrix`
  Mat matrix;                // unitary of dim 2^{|targets|}
};

/// Verification circuit V = V_L ... V_1 on proof qubits 0..n_proof-1 followed
/// by ancilla qubits (initialized to |0>). The output qubit is proof qubit 0.
struct VerifierCircuit {
  int n_proof = 0;
  int n_ancilla = 0;
  std::vector<Gate> gates;

  static VerifierCircuit make(int n_proof, int n_ancilla, std::vector<Gate> gates);
  int work_qubits() const { return n_proof + n_ancilla; }
  int length() const { return static_cast<int>(gates.size()); }
  int total_qubits() const { return work_qubits() + length(); }
};

/// The four penalty parts on proof (x) ancilla (x) unary clock, with time t
/// encoded as |1^t 0^{L-t}>.
struct ClockHamiltonian {
  VerifierCircuit circuit;
  HermitianOp h_in;
  HermitianOp h_out;
  HermitianOp h_prop;
  HermitianOp h_stab;
  HermitianOp total;
};

ClockHamiltonian build_clock_hamiltonian(const VerifierCircuit& circuit);

/// Normalized history state: sum_t V_t...V_1 (|proof> (x) |0...0>) (x) |unary(t)> / sqrt(L+1).
PureState history_state(const VerifierCircuit& circuit, const PureState& proof);

/// Max over proofs of the probability that measuring the output qubit after V
/// yields 1, together with the optimizing proof.
struct AcceptanceResult {
  double probability = 0.0;
  Vec best_proof;
};
AcceptanceResult acceptance_probability(const VerifierCircuit& circuit);

struct KitaevReport {
  double acceptance = 0.0;     // alpha: max over proofs of Pr[output 1]
  double eps = 0.0;            // 1 - alpha
  int length = 0;              // L
  double lambda_min = 0.0;     // smallest eigenvalue of the total Hamiltonian
  double yes_threshold = 0.0;  // eps / (L+1)
  double witness_energy = 0.0; // history-state energy of the best proof
  bool yes_ok = false;         // lambda_min <= yes_threshold + 1e-9
  bool witness_ok = false;     // witness_energy <= yes_threshold + 1e-9
};

/// Numeric spectral check: the YES bound via a witness history state, and the
/// raw lambda_min for NO-side comparisons. Pass `acceptance` to override the
/// numerically computed value.
KitaevReport check_kitaev_bounds(const VerifierCircuit& circuit,
                                 std::optional<double> acceptance = std::nullopt);

/// The clock Hamiltonian as a MAX-k-local instance (k <= 5). Terms sharing a
/// support are merged; any merged term with operator norm above 1 is divided
/// by that norm, and the divisor is recorded in `scales` (1.0 elsewhere), so
/// total = sum_t scales[t] * term_t.
struct EmittedInstance {
  LocalHamiltonianInstance instance;
  std::vector<double> scales;
};
EmittedInstance clock_to_instance(const VerifierCircuit& circuit);

/// Circuit JSON: {"n_proof":..,"n_ancilla":..,"gates":[{"targets":[..],"matrix":[[[re,im],..],..]}]}
VerifierCircuit parse_circuit(const std::string& text);
std::string serialize_circuit(const VerifierCircuit& circuit);

}  // namespace hamlet

#endif
