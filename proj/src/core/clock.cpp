#include "core/clock.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <map>

namespace hamlet {

namespace {

constexpr double kUnitaryTol = 1e-10;

Mat proj0() {
  Mat p = Mat::Zero(2, 2);
  p(0, 0) = 1.0;
  return p;
}

Mat proj1() {
  Mat p = Mat::Zero(2, 2);
  p(1, 1) = 1.0;
  return p;
}

Mat raise01() {  // |1><0|
  Mat p = Mat::Zero(2, 2);
  p(1, 0) = 1.0;
  return p;
}

// A single local piece: single-qubit factors on the listed qubits (others
// identity), combined multiplicatively into a term over `support`.
struct Piece {
  std::vector<std::pair<int, Mat>> factors;  // (qubit, 2x2 op)
};

// Builds the piece as a dense operator over the sorted support qubits.
Mat piece_on_support(const Piece& piece, const std::vector<int>& support) {
  Mat out = Mat::Identity(1, 1);
  for (int q : support) {
    const Mat* f = nullptr;
    for (const auto& [site, op] : piece.factors)
      if (site == q) f = &op;
    out = f ? tensor(out, *f) : tensor(out, Mat(Mat::Identity(2, 2)));
  }
  return out;
}

// Gate matrix with targets rearranged into ascending order.
std::pair<std::vector<int>, Mat> sorted_gate(const Gate& g) {
  if (g.targets.size() == 1 || g.targets[0] < g.targets[1]) return {g.targets, g.matrix};
  Mat swap = Mat::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1.0;
  swap(1, 2) = swap(2, 1) = 1.0;
  return {{g.targets[1], g.targets[0]}, Mat(swap * g.matrix * swap)};
}

struct TermBuilder {
  std::map<std::vector<int>, Mat> terms;

  void add(const std::vector<int>& support, const Mat& matrix) {
    auto it = terms.find(support);
    if (it == terms.end())
      terms.emplace(support, matrix);
    else
      it->second += matrix;
  }
};

// Clock-qubit factors of the unary projector onto time t (clock qubits are
// 1-based positions mapped to absolute indices by `clock_abs`).
std::vector<std::pair<int, Mat>> time_projector(int t, int length,
                                                const std::function<int(int)>& clock_abs) {
  std::vector<std::pair<int, Mat>> f;
  if (t == 0) {
    f.emplace_back(clock_abs(1), proj0());
  } else if (t == length) {
    f.emplace_back(clock_abs(length), proj1());
  } else {
    f.emplace_back(clock_abs(t), proj1());
    f.emplace_back(clock_abs(t + 1), proj0());
  }
  return f;
}

// Clock-qubit factors of the unary transition |t><t-1| for 1 <= t <= L.
std::vector<std::pair<int, Mat>> time_raise(int t, int length,
                                            const std::function<int(int)>& clock_abs) {
  std::vector<std::pair<int, Mat>> f;
  if (t > 1) f.emplace_back(clock_abs(t - 1), proj1());
  f.emplace_back(clock_abs(t), raise01());
  if (t < length) f.emplace_back(clock_abs(t + 1), proj0());
  return f;
}

// The full set of local terms of the clock Hamiltonian, grouped per part.
struct ClockTerms {
  TermBuilder in, out, prop, stab;
};

ClockTerms build_terms(const VerifierCircuit& circuit) {
  const int work = circuit.work_qubits();
  const int length = circuit.length();
  auto clock_abs = [work](int j) { return work + j - 1; };  // clock qubit j (1-based)

  ClockTerms ct;

  // Ancilla-zero penalty at time 0: one 2-local term per ancilla qubit.
  for (int a = 0; a < circuit.n_ancilla; ++a) {
    Piece p;
    p.factors.emplace_back(circuit.n_proof + a, proj1());
    for (auto& f : time_projector(0, length, clock_abs)) p.factors.push_back(f);
    std::vector<int> support;
    for (auto& f : p.factors) support.push_back(f.first);
    std::sort(support.begin(), support.end());
    ct.in.add(support, piece_on_support(p, support));
  }

  // Output penalty at time L on proof qubit 0.
  {
    Piece p;
    p.factors.emplace_back(0, proj0());
    for (auto& f : time_projector(length, length, clock_abs)) p.factors.push_back(f);
    std::vector<int> support;
    for (auto& f : p.factors) support.push_back(f.first);
    std::sort(support.begin(), support.end());
    ct.out.add(support, piece_on_support(p, support));
  }

  // Propagation terms, one per gate.
  for (int j = 1; j <= length; ++j) {
    auto [targets, vmat] = sorted_gate(circuit.gates[j - 1]);
    std::vector<int> support = targets;
    for (int q = std::max(1, j - 1); q <= std::min(length, j + 1); ++q)
      support.push_back(clock_abs(q));
    std::sort(support.begin(), support.end());

    const Eigen::Index dim = Eigen::Index{1} << support.size();
    Mat term = Mat::Zero(dim, dim);

    // 1/2 (P_t=j + P_t=j-1) (x) I
    for (int t : {j - 1, j}) {
      Piece p;
      for (auto& f : time_projector(t, length, clock_abs)) p.factors.push_back(f);
      term += 0.5 * piece_on_support(p, support);
    }

    // -1/2 (V_j (x) |j><j-1| + h.c.)
    Piece raise;
    for (auto& f : time_raise(j, length, clock_abs)) raise.factors.push_back(f);
    Mat clock_part = piece_on_support(raise, support);

    std::vector<int> positions;
    for (int t : targets)
      positions.push_back(static_cast<int>(std::lower_bound(support.begin(), support.end(), t) -
                                           support.begin()));
    std::sort(positions.begin(), positions.end());
    Mat gate_part = embed_term(vmat, positions, static_cast<int>(support.size()), 2);
    Mat coupled = gate_part * clock_part;
    term -= 0.5 * (coupled + coupled.adjoint().eval());

    ct.prop.add(support, term);
  }

  // Stabilizer penalty on invalid clock patterns: |01><01| on (j, j+1).
  for (int j = 1; j + 1 <= length; ++j) {
    std::vector<int> support = {clock_abs(j), clock_abs(j + 1)};
    Mat p = Mat::Zero(4, 4);
    p(1, 1) = 1.0;
    ct.stab.add(support, p);
  }

  return ct;
}

HermitianOp embed_part(const TermBuilder& tb, int n_qubits) {
  Eigen::Index dim = checked_dim(2, n_qubits, "build_clock_hamiltonian");
  Mat out = Mat::Zero(dim, dim);
  for (const auto& [support, matrix] : tb.terms) out += embed_term(matrix, support, n_qubits, 2);
  return HermitianOp::make(std::move(out));
}

}  // namespace

VerifierCircuit VerifierCircuit::make(int n_proof, int n_ancilla, std::vector<Gate> gates) {
  if (n_proof < 1) throw std::invalid_argument("circuit: need at least one proof qubit");
  if (n_ancilla < 0) throw std::invalid_argument("circuit: negative ancilla count");
  if (gates.empty()) throw std::invalid_argument("circuit: need at least one gate");
  const int work = n_proof + n_ancilla;
  for (size_t g = 0; g < gates.size(); ++g) {
    const Gate& gate = gates[g];
    std::string tag = "circuit gate " + std::to_string(g);
    if (gate.targets.size() != 1 && gate.targets.size() != 2)
      throw std::invalid_argument(tag + ": gates act on 1 or 2 qubits");
    for (int t : gate.targets)
      if (t < 0 || t >= work) throw std::invalid_argument(tag + ": target out of range");
    if (gate.targets.size() == 2 && gate.targets[0] == gate.targets[1])
      throw std::invalid_argument(tag + ": repeated target");
    Eigen::Index dim = Eigen::Index{1} << gate.targets.size();
    if (gate.matrix.rows() != dim || gate.matrix.cols() != dim)
      throw std::invalid_argument(tag + ": matrix dimension mismatch");
    double defect = (gate.matrix * gate.matrix.adjoint() - Mat::Identity(dim, dim))
                        .cwiseAbs()
                        .maxCoeff();
    if (defect > kUnitaryTol)
      throw std::invalid_argument(tag + ": matrix is not unitary (defect " +
                                  std::to_string(defect) + ")");
  }
  VerifierCircuit c;
  c.n_proof = n_proof;
  c.n_ancilla = n_ancilla;
  c.gates = std::move(gates);
  return c;
}

ClockHamiltonian build_clock_hamiltonian(const VerifierCircuit& circuit) {
  const int n = circuit.total_qubits();
  checked_dim(2, n, "build_clock_hamiltonian");
  ClockTerms ct = build_terms(circuit);
  ClockHamiltonian out;
  out.circuit = circuit;
  out.h_in = embed_part(ct.in, n);
  out.h_out = embed_part(ct.out, n);
  out.h_prop = embed_part(ct.prop, n);
  out.h_stab = embed_part(ct.stab, n);
  out.total = HermitianOp::make(out.h_in.m + out.h_out.m + out.h_prop.m + out.h_stab.m);
  return out;
}

PureState history_state(const VerifierCircuit& circuit, const PureState& proof) {
  const int work = circuit.work_qubits();
  const int length = circuit.length();
  if (proof.sites() != circuit.n_proof)
    throw std::invalid_argument("history_state: proof qubit count mismatch");
  for (int d : proof.dims)
    if (d != 2) throw std::invalid_argument("history_state: proof must be qubits");
  Eigen::Index full = checked_dim(2, circuit.total_qubits(), "history_state");

  std::vector<int> work_dims(work, 2);
  Eigen::Index work_dim = Eigen::Index{1} << work;
  Vec w = Vec::Zero(work_dim);
  Eigen::Index anc_dim = Eigen::Index{1} << circuit.n_ancilla;
  for (Eigen::Index i = 0; i < proof.amps.size(); ++i) w(i * anc_dim) = proof.amps(i);

  Vec out = Vec::Zero(full);
  const double weight = 1.0 / std::sqrt(static_cast<double>(length) + 1.0);
  const Eigen::Index clock_dim = Eigen::Index{1} << length;
  for (int t = 0; t <= length; ++t) {
    if (t > 0) {
      auto [targets, vmat] = sorted_gate(circuit.gates[t - 1]);
      w = apply_local(vmat, targets, work_dims, w);
    }
    // Unary clock bit pattern for time t: clock qubit j is 1 for j <= t.
    Eigen::Index clock_idx = 0;
    for (int j = 1; j <= t; ++j) clock_idx |= Eigen::Index{1} << (length - j);
    for (Eigen::Index i = 0; i < work_dim; ++i) out(i * clock_dim + clock_idx) += weight * w(i);
  }
  return PureState::make(std::vector<int>(circuit.total_qubits(), 2), std::move(out));
}

AcceptanceResult acceptance_probability(const VerifierCircuit& circuit) {
  const int work = circuit.work_qubits();
  std::vector<int> work_dims(work, 2);
  Eigen::Index work_dim = Eigen::Index{1} << work;
  Eigen::Index proof_dim = Eigen::Index{1} << circuit.n_proof;
  Eigen::Index anc_dim = Eigen::Index{1} << circuit.n_ancilla;

  // Columns: V (e_i (x) |0...0>) for each proof basis state.
  Mat cols(work_dim, proof_dim);
  for (Eigen::Index i = 0; i < proof_dim; ++i) {
    Vec w = Vec::Zero(work_dim);
    w(i * anc_dim) = 1.0;
    for (const Gate& g : circuit.gates) {
      auto [targets, vmat] = sorted_gate(g);
      w = apply_local(vmat, targets, work_dims, w);
    }
    cols.col(i) = w;
  }
  // Measurement of |1> on the output qubit (proof qubit 0, most significant).
  Eigen::Index half = work_dim / 2;
  Mat m = cols.bottomRows(half).adjoint() * cols.bottomRows(half);
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  AcceptanceResult r;
  r.probability = es.eigenvalues().maxCoeff();
  r.best_proof = es.eigenvectors().col(proof_dim - 1);
  return r;
}

KitaevReport check_kitaev_bounds(const VerifierCircuit& circuit,
                                 std::optional<double> acceptance) {
  ClockHamiltonian ch = build_clock_hamiltonian(circuit);
  AcceptanceResult acc = acceptance_probability(circuit);
  KitaevReport rep;
  rep.acceptance = acceptance.value_or(acc.probability);
  rep.eps = 1.0 - rep.acceptance;
  rep.length = circuit.length();
  Eigen::SelfAdjointEigenSolver<Mat> es(ch.total.m, Eigen::EigenvaluesOnly);
  rep.lambda_min = es.eigenvalues().minCoeff();
  rep.yes_threshold = rep.eps / (rep.length + 1);

  PureState proof = PureState::make(std::vector<int>(circuit.n_proof, 2), acc.best_proof);
  PureState hist = history_state(circuit, proof);
  rep.witness_energy = hist.amps.dot(ch.total.m * hist.amps).real();
  rep.yes_ok = rep.lambda_min <= rep.yes_threshold + 1e-9;
  rep.witness_ok = rep.witness_energy <= rep.yes_threshold + 1e-9;
  return rep;
}

EmittedInstance clock_to_instance(const VerifierCircuit& circuit) {
  ClockTerms ct = build_terms(circuit);
  TermBuilder all;
  for (const TermBuilder* part : {&ct.in, &ct.out, &ct.prop, &ct.stab})
    for (const auto& [support, matrix] : part->terms) all.add(support, matrix);

  EmittedInstance out;
  std::vector<LocalTerm> terms;
  int max_arity = 1;
  for (auto& [support, matrix] : all.terms) {
    Eigen::SelfAdjointEigenSolver<Mat> es(matrix, Eigen::EigenvaluesOnly);
    double hi = es.eigenvalues().maxCoeff();
    double scale = hi > 1.0 ? hi : 1.0;
    terms.push_back({support, Mat(matrix / scale)});
    out.scales.push_back(scale);
    max_arity = std::max(max_arity, static_cast<int>(support.size()));
  }
  out.instance = LocalHamiltonianInstance::make(circuit.total_qubits(), 2, max_arity,
                                                std::move(terms));
  return out;
}

VerifierCircuit parse_circuit(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("circuit JSON: ") + e.what());
  }
  try {
    int n_proof = j.at("n_proof").get<int>();
    int n_ancilla = j.at("n_ancilla").get<int>();
    std::vector<Gate> gates;
    for (size_t g = 0; g < j.at("gates").size(); ++g) {
      const auto& jg = j.at("gates")[g];
      Gate gate;
      gate.targets = jg.at("targets").get<std::vector<int>>();
      const auto& rows = jg.at("matrix");
      Eigen::Index dim = static_cast<Eigen::Index>(rows.size());
      gate.matrix.resize(dim, dim);
      for (Eigen::Index r = 0; r < dim; ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != dim)
          throw ParseError("circuit JSON: gates[" + std::to_string(g) + "].matrix row " +
                           std::to_string(r) + " has wrong length");
        for (Eigen::Index c = 0; c < dim; ++c)
          gate.matrix(r, c) = Complex(rows[r][c].at(0).get<double>(), rows[r][c].at(1).get<double>());
      }
      gates.push_back(std::move(gate));
    }
    return VerifierCircuit::make(n_proof, n_ancilla, std::move(gates));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("circuit JSON: ") + e.what());
  }
}

std::string serialize_circuit(const VerifierCircuit& circuit) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n_proof"] = circuit.n_proof;
  j["n_ancilla"] = circuit.n_ancilla;
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : circuit.gates) {
    nlohmann::json jg;
    jg["targets"] = g.targets;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < g.matrix.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < g.matrix.cols(); ++c)
        row.push_back({g.matrix(r, c).real(), g.matrix(r, c).imag()});
      rows.push_back(std::move(row));
    }
    jg["matrix"] = std::move(rows);
    gates.push_back(std::move(jg));
  }
  j["gates"] = std::move(gates);
  return j.dump();
}

}  // namespace hamlet
