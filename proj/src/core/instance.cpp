#include "core/instance.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/rng.hpp"

namespace hamlet {

namespace {

// Enumerates k-subsets of {0..n-1} in lexicographic order.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Eigen::Index local_dim(int d, size_t arity) {
  Eigen::Index dim = 1;
  for (size_t i = 0; i < arity; ++i) dim *= d;
  return dim;
}

}  // namespace

LocalHamiltonianInstance LocalHamiltonianInstance::make(int n, int d, int k,
                                                        std::vector<LocalTerm> terms) {
  if (n < 1) throw std::invalid_argument("instance: need at least one site");
  if (d < 2) throw std::invalid_argument("instance: local dimension must be >= 2");
  if (k < 1) throw std::invalid_argument("instance: locality must be >= 1");
  std::set<std::vector<int>> seen;
  for (const auto& t : terms) {
    if (t.support.empty() || static_cast<int>(t.support.size()) > k)
      throw std::invalid_argument("instance: term arity out of range");
    for (size_t i = 0; i < t.support.size(); ++i) {
      if (t.support[i] < 0 || t.support[i] >= n)
        throw std::invalid_argument("instance: term site index out of range");
      if (i > 0 && t.support[i] <= t.support[i - 1])
        throw std::invalid_argument("instance: term support must be strictly increasing");
    }
    if (!seen.insert(t.support).second)
      throw std::invalid_argument("instance: duplicate term support");
    Eigen::Index dim = local_dim(d, t.support.size());
    if (t.matrix.rows() != dim || t.matrix.cols() != dim)
      throw std::invalid_argument("instance: term matrix dimension mismatch");
  }
  LocalHamiltonianInstance inst;
  inst.n = n;
  inst.d = d;
  inst.k = k;
  inst.terms = std::move(terms);
  return inst;
}

Eigen::Index LocalHamiltonianInstance::term_dim(const LocalTerm& t) const {
  return local_dim(d, t.support.size());
}

ProductAssignment ProductAssignment::maximally_mixed(int n, int d) {
  ProductAssignment a;
  a.blocks.reserve(n);
  for (int i = 0; i < n; ++i) a.blocks.push_back(DensityOp::maximally_mixed(d));
  return a;
}

ProductAssignment ProductAssignment::from_pure(const std::vector<Vec>& site_vectors) {
  ProductAssignment a;
  a.blocks.reserve(site_vectors.size());
  for (const Vec& v : site_vectors) a.blocks.push_back(DensityOp::pure(v));
  return a;
}

Diagnostics validate(const LocalHamiltonianInstance& inst) {
  Diagnostics diag;
  auto flag = [&](const std::string& s) {
    diag.ok = false;
    diag.issues.push_back(s);
  };
  std::set<std::vector<int>> seen;
  for (size_t t = 0; t < inst.terms.size(); ++t) {
    const LocalTerm& term = inst.terms[t];
    std::string tag = "term " + std::to_string(t);
    bool shape_ok = true;
    if (term.support.empty() || static_cast<int>(term.support.size()) > inst.k) {
      flag(tag + ": arity " + std::to_string(term.support.size()) + " outside [1," +
           std::to_string(inst.k) + "]");
      shape_ok = false;
    }
    for (size_t i = 0; i < term.support.size(); ++i) {
      if (term.support[i] < 0 || term.support[i] >= inst.n) {
        flag(tag + ": site index out of range");
        shape_ok = false;
      }
      if (i > 0 && term.support[i] <= term.support[i - 1]) {
        flag(tag + ": support not strictly increasing");
        shape_ok = false;
      }
    }
    if (shape_ok && !seen.insert(term.support).second) flag(tag + ": duplicate support");
    if (!shape_ok) continue;
    Eigen::Index dim = inst.term_dim(term);
    if (term.matrix.rows() != dim || term.matrix.cols() != dim) {
      flag(tag + ": matrix dimension mismatch");
      continue;
    }
    double defect = (term.matrix - term.matrix.adjoint().eval()).cwiseAbs().maxCoeff();
    if (defect > kHermTol) flag(tag + ": not Hermitian (defect " + std::to_string(defect) + ")");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (term.matrix + term.matrix.adjoint().eval()),
                                          Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (lo < -kPsdTol) flag(tag + ": not PSD (min eigenvalue " + std::to_string(lo) + ")");
    if (hi > 1.0 + kPsdTol) flag(tag + ": operator norm above 1 (" + std::to_string(hi) + ")");
  }
  return diag;
}

double product_energy(const LocalHamiltonianInstance& inst, const ProductAssignment& assign) {
  if (assign.sites() != inst.n)
    throw std::invalid_argument("product_energy: assignment site count mismatch");
  for (const auto& b : assign.blocks)
    if (b.dim() != inst.d) throw std::invalid_argument("product_energy: block dimension mismatch");
  double total = 0.0;
  for (const LocalTerm& term : inst.terms) {
    Mat kron = assign.blocks[term.support[0]].op.m;
    for (size_t i = 1; i < term.support.size(); ++i)
      kron = tensor(kron, assign.blocks[term.support[i]].op.m);
    total += term.matrix.cwiseProduct(kron.transpose()).sum().real();
  }
  return total;
}

double pure_energy(const LocalHamiltonianInstance& inst, const PureState& psi) {
  if (psi.sites() != inst.n) throw std::invalid_argument("pure_energy: site count mismatch");
  for (int dd : psi.dims)
    if (dd != inst.d) throw std::invalid_argument("pure_energy: local dimension mismatch");
  double total = 0.0;
  for (const LocalTerm& term : inst.terms)
    total += local_expectation(term.matrix, term.support, psi.dims, psi.amps);
  return total;
}

double density_value(const LocalHamiltonianInstance& inst) {
  double total = 0.0;
  for (const LocalTerm& term : inst.terms)
    total += term.matrix.trace().real() / static_cast<double>(inst.term_dim(term));
  return total;
}

LocalHamiltonianInstance gen_random_dense(int n, int d, int k, std::uint64_t seed) {
  if (k > n) throw std::invalid_argument("gen_random_dense: locality exceeds site count");
  Rng rng(seed);
  Eigen::Index dim = local_dim(d, k);
  std::vector<LocalTerm> terms;
  for_each_subset(n, k, [&](const std::vector<int>& subset) {
    Mat u = rng.haar_unitary(static_cast<int>(dim));
    RVec lam(dim);
    for (Eigen::Index i = 0; i < dim; ++i) lam(i) = rng.uniform();
    Mat h = u * lam.asDiagonal() * u.adjoint();
    terms.push_back({subset, 0.5 * (h + h.adjoint().eval())});
  });
  return LocalHamiltonianInstance::make(n, d, k, std::move(terms));
}

LocalHamiltonianInstance embed_csp(int n, int d, int k, const std::vector<CspClause>& clauses) {
  std::map<std::vector<int>, Mat> merged;
  for (size_t c = 0; c < clauses.size(); ++c) {
    const CspClause& clause = clauses[c];
    const int arity = static_cast<int>(clause.vars.size());
    if (arity < 1 || arity > k)
      throw std::invalid_argument("embed_csp: clause " + std::to_string(c) + " arity out of range");
    std::set<int> uniq(clause.vars.begin(), clause.vars.end());
    if (static_cast<int>(uniq.size()) != arity)
      throw std::invalid_argument("embed_csp: clause " + std::to_string(c) + " repeats a variable");
    for (int v : clause.vars)
      if (v < 0 || v >= n)
        throw std::invalid_argument("embed_csp: clause " + std::to_string(c) + " variable out of range");
    Eigen::Index dim = local_dim(d, arity);
    if (static_cast<Eigen::Index>(clause.satisfied.size()) != dim)
      throw std::invalid_argument("embed_csp: clause " + std::to_string(c) + " truth table size mismatch");

    std::vector<int> sorted(clause.vars.begin(), clause.vars.end());
    std::sort(sorted.begin(), sorted.end());
    // Position of each sorted variable in the clause's original ordering.
    std::vector<int> orig_pos(arity);
    for (int p = 0; p < arity; ++p) {
      auto it = std::find(clause.vars.begin(), clause.vars.end(), sorted[p]);
      orig_pos[p] = static_cast<int>(it - clause.vars.begin());
    }

    Mat& slot = merged.try_emplace(sorted, Mat::Zero(dim, dim)).first->second;
    std::vector<int> digit(arity, 0);
    for (Eigen::Index m = 0; m < dim; ++m) {
      Eigen::Index rem = m;
      for (int p = arity - 1; p >= 0; --p) {
        digit[p] = static_cast<int>(rem % d);
        rem /= d;
      }
      Eigen::Index orig = 0;
      for (int p = 0; p < arity; ++p) {
        int digit_of_orig_p = 0;
        for (int q = 0; q < arity; ++q)
          if (orig_pos[q] == p) digit_of_orig_p = digit[q];
        orig = orig * d + digit_of_orig_p;
      }
      if (!clause.satisfied[orig]) slot(m, m) += 1.0;
    }
  }
  std::vector<LocalTerm> terms;
  terms.reserve(merged.size());
  for (auto& [support, matrix] : merged) terms.push_back({support, std::move(matrix)});
  return LocalHamiltonianInstance::make(n, d, k, std::move(terms));
}

LocalHamiltonianInstance complement_instance(const LocalHamiltonianInstance& inst) {
  std::vector<LocalTerm> terms;
  terms.reserve(inst.terms.size());
  for (const LocalTerm& t : inst.terms)
    terms.push_back({t.support, Mat(Mat::Identity(t.matrix.rows(), t.matrix.cols()) - t.matrix)});
  return LocalHamiltonianInstance::make(inst.n, inst.d, inst.k, std::move(terms));
}

DimacsFormula parse_dimacs(const std::string& text) {
  DimacsFormula f;
  std::istringstream in(text);
  std::string token;
  bool header_seen = false;
  int declared_clauses = -1;
  std::vector<int> current;
  while (in >> token) {
    if (!token.empty() && (token[0] == 'c' || token[0] == 'C')) {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (token == "p") {
      std::string fmt;
      if (!(in >> fmt >> f.n_vars >> declared_clauses) || fmt != "cnf")
        throw ParseError("DIMACS: malformed problem line");
      header_seen = true;
      continue;
    }
    if (token == "%") break;  // some benchmark files end with "% 0"
    int lit;
    try {
      lit = std::stoi(token);
    } catch (...) {
      throw ParseError("DIMACS: unexpected token \"" + token + "\"");
    }
    if (lit == 0) {
      if (!current.empty()) {
        f.clauses.push_back(current);
        current.clear();
      }
      continue;
    }
    int var = std::abs(lit);
    if (header_seen && var > f.n_vars)
      throw ParseError("DIMACS: literal " + std::to_string(lit) + " out of declared range");
    f.n_vars = std::max(f.n_vars, var);
    current.push_back(lit);
  }
  if (!current.empty()) f.clauses.push_back(current);
  if (!header_seen && f.clauses.empty()) throw ParseError("DIMACS: no problem line and no clauses");
  return f;
}

LocalHamiltonianInstance embed_dimacs(const DimacsFormula& formula) {
  if (formula.clauses.empty()) throw std::invalid_argument("embed_dimacs: no clauses");
  int k = 1;
  std::vector<CspClause> clauses;
  for (const auto& lits : formula.clauses) {
    CspClause clause;
    std::vector<int> vars;
    for (int lit : lits) {
      int v = std::abs(lit) - 1;
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    const int arity = static_cast<int>(vars.size());
    k = std::max(k, arity);
    clause.vars = vars;
    Eigen::Index dim = 1;
    for (int i = 0; i < arity; ++i) dim *= 2;
    clause.satisfied.assign(dim, 0);
    for (Eigen::Index m = 0; m < dim; ++m) {
      bool sat = false;
      for (int lit : lits) {
        int v = std::abs(lit) - 1;
        int pos = static_cast<int>(std::find(vars.begin(), vars.end(), v) - vars.begin());
        int bit = (m >> (arity - 1 - pos)) & 1;
        if ((lit > 0 && bit == 1) || (lit < 0 && bit == 0)) {
          sat = true;
          break;
        }
      }
      clause.satisfied[m] = sat ? 1 : 0;
    }
    clauses.push_back(std::move(clause));
  }
  return embed_csp(formula.n_vars, 2, k, clauses);
}

LocalHamiltonianInstance densify(const LocalHamiltonianInstance& inst, int extra_sites) {
  if (inst.k < 2) throw std::invalid_argument("densify: requires locality >= 2");
  if (extra_sites < 0) throw std::invalid_argument("densify: negative site count");
  std::vector<LocalTerm> terms = inst.terms;
  Eigen::Index dim = local_dim(inst.d, inst.k);
  Mat zeros = Mat::Zero(dim, dim);
  zeros(0, 0) = 1.0;
  for_each_subset(extra_sites, inst.k, [&](const std::vector<int>& subset) {
    std::vector<int> sites(subset.size());
    for (size_t i = 0; i < subset.size(); ++i) sites[i] = inst.n + subset[i];
    terms.push_back({sites, zeros});
  });
  return LocalHamiltonianInstance::make(inst.n + extra_sites, inst.d, inst.k, std::move(terms));
}

std::string serialize(const LocalHamiltonianInstance& inst) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n"] = inst.n;
  j["d"] = inst.d;
  j["k"] = inst.k;
  nlohmann::json terms = nlohmann::json::array();
  for (const LocalTerm& t : inst.terms) {
    nlohmann::json jt;
    jt["sites"] = t.support;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < t.matrix.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < t.matrix.cols(); ++c)
        row.push_back({t.matrix(r, c).real(), t.matrix(r, c).imag()});
      rows.push_back(std::move(row));
    }
    jt["matrix"] = std::move(rows);
    terms.push_back(std::move(jt));
  }
  j["terms"] = std::move(terms);
  return j.dump();
}

LocalHamiltonianInstance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ParseError("instance JSON: top level is not an object");
    for (const char* key : {"n", "d", "k", "terms"})
      if (!j.contains(key)) throw ParseError(std::string("instance JSON: missing key \"") + key + "\"");
    int n = j.at("n").get<int>();
    int d = j.at("d").get<int>();
    int k = j.at("k").get<int>();
    std::vector<LocalTerm> terms;
    const auto& jterms = j.at("terms");
    if (!jterms.is_array()) throw ParseError("instance JSON: \"terms\" is not an array");
    for (size_t t = 0; t < jterms.size(); ++t) {
      std::string at = "instance JSON: terms[" + std::to_string(t) + "]";
      const auto& jt = jterms[t];
      if (!jt.contains("sites") || !jt.contains("matrix")) throw ParseError(at + ": missing sites/matrix");
      LocalTerm term;
      term.support = jt.at("sites").get<std::vector<int>>();
      const auto& rows = jt.at("matrix");
      if (!rows.is_array() || rows.empty()) throw ParseError(at + ".matrix: not a nonempty array");
      Eigen::Index dim = static_cast<Eigen::Index>(rows.size());
      term.matrix.resize(dim, dim);
      for (Eigen::Index r = 0; r < dim; ++r) {
        const auto& row = rows[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
          throw ParseError(at + ".matrix row " + std::to_string(r) + ": expected " +
                           std::to_string(dim) + " entries");
        for (Eigen::Index c = 0; c < dim; ++c) {
          const auto& e = row[static_cast<size_t>(c)];
          if (!e.is_array() || e.size() != 2)
            throw ParseError(at + ".matrix entry (" + std::to_string(r) + "," + std::to_string(c) +
                             "): expected [re,im]");
          term.matrix(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
      }
      terms.push_back(std::move(term));
    }
    return LocalHamiltonianInstance::make(n, d, k, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
}

Mat assemble_dense(const LocalHamiltonianInstance& inst) {
  Eigen::Index full = checked_dim(inst.d, inst.n, "assemble_dense");
  Mat h = Mat::Zero(full, full);
  for (const LocalTerm& term : inst.terms) h += embed_term(term.matrix, term.support, inst.n, inst.d);
  return h;
}

bool is_diagonal_instance(const LocalHamiltonianInstance& inst) {
  for (const LocalTerm& term : inst.terms) {
    Mat offdiag = term.matrix;
    offdiag.diagonal().setZero();
    if (offdiag.cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

RVec assemble_diagonal(const LocalHamiltonianInstance& inst) {
  std::uint64_t full64 = pow_u64(static_cast<std::uint64_t>(inst.d),
                                 static_cast<unsigned>(inst.n));
  if (full64 > max_total_dim())
    throw CapacityError("assemble_diagonal: dimension exceeds cap");
  Eigen::Index full = static_cast<Eigen::Index>(full64);
  RVec diag = RVec::Zero(full);
  std::vector<int> digits(inst.n);
  for (Eigen::Index idx = 0; idx < full; ++idx) {
    Eigen::Index rem = idx;
    for (int i = inst.n - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(rem % inst.d);
      rem /= inst.d;
    }
    double v = 0.0;
    for (const LocalTerm& term : inst.terms) {
      Eigen::Index local = 0;
      for (int s : term.support) local = local * inst.d + digits[s];
      v += term.matrix(local, local).real();
    }
    diag(idx) = v;
  }
  return diag;
}

Mat site_environment(const LocalHamiltonianInstance& inst, const ProductAssignment& assign,
                     int site) {
  if (site < 0 || site >= inst.n) throw std::invalid_argument("site_environment: site out of range");
  Mat env = Mat::Zero(inst.d, inst.d);
  std::vector<int> adigits, bdigits;
  for (const LocalTerm& term : inst.terms) {
    auto it = std::find(term.support.begin(), term.support.end(), site);
    if (it == term.support.end()) continue;
    const int pos = static_cast<int>(it - term.support.begin());
    const int arity = static_cast<int>(term.support.size());
    const Eigen::Index dim = inst.term_dim(term);
    adigits.assign(arity, 0);
    bdigits.assign(arity, 0);
    for (Eigen::Index a = 0; a < dim; ++a) {
      Eigen::Index rem = a;
      for (int p = arity - 1; p >= 0; --p) {
        adigits[p] = static_cast<int>(rem % inst.d);
        rem /= inst.d;
      }
      for (Eigen::Index b = 0; b < dim; ++b) {
        rem = b;
        for (int p = arity - 1; p >= 0; --p) {
          bdigits[p] = static_cast<int>(rem % inst.d);
          rem /= inst.d;
        }
        Complex w = term.matrix(a, b);
        if (w == Complex(0.0, 0.0)) continue;
        for (int p = 0; p < arity; ++p) {
          if (p == pos) continue;
          w *= assign.blocks[term.support[p]].op.m(bdigits[p], adigits[p]);
        }
        env(bdigits[pos], adigits[pos]) += w;
      }
    }
  }
  return 0.5 * (env + env.adjoint().eval());
}

}  // namespace hamlet
