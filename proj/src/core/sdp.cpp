#include "core/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hamlet {

void add_constraint(SdpModel& model, LinearFunctional f, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("add_constraint: lower bound above upper bound");
  if (lower == upper) {
    lower -= kEqualitySlack;
    upper += kEqualitySlack;
  }
  model.constraints.push_back({std::move(f), lower, upper});
}

namespace {

// ---------------------------------------------------------------------------
// LINEARIZE
// ---------------------------------------------------------------------------

struct LinearizeCtx {
  const CoordinateTensor* tensor;
  const SampleSet* sample;
  const SamplerParams* params;
  double ladder_scale;  // eps_top / eps_k
  SdpModel* model;

  double eps_at(int level) const { return ladder_scale * params->eps_ladder(level); }
  double npow(int p) const { return std::pow(static_cast<double>(tensor->n()), p); }
};

// Exact linear functional of a base-level form.
LinearFunctional base_functional(const LinearizeCtx& ctx, const DegreeForm& form) {
  const CoordinateTensor& t = *ctx.tensor;
  const int bsize = t.basis_size();
  LinearFunctional f;
  f.coeff = RMat::Zero(t.n(), bsize);
  std::uint64_t label_base = 0;
  std::uint64_t s = static_cast<std::uint64_t>(bsize);
  for (int l = 1; l < t.k(); ++l) {
    label_base += static_cast<std::uint64_t>(form.outer_labels[l - 1]) * s;
    s *= bsize;
  }
  for (int i : t.sites_at_position(form.outer_sites)) {
    std::vector<int> support;
    support.push_back(i);
    support.insert(support.end(), form.outer_sites.begin(), form.outer_sites.end());
    int idx = t.term_index(support);
    if (idx < 0) continue;
    const auto& coeffs = t.terms()[idx].coeffs;
    for (int j = 0; j < bsize; ++j) f.coeff(i, j) += coeffs[label_base + j];
  }
  return f;
}

// Recursive linearization; returns the objective at the top call only.
LinearFunctional linearize_rec(const LinearizeCtx& ctx, const DegreeForm& form, bool has_bounds,
                               double lower, double upper) {
  const CoordinateTensor& t = *ctx.tensor;
  const int bsize = t.basis_size();
  const int b = form.level;

  if (b == 1) {
    LinearFunctional f = base_functional(ctx, form);
    if (!has_bounds) return f;  // objective was linear to begin with
    add_constraint(*ctx.model, std::move(f), lower, upper);
    return {};
  }

  const double eps_next = ctx.eps_at(b - 1);
  LinearFunctional objective;
  objective.coeff = RMat::Zero(t.n(), bsize);
  for (int i : t.sites_at_position(form.outer_sites)) {
    for (int j = 0; j < bsize; ++j) {
      DegreeForm sub = form.descend(i, j);
      double e_ij = eval_estimate(sub, *ctx.sample, *ctx.params);
      objective.coeff(i, j) = e_ij;
      double width = eps_next * ctx.npow(b - 1);
      linearize_rec(ctx, sub, true, e_ij - width, e_ij + width);
    }
  }
  if (!has_bounds) return objective;
  double widen = eps_next * bsize * ctx.npow(b);
  add_constraint(*ctx.model, std::move(objective), lower - widen, upper + widen);
  return {};
}

}  // namespace

SdpModel linearize(const CoordinateTensor& tensor, const SampleSet& sample,
                   const SamplerParams& params, double eps_top, bool maximize) {
  SdpModel model;
  model.n = tensor.n();
  model.d = tensor.d();
  model.maximize = maximize;

  LinearizeCtx ctx;
  ctx.tensor = &tensor;
  ctx.sample = &sample;
  ctx.params = &params;
  double eps_k = params.eps_ladder(tensor.k());
  ctx.ladder_scale = eps_k > 0.0 ? eps_top / eps_k : 1.0;
  ctx.model = &model;

  model.objective = linearize_rec(ctx, DegreeForm::top(tensor), false, 0.0, 0.0);
  dedup_constraints(model);
  return model;
}

int dedup_constraints(SdpModel& model) {
  std::map<std::pair<std::vector<double>, double>, size_t> seen;
  std::vector<LinearizedConstraint> kept;
  int removed = 0;
  for (auto& c : model.constraints) {
    std::vector<double> key(c.functional.coeff.data(),
                            c.functional.coeff.data() + c.functional.coeff.size());
    auto [it, inserted] = seen.try_emplace({std::move(key), c.functional.offset}, kept.size());
    if (inserted) {
      kept.push_back(std::move(c));
    } else {
      LinearizedConstraint& prev = kept[it->second];
      prev.lower = std::max(prev.lower, c.lower);
      prev.upper = std::min(prev.upper, c.upper);
      ++removed;
    }
  }
  model.constraints = std::move(kept);
  return removed;
}

// ---------------------------------------------------------------------------
// Interior-point solver
// ---------------------------------------------------------------------------

namespace {

struct BlockState {
  Mat projector;   // d x r isometry into the reduced space
  int r = 0;       // reduced dimension
  HermBasis rbasis;  // basis of the reduced space (r >= 2)
  int var_offset = -1;  // into z; r^2 - 1 free coordinates, -1 when fixed
  Mat fixed_value;      // r == 1: the pinned d x d density
};

struct InternalConstraint {
  RVec a;     // over z
  double b;   // constant
  double lower, upper;
  bool equality;
  double target;  // midpoint when equality
};

// Affine representation of a functional over the reduced coordinates.
void functional_affine(const SdpModel& model, const std::vector<BlockState>& blocks,
                       const HermBasis& full_basis, const LinearFunctional& f, int nvars,
                       RVec& a, double& b) {
  a = RVec::Zero(nvars);
  b = f.offset;
  for (int i = 0; i < model.n; ++i) {
    Mat big = Mat::Zero(model.d, model.d);
    bool any = false;
    for (int j = 0; j < model.d * model.d; ++j) {
      double c = f.coeff(i, j);
      if (c != 0.0) {
        big += c * full_basis.elements[j];
        any = true;
      }
    }
    if (!any) continue;
    const BlockState& bs = blocks[i];
    if (bs.r == 1) {
      b += (big * bs.fixed_value).trace().real();
      continue;
    }
    Mat reduced = bs.projector.adjoint() * big * bs.projector;
    // Tr(reduced W), W = sum x_j sigma'_j with the trace coordinate fixed.
    for (int j = 0; j + 1 < bs.r * bs.r; ++j)
      a(bs.var_offset + j) += (reduced * bs.rbasis.elements[j]).trace().real();
    b += (reduced * bs.rbasis.elements[bs.r * bs.r - 1]).trace().real() /
         std::sqrt(2.0 * bs.r);
  }
}

// Barrier subproblem: minimize obj . v subject to affine-PSD blocks and
// affine inequalities, all strictly feasible at the supplied start.
struct BarrierProblem {
  int nvars = 0;
  RVec obj;
  struct PsdBlock {
    Mat c0;
    std::vector<Mat> b;  // per variable
  };
  std::vector<PsdBlock> blocks;
  struct Ineq {
    RVec a;
    double b;  // a.v + b >= 0
  };
  std::vector<Ineq> ineqs;

  double barrier_order() const {
    double nu = 0.0;
    for (const auto& bl : blocks) nu += static_cast<double>(bl.c0.rows());
    nu += static_cast<double>(ineqs.size());
    return nu;
  }
};

Mat psd_value(const BarrierProblem::PsdBlock& bl, const RVec& v) {
  Mat m = bl.c0;
  for (int j = 0; j < v.size(); ++j)
    if (v(j) != 0.0 && bl.b[j].size() > 0) m += v(j) * bl.b[j];
  return m;
}

bool strictly_feasible(const BarrierProblem& p, const RVec& v, double margin = 0.0) {
  for (const auto& bl : p.blocks) {
    Eigen::LLT<Mat> llt(psd_value(bl, v) - margin * Mat::Identity(bl.c0.rows(), bl.c0.cols()));
    if (llt.info() != Eigen::Success) return false;
  }
  for (const auto& q : p.ineqs)
    if (q.a.dot(v) + q.b <= margin) return false;
  return true;
}

// Damped-Newton centering of t*obj + barrier. Returns the Newton decrement.
double center(const BarrierProblem& p, RVec& v, double t, int max_newton = 80) {
  const int m = p.nvars;
  double decrement = kInf;
  for (int iter = 0; iter < max_newton; ++iter) {
    RVec grad = t * p.obj;
    RMat hess = RMat::Zero(m, m);
    for (const auto& bl : p.blocks) {
      Mat rho = psd_value(bl, v);
      Eigen::LLT<Mat> llt(rho);
      if (llt.info() != Eigen::Success) throw std::runtime_error("sdp: lost PSD interior");
      std::vector<Mat> tmats(m);
      for (int j = 0; j < m; ++j)
        if (bl.b[j].size() > 0) tmats[j] = llt.solve(bl.b[j]);
      for (int j = 0; j < m; ++j) {
        if (tmats[j].size() == 0) continue;
        grad(j) -= tmats[j].trace().real();
        for (int l = j; l < m; ++l) {
          if (tmats[l].size() == 0) continue;
          double hjl = (tmats[j] * tmats[l]).trace().real();
          hess(j, l) += hjl;
          if (l != j) hess(l, j) += hjl;
        }
      }
    }
    for (const auto& q : p.ineqs) {
      double s = q.a.dot(v) + q.b;
      grad -= q.a / s;
      hess += (q.a * q.a.transpose()) / (s * s);
    }

    double reg = 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
    hess.diagonal().array() += reg;
    Eigen::LDLT<RMat> ldlt(hess);
    RVec step = ldlt.solve(-grad);
    decrement = std::sqrt(std::max(0.0, -grad.dot(step)));
    if (decrement < 1e-9) return decrement;

    // Backtrack to stay strictly inside, then Armijo on the barrier value.
    double alpha = 1.0;
    while (alpha > 1e-14 && !strictly_feasible(p, v + alpha * step)) alpha *= 0.5;
    if (alpha <= 1e-14) return decrement;
    auto value = [&](const RVec& x) {
      double val = t * p.obj.dot(x);
      for (const auto& bl : p.blocks) {
        Eigen::LLT<Mat> llt(psd_value(bl, x));
        if (llt.info() != Eigen::Success) return kInf;
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < bl.c0.rows(); ++i)
          logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
        val -= logdet;
      }
      for (const auto& q : p.ineqs) {
        double s = q.a.dot(x) + q.b;
        if (s <= 0.0) return kInf;
        val -= std::log(s);
      }
      return val;
    };
    double v0 = value(v);
    double slope = grad.dot(step);
    while (alpha > 1e-14 && value(v + alpha * step) > v0 + 0.25 * alpha * slope) alpha *= 0.5;
    if (alpha <= 1e-14) return decrement;
    v += alpha * step;
    if (decrement < 1e-9) return decrement;
  }
  return decrement;
}

// Path following until the certified gap nu/t drops below eps.
double follow_path(const BarrierProblem& p, RVec& v, double eps, int max_outer = 200) {
  double nu = p.barrier_order();
  if (p.nvars == 0 || nu == 0.0) return 0.0;
  double obj_scale = std::max(1.0, p.obj.cwiseAbs().maxCoeff());
  double t = std::max(1.0, nu / std::max(1.0, obj_scale));
  for (int outer = 0; outer < max_outer; ++outer) {
    center(p, v, t);
    if (nu / t <= eps) return nu / t;
    t *= 10.0;
  }
  return nu / t;
}

}  // namespace

SdpSolution solve_sdp(const SdpModel& model, double eps_sdp) {
  if (model.n < 1 || model.d < 2) throw std::invalid_argument("solve_sdp: bad model shape");
  if (!(eps_sdp > 0.0)) throw std::invalid_argument("solve_sdp: tolerance must be positive");
  const int d = model.d;
  const int bsize = d * d;
  HermBasis full_basis = build_herm_basis(d);
  for (const auto& c : model.constraints) {
    if (c.functional.coeff.rows() != model.n || c.functional.coeff.cols() != bsize)
      throw std::invalid_argument("solve_sdp: constraint coefficient shape mismatch");
    if (c.lower > c.upper) throw std::invalid_argument("solve_sdp: constraint has lower > upper");
  }

  auto make_infeasible = [&]() {
    SdpSolution s;
    s.status = SdpStatus::infeasible;
    s.assignment = ProductAssignment::maximally_mixed(model.n, d);
    RMat w(model.n, bsize);
    for (int i = 0; i < model.n; ++i)
      for (int j = 0; j < bsize; ++j)
        w(i, j) = (full_basis.elements[j] * s.assignment.blocks[i].op.m).trace().real();
    s.objective_value = model.objective.value(w);
    return s;
  };

  std::vector<BlockState> blocks(model.n);
  for (int i = 0; i < model.n; ++i) {
    blocks[i].projector = Mat::Identity(d, d);
    blocks[i].r = d;
    blocks[i].rbasis = build_herm_basis(d);
  }

  // Classify constraints; collapse paired-slack inequalities to equalities.
  struct RawCon {
    const LinearizedConstraint* c;
    bool equality;
    double target;
  };
  std::vector<RawCon> raw;
  for (const auto& c : model.constraints) {
    bool eq = std::isfinite(c.lower) && std::isfinite(c.upper) &&
              (c.upper - c.lower) <= 2.0 * kEqualitySlack + 1e-12;
    raw.push_back({&c, eq, 0.5 * (c.lower + c.upper)});
  }

  // Facial reduction: a single-block equality pinned at an extreme eigenvalue
  // restricts that block to the corresponding eigenspace.
  std::vector<bool> consumed(raw.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t ci = 0; ci < raw.size(); ++ci) {
      if (consumed[ci] || !raw[ci].equality) continue;
      const LinearFunctional& f = raw[ci].c->functional;
      int touched = -1;
      bool single = true;
      double const_part = f.offset;
      for (int i = 0; i < model.n && single; ++i) {
        bool any = false;
        for (int j = 0; j < bsize; ++j)
          if (f.coeff(i, j) != 0.0) any = true;
        if (!any) continue;
        if (blocks[i].r == 1) {
          Mat big = Mat::Zero(d, d);
          for (int j = 0; j < bsize; ++j) big += f.coeff(i, j) * full_basis.elements[j];
          const_part += (big * blocks[i].fixed_value).trace().real();
          continue;
        }
        if (touched >= 0)
          single = false;
        else
          touched = i;
      }
      if (!single || touched < 0) continue;

      BlockState& bs = blocks[touched];
      Mat big = Mat::Zero(d, d);
      for (int j = 0; j < bsize; ++j) big += f.coeff(touched, j) * full_basis.elements[j];
      Mat reduced = bs.projector.adjoint() * big * bs.projector;
      Eigen::SelfAdjointEigenSolver<Mat> es(reduced);
      double target = raw[ci].target - const_part;
      double lo = es.eigenvalues().minCoeff();
      double hi = es.eigenvalues().maxCoeff();
      double span = std::max({1.0, std::abs(lo), std::abs(hi)});
      if (target > hi + 1e-9 * span || target < lo - 1e-9 * span) return make_infeasible();
      double face_tol = 1e-9 * span;
      bool at_top = std::abs(target - hi) <= face_tol;
      bool at_bottom = std::abs(target - lo) <= face_tol;
      if (!at_top && !at_bottom) continue;

      double pin = at_top ? hi : lo;
      std::vector<int> cols;
      for (int j = 0; j < bs.r; ++j)
        if (std::abs(es.eigenvalues()(j) - pin) <= face_tol) cols.push_back(j);
      Mat sub(bs.r, static_cast<int>(cols.size()));
      for (size_t j = 0; j < cols.size(); ++j) sub.col(j) = es.eigenvectors().col(cols[j]);
      bs.projector = bs.projector * sub;
      bs.r = static_cast<int>(cols.size());
      if (bs.r == 1)
        bs.fixed_value = bs.projector * bs.projector.adjoint();
      else
        bs.rbasis = build_herm_basis(bs.r);
      consumed[ci] = true;
      changed = true;
    }
  }

  // Assign variable offsets.
  int nz = 0;
  for (auto& bs : blocks) {
    if (bs.r == 1) {
      bs.var_offset = -1;
      continue;
    }
    bs.var_offset = nz;
    nz += bs.r * bs.r - 1;
  }

  // Affine forms of objective and remaining constraints.
  RVec obj_a;
  double obj_b;
  functional_affine(model, blocks, full_basis, model.objective, nz, obj_a, obj_b);

  std::vector<InternalConstraint> cons;
  std::vector<RVec> eq_rows;
  std::vector<double> eq_vals;
  for (size_t ci = 0; ci < raw.size(); ++ci) {
    if (consumed[ci]) continue;
    InternalConstraint ic;
    functional_affine(model, blocks, full_basis, raw[ci].c->functional, nz, ic.a, ic.b);
    ic.lower = raw[ci].c->lower;
    ic.upper = raw[ci].c->upper;
    ic.equality = raw[ci].equality;
    ic.target = raw[ci].target;
    double amax = ic.a.size() > 0 ? ic.a.cwiseAbs().maxCoeff() : 0.0;
    if (ic.equality && amax == 0.0) {
      if (std::abs(ic.b - ic.target) > 1e-7) return make_infeasible();
      continue;
    }
    if (!ic.equality && amax == 0.0) {
      if (ic.b < ic.lower - 1e-9 || ic.b > ic.upper + 1e-9) return make_infeasible();
      continue;
    }
    if (ic.equality) {
      eq_rows.push_back(ic.a);
      eq_vals.push_back(ic.target - ic.b);
    } else {
      cons.push_back(std::move(ic));
    }
  }

  // Eliminate equalities: z = z0 + N y.
  RVec z0 = RVec::Zero(nz);
  RMat nullspace = RMat::Identity(nz, nz);
  if (!eq_rows.empty()) {
    RMat e(static_cast<int>(eq_rows.size()), nz);
    RVec rhs(static_cast<int>(eq_rows.size()));
    for (size_t r = 0; r < eq_rows.size(); ++r) {
      e.row(static_cast<int>(r)) = eq_rows[r].transpose();
      rhs(static_cast<int>(r)) = eq_vals[r];
    }
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(e);
    z0 = cod.solve(rhs);
    if ((e * z0 - rhs).cwiseAbs().maxCoeff() > 1e-7 * (1.0 + rhs.cwiseAbs().maxCoeff()))
      return make_infeasible();
    Eigen::FullPivLU<RMat> lu(e);
    lu.setThreshold(1e-10);
    nullspace = lu.kernel();
    if (nullspace.cols() == 1 && nullspace.cwiseAbs().maxCoeff() == 0.0)
      nullspace = RMat::Zero(nz, 0);
  }
  const int ny = static_cast<int>(nullspace.cols());

  // PSD structure over y.
  BarrierProblem phase2;
  phase2.nvars = ny;
  phase2.obj = RVec::Zero(ny);
  {
    RVec folded = nullspace.transpose() * obj_a;
    phase2.obj = model.maximize ? RVec(-folded) : folded;
  }
  for (int i = 0; i < model.n; ++i) {
    const BlockState& bs = blocks[i];
    if (bs.r == 1) continue;
    BarrierProblem::PsdBlock bl;
    const int q = bs.r * bs.r - 1;
    bl.c0 = bs.rbasis.elements[bs.r * bs.r - 1] / std::sqrt(2.0 * bs.r);
    for (int j = 0; j < q; ++j) bl.c0 += z0(bs.var_offset + j) * bs.rbasis.elements[j];
    bl.b.resize(ny);
    for (int m = 0; m < ny; ++m) {
      Mat bm = Mat::Zero(bs.r, bs.r);
      bool any = false;
      for (int j = 0; j < q; ++j) {
        double w = nullspace(bs.var_offset + j, m);
        if (w != 0.0) {
          bm += w * bs.rbasis.elements[j];
          any = true;
        }
      }
      if (any) bl.b[m] = std::move(bm);
    }
    phase2.blocks.push_back(std::move(bl));
  }
  for (const auto& ic : cons) {
    RVec ay = nullspace.transpose() * ic.a;
    double base = ic.b + ic.a.dot(z0);
    if (std::isfinite(ic.lower)) phase2.ineqs.push_back({ay, base - ic.lower});
    if (std::isfinite(ic.upper)) phase2.ineqs.push_back({RVec(-ay), ic.upper - base});
  }

  // Phase 1: minimize the margin s with all barriers shifted by s.
  RVec y = RVec::Zero(ny);
  if (!strictly_feasible(phase2, y, 1e-12)) {
    BarrierProblem phase1;
    phase1.nvars = ny + 1;
    phase1.obj = RVec::Zero(ny + 1);
    phase1.obj(ny) = 1.0;
    for (const auto& bl : phase2.blocks) {
      BarrierProblem::PsdBlock b1;
      b1.c0 = bl.c0;
      b1.b.resize(ny + 1);
      for (int m = 0; m < ny; ++m) b1.b[m] = bl.b[m];
      b1.b[ny] = Mat::Identity(bl.c0.rows(), bl.c0.cols());
      phase1.blocks.push_back(std::move(b1));
    }
    for (const auto& q : phase2.ineqs) {
      RVec a1(ny + 1);
      a1.head(ny) = q.a;
      a1(ny) = 1.0;
      phase1.ineqs.push_back({a1, q.b});
    }
    {
      // Keep s bounded below so the phase-1 objective is proper.
      RVec a1 = RVec::Zero(ny + 1);
      a1(ny) = 1.0;
      phase1.ineqs.push_back({a1, 2.0});
    }

    // Starting margin.
    double worst = 0.0;
    for (const auto& bl : phase2.blocks) {
      Eigen::SelfAdjointEigenSolver<Mat> es(psd_value(bl, y), Eigen::EigenvaluesOnly);
      worst = std::min(worst, es.eigenvalues().minCoeff());
    }
    for (const auto& q : phase2.ineqs) worst = std::min(worst, q.a.dot(y) + q.b);
    RVec v1 = RVec::Zero(ny + 1);
    v1(ny) = -worst + 1.0;

    double t = 1.0;
    double nu = phase1.barrier_order();
    bool ok = false;
    for (int outer = 0; outer < 120; ++outer) {
      center(phase1, v1, t);
      if (v1(ny) < -1e-9) {
        ok = true;
        break;
      }
      if (nu / t < 1e-10) break;
      t *= 10.0;
    }
    if (!ok || v1(ny) >= 0.0) return make_infeasible();
    y = v1.head(ny);
  }

  double gap = follow_path(phase2, y, std::min(eps_sdp * 0.5, 1e-7));

  // Reconstruct the assignment.
  RVec z = z0 + nullspace * y;
  SdpSolution sol;
  sol.duality_gap = gap;
  double worst_clip = 0.0;
  std::vector<DensityOp> out_blocks;
  for (int i = 0; i < model.n; ++i) {
    const BlockState& bs = blocks[i];
    Mat rho;
    if (bs.r == 1) {
      rho = bs.fixed_value;
    } else {
      Mat w = bs.rbasis.elements[bs.r * bs.r - 1] / std::sqrt(2.0 * bs.r);
      for (int j = 0; j + 1 < bs.r * bs.r; ++j) w += z(bs.var_offset + j) * bs.rbasis.elements[j];
      rho = bs.projector * w * bs.projector.adjoint();
    }
    rho = 0.5 * (rho + rho.adjoint().eval());
    // Post-solve projection: clip negative eigenvalues, renormalize the trace.
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    RVec lam = es.eigenvalues().cwiseMax(0.0);
    Mat proj = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    double tr = proj.trace().real();
    if (tr <= 0.0) return make_infeasible();
    proj /= tr;
    worst_clip = std::max(worst_clip, (proj - rho).norm());
    out_blocks.push_back(DensityOp::make(proj));
  }
  sol.projection_shift = worst_clip;
  sol.assignment.blocks = std::move(out_blocks);

  RMat w(model.n, bsize);
  for (int i = 0; i < model.n; ++i)
    for (int j = 0; j < bsize; ++j)
      w(i, j) = (full_basis.elements[j] * sol.assignment.blocks[i].op.m).trace().real();
  sol.objective_value = model.objective.value(w);
  double viol = 0.0;
  for (const auto& c : model.constraints) {
    double v = c.functional.value(w);
    if (std::isfinite(c.lower)) viol = std::max(viol, c.lower - v);
    if (std::isfinite(c.upper)) viol = std::max(viol, v - c.upper);
  }
  sol.max_violation = viol;
  bool converged = gap <= eps_sdp && worst_clip <= 1e-6 && viol <= 1e-6;
  sol.status = converged ? SdpStatus::optimal : SdpStatus::max_iter;
  return sol;
}

double evaluate_on_p1(const CoordinateTensor& tensor, const SdpSolution& solution) {
  return eval_general(tensor, solution.assignment, tensor.k(), tensor.k(), {}, {});
}

std::string dump_model(const SdpModel& model) {
  std::ostringstream os;
  os.precision(17);
  os << "hamlet sdp model v1\n";
  os << "blocks " << model.n << " dim " << model.d << " sense "
     << (model.maximize ? "max" : "min") << "\n";
  auto dump_functional = [&](const LinearFunctional& f) {
    os << " offset " << f.offset << "\n";
    for (int i = 0; i < f.coeff.rows(); ++i)
      for (int j = 0; j < f.coeff.cols(); ++j)
        if (f.coeff(i, j) != 0.0) os << " c " << i << " " << j << " " << f.coeff(i, j) << "\n";
  };
  os << "objective\n";
  dump_functional(model.objective);
  for (size_t c = 0; c < model.constraints.size(); ++c) {
    os << "constraint " << c << " lower " << model.constraints[c].lower << " upper "
       << model.constraints[c].upper << "\n";
    dump_functional(model.constraints[c].functional);
  }
  return os.str();
}

}  // namespace hamlet
