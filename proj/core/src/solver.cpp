#include "gmc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gmc {

void SolverConfig::Validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("solver config: " + what); };
  if (!(gamma_n >= 0.0) || !std::isfinite(gamma_n)) fail("gamma_n must be >= 0");
  if (!(gamma_r >= 0.0) || !std::isfinite(gamma_r)) fail("gamma_r must be >= 0");
  if (!(gamma_c >= 0.0) || !std::isfinite(gamma_c)) fail("gamma_c must be >= 0");
  if (!(rho > 0.0) || !std::isfinite(rho)) fail("rho must be > 0");
  if (max_iter < 1) fail("max_iter must be >= 1");
  if (!(tol_abs >= 0.0) || !(tol_rel >= 0.0)) fail("tolerances must be >= 0");
  if (!(cg_tol > 0.0)) fail("cg_tol must be > 0");
  if (cg_max_iter < 1) fail("cg_max_iter must be >= 1");
  if (adaptive_rho && !(rho_balance > 1.0 && rho_scale > 1.0)) {
    fail("rho_balance and rho_scale must be > 1");
  }
}

namespace {

void CheckShapes(const SparseObservations& obs, const GraphRegularizers& graphs,
                 const char* op) {
  if (graphs.rows && graphs.rows->dim() != obs.rows()) {
    throw DimensionError(std::string(op) + ": row graph has " +
                         std::to_string(graphs.rows->dim()) + " vertices but observations are " +
                         shape_string(obs.rows(), obs.cols()));
  }
  if (graphs.cols && graphs.cols->dim() != obs.cols()) {
    throw DimensionError(std::string(op) + ": column graph has " +
                         std::to_string(graphs.cols->dim()) +
                         " vertices but observations are " + shape_string(obs.rows(), obs.cols()));
  }
}

void CheckMatrix(const Matrix& x, const SparseObservations& obs, const char* op) {
  if (x.rows() != obs.rows() || x.cols() != obs.cols()) {
    throw DimensionError(std::string(op) + ": matrix is " + shape_string(x.rows(), x.cols()) +
                         " but observations are " + shape_string(obs.rows(), obs.cols()));
  }
}

double Frob(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

double DataTerm(const Matrix& x, const SparseObservations& obs) {
  double acc = 0.0;
  for (const Entry& e : obs.entries()) {
    const double r = x(e.i, e.j) - e.value;
    acc += r * r;
  }
  return 0.5 * acc;
}

double GraphTerms(const Matrix& x, const GraphRegularizers& graphs, const SolverConfig& cfg) {
  double acc = 0.0;
  if (graphs.rows && cfg.gamma_r != 0.0) {
    acc += 0.5 * cfg.gamma_r * dirichlet_energy(*graphs.rows, x, Side::kLeft);
  }
  if (graphs.cols && cfg.gamma_c != 0.0) {
    acc += 0.5 * cfg.gamma_c * dirichlet_energy(*graphs.cols, x, Side::kRight);
  }
  return acc;
}

}  // namespace

double nuclear_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues().sum();
}

double smooth_objective(const Matrix& y, const SparseObservations& obs,
                        const GraphRegularizers& graphs, const SolverConfig& cfg) {
  CheckMatrix(y, obs, "smooth_objective");
  CheckShapes(obs, graphs, "smooth_objective");
  return DataTerm(y, obs) + GraphTerms(y, graphs, cfg);
}

double objective(const Matrix& x, const SparseObservations& obs,
                 const GraphRegularizers& graphs, const SolverConfig& cfg) {
  const double smooth = smooth_objective(x, obs, graphs, cfg);
  const double nuc = cfg.gamma_n != 0.0 ? cfg.gamma_n * nuclear_norm(x) : 0.0;
  return nuc + smooth;
}

Matrix smooth_gradient(const Matrix& y, const SparseObservations& obs,
                       const GraphRegularizers& graphs, const SolverConfig& cfg) {
  CheckMatrix(y, obs, "smooth_gradient");
  CheckShapes(obs, graphs, "smooth_gradient");
  Matrix grad = Matrix::Zero(y.rows(), y.cols());
  for (const Entry& e : obs.entries()) grad(e.i, e.j) = y(e.i, e.j) - e.value;
  if (graphs.rows && cfg.gamma_r != 0.0) {
    grad.noalias() += cfg.gamma_r * laplacian_apply(*graphs.rows, y, Side::kLeft);
  }
  if (graphs.cols && cfg.gamma_c != 0.0) {
    grad.noalias() += cfg.gamma_c * laplacian_apply(*graphs.cols, y, Side::kRight);
  }
  return grad;
}

SvtResult svt_prox_detailed(const Matrix& h, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("svt_prox: threshold must be finite and >= 0");
  }
  if (!h.allFinite()) throw NumericalError("svt_prox: input has non-finite entries");
  SvtResult out;
  if (h.size() == 0) {
    out.x = h;
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.singular_values = svd.singularValues();
  const Vector& sigma = out.singular_values;
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > eta) ++rank;
  out.rank = rank;
  if (rank == 0) {
    out.x = Matrix::Zero(h.rows(), h.cols());
    return out;
  }
  const Vector shrunk = (sigma.head(rank).array() - eta).matrix();
  out.nuclear_norm = shrunk.sum();
  out.x.noalias() = svd.matrixU().leftCols(rank) * shrunk.asDiagonal() *
                    svd.matrixV().leftCols(rank).transpose();
  return out;
}

Matrix svt_prox(const Matrix& h, double eta) {
  if (eta == 0.0) {
    if (!h.allFinite()) throw NumericalError("svt_prox: input has non-finite entries");
    return h;
  }
  return svt_prox_detailed(h, eta).x;
}

YSystem::YSystem(const SparseObservations& obs, const GraphRegularizers& graphs, double gamma_r,
                 double gamma_c, double rho)
    : mask_(obs.Mask()),
      masked_values_(obs.MaskedValues()),
      graphs_(graphs),
      gamma_r_(gamma_r),
      gamma_c_(gamma_c),
      rho_(rho) {
  CheckShapes(obs, graphs, "y_subproblem");
  if (!(rho > 0.0)) throw std::invalid_argument("y_subproblem: rho must be > 0");
  if (gamma_r_ == 0.0) graphs_.rows.reset();
  if (gamma_c_ == 0.0) graphs_.cols.reset();
}

void YSystem::Apply(const Matrix& y, Matrix& out) const {
  if (y.rows() != rows() || y.cols() != cols()) {
    throw DimensionError("y_subproblem: operand is " + shape_string(y.rows(), y.cols()) +
                         ", expected " + shape_string(rows(), cols()));
  }
  out.resize(y.rows(), y.cols());
  out.array() = (mask_.array() + rho_) * y.array();
  if (graphs_.rows) {
    Matrix ly;
    laplacian_apply_into(*graphs_.rows, y, Side::kLeft, ly);
    out.noalias() += gamma_r_ * ly;
  }
  if (graphs_.cols) {
    Matrix yl;
    laplacian_apply_into(*graphs_.cols, y, Side::kRight, yl);
    out.noalias() += gamma_c_ * yl;
  }
}

Matrix YSystem::Apply(const Matrix& y) const {
  Matrix out;
  Apply(y, out);
  return out;
}

Matrix YSystem::RightHandSide(const Matrix& h) const {
  return masked_values_ + rho_ * h;
}

KrylovResult krylov_solve(const YSystem& system, const Matrix& rhs, Matrix& y, double tol,
                          int max_iter, KrylovMethod method, bool keep_history) {
  KrylovResult result;
  if (y.rows() != system.rows() || y.cols() != system.cols()) {
    y = Matrix::Zero(system.rows(), system.cols());
  }
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    y.setZero();
    result.converged = true;
    if (keep_history) result.history.push_back(0.0);
    return result;
  }

  Matrix r = rhs - system.Apply(y);
  double rel = r.norm() / rhs_norm;
  if (keep_history) result.history.push_back(rel);
  Matrix p = r;
  Matrix ap;

  if (method == KrylovMethod::kConjugateGradient) {
    double rr = r.squaredNorm();
    while (rel > tol && result.iterations < max_iter) {
      system.Apply(p, ap);
      const double pap = Frob(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rr / pap;
      y.noalias() += alpha * p;
      r.noalias() -= alpha * ap;
      ++result.iterations;
      const double rr_next = r.squaredNorm();
      rel = std::sqrt(rr_next) / rhs_norm;
      if (keep_history) result.history.push_back(rel);
      p = r + (rr_next / rr) * p;
      rr = rr_next;
    }
  } else {
    Matrix ar = system.Apply(r);
    ap = ar;
    double rar = Frob(r, ar);
    while (rel > tol && result.iterations < max_iter) {
      const double apap = ap.squaredNorm();
      if (!(apap > 0.0)) break;
      // Exact line minimisation of ||r - alpha Ap|| keeps ||r|| monotone
      // even when rounding erodes conjugacy.
      const double alpha = Frob(r, ap) / apap;
      y.noalias() += alpha * p;
      r.noalias() -= alpha * ap;
      ++result.iterations;
      rel = r.norm() / rhs_norm;
      if (keep_history) result.history.push_back(rel);
      if (rel <= tol) break;
      system.Apply(r, ar);
      const double rar_next = Frob(r, ar);
      const double beta = rar_next / rar;
      rar = rar_next;
      p = r + beta * p;
      ap = ar + beta * ap;
    }
  }
  result.relative_residual = rel;
  result.converged = rel <= tol;
  return result;
}

Matrix y_subproblem(const SparseObservations& obs, const GraphRegularizers& graphs,
                    const Matrix& h, const SolverConfig& cfg, const Matrix& warm_start,
                    KrylovResult* info) {
  CheckMatrix(h, obs, "y_subproblem");
  YSystem system(obs, graphs, cfg.gamma_r, cfg.gamma_c, cfg.rho);
  Matrix y = warm_start;
  KrylovResult res = krylov_solve(system, system.RightHandSide(h), y, cfg.cg_tol,
                                  cfg.cg_max_iter, cfg.krylov, cfg.record_cg_history);
  if (info) *info = std::move(res);
  return y;
}

SolveReport admm_solve(const SparseObservations& obs, const GraphRegularizers& graphs,
                       const SolverConfig& cfg, const Matrix* init) {
  cfg.Validate();
  CheckShapes(obs, graphs, "admm_solve");
  const Index m = obs.rows();
  const Index n = obs.cols();

  SolveReport report;
  SolverState& s = report.state;
  if (init) {
    CheckMatrix(*init, obs, "admm_solve (init)");
    s.y = *init;
  } else if (cfg.impute_mean_init && !obs.empty()) {
    double mean = 0.0;
    for (const Entry& e : obs.entries()) mean += e.value;
    mean /= static_cast<double>(obs.size());
    s.y = Matrix::Constant(m, n, mean);
    for (const Entry& e : obs.entries()) s.y(e.i, e.j) = e.value;
  } else {
    s.y = Matrix::Zero(m, n);
  }
  s.x = s.y;
  s.z = Matrix::Zero(m, n);

  YSystem system(obs, graphs, cfg.gamma_r, cfg.gamma_c, cfg.rho);
  const Matrix data_rhs = obs.MaskedValues();
  const double sqrt_cells = std::sqrt(static_cast<double>(m) * static_cast<double>(n));
  double rho = cfg.rho;

  Matrix h(m, n);
  Matrix y_prev(m, n);
  for (int k = 0; k < cfg.max_iter; ++k) {
    const double inv_rho = 1.0 / rho;

    // X-update: prox of the nuclear norm.
    h = s.y - inv_rho * s.z;
    double nuclear = 0.0;
    Index rank = std::min(m, n);
    if (cfg.gamma_n > 0.0) {
      SvtResult svt = svt_prox_detailed(h, cfg.gamma_n * inv_rho);
      s.x = std::move(svt.x);
      nuclear = svt.nuclear_norm;
      rank = svt.rank;
    } else {
      s.x = h;
    }

    // Y-update: graph-regularised least squares, warm-started at Y^k.
    y_prev = s.y;
    h = s.x + inv_rho * s.z;
    const Matrix rhs = data_rhs + rho * h;
    KrylovResult cg = krylov_solve(system, rhs, s.y, cfg.cg_tol, cfg.cg_max_iter, cfg.krylov,
                                   cfg.record_cg_history);

    // Dual ascent.
    s.z.noalias() += rho * (s.x - s.y);

    s.iteration = k + 1;
    s.primal_residual = (s.x - s.y).norm();
    s.dual_residual = rho * (s.y - y_prev).norm();
    if (!std::isfinite(s.primal_residual) || !std::isfinite(s.dual_residual) ||
        !s.y.allFinite()) {
      std::ostringstream msg;
      msg << "admm_solve: non-finite iterate at iteration " << s.iteration
          << " (rho = " << rho << ", gamma_n = " << cfg.gamma_n << ")";
      throw NumericalError(msg.str());
    }

    TraceRecord rec;
    rec.iteration = s.iteration;
    rec.objective = cfg.gamma_n * nuclear + DataTerm(s.x, obs) + GraphTerms(s.x, graphs, cfg);
    rec.primal_residual = s.primal_residual;
    rec.dual_residual = s.dual_residual;
    rec.rank = rank;
    rec.rho = rho;
    rec.cg_iterations = cg.iterations;
    rec.cg_relative_residual = cg.relative_residual;
    rec.cg_converged = cg.converged;
    report.trace.push_back(rec);
    if (cfg.record_cg_history) report.cg_histories.push_back(std::move(cg.history));

    report.primal_tolerance =
        cfg.tol_abs * sqrt_cells + cfg.tol_rel * std::max(s.x.norm(), s.y.norm());
    report.dual_tolerance = cfg.tol_abs * sqrt_cells + cfg.tol_rel * s.z.norm();
    if (s.primal_residual <= report.primal_tolerance &&
        s.dual_residual <= report.dual_tolerance) {
      report.converged = true;
      break;
    }

    if (cfg.adaptive_rho) {
      const double primal = s.primal_residual / report.primal_tolerance;
      const double dual = s.dual_residual / report.dual_tolerance;
      if (primal > cfg.rho_balance * dual) {
        rho *= cfg.rho_scale;
      } else if (dual > cfg.rho_balance * primal) {
        rho /= cfg.rho_scale;
      }
      if (rho != system.rho()) system.set_rho(rho);
    }
  }
  report.final_rho = rho;
  report.iterations_used = s.iteration;
  report.recovered = s.y;
  return report;
}

double rmse(const Matrix& x, const SparseObservations& obs, std::optional<ClipRange> clip) {
  if (obs.empty()) throw std::invalid_argument("rmse: no entries to evaluate");
  CheckMatrix(x, obs, "rmse");
  double acc = 0.0;
  for (const Entry& e : obs.entries()) {
    double v = x(e.i, e.j);
    if (clip) v = std::clamp(v, clip->lo, clip->hi);
    const double r = v - e.value;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(obs.size()));
}

}  // namespace gmc
