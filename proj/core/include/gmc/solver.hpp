#pragma once

#include <optional>
#include <vector>

#include "gmc/graphs.hpp"
#include "gmc/observations.hpp"
#include "gmc/types.hpp"

namespace gmc {

// Krylov method for the Y-update. Both need only products with the
// (symmetric positive definite) system operator. Conjugate residual
// minimises the residual norm over the Krylov space, so its residual
// sequence is monotone; plain CG minimises the energy norm of the error.
enum class KrylovMethod { kConjugateResidual, kConjugateGradient };

struct SolverConfig {
  double gamma_n = 1.0;  // nuclear norm weight
  double gamma_r = 0.0;  // row-graph Dirichlet weight
  double gamma_c = 0.0;  // column-graph Dirichlet weight
  double rho = 1.0;      // ADMM penalty (initial value when adaptive)
  // Residual balancing: multiply rho by rho_scale when the normalised
  // primal residual exceeds rho_balance times the dual one, divide in the
  // opposite case.
  bool adaptive_rho = true;
  double rho_balance = 10.0;
  double rho_scale = 2.0;
  int max_iter = 500;
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  double cg_tol = 1e-8;
  int cg_max_iter = 200;
  KrylovMethod krylov = KrylovMethod::kConjugateResidual;
  // Start from the observed values with unobserved cells set to the
  // observed mean instead of from zero.
  bool impute_mean_init = false;
  // Keep every inner solve's relative-residual sequence in the report.
  bool record_cg_history = false;

  void Validate() const;
};

// Row and column Laplacians; an absent one contributes nothing.
struct GraphRegularizers {
  std::optional<LaplacianView> rows;
  std::optional<LaplacianView> cols;
};

struct SolverState {
  Matrix x;
  Matrix y;
  Matrix z;
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct TraceRecord {
  int iteration = 0;
  double objective = 0.0;  // evaluated at X^{k+1}
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  Index rank = 0;  // singular values above the threshold
  double rho = 0.0;  // penalty used in this iteration
  int cg_iterations = 0;
  double cg_relative_residual = 0.0;
  bool cg_converged = true;
};

struct SolveReport {
  Matrix recovered;  // final Y
  SolverState state;
  std::vector<TraceRecord> trace;
  std::vector<std::vector<double>> cg_histories;  // only with record_cg_history
  bool converged = false;
  int iterations_used = 0;
  double primal_tolerance = 0.0;
  double dual_tolerance = 0.0;
  double final_rho = 0.0;
};

// ||X||_*.
double nuclear_norm(const Matrix& x);

// gamma_n ||X||_* + 1/2 ||A o (X - M)||^2 + gamma_r/2 ||X||_{D,r}^2
//   + gamma_c/2 ||X||_{D,c}^2.
double objective(const Matrix& x, const SparseObservations& obs,
                 const GraphRegularizers& graphs, const SolverConfig& cfg);

// The differentiable part G of the objective (everything but the nuclear
// term) and its gradient A o (Y - M) + gamma_r L_r Y + gamma_c Y L_c.
double smooth_objective(const Matrix& y, const SparseObservations& obs,
                        const GraphRegularizers& graphs, const SolverConfig& cfg);
Matrix smooth_gradient(const Matrix& y, const SparseObservations& obs,
                       const GraphRegularizers& graphs, const SolverConfig& cfg);

struct SvtResult {
  Matrix x;
  Vector singular_values;  // of the input, descending
  Index rank = 0;          // #{sigma_k > eta}
  double nuclear_norm = 0.0;  // of the result
};

// argmin_X eta ||X||_* + 1/2 ||X - H||_F^2, by soft-thresholding the
// singular values of H.
Matrix svt_prox(const Matrix& h, double eta);
SvtResult svt_prox_detailed(const Matrix& h, double eta);

// Matrix-free operator of the Y-update normal equations,
//   Y -> A o Y + gamma_r L_r Y + gamma_c Y L_c + rho Y,
// which is symmetric positive definite for rho > 0.
class YSystem {
 public:
  YSystem(const SparseObservations& obs, const GraphRegularizers& graphs, double gamma_r,
          double gamma_c, double rho);

  Index rows() const { return mask_.rows(); }
  Index cols() const { return mask_.cols(); }

  void Apply(const Matrix& y, Matrix& out) const;
  Matrix Apply(const Matrix& y) const;
  // A o M + rho H.
  Matrix RightHandSide(const Matrix& h) const;

  double rho() const { return rho_; }
  void set_rho(double rho) { rho_ = rho; }

 private:
  Matrix mask_;
  Matrix masked_values_;
  GraphRegularizers graphs_;
  double gamma_r_;
  double gamma_c_;
  double rho_;
};

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  // Relative residual before the first step and after each step.
  std::vector<double> history;
};

// Solves system(Y) = rhs starting from the contents of y.
KrylovResult krylov_solve(const YSystem& system, const Matrix& rhs, Matrix& y, double tol,
                          int max_iter, KrylovMethod method, bool keep_history = false);

// Y-update for H = X^{k+1} + Z^k / rho, warm-started at warm_start.
Matrix y_subproblem(const SparseObservations& obs, const GraphRegularizers& graphs,
                    const Matrix& h, const SolverConfig& cfg, const Matrix& warm_start,
                    KrylovResult* info = nullptr);

SolveReport admm_solve(const SparseObservations& obs, const GraphRegularizers& graphs,
                       const SolverConfig& cfg, const Matrix* init = nullptr);

struct ClipRange {
  double lo;
  double hi;
};

// Root mean squared error of X against the observed entries, optionally
// clipping X to a rating range first.
double rmse(const Matrix& x, const SparseObservations& obs,
            std::optional<ClipRange> clip = std::nullopt);

}  // namespace gmc
