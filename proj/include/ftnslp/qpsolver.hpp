#pragma once

#include <string>
#include <vector>

#include "ftnslp/types.hpp"

namespace ftnslp {

/// Strictly convex quadratic program
///   minimize 1/2 x^T Q x + c^T x  subject to  G x <= h,
/// with Q symmetric positive definite.
struct QPProblem {
  MatrixXd Q;
  VectorXd c;
  MatrixXd G;
  VectorXd h;

  Index vars() const { return Q.rows(); }
  Index constraints() const { return G.rows(); }
};

/// Validates symmetry (1e-10) and positive definiteness, then packs the problem.
QPProblem make_qp(MatrixXd Q, VectorXd c, MatrixXd G, VectorXd h);

enum class SolveStatus { Optimal, Infeasible, MaxIter };

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double worst() const;
};

struct QPSolution {
  VectorXd x;
  VectorXd lambda;
  SolveStatus status = SolveStatus::MaxIter;
  KktResiduals kkt;
  int iterations = 0;
  double objective = 0.0;
  std::vector<double> objective_trace;  // one entry per interior-point iterate
  std::vector<double> primal_trace;     // max constraint violation per iterate
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 60;
  double reg = 1e-10;  // static KKT regularization, excluded from residuals
};

/// Mehrotra predictor-corrector primal-dual interior-point solve.
QPSolution solve(const QPProblem& p, const SolveOptions& opts = {});

/// Relative KKT residuals of a candidate primal-dual pair, computed from the
/// true problem data (the regularization plays no part here).
KktResiduals kkt_residuals(const QPProblem& p, const VectorXd& x, const VectorXd& lambda);

/// Complex half-plane Re(normal^H d) >= bound.
struct ComplexHalfplane {
  VectorXcd normal;
  double bound = 0.0;
};

/// Real embedding of min d^H Gamma d over complex half-planes: variables
/// [Re d; Im d], Q = [[Re G, -Im G], [Im G, Re G]], one real row per plane.
QPProblem embed_complex(const MatrixXcd& gamma, const std::vector<ComplexHalfplane>& planes);

/// Problem archive for external cross-validation (JSON).
void save_problem(const std::string& path, const QPProblem& p, const QPSolution* sol = nullptr);
QPProblem load_problem(const std::string& path);

}  // namespace ftnslp
