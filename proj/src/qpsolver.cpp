#include "ftnslp/qpsolver.hpp"

#include <fstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

namespace ftnslp {

double KktResiduals::worst() const {
  return std::max(std::max(stationarity, primal), std::max(dual, complementarity));
}

QPProblem make_qp(MatrixXd Q, VectorXd c, MatrixXd G, VectorXd h) {
  if (Q.rows() != Q.cols()) throw std::invalid_argument("make_qp: Q must be square");
  if (c.size() != Q.rows()) throw std::invalid_argument("make_qp: c dimension mismatch");
  if (G.rows() != h.size() || (G.rows() > 0 && G.cols() != Q.rows()))
    throw std::invalid_argument("make_qp: constraint dimension mismatch");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("make_qp: Q must be symmetric");
  Eigen::LLT<MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("make_qp: Q must be positive definite");
  return QPProblem{std::move(Q), std::move(c), std::move(G), std::move(h)};
}

KktResiduals kkt_residuals(const QPProblem& p, const VectorXd& x, const VectorXd& lambda) {
  KktResiduals r;
  const VectorXd grad = p.Q * x + p.c;
  VectorXd stat = grad;
  if (p.constraints() > 0) stat += p.G.transpose() * lambda;
  r.stationarity = stat.template lpNorm<Eigen::Infinity>() /
                   (1.0 + grad.template lpNorm<Eigen::Infinity>());
  if (p.constraints() > 0) {
    const VectorXd slack = p.h - p.G * x;
    const double hs = 1.0 + p.h.cwiseAbs().maxCoeff();
    r.primal = (-slack).cwiseMax(0.0).maxCoeff() / hs;
    r.dual = (-lambda).cwiseMax(0.0).maxCoeff() / (1.0 + lambda.cwiseAbs().maxCoeff());
    r.complementarity = lambda.cwiseProduct(slack).cwiseAbs().maxCoeff() /
                        (1.0 + std::abs(0.5 * x.dot(p.Q * x) + p.c.dot(x)));
  }
  return r;
}

QPSolution solve(const QPProblem& p, const SolveOptions& opts) {
  const Index n = p.vars();
  const Index m = p.constraints();
  QPSolution sol;

  Eigen::LLT<MatrixXd> llt_q(p.Q);
  if (llt_q.info() != Eigen::Success) throw std::invalid_argument("solve: Q not positive definite");

  auto objective = [&](const VectorXd& x) { return 0.5 * x.dot(p.Q * x) + p.c.dot(x); };

  if (m == 0) {
    sol.x = llt_q.solve(-p.c);
    sol.lambda.resize(0);
    sol.kkt = kkt_residuals(p, sol.x, sol.lambda);
    sol.status = SolveStatus::Optimal;
    sol.objective = objective(sol.x);
    sol.objective_trace.push_back(sol.objective);
    sol.primal_trace.push_back(0.0);
    return sol;
  }

  VectorXd x = llt_q.solve(-p.c);
  VectorXd resid0 = p.G * x - p.h;
  if (resid0.maxCoeff() <= 0.0) {
    // The unconstrained minimum already satisfies every constraint.
    sol.x = x;
    sol.lambda = VectorXd::Zero(m);
    sol.kkt = kkt_residuals(p, sol.x, sol.lambda);
    sol.status = SolveStatus::Optimal;
    sol.objective = objective(x);
    sol.objective_trace.push_back(sol.objective);
    sol.primal_trace.push_back(0.0);
    return sol;
  }
  VectorXd s = (resid0.array() > -1.0).select(resid0.array() + 2.0, -resid0.array()).matrix();
  VectorXd lambda = VectorXd::Ones(m);

  MatrixXd kkt(n, n);
  VectorXd dx(n), ds(m), dlam(m), dx_cc(n), ds_cc(m), dlam_cc(m);

  auto step_len = [](const VectorXd& v, const VectorXd& dv) {
    double a = 1.0;
    for (Index i = 0; i < v.size(); ++i)
      if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
  };

  for (int it = 0; it < opts.max_iter; ++it) {
    const VectorXd r_dual = p.Q * x + p.c + p.G.transpose() * lambda;
    const VectorXd r_prim = p.G * x + s - p.h;
    const double mu = s.dot(lambda) / double(m);

    sol.objective_trace.push_back(objective(x));
    sol.primal_trace.push_back((p.G * x - p.h).cwiseMax(0.0).template lpNorm<Eigen::Infinity>());
    sol.kkt = kkt_residuals(p, x, lambda);
    const double comp = s.cwiseProduct(lambda).cwiseAbs().maxCoeff() /
                        (1.0 + std::abs(objective(x)));
    if (sol.kkt.stationarity < opts.tol &&
        r_prim.template lpNorm<Eigen::Infinity>() / (1.0 + p.h.cwiseAbs().maxCoeff()) < opts.tol &&
        comp < opts.tol) {
      sol.x = x;
      sol.lambda = lambda;
      sol.status = SolveStatus::Optimal;
      sol.iterations = it;
      sol.objective = objective(x);
      sol.kkt = kkt_residuals(p, x, lambda);
      return sol;
    }

    // Dual blow-up while the iterate still violates the polyhedron signals
    // emptiness; the slack-form residual would misfire on ill-conditioned
    // feasible problems, so the true violation is what counts.
    if (lambda.template lpNorm<Eigen::Infinity>() > 1e10 &&
        sol.primal_trace.back() > std::sqrt(opts.tol) * (1.0 + p.h.cwiseAbs().maxCoeff())) {
      sol.x = x;
      sol.lambda = lambda;
      sol.status = SolveStatus::Infeasible;
      sol.iterations = it;
      sol.objective = objective(x);
      return sol;
    }

    const VectorXd d = lambda.cwiseQuotient(s);
    kkt = p.Q;
    kkt.diagonal().array() += opts.reg;
    const MatrixXd gw = d.cwiseSqrt().asDiagonal() * p.G;
    kkt.selfadjointView<Eigen::Lower>().rankUpdate(gw.transpose());
    Eigen::LLT<MatrixXd> llt(kkt.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) {
      // Retry once with a heavier shift before giving up on this factorization.
      kkt.diagonal().array() += 1e-8;
      llt.compute(kkt.selfadjointView<Eigen::Lower>());
      if (llt.info() != Eigen::Success) break;
    }

    // Affine (predictor) direction.
    VectorXd rc = s.cwiseProduct(lambda);
    VectorXd rhs = -r_dual + p.G.transpose() * (rc.cwiseQuotient(s) - d.cwiseProduct(r_prim));
    dx = llt.solve(rhs);
    ds = -r_prim - p.G * dx;
    dlam = -(rc + lambda.cwiseProduct(ds)).cwiseQuotient(s);

    const double a_p_aff = step_len(s, ds);
    const double a_d_aff = step_len(lambda, dlam);
    const double mu_aff = (s + a_p_aff * ds).dot(lambda + a_d_aff * dlam) / double(m);
    const double sigma = std::pow(mu_aff / mu, 3.0);

    // Corrector direction reusing the factorization.
    rc = s.cwiseProduct(lambda) + ds.cwiseProduct(dlam) - VectorXd::Constant(m, sigma * mu);
    rhs = -r_dual + p.G.transpose() * (rc.cwiseQuotient(s) - d.cwiseProduct(r_prim));
    dx_cc = llt.solve(rhs);
    ds_cc = -r_prim - p.G * dx_cc;
    dlam_cc = -(rc + lambda.cwiseProduct(ds_cc)).cwiseQuotient(s);

    const double a_p = std::min(1.0, 0.99 * step_len(s, ds_cc));
    const double a_d = std::min(1.0, 0.99 * step_len(lambda, dlam_cc));
    x += a_p * dx_cc;
    s += a_p * ds_cc;
    lambda += a_d * dlam_cc;
    sol.iterations = it + 1;
  }

  sol.x = x;
  sol.lambda = lambda;
  sol.kkt = kkt_residuals(p, x, lambda);
  sol.objective = objective(x);
  if (sol.status != SolveStatus::Infeasible) {
    if (lambda.template lpNorm<Eigen::Infinity>() > 1e10 &&
        (p.G * x - p.h).cwiseMax(0.0).template lpNorm<Eigen::Infinity>() > std::sqrt(opts.tol))
      sol.status = SolveStatus::Infeasible;
    else
      sol.status = SolveStatus::MaxIter;
  }
  return sol;
}

QPProblem embed_complex(const MatrixXcd& gamma, const std::vector<ComplexHalfplane>& planes) {
  const Index nc = gamma.rows();
  if (gamma.cols() != nc) throw std::invalid_argument("embed_complex: Gamma must be square");
  const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
  if ((gamma - gamma.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::invalid_argument("embed_complex: Gamma must be Hermitian");

  MatrixXd q(2 * nc, 2 * nc);
  q.topLeftCorner(nc, nc) = gamma.real();
  q.topRightCorner(nc, nc) = -gamma.imag();
  q.bottomLeftCorner(nc, nc) = gamma.imag();
  q.bottomRightCorner(nc, nc) = gamma.real();
  q = 0.5 * (q + q.transpose()).eval();  // drop Hermitian round-off skew

  MatrixXd g(planes.size(), 2 * nc);
  VectorXd h(planes.size());
  for (size_t i = 0; i < planes.size(); ++i) {
    const auto& plane = planes[i];
    if (plane.normal.size() != nc) throw std::invalid_argument("embed_complex: plane dimension mismatch");
    // Re(a^H d) = [Re a; Im a]^T [Re d; Im d] >= bound  ->  -[Re a; Im a] x <= -bound
    g.row(Index(i)).head(nc) = -plane.normal.real().transpose();
    g.row(Index(i)).tail(nc) = -plane.normal.imag().transpose();
    h[Index(i)] = -plane.bound;
  }
  return make_qp(std::move(q), VectorXd::Zero(2 * nc), std::move(g), std::move(h));
}

void save_problem(const std::string& path, const QPProblem& p, const QPSolution* sol) {
  nlohmann::json j;
  auto dump_mat = [](const MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  auto dump_vec = [](const VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
  };
  j["Q"] = dump_mat(p.Q);
  j["c"] = dump_vec(p.c);
  j["G"] = dump_mat(p.G);
  j["h"] = dump_vec(p.h);
  if (sol) {
    j["solution"]["x"] = dump_vec(sol->x);
    j["solution"]["lambda"] = dump_vec(sol->lambda);
    j["solution"]["objective"] = sol->objective;
    j["solution"]["status"] = sol->status == SolveStatus::Optimal     ? "optimal"
                              : sol->status == SolveStatus::Infeasible ? "infeasible"
                                                                       : "max_iter";
    j["solution"]["kkt"] = {{"stationarity", sol->kkt.stationarity},
                            {"primal", sol->kkt.primal},
                            {"dual", sol->kkt.dual},
                            {"complementarity", sol->kkt.complementarity}};
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_problem: cannot open " + path);
  out << j.dump(2) << '\n';
}

QPProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_problem: cannot open " + path);
  nlohmann::json j;
  in >> j;
  auto read_mat = [](const nlohmann::json& rows) {
    const Index nr = Index(rows.size());
    const Index nc = nr > 0 ? Index(rows[0].size()) : 0;
    MatrixXd m(nr, nc);
    for (Index r = 0; r < nr; ++r)
      for (Index c = 0; c < nc; ++c) m(r, c) = rows[size_t(r)][size_t(c)].get<double>();
    return m;
  };
  auto read_vec = [](const nlohmann::json& vals) {
    VectorXd v(vals.size());
    for (Index i = 0; i < v.size(); ++i) v[i] = vals[size_t(i)].get<double>();
    return v;
  };
  MatrixXd g = j.contains("G") ? read_mat(j["G"]) : MatrixXd();
  VectorXd h = j.contains("h") ? read_vec(j["h"]) : VectorXd();
  MatrixXd q = read_mat(j.at("Q"));
  if (g.size() > 0 && g.cols() != q.cols())
    throw std::runtime_error("load_problem: G column count mismatch");
  if (g.rows() == 0) g.resize(0, q.cols());
  return make_qp(std::move(q), read_vec(j.at("c")), std::move(g), std::move(h));
}

}  // namespace ftnslp
