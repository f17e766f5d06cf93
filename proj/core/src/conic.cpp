#include "sivo/conic.hpp"

#include "kkt_system.hpp"
#include "sivo/errors.hpp"
#include "sivo/nnls.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace sivo {

namespace {

// Calls f on every k-subset of {0..r-1} in lexicographic order.
template <typename F>
void for_each_subset(int r, int k, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  if (k > r) return;
  for (;;) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == r - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

void push_unique(std::vector<Vector>& out, Vector v) {
  v.normalize();
  if (std::none_of(out.begin(), out.end(), [&](const Vector& u) { return (u - v).norm() <= 1e-10; }))
    out.push_back(std::move(v));
}

}  // namespace

PolyCone::PolyCone(int q, std::vector<Vector> generators) : q_(q) {
  if (q < 1 || q > kMaxDim)
    throw PreconditionError("polar enumeration supports cone dimension 1.." + std::to_string(kMaxDim) + ", got " +
                            std::to_string(q));
  for (auto& g : generators) {
    if (g.size() != q) throw PreconditionError("cone generator has the wrong dimension");
    if (g.norm() > 0.0) gens_.push_back(std::move(g));
  }

  const Eigen::Index r = static_cast<Eigen::Index>(gens_.size());
  Matrix G(r, q);
  for (Eigen::Index k = 0; k < r; ++k) G.row(k) = gens_[static_cast<std::size_t>(k)].transpose();

  int d = 0;
  Matrix V = Matrix::Identity(q, q);
  if (r > 0) {
    Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-12 * std::max(1.0, smax)) ++d;
    V = svd.matrixV();
  }

  // lineality space of K+ is the orthogonal complement of span K
  for (int j = d; j < q; ++j) {
    push_unique(dual_, V.col(j));
    push_unique(dual_, -V.col(j));
  }

  // extreme rays of {z : H z >= 0} inside span K, H = G B
  if (d > 0) {
    const Matrix B = V.leftCols(d);
    const Matrix H = G * B;
    const double hscale = H.norm();
    for_each_subset(static_cast<int>(r), d - 1, [&](const std::vector<int>& rows) {
      Vector z;
      if (d == 1) {
        z = Vector::Ones(1);
      } else {
        Matrix S(d - 1, d);
        for (int i = 0; i < d - 1; ++i) S.row(i) = H.row(rows[static_cast<std::size_t>(i)]);
        Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv[d - 2] <= 1e-12 * std::max(1.0, sv[0])) return;  // rows not independent
        z = svd.matrixV().col(d - 1);
      }
      for (double sign : {1.0, -1.0}) {
        const Vector zz = sign * z;
        if ((H * zz).minCoeff() >= -1e-12 * std::max(1.0, hscale)) push_unique(dual_, B * zz);
      }
    });
  }

  // lexicographically descending, so the order does not depend on the SVD
  std::sort(dual_.begin(), dual_.end(), [](const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) > 1e-12) return a[i] > b[i];
    }
    return false;
  });
}

bool PolyCone::contains_negative(const Vector& y, double tol) const {
  if (y.size() != q_) throw PreconditionError("vector has the wrong dimension for the cone");
  if (gens_.empty()) return y.norm() <= tol;
  Matrix G(q_, static_cast<Eigen::Index>(gens_.size()));
  for (std::size_t k = 0; k < gens_.size(); ++k) G.col(static_cast<Eigen::Index>(k)) = gens_[k];
  const NnlsResult r = nnls(G, -y);
  return r.residual_norm <= tol * (1.0 + y.norm());
}

bool PolyCone::in_dual(const Vector& y, double tol) const {
  return std::all_of(gens_.begin(), gens_.end(), [&](const Vector& k) { return y.dot(k) >= -tol * (1.0 + y.norm()); });
}

Problem scalarize_cone_problem(const ConeConstrainedProblem& cc) {
  if (static_cast<int>(cc.g.size()) != cc.cone.dim())
    throw PreconditionError("cone constraint needs one component per cone dimension");
  std::vector<ConstraintFamily> fams;
  if (!cc.cone.dual_generators().empty()) {
    for (const auto& gj : cc.g)
      if (gj.num_params() != 0) throw PreconditionError("cone constraint components must not use parameters");
    fams.push_back({"g_s", Expr::parameter_weighted_sum(cc.g, cc.cone.dim()),
                    IndexDomain::finite(cc.cone.dual_generators())});
  }
  return Problem(cc.n, cc.objectives, std::move(fams), cc.omega);
}

Vector recover_zeta(const MultiplierMu& mu, const PolyCone& cone) {
  Vector zeta = Vector::Zero(cone.dim());
  for (const auto& e : mu.entries) {
    if (e.index.family != 0 || e.index.point >= cone.dual_generators().size())
      throw PreconditionError("multiplier is not supported on the dual generators");
    if (e.weight < 0.0) throw PreconditionError("multiplier must be nonnegative");
    zeta += e.weight * cone.dual_generators()[e.index.point];
  }
  if (!cone.in_dual(zeta)) throw Error("recovered zeta is not in the dual cone");
  return zeta;
}

double frobenius_dot(const Matrix& A, const Matrix& B) { return A.cwiseProduct(B).sum(); }

Matrix SdpData::g(const Vector& x) const {
  if (x.size() != n()) throw PreconditionError("point has the wrong dimension for the matrix constraint");
  Matrix out = F[0];
  for (int i = 1; i <= n(); ++i) out += x[i - 1] * F[static_cast<std::size_t>(i)];
  return out;
}

void SdpData::validate() const {
  if (p < 1) throw PreconditionError("matrix size p must be positive");
  if (F.size() < 2) throw PreconditionError("matrix constraint needs F0 and at least one F_i");
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i].rows() != p || F[i].cols() != p)
      throw PreconditionError("F" + std::to_string(i) + " is not " + std::to_string(p) + "x" + std::to_string(p));
    if ((F[i] - F[i].transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw PreconditionError("F" + std::to_string(i) + " is not symmetric");
  }
}

namespace {

bool is_diagonal(const Matrix& M) {
  const double scale = 1.0 + M.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      if (i != j && std::abs(M(i, j)) > 1e-14 * scale) return false;
  return true;
}

Matrix project_psd(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  const Vector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SdpCertificate sdp_check_kkt(const Problem& base, const SdpData& sd, const Vector& xbar, const Vector& xi,
                             const SdpOptions& opts) {
  const Tolerances& tol = opts.tol;
  sd.validate();
  if (!base.constraints().empty()) throw PreconditionError("the base problem of a matrix constraint must have no constraint families");
  if (base.n() != sd.n()) throw PreconditionError("matrix data has " + std::to_string(sd.n()) + " variables, problem has " + std::to_string(base.n()));
  if (xbar.size() != base.n()) throw PreconditionError("point has the wrong dimension");
  if (xi.size() != base.m() || !(xi.minCoeff() >= 0.0)) throw PreconditionError("xi must be a nonnegative vector with one entry per objective");
  if (!base.omega().contains(xbar, tol.feasibility)) throw PreconditionError("point is not in Omega");

  const int n = base.n();
  const Matrix gx = sd.g(xbar);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gx);
  SdpCertificate out;
  out.g_max_eig = eig.eigenvalues().maxCoeff();
  if (out.g_max_eig > tol.feasibility)
    throw PreconditionError("point is infeasible: largest eigenvalue of g is " + std::to_string(out.g_max_eig));

  detail::KktSystem sys;
  sys.n = n;
  sys.anchor = xbar;
  sys.xi = xi;
  for (const auto& f : base.objectives()) sys.f_sets.push_back(f.clarke_subdiff(xbar, Vector(), tol.activity));
  sys.normal_generators = base.omega().normal_cone(xbar, tol.activity).generators;
  if (opts.lambda) {
    if (opts.lambda->size() != base.m() || opts.lambda->minCoeff() < 0.0 || std::abs(opts.lambda->sum() - 1.0) > 1e-9)
      throw PreconditionError("lambda must be nonnegative, sum to 1 and have one entry per objective");
    sys.lambda = *opts.lambda;
  }
  const ResidualOptions ropts{tol.certificate, tol.max_iter};

  auto lambda_dot_F = [&](const Matrix& L) {
    Vector a(n);
    for (int i = 1; i <= n; ++i) a[i - 1] = frobenius_dot(L, sd.F[static_cast<std::size_t>(i)]);
    return a;
  };
  auto finish = [&](SdpCertificate& r) {
    Eigen::SelfAdjointEigenSolver<Matrix> le(0.5 * (r.Lambda + r.Lambda.transpose()));
    r.lambda_min_eig = le.eigenvalues().minCoeff();
    r.complementarity = frobenius_dot(r.Lambda, gx);
  };

  if (opts.Lambda) {
    const Matrix& L = *opts.Lambda;
    if (L.rows() != sd.p || L.cols() != sd.p) throw PreconditionError("Lambda has the wrong size");
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw PreconditionError("Lambda is not symmetric");
    sys.fixed = lambda_dot_F(L);
    const double act = tol.activity * (1.0 + gx.cwiseAbs().maxCoeff());
    out.active_rank = static_cast<int>((eig.eigenvalues().array() >= -act).count());
    out.cert = detail::solve_kkt_system(sys, ropts).cert;
    out.Lambda = L;
    finish(out);
    out.cert.verdict = detail::classify_residual(out.cert, tol.certificate);
    if (out.lambda_min_eig < -1e-10) {
      out.cert.verdict = Verdict::Refuted;
      out.cert.note = "Lambda is not positive semidefinite";
    } else if (std::abs(out.complementarity) > tol.complementarity) {
      out.cert.verdict = Verdict::Refuted;
      out.cert.note = "Lambda violates complementarity with g(xbar)";
    }
    return out;
  }

  // Lambda = Q M Q' with Q spanning the near-null space of g(xbar)
  const double gscale = 1.0 + gx.cwiseAbs().maxCoeff();
  const double act = tol.activity * gscale;
  bool all_diag = true;
  for (const auto& F : sd.F) all_diag = all_diag && is_diagonal(F);
  std::vector<Vector> qcols;
  if (all_diag) {
    for (int j = 0; j < sd.p; ++j)
      if (gx(j, j) >= -act) qcols.push_back(Vector::Unit(sd.p, j));
  } else {
    for (int j = 0; j < sd.p; ++j)
      if (eig.eigenvalues()[j] >= -act) qcols.push_back(eig.eigenvectors().col(j));
  }
  const int r = static_cast<int>(qcols.size());
  Matrix Q(sd.p, r);
  for (int j = 0; j < r; ++j) Q.col(j) = qcols[static_cast<std::size_t>(j)];
  std::vector<Matrix> Fr;
  for (int i = 1; i <= n; ++i) Fr.push_back(Q.transpose() * sd.F[static_cast<std::size_t>(i)] * Q);
  out.active_rank = r;
  out.exact_search = r <= 1 || std::all_of(Fr.begin(), Fr.end(), [](const Matrix& M) { return is_diagonal(M); });

  std::vector<Vector> dirs;
  for (int j = 0; j < r; ++j) dirs.push_back(Vector::Unit(r, j));
  if (!out.exact_search) {
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) {
        dirs.push_back((Vector::Unit(r, i) + Vector::Unit(r, j)) / std::sqrt(2.0));
        dirs.push_back((Vector::Unit(r, i) - Vector::Unit(r, j)) / std::sqrt(2.0));
      }
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> normal;
    for (int s = 0; s < opts.samples; ++s) {
      Vector v(r);
      for (int j = 0; j < r; ++j) v[j] = normal(rng);
      if (v.norm() > 0.0) dirs.push_back(v.normalized());
    }
  }
  auto image = [&](const Matrix& M) {
    Vector a(n);
    for (int i = 0; i < n; ++i) a[i] = frobenius_dot(M, Fr[static_cast<std::size_t>(i)]);
    return a;
  };
  for (const auto& v : dirs) sys.extra_cone.push_back(image(v * v.transpose()));

  detail::KktSolution sol = detail::solve_kkt_system(sys, ropts);
  Matrix M = Matrix::Zero(r, r);
  for (std::size_t k = 0; k < dirs.size(); ++k) M += sol.extra_weights[k] * dirs[k] * dirs[k].transpose();
  out.cert = std::move(sol.cert);
  out.Lambda = Q * M * Q.transpose();
  out.cert.verdict = detail::classify_residual(out.cert, tol.certificate);
  if (!out.exact_search && out.cert.verdict == Verdict::Refuted) out.cert.verdict = Verdict::Inconclusive;

  if (out.cert.verdict != Verdict::Certified && !out.exact_search) {
    // alternating projected gradient on M
    double lip = 0.0;
    for (const auto& F : Fr) lip += F.squaredNorm();
    const double step = lip > 0.0 ? 1.0 / lip : 0.0;
    detail::KktSystem fixed_sys = sys;
    fixed_sys.extra_cone.clear();
    double prev = out.cert.residual;
    for (int it = 0; it < opts.polish_iterations && step > 0.0; ++it) {
      fixed_sys.fixed = image(M);
      Certificate c = detail::solve_kkt_system(fixed_sys, ropts).cert;
      if (c.residual < out.cert.residual) {
        out.cert = c;
        out.Lambda = Q * M * Q.transpose();
      }
      if (c.residual <= tol.certificate || std::abs(prev - c.residual) < 1e-3 * tol.certificate) break;
      prev = c.residual;
      const Vector p = c.residual_vector();
      Matrix grad = Matrix::Zero(r, r);
      for (int i = 0; i < n; ++i) grad += p[i] * Fr[static_cast<std::size_t>(i)];
      M = project_psd(M - step * grad);
    }
    out.cert.verdict = out.cert.residual <= tol.certificate ? Verdict::Certified : Verdict::Inconclusive;
    if (out.cert.verdict == Verdict::Inconclusive) out.cert.note = "multiplier search did not reach the tolerance";
  }
  finish(out);
  return out;
}

}  // namespace sivo
