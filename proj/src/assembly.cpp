#include <cmath>

#include <Eigen/SparseCholesky>

#include "aniflow/errors.hpp"
#include "aniflow/solver.hpp"

namespace aniflow {

namespace {

// v -> v^perp as a matrix
const Mat2 kPerp = (Mat2() << 0.0, -1.0, 1.0, 0.0).finished();

}  // namespace

std::vector<Vec2> half_step_normal(const PolygonalCurve& old_curve, const std::vector<Vec2>& new_vertices) {
  const std::size_t n = old_curve.size();
  if (new_vertices.size() != n) throw SizeMismatch("new vertex count differs from the old curve");
  std::vector<Vec2> out(n);
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2 h = old_curve.edge(static_cast<std::ptrdiff_t>(e));
    const Vec2 d = new_vertices[(e + 1) % n] - new_vertices[e];
    out[e] = -perp(h + d) / (2.0 * h.norm());
  }
  return out;
}

StepAssembler::StepAssembler(const PolygonalCurve& old_curve, const FlowSpec& flow, const AnisotropyDensity& density,
                             const EnergyMatrixParams& params, double tau)
    : old_(old_curve), flow_(flow), tau_(tau), n_(old_curve.size()) {
  flow_.validate();
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  const EdgeGeometry geo = edge_geometry(old_);
  h_.resize(n_);
  len_ = geo.length;
  g_.resize(n_);
  for (std::size_t e = 0; e < n_; ++e) {
    h_[e] = old_.edge(static_cast<std::ptrdiff_t>(e));
    g_[e] = energy_matrix(density, geo.angle[e], params);
    length_ += len_[e];
  }
  mass_ = lumped_mass(old_);
}

Eigen::VectorXd StepAssembler::pack(const TrialPoint& trial) const {
  if (trial.X.size() != n_ || trial.mu.size() != n_) throw SizeMismatch("trial point does not match the curve");
  if (flow_.has_eta() != trial.eta.has_value())
    throw SizeMismatch(flow_.has_eta() ? "intermediate flow needs an eta block" : "unexpected eta block");
  if (trial.eta && trial.eta->size() != n_) throw SizeMismatch("eta block does not match the curve");
  const int s = flow_.stride();
  Eigen::VectorXd u(unknowns());
  for (std::size_t i = 0; i < n_; ++i) {
    u[s * i] = trial.X[i].x();
    u[s * i + 1] = trial.X[i].y();
    u[s * i + 2] = trial.mu[i];
    if (trial.eta) u[s * i + 3] = (*trial.eta)[i];
  }
  return u;
}

TrialPoint StepAssembler::unpack(const Eigen::VectorXd& u) const {
  if (static_cast<std::size_t>(u.size()) != unknowns()) throw SizeMismatch("unknown vector has the wrong length");
  const int s = flow_.stride();
  TrialPoint t;
  t.X.resize(n_);
  t.mu = NodalField(n_, 0.0);
  if (flow_.has_eta()) t.eta = NodalField(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    t.X[i] = Vec2(u[s * i], u[s * i + 1]);
    t.mu[i] = u[s * i + 2];
    if (t.eta) (*t.eta)[i] = u[s * i + 3];
  }
  return t;
}

Eigen::VectorXd StepAssembler::residual(const Eigen::VectorXd& u) const {
  if (static_cast<std::size_t>(u.size()) != unknowns()) throw SizeMismatch("unknown vector has the wrong length");
  const int s = flow_.stride();
  const auto& X = old_.vertices();
  auto Y = [&](std::size_t i) { return Vec2(u[s * i], u[s * i + 1]); };
  auto mu = [&](std::size_t i) { return u[s * i + 2]; };
  auto eta = [&](std::size_t i) { return u[s * i + 3]; };

  Eigen::VectorXd r = Eigen::VectorXd::Zero(u.size());
  for (std::size_t e = 0; e < n_; ++e) {
    const std::size_t a = e, b = (e + 1) % n_;
    const Vec2 d = Y(b) - Y(a);
    // |h^m| n^{m+1/2} / 2
    const Vec2 w = -perp(h_[e] + d) / 4.0;
    const Vec2 gd = g_[e] * d / len_[e];
    for (std::size_t i : {a, b}) {
      const double sgn = i == b ? 1.0 : -1.0;
      r[s * i] += w.dot(Y(i) - X[i]) / tau_;
      const Vec2 c = mu(i) * w - sgn * gd;
      r[s * i + 1] += c.x();
      r[s * i + 2] += c.y();
    }
    if (flow_.kind == FlowKind::SurfaceDiffusion) {
      const double q = (mu(b) - mu(a)) / len_[e];
      r[s * b] += q;
      r[s * a] -= q;
    } else if (flow_.kind == FlowKind::Intermediate) {
      const double q = (eta(b) - eta(a)) / len_[e];
      r[s * b] += q;
      r[s * a] -= q;
      r[s * b + 3] += q / flow_.xi;
      r[s * a + 3] -= q / flow_.xi;
    }
  }

  double lambda = 0.0;
  if (flow_.kind == FlowKind::AreaConserved) {
    for (std::size_t i = 0; i < n_; ++i) lambda += mass_[i] * mu(i);
    lambda /= length_;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    switch (flow_.kind) {
      case FlowKind::Curvature:
        r[s * i] += mass_[i] * mu(i);
        break;
      case FlowKind::AreaConserved:
        r[s * i] += mass_[i] * (mu(i) - lambda);
        break;
      case FlowKind::SurfaceDiffusion:
        break;
      case FlowKind::Intermediate:
        r[s * i + 3] += mass_[i] * (eta(i) / flow_.nu - mu(i));
        break;
    }
  }
  return r;
}

Eigen::SparseMatrix<double> StepAssembler::jacobian(const Eigen::VectorXd& u) const {
  if (static_cast<std::size_t>(u.size()) != unknowns()) throw SizeMismatch("unknown vector has the wrong length");
  const int s = flow_.stride();
  const auto& X = old_.vertices();
  auto Y = [&](std::size_t i) { return Vec2(u[s * i], u[s * i + 1]); };
  auto mu = [&](std::size_t i) { return u[s * i + 2]; };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n_ * (flow_.kind == FlowKind::AreaConserved ? n_ + 40 : 40));
  auto add = [&](std::size_t row, std::size_t col, double v) {
    trip.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  };
  auto add_row_vec = [&](std::size_t row, std::size_t node, const Eigen::RowVector2d& v) {
    add(row, s * node, v[0]);
    add(row, s * node + 1, v[1]);
  };

  for (std::size_t e = 0; e < n_; ++e) {
    const std::size_t a = e, b = (e + 1) % n_;
    const Vec2 d = Y(b) - Y(a);
    const Vec2 w = -perp(h_[e] + d) / 4.0;
    // dw/dY_b = -P/4, dw/dY_a = +P/4
    const Mat2 dw_db = -kPerp / 4.0;
    const Mat2 dw_da = kPerp / 4.0;
    const Mat2 gl = g_[e] / len_[e];
    for (std::size_t i : {a, b}) {
      const double sgn = i == b ? 1.0 : -1.0;
      const Vec2 v = (Y(i) - X[i]) / tau_;
      // velocity row
      add_row_vec(s * i, i, w.transpose() / tau_);
      add_row_vec(s * i, b, v.transpose() * dw_db);
      add_row_vec(s * i, a, v.transpose() * dw_da);
      // curvature rows: mu_i w - sgn G d / |h|
      for (int c = 0; c < 2; ++c) {
        const std::size_t row = s * i + 1 + c;
        add(row, s * i + 2, w[c]);
        add_row_vec(row, b, mu(i) * dw_db.row(c) - sgn * gl.row(c));
        add_row_vec(row, a, mu(i) * dw_da.row(c) + sgn * gl.row(c));
      }
    }
    if (flow_.kind == FlowKind::SurfaceDiffusion || flow_.kind == FlowKind::Intermediate) {
      const std::size_t off = flow_.kind == FlowKind::SurfaceDiffusion ? 2 : 3;
      const double q = 1.0 / len_[e];
      add(s * b, s * b + off, q);
      add(s * b, s * a + off, -q);
      add(s * a, s * b + off, -q);
      add(s * a, s * a + off, q);
      if (flow_.kind == FlowKind::Intermediate) {
        const double qx = q / flow_.xi;
        add(s * b + 3, s * b + 3, qx);
        add(s * b + 3, s * a + 3, -qx);
        add(s * a + 3, s * b + 3, -qx);
        add(s * a + 3, s * a + 3, qx);
      }
    }
  }

  for (std::size_t i = 0; i < n_; ++i) {
    switch (flow_.kind) {
      case FlowKind::Curvature:
        add(s * i, s * i + 2, mass_[i]);
        break;
      case FlowKind::AreaConserved:
        add(s * i, s * i + 2, mass_[i]);
        for (std::size_t j = 0; j < n_; ++j) add(s * i, s * j + 2, -mass_[i] * mass_[j] / length_);
        break;
      case FlowKind::SurfaceDiffusion:
        break;
      case FlowKind::Intermediate:
        add(s * i + 3, s * i + 3, mass_[i] / flow_.nu);
        add(s * i + 3, s * i + 2, -mass_[i]);
        break;
    }
  }

  Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(unknowns()), static_cast<Eigen::Index>(unknowns()));
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

Eigen::VectorXd assemble_residual(const FlowState& state, const TrialPoint& trial, const FlowSpec& flow,
                                  const AnisotropyDensity& density, const EnergyMatrixParams& params, double tau) {
  const StepAssembler sys(state.curve, flow, density, params, tau);
  return sys.residual(sys.pack(trial));
}

Eigen::SparseMatrix<double> assemble_jacobian(const FlowState& state, const TrialPoint& trial, const FlowSpec& flow,
                                              const AnisotropyDensity& density, const EnergyMatrixParams& params,
                                              double tau) {
  const StepAssembler sys(state.curve, flow, density, params, tau);
  return sys.jacobian(sys.pack(trial));
}

double lagrange_multiplier(const PolygonalCurve& curve, const NodalField& mu_new) {
  const double len = total_length(curve);
  if (!(len > 0.0)) throw InvalidArgument("curve has zero length");
  return mass_lumped_inner(curve, mu_new, NodalField(curve.size(), 1.0)) / len;
}

NodalField helmholtz_solve(const PolygonalCurve& curve, const NodalField& f, double xi, double nu) {
  if (!(xi > 0.0) || !(nu > 0.0)) throw InvalidArgument("Helmholtz parameters must be positive");
  const std::size_t n = curve.size();
  if (f.size() != n) throw SizeMismatch("right-hand side does not match the curve");
  const std::vector<double> m = lumped_mass(curve);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(n);
  for (std::size_t e = 0; e < n; ++e) {
    const int a = static_cast<int>(e), b = static_cast<int>((e + 1) % n);
    const double q = 1.0 / (xi * curve.edge(a).norm());
    trip.emplace_back(a, a, q);
    trip.emplace_back(b, b, q);
    trip.emplace_back(a, b, -q);
    trip.emplace_back(b, a, -q);
    trip.emplace_back(a, a, m[e] / nu);
    rhs[a] = m[e] * f[e];
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw Error("Helmholtz system is singular");
  const Eigen::VectorXd eta = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success) throw Error("Helmholtz solve failed");
  return NodalField(std::vector<double>(eta.data(), eta.data() + n));
}

NodalField initial_mu(const PolygonalCurve& curve, const AnisotropyDensity& density, const EnergyMatrixParams& params) {
  const std::size_t n = curve.size();
  const EdgeGeometry geo = edge_geometry(curve);
  std::vector<Vec2> v(n, Vec2::Zero()), g(n, Vec2::Zero());
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t a = e, b = (e + 1) % n;
    const Vec2 w = 0.5 * geo.length[e] * geo.normal[e];
    const Vec2 gt = energy_matrix(density, geo.angle[e], params) * geo.tangent[e];
    v[a] += w;
    v[b] += w;
    g[b] += gt;
    g[a] -= gt;
  }
  NodalField mu(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double vv = v[i].squaredNorm();
    mu[i] = vv > 0.0 ? v[i].dot(g[i]) / vv : 0.0;
  }
  return mu;
}

FlowState initial_state(const PolygonalCurve& curve, const AnisotropyDensity& density,
                        const EnergyMatrixParams& params) {
  return FlowState{curve, initial_mu(curve, density, params), 0.0, 0};
}

}  // namespace aniflow
