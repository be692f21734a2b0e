// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "carpetdim/error.hpp"

namespace carpetdim {

namespace {

constexpr int kPowerMaxIter = 20000;
constexpr double kPowerTol = 1e-14;
constexpr int kSeriesMaxIter = 20000;

void check_compatible(const Collocation& c, const Observable& h, const char* what) {
  if (h.components() != c.components() || h.nodes() != c.nodes())
    throw Error(ErrorKind::MalformedSpec,
                std::string(what) + ": observable does not match the collocation grid");
}

struct PowerResult {
  Eigen::VectorXd vec;
  double value = 0.0;
  bool converged = false;
};

// Max-normalised power iteration started from the constant vector.
PowerResult power_iterate(const Eigen::MatrixXd& A) {
  PowerResult out;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.rows());
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < kPowerMaxIter; ++it) {
    Eigen::VectorXd w = A * v;
    const double scale = w.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale)) return out;
    w /= scale;
    // The Perron vector is positive; keep the sign fixed.
    if (w.sum() < 0.0) w = -w;
    const double diff = (w - v).cwiseAbs().maxCoeff();
    v = std::move(w);
    out.value = scale;
    if (diff <= kPowerTol) {
      out.converged = true;
      break;
    }
    // Roundoff floor: accept once the change stops shrinking at a tiny level.
    if (diff < best * 0.999) {
      best = diff;
      stalled = 0;
    } else if (++stalled > 50 && best < 1e-11) {
      out.converged = true;
      break;
    }
  }
  out.vec = std::move(v);
  return out;
}

struct DensePair {
  Eigen::VectorXd vec;
  double value = 0.0;
};

DensePair dense_perron(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::NonPrimitive, "dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  Eigen::Index lead = 0;
  for (Eigen::Index k = 1; k < ev.size(); ++k)
    if (std::abs(ev[k]) > std::abs(ev[lead])) lead = k;
  const std::complex<double> lam = ev[lead];
  if (lam.real() <= 0.0 || std::abs(lam.imag()) > 1e-10 * std::abs(lam))
    throw Error(ErrorKind::NonPrimitive, "leading eigenvalue is not real and positive");
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (k != lead && std::abs(ev[k]) > (1.0 - 1e-9) * std::abs(lam))
      throw Error(ErrorKind::NonPrimitive, "leading eigenvalue is not simple");
  DensePair out;
  out.value = lam.real();
  out.vec = es.eigenvectors().col(lead).real();
  if (out.vec.sum() < 0.0) out.vec = -out.vec;
  out.vec /= out.vec.cwiseAbs().maxCoeff();
  return out;
}

double span(const Eigen::VectorXd& v) { return v.maxCoeff() - v.minCoeff(); }

}  // namespace

Collocation::Collocation(CarpetSpec spec, int K) : spec_(std::move(spec)) {
  check_well_formed(spec_);
  if (K < Observable::kMinNodes)
    throw Error(ErrorKind::MalformedSpec, "collocation needs K >= 8");
  grid_ = ChebyshevGrid::shared(K);
  pullback_.reserve(spec_.rows.size());
  for (int j = 0; j < components(); ++j) {
    Eigen::VectorXd pts(K);
    for (int k = 0; k < K; ++k) pts[k] = std::clamp(spec_.b(j)(grid_->node(k)), 0.0, 1.0);
    pullback_.push_back(grid_->interpolation_matrix(pts));
  }
}

std::shared_ptr<const Collocation> Collocation::make(const CarpetSpec& spec, int K) {
  return std::make_shared<const Collocation>(spec, K);
}

Observable GibbsSystem::transfer(const Observable& f) const {
  check_compatible(*colloc_, f, "transfer");
  Observable out = f;
  out.values() = matrix_ * f.values();
  return out;
}

Observable GibbsSystem::normalized_transfer(const Observable& f) const {
  check_compatible(*colloc_, f, "normalized_transfer");
  Observable out = f;
  out.values() = normalized_ * f.values();
  return out;
}

GibbsSystem build_operator(std::shared_ptr<const Collocation> colloc, const Observable& potential,
                           EigenMethod method) {
  if (!colloc) throw Error(ErrorKind::MalformedSpec, "build_operator: no collocation");
  check_compatible(*colloc, potential, "build_operator");
  if (!potential.values().allFinite())
    throw Error(ErrorKind::MalformedSpec, "potential is not finite at every node");

  const int m = colloc->components();
  const int K = colloc->nodes();
  const Eigen::Index n = static_cast<Eigen::Index>(m) * K;

  // Shift the potential by its maximum so exp() stays in range; P shifts back.
  const double gmax = potential.values().maxCoeff();
  Eigen::MatrixXd M(n, n);
  for (int j = 0; j < m; ++j) {
    const Eigen::MatrixXd& E = colloc->pullback(j);
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd weight =
          ((E * potential.component(i)).array() - gmax).exp().matrix();
      M.block(j * K, i * K, K, K) = weight.asDiagonal() * E;
    }
  }

  Eigen::VectorXd r, l;
  double lam = 0.0;
  bool done = false;
  if (method == EigenMethod::Power) {
    PowerResult right = power_iterate(M);
    PowerResult left = right.converged ? power_iterate(M.transpose()) : PowerResult{};
    if (right.converged && left.converged) {
      r = std::move(right.vec);
      l = std::move(left.vec);
      lam = right.value;
      done = true;
    }
  }
  if (!done) {
    DensePair right = dense_perron(M);
    DensePair left = dense_perron(M.transpose());
    r = std::move(right.vec);
    l = std::move(left.vec);
    lam = right.value;
  }

  if (r.minCoeff() <= 0.0)
    throw Error(ErrorKind::NonPrimitive, "eigenfunction is not positive at every node");
  const double lr = l.dot(r);
  if (!(lr > 0.0)) throw Error(ErrorKind::NonPrimitive, "eigenfunctional pairs to zero");
  l /= lr;
  // Rayleigh-type refinement with both eigenvectors.
  lam = l.dot(M * r);
  if (!(lam > 0.0)) throw Error(ErrorKind::NonPrimitive, "leading eigenvalue not positive");

  GibbsSystem sys(colloc, potential);
  sys.pressure_ = std::log(lam) + gmax;
  sys.eigenvalue_ = std::exp(sys.pressure_);
  sys.residual_ = (M * r - lam * r).cwiseAbs().maxCoeff() / lam;
  sys.right_.values() = r;
  sys.left_ = l;
  sys.weights_ = l.cwiseProduct(r);
  sys.normalized_ = r.cwiseInverse().asDiagonal() * M * r.asDiagonal();
  sys.normalized_ /= lam;
  sys.matrix_ = std::exp(gmax) * M;
  return sys;
}

GibbsSystem build_operator(const CarpetSpec& spec, const Observable& potential, int K) {
  if (potential.nodes() != K)
    throw Error(ErrorKind::MalformedSpec, "potential grid size differs from K");
  return build_operator(Collocation::make(spec, K), potential);
}

double expectation(const GibbsSystem& sys, const Observable& h, double tol) {
  check_compatible(sys.collocation(), h, "expectation");
  if (!(tol > 0.0)) throw Error(ErrorKind::MalformedSpec, "expectation: tol must be positive");
  const double target = tol * std::max(1.0, h.sup_norm());
  // Past the roundoff floor the span stops shrinking; accept a stalled
  // iterate only when it is already flat to well below any physical scale.
  const double stall_ceiling = 1e-10 * std::max(1.0, h.sup_norm());
  Eigen::VectorXd f = h.values();
  double best = span(f);
  int since_best = 0;
  for (int it = 0; it < kSeriesMaxIter; ++it) {
    const double s = span(f);
    if (s <= target) return 0.5 * (f.maxCoeff() + f.minCoeff());
    if (s < 0.5 * best) {
      best = s;
      since_best = 0;
    } else if (++since_best >= 64 && s <= stall_ceiling) {
      return 0.5 * (f.maxCoeff() + f.minCoeff());
    }
    f = sys.normalized_matrix() * f;
  }
  throw Error(ErrorKind::NoConvergence, "expectation: iterate did not flatten; tol too tight for K");
}

double entropy(const GibbsSystem& sys, double tol) {
  const double h = sys.pressure() - expectation(sys, sys.potential(), tol);
  const double slack = tol * std::max(1.0, sys.potential().sup_norm());
  if (h < 0.0 && h > -slack) return 0.0;
  return h;
}

Observable cylinder_branch(const GibbsSystem& sys, const RowWord& word, const BranchFactor& factor) {
  const CarpetSpec& spec = sys.collocation().spec();
  const int m = sys.components();
  if (word.size() == 0) throw Error(ErrorKind::MalformedSpec, "cylinder word is empty");
  for (int s : word.symbols)
    if (s < 0 || s >= m) throw Error(ErrorKind::MalformedSpec, "cylinder word symbol out of range");

  const std::size_t n = word.size();
  const Observable& g = sys.potential();
  const Observable& r = sys.right_eigen();
  Observable out(sys.collocation().grid_ptr(), m);
  std::vector<double> zeta(n);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < out.nodes(); ++k) {
      const double z = out.grid().node(k);
      zeta[n - 1] = spec.b(j)(z);
      for (std::size_t q = n - 1; q > 0; --q) zeta[q - 1] = spec.b(word[q])(zeta[q]);
      double log_w = -static_cast<double>(n) * sys.pressure();
      double prod = 1.0;
      for (std::size_t q = 0; q < n; ++q) {
        log_w += g(word[q], zeta[q]);
        if (factor) prod *= factor(q, word[q], zeta[q]);
      }
      out.component(j)[k] = std::exp(log_w) * prod * r(word[0], zeta[0]) / r.component(j)[k];
    }
  }
  return out;
}

double cylinder_mass(const GibbsSystem& sys, const RowWord& word, double tol) {
  return expectation(sys, cylinder_branch(sys, word), tol);
}

namespace {

// sum_{n >= start} Lhat^n f for f centred against the Gibbs weights, truncated
// once the geometric tail bound drops below `target`.
Eigen::VectorXd centred_series(const GibbsSystem& sys, Eigen::VectorXd f, int start, double target) {
  const Eigen::VectorXd& w = sys.measure_weights();
  const Eigen::MatrixXd& N = sys.normalized_matrix();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(f.size());
  for (int n = 0; n < start; ++n) {
    f = N * f;
    f.array() -= w.dot(f);
  }
  double prev = f.cwiseAbs().maxCoeff();
  double ratio = 0.0;
  for (int it = 0; it < kSeriesMaxIter; ++it) {
    const double norm = f.cwiseAbs().maxCoeff();
    if (norm == 0.0) return sum;
    if (it > 0) ratio = std::max(0.5 * ratio, norm / prev);
    // Tail after this term is at most norm * r / (1 - r).
    if (it > 2 && ratio < 1.0 && norm <= target * (1.0 - ratio)) return sum + f;
    sum += f;
    prev = norm;
    f = N * f;
    f.array() -= w.dot(f);
  }
  throw Error(ErrorKind::NoConvergence, "correlation series shows no contraction");
}

}  // namespace

double correlation_form(const GibbsSystem& sys, const Observable& h1, const Observable& h2,
                        double tol) {
  check_compatible(sys.collocation(), h1, "correlation_form");
  check_compatible(sys.collocation(), h2, "correlation_form");
  if (!(tol > 0.0)) throw Error(ErrorKind::MalformedSpec, "correlation_form: tol must be positive");
  const Eigen::VectorXd& w = sys.measure_weights();
  Eigen::VectorXd f1 = h1.values();
  Eigen::VectorXd f2 = h2.values();
  f1.array() -= w.dot(f1);
  f2.array() -= w.dot(f2);
  const double n1 = f1.cwiseAbs().maxCoeff();
  const double n2 = f2.cwiseAbs().maxCoeff();
  if (n1 == 0.0 || n2 == 0.0) return 0.0;
  const Eigen::VectorXd s2 = centred_series(sys, f2, 0, tol / n1);
  const Eigen::VectorXd s1 = centred_series(sys, f1, 1, tol / n2);
  return w.dot(f1.cwiseProduct(s2)) + w.dot(f2.cwiseProduct(s1));
}

}  // namespace carpetdim
