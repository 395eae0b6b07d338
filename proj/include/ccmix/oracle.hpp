#pragma once

// Exact finite-state counterparts of the samplers.
//
// Z is replaced by a finite grid with counting measure, which turns every
// kernel into a row-stochastic matrix on the states (m, g), flattened as
// m * G + g. The functions below build those matrices and check
// reversibility, kernel orderings and asymptotic variances by dense linear
// algebra.

#include "ccmix/core.hpp"
#include "ccmix/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ccmix {

template <class Scalar>
struct FiniteMixtureSpec {
  int n = 0;
  Vector<Scalar> grid;                   // G sorted points
  Matrix<Scalar> prob;                   // n x G masses of pi*, total 1
  Matrix<Scalar> pseudo;                 // n x G, row j is rho_j
  std::vector<Matrix<Scalar>> proposal;  // n slices G x G, row i is r_l(z_i, .)

  int grid_size() const { return static_cast<int>(grid.size()); }
  Eigen::Index state_count() const { return Eigen::Index(n) * grid_size(); }

  /// Throws ConfigError when shapes or probability constraints are violated.
  void validate(Scalar tol = Scalar(1e-12)) const {
    const int g = grid_size();
    if (n < 1 || g < 1) throw Error(Errc::ConfigError, "spec needs n >= 1 and a nonempty grid");
    if (prob.rows() != n || prob.cols() != g || pseudo.rows() != n || pseudo.cols() != g ||
        static_cast<int>(proposal.size()) != n) {
      throw Error(Errc::DimensionMismatch, "spec tables do not match n x G");
    }
    for (int i = 1; i < g; ++i) {
      if (!(grid[i - 1] < grid[i])) throw Error(Errc::ConfigError, "grid must be strictly increasing");
    }
    if ((prob.array() < 0).any() || std::abs(prob.sum() - Scalar(1)) > tol) {
      throw Error(Errc::ConfigError, "pi* masses must be nonnegative and sum to 1");
    }
    for (int j = 0; j < n; ++j) {
      if ((pseudo.row(j).array() < 0).any() || std::abs(pseudo.row(j).sum() - Scalar(1)) > tol) {
        throw Error(Errc::ConfigError, "pseudo-prior rows must be probability vectors");
      }
      const Matrix<Scalar>& slice = proposal[j];
      if (slice.rows() != g || slice.cols() != g) {
        throw Error(Errc::DimensionMismatch, "proposal slice is not G x G");
      }
      if ((slice.array() < 0).any() ||
          ((slice.rowwise().sum().array() - Scalar(1)).abs() > tol).any()) {
        throw Error(Errc::ConfigError, "proposal slices must be row-stochastic");
      }
    }
  }

  /// pi* flattened over the states.
  Vector<Scalar> stationary() const {
    Vector<Scalar> out(state_count());
    for (int m = 0; m < n; ++m) out.segment(Eigen::Index(m) * grid_size(), grid_size()) = prob.row(m).transpose();
    return out;
  }

  Vector<Scalar> index_marginal() const { return prob.rowwise().sum(); }

  /// Row m holds pi*(. | m); rows of zero-mass components stay zero.
  Matrix<Scalar> conditional_z() const {
    Matrix<Scalar> out = prob;
    for (int m = 0; m < n; ++m) {
      const Scalar mass = prob.row(m).sum();
      if (mass > Scalar(0)) out.row(m) /= mass;
    }
    return out;
  }

  /// Lifts an index function h(m) to f(m, z) = h(m) on the flattened states.
  Vector<Scalar> lift_index_function(const Vector<Scalar>& h) const {
    Vector<Scalar> f(state_count());
    for (int m = 0; m < n; ++m) f.segment(Eigen::Index(m) * grid_size(), grid_size()).setConstant(h[m]);
    return f;
  }
};

template <class Scalar>
struct FiniteKernel {
  Matrix<Scalar> matrix;
  int n_components = 0;
  int grid_size = 0;

  Eigen::Index state(int m, int g) const { return Eigen::Index(m) * grid_size + g; }
  int component(Eigen::Index row) const { return static_cast<int>(row / grid_size); }
  int grid_point(Eigen::Index row) const { return static_cast<int>(row % grid_size); }

  bool is_stochastic(Scalar tol = Scalar(1e-12)) const {
    return (matrix.array() >= 0).all() &&
           ((matrix.rowwise().sum().array() - Scalar(1)).abs() <= tol).all();
  }
};

inline constexpr double kMaxEnumerationTerms = 1e7;

/// Index-selection-and-swap kernel of the CC-type samplers (shared by MCC
/// and FCC). Marginalizes the pseudo-prior refresh exactly by enumerating
/// grid^(n-1) auxiliary configurations; throws TooLarge past 1e7 terms.
template <class Scalar>
FiniteKernel<Scalar> build_P3(const FiniteMixtureSpec<Scalar>& spec,
                              double max_terms = kMaxEnumerationTerms) {
  spec.validate();
  const int n = spec.n;
  const int g_count = spec.grid_size();
  const double terms = static_cast<double>(spec.state_count()) * std::pow(double(g_count), n - 1);
  if (terms > max_terms) throw Error(Errc::TooLarge, "P3 enumeration exceeds the term budget");

  FiniteKernel<Scalar> kernel{Matrix<Scalar>::Zero(spec.state_count(), spec.state_count()), n,
                              g_count};
  std::vector<int> u(n);
  Vector<Scalar> ratio(n);
  for (int m = 0; m < n; ++m) {
    for (int g = 0; g < g_count; ++g) {
      const Eigen::Index row = kernel.state(m, g);
      if (spec.pseudo(m, g) == Scalar(0) && spec.prob(m, g) > Scalar(0)) {
        throw Error(Errc::PseudoPriorZero, "pseudo-prior vanishes at a state with target mass");
      }
      std::fill(u.begin(), u.end(), 0);
      u[m] = g;
      while (true) {
        Scalar weight(1);
        for (int j = 0; j < n; ++j) {
          if (j != m) weight *= spec.pseudo(j, u[j]);
        }
        if (weight > Scalar(0)) {
          for (int k = 0; k < n; ++k) {
            const Scalar rho = spec.pseudo(k, u[k]);
            ratio[k] = rho > Scalar(0) ? spec.prob(k, u[k]) / rho : Scalar(0);
          }
          const Scalar total = ratio.sum();
          if (total > Scalar(0)) {
            for (int k = 0; k < n; ++k) {
              kernel.matrix(row, kernel.state(k, u[k])) += weight * ratio[k] / total;
            }
          }
        }
        // odometer over the inactive coordinates
        int j = 0;
        for (; j < n; ++j) {
          if (j == m) continue;
          if (++u[j] < g_count) break;
          u[j] = 0;
        }
        if (j == n) break;
      }
      // configurations where every index weight vanished leave the state in place
      const Scalar missing = Scalar(1) - kernel.matrix.row(row).sum();
      if (missing > Scalar(0)) kernel.matrix(row, row) += missing;
    }
  }
  return kernel;
}

/// Block-diagonal Metropolis-Hastings refresh of z given m, rejection mass on
/// the diagonal. Zero-mass states are absorbing.
template <class Scalar>
FiniteKernel<Scalar> build_Q3(const FiniteMixtureSpec<Scalar>& spec) {
  spec.validate();
  const int g_count = spec.grid_size();
  FiniteKernel<Scalar> kernel{Matrix<Scalar>::Zero(spec.state_count(), spec.state_count()), spec.n,
                              g_count};
  for (int m = 0; m < spec.n; ++m) {
    const Matrix<Scalar>& r = spec.proposal[m];
    for (int i = 0; i < g_count; ++i) {
      const Eigen::Index row = kernel.state(m, i);
      const Scalar p_i = spec.prob(m, i);
      if (p_i == Scalar(0)) {
        kernel.matrix(row, row) = Scalar(1);
        continue;
      }
      Scalar stay(0);
      for (int j = 0; j < g_count; ++j) {
        const Scalar r_ij = r(i, j);
        if (r_ij == Scalar(0)) continue;
        if (j == i) {
          stay += r_ij;
          continue;
        }
        const Scalar alpha = std::min(Scalar(1), spec.prob(m, j) * r(j, i) / (p_i * r_ij));
        kernel.matrix(row, kernel.state(m, j)) = r_ij * alpha;
        stay += r_ij * (Scalar(1) - alpha);
      }
      kernel.matrix(row, row) += stay;
    }
  }
  return kernel;
}

/// The frozen refresh: identity.
template <class Scalar>
FiniteKernel<Scalar> build_Q4(const FiniteMixtureSpec<Scalar>& spec) {
  return FiniteKernel<Scalar>{Matrix<Scalar>::Identity(spec.state_count(), spec.state_count()),
                              spec.n, spec.grid_size()};
}

/// Transition kernel of the Gibbs index chain, G(m, m') = sum_z pi*(z|m) pi*(m'|z).
/// The result is n x n (grid_size 1).
template <class Scalar>
FiniteKernel<Scalar> build_gibbs_index_kernel(const FiniteMixtureSpec<Scalar>& spec) {
  spec.validate();
  const Matrix<Scalar> cond_z = spec.conditional_z();
  const Vector<Scalar> column_mass = spec.prob.colwise().sum().transpose();
  Matrix<Scalar> cond_m = Matrix<Scalar>::Zero(spec.grid_size(), spec.n);  // pi*(m | z_g)
  for (int g = 0; g < spec.grid_size(); ++g) {
    if (column_mass[g] > Scalar(0)) cond_m.row(g) = spec.prob.col(g).transpose() / column_mass[g];
  }
  FiniteKernel<Scalar> kernel{cond_z * cond_m, spec.n, 1};
  for (int m = 0; m < spec.n; ++m) {
    if (spec.prob.row(m).sum() == Scalar(0)) kernel.matrix(m, m) = Scalar(1);
  }
  return kernel;
}

/// max_ij |pi_i K_ij - pi_j K_ji|.
template <class DerivedK, class DerivedPi>
typename DerivedK::Scalar check_reversibility(const Eigen::MatrixBase<DerivedK>& kernel,
                                              const Eigen::MatrixBase<DerivedPi>& pi) {
  if (kernel.rows() != kernel.cols() || pi.size() != kernel.rows()) {
    throw Error(Errc::DimensionMismatch, "kernel and distribution sizes differ");
  }
  using Scalar = typename DerivedK::Scalar;
  const Matrix<Scalar> flow = pi.derived().reshaped().asDiagonal() * kernel.derived();
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

/// True iff P1_ij >= P0_ij - tol for every i != j.
template <class Derived1, class Derived0>
bool check_offdiagonal_dominance(const Eigen::MatrixBase<Derived1>& p1,
                                 const Eigen::MatrixBase<Derived0>& p0, double tol = 1e-14) {
  if (p1.rows() != p0.rows() || p1.cols() != p0.cols() || p1.rows() != p1.cols()) {
    throw Error(Errc::DimensionMismatch, "kernels differ in shape");
  }
  for (Eigen::Index i = 0; i < p1.rows(); ++i) {
    for (Eigen::Index j = 0; j < p1.cols(); ++j) {
      if (i != j && p1(i, j) < p0(i, j) - tol) return false;
    }
  }
  return true;
}

/// Smallest eigenvalue of the symmetric matrix diag(pi) (P0 - P1). The
/// covariance ordering P1 >= P0 holds iff it is >= -1e-10. Both kernels must be
/// pi-reversible to within `reversibility_tol` (NotReversible otherwise).
template <class Derived1, class Derived0, class DerivedPi>
typename Derived1::Scalar check_covariance_ordering(const Eigen::MatrixBase<Derived1>& p1,
                                                    const Eigen::MatrixBase<Derived0>& p0,
                                                    const Eigen::MatrixBase<DerivedPi>& pi,
                                                    double reversibility_tol = 1e-10) {
  using Scalar = typename Derived1::Scalar;
  if (p1.rows() != p0.rows() || p1.cols() != p0.cols()) {
    throw Error(Errc::DimensionMismatch, "kernels differ in shape");
  }
  if (check_reversibility(p1, pi) > reversibility_tol ||
      check_reversibility(p0, pi) > reversibility_tol) {
    throw Error(Errc::NotReversible, "covariance ordering needs pi-reversible kernels");
  }
  const Matrix<Scalar> form = pi.derived().reshaped().asDiagonal() * (p0.derived() - p1.derived());
  const Matrix<Scalar> sym = Scalar(0.5) * (form + form.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Operator norm of K restricted to pi-centred functions in L2(pi), computed
/// on the support of pi.
template <class DerivedK, class DerivedPi>
typename DerivedK::Scalar projected_contraction(const Eigen::MatrixBase<DerivedK>& kernel,
                                                const Eigen::MatrixBase<DerivedPi>& pi) {
  using Scalar = typename DerivedK::Scalar;
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (pi(i) > Scalar(0)) support.push_back(i);
  }
  const auto s = static_cast<Eigen::Index>(support.size());
  Matrix<Scalar> centred(s, s);
  Vector<Scalar> sqrt_pi(s);
  for (Eigen::Index a = 0; a < s; ++a) sqrt_pi[a] = std::sqrt(pi(support[a]));
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      centred(a, b) = sqrt_pi[a] * (kernel(support[a], support[b]) - pi(support[b])) / sqrt_pi[b];
    }
  }
  Eigen::JacobiSVD<Matrix<Scalar>> svd(centred);
  return svd.singularValues()(0);
}

/// Asymptotic variances lim (1/n) Var(sum_{k<n} f(X_k)) of the chain started
/// at pi that applies P on even steps and Q on odd steps, one per column of F.
/// Sums the lag covariances until the geometric tail bound
/// 4 Var(f) rho^j / (1 - rho) falls below tol, rho being the larger centred
/// contraction of PQ and QP. Throws NonErgodic when rho >= 1 or the series
/// needs more than max_terms periods.
template <class DerivedP, class DerivedQ, class DerivedPi, class DerivedF>
Vector<typename DerivedP::Scalar> exact_asymptotic_variances_alternating(
    const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q,
    const Eigen::MatrixBase<DerivedPi>& pi, const Eigen::MatrixBase<DerivedF>& f,
    double tol = 1e-12, long max_terms = 5'000'000) {
  using Scalar = typename DerivedP::Scalar;
  const Eigen::Index dim = p.rows();
  if (p.cols() != dim || q.rows() != dim || q.cols() != dim || pi.size() != dim ||
      f.rows() != dim) {
    throw Error(Errc::DimensionMismatch, "kernel, distribution and function sizes differ");
  }
  const Vector<Scalar> pi_v = pi.derived().reshaped();
  const Matrix<Scalar> g = f.derived().rowwise() - pi_v.transpose() * f.derived();
  const Matrix<Scalar> weighted = pi_v.asDiagonal() * g;
  const Vector<Scalar> variance = weighted.cwiseProduct(g).colwise().sum().transpose();
  const Scalar top = variance.size() > 0 ? variance.maxCoeff() : Scalar(0);
  if (!(top > Scalar(0))) return variance;

  const Matrix<Scalar> pq = p.derived() * q.derived();
  const Matrix<Scalar> qp = q.derived() * p.derived();
  const Scalar rho = std::max(projected_contraction(pq, pi_v), projected_contraction(qp, pi_v));
  if (!(rho < Scalar(1) - Scalar(1e-13))) {
    throw Error(Errc::NonErgodic, "alternating chain does not contract on centred functions");
  }
  // rows of e carry (pi*g)^T P Q P ..., rows of o carry (pi*g)^T Q P Q ...
  Matrix<Scalar> e = weighted.transpose();
  Matrix<Scalar> o = e;
  const Matrix<Scalar> gt = g.transpose();
  Vector<Scalar> sum = variance;
  Scalar tail = Scalar(4) * top / (Scalar(1) - rho);
  for (long j = 0; tail >= Scalar(tol); ++j) {
    if (j > max_terms) throw Error(Errc::NonErgodic, "covariance series did not converge");
    e = e * p.derived();
    sum += e.cwiseProduct(gt).rowwise().sum();
    e = e * q.derived();
    sum += e.cwiseProduct(gt).rowwise().sum();
    o = o * q.derived();
    sum += o.cwiseProduct(gt).rowwise().sum();
    o = o * p.derived();
    sum += o.cwiseProduct(gt).rowwise().sum();
    tail *= rho;
  }
  return sum;
}

/// Single-function form of exact_asymptotic_variances_alternating.
template <class DerivedP, class DerivedQ, class DerivedPi, class DerivedF>
typename DerivedP::Scalar exact_asymptotic_variance_alternating(
    const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q,
    const Eigen::MatrixBase<DerivedPi>& pi, const Eigen::MatrixBase<DerivedF>& f,
    double tol = 1e-12, long max_terms = 5'000'000) {
  using Scalar = typename DerivedP::Scalar;
  const Vector<Scalar> column = f.derived().reshaped();
  return exact_asymptotic_variances_alternating(p, q, pi, column, tol, max_terms)[0];
}

/// Cov_pi(f(X_0), f(X_k)) for k = 0..max_lag under a homogeneous kernel.
template <class DerivedK, class DerivedPi, class DerivedF>
Vector<typename DerivedK::Scalar> lag_covariances(const Eigen::MatrixBase<DerivedK>& kernel,
                                                  const Eigen::MatrixBase<DerivedPi>& pi,
                                                  const Eigen::MatrixBase<DerivedF>& f,
                                                  int max_lag) {
  using Scalar = typename DerivedK::Scalar;
  const Vector<Scalar> pi_v = pi.derived().reshaped();
  const Vector<Scalar> g = f.derived().reshaped().array() - pi_v.dot(f.derived().reshaped());
  Matrix<Scalar, 1, Eigen::Dynamic> row = pi_v.cwiseProduct(g).transpose();
  Vector<Scalar> out(max_lag + 1);
  out[0] = row.dot(g.transpose());
  for (int k = 1; k <= max_lag; ++k) {
    row = row * kernel.derived();
    out[k] = row.dot(g.transpose());
  }
  return out;
}

template <class Scalar>
struct GibbsIidBound {
  Scalar sigma2_gibbs = 0;
  Scalar var_iid = 0;

  bool holds(double tol = 1e-10) const { return sigma2_gibbs >= var_iid - Scalar(tol); }
};

/// Exact asymptotic variance of h(M) along the Gibbs index chain against the
/// i.i.d. variance Var_{pi*(m)}(h).
template <class Scalar>
GibbsIidBound<Scalar> check_gibbs_iid_bound(const FiniteMixtureSpec<Scalar>& spec,
                                            const Vector<Scalar>& h, double tol = 1e-12) {
  if (h.size() != spec.n) throw Error(Errc::DimensionMismatch, "h must have one value per index");
  const FiniteKernel<Scalar> gibbs = build_gibbs_index_kernel(spec);
  const Vector<Scalar> marginal = spec.index_marginal();
  const Scalar mean = marginal.dot(h);
  GibbsIidBound<Scalar> out;
  out.var_iid = marginal.dot((h.array() - mean).square().matrix());
  if (!(out.var_iid > Scalar(0))) return out;
  out.sigma2_gibbs = exact_asymptotic_variance_alternating(gibbs.matrix, gibbs.matrix, marginal, h, tol);
  return out;
}

/// Replaces every pseudo-prior by the exact conditional pi*(. | j).
template <class Scalar>
FiniteMixtureSpec<Scalar> with_optimal_pseudo(FiniteMixtureSpec<Scalar> spec) {
  spec.pseudo = spec.conditional_z();
  return spec;
}

/// Proposal slices whose rows are all pi*(. | l), i.e. exact conditional refresh.
template <class Scalar>
FiniteMixtureSpec<Scalar> with_exact_conditional_proposal(FiniteMixtureSpec<Scalar> spec) {
  const Matrix<Scalar> cond = spec.conditional_z();
  for (int l = 0; l < spec.n; ++l) spec.proposal[l] = cond.row(l).replicate(spec.grid_size(), 1);
  return spec;
}

template <class Scalar>
FiniteMixtureSpec<Scalar> with_delta_proposal(FiniteMixtureSpec<Scalar> spec) {
  for (int l = 0; l < spec.n; ++l) spec.proposal[l].setIdentity(spec.grid_size(), spec.grid_size());
  return spec;
}

using FiniteSpec = FiniteMixtureSpec<double>;
using Kernel = FiniteKernel<double>;

/// Dirichlet(1) masses for pi* and each pseudo-prior row; proposal slices
/// with uniform(0,1] entries, row-normalized. The grid is n-independent,
/// G points evenly spaced on [-3, 3].
FiniteSpec random_spec(int n, int grid_size, std::uint64_t seed);

/// Discretizes a continuous model: pi*, pseudo-prior and proposal densities
/// evaluated on the grid and normalized. Missing pseudo-priors default to the
/// exact conditionals, a missing proposal to the identity.
FiniteSpec discretize(const ModelBundle& model, const Eigen::Ref<const Eigen::VectorXd>& grid);

/// A sampler-ready model whose Z is the spec's grid (z_dim 1, counting
/// measure). Lets the Monte Carlo samplers run against the exact kernels.
ModelBundle discrete_model(const FiniteSpec& spec);

/// Tab-separated blocks: `#grid` (one row), `#pi` (n rows), `#pseudo`
/// (n rows), `#proposal` (n*G rows; row l*G+i is r_l(z_i, .)).
void write_spec(std::ostream& out, const FiniteSpec& spec);
FiniteSpec read_spec(std::istream& in);

}  // namespace ccmix
