#include "ccmix/oracle.hpp"

#include "ccmix/rng.hpp"

#include <limits>
#include <memory>

namespace ccmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::RowVectorXd dirichlet_ones(int size, Rng& rng) {
  Eigen::RowVectorXd draw(size);
  for (int i = 0; i < size; ++i) draw[i] = rng.exponential();
  return draw / draw.sum();
}

// Normalizes exp(log_values) without overflow; an all -inf row becomes zero.
Eigen::RowVectorXd normalized_exp(const Eigen::RowVectorXd& log_values) {
  const double top = log_values.maxCoeff();
  if (top == kNegInf) return Eigen::RowVectorXd::Zero(log_values.size());
  Eigen::RowVectorXd out = (log_values.array() - top).exp();
  return out / out.sum();
}

}  // namespace

FiniteSpec random_spec(int n, int grid_size, std::uint64_t seed) {
  if (n < 1 || grid_size < 1) throw Error(Errc::ConfigError, "random spec needs n, G >= 1");
  Rng rng(seed);
  FiniteSpec spec;
  spec.n = n;
  spec.grid = grid_size == 1 ? Eigen::VectorXd(Eigen::VectorXd::Zero(1))
                             : Eigen::VectorXd(Eigen::VectorXd::LinSpaced(grid_size, -3.0, 3.0));
  const Eigen::RowVectorXd masses = dirichlet_ones(n * grid_size, rng);
  spec.prob = masses.reshaped<Eigen::RowMajor>(n, grid_size);
  spec.pseudo.resize(n, grid_size);
  for (int j = 0; j < n; ++j) spec.pseudo.row(j) = dirichlet_ones(grid_size, rng);
  spec.proposal.resize(n);
  for (int l = 0; l < n; ++l) {
    Eigen::MatrixXd slice(grid_size, grid_size);
    for (int i = 0; i < grid_size; ++i) {
      for (int k = 0; k < grid_size; ++k) slice(i, k) = 1.0 - rng.uniform();
      slice.row(i) /= slice.row(i).sum();
    }
    spec.proposal[l] = std::move(slice);
  }
  return spec;
}

FiniteSpec discretize(const ModelBundle& model, const Eigen::Ref<const Eigen::VectorXd>& grid) {
  const MixtureTarget& target = model.target;
  if (target.z_dim() != 1) throw Error(Errc::ConfigError, "discretization supports z_dim = 1 only");
  const int n = target.n();
  const auto g_count = static_cast<int>(grid.size());

  FiniteSpec spec;
  spec.n = n;
  spec.grid = grid;
  Eigen::RowVectorXd joint_log(n * g_count);
  for (int m = 0; m < n; ++m) {
    for (int g = 0; g < g_count; ++g) {
      joint_log[m * g_count + g] = target.log_density(m, Point::Constant(1, grid[g]));
    }
  }
  spec.prob = normalized_exp(joint_log).reshaped<Eigen::RowMajor>(n, g_count);
  if (model.pseudo) {
    spec.pseudo.resize(n, g_count);
    for (int j = 0; j < n; ++j) {
      Eigen::RowVectorXd row(g_count);
      for (int g = 0; g < g_count; ++g) row[g] = model.pseudo->log_density(j, Point::Constant(1, grid[g]));
      spec.pseudo.row(j) = normalized_exp(row);
    }
  } else {
    spec.pseudo = spec.conditional_z();
  }
  spec.proposal.resize(n);
  for (int l = 0; l < n; ++l) {
    if (!model.proposal) {
      spec.proposal[l] = Eigen::MatrixXd::Identity(g_count, g_count);
      continue;
    }
    Eigen::MatrixXd slice(g_count, g_count);
    for (int i = 0; i < g_count; ++i) {
      Eigen::RowVectorXd row(g_count);
      const Point from = Point::Constant(1, grid[i]);
      for (int k = 0; k < g_count; ++k) {
        row[k] = model.proposal->log_density(l, from, Point::Constant(1, grid[k]));
      }
      slice.row(i) = normalized_exp(row);
    }
    spec.proposal[l] = std::move(slice);
  }
  return spec;
}

ModelBundle discrete_model(const FiniteSpec& spec) {
  spec.validate();
  auto shared = std::make_shared<const FiniteSpec>(spec);
  auto cond = std::make_shared<const Eigen::MatrixXd>(spec.conditional_z());

  // grid index of an exact grid value, -1 when off the grid
  auto locate = [shared](const Point& z) {
    const Eigen::VectorXd& grid = shared->grid;
    const double* first = grid.data();
    const double* last = first + grid.size();
    const double* it = std::lower_bound(first, last, z[0]);
    return it != last && *it == z[0] ? static_cast<int>(it - first) : -1;
  };
  auto log_mass = [](double mass) { return mass > 0.0 ? std::log(mass) : kNegInf; };
  auto grid_point = [shared](int g) { return Point::Constant(1, shared->grid[g]); };

  MixtureTarget target(
      spec.n, 1,
      [shared, locate, log_mass](int m, const Point& z) {
        const int g = locate(z);
        return g < 0 ? kNegInf : log_mass(shared->prob(m, g));
      },
      DrawFn([cond, grid_point](int m, Rng& rng) {
        return grid_point(rng.categorical(cond->row(m).transpose()));
      }));
  PseudoPriorSet pseudo(
      spec.n,
      [shared, locate, log_mass](int j, const Point& u) {
        const int g = locate(u);
        return g < 0 ? kNegInf : log_mass(shared->pseudo(j, g));
      },
      [shared, grid_point](int j, Rng& rng) {
        return grid_point(rng.categorical(shared->pseudo.row(j).transpose()));
      });
  ProposalFamily proposal(
      spec.n,
      [shared, locate, log_mass](int l, const Point& u, const Point& z) {
        const int from = locate(u);
        const int to = locate(z);
        return from < 0 || to < 0 ? kNegInf : log_mass(shared->proposal[l](from, to));
      },
      [shared, locate, grid_point](int l, const Point& u, Rng& rng) {
        const int from = locate(u);
        if (from < 0) throw Error(Errc::InvalidCurrentState, "proposal from an off-grid point");
        return grid_point(rng.categorical(shared->proposal[l].row(from).transpose()));
      });
  return ModelBundle{std::move(target), std::move(pseudo), std::move(proposal)};
}

}  // namespace ccmix
