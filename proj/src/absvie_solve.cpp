/*
   Copyright 2026 The absvie-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "absvie/absvie_solve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "absvie/errors.hpp"
#include "absvie/parallel.hpp"

namespace absvie {

namespace {

using EtaFn = std::function<double(std::size_t, std::size_t, std::size_t, std::size_t)>;

std::vector<double> exp_weights(double lambda, double h, std::size_t count) {
  std::vector<double> w(count);
  for (std::size_t q = 0; q < count; ++q) w[q] = std::exp(-lambda * h * static_cast<double>(q));
  return w;
}

std::size_t max_offset(const DelaySpec& d, std::size_t steps, bool zeta) {
  std::size_t m = 0;
  for (std::size_t j = 0; j <= steps; ++j) m = std::max(m, zeta ? d.zeta_at(j) : d.delta_at(j));
  return m;
}

// Per-row evaluation context: Z(i, l) and Z(l, i) tabulated on every path for
// l in [i, nodes], plus the averaged Y table shared by all rows.
class RowContext {
 public:
  RowContext(const MSolution& cand, const GeneratorSpec& spec, const std::vector<double>& mu)
      : cand_(cand), spec_(spec), mu_(mu) {
    const TimeGrid& g = cand.grid();
    paths_ = cand.paths();
    dims_ = cand.z.dims();
    weights_ = exp_weights(spec.lambda, g.step, max_offset(spec.delays, g.steps, true) + 1);
  }

  std::size_t dims() const { return dims_; }

  void load_row(std::size_t i) {
    i_ = i;
    const std::size_t nodes = cand_.grid().nodes;
    const std::size_t count = (nodes + 1 - i) * dims_ * paths_;
    if (spec_.uses.reads_z_row()) {
      row_.resize(count);
      for (std::size_t l = i; l <= nodes; ++l) {
        for (std::size_t k = 0; k < dims_; ++k) cand_.z.column(i, l, k, slot(row_, l, k));
      }
    }
    if (spec_.uses.reads_z_column()) {
      col_.resize(count);
      for (std::size_t l = i; l <= nodes; ++l) {
        for (std::size_t k = 0; k < dims_; ++k) cand_.z.column(l, i, k, slot(col_, l, k));
      }
    }
  }

  // Scratch storage for the span-valued arguments of one evaluation.
  struct Scratch {
    explicit Scratch(std::size_t dims) : buf(6 * dims, 0.0), dims(dims) {}
    std::vector<double> buf;
    std::size_t dims;
    std::span<double> part(std::size_t q) { return {buf.data() + q * dims, dims}; }
  };

  GeneratorArgs args(std::size_t p, std::size_t j, Scratch& s) const {
    const TimeGrid& g = cand_.grid();
    const UsageFlags& u = spec_.uses;
    const double h = g.step;
    GeneratorArgs a;
    a.path = p;
    a.i = i_;
    a.j = j;
    a.t = g.time(static_cast<std::ptrdiff_t>(i_));
    a.s = g.time(static_cast<std::ptrdiff_t>(j));
    const std::size_t dj = spec_.delays.delta_at(j);
    const std::size_t zj = spec_.delays.zeta_at(j);
    if (u.y) a.y = cand_.y_at(p, j);
    if (u.alpha) a.alpha = cand_.y_at(p, j + dj);
    if (u.mu) a.mu = mu_[j * paths_ + p];
    auto z = s.part(0), xi = s.part(1), beta = s.part(2), gamma = s.part(3), nu = s.part(4),
         psi = s.part(5);
    for (std::size_t k = 0; k < dims_; ++k) {
      if (u.z) z[k] = at(row_, j, k, p);
      if (u.xi) xi[k] = at(col_, j, k, p);
      if (u.beta) beta[k] = at(row_, j + zj, k, p);
      if (u.gamma) gamma[k] = at(col_, j + zj, k, p);
      if (u.nu) {
        double acc = 0.0;
        for (std::size_t l = j; l < j + zj; ++l) acc += weights_[l - j] * at(row_, l, k, p);
        nu[k] = h * acc;
      }
      if (u.psi) {
        double acc = 0.0;
        for (std::size_t l = j; l < j + zj; ++l) acc += weights_[l - j] * at(col_, l, k, p);
        psi[k] = h * acc;
      }
    }
    a.z = z;
    a.xi = xi;
    a.beta = beta;
    a.gamma = gamma;
    a.nu = nu;
    a.psi = psi;
    return a;
  }

 private:
  std::span<double> slot(std::vector<double>& v, std::size_t l, std::size_t k) {
    return {v.data() + ((l - i_) * dims_ + k) * paths_, paths_};
  }
  double at(const std::vector<double>& v, std::size_t l, std::size_t k, std::size_t p) const {
    return v[((l - i_) * dims_ + k) * paths_ + p];
  }

  const MSolution& cand_;
  const GeneratorSpec& spec_;
  const std::vector<double>& mu_;
  std::size_t paths_ = 0;
  std::size_t dims_ = 1;
  std::size_t i_ = 0;
  std::vector<double> weights_;
  std::vector<double> row_;
  std::vector<double> col_;
};

// mu(j) = h sum_{l=j}^{j+d(j)-1} e^{lambda(t_j - t_l)} Y(t_l) on every path.
std::vector<double> average_table(const MSolution& cand, const GeneratorSpec& spec) {
  if (!spec.uses.mu) return {};
  const TimeGrid& g = cand.grid();
  const std::size_t paths = cand.paths();
  const auto w = exp_weights(spec.lambda, g.step, max_offset(spec.delays, g.steps, false) + 1);
  std::vector<double> mu(g.steps * paths, 0.0);
  for (std::size_t j = 0; j < g.steps; ++j) {
    const std::size_t d = spec.delays.delta_at(j);
    par::for_blocks(paths, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        double acc = 0.0;
        for (std::size_t l = j; l < j + d; ++l) acc += w[l - j] * cand.y_at(p, l);
        mu[j * paths + p] = g.step * acc;
      }
    });
  }
  return mu;
}

void accumulate(RowContext& ctx, const GeneratorSpec& spec, const FreeTerm& free, std::size_t i,
                std::size_t n, double h, std::span<double> acc) {
  const std::size_t dims = ctx.dims();
  par::for_blocks_guarded(acc.size(), [&](std::size_t b, std::size_t e) {
    RowContext::Scratch scratch(dims);
    for (std::size_t p = b; p < e; ++p) {
      const double phi = free.phi(p, i);
      if (!std::isfinite(phi)) throw SolverError("free term: non-finite phi", i, i);
      double sum = 0.0;
      for (std::size_t j = i; j < n; ++j) {
        const double v = spec.g(ctx.args(p, j, scratch));
        if (!std::isfinite(v)) {
          throw SolverError("generator '" + spec.name + "' is non-finite", i, j);
        }
        sum += v;
      }
      acc[p] = phi + h * sum;
    }
  });
}

void check_spec(const GeneratorSpec& spec, const FreeTerm& free, const TimeGrid& grid) {
  if (!spec.g) throw std::invalid_argument("generator: evaluator is missing");
  if (!free.phi) throw std::invalid_argument("free term: phi is missing");
  spec.delays.validate(grid);
}

// Fits increments of the projection chain onto the Brownian increments:
// Z(i,j,k) = (1/h) E[(V_{j+1} - V_j) dW_j^k | F_j] for j in [first, last).
void fit_chain(MSolution& next, const Projector& proj, std::size_t i, std::size_t first,
               std::size_t last, const std::function<void(std::size_t, std::span<double>)>& level) {
  const std::size_t paths = proj.paths();
  const std::size_t dims = next.z.dims();
  std::vector<double> lower(paths), upper(paths), diff(paths);
  if (first >= last) return;
  level(first, lower);
  for (std::size_t j = first; j < last; ++j) {
    level(j + 1, upper);
    par::for_blocks(paths, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) diff[p] = upper[p] - lower[p];
    });
    for (std::size_t k = 0; k < dims; ++k) {
      Projection f = proj.fit_increment_product(diff, j, k);
      next.z.set(i, j, k, std::move(f.coefficients), f.std_error);
    }
    std::swap(lower, upper);
  }
}

}  // namespace

ZField::ZField(std::shared_ptr<const Projector> projector, std::size_t dims, EtaFn eta)
    : projector_(std::move(projector)), dims_(dims), eta_(std::move(eta)) {
  rows_ = projector_->grid().steps + 1;
  coef_.resize(rows_ * (rows_ - 1) * dims_);
  se_.assign(rows_ * (rows_ - 1) * dims_, 0.0);
}

double ZField::value(std::size_t p, std::size_t i, std::size_t j, std::size_t k) const {
  if (computed(i, j)) {
    const auto& c = coefficients(i, j, k);
    return c.empty() ? 0.0 : projector_->design(j).predict(c, p);
  }
  if (anticipated(i, j) && eta_) return eta_(p, i, j, k);
  return 0.0;
}

void ZField::column(std::size_t i, std::size_t j, std::size_t k, std::span<double> out) const {
  if (computed(i, j)) {
    const auto& c = coefficients(i, j, k);
    if (c.empty()) {
      std::fill(out.begin(), out.end(), 0.0);
    } else {
      projector_->design(j).predict(c, out);
    }
    return;
  }
  if (anticipated(i, j) && eta_) {
    par::for_blocks_guarded(out.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) out[p] = eta_(p, i, j, k);
    });
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
}

double ZField::mean_square(std::size_t i, std::size_t j, std::size_t k) const {
  if (computed(i, j)) {
    const auto& c = coefficients(i, j, k);
    return c.empty() ? 0.0 : projector_->design(j).mean_square(c);
  }
  if (!(anticipated(i, j) && eta_)) return 0.0;
  std::vector<double> v(projector_->paths());
  column(i, j, k, v);
  return par::moments(v).second;
}

AnticipatedArgs anticipated_args(const MSolution& candidate, std::size_t p, std::size_t i,
                                 std::size_t j, const GeneratorSpec& spec) {
  const TimeGrid& g = candidate.grid();
  const std::size_t dj = spec.delays.delta_at(j);
  const std::size_t zj = spec.delays.zeta_at(j);
  if (j + dj > g.nodes || j + zj > g.nodes) {
    throw std::out_of_range("anticipated_args: delay at node " + std::to_string(j) +
                            " reaches beyond T+K");
  }
  const std::size_t dims = candidate.z.dims();
  const double h = g.step;
  AnticipatedArgs out;
  out.alpha = candidate.y_at(p, j + dj);
  for (std::size_t l = j; l < j + dj; ++l) {
    out.mu += std::exp(-spec.lambda * h * static_cast<double>(l - j)) * candidate.y_at(p, l);
  }
  out.mu *= h;
  out.beta.resize(dims);
  out.gamma.resize(dims);
  out.nu.assign(dims, 0.0);
  out.psi.assign(dims, 0.0);
  for (std::size_t k = 0; k < dims; ++k) {
    out.beta[k] = candidate.z.value(p, i, j + zj, k);
    out.gamma[k] = candidate.z.value(p, j + zj, i, k);
    for (std::size_t l = j; l < j + zj; ++l) {
      const double w = std::exp(-spec.lambda * h * static_cast<double>(l - j));
      out.nu[k] += w * candidate.z.value(p, i, l, k);
      out.psi[k] += w * candidate.z.value(p, l, i, k);
    }
    out.nu[k] *= h;
    out.psi[k] *= h;
  }
  return out;
}

MSolution initial_iterate(const GeneratorSpec& spec, const FreeTerm& free,
                          std::shared_ptr<const Projector> projector) {
  const TimeGrid& g = projector->grid();
  check_spec(spec, free, g);
  const std::size_t paths = projector->paths();
  MSolution s;
  s.projector = projector;
  s.y.assign((g.nodes + 1) * paths, 0.0);
  s.mean_y.assign(g.nodes + 1, 0.0);
  s.y_std_error.assign(g.steps, 0.0);
  s.z = ZField(projector, projector->ensemble().dims(), free.eta);
  for (std::size_t i = g.steps; i <= g.nodes; ++i) {
    par::for_blocks_guarded(paths, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        const double v = free.phi(p, i);
        if (!std::isfinite(v)) throw SolverError("free term: non-finite phi", i, i);
        s.y[i * paths + p] = v;
      }
    });
    s.mean_y[i] = par::mean(s.y_column(i));
  }
  return s;
}

MSolution picard_step(const MSolution& candidate, const GeneratorSpec& spec, const FreeTerm& free) {
  return picard_step(candidate, spec, free, candidate.projector);
}

MSolution picard_step(const MSolution& candidate, const GeneratorSpec& spec, const FreeTerm& free,
                      std::shared_ptr<const Projector> projector) {
  const TimeGrid& g = projector->grid();
  const std::size_t n = g.steps;
  const std::size_t paths = projector->paths();
  const std::size_t dims = projector->ensemble().dims();
  const double h = g.step;
  if (candidate.paths() != paths || candidate.grid().nodes != g.nodes) {
    throw std::invalid_argument("picard_step: candidate lives on a different ensemble");
  }

  MSolution next;
  next.projector = projector;
  next.y.assign(candidate.y.size(), 0.0);
  next.mean_y.assign(g.nodes + 1, 0.0);
  next.y_std_error.assign(n, 0.0);
  next.z = ZField(projector, dims, free.eta);
  std::copy(candidate.y.begin() + static_cast<std::ptrdiff_t>(n * paths), candidate.y.end(),
            next.y.begin() + static_cast<std::ptrdiff_t>(n * paths));
  for (std::size_t i = n; i <= g.nodes; ++i) next.mean_y[i] = candidate.mean_y[i];

  const auto mu = average_table(candidate, spec);
  RowContext ctx(candidate, spec, mu);
  std::vector<double> acc(paths);

  for (std::size_t i = 0; i < n; ++i) {
    ctx.load_row(i);
    accumulate(ctx, spec, free, i, n, h, acc);

    const Projection fy = projector->fit(acc, i);
    next.y_std_error[i] = fy.std_error;
    std::span<double> yi(next.y.data() + i * paths, paths);
    projector->design(i).predict(fy.coefficients, yi);
    next.mean_y[i] = fy.coefficients[0];

    // Upper triangle from the projection chain of the accumulated row.
    fit_chain(next, *projector, i, i, n, [&](std::size_t node, std::span<double> out) {
      if (node == i) {
        std::copy(yi.begin(), yi.end(), out.begin());
      } else {
        projector->design(node).predict(projector->fit(acc, node).coefficients, out);
      }
    });
  }

  // Lower triangle through the martingale representation of each Y(t_i).
  for (std::size_t i = 1; i <= n; ++i) {
    std::span<const double> yi = next.y_column(i);
    fit_chain(next, *projector, i, 0, i, [&](std::size_t node, std::span<double> out) {
      if (node == i) {
        std::copy(yi.begin(), yi.end(), out.begin());
      } else {
        projector->design(node).predict(projector->fit(yi, node).coefficients, out);
      }
    });
  }
  return next;
}

std::vector<double> accumulate_row(const MSolution& candidate, const GeneratorSpec& spec,
                                   const FreeTerm& free, std::size_t i) {
  const TimeGrid& g = candidate.grid();
  check_spec(spec, free, g);
  if (i >= g.steps) throw std::out_of_range("accumulate_row: row must lie in [0,T)");
  const auto mu = average_table(candidate, spec);
  RowContext ctx(candidate, spec, mu);
  ctx.load_row(i);
  std::vector<double> acc(candidate.paths());
  accumulate(ctx, spec, free, i, g.steps, g.step, acc);
  return acc;
}

double msolution_distance2(const MSolution& a, const MSolution& b, bool anticipated) {
  const TimeGrid& g = a.grid();
  const std::size_t paths = a.paths();
  const std::size_t dims = a.z.dims();
  if (b.paths() != paths || b.grid().nodes != g.nodes || b.z.dims() != dims) {
    throw std::invalid_argument("msolution_distance: solutions live on different ensembles");
  }
  const double h = g.step;
  double dy = 0.0;
  for (std::size_t i = 0; i <= g.nodes; ++i) {
    const auto ya = a.y_column(i);
    const auto yb = b.y_column(i);
    dy += par::block_reduce(paths, 1, [&](std::size_t s, std::size_t e, std::span<double> r) {
      double v = 0.0;
      for (std::size_t p = s; p < e; ++p) v += (ya[p] - yb[p]) * (ya[p] - yb[p]);
      r[0] += v;
    })[0] / static_cast<double>(paths);
  }

  const bool shared = a.z.projector() == b.z.projector();
  std::vector<double> va, vb;
  auto per_path = [&](std::size_t i, std::size_t j, std::size_t k) {
    va.resize(paths);
    vb.resize(paths);
    a.z.column(i, j, k, va);
    b.z.column(i, j, k, vb);
    return par::block_reduce(paths, 1, [&](std::size_t s, std::size_t e, std::span<double> r) {
      double v = 0.0;
      for (std::size_t p = s; p < e; ++p) v += (va[p] - vb[p]) * (va[p] - vb[p]);
      r[0] += v;
    })[0] / static_cast<double>(paths);
  };

  double dz = 0.0;
  for (std::size_t i = 0; i <= g.steps; ++i) {
    for (std::size_t j = 0; j < g.steps; ++j) {
      for (std::size_t k = 0; k < dims; ++k) {
        if (!shared) {
          dz += per_path(i, j, k);
          continue;
        }
        const auto& ca = a.z.coefficients(i, j, k);
        const auto& cb = b.z.coefficients(i, j, k);
        if (ca.empty() && cb.empty()) continue;
        const std::size_t w = a.projector->design(j).width();
        std::vector<double> diff(w, 0.0);
        for (std::size_t q = 0; q < w; ++q) {
          diff[q] = (ca.empty() ? 0.0 : ca[q]) - (cb.empty() ? 0.0 : cb[q]);
        }
        dz += a.z.projector()->design(j).mean_square(diff);
      }
    }
  }
  if (anticipated && (a.z.has_eta() || b.z.has_eta())) {
    for (std::size_t i = 0; i <= g.nodes; ++i) {
      for (std::size_t j = 0; j <= g.nodes; ++j) {
        if (!a.z.anticipated(i, j)) continue;
        for (std::size_t k = 0; k < dims; ++k) dz += per_path(i, j, k);
      }
    }
  }
  return h * dy + h * h * dz;
}

SolveResult solve_absvie(const GeneratorSpec& spec, const FreeTerm& free,
                         std::shared_ptr<const Projector> projector, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_absvie: tol must be positive");
  if (options.max_iter == 0) throw std::invalid_argument("solve_absvie: max_iter must be positive");
  MSolution current = initial_iterate(spec, free, projector);
  if (options.initial != nullptr) {
    const MSolution& warm = *options.initial;
    if (warm.paths() != current.paths() || warm.grid().nodes != current.grid().nodes) {
      throw std::invalid_argument("solve_absvie: warm start lives on a different ensemble");
    }
    const std::size_t n = projector->grid().steps * projector->paths();
    std::copy(warm.y.begin(), warm.y.begin() + static_cast<std::ptrdiff_t>(n), current.y.begin());
    current.z = warm.z;
  }

  Diagnostics diag;
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    MSolution next = picard_step(current, spec, free, projector);
    const double d = std::sqrt(msolution_distance2(next, current));
    if (!diag.distances.empty()) {
      const double prev = diag.distances.back();
      diag.ratios.push_back(prev > 0.0 ? d / prev : 0.0);
    }
    diag.distances.push_back(d);
    diag.iterations = it;
    current = std::move(next);
    if (d < options.tol) {
      diag.converged = true;
      break;
    }
  }
  for (double se : current.y_std_error) diag.max_y_std_error = std::max(diag.max_y_std_error, se);
  const TimeGrid& g = projector->grid();
  for (std::size_t i = 0; i <= g.steps; ++i) {
    for (std::size_t j = 0; j < g.steps; ++j) {
      for (std::size_t k = 0; k < current.z.dims(); ++k) {
        diag.max_z_std_error = std::max(diag.max_z_std_error, current.z.std_error(i, j, k));
      }
    }
  }
  if (!diag.converged) {
    diag.message = "no convergence after " + std::to_string(options.max_iter) +
                   " iterations (last distance " + std::to_string(diag.distances.back()) +
                   "); shrink T+K or the Lipschitz scale of the generator";
  }
  return {std::move(current), std::move(diag)};
}

SolveResult solve_absvie(const GeneratorSpec& spec, const FreeTerm& free, const PathEnsemble& ens,
                         const Basis& basis, const SolveOptions& options) {
  return solve_absvie(spec, free, std::make_shared<const Projector>(basis, ens), options);
}

double msolution_residual(const MSolution& sol) {
  const TimeGrid& g = sol.grid();
  const std::size_t paths = sol.paths();
  const std::size_t dims = sol.z.dims();
  const PathEnsemble& ens = sol.projector->ensemble();
  std::vector<double> r(paths), zc(paths);
  double worst = 0.0;
  for (std::size_t i = 0; i <= g.steps; ++i) {
    const auto yi = sol.y_column(i);
    const double m = sol.mean_y[i];
    par::for_blocks(paths, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) r[p] = yi[p] - m;
    });
    for (std::size_t j = 0; j < i; ++j) {
      for (std::size_t k = 0; k < dims; ++k) {
        sol.z.column(i, j, k, zc);
        const auto dw = ens.increment_column(j, k);
        par::for_blocks(paths, [&](std::size_t b, std::size_t e) {
          for (std::size_t p = b; p < e; ++p) r[p] -= zc[p] * dw[p];
        });
      }
    }
    const double res = std::sqrt(par::moments(r).second);
    const double norm = std::sqrt(par::moments(yi).second);
    worst = std::max(worst, norm > 0.0 ? res / norm : res);
  }
  return worst;
}

StabilityReport stability_probe(const GeneratorSpec& spec_a, const FreeTerm& free_a,
                                const GeneratorSpec& spec_b, const FreeTerm& free_b,
                                std::shared_ptr<const Projector> projector,
                                const SolveOptions& options) {
  SolveResult a = solve_absvie(spec_a, free_a, projector, options);
  SolveResult b = solve_absvie(spec_b, free_b, projector, options);
  StabilityReport out;
  out.solution_distance = std::sqrt(msolution_distance2(a.solution, b.solution, true));

  const TimeGrid& g = projector->grid();
  const std::size_t paths = projector->paths();
  const std::size_t dims = projector->ensemble().dims();
  const double h = g.step;
  double data = 0.0;
  std::vector<double> diff(paths);
  auto mean_sq = [&]() { return par::moments(diff).second; };

  for (std::size_t i = 0; i <= g.nodes; ++i) {
    par::for_blocks_guarded(paths, [&](std::size_t s, std::size_t e) {
      for (std::size_t p = s; p < e; ++p) diff[p] = free_a.phi(p, i) - free_b.phi(p, i);
    });
    data += h * mean_sq();
  }
  if (free_a.eta || free_b.eta) {
    for (std::size_t i = 0; i <= g.nodes; ++i) {
      for (std::size_t j = 0; j <= g.nodes; ++j) {
        if (i <= g.steps && j <= g.steps) continue;
        for (std::size_t k = 0; k < dims; ++k) {
          par::for_blocks_guarded(paths, [&](std::size_t s, std::size_t e) {
            for (std::size_t p = s; p < e; ++p) {
              diff[p] = (free_a.eta ? free_a.eta(p, i, j, k) : 0.0) -
                        (free_b.eta ? free_b.eta(p, i, j, k) : 0.0);
            }
          });
          data += h * h * mean_sq();
        }
      }
    }
  }

  // Generator difference along solution A, read through A's argument wiring.
  GeneratorSpec wiring = spec_a;
  wiring.uses = UsageFlags::all();
  const auto mu = average_table(a.solution, wiring);
  RowContext ctx(a.solution, wiring, mu);
  for (std::size_t i = 0; i < g.steps; ++i) {
    ctx.load_row(i);
    par::for_blocks_guarded(paths, [&](std::size_t s, std::size_t e) {
      RowContext::Scratch scratch(dims);
      for (std::size_t p = s; p < e; ++p) {
        double acc = 0.0;
        for (std::size_t j = i; j < g.steps; ++j) {
          const GeneratorArgs args = ctx.args(p, j, scratch);
          acc += std::abs(spec_a.g(args) - spec_b.g(args));
        }
        diff[p] = h * acc;
      }
    });
    data += h * mean_sq();
  }
  out.data_distance = std::sqrt(data);
  out.ratio = out.data_distance > 0.0 ? out.solution_distance / out.data_distance : 0.0;
  out.a = std::move(a.diagnostics);
  out.b = std::move(b.diagnostics);
  return out;
}

UsageReport check_usage_flags(const GeneratorSpec& spec, const TimeGrid& grid, std::size_t dims,
                              std::size_t samples, std::uint64_t seed) {
  if (!spec.g) throw std::invalid_argument("generator: evaluator is missing");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> node(0, grid.steps > 0 ? grid.steps - 1 : 0);
  const char* names[] = {"y", "z", "xi", "alpha", "beta", "gamma", "mu", "nu", "psi"};
  const bool used[] = {spec.uses.y,    spec.uses.z,     spec.uses.xi,
                       spec.uses.alpha, spec.uses.beta, spec.uses.gamma,
                       spec.uses.mu,   spec.uses.nu,    spec.uses.psi};
  std::vector<bool> flagged(9, false);
  std::vector<double> base(6 * dims), bumped(6 * dims);
  for (std::size_t n = 0; n < samples; ++n) {
    std::size_t i = node(rng), j = node(rng);
    if (j < i) std::swap(i, j);
    double scalars[3];
    for (double& v : scalars) v = normal(rng);
    for (double& v : base) v = normal(rng);
    auto make = [&](const std::vector<double>& vec, const double* sc) {
      GeneratorArgs a;
      a.i = i;
      a.j = j;
      a.t = grid.time(static_cast<std::ptrdiff_t>(i));
      a.s = grid.time(static_cast<std::ptrdiff_t>(j));
      a.y = sc[0];
      a.alpha = sc[1];
      a.mu = sc[2];
      a.z = {vec.data(), dims};
      a.xi = {vec.data() + dims, dims};
      a.beta = {vec.data() + 2 * dims, dims};
      a.gamma = {vec.data() + 3 * dims, dims};
      a.nu = {vec.data() + 4 * dims, dims};
      a.psi = {vec.data() + 5 * dims, dims};
      return a;
    };
    const double g0 = spec.g(make(base, scalars));
    for (std::size_t q = 0; q < 9; ++q) {
      if (used[q] || flagged[q]) continue;
      double sc[3] = {scalars[0], scalars[1], scalars[2]};
      bumped = base;
      const double shift = 1.0 + std::abs(normal(rng));
      switch (q) {
        case 0: sc[0] += shift; break;
        case 3: sc[1] += shift; break;
        case 6: sc[2] += shift; break;
        default: {
          const std::size_t slot = q == 1 ? 0 : q == 2 ? 1 : q == 4 ? 2 : q == 5 ? 3 : q == 7 ? 4 : 5;
          for (std::size_t k = 0; k < dims; ++k) bumped[slot * dims + k] += shift;
        }
      }
      if (spec.g(make(bumped, sc)) != g0) flagged[q] = true;
    }
  }
  UsageReport out;
  out.samples = samples;
  for (std::size_t q = 0; q < 9; ++q) {
    if (flagged[q]) out.violations.emplace_back(names[q]);
  }
  return out;
}

}  // namespace absvie
