#include "lsssc/geometry.hpp"

#include "lsssc/errors.hpp"
#include "lsssc/rng.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace lsssc {

SymmetricPolytope::SymmetricPolytope(Matrix generators, std::optional<Matrix> carrier)
    : generators_(std::move(generators)), carrier_(std::move(carrier)) {
  if (!generators_.allFinite()) throw InvalidParameter("polytope generators must be finite");
  if (carrier_) {
    const Matrix& S = *carrier_;
    if (S.rows() != generators_.rows()) {
      throw DimensionMismatch("carrier and generators disagree on the ambient dimension");
    }
    const double scale = std::max(1.0, generators_.cwiseAbs().maxCoeff());
    const double off = (generators_ - S * (S.transpose() * generators_)).cwiseAbs().maxCoeff();
    if (generators_.cols() > 0 && off > 1e-10 * scale) {
      throw InvalidParameter("generators leave the carrier subspace (off by " +
                             std::to_string(off) + ")");
    }
  }
}

namespace {

constexpr double kFeasSlack = 1e-9;

// Calls visit(indices) for every strictly increasing d-subset of [0, k).
template <class Visit>
void for_each_subset(Index k, Index d, Visit&& visit) {
  if (d > k) return;
  std::vector<Index> idx(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) idx[j] = j;
  while (true) {
    visit(idx);
    Index j = d - 1;
    while (j >= 0 && idx[j] == k - d + j) --j;
    if (j < 0) return;
    ++idx[j];
    for (Index t = j + 1; t < d; ++t) idx[t] = idx[t - 1] + 1;
  }
}

Index numeric_rank(const Matrix& G) {
  if (G.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(G);
  const Vector& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * std::max(1.0, sv(0))) ++rank;
  return rank;
}

double sigma_min(const Matrix& G) {
  Eigen::JacobiSVD<Matrix> svd(G);
  const Vector& sv = svd.singularValues();
  return sv.size() < G.rows() ? 0.0 : sv(sv.size() - 1);
}

Matrix to_coords(const Matrix& generators, const Matrix& carrier) {
  if (carrier.rows() != generators.rows()) {
    throw DimensionMismatch("carrier and generators disagree on the ambient dimension");
  }
  const Matrix coords = carrier.transpose() * generators;
  const double scale = std::max(1.0, generators.cwiseAbs().maxCoeff());
  const double off = (generators - carrier * coords).cwiseAbs().maxCoeff();
  if (off > 1e-9 * scale) {
    throw InvalidParameter("generators leave the carrier subspace (off by " + std::to_string(off) +
                           ")");
  }
  return coords;
}

}  // namespace

double polar_circumradius(const Matrix& coords) {
  const Index d = coords.rows();
  const Index k = coords.cols();
  if (d < 1 || k < 1) throw InvalidParameter("polar circumradius needs generators");
  if (d > kMaxExactDim) throw InvalidParameter("exact polar enumeration limited to dimension 4");
  if (d == 1) {
    const double m = coords.cwiseAbs().maxCoeff();
    return m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity();
  }
  const Index patterns = Index{1} << (d - 1);
  double best2 = 0.0;
  Matrix M(d, d);
  Vector s(d);
  for_each_subset(k, d, [&](const std::vector<Index>& idx) {
    for (Index a = 0; a < d; ++a) M.row(a) = coords.col(idx[a]).transpose();
    Eigen::FullPivLU<Matrix> lu(M);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return;
    const Matrix inv = lu.inverse();
    for (Index p = 0; p < patterns; ++p) {
      s(0) = 1.0;
      for (Index a = 1; a < d; ++a) s(a) = ((p >> (a - 1)) & 1) ? -1.0 : 1.0;
      const Vector v = inv * s;
      const double n2 = v.squaredNorm();
      if (n2 <= best2) continue;
      if ((coords.transpose() * v).cwiseAbs().maxCoeff() <= 1.0 + kFeasSlack) best2 = n2;
    }
  });
  return std::sqrt(best2);
}

double inradius_by_facets(const Matrix& coords) {
  const Index d = coords.rows();
  const Index k = coords.cols();
  if (d < 1 || k < 1) throw InvalidParameter("facet inradius needs generators");
  if (d > kMaxExactDim) throw InvalidParameter("facet enumeration limited to dimension 4");
  if (d == 1) return coords.cwiseAbs().maxCoeff();
  const Index patterns = Index{1} << (d - 1);
  double best = std::numeric_limits<double>::infinity();
  Matrix P(d, d);
  const Vector ones = Vector::Ones(d);
  for_each_subset(k, d, [&](const std::vector<Index>& idx) {
    for (Index p = 0; p < patterns; ++p) {
      for (Index a = 0; a < d; ++a) {
        const double sign = (a > 0 && ((p >> (a - 1)) & 1)) ? -1.0 : 1.0;
        P.col(a) = sign * coords.col(idx[a]);
      }
      // Closest point of the affine hull of the columns of P to the origin.
      const Matrix gram = P.transpose() * P;
      Eigen::FullPivLU<Matrix> lu(gram);
      lu.setThreshold(1e-12);
      if (!lu.isInvertible()) return;
      const Vector w = lu.solve(ones);
      const double t = ones.dot(w);
      if (!(t > 0.0)) continue;
      const Vector foot = P * (w / t);
      const double dist2 = foot.squaredNorm();
      if (!(dist2 > 0.0) || std::sqrt(dist2) >= best) continue;
      if ((coords.transpose() * foot).cwiseAbs().maxCoeff() <= dist2 * (1.0 + kFeasSlack)) {
        best = std::sqrt(dist2);
      }
    }
  });
  return std::isfinite(best) ? best : 0.0;
}

double inradius_randomized(const Matrix& coords, std::uint64_t seed, int restarts, int steps) {
  const Index d = coords.rows();
  if (d < 1 || coords.cols() < 1) throw InvalidParameter("randomized inradius needs generators");
  if (restarts <= 0) restarts = 64 * static_cast<int>(d);
  Engine rng = make_stream(seed, Stream::Inradius, static_cast<std::uint64_t>(d));
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix Gt = coords.transpose();
  double best = std::numeric_limits<double>::infinity();
  Vector u(d);
  for (int r = 0; r < restarts; ++r) {
    for (Index a = 0; a < d; ++a) u(a) = normal(rng);
    if (u.norm() == 0.0) u(0) = 1.0;
    u.normalize();
    for (int t = 1; t <= steps; ++t) {
      const Vector vals = Gt * u;
      Index arg = 0;
      const double f = vals.cwiseAbs().maxCoeff(&arg);
      best = std::min(best, f);
      Vector g = (vals(arg) >= 0.0 ? 1.0 : -1.0) * coords.col(arg);
      g -= g.dot(u) * u;
      u -= g / static_cast<double>(t);
      const double nu = u.norm();
      if (nu == 0.0) break;
      u /= nu;
    }
    best = std::min(best, (Gt * u).cwiseAbs().maxCoeff());
  }
  return best;
}

InradiusResult restricted_inradius(const SymmetricPolytope& polytope, const Matrix& carrier,
                                   InradiusMode mode, std::uint64_t seed) {
  if (polytope.generators().cols() == 0) {
    throw InvalidParameter("restricted inradius of an empty generator set");
  }
  if (carrier.cols() < 1) throw InvalidParameter("carrier subspace must be non-trivial");
  const Matrix coords = to_coords(polytope.generators(), carrier);
  const Index d = coords.rows();
  InradiusResult out;
  if (numeric_rank(coords) < d) {
    out.degenerate = true;
    out.exact = true;
    return out;
  }
  out.lower_bound = sigma_min(coords) / std::sqrt(static_cast<double>(coords.cols()));
  const bool exact = mode == InradiusMode::Exact || (mode == InradiusMode::Auto && d <= kMaxExactDim);
  if (exact) {
    if (d > kMaxExactDim) throw InvalidParameter("exact inradius limited to dimension 4");
    out.value = 1.0 / polar_circumradius(coords);
    out.exact = true;
  } else {
    out.value = inradius_randomized(coords, seed);
    out.exact = false;
  }
  out.gap = out.value > 0.0 ? (out.value - out.lower_bound) / out.value : 0.0;
  return out;
}

double polar_duality_check(const SymmetricPolytope& polytope, const Matrix& carrier) {
  const Matrix coords = to_coords(polytope.generators(), carrier);
  if (coords.rows() > kMaxExactDim) {
    throw InvalidParameter("polar duality check limited to dimension 4");
  }
  if (numeric_rank(coords) < coords.rows()) {
    throw InvalidParameter("generators do not span the carrier");
  }
  return std::abs(inradius_by_facets(coords) * polar_circumradius(coords) - 1.0);
}

std::optional<double> perturbation_inradius_bound(double q_inradius, double delta) {
  if (!(q_inradius > delta) || delta < 0.0) return std::nullopt;
  return q_inradius - delta;
}

namespace {

struct Job {
  int subspace;
  Index column;
  Index position;  // position within the subspace's member list
};

std::vector<Job> leave_one_out_jobs(const SubspaceEnsemble& truth) {
  std::vector<Job> jobs;
  for (int k = 0; k < truth.num_subspaces(); ++k) {
    const auto& members = truth.members(k);
    for (std::size_t p = 0; p < members.size(); ++p) {
      jobs.push_back(Job{k, members[p], static_cast<Index>(p)});
    }
  }
  return jobs;
}

InradiusResult leave_one_out_inradius(const Matrix& coords, const Job& job, InradiusMode mode) {
  InradiusResult out;
  const Index d = coords.rows();
  if (coords.cols() < 2) {
    out.degenerate = true;
    return out;
  }
  Matrix rest = drop_column(coords, job.position);
  if (numeric_rank(rest) < d) {
    out.degenerate = true;
    out.exact = true;
    return out;
  }
  const bool exact = mode == InradiusMode::Exact || (mode == InradiusMode::Auto && d <= kMaxExactDim);
  if (exact) {
    if (d > kMaxExactDim) throw InvalidParameter("exact inradius limited to dimension 4");
    out.value = 1.0 / polar_circumradius(rest);
    out.exact = true;
  } else {
    out.value = inradius_randomized(rest, static_cast<std::uint64_t>(job.column));
  }
  return out;
}

RadiiResult assemble(const SubspaceEnsemble& truth, const std::vector<Job>& jobs,
                     const std::vector<InradiusResult>& results) {
  RadiiResult out;
  const Index N = truth.num_samples();
  out.per_column.assign(static_cast<std::size_t>(N), 0.0);
  out.degenerate.assign(static_cast<std::size_t>(N), false);
  out.r_ell.assign(static_cast<std::size_t>(truth.num_subspaces()),
                   std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < jobs.size(); ++t) {
    const Job& job = jobs[t];
    const InradiusResult& res = results[t];
    out.per_column[job.column] = res.degenerate ? 0.0 : res.value;
    out.degenerate[job.column] = res.degenerate;
    out.any_degenerate = out.any_degenerate || res.degenerate;
    out.exact = out.exact && res.exact;
    out.r_ell[job.subspace] = std::min(out.r_ell[job.subspace], out.per_column[job.column]);
  }
  out.r = std::numeric_limits<double>::infinity();
  for (double v : out.r_ell) out.r = std::min(out.r, v);
  return out;
}

std::vector<Matrix> subspace_coords(const DataMatrix& Y, const SubspaceEnsemble& truth) {
  if (truth.num_samples() != Y.cols() || truth.ambient_dim() != Y.rows()) {
    throw DimensionMismatch("Y and the subspace ensemble disagree in shape");
  }
  std::vector<Matrix> coords;
  for (int k = 0; k < truth.num_subspaces(); ++k) {
    const Matrix members = Y.values()(Eigen::all, truth.members(k));
    coords.push_back(to_coords(members, truth.basis(k)));
  }
  return coords;
}

}  // namespace

RadiiResult compute_r(const DataMatrix& Y, const SubspaceEnsemble& truth, InradiusMode mode) {
  const std::vector<Matrix> coords = subspace_coords(Y, truth);
  const std::vector<Job> jobs = leave_one_out_jobs(truth);
  std::vector<InradiusResult> results(jobs.size());
  const long count = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < count; ++t) {
    results[t] = leave_one_out_inradius(coords[jobs[t].subspace], jobs[t], mode);
  }
  return assemble(truth, jobs, results);
}

RadiiResult compute_r_serial(const DataMatrix& Y, const SubspaceEnsemble& truth,
                             InradiusMode mode) {
  const std::vector<Matrix> coords = subspace_coords(Y, truth);
  const std::vector<Job> jobs = leave_one_out_jobs(truth);
  std::vector<InradiusResult> results;
  for (const Job& job : jobs) results.push_back(leave_one_out_inradius(coords[job.subspace], job, mode));
  return assemble(truth, jobs, results);
}

IncoherenceResult compute_incoherence(const DataMatrix& X, const DataMatrix& Y,
                                      const SubspaceEnsemble& truth, double lambda,
                                      const SolverOptions& opts) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols() || truth.num_samples() != X.cols()) {
    throw DimensionMismatch("X, Y and the subspace ensemble disagree in shape");
  }
  const int L = truth.num_subspaces();
  const Index N = X.cols();
  IncoherenceResult out;
  out.undefined = L < 2;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.nu_norm.assign(static_cast<std::size_t>(N), nan);
  out.nu_parallel.assign(static_cast<std::size_t>(N), nan);
  out.nu_perp.assign(static_cast<std::size_t>(N), nan);

  std::vector<Matrix> own(static_cast<std::size_t>(L));
  std::vector<Matrix> foreign(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) {
    own[k] = X.values()(Eigen::all, truth.members(k));
    std::vector<Index> others;
    for (Index j = 0; j < N; ++j)
      if (truth.labels()[j] != k + 1) others.push_back(j);
    foreign[k] = Y.values()(Eigen::all, others);
  }
  const std::vector<Job> jobs = leave_one_out_jobs(truth);
  const long count = static_cast<long>(jobs.size());
  std::vector<double> coherence(jobs.size(), -1.0);
  std::vector<std::exception_ptr> errors(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < count; ++t) {
    const Job& job = jobs[t];
    const Matrix& M = own[job.subspace];
    if (M.cols() < 2) continue;
    try {
      const ColumnSolution sol =
          solve_column(M.col(job.position), drop_column(M, job.position), lambda, opts);
      const double norm = sol.nu.norm();
      if (sol.degenerate_dual || norm == 0.0) continue;
      const Matrix& U = truth.basis(job.subspace);
      const Vector par = U * (U.transpose() * sol.nu);
      out.nu_norm[job.column] = norm;
      out.nu_parallel[job.column] = par.norm();
      out.nu_perp[job.column] = (sol.nu - par).norm();
      const Vector v = sol.nu / norm;
      coherence[t] = foreign[job.subspace].cols() > 0
                         ? (foreign[job.subspace].transpose() * v).cwiseAbs().maxCoeff()
                         : 0.0;
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (std::size_t t = 0; t < jobs.size(); ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const std::exception& ex) {
      throw ColumnError(jobs[t].column, ex.what());
    }
  }
  std::vector<double> mu_ell(static_cast<std::size_t>(L), 0.0);
  for (std::size_t t = 0; t < jobs.size(); ++t) {
    if (coherence[t] < 0.0) {
      ++out.skipped;
      continue;
    }
    mu_ell[jobs[t].subspace] = std::max(mu_ell[jobs[t].subspace], coherence[t]);
  }
  if (!out.undefined) {
    out.mu_ell = mu_ell;
    for (double m : mu_ell) out.mu = std::max(out.mu, m);
  }
  return out;
}

}  // namespace lsssc
