#include "lathop/generator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lathop/csv.hpp"

namespace lathop {

namespace kn = lathop::kernels;

Generator::Generator(Lattice lattice, kn::CsrMatrix h)
    : lattice_(std::move(lattice)), h_(std::move(h)) {
  if (h_.rows != lattice_.volume()) throw InputError("generator size does not match lattice");
  for (std::size_t r = 0; r < h_.rows; ++r)
    for (std::size_t k = h_.row_ptr[r]; k < h_.row_ptr[r + 1]; ++k) {
      const std::size_t c = h_.col[k];
      bandwidth_ = std::max(bandwidth_, c > r ? c - r : r - c);
    }
}

double Generator::norm_estimate() const {
  double best = 0.0;
  for (std::size_t r = 0; r < h_.rows; ++r) {
    double s = 0.0;
    for (std::size_t k = h_.row_ptr[r]; k < h_.row_ptr[r + 1]; ++k) s += std::abs(h_.val[k]);
    best = std::max(best, s);
  }
  return best;
}

WaveField Generator::apply(const WaveField& psi) const {
  WaveField out(lattice_);
  kn::matvec(h_, psi.data(), out.data());
  return out;
}

double Generator::expectation(const WaveField& psi) const {
  const WaveField hpsi = apply(psi);
  return inner_product(psi, hpsi).real();
}

Eigen::MatrixXcd Generator::dense() const {
  if (h_.rows > kDenseLimit) throw InputError("generator too large for dense materialization");
  const auto n = static_cast<Eigen::Index>(h_.rows);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t r = 0; r < h_.rows; ++r)
    for (std::size_t k = h_.row_ptr[r]; k < h_.row_ptr[r + 1]; ++k)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(h_.col[k])) += h_.val[k];
  return m;
}

Generator build_generator(const HoppingModel& mdl) {
  const Lattice& lat = mdl.lattice();
  const int radius = mdl.kernel().radius();
  if (2 * radius >= lat.min_extent())
    throw InputError("kernel range too large for the lattice: offsets would self-wrap");
  const auto& hops = mdl.kernel().hopping_offsets();
  const cplx i{0.0, 1.0};

  kn::CsrMatrix h;
  h.rows = lat.volume();
  h.row_ptr.assign(h.rows + 1, 0);
  std::vector<std::pair<std::size_t, cplx>> row;
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    row.clear();
    const cplx diag = i * mdl.onsite_at(x);
    if (diag != cplx{}) row.emplace_back(x, diag);
    for (const auto& n : hops) {
      const cplx amp = amplitude_at(mdl, x, n);
      if (amp != cplx{}) row.emplace_back(lat.neighbor(x, n), i * amp);
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [c, v] : row) {
      if (!h.col.empty() && h.col.size() > h.row_ptr[x] && h.col.back() == c) {
        h.val.back() += v;
        continue;
      }
      h.col.push_back(c);
      h.val.push_back(v);
    }
    h.row_ptr[x + 1] = h.col.size();
  }
  return {lat, std::move(h)};
}

double hermiticity_defect(const Generator& g) {
  const auto& h = g.matrix();
  double worst = 0.0;
  for (std::size_t r = 0; r < h.rows; ++r)
    for (std::size_t k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k) {
      const std::size_t c = h.col[k];
      worst = std::max(worst, std::abs(h.val[k] - std::conj(h.at(c, r))));
    }
  return worst;
}

WaveField step_crank_nicolson(const WaveField& psi, const Generator& g, double dt,
                              const CrankNicolsonOptions& opts, SolveStats* stats) {
  const auto& h = g.matrix();
  const std::size_t n = h.rows;
  const cplx half{0.0, 0.5 * dt};

  std::vector<cplx> b(n);
  kn::shifted_apply(h, -half, psi.data(), b);
  const double bnorm = std::sqrt(kn::norm_sq(b));
  WaveField out(psi.lattice(), psi.amplitudes());
  if (bnorm == 0.0) {
    if (stats) *stats = {};
    return out;
  }

  std::vector<cplx> inv_diag(n);
  for (std::size_t r = 0; r < n; ++r) inv_diag[r] = 1.0 / (1.0 + half * h.at(r, r));

  auto x = out.data();
  std::vector<cplx> r(n), rhat(n), p(n, 0.0), v(n, 0.0), phat(n), s(n), shat(n), t(n);
  kn::shifted_apply(h, half, x, r);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - r[k];
  rhat = r;
  cplx rho{1.0}, alpha{1.0}, omega{1.0};
  double rel = std::sqrt(kn::norm_sq(r)) / bnorm;
  int it = 0;
  while (rel > opts.tolerance && it < opts.max_iterations) {
    ++it;
    const cplx rho_new = kn::dot(rhat, r);
    if (rho_new == cplx{}) break;
    const cplx beta = (rho_new / rho) * (alpha / omega);
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    kn::scale_by(inv_diag, p, phat);
    kn::shifted_apply(h, half, phat, v);
    alpha = rho_new / kn::dot(rhat, v);
    for (std::size_t k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
    if (std::sqrt(kn::norm_sq(s)) / bnorm <= opts.tolerance) {
      kn::axpy(alpha, phat, x);
      r = s;
      rel = std::sqrt(kn::norm_sq(r)) / bnorm;
      break;
    }
    kn::scale_by(inv_diag, s, shat);
    kn::shifted_apply(h, half, shat, t);
    const double tt = kn::norm_sq(t);
    if (tt == 0.0) break;
    omega = kn::dot(t, s) / tt;
    kn::axpy(alpha, phat, x);
    kn::axpy(omega, shat, x);
    for (std::size_t k = 0; k < n; ++k) r[k] = s[k] - omega * t[k];
    rel = std::sqrt(kn::norm_sq(r)) / bnorm;
    rho = rho_new;
  }

  // recurrence residuals drift; judge on the true one
  kn::shifted_apply(h, half, x, r);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - r[k];
  rel = std::sqrt(kn::norm_sq(r)) / bnorm;
  if (stats) *stats = {it, rel};
  if (!(rel <= opts.accept)) {
    std::ostringstream os;
    os << "Crank-Nicolson solve did not converge: " << it << " iterations, relative residual "
       << rel;
    throw SolverError(os.str());
  }
  return out;
}

WaveField step_euler(const WaveField& psi, const Generator& g, double dt) {
  WaveField out(psi.lattice());
  kn::shifted_apply(g.matrix(), cplx{0.0, -dt}, psi.data(), out.data());
  return out;
}

void check_explicit_stability(const Generator& g, double dt) {
  const double bound = dt * g.norm_estimate();
  if (bound > 0.5) {
    std::ostringstream os;
    os << "explicit step unstable: dt*|H| = " << bound << " > 0.5";
    throw StabilityError(os.str());
  }
}

namespace {

TrajectoryRow observe(std::size_t step, double time, const WaveField& psi, const Generator& g,
                      const WaveField& reference) {
  TrajectoryRow row;
  row.step = step;
  row.time = time;
  row.norm = psi.norm();
  row.energy = g.expectation(psi);
  for (int ax = 0; ax < psi.lattice().dim(); ++ax) row.mean_x.push_back(mean_position(psi, ax));
  row.var_x = position_variance(psi);
  row.overlap = inner_product(reference, psi);
  return row;
}

}  // namespace

std::string Trajectory::to_csv() const {
  std::ostringstream os;
  os << "step,time,norm,energy";
  for (int i = 0; i < dim; ++i) os << ",mean_x" << i;
  os << ",var_x,overlap_re,overlap_im\n";
  for (const auto& r : rows) {
    os << r.step << ',' << csv::format_double(r.time) << ',' << csv::format_double(r.norm) << ','
       << csv::format_double(r.energy);
    for (double m : r.mean_x) os << ',' << csv::format_double(m);
    os << ',' << csv::format_double(r.var_x) << ',' << csv::format_double(r.overlap.real())
       << ',' << csv::format_double(r.overlap.imag()) << '\n';
  }
  return os.str();
}

Trajectory evolve(const WaveField& psi0, const Generator& g, const TimeGrid& grid,
                  Stepper stepper, const std::optional<WaveField>& reference) {
  if (!(grid.dt > 0.0) && grid.steps > 0) throw InputError("time step must be positive");
  if (grid.record_every == 0) throw InputError("record_every must be >= 1");
  if (!(psi0.lattice() == g.lattice())) throw InputError("initial state lattice mismatch");
  if (stepper == Stepper::euler && grid.steps > 0) check_explicit_stability(g, grid.dt);
  const WaveField& ref = reference ? *reference : psi0;

  Trajectory traj{psi0.lattice().dim(), {}, psi0};
  traj.rows.push_back(observe(0, 0.0, psi0, g, ref));
  WaveField psi = psi0;
  for (std::size_t s = 1; s <= grid.steps; ++s) {
    psi = stepper == Stepper::crank_nicolson ? step_crank_nicolson(psi, g, grid.dt)
                                             : step_euler(psi, g, grid.dt);
    if (s % grid.record_every == 0 || s == grid.steps)
      traj.rows.push_back(observe(s, static_cast<double>(s) * grid.dt, psi, g, ref));
  }
  traj.final_state = std::move(psi);
  return traj;
}

std::vector<EigenPair> eigensolve_dense(const Generator& g, std::size_t count) {
  if (g.dimension() > kDenseLimit) throw InputError("dense eigensolve limited to V <= 4096");
  count = std::min(count, g.dimension());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.dense());
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
  const double scale = 1.0 / std::sqrt(g.lattice().cell_measure());
  std::vector<EigenPair> out;
  for (std::size_t j = 0; j < count; ++j) {
    const auto col = es.eigenvectors().col(static_cast<Eigen::Index>(j));
    std::vector<cplx> amp(col.data(), col.data() + col.size());
    for (auto& v : amp) v *= scale;
    out.push_back({es.eigenvalues()(static_cast<Eigen::Index>(j)),
                   WaveField(g.lattice(), std::move(amp))});
  }
  return out;
}

std::vector<double> spectrum_dense(const Generator& g) {
  if (g.dimension() > kDenseLimit) throw InputError("dense eigensolve limited to V <= 4096");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double dispersion_relation(const HomogeneousKernel& k, std::span<const double> kvec) {
  if (static_cast<int>(kvec.size()) != k.dim())
    throw InputError("wave vector dimension does not match kernel");
  cplx e{};
  for (const auto& [n, v] : k.amplitudes()) {
    double phase = 0.0;
    for (int i = 0; i < k.dim(); ++i) phase += kvec[i] * n[i];
    e += v * std::polar(1.0, k.spacing() * phase);
  }
  return (cplx{0.0, 1.0} * e).real();
}

}  // namespace lathop
