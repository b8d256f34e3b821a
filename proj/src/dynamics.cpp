#include "wavebound/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavebound/errors.hpp"
#include "wavebound/quadrature.hpp"

namespace wavebound {

const char* to_string(ProfileRoute r) {
  switch (r) {
    case ProfileRoute::resolvent: return "resolvent";
    case ProfileRoute::propagation: return "propagation";
    case ProfileRoute::spectral_projection: return "spectral-projection";
  }
  return "unknown";
}

double TimeAveragedProfile::value_at(double L) const {
  if (!(L >= 0.0)) throw ValidationError("L must be >= 0");
  const long n = static_cast<long>(std::floor(L));
  const double frac = L - static_cast<double>(n);
  const long size = static_cast<long>(density.size());
  if (n + (frac > 0.0 ? 1 : 0) > size && lattice_size != size)
    throw RangeError("L beyond the computed site density");
  double s = 0.0;
  for (long k = 1; k <= std::min(n, size); ++k) s += density[static_cast<std::size_t>(k - 1)];
  if (frac > 0.0 && n + 1 <= size) s += frac * density[static_cast<std::size_t>(n)];
  return s;
}

namespace {

constexpr double kPi = std::numbers::pi;

void check_T(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T must be positive and finite");
}

void check_grid(const std::vector<double>& L_grid) {
  if (L_grid.empty()) throw ValidationError("L grid is empty");
  for (double L : L_grid)
    if (!(L >= 0.0) || !std::isfinite(L)) throw ValidationError("L values must be finite and >= 0");
}

// Sum over sites 1..floor(L) plus the fractional term, from prefix sums of |phi|^2.
double prefix_norm(const std::vector<double>& prefix, double L) {
  const long size = static_cast<long>(prefix.size()) - 1;
  const long n = static_cast<long>(std::floor(L));
  const double frac = L - static_cast<double>(n);
  if (n >= size) return prefix[static_cast<std::size_t>(size)];
  return prefix[static_cast<std::size_t>(n)] + frac * (prefix[static_cast<std::size_t>(n + 1)] - prefix[static_cast<std::size_t>(n)]);
}

// Energy coordinate: region 0 is the core window, 1 the right tail and 2 the left tail,
// E = edge +- c s / (1 - s).
struct Coordinates {
  double lo = 0.0, hi = 0.0, c = 1.0;
  double energy(const QuadNode& q, double& jac) const {
    if (q.region == 0) {
      jac = 1.0;
      return q.x;
    }
    const double s = q.x;
    jac = c / ((1.0 - s) * (1.0 - s));
    const double d = c * s / (1.0 - s);
    return q.region == 1 ? hi + d : lo - d;
  }
};

// Splits `n` items into the same fixed blocks regardless of thread count.
template <class F>
void run_chunks(std::size_t n, int threads, F&& body) {
  const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  const std::size_t chunks = std::min(workers, std::max<std::size_t>(n, 1));
  parallel_for(chunks, static_cast<int>(chunks), [&](std::size_t c) {
    const std::size_t from = n * c / chunks, to = n * (c + 1) / chunks;
    body(c, from, to);
  });
}

// Diagonal resolvent element used by the probes: g_1 on the half line, M on the whole line.
struct Evaluator {
  std::vector<ResolventEngine> plus;
  std::vector<ResolventEngine> minus;
  bool whole = false;
  double a0 = 1.0;
  double tail_tol = 1e-11;

  Evaluator(const JacobiOperator& op, int threads, long cap, double tol) : tail_tol(tol) {
    whole = op.side() == Side::whole_line;
    a0 = op.a(0);
    const int n = std::max(1, threads);
    for (int i = 0; i < n; ++i) {
      plus.emplace_back(op, cap);
      if (whole) minus.emplace_back(op.reflected(), cap);
    }
  }

  double im_diag(std::size_t worker, cplx z) {
    std::vector<cplx> x;
    const cplx gp = plus[worker].column_adaptive(z, 1, tail_tol, x).g1;
    if (!whole) return gp.imag();
    const cplx gm = minus[worker].column_adaptive(z, 1, tail_tol, x).g1;
    return (gp / (1.0 - a0 * a0 * gp * gm)).imag();
  }
};

// Multiresolution partition of [lo, hi]: a panel [c - h, c + h] is split
// when the Poisson-smoothed density at scale h/2 on either half departs from
// the value at scale h by more than 20 percent. Stops at width 2/T.
std::vector<Panel> probe_partition(Evaluator& ev, double lo, double hi, double T, int threads) {
  struct Node {
    double a, b, f0;
  };
  const double min_width = 2.0 / T;
  std::vector<Node> level;
  {
    // start from panels of width at most 1
    const long k = std::max<long>(1, static_cast<long>(std::ceil(hi - lo)));
    std::vector<double> f(static_cast<std::size_t>(k));
    run_chunks(static_cast<std::size_t>(k), threads, [&](std::size_t w, std::size_t from, std::size_t to) {
      for (std::size_t i = from; i < to; ++i) {
        const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k);
        const double b = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(k);
        f[i] = ev.im_diag(w, {0.5 * (a + b), 0.5 * (b - a)});
      }
    });
    for (long i = 0; i < k; ++i) {
      const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k);
      const double b = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(k);
      level.push_back({a, b, f[static_cast<std::size_t>(i)]});
    }
  }
  std::vector<Panel> leaves_ordered;
  // Each round probes the children of every open panel; order is preserved
  // by tagging leaves with their left endpoint and sorting at the end.
  while (!level.empty()) {
    std::vector<double> fl(level.size()), fr(level.size());
    std::vector<char> open(level.size(), 0);
    for (std::size_t i = 0; i < level.size(); ++i) {
      const double w = level[i].b - level[i].a;
      const double mass = w * level[i].f0 / kPi;
      open[i] = (w > min_width && mass > 1e-9) ? 1 : 0;
    }
    run_chunks(level.size(), threads, [&](std::size_t wkr, std::size_t from, std::size_t to) {
      for (std::size_t i = from; i < to; ++i) {
        if (!open[i]) continue;
        const double a = level[i].a, b = level[i].b, h = 0.25 * (b - a);
        fl[i] = ev.im_diag(wkr, {a + h, h});
        fr[i] = ev.im_diag(wkr, {b - h, h});
      }
    });
    std::vector<Node> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      const Node& nd = level[i];
      bool split = false;
      if (open[i]) {
        const double f0 = nd.f0;
        const double mx = std::max(fl[i], fr[i]), mn = std::min(fl[i], fr[i]);
        split = mx > 1.2 * f0 || mn * 1.2 < f0;
      }
      if (split) {
        const double m = 0.5 * (nd.a + nd.b);
        next.push_back({nd.a, m, fl[i]});
        next.push_back({m, nd.b, fr[i]});
      } else {
        leaves_ordered.push_back({nd.a, nd.b, 0});
      }
    }
    level = std::move(next);
  }
  std::sort(leaves_ordered.begin(), leaves_ordered.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  return leaves_ordered;
}

std::vector<Panel> initial_panels(Evaluator& ev, const JacobiOperator& op, double T, int threads, Coordinates& co) {
  const auto [slo, shi] = op.spectral_bounds();
  co.lo = slo - 3.0 / T;
  co.hi = shi + 3.0 / T;
  co.c = std::max(1.0, 0.5 * (shi - slo));
  std::vector<Panel> panels = probe_partition(ev, co.lo, co.hi, T, threads);
  for (int r : {1, 2}) {
    panels.push_back({0.0, 0.5, r});
    panels.push_back({0.5, 1.0, r});
  }
  return panels;
}

long keep_for(const std::vector<double>& L_grid, const JacobiOperator& op) {
  double mx = 0.0;
  for (double L : L_grid) mx = std::max(mx, L);
  long keep = static_cast<long>(std::floor(mx)) + 2;
  if (op.last_site() != kUnbounded) keep = std::min(keep, op.last_site());
  return std::max<long>(keep, 1);
}

}  // namespace

TimeAveragedProfile profile_resolvent(const JacobiOperator& op, double T, const std::vector<double>& L_grid,
                                      const ProfileOptions& options) {
  check_T(T);
  check_grid(L_grid);
  if (op.side() != Side::half_line) throw DomainError("profile_resolvent needs a half-line operator");
  const int threads = std::max(1, options.threads);
  Evaluator ev(op, threads, options.depth_cap, options.tail_tol);
  Coordinates co;
  std::vector<Panel> panels = initial_panels(ev, op, T, threads, co);
  const long keep = keep_for(L_grid, op);
  const std::size_t C = 1 + L_grid.size();
  const double eta = 1.0 / T;
  std::vector<long> depth_seen(static_cast<std::size_t>(threads), 0);

  BatchIntegrand f = [&](const std::vector<QuadNode>& nodes, std::vector<double>& values) {
    run_chunks(nodes.size(), threads, [&](std::size_t w, std::size_t from, std::size_t to) {
      std::vector<cplx> x;
      std::vector<double> prefix;
      for (std::size_t i = from; i < to; ++i) {
        double jac = 1.0;
        const double E = co.energy(nodes[i], jac);
        const auto r = ev.plus[w].column_adaptive({E, eta}, keep, options.tail_tol, x);
        depth_seen[w] = std::max(depth_seen[w], r.depth);
        prefix.assign(x.size() + 1, 0.0);
        for (std::size_t n = 0; n < x.size(); ++n) prefix[n + 1] = prefix[n] + std::norm(x[n]);
        values[i * C] = jac * r.g1.imag() / kPi;
        for (std::size_t k = 0; k < L_grid.size(); ++k)
          values[i * C + 1 + k] = jac * prefix_norm(prefix, L_grid[k]) / (kPi * T);
      }
    });
  };
  QuadratureOptions qo;
  qo.abs_tol = options.abs_tol;
  qo.max_panels = options.max_panels;
  const QuadratureResult qr = gk15_adaptive(f, static_cast<int>(C), std::move(panels), qo);
  if (!qr.converged)
    throw ConvergenceError("profile quadrature did not reach the tolerance", qr.integral[0], qr.error);

  // Second pass on the final panels accumulates the site density in fixed
  // blocks of panels so that the sum order does not depend on threads.
  TimeAveragedProfile out;
  out.T = T;
  out.L_grid = L_grid;
  out.route = ProfileRoute::resolvent;
  out.total = qr.integral[0];
  out.achieved_tol = qr.error;
  out.panels = static_cast<long>(qr.leaves.size());
  out.density.assign(static_cast<std::size_t>(keep), 0.0);
  if (op.last_site() != kUnbounded && keep == op.last_site()) out.lattice_size = keep;
  const std::size_t block = 16;
  const std::size_t nblocks = (qr.leaves.size() + block - 1) / block;
  const std::size_t wave = static_cast<std::size_t>(threads);
  for (std::size_t b0 = 0; b0 < nblocks; b0 += wave) {
    const std::size_t nb = std::min(wave, nblocks - b0);
    std::vector<std::vector<double>> part(nb, std::vector<double>(static_cast<std::size_t>(keep), 0.0));
    parallel_for(nb, static_cast<int>(nb), [&](std::size_t j) {
      std::vector<cplx> x;
      double nodes[15], wk[15];
      const std::size_t first = (b0 + j) * block, last = std::min(first + block, qr.leaves.size());
      for (std::size_t p = first; p < last; ++p) {
        gk15_rule(qr.leaves[p].a, qr.leaves[p].b, nodes, wk);
        for (int i = 0; i < 15; ++i) {
          double jac = 1.0;
          const double E = co.energy({nodes[i], qr.leaves[p].region}, jac);
          const auto r = ev.plus[j].column_adaptive({E, eta}, keep, options.tail_tol, x);
          depth_seen[j] = std::max(depth_seen[j], r.depth);
          const double wgt = wk[i] * jac / (kPi * T);
          for (std::size_t n = 0; n < x.size(); ++n) part[j][n] += wgt * std::norm(x[n]);
        }
      }
    });
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t n = 0; n < out.density.size(); ++n) out.density[n] += part[j][n];
  }
  out.evaluations = qr.evaluations + static_cast<long>(qr.leaves.size()) * 15;
  out.max_depth = *std::max_element(depth_seen.begin(), depth_seen.end());
  std::vector<double> prefix(out.density.size() + 1, 0.0);
  for (std::size_t n = 0; n < out.density.size(); ++n) prefix[n + 1] = prefix[n] + out.density[n];
  out.values.resize(L_grid.size());
  for (std::size_t k = 0; k < L_grid.size(); ++k) out.values[k] = prefix_norm(prefix, L_grid[k]);
  return out;
}

WholeLineProfile profile_resolvent_whole(const JacobiOperator& op, double T,
                                         const std::vector<std::pair<double, double>>& L,
                                         const ProfileOptions& options) {
  check_T(T);
  if (op.side() != Side::whole_line) throw DomainError("profile_resolvent_whole needs a whole-line operator");
  if (L.empty()) throw ValidationError("L grid is empty");
  std::vector<double> L1, L2;
  for (const auto& [l1, l2] : L) {
    if (!(l1 >= 0.0) || !(l2 >= 0.0) || !std::isfinite(l1) || !std::isfinite(l2))
      throw ValidationError("L1, L2 must be finite and >= 0");
    L1.push_back(l1);
    L2.push_back(l2);
  }
  const int threads = std::max(1, options.threads);
  Evaluator ev(op, threads, options.depth_cap, options.tail_tol);
  const JacobiOperator left = op.reflected();
  Coordinates co;
  std::vector<Panel> panels = initial_panels(ev, op, T, threads, co);
  // right side sites 1..keep_r; left side sites 0, -1, ... as reflected sites 1..keep_l
  const long keep_r = keep_for(L2, op);
  long keep_l = 0;
  {
    std::vector<double> shifted;
    for (double l : L1) shifted.push_back(l + 1.0);
    keep_l = keep_for(shifted, left);
  }
  const std::size_t C = 1 + L.size();
  const double eta = 1.0 / T;
  const double a0 = op.a(0);

  auto row = [&](std::size_t w, double E, std::vector<cplx>& xr, std::vector<cplx>& xl, cplx& Mz) {
    const cplx gp = ev.plus[w].column_adaptive({E, eta}, keep_r, options.tail_tol, xr).g1;
    const cplx gm = ev.minus[w].column_adaptive({E, eta}, keep_l, options.tail_tol, xl).g1;
    const cplx den = 1.0 - a0 * a0 * gp * gm;
    Mz = gp / den;
    // G(1,n) = x_+(n) / den for n >= 1 and -a0 M x_-(1 - n) for n <= 0
    for (cplx& v : xr) v /= den;
    for (cplx& v : xl) v *= -a0 * Mz;
  };
  auto two_sided = [](const std::vector<double>& pr, const std::vector<double>& pl, double l1, double l2) {
    // pl[k] = sum over sites 0, -1, ..., -(k-1); site -j sits at index j
    return prefix_norm(pr, l2) + prefix_norm(pl, l1 + 1.0);
  };

  BatchIntegrand f = [&](const std::vector<QuadNode>& nodes, std::vector<double>& values) {
    run_chunks(nodes.size(), threads, [&](std::size_t w, std::size_t from, std::size_t to) {
      std::vector<cplx> xr, xl;
      std::vector<double> pr, pl;
      for (std::size_t i = from; i < to; ++i) {
        double jac = 1.0;
        const double E = co.energy(nodes[i], jac);
        cplx Mz;
        row(w, E, xr, xl, Mz);
        pr.assign(xr.size() + 1, 0.0);
        for (std::size_t n = 0; n < xr.size(); ++n) pr[n + 1] = pr[n] + std::norm(xr[n]);
        pl.assign(xl.size() + 1, 0.0);
        for (std::size_t n = 0; n < xl.size(); ++n) pl[n + 1] = pl[n] + std::norm(xl[n]);
        values[i * C] = jac * Mz.imag() / kPi;
        for (std::size_t k = 0; k < L.size(); ++k)
          values[i * C + 1 + k] = jac * two_sided(pr, pl, L1[k], L2[k]) / (kPi * T);
      }
    });
  };
  QuadratureOptions qo;
  qo.abs_tol = options.abs_tol;
  qo.max_panels = options.max_panels;
  const QuadratureResult qr = gk15_adaptive(f, static_cast<int>(C), std::move(panels), qo);
  if (!qr.converged)
    throw ConvergenceError("whole-line profile quadrature did not reach the tolerance", qr.integral[0], qr.error);

  WholeLineProfile out;
  out.T = T;
  out.L = L;
  out.total = qr.integral[0];
  out.achieved_tol = qr.error;
  out.density_right.assign(static_cast<std::size_t>(keep_r), 0.0);
  out.density_left.assign(static_cast<std::size_t>(keep_l), 0.0);
  const std::size_t block = 16;
  const std::size_t nblocks = (qr.leaves.size() + block - 1) / block;
  const std::size_t wave = static_cast<std::size_t>(threads);
  for (std::size_t b0 = 0; b0 < nblocks; b0 += wave) {
    const std::size_t nb = std::min(wave, nblocks - b0);
    std::vector<std::vector<double>> pr(nb, std::vector<double>(out.density_right.size(), 0.0));
    std::vector<std::vector<double>> pl(nb, std::vector<double>(out.density_left.size(), 0.0));
    parallel_for(nb, static_cast<int>(nb), [&](std::size_t j) {
      std::vector<cplx> xr, xl;
      double nodes[15], wk[15];
      const std::size_t first = (b0 + j) * block, last = std::min(first + block, qr.leaves.size());
      for (std::size_t p = first; p < last; ++p) {
        gk15_rule(qr.leaves[p].a, qr.leaves[p].b, nodes, wk);
        for (int i = 0; i < 15; ++i) {
          double jac = 1.0;
          const double E = co.energy({nodes[i], qr.leaves[p].region}, jac);
          cplx Mz;
          row(j, E, xr, xl, Mz);
          const double wgt = wk[i] * jac / (kPi * T);
          for (std::size_t n = 0; n < xr.size(); ++n) pr[j][n] += wgt * std::norm(xr[n]);
          for (std::size_t n = 0; n < xl.size(); ++n) pl[j][n] += wgt * std::norm(xl[n]);
        }
      }
    });
    for (std::size_t j = 0; j < nb; ++j) {
      for (std::size_t n = 0; n < out.density_right.size(); ++n) out.density_right[n] += pr[j][n];
      for (std::size_t n = 0; n < out.density_left.size(); ++n) out.density_left[n] += pl[j][n];
    }
  }
  out.evaluations = qr.evaluations + static_cast<long>(qr.leaves.size()) * 15;
  std::vector<double> pr(out.density_right.size() + 1, 0.0), pl(out.density_left.size() + 1, 0.0);
  for (std::size_t n = 0; n < out.density_right.size(); ++n) pr[n + 1] = pr[n] + out.density_right[n];
  for (std::size_t n = 0; n < out.density_left.size(); ++n) pl[n + 1] = pl[n] + out.density_left[n];
  for (std::size_t k = 0; k < L.size(); ++k) out.values.push_back(two_sided(pr, pl, L1[k], L2[k]));
  return out;
}

namespace {

struct Lattice1D {
  std::vector<double> a;  // a[i] couples i and i+1
  std::vector<double> b;
  double center = 0.0;
  double half_width = 1.0;
  bool truncated = false;
};

Lattice1D make_lattice(const JacobiOperator& op, long n_sites) {
  if (op.side() != Side::half_line) throw DomainError("propagation needs a half-line operator");
  Lattice1D lat;
  long n = n_sites;
  if (op.last_site() != kUnbounded) {
    n = op.last_site();
  } else {
    lat.truncated = true;
  }
  lat.a.assign(static_cast<std::size_t>(n), 0.0);
  lat.b.assign(static_cast<std::size_t>(n), 0.0);
  op.fill(1, n, lat.a.data(), lat.b.data());
  lat.a.back() = 0.0;
  double lo = 0.0, hi = 0.0;
  for (long i = 0; i < n; ++i) {
    double r = std::fabs(lat.a[static_cast<std::size_t>(i)]);
    if (i > 0) r += std::fabs(lat.a[static_cast<std::size_t>(i - 1)]);
    const double c = lat.b[static_cast<std::size_t>(i)];
    lo = i == 0 ? c - r : std::min(lo, c - r);
    hi = i == 0 ? c + r : std::max(hi, c + r);
  }
  lat.center = 0.5 * (lo + hi);
  lat.half_width = std::max(1e-12, 0.5 * (hi - lo) * 1.01);
  return lat;
}

// y = (H - center) / half_width * x
void apply_scaled(const Lattice1D& lat, const std::vector<cplx>& x, std::vector<cplx>& y) {
  const std::size_t n = x.size();
  const double inv = 1.0 / lat.half_width;
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = (lat.b[i] - lat.center) * x[i];
    if (i + 1 < n) s += lat.a[i] * x[i + 1];
    if (i > 0) s += lat.a[i - 1] * x[i - 1];
    y[i] = s * inv;
  }
}

std::vector<cplx> chebyshev_coefficients(double x, double cutoff) {
  std::vector<cplx> c;
  int below = 0;
  for (int k = 0;; ++k) {
    const double j = std::cyl_bessel_j(static_cast<double>(k), x);
    cplx ik{1.0, 0.0};
    switch (k % 4) {
      case 1: ik = {0.0, -1.0}; break;
      case 2: ik = {-1.0, 0.0}; break;
      case 3: ik = {0.0, 1.0}; break;
      default: break;
    }
    c.push_back((k == 0 ? 1.0 : 2.0) * j * ik);
    if (k > x && std::fabs(j) < cutoff) {
      if (++below >= 2) break;
    } else {
      below = 0;
    }
    if (k > 100000) throw ConvergenceError("Chebyshev order exceeded", 0.0, std::fabs(j));
  }
  return c;
}

// psi <- e^{-iH dt} psi with precomputed coefficients
void chebyshev_step(const Lattice1D& lat, const std::vector<cplx>& coef, double dt, std::vector<cplx>& psi,
                    std::vector<cplx>& v0, std::vector<cplx>& v1, std::vector<cplx>& v2, std::vector<cplx>& acc) {
  const std::size_t n = psi.size();
  v0 = psi;
  apply_scaled(lat, v0, v1);
  for (std::size_t i = 0; i < n; ++i) acc[i] = coef[0] * v0[i] + coef[1] * v1[i];
  for (std::size_t k = 2; k < coef.size(); ++k) {
    apply_scaled(lat, v1, v2);
    for (std::size_t i = 0; i < n; ++i) {
      v2[i] = 2.0 * v2[i] - v0[i];
      acc[i] += coef[k] * v2[i];
    }
    std::swap(v0, v1);
    std::swap(v1, v2);
  }
  const cplx phase = std::exp(cplx{0.0, -lat.center * dt});
  for (std::size_t i = 0; i < n; ++i) psi[i] = phase * acc[i];
}

}  // namespace

std::vector<cplx> propagate_state(const JacobiOperator& op, double t, long n_sites, double bessel_cutoff) {
  if (!(t >= 0.0)) throw ValidationError("t must be >= 0");
  const Lattice1D lat = make_lattice(op, n_sites);
  const std::size_t n = lat.b.size();
  std::vector<cplx> psi(n, 0.0), v0(n), v1(n), v2(n), acc(n);
  psi[0] = 1.0;
  if (t == 0.0) return psi;
  // split long times into steps with moderate Chebyshev order
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(lat.half_width * t / 20.0)));
  const double dt = t / static_cast<double>(steps);
  const std::vector<cplx> coef = chebyshev_coefficients(lat.half_width * dt, bessel_cutoff);
  for (long s = 0; s < steps; ++s) chebyshev_step(lat, coef, dt, psi, v0, v1, v2, acc);
  return psi;
}

TimeAveragedProfile profile_propagate(const JacobiOperator& op, double T, const std::vector<double>& L_grid,
                                      const PropagationOptions& options) {
  check_T(T);
  check_grid(L_grid);
  const double t_max = options.t_max > 0.0 ? options.t_max : 12.5 * T;
  if (t_max < 12.5 * T * (1.0 - 1e-12)) throw ValidationError("t_max must be at least 25 T / 2");
  const auto [slo, shi] = op.spectral_bounds();
  const double radius = std::max(std::fabs(slo), std::fabs(shi));
  const long n_sites = static_cast<long>(std::ceil(t_max * radius)) + std::max<long>(options.padding, 8);
  const Lattice1D lat = make_lattice(op, n_sites);
  const std::size_t n = lat.b.size();

  double dt = options.dt > 0.0 ? options.dt : std::min(0.1, 0.1 / lat.half_width);
  if (dt > 0.1) throw ValidationError("time step must not exceed 0.1");
  long M = static_cast<long>(std::ceil(t_max / dt));
  if (M % 2) ++M;
  dt = t_max / static_cast<double>(M);
  const std::vector<cplx> coef = chebyshev_coefficients(lat.half_width * dt, options.bessel_cutoff);

  TimeAveragedProfile out;
  out.T = T;
  out.L_grid = L_grid;
  out.route = ProfileRoute::propagation;
  out.values.assign(L_grid.size(), 0.0);
  out.lattice_size = static_cast<long>(n);
  out.density.assign(n, 0.0);

  std::vector<cplx> psi(n, 0.0), v0(n), v1(n), v2(n), acc(n);
  psi[0] = 1.0;
  std::vector<double> prefix(n + 1, 0.0);
  for (long j = 0; j <= M; ++j) {
    if (j > 0) chebyshev_step(lat, coef, dt, psi, v0, v1, v2, acc);
    const double t = dt * static_cast<double>(j);
    const double simpson = (j == 0 || j == M) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    const double w = simpson * dt / 3.0 * (2.0 / T) * std::exp(-2.0 * t / T);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = std::norm(psi[i]);
      prefix[i + 1] = prefix[i] + p;
      out.density[i] += w * p;
    }
    out.unitarity_drift = std::max(out.unitarity_drift, std::fabs(prefix[n] - 1.0));
    if (lat.truncated) {
      const double edge = prefix[n] - prefix[n >= 5 ? n - 5 : 0];
      out.boundary_mass = std::max(out.boundary_mass, edge);
    }
    for (std::size_t k = 0; k < L_grid.size(); ++k) out.values[k] += w * prefix_norm(prefix, L_grid[k]);
    out.total += w * prefix[n];
  }
  if (lat.truncated && out.boundary_mass > options.boundary_tol)
    throw ResourceError("probability reached the lattice edge; enlarge the padding", static_cast<long>(n),
                        static_cast<long>(2 * n));
  if (!lat.truncated) out.lattice_size = static_cast<long>(n);
  out.achieved_tol = std::exp(-2.0 * t_max / T);
  return out;
}

std::vector<cplx> evolve_projected(const SpectralDecomposition& dec, const IntervalUnion& S, double t, long n_max) {
  if (n_max < 1 || n_max > dec.rows) throw RangeError("n_max outside the stored eigenvector rows");
  std::vector<cplx> out(static_cast<std::size_t>(n_max), 0.0);
  const long N = dec.atoms.truncation;
  for (long j = 0; j < N; ++j) {
    const double E = dec.atoms.energies[static_cast<std::size_t>(j)];
    if (!S.contains(E)) continue;
    const cplx phase = std::exp(cplx{0.0, -E * t});
    const double p1 = dec.component(1, j);
    for (long n = 1; n <= n_max; ++n) out[static_cast<std::size_t>(n - 1)] += phase * (dec.component(n, j) * p1);
  }
  return out;
}

std::vector<cplx> evolve_projected(const JacobiOperator& op, const IntervalUnion& S, double t, long n_max, long N) {
  const SpectralDecomposition dec = spectral_decomposition(op, N, n_max);
  return evolve_projected(dec, S, t, n_max);
}

double projected_profile(const SpectralDecomposition& dec, const std::vector<std::size_t>& members, double T,
                         double L) {
  check_T(T);
  if (!(L >= 0.0)) throw ValidationError("L must be >= 0");
  const long nf = static_cast<long>(std::floor(L));
  const double frac = L - static_cast<double>(nf);
  const long rows_needed = nf + (frac > 0.0 ? 1 : 0);
  if (rows_needed > dec.rows) throw RangeError("L exceeds the stored eigenvector rows");
  const std::size_t m = members.size();
  if (m == 0 || rows_needed == 0) return 0.0;
  std::vector<double> K(m * m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      const double d = (dec.atoms.energies[members[j]] - dec.atoms.energies[members[k]]) * T;
      K[j * m + k] = 4.0 / (4.0 + d * d);
    }
  std::vector<double> c(m);
  double total = 0.0;
  for (long n = 1; n <= rows_needed; ++n) {
    for (std::size_t j = 0; j < m; ++j) {
      const long idx = static_cast<long>(members[j]);
      c[j] = dec.component(n, idx) * dec.component(1, idx);
    }
    double q = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double r = 0.0;
      for (std::size_t k = 0; k < m; ++k) r += K[j * m + k] * c[k];
      q += c[j] * r;
    }
    total += (n <= nf ? 1.0 : frac) * q;
  }
  return total;
}

}  // namespace wavebound
