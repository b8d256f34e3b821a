#include "wavebound/multidim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "wavebound/errors.hpp"
#include "wavebound/numeric.hpp"

namespace wavebound {

Lattice::Lattice(int dim, long extent, std::vector<double> potential)
    : dim_(dim), extent_(extent), potential_(std::move(potential)) {
  if (dim < 1 || dim > 4) throw ValidationError("lattice dimension must be 1..4");
  if (extent < 1) throw ValidationError("lattice extent must be positive");
  std::size_t n = 1;
  stride_.assign(static_cast<std::size_t>(dim), 1);
  for (int i = dim - 1; i >= 0; --i) {
    stride_[static_cast<std::size_t>(i)] = n;
    n *= static_cast<std::size_t>(side());
  }
  if (potential_.size() != n) throw ValidationError("potential size does not match the lattice box");
  for (double v : potential_)
    if (!std::isfinite(v)) throw ValidationError("potential values must be finite");
  radius_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    long r = 0;
    for (long c : coords(i)) r += std::labs(c);
    radius_[i] = r;
  }
}

std::size_t Lattice::origin() const { return index(std::vector<long>(static_cast<std::size_t>(dim_), 0)); }

std::size_t Lattice::index(const std::vector<long>& c) const {
  if (static_cast<int>(c.size()) != dim_) throw ValidationError("coordinate dimension mismatch");
  std::size_t idx = 0;
  for (int i = 0; i < dim_; ++i) {
    const long v = c[static_cast<std::size_t>(i)];
    if (v < -extent_ || v > extent_) throw RangeError("site outside the lattice box");
    idx += static_cast<std::size_t>(v + extent_) * stride_[static_cast<std::size_t>(i)];
  }
  return idx;
}

std::vector<long> Lattice::coords(std::size_t idx) const {
  std::vector<long> c(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    const std::size_t s = stride_[static_cast<std::size_t>(i)];
    c[static_cast<std::size_t>(i)] = static_cast<long>(idx / s) - extent_;
    idx %= s;
  }
  return c;
}

double Lattice::spectral_radius_bound() const {
  double v = 0.0;
  for (double p : potential_) v = std::max(v, std::fabs(p));
  return v + 2.0 * dim_;
}

Lattice Lattice::sub_box(long extent) const {
  if (extent > extent_) throw RangeError("sub-box larger than the lattice");
  const long side_new = 2 * extent + 1;
  std::size_t n = 1;
  for (int i = 0; i < dim_; ++i) n *= static_cast<std::size_t>(side_new);
  std::vector<double> pot(n);
  std::vector<long> c(static_cast<std::size_t>(dim_), -extent);
  for (std::size_t k = 0; k < n; ++k) {
    pot[k] = potential_[index(c)];
    for (int i = dim_ - 1; i >= 0; --i) {
      if (++c[static_cast<std::size_t>(i)] <= extent) break;
      c[static_cast<std::size_t>(i)] = -extent;
    }
  }
  return Lattice(dim_, extent, std::move(pot));
}

void Lattice::apply(const std::vector<double>& x, std::vector<double>& y) const {
  const std::size_t n = size();
  y.assign(n, 0.0);
  const long s = side();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = potential_[i] * x[i];
    for (int d = 0; d < dim_; ++d) {
      const std::size_t st = stride_[static_cast<std::size_t>(d)];
      const long c = static_cast<long>(i / st) % s;
      if (c > 0) acc += x[i - st];
      if (c + 1 < s) acc += x[i + st];
    }
    y[i] = acc;
  }
}

PotentialFn free_potential() {
  return [](const std::vector<long>&) { return 0.0; };
}

PotentialFn random_potential(double width, std::uint64_t seed) {
  if (!(width >= 0.0) || !std::isfinite(width)) throw ValidationError("random width must be finite and >= 0");
  return [width, seed](const std::vector<long>& c) {
    std::uint64_t key = seed;
    for (long v : c) key = splitmix64(key ^ static_cast<std::uint64_t>(v + (1L << 31)));
    return width * (uniform01(key) - 0.5);
  };
}

Lattice make_lattice(int dim, long extent, const PotentialFn& v) {
  if (dim < 1 || dim > 4) throw ValidationError("lattice dimension must be 1..4");
  if (extent < 1) throw ValidationError("lattice extent must be positive");
  const long side = 2 * extent + 1;
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(side);
  std::vector<double> pot(n);
  std::vector<long> c(static_cast<std::size_t>(dim), -extent);
  for (std::size_t k = 0; k < n; ++k) {
    pot[k] = v(c);
    for (int i = dim - 1; i >= 0; --i) {
      if (++c[static_cast<std::size_t>(i)] <= extent) break;
      c[static_cast<std::size_t>(i)] = -extent;
    }
  }
  return Lattice(dim, extent, std::move(pot));
}

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

long support_radius(const Lattice& lat, const std::vector<double>& v) {
  long r = -1;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) r = std::max(r, lat.radius(i));
  return r;
}

}  // namespace

double LanczosBasis::max_orthonormality_error() const {
  double e = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) e = std::max(e, std::fabs(dot(basis[i], basis[j]) - (i == j ? 1.0 : 0.0)));
  return e;
}

LanczosBasis lanczos_tridiag(const Lattice& lat, long N) {
  if (N < 1) throw ValidationError("Lanczos size must be positive");
  if (!(N + 2 < lat.extent())) throw DomainError("Lanczos vectors would touch the lattice boundary (need N + 2 < extent)");
  LanczosBasis out;
  std::vector<double> q(lat.size(), 0.0), w;
  q[lat.origin()] = 1.0;
  out.basis.push_back(q);
  out.basis_support_radii.push_back(support_radius(lat, q));
  double beta = 0.0;
  for (long n = 0; n < N; ++n) {
    const std::vector<double>& qn = out.basis.back();
    lat.apply(qn, w);
    if (n > 0) {
      const std::vector<double>& qp = out.basis[out.basis.size() - 2];
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= beta * qp[i];
    }
    const double alpha = dot(qn, w);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= alpha * qn[i];
    out.b.push_back(alpha);
    if (n == N - 1) break;
    double last_pass = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      last_pass = 0.0;
      for (const auto& qk : out.basis) {
        const double c = dot(qk, w);
        last_pass = std::max(last_pass, std::fabs(c));
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * qk[i];
      }
    }
    const double nb = std::sqrt(dot(w, w));
    out.reorth_drift.push_back(nb > 0.0 ? last_pass / nb : 0.0);
    if (nb <= 1e-12 * (std::fabs(alpha) + beta + 1.0)) {
      out.terminated = true;
      out.termination = "invariant subspace of dimension " + std::to_string(n + 1);
      break;
    }
    beta = nb;
    for (double& v : w) v /= beta;
    out.a.push_back(beta);
    out.basis.push_back(w);
    out.basis_support_radii.push_back(support_radius(lat, w));
  }
  OperatorSpec spec;
  spec.family = Family::lanczos;
  spec.side = Side::half_line;
  spec.b = out.b;
  spec.a = out.a;
  spec.label = "lanczos";
  out.jacobi = build_operator(spec);
  return out;
}

std::vector<double> lattice_moments(const Lattice& lat, int n_max) {
  if (n_max < 0) throw ValidationError("moment order must be >= 0");
  std::vector<double> v(lat.size(), 0.0), w;
  const std::size_t o = lat.origin();
  v[o] = 1.0;
  std::vector<double> m{1.0};
  for (int k = 1; k <= n_max; ++k) {
    lat.apply(v, w);
    v.swap(w);
    m.push_back(v[o]);
  }
  return m;
}

std::vector<double> jacobi_moments(const JacobiOperator& op, long size, int n_max) {
  if (size < 1 || n_max < 0) throw ValidationError("invalid moment request");
  std::vector<double> a(static_cast<std::size_t>(size)), b(static_cast<std::size_t>(size));
  op.fill(1, size, a.data(), b.data());
  a.back() = 0.0;
  std::vector<double> v(static_cast<std::size_t>(size), 0.0), w(v.size());
  v[0] = 1.0;
  std::vector<double> m{1.0};
  for (int k = 1; k <= n_max; ++k) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      double s = b[i] * v[i];
      if (i + 1 < v.size()) s += a[i] * v[i + 1];
      if (i > 0) s += a[i - 1] * v[i - 1];
      w[i] = s;
    }
    v.swap(w);
    m.push_back(v[0]);
  }
  return m;
}

namespace {

using cd = std::complex<double>;

// Box-restricted scaled operator for the propagation. Works for dim 2 with a
// fast path and any dim through the generic neighbour loop.
struct BoxOperator {
  const Lattice& lat;
  double center, half_width;
  std::vector<std::size_t> stride;

  explicit BoxOperator(const Lattice& l) : lat(l) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      lo = i == 0 ? l.potential(i) : std::min(lo, l.potential(i));
      hi = i == 0 ? l.potential(i) : std::max(hi, l.potential(i));
    }
    lo -= 2.0 * l.dim();
    hi += 2.0 * l.dim();
    center = 0.5 * (lo + hi);
    half_width = 0.5 * (hi - lo) * 1.01;
    std::size_t n = 1;
    stride.assign(static_cast<std::size_t>(l.dim()), 1);
    for (int i = l.dim() - 1; i >= 0; --i) {
      stride[static_cast<std::size_t>(i)] = n;
      n *= static_cast<std::size_t>(l.side());
    }
  }

  // Sites with max_i |c_i| <= rb and graph distance <= r1, in increasing index order.
  std::vector<std::size_t> sites_within(long rb, long r1) const {
    const int d = lat.dim();
    const long R = lat.extent();
    const long b = std::min({rb, r1, R});
    std::vector<std::size_t> out;
    std::vector<long> c(static_cast<std::size_t>(d), -b);
    for (;;) {
      std::size_t k = 0;
      for (int i = 0; i < d; ++i) k += static_cast<std::size_t>(c[static_cast<std::size_t>(i)] + R) * stride[static_cast<std::size_t>(i)];
      if (lat.radius(k) <= r1) out.push_back(k);
      int i = d - 1;
      for (; i >= 0; --i) {
        if (++c[static_cast<std::size_t>(i)] <= b) break;
        c[static_cast<std::size_t>(i)] = -b;
      }
      if (i < 0) break;
    }
    return out;
  }

  // y = (H - center)/half_width x on the listed sites; other entries untouched
  // interior: no listed site lies on the lattice boundary
  void apply(const std::vector<std::size_t>& sites, bool interior, const std::vector<cd>& x, std::vector<cd>& y) const {
    const long s = lat.side();
    const double inv = 1.0 / half_width;
    if (interior) {
      for (std::size_t k : sites) {
        cd acc = (lat.potential(k) - center) * x[k];
        for (std::size_t st : stride) acc += x[k - st] + x[k + st];
        y[k] = acc * inv;
      }
      return;
    }
    for (std::size_t k : sites) {
      cd acc = (lat.potential(k) - center) * x[k];
      for (int d = 0; d < lat.dim(); ++d) {
        const std::size_t st = stride[static_cast<std::size_t>(d)];
        const long c = d == lat.dim() - 1 ? static_cast<long>(k % static_cast<std::size_t>(s))
                                          : static_cast<long>(k / st) % s;
        if (c > 0) acc += x[k - st];
        if (c + 1 < s) acc += x[k + st];
      }
      y[k] = acc * inv;
    }
  }

  long box_radius(std::size_t k) const {
    const long R = lat.extent(), s = lat.side();
    long r = 0;
    for (int d = 0; d < lat.dim(); ++d)
      r = std::max(r, std::labs(static_cast<long>(k / stride[static_cast<std::size_t>(d)]) % s - R));
    return r;
  }
};

std::vector<cd> cheb_coefficients(double x, double cutoff) {
  std::vector<cd> c;
  int below = 0;
  for (int k = 0;; ++k) {
    const double j = std::cyl_bessel_j(static_cast<double>(k), x);
    static const cd ik[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    c.push_back((k == 0 ? 1.0 : 2.0) * j * ik[k % 4]);
    if (k > x && std::fabs(j) < cutoff) {
      if (++below >= 2) break;
    } else {
      below = 0;
    }
  }
  return c;
}

}  // namespace

LatticeProfile lattice_profile(const Lattice& lat, double T, const std::vector<double>& L,
                               const PropagationOptions& options) {
  if (!(T > 0.0)) throw ValidationError("T must be positive");
  if (L.empty()) throw ValidationError("L grid is empty");
  const double t_max = options.t_max > 0.0 ? options.t_max : 12.5 * T;
  const BoxOperator op(lat);
  double dt = options.dt > 0.0 ? options.dt : std::min(0.1, 0.1 / op.half_width);
  long M = static_cast<long>(std::ceil(t_max / dt));
  if (M % 2) ++M;
  dt = t_max / static_cast<double>(M);
  const std::vector<cd> coef = cheb_coefficients(op.half_width * dt, options.bessel_cutoff);
  const long K = static_cast<long>(coef.size());
  const std::size_t n = lat.size();
  long max_r = 0;
  for (std::size_t i = 0; i < n; ++i) max_r = std::max(max_r, lat.radius(i));
  std::vector<cd> psi(n, 0.0), v0(n, 0.0), v1(n, 0.0), v2(n, 0.0), acc(n, 0.0);
  psi[lat.origin()] = 1.0;
  std::vector<double> bins(static_cast<std::size_t>(max_r + 1));
  LatticeProfile out;
  out.T = T;
  out.L = L;
  out.values.assign(L.size(), 0.0);
  const long R = lat.extent();
  // The work ball only grows, so entries outside it were never written and stay zero.
  long reach_box = 0, reach_l1 = 0, have_box = -1, have_l1 = -1;
  std::vector<std::size_t> sites;
  bool interior = true;
  const cd phase = std::exp(cd{0.0, -op.center * dt});
  for (long step = 0; step <= M; ++step) {
    if (reach_box + K > have_box || reach_l1 + K > have_l1) {
      have_box = reach_box + K;
      have_l1 = reach_l1 + K;
      sites = op.sites_within(have_box, have_l1);
      interior = have_box < R;
    }
    if (step > 0) {
      for (std::size_t i : sites) v0[i] = psi[i];
      op.apply(sites, interior, v0, v1);
      for (std::size_t i : sites) acc[i] = coef[0] * v0[i] + coef[1] * v1[i];
      for (long k = 2; k < K; ++k) {
        op.apply(sites, interior, v1, v2);
        const cd ck = coef[static_cast<std::size_t>(k)];
        for (std::size_t i : sites) {
          v2[i] = 2.0 * v2[i] - v0[i];
          acc[i] += ck * v2[i];
        }
        std::swap(v0, v1);
        std::swap(v1, v2);
      }
      for (std::size_t i : sites) psi[i] = phase * acc[i];
    }
    std::fill(bins.begin(), bins.end(), 0.0);
    double total = 0.0, edge = 0.0;
    for (std::size_t i : sites) {
      const double p = std::norm(psi[i]);
      if (p == 0.0) continue;
      bins[static_cast<std::size_t>(lat.radius(i))] += p;
      total += p;
      const long br = op.box_radius(i);
      if (p > 1e-30) {
        reach_box = std::max(reach_box, br + 1);
        reach_l1 = std::max(reach_l1, lat.radius(i) + 1);
      }
      if (br >= R - 4) edge += p;
    }
    out.edge_mass = std::max(out.edge_mass, edge);
    out.unitarity_drift = std::max(out.unitarity_drift, std::fabs(total - 1.0));
    const double t = dt * static_cast<double>(step);
    const double simpson = (step == 0 || step == M) ? 1.0 : (step % 2 ? 4.0 : 2.0);
    const double wgt = simpson * dt / 3.0 * (2.0 / T) * std::exp(-2.0 * t / T);
    for (std::size_t k = 0; k < L.size(); ++k) {
      const long lim = std::min<long>(max_r, static_cast<long>(std::floor(L[k] + 1.0)));
      double s = 0.0;
      for (long b = 0; b <= lim; ++b) s += bins[static_cast<std::size_t>(b)];
      out.values[k] += wgt * s;
    }
    out.total += wgt * total;
  }
  out.active_extent = std::min(reach_box, R);
  if (out.edge_mass > options.boundary_tol)
    throw ResourceError("probability reached the lattice edge; enlarge the lattice", R, 2 * R);
  return out;
}

long mdhld_required_extent(double spectral_radius, double T, const PropagationOptions& options) {
  const double t_max = options.t_max > 0.0 ? options.t_max : 12.5 * T;
  return static_cast<long>(std::ceil(t_max * spectral_radius)) + std::max<long>(options.padding, 8);
}

std::vector<MdhldReport> mdhld_sweep(const Lattice& lat, double T, const std::vector<double>& L,
                                     const MdhldOptions& options) {
  if (!(T > 0.0)) throw ValidationError("T must be positive");
  for (double l : L)
    if (!(l > 1.0)) throw ValidationError("L must exceed 1");
  const long need = mdhld_required_extent(lat.spectral_radius_bound(), T, options.propagation);
  if (lat.extent() < need)
    throw DomainError("propagation cone does not fit the lattice (need extent >= " + std::to_string(need) + ")");
  const long N = options.lanczos_size;
  const LanczosBasis basis = lanczos_tridiag(lat.sub_box(std::min(lat.extent(), N + 3)), N);
  const JacobiOperator& jac = basis.jacobi;
  const long size = static_cast<long>(basis.b.size());
  const LatticeProfile lp = lattice_profile(lat, T, L, options.propagation);
  const SpectralAtoms atoms = spectral_measure_atoms(jac, size);
  const std::vector<double> sc = atom_scales(jac, atoms, T, ScaleKind::solution, ScaleSide::plus, options.scales);
  const TimeAveragedProfile hp = profile_resolvent(jac, T, L, options.profile);
  double drift = 0.0;
  for (double d : basis.reorth_drift) drift = std::max(drift, d);
  std::vector<MdhldReport> out;
  for (std::size_t k = 0; k < L.size(); ++k) {
    MdhldReport r;
    r.bound.T = T;
    r.bound.L = L[k];
    r.bound.lhs = lp.values[k];
    for (std::size_t j = 0; j < sc.size(); ++j)
      if (sc[j] <= L[k]) r.bound.mu_S += atoms.weights[j];
    r.bound.vacuous = !(r.bound.mu_S > 0.0);
    r.bound.ratio = r.bound.vacuous ? 0.0 : r.bound.lhs / r.bound.mu_S;
    r.bound.metadata = "lanczos=" + std::to_string(size) + " drift=" + std::to_string(drift);
    r.half_line_profile = hp.values[k];
    // quadrature tolerance of both routes plus the orthogonality loss
    r.drift_budget = options.profile.abs_tol + 1e-6 + static_cast<double>(size) * drift;
    r.structural_ok = r.bound.lhs >= r.half_line_profile - r.drift_budget;
    r.unitarity_drift = lp.unitarity_drift;
    out.push_back(r);
  }
  return out;
}

MdhldReport mdhld_check(const Lattice& lat, double T, double L, const MdhldOptions& options) {
  return mdhld_sweep(lat, T, {L}, options).front();
}

}  // namespace wavebound
