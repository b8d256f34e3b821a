#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wavebound/dynamics.hpp"
#include "wavebound/operator.hpp"

namespace wavebound {

// Schroedinger operator sum_{|n-m|=1} psi(m) + V(n) psi(n) on the box
// [-extent, extent]^dim with Dirichlet outside.
class Lattice {
 public:
  Lattice(int dim, long extent, std::vector<double> potential);

  int dim() const { return dim_; }
  long extent() const { return extent_; }
  long side() const { return 2 * extent_ + 1; }
  std::size_t size() const { return potential_.size(); }
  std::size_t origin() const;
  std::size_t index(const std::vector<long>& coords) const;
  std::vector<long> coords(std::size_t idx) const;
  // graph (l1) distance to the origin
  long radius(std::size_t idx) const { return radius_[idx]; }
  double potential(std::size_t idx) const { return potential_[idx]; }
  // Gershgorin bound on the spectrum: max |V| + 2 dim
  double spectral_radius_bound() const;
  // restriction to the centred box [-extent, extent]^dim
  Lattice sub_box(long extent) const;

  void apply(const std::vector<double>& x, std::vector<double>& y) const;

 private:
  int dim_;
  long extent_;
  std::vector<double> potential_;
  std::vector<long> radius_;
  std::vector<std::size_t> stride_;
};

using PotentialFn = std::function<double(const std::vector<long>&)>;

PotentialFn free_potential();
// iid uniform on [-width/2, width/2], keyed by site coordinates and seed
PotentialFn random_potential(double width, std::uint64_t seed);

Lattice make_lattice(int dim, long extent, const PotentialFn& v);
inline Lattice make_lattice2d(long extent, const PotentialFn& v) { return make_lattice(2, extent, v); }

struct LanczosBasis {
  JacobiOperator jacobi;
  std::vector<double> a;  // a(1..N-1)
  std::vector<double> b;  // b(1..N)
  std::vector<long> basis_support_radii;  // rho_n
  std::vector<double> reorth_drift;       // max |<rho_k, rho_n>| after reorthogonalisation
  std::vector<std::vector<double>> basis;
  bool terminated = false;  // exact invariant subspace reached
  std::string termination;

  double max_orthonormality_error() const;
};

// Lanczos from delta_0 with full reorthogonalisation (two passes).
LanczosBasis lanczos_tridiag(const Lattice& lat, long N);

// <delta_0, H^n delta_0> by repeated application on the lattice.
std::vector<double> lattice_moments(const Lattice& lat, int n_max);
// <delta_1, J^n delta_1> for a Jacobi operator truncated to `size` sites.
std::vector<double> jacobi_moments(const JacobiOperator& op, long size, int n_max);

struct LatticeProfile {
  double T = 0.0;
  std::vector<double> L;
  std::vector<double> values;  // <||chi_{L+1} psi(t)||^2>_T
  double total = 0.0;
  double unitarity_drift = 0.0;
  double edge_mass = 0.0;
  long active_extent = 0;
};

// Chebyshev propagation of delta_0 with Simpson averaging against (2/T) e^{-2t/T}.
// Balls use the graph distance.
LatticeProfile lattice_profile(const Lattice& lat, double T, const std::vector<double>& L,
                               const PropagationOptions& options = {});

struct MdhldReport {
  BoundReport bound;
  double half_line_profile = 0.0;  // profile of the exported Jacobi operator at L
  double drift_budget = 0.0;
  bool structural_ok = false;      // lhs >= half-line profile - budget
  double unitarity_drift = 0.0;
};

struct MdhldOptions {
  long lanczos_size = 120;
  PropagationOptions propagation;
  ProfileOptions profile;
  ScaleOptions scales;
};

// Lanczos runs on the centred sub-box of extent lanczos_size + 3; the
// propagation uses the whole lattice, whose extent must exceed
// t_max * spectral radius.
MdhldReport mdhld_check(const Lattice& lat, double T, double L, const MdhldOptions& options = {});
std::vector<MdhldReport> mdhld_sweep(const Lattice& lat, double T, const std::vector<double>& L,
                                     const MdhldOptions& options = {});

// Smallest extent accepted by mdhld_check for this T.
long mdhld_required_extent(double spectral_radius, double T, const PropagationOptions& options = {});

}  // namespace wavebound
