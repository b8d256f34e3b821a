#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavebound/errors.hpp"
#include "wavebound/fibonacci.hpp"

namespace wavebound::fibonacci {

namespace {

template <class T>
T trace_t(double lambda, const T& E, int k);

template <>
double trace_t<double>(double lambda, const double& E, int k) {
  return trace_value(lambda, E, k);
}

template <>
DoubleDouble trace_t<DoubleDouble>(double lambda, const DoubleDouble& E, int k) {
  return trace_value(lambda, E, k);
}

double as_double(double x) { return x; }
double as_double(const DoubleDouble& x) { return x.to_double(); }

template <class T>
struct Solver {
  double lambda;
  double abs_tol;
  double rel_tol;

  bool done(const T& lo, const T& hi) const {
    const double w = std::fabs(as_double(hi - lo));
    const double m = std::fabs(as_double(lo));
    return w <= std::max(abs_tol, rel_tol * m);
  }

  static T mid(const T& lo, const T& hi) { return (lo + hi) * T(0.5); }

  bool inside(int k, const T& E) const { return std::fabs(as_double(trace_t<T>(lambda, E, k))) <= 2.0; }

  // x_k(E) = target between lo and hi (sign change of x_k - target)
  T root(int k, double target, T lo, T hi) const {
    const double flo = as_double(trace_t<T>(lambda, lo, k)) - target;
    const double fhi = as_double(trace_t<T>(lambda, hi, k)) - target;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
      std::ostringstream os;
      os << "no sign change of x_" << k << " - " << target << " on [" << as_double(lo) << ", " << as_double(hi) << "]";
      throw StructureError(os.str());
    }
    const bool lo_pos = flo > 0.0;
    for (int it = 0; it < 400 && !done(lo, hi); ++it) {
      const T m = mid(lo, hi);
      if (m == lo || m == hi) break;
      const double fm = as_double(trace_t<T>(lambda, m, k)) - target;
      if (fm == 0.0) return m;
      if ((fm > 0.0) == lo_pos)
        lo = m;
      else
        hi = m;
    }
    return mid(lo, hi);
  }

  // boundary of {|x_k| <= 2} between a point inside and a point outside
  T boundary(int k, T in, T out) const {
    for (int it = 0; it < 400 && !done(in < out ? in : out, in < out ? out : in); ++it) {
      const T m = mid(in, out);
      if (m == in || m == out) break;
      if (inside(k, m))
        in = m;
      else
        out = m;
    }
    return mid(in, out);
  }
};

template <class T>
BandInterval make_band(const Solver<T>& s, int level, BandType type, const T& left, const T& right) {
  BandInterval b;
  b.level = level;
  b.type = type;
  b.left = DoubleDouble(left);
  b.right = DoubleDouble(right);
  b.center = DoubleDouble(s.root(level, 0.0, left, right));
  return b;
}

template <class T>
T from_dd(const DoubleDouble& v);
template <>
double from_dd<double>(const DoubleDouble& v) {
  return v.to_double();
}
template <>
DoubleDouble from_dd<DoubleDouble>(const DoubleDouble& v) {
  return v;
}

[[noreturn]] void structure_fail(const BandInterval& p, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << "band tree: parent level " << p.level << " type " << to_string(p.type) << " [" << p.left.to_double() << ", "
     << p.right.to_double() << "]: " << what;
  throw StructureError(os.str());
}

template <class T>
std::vector<BandInterval> children_impl(double lambda, const BandInterval& p, const Solver<T>& s) {
  const int k = p.level;
  const T l = from_dd<T>(p.left);
  const T r = from_dd<T>(p.right);
  const T e0 = from_dd<T>(p.center);
  std::vector<BandInterval> out;
  auto child = [&](int level, BandType type, const T& seed, const T& out_lo, const T& out_hi) {
    if (!s.inside(level, seed)) structure_fail(p, "seed point not inside level " + std::to_string(level));
    if (s.inside(level, out_lo) || s.inside(level, out_hi))
      structure_fail(p, "level " + std::to_string(level) + " band reaches a separating point");
    const T left = s.boundary(level, seed, out_lo);
    const T right = s.boundary(level, seed, out_hi);
    BandInterval b = make_band(s, level, type, left, right);
    // scan for monotonicity of x_level across the child
    double prev = as_double(trace_t<T>(lambda, left, level));
    const double first = prev;
    for (int j = 1; j <= 8; ++j) {
      const T e = left + (right - left) * T(j / 8.0);
      const double v = as_double(trace_t<T>(lambda, e, level));
      if ((v - prev) * (as_double(trace_t<T>(lambda, right, level)) - first) < 0.0)
        structure_fail(p, "x_" + std::to_string(level) + " not monotone on child");
      prev = v;
    }
    out.push_back(b);
  };
  if (p.type == BandType::A) {
    child(k + 2, BandType::B, e0, l, r);
  } else {
    const T ep = s.root(k, 1.0, l, r);
    const T em = s.root(k, -1.0, l, r);
    const T lo_pt = ep < em ? ep : em;
    const T hi_pt = ep < em ? em : ep;
    child(k + 2, BandType::B, lo_pt, l, e0);
    child(k + 1, BandType::A, e0, lo_pt, hi_pt);
    child(k + 2, BandType::B, hi_pt, e0, r);
  }
  return out;
}

}  // namespace

std::vector<BandInterval> child_bands(double lambda, const BandInterval& parent, bool compensated) {
  if (compensated) {
    Solver<DoubleDouble> s{lambda, 1e-300, 1e-29};
    return children_impl(lambda, parent, s);
  }
  Solver<double> s{lambda, 1e-13, 1e-12};
  return children_impl(lambda, parent, s);
}

BandTree band_tree(double lambda, int k_max, const BandTreeOptions& options) {
  if (!(lambda > 4.0)) throw DomainError("band_tree needs lambda > 4");
  if (k_max < 0) throw ValidationError("band_tree needs k_max >= 0");
  BandTree t;
  t.lambda = lambda;
  t.k_max = k_max;
  t.by_level.assign(static_cast<std::size_t>(k_max) + 1, {});
  BandInterval s0;
  s0.level = 0;
  s0.type = BandType::A;
  s0.left = DoubleDouble(-2.0);
  s0.right = DoubleDouble(2.0);
  s0.center = DoubleDouble(0.0);
  t.bands.push_back(s0);
  t.by_level[0].push_back(0);
  if (k_max >= 1) {
    BandInterval s1;
    s1.level = 1;
    s1.type = BandType::B;
    s1.left = DoubleDouble(lambda - 2.0);
    s1.right = DoubleDouble(lambda + 2.0);
    s1.center = DoubleDouble(lambda);
    t.bands.push_back(s1);
    t.by_level[1].push_back(1);
  }
  for (int k = 0; k <= k_max; ++k) {
    const std::vector<int> parents = t.by_level[static_cast<std::size_t>(k)];
    for (int pi : parents) {
      // children sit at level k+1 or k+2; use the precision of the deepest one
      const bool comp = k + 2 > options.compensated_above;
      std::vector<BandInterval> kids = child_bands(lambda, t.bands[static_cast<std::size_t>(pi)], comp);
      for (BandInterval& c : kids) {
        if (c.level > k_max) continue;
        c.parent = pi;
        const int id = static_cast<int>(t.bands.size());
        t.bands[static_cast<std::size_t>(pi)].children.push_back(id);
        t.by_level[static_cast<std::size_t>(c.level)].push_back(id);
        t.bands.push_back(std::move(c));
      }
    }
  }
  // sort each level by position
  for (auto& lv : t.by_level)
    std::sort(lv.begin(), lv.end(), [&](int x, int y) { return t.bands[static_cast<std::size_t>(x)].left < t.bands[static_cast<std::size_t>(y)].left; });
  return t;
}

std::vector<DoubleDouble> random_deep_energies(double lambda, int k, int count, std::uint64_t seed) {
  if (!(lambda > 4.0)) throw DomainError("random_deep_energies needs lambda > 4");
  std::vector<DoubleDouble> out;
  out.reserve(static_cast<std::size_t>(count));
  std::uint64_t state = seed;
  for (int i = 0; i < count; ++i) {
    BandInterval b;
    state = splitmix64(state);
    if (k >= 1 && (state & 1u)) {
      b.level = 1;
      b.type = BandType::B;
      b.left = DoubleDouble(lambda - 2.0);
      b.right = DoubleDouble(lambda + 2.0);
      b.center = DoubleDouble(lambda);
    } else {
      b.level = 0;
      b.type = BandType::A;
      b.left = DoubleDouble(-2.0);
      b.right = DoubleDouble(2.0);
      b.center = DoubleDouble(0.0);
    }
    while (b.level < k) {
      std::vector<BandInterval> kids = child_bands(lambda, b, true);
      std::vector<BandInterval> ok;
      for (auto& c : kids)
        if (c.level <= k) ok.push_back(c);
      if (ok.empty()) {
        // only a level k+1 child left: stop at the current band
        break;
      }
      state = splitmix64(state);
      b = ok[static_cast<std::size_t>(state % ok.size())];
    }
    out.push_back(b.center);
  }
  return out;
}

}  // namespace wavebound::fibonacci
