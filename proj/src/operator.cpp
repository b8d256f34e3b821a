#include "wavebound/operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavebound/errors.hpp"
#include "wavebound/fibonacci.hpp"
#include "wavebound/numeric.hpp"

namespace wavebound {

const char* to_string(Side side) { return side == Side::half_line ? "half-line" : "whole-line"; }

const char* to_string(Family family) {
  switch (family) {
    case Family::free: return "free";
    case Family::random: return "random";
    case Family::fibonacci: return "fibonacci";
    case Family::explicit_arrays: return "explicit";
    case Family::lanczos: return "lanczos";
  }
  return "unknown";
}

namespace {
constexpr long kFibCache = 1L << 21;
}

struct JacobiOperator::Impl {
  OperatorSpec spec;
  // reflected view: a'(j) = a(-j), b'(j) = b(1-j)
  bool reflected = false;
  double a0 = 1.0;
  long first = 1;
  long last = kUnbounded;
  std::vector<signed char> fib;  // V(0..kFibCache)

  double raw_b(long n) const {
    switch (spec.family) {
      case Family::free: return 0.0;
      case Family::random: {
        const std::uint64_t key = spec.seed ^ (static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ULL);
        return spec.width * (uniform01(splitmix64(key)) - 0.5);
      }
      case Family::fibonacci: {
        if (n >= 0 && n <= kFibCache) return spec.lambda * fib[static_cast<std::size_t>(n)];
        return spec.lambda * fibonacci::potential_at(n);
      }
      case Family::explicit_arrays:
      case Family::lanczos: {
        const long i = n - spec.first_site;
        if (i < 0 || i >= static_cast<long>(spec.b.size())) throw RangeError("b(" + std::to_string(n) + ") outside coefficient array");
        return spec.b[static_cast<std::size_t>(i)];
      }
    }
    return 0.0;
  }

  double raw_a(long n) const {
    switch (spec.family) {
      case Family::free:
      case Family::random:
      case Family::fibonacci: return 1.0;
      case Family::explicit_arrays:
      case Family::lanczos: {
        const long i = n - spec.first_site;
        if (i < 0 || i >= static_cast<long>(spec.a.size())) throw RangeError("a(" + std::to_string(n) + ") outside coefficient array");
        return spec.a[static_cast<std::size_t>(i)];
      }
    }
    return 1.0;
  }

  double b(long n) const {
    if (n < first || n > last) throw RangeError("site " + std::to_string(n) + " outside operator range");
    return reflected ? raw_b(1 - n) : raw_b(n);
  }

  double a(long n) const {
    if (spec.side == Side::half_line || reflected) {
      if (n == 0) return a0;
    }
    if (n < first || n > last) throw RangeError("bond " + std::to_string(n) + " outside operator range");
    const double v = reflected ? raw_a(-n) : raw_a(n);
    if (v == 0.0) throw ValidationError("a(" + std::to_string(n) + ") = 0");
    return v;
  }
};

JacobiOperator::JacobiOperator() : JacobiOperator(build_operator(free_spec()).impl_) {}

JacobiOperator::JacobiOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Side JacobiOperator::side() const { return impl_->reflected ? Side::half_line : impl_->spec.side; }
Family JacobiOperator::family() const { return impl_->spec.family; }
const std::string& JacobiOperator::label() const { return impl_->spec.label; }
const OperatorSpec& JacobiOperator::spec() const { return impl_->spec; }
double JacobiOperator::a(long n) const { return impl_->a(n); }
double JacobiOperator::b(long n) const { return impl_->b(n); }
long JacobiOperator::first_site() const { return impl_->first; }
long JacobiOperator::last_site() const { return impl_->last; }
bool JacobiOperator::finite() const { return impl_->first != kNoSite && impl_->last != kUnbounded; }

void JacobiOperator::fill(long from, long count, double* a_out, double* b_out) const {
  const Impl& m = *impl_;
  if (!m.reflected && m.spec.family == Family::free && from >= m.first && from + count - 1 <= m.last) {
    std::fill(a_out, a_out + count, 1.0);
    std::fill(b_out, b_out + count, 0.0);
    return;
  }
  for (long i = 0; i < count; ++i) {
    const long n = from + i;
    b_out[i] = m.b(n);
    // last site of a finite operator may have no outgoing bond
    a_out[i] = (n == m.last) ? 0.0 : m.a(n);
  }
}

std::pair<double, double> JacobiOperator::spectral_bounds() const {
  const Impl& m = *impl_;
  const OperatorSpec& s = m.spec;
  switch (s.family) {
    case Family::free: return {-2.0, 2.0};
    case Family::random: return {-0.5 * std::fabs(s.width) - 2.0, 0.5 * std::fabs(s.width) + 2.0};
    case Family::fibonacci: return {std::min(0.0, s.lambda) - 2.0, std::max(0.0, s.lambda) + 2.0};
    default: break;
  }
  double lo = 0.0, hi = 0.0;
  bool init = false;
  for (long n = m.first; n <= m.last; ++n) {
    double r = 0.0;
    if (n < m.last) r += std::fabs(a(n));
    if (n > m.first) r += std::fabs(a(n - 1));
    const double c = b(n);
    if (!init) {
      lo = c - r;
      hi = c + r;
      init = true;
    } else {
      lo = std::min(lo, c - r);
      hi = std::max(hi, c + r);
    }
  }
  return {lo, hi};
}

JacobiOperator JacobiOperator::reflected() const {
  const Impl& m = *impl_;
  if (m.reflected || m.spec.side != Side::whole_line)
    throw DomainError("reflection needs a whole-line operator");
  auto r = std::make_shared<Impl>(m);
  r->reflected = true;
  r->a0 = m.a(0);
  r->first = 1;
  r->last = (m.first == kNoSite) ? kUnbounded : 1 - m.first;
  return JacobiOperator(r);
}

JacobiOperator JacobiOperator::truncated(long n_sites) const {
  if (side() != Side::half_line) throw DomainError("truncation applies to half-line operators");
  if (n_sites < 1) throw ValidationError("truncation size must be positive");
  if (n_sites > last_site() - first_site() + 1 && finite())
    throw RangeError("truncation exceeds operator size");
  auto r = std::make_shared<Impl>(*impl_);
  r->last = r->first + n_sites - 1;
  return JacobiOperator(r);
}

JacobiOperator build_operator(const OperatorSpec& spec) {
  auto impl = std::make_shared<JacobiOperator::Impl>();
  impl->spec = spec;
  const bool half = spec.side == Side::half_line;
  switch (spec.family) {
    case Family::free:
    case Family::random:
    case Family::fibonacci: {
      if (!std::isfinite(spec.lambda) || !std::isfinite(spec.width))
        throw ValidationError("operator parameters must be finite");
      if (spec.family == Family::random && spec.width < 0.0) throw ValidationError("random width must be >= 0");
      impl->first = half ? 1 : kNoSite;
      impl->last = kUnbounded;
      if (spec.size) {
        if (!half) throw ValidationError("size applies to half-line operators");
        if (*spec.size < 1) throw ValidationError("size must be positive");
        impl->last = *spec.size;
      }
      if (spec.family == Family::fibonacci) {
        const auto v = fibonacci::fib_potential(kFibCache);
        impl->fib.assign(v.begin(), v.end());
      }
      break;
    }
    case Family::explicit_arrays:
    case Family::lanczos: {
      const std::size_t nb = spec.b.size();
      if (nb == 0) throw ValidationError("explicit operator needs at least one diagonal entry");
      if (spec.a.size() + 1 != nb && spec.a.size() != nb)
        throw ValidationError("off-diagonal array must have length len(b) or len(b)-1");
      for (std::size_t i = 0; i < spec.a.size(); ++i) {
        if (spec.a[i] == 0.0) {
          std::ostringstream os;
          os << "zero off-diagonal entry a(" << spec.first_site + static_cast<long>(i) << ")";
          throw ValidationError(os.str());
        }
        if (!std::isfinite(spec.a[i])) throw ValidationError("non-finite off-diagonal entry");
      }
      for (double x : spec.b)
        if (!std::isfinite(x)) throw ValidationError("non-finite diagonal entry");
      if (half && spec.first_site != 1) throw ValidationError("half-line operators start at site 1");
      impl->first = spec.first_site;
      impl->last = spec.first_site + static_cast<long>(nb) - 1;
      if (spec.size) {
        if (*spec.size < 1 || *spec.size > static_cast<long>(nb)) throw ValidationError("size outside coefficient arrays");
        impl->last = spec.first_site + *spec.size - 1;
      }
      break;
    }
  }
  if (half) {
    if (spec.boundary_coupling == 0.0 || !std::isfinite(spec.boundary_coupling))
      throw ValidationError("boundary coupling a(0) must be finite and nonzero");
    impl->a0 = spec.boundary_coupling;
  }
  return JacobiOperator(std::move(impl));
}

OperatorSpec free_spec(Side side) {
  OperatorSpec s;
  s.family = Family::free;
  s.side = side;
  s.label = "free";
  return s;
}

OperatorSpec random_spec(double width, std::uint64_t seed, Side side) {
  OperatorSpec s;
  s.family = Family::random;
  s.side = side;
  s.width = width;
  s.seed = seed;
  s.label = "random";
  return s;
}

OperatorSpec fibonacci_spec(double lambda, Side side) {
  OperatorSpec s;
  s.family = Family::fibonacci;
  s.side = side;
  s.lambda = lambda;
  s.label = "fibonacci";
  return s;
}

OperatorSpec explicit_spec(std::vector<double> a, std::vector<double> b, Side side, long first_site) {
  OperatorSpec s;
  s.family = Family::explicit_arrays;
  s.side = side;
  s.a = std::move(a);
  s.b = std::move(b);
  s.first_site = first_site;
  s.label = "explicit";
  return s;
}

}  // namespace wavebound
