#include "wavebound/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "wavebound/errors.hpp"

namespace wavebound {

namespace {

// Kronrod abscissae on [-1, 1] (nonnegative half, descending) and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (the 7-point rule).
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  std::vector<double> kronrod;
  double error = 0.0;
};

}  // namespace

void gk15_rule(double a, double b, double* nodes, double* kronrod_weights) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int j = 0; j < 7; ++j) {
    nodes[2 * j] = c - h * kXgk[j];
    nodes[2 * j + 1] = c + h * kXgk[j];
    kronrod_weights[2 * j] = h * kWgk[j];
    kronrod_weights[2 * j + 1] = h * kWgk[j];
  }
  nodes[14] = c;
  kronrod_weights[14] = h * kWgk[7];
}

QuadratureResult gk15_adaptive(const BatchIntegrand& f, int channels, std::vector<Panel> initial,
                               const QuadratureOptions& options) {
  if (channels < 1) throw ValidationError("integrand needs at least one channel");
  if (!(options.abs_tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");
  const std::size_t C = static_cast<std::size_t>(channels);
  std::vector<double> weight(C, 1.0);
  if (!options.channel_weights.empty()) {
    if (options.channel_weights.size() != C) throw ValidationError("channel weight count mismatch");
    weight = options.channel_weights;
  }
  QuadratureResult res;

  auto evaluate = [&](const std::vector<Panel>& panels) {
    std::vector<QuadNode> nodes(panels.size() * 15);
    std::vector<double> wk(panels.size() * 15);
    double x[15];
    for (std::size_t p = 0; p < panels.size(); ++p) {
      gk15_rule(panels[p].a, panels[p].b, x, &wk[p * 15]);
      for (int i = 0; i < 15; ++i) nodes[p * 15 + static_cast<std::size_t>(i)] = {x[i], panels[p].region};
    }
    std::vector<double> values(nodes.size() * C, 0.0);
    f(nodes, values);
    res.evaluations += static_cast<long>(nodes.size());
    std::vector<Estimate> out(panels.size());
    for (std::size_t p = 0; p < panels.size(); ++p) {
      const double h = 0.5 * (panels[p].b - panels[p].a);
      Estimate& e = out[p];
      e.kronrod.assign(C, 0.0);
      for (std::size_t c = 0; c < C; ++c) {
        double k = 0.0, g = 0.0;
        for (int i = 0; i < 15; ++i) k += wk[p * 15 + static_cast<std::size_t>(i)] * values[(p * 15 + static_cast<std::size_t>(i)) * C + c];
        // Gauss nodes are Kronrod nodes 1, 3, 5 (pairs) and the centre
        for (int j = 0; j < 3; ++j) {
          const int jj = 2 * j + 1;
          g += kWg[j] * (values[(p * 15 + static_cast<std::size_t>(2 * jj)) * C + c] +
                         values[(p * 15 + static_cast<std::size_t>(2 * jj + 1)) * C + c]);
        }
        g += kWg[3] * values[(p * 15 + 14) * C + c];
        g *= h;
        e.kronrod[c] = k;
        const double err = weight[c] * std::fabs(k - g);
        if (!std::isfinite(k)) throw ConvergenceError("integrand is not finite", k, 0.0);
        e.error = std::max(e.error, err);
      }
    }
    return out;
  };

  std::vector<Panel> panels = std::move(initial);
  if (panels.empty()) throw ValidationError("no integration panels");
  std::vector<Estimate> est = evaluate(panels);
  for (;;) {
    double total = 0.0;
    for (const Estimate& e : est) total += e.error;
    res.error = total;
    if (total <= options.abs_tol) {
      res.converged = true;
      break;
    }
    if (static_cast<long>(panels.size()) >= options.max_panels) break;
    const double cut = options.abs_tol / (2.0 * static_cast<double>(panels.size()));
    double worst = 0.0;
    for (const Estimate& e : est) worst = std::max(worst, e.error);
    std::vector<Panel> children;
    std::vector<char> split(panels.size(), 0);
    for (std::size_t p = 0; p < panels.size(); ++p) {
      if (est[p].error > cut || est[p].error == worst) {
        const Panel& q = panels[p];
        const double m = 0.5 * (q.a + q.b);
        if (!(m > q.a && m < q.b)) continue;  // cannot bisect further
        split[p] = 1;
        children.push_back({q.a, m, q.region});
        children.push_back({m, q.b, q.region});
      }
    }
    if (children.empty()) break;
    std::vector<Estimate> child_est = evaluate(children);
    std::vector<Panel> next_panels;
    std::vector<Estimate> next_est;
    next_panels.reserve(panels.size() + children.size() / 2);
    std::size_t k = 0;
    for (std::size_t p = 0; p < panels.size(); ++p) {
      if (split[p]) {
        next_panels.push_back(children[k]);
        next_est.push_back(std::move(child_est[k]));
        next_panels.push_back(children[k + 1]);
        next_est.push_back(std::move(child_est[k + 1]));
        k += 2;
      } else {
        next_panels.push_back(panels[p]);
        next_est.push_back(std::move(est[p]));
      }
    }
    panels = std::move(next_panels);
    est = std::move(next_est);
  }
  res.integral.assign(C, 0.0);
  for (const Estimate& e : est)
    for (std::size_t c = 0; c < C; ++c) res.integral[c] += e.kronrod[c];
  res.leaves = std::move(panels);
  return res;
}

}  // namespace wavebound
