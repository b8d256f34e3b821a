#pragma once

#include <functional>
#include <vector>

namespace wavebound {

// Integration panel [a, b] inside one coordinate region.
struct Panel {
  double a = 0.0;
  double b = 0.0;
  int region = 0;
};

struct QuadNode {
  double x = 0.0;
  int region = 0;
};

// Fills values[i * channels + c] for every node. Called with whole batches
// so that the integrand can spread the work over threads.
using BatchIntegrand = std::function<void(const std::vector<QuadNode>& nodes, std::vector<double>& values)>;

struct QuadratureOptions {
  double abs_tol = 1e-6;
  long max_panels = 200000;
  // error weight per channel (empty means 1 for all)
  std::vector<double> channel_weights;
};

struct QuadratureResult {
  std::vector<double> integral;
  double error = 0.0;
  long evaluations = 0;
  std::vector<Panel> leaves;
  bool converged = false;
};

// Nodes and Kronrod weights of the 15-point rule on [a, b].
void gk15_rule(double a, double b, double* nodes, double* kronrod_weights);

// Global adaptive Gauss-Kronrod (7/15) integration over a list of panels.
// Panels whose error exceeds abs_tol / (2 * panel count) are bisected in
// rounds until the summed error is below abs_tol.
QuadratureResult gk15_adaptive(const BatchIntegrand& f, int channels, std::vector<Panel> initial,
                               const QuadratureOptions& options = {});

}  // namespace wavebound
