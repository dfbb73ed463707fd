#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "enclosure/obstacle.hpp"
#include "enclosure/types.hpp"

namespace enclosure {

// Explicit second-order FDTD for u_tt = Laplacian(u) on a cubic grid with
// homogeneous Dirichlet data on a staircase approximation of the obstacle,
// zero initial displacement, and initial velocity equal to the mollified
// indicator of the source ball.

struct SimulationConfig {
  double h = 0.05;
  double T = 8.0;
  double cfl = 0.5;               // dt = cfl * h; stability needs <= 1/sqrt(3)
  double domain_halfwidth = 0.0;  // 0: derive from the causal bound
  double causal_margin = 0.2;     // extra path length beyond T for wall echos
  Ball source;                    // initial velocity chi_B
  Ball receiver;                  // receiver ball B'
  std::optional<ObstacleShape> obstacle;  // nullopt: free space
  int energy_stride = 64;
  unsigned seed = 0;  // echoed into archives; the scheme itself is exact

  // Canonical JSON echo used for archive sidecars and cache keys.
  std::string canonical_json() const;
};

struct GridSpec {
  Vec3 origin = Vec3::Zero();  // position of node (0, 0, 0)
  double h = 0.0;
  int n = 0;  // nodes per axis
  Vec3 center = Vec3::Zero();
  double halfwidth = 0.0;

  Vec3 node(int ix, int iy, int iz) const {
    return origin + h * Vec3(ix, iy, iz);
  }
};

// Smallest halfwidth such that every wall-mediated path from the source ball
// to the dilated receiver ball is longer than T + margin, and the box
// contains the obstacle and both balls with a safety rim.
double causal_halfwidth(const SimulationConfig& cfg);
GridSpec resolve_grid(const SimulationConfig& cfg);

// Grid nodes carrying the mollified receiver-ball indicator; weights are
// volume weights rescaled to sum exactly to the ball volume.
struct ReceiverSet {
  std::vector<Vec3> points;
  std::vector<double> weights;
};
ReceiverSet receiver_quadrature(const GridSpec& grid, const Ball& ball);

struct ReceiverTrace {
  std::vector<Vec3> points;
  std::vector<double> weights;
  double dt = 0.0;
  double h = 0.0;
  double T = 0.0;
  int n_samples = 0;            // time samples including t = 0
  std::vector<double> samples;  // layout [sample * n_receivers + receiver]
  double peak = 0.0;            // max |sample| over the whole trace
  std::vector<int> energy_steps;
  std::vector<double> energy;  // conserved discrete leapfrog energy
  std::string config_json;     // canonical config echo

  int n_receivers() const { return static_cast<int>(points.size()); }
  double at(int sample, int receiver) const {
    return samples[static_cast<std::size_t>(sample) * points.size() +
                   receiver];
  }
};

ReceiverTrace simulate(const SimulationConfig& cfg);

// Laplace transforms int_0^T e^{-tau t} u_i(t) dt per receiver (trapezoid).
// With causal_source set, samples before the earliest possible arrival
// (minus margin) are dropped, suppressing scheme noise ahead of the front.
std::vector<std::vector<double>> accumulate_laplace(
    const ReceiverTrace& trace, const std::vector<double>& taus,
    const Ball* causal_source = nullptr, double causal_margin = 0.0);

// Receiver-ball functional Q(tau) = sum_i w_i Laplace[u_i](tau).
std::vector<double> receiver_functional(const ReceiverTrace& trace,
                                        const std::vector<double>& taus,
                                        const Ball* causal_source = nullptr,
                                        double causal_margin = 0.0);

// Exact free-space wave at distance r from the center of a radius-eta ball
// (radial d'Alembert closed form for the chi-ball initial velocity).
double free_space_wave(double r, double t, double eta);

struct CausalityReport {
  double max_ratio = 0.0;  // max pre-arrival |u| / global peak
  double margin = 0.0;
};
CausalityReport causality_report(const ReceiverTrace& trace,
                                 const Ball& source, double margin);

// Binary trace archive (magic "ENCL1", little-endian) plus a JSON sidecar
// at path + ".json" echoing the generating configuration.
void save_trace(const std::string& path, const ReceiverTrace& trace);
ReceiverTrace load_trace(const std::string& path);

}  // namespace enclosure
