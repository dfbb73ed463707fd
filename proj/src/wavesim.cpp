#include "enclosure/wavesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "enclosure/config.hpp"
#include "json.hpp"

namespace enclosure {

namespace {

constexpr double kCflLimit = 0.57735026918962584;  // 1/sqrt(3)

// C^1 ramp: 1 inside the ball, 0 outside, cubic over a one-cell band
// straddling the surface.
double mollified(double r, double eta, double h) {
  const double t = (eta + 0.5 * h - r) / h;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

void validate_config(const SimulationConfig& cfg) {
  if (!(cfg.h > 0.0)) throw PreconditionError("grid spacing h must be > 0");
  if (!(cfg.T > 0.0)) throw PreconditionError("final time T must be > 0");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= kCflLimit + 1e-12)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "CFL number %.6g outside stable range (0, 1/sqrt(3)]",
                  cfg.cfl);
    throw PreconditionError(buf);
  }
  if (!(cfg.source.radius > 0.0 && cfg.receiver.radius > 0.0)) {
    throw PreconditionError("source/receiver radii must be > 0");
  }
  if (cfg.obstacle) {
    const double gap_s =
        cfg.obstacle->solid_distance(cfg.source.center) - cfg.source.radius;
    const double gap_r =
        cfg.obstacle->solid_distance(cfg.receiver.center) -
        cfg.receiver.radius;
    if (gap_s < cfg.h || gap_r < cfg.h) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "ball too close to the obstacle for the staircase mask: "
                    "clearances %.3g / %.3g < h = %.3g",
                    gap_s, gap_r, cfg.h);
      throw PreconditionError(buf);
    }
  }
}

Vec3 rounded_center(const SimulationConfig& cfg) {
  const Vec3 mid = 0.5 * (cfg.source.center + cfg.receiver.center);
  Vec3 c;
  for (int a = 0; a < 3; ++a) c[a] = cfg.h * std::round(mid[a] / cfg.h);
  return c;
}

}  // namespace

double causal_halfwidth(const SimulationConfig& cfg) {
  validate_config(cfg);
  const Vec3 c = rounded_center(cfg);
  const Vec3& p = cfg.source.center;
  const Vec3& q = cfg.receiver.center;
  // Any boundary-touching path has length >= |mirror(p) - y| for the mirror
  // across that face plane and y in the dilated receiver ball.
  const double dilate = cfg.receiver.radius + 2.0 * cfg.h;
  const double need = cfg.T + cfg.source.radius + dilate + cfg.causal_margin;
  double L = 0.0;
  for (int a = 0; a < 3; ++a) {
    double off2 = 0.0;
    for (int b = 0; b < 3; ++b) {
      if (b != a) off2 += (p[b] - q[b]) * (p[b] - q[b]);
    }
    if (need * need <= off2) continue;
    const double g = std::sqrt(need * need - off2);
    L = std::max(L, 0.5 * (g + (p[a] + q[a]) - 2.0 * c[a]));
    L = std::max(L, 0.5 * (g - (p[a] + q[a]) + 2.0 * c[a]));
  }
  // Containment with a safety rim.
  double contain = 0.0;
  auto cheb = [&](const Vec3& x) { return (x - c).cwiseAbs().maxCoeff(); };
  contain = std::max(contain, cheb(p) + cfg.source.radius);
  contain = std::max(contain, cheb(q) + cfg.receiver.radius);
  if (cfg.obstacle) {
    const auto [lo, hi] = cfg.obstacle->bounding_box();
    contain = std::max({contain, cheb(lo), cheb(hi)});
  }
  return std::max(L, contain + 6.0 * cfg.h);
}

GridSpec resolve_grid(const SimulationConfig& cfg) {
  validate_config(cfg);
  const double L_causal = causal_halfwidth(cfg);
  double L = cfg.domain_halfwidth > 0.0 ? cfg.domain_halfwidth : L_causal;
  if (cfg.domain_halfwidth > 0.0 && L < L_causal - 1e-12) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "recording time too long for this box: boundary echos "
                  "arrive before T; need halfwidth >= %.6g, got %.6g",
                  L_causal, L);
    throw PreconditionError(buf);
  }
  GridSpec grid;
  grid.h = cfg.h;
  grid.center = rounded_center(cfg);
  const int cells = static_cast<int>(std::ceil(2.0 * L / cfg.h - 1e-9));
  grid.n = cells + 1;
  if (static_cast<long long>(grid.n) * grid.n * grid.n > 90'000'000LL) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "grid too large: %d^3 nodes", grid.n);
    throw PreconditionError(buf);
  }
  grid.halfwidth = 0.5 * cells * cfg.h;
  grid.origin = grid.center - Vec3::Constant(grid.halfwidth);
  return grid;
}

ReceiverSet receiver_quadrature(const GridSpec& grid, const Ball& ball) {
  ReceiverSet out;
  const double h = grid.h;
  const double reach = ball.radius + 0.5 * h;
  const Vec3 lo = ball.center - Vec3::Constant(reach);
  const Vec3 hi = ball.center + Vec3::Constant(reach);
  int i0[3], i1[3];
  for (int a = 0; a < 3; ++a) {
    i0[a] = std::max(
        0, static_cast<int>(std::ceil((lo[a] - grid.origin[a]) / h - 1e-12)));
    i1[a] = std::min(
        grid.n - 1,
        static_cast<int>(std::floor((hi[a] - grid.origin[a]) / h + 1e-12)));
  }
  double wsum = 0.0;
  for (int iz = i0[2]; iz <= i1[2]; ++iz) {
    for (int iy = i0[1]; iy <= i1[1]; ++iy) {
      for (int ix = i0[0]; ix <= i1[0]; ++ix) {
        const Vec3 x = grid.node(ix, iy, iz);
        const double w = mollified((x - ball.center).norm(), ball.radius, h);
        if (w > 0.0) {
          out.points.push_back(x);
          out.weights.push_back(w);
          wsum += w;
        }
      }
    }
  }
  if (out.points.empty()) {
    throw PreconditionError("receiver ball does not cover any grid node");
  }
  const double scale = ball.volume() / (wsum * h * h * h);
  for (double& w : out.weights) w *= scale * h * h * h;
  return out;
}

std::string SimulationConfig::canonical_json() const {
  nlohmann::json j;
  j["h"] = h;
  j["T"] = T;
  j["cfl"] = cfl;
  j["domain_halfwidth"] = domain_halfwidth;
  j["causal_margin"] = causal_margin;
  j["source"] = ball_to_json(source);
  j["receiver"] = ball_to_json(receiver);
  j["obstacle"] = obstacle ? obstacle_to_json(*obstacle) : nlohmann::json();
  j["energy_stride"] = energy_stride;
  j["seed"] = seed;
  return j.dump(2);
}

ReceiverTrace simulate(const SimulationConfig& cfg) {
  const GridSpec grid = resolve_grid(cfg);
  const int n = grid.n;
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t total = nn * nn * nn;
  const std::size_t sx = 1, sy = nn, sz = nn * nn;
  const double h = cfg.h;

  const double dt0 = cfg.cfl * h;
  const int n_steps = std::max(1, static_cast<int>(std::ceil(cfg.T / dt0 -
                                                             1e-12)));
  const double dt = cfg.T / n_steps;
  const double c2 = (dt * dt) / (h * h);

  std::vector<double> u_prev(total, 0.0), u_curr(total, 0.0);

  // Mollified, volume-preserving source velocity; u(dt) = dt * f.
  {
    const Ball& B = cfg.source;
    const double reach = B.radius + 0.5 * h;
    int i0[3], i1[3];
    for (int a = 0; a < 3; ++a) {
      i0[a] = std::max(0, static_cast<int>(std::ceil(
                              (B.center[a] - reach - grid.origin[a]) / h)));
      i1[a] = std::min(n - 1, static_cast<int>(std::floor(
                                  (B.center[a] + reach - grid.origin[a]) / h)));
    }
    std::vector<std::pair<std::size_t, double>> src;
    double wsum = 0.0;
    for (int iz = i0[2]; iz <= i1[2]; ++iz) {
      for (int iy = i0[1]; iy <= i1[1]; ++iy) {
        for (int ix = i0[0]; ix <= i1[0]; ++ix) {
          const Vec3 x = grid.node(ix, iy, iz);
          const double w = mollified((x - B.center).norm(), B.radius, h);
          if (w > 0.0) {
            src.push_back({ix * sx + iy * sy + iz * sz, w});
            wsum += w;
          }
        }
      }
    }
    if (src.empty()) {
      throw PreconditionError("source ball does not cover any grid node");
    }
    const double scale = B.volume() / (wsum * h * h * h);
    for (const auto& [idx, w] : src) u_curr[idx] = dt * w * scale;
  }

  // Staircase Dirichlet mask.
  std::vector<std::size_t> mask;
  if (cfg.obstacle) {
    const auto [blo, bhi] = cfg.obstacle->bounding_box();
    int i0[3], i1[3];
    for (int a = 0; a < 3; ++a) {
      i0[a] = std::max(1, static_cast<int>(
                              std::floor((blo[a] - grid.origin[a]) / h)));
      i1[a] = std::min(n - 2, static_cast<int>(
                                  std::ceil((bhi[a] - grid.origin[a]) / h)));
    }
    for (int iz = i0[2]; iz <= i1[2]; ++iz) {
      for (int iy = i0[1]; iy <= i1[1]; ++iy) {
        for (int ix = i0[0]; ix <= i1[0]; ++ix) {
          if (cfg.obstacle->contains(grid.node(ix, iy, iz))) {
            mask.push_back(ix * sx + iy * sy + iz * sz);
          }
        }
      }
    }
    for (const std::size_t idx : mask) u_curr[idx] = 0.0;
  }

  // Receiver stencils (trilinear; quadrature points land on nodes exactly).
  const ReceiverSet rset = receiver_quadrature(grid, cfg.receiver);
  const int nr = static_cast<int>(rset.points.size());
  struct Stencil {
    std::size_t idx[8];
    double w[8];
  };
  std::vector<Stencil> stencils(nr);
  for (int r = 0; r < nr; ++r) {
    const Vec3 rel = (rset.points[r] - grid.origin) / h;
    int base[3];
    double f[3];
    for (int a = 0; a < 3; ++a) {
      base[a] = std::min(n - 2, std::max(0, static_cast<int>(
                                                std::floor(rel[a] + 1e-12))));
      f[a] = std::min(1.0, std::max(0.0, rel[a] - base[a]));
      if (f[a] < 1e-9) f[a] = 0.0;
    }
    int k = 0;
    for (int dz = 0; dz < 2; ++dz) {
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx, ++k) {
          stencils[r].idx[k] = (base[0] + dx) * sx + (base[1] + dy) * sy +
                               (base[2] + dz) * sz;
          stencils[r].w[k] = (dx ? f[0] : 1.0 - f[0]) *
                             (dy ? f[1] : 1.0 - f[1]) *
                             (dz ? f[2] : 1.0 - f[2]);
        }
      }
    }
  }

  ReceiverTrace trace;
  trace.points = rset.points;
  trace.weights = rset.weights;
  trace.dt = dt;
  trace.h = h;
  trace.T = cfg.T;
  trace.n_samples = n_steps + 1;
  trace.samples.assign(static_cast<std::size_t>(trace.n_samples) * nr, 0.0);
  trace.config_json = cfg.canonical_json();

  auto record = [&](int k, const std::vector<double>& u) {
    double* dst = trace.samples.data() + static_cast<std::size_t>(k) * nr;
    for (int r = 0; r < nr; ++r) {
      const Stencil& st = stencils[r];
      double s = 0.0;
      for (int j = 0; j < 8; ++j) s += st.w[j] * u[st.idx[j]];
      dst[r] = s;
    }
  };

  // Conserved discrete leapfrog energy
  //   E = h^3/(2 dt^2) ||u_new - u_old||^2 + (h/2) a(u_new, u_old),
  // a(u, v) = sum over grid links of (delta u)(delta v).
  auto energy_of = [&](const std::vector<double>& un,
                       const std::vector<double>& uo) {
    double kin = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      const double d = un[i] - uo[i];
      kin += d * d;
    }
    double pot = 0.0;
    for (int iz = 0; iz < n; ++iz) {
      for (int iy = 0; iy < n; ++iy) {
        const std::size_t row = iy * sy + iz * sz;
        for (int ix = 0; ix < n; ++ix) {
          const std::size_t i = row + ix;
          if (ix + 1 < n) {
            pot += (un[i + sx] - un[i]) * (uo[i + sx] - uo[i]);
          }
          if (iy + 1 < n) {
            pot += (un[i + sy] - un[i]) * (uo[i + sy] - uo[i]);
          }
          if (iz + 1 < n) {
            pot += (un[i + sz] - un[i]) * (uo[i + sz] - uo[i]);
          }
        }
      }
    }
    return h * h * h / (2.0 * dt * dt) * kin + 0.5 * h * pot;
  };

  record(0, u_prev);
  record(1, u_curr);
  trace.energy_steps.push_back(1);
  trace.energy.push_back(energy_of(u_curr, u_prev));

  for (int k = 2; k <= n_steps; ++k) {
    double* up = u_prev.data();
    const double* uc = u_curr.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int iz = 1; iz < n - 1; ++iz) {
      for (int iy = 1; iy < n - 1; ++iy) {
        const std::size_t row = iy * sy + iz * sz;
        for (std::size_t i = row + 1; i < row + nn - 1; ++i) {
          const double lap = uc[i - sx] + uc[i + sx] + uc[i - sy] +
                             uc[i + sy] + uc[i - sz] + uc[i + sz] -
                             6.0 * uc[i];
          up[i] = 2.0 * uc[i] - up[i] + c2 * lap;
        }
      }
    }
    for (const std::size_t idx : mask) up[idx] = 0.0;
    std::swap(u_prev, u_curr);
    record(k, u_curr);
    if (k % cfg.energy_stride == 0 || k == n_steps) {
      trace.energy_steps.push_back(k);
      trace.energy.push_back(energy_of(u_curr, u_prev));
    }
  }

  double peak = 0.0;
  for (const double s : trace.samples) peak = std::max(peak, std::fabs(s));
  trace.peak = peak;
  return trace;
}

std::vector<std::vector<double>> accumulate_laplace(
    const ReceiverTrace& trace, const std::vector<double>& taus,
    const Ball* causal_source, double causal_margin) {
  const int nr = trace.n_receivers();
  const int ns = trace.n_samples;
  const double dt = trace.dt;
  std::vector<int> first(nr, 0);
  if (causal_source) {
    for (int r = 0; r < nr; ++r) {
      const double arrival =
          (trace.points[r] - causal_source->center).norm() -
          causal_source->radius - causal_margin;
      first[r] = std::max(
          0, std::min(ns - 1, static_cast<int>(std::floor(arrival / dt))));
    }
  }
  std::vector<std::vector<double>> out(taus.size(),
                                       std::vector<double>(nr, 0.0));
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    const double tau = taus[ti];
    std::vector<double>& row = out[ti];
    for (int k = 0; k < ns; ++k) {
      const double t = k * dt;
      const double damp = std::exp(-tau * t) * dt *
                          ((k == 0 || k == ns - 1) ? 0.5 : 1.0);
      if (damp == 0.0) break;  // exp underflow: later samples contribute 0
      const double* src = trace.samples.data() +
                          static_cast<std::size_t>(k) * nr;
      for (int r = 0; r < nr; ++r) {
        if (k >= first[r]) row[r] += damp * src[r];
      }
    }
  }
  return out;
}

std::vector<double> receiver_functional(const ReceiverTrace& trace,
                                        const std::vector<double>& taus,
                                        const Ball* causal_source,
                                        double causal_margin) {
  const auto lap = accumulate_laplace(trace, taus, causal_source,
                                      causal_margin);
  std::vector<double> out(taus.size(), 0.0);
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    double q = 0.0;
    for (int r = 0; r < trace.n_receivers(); ++r) {
      q += trace.weights[r] * lap[ti][r];
    }
    out[ti] = q;
  }
  return out;
}

double free_space_wave(double r, double t, double eta) {
  if (t <= 0.0) return 0.0;
  if (r < 1e-12) return t < eta ? t : (t == eta ? 0.5 * eta : 0.0);
  if (r + t <= eta) return t;
  if (std::fabs(r - t) <= eta) return (eta * eta - (r - t) * (r - t)) /
                                      (4.0 * r);
  return 0.0;
}

CausalityReport causality_report(const ReceiverTrace& trace,
                                 const Ball& source, double margin) {
  CausalityReport rep;
  rep.margin = margin;
  if (trace.peak <= 0.0) return rep;
  for (int r = 0; r < trace.n_receivers(); ++r) {
    const double arrival =
        (trace.points[r] - source.center).norm() - source.radius - margin;
    const int k_max = std::min(
        trace.n_samples, static_cast<int>(std::floor(arrival / trace.dt)));
    for (int k = 0; k < k_max; ++k) {
      rep.max_ratio = std::max(rep.max_ratio,
                               std::fabs(trace.at(k, r)) / trace.peak);
    }
  }
  return rep;
}

// ----------------------------------------------------------------- archive --

namespace {

template <typename T>
void write_raw(std::ofstream& out, const T* p, std::size_t count) {
  out.write(reinterpret_cast<const char*>(p),
            static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
void read_raw(std::ifstream& in, T* p, std::size_t count) {
  in.read(reinterpret_cast<char*>(p),
          static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw PreconditionError("trace archive truncated");
}

}  // namespace

void save_trace(const std::string& path, const ReceiverTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write trace archive: " + path);
  const char magic[8] = {'E', 'N', 'C', 'L', '1', 0, 0, 0};
  out.write(magic, 8);
  const std::uint32_t head[4] = {
      1u, static_cast<std::uint32_t>(trace.points.size()),
      static_cast<std::uint32_t>(trace.n_samples),
      static_cast<std::uint32_t>(trace.energy.size())};
  write_raw(out, head, 4);
  const double scal[4] = {trace.dt, trace.h, trace.T, trace.peak};
  write_raw(out, scal, 4);
  for (const auto& pnt : trace.points) write_raw(out, pnt.data(), 3);
  write_raw(out, trace.weights.data(), trace.weights.size());
  write_raw(out, trace.samples.data(), trace.samples.size());
  write_raw(out, trace.energy_steps.data(), trace.energy_steps.size());
  write_raw(out, trace.energy.data(), trace.energy.size());
  if (!out) throw PreconditionError("failed writing trace archive: " + path);
  out.close();

  std::ofstream side(path + ".json");
  side << (trace.config_json.empty() ? std::string("{}") : trace.config_json)
       << '\n';
}

ReceiverTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open trace archive: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "ENCL1\0\0\0", 8) != 0) {
    throw PreconditionError("not a trace archive (bad magic): " + path);
  }
  std::uint32_t head[4];
  read_raw(in, head, 4);
  if (head[0] != 1u) {
    throw PreconditionError("unsupported trace archive version");
  }
  const std::size_t nr = head[1], ns = head[2], ne = head[3];
  ReceiverTrace trace;
  double scal[4];
  read_raw(in, scal, 4);
  trace.dt = scal[0];
  trace.h = scal[1];
  trace.T = scal[2];
  trace.peak = scal[3];
  trace.n_samples = static_cast<int>(ns);
  trace.points.resize(nr);
  for (auto& pnt : trace.points) read_raw(in, pnt.data(), 3);
  trace.weights.resize(nr);
  read_raw(in, trace.weights.data(), nr);
  trace.samples.resize(nr * ns);
  read_raw(in, trace.samples.data(), nr * ns);
  trace.energy_steps.resize(ne);
  if (ne) read_raw(in, trace.energy_steps.data(), ne);
  trace.energy.resize(ne);
  if (ne) read_raw(in, trace.energy.data(), ne);

  std::ifstream side(path + ".json");
  if (side) {
    std::string content((std::istreambuf_iterator<char>(side)),
                        std::istreambuf_iterator<char>());
    while (!content.empty() && (content.back() == '\n' ||
                                content.back() == '\r')) {
      content.pop_back();
    }
    trace.config_json = content;
  }
  return trace;
}

}  // namespace enclosure
