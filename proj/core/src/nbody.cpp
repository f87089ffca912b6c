#include "kspic/nbody.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "kspic/error.hpp"
#include "kspic/parallel.hpp"
#include "kspic/rng.hpp"

namespace kspic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run) {
  std::uint64_t s = seed ^ (0x243f6a8885a308d3ULL * (run + 1));
  return splitmix64(s);
}

}  // namespace

NBodyState::NBodyState(std::vector<Vec2> positions, double total_mass, NBodyParams params, std::uint64_t seed)
    : positions_(std::move(positions)), total_mass_(total_mass), n0_(positions_.size()), params_(params), seed_(seed) {
  if (positions_.empty()) throw NumericalError("nbody: need at least one particle");
  if (!(total_mass > 0.0)) throw NumericalError("nbody: total mass must be positive");
  if (params_.mu < 0.0 || params_.chi < 0.0 || params_.eps < 0.0) {
    throw NumericalError("nbody: mu, chi and eps must be non-negative");
  }
  masses_.assign(n0_, total_mass / static_cast<double>(n0_));
  ids_.resize(n0_);
  for (std::size_t i = 0; i < n0_; ++i) ids_[i] = i;
}

double NBodyState::diffusion_amplitude(std::size_t n) const {
  return std::sqrt(2.0 * params_.mu * total_mass_ / (static_cast<double>(n0_) * masses_[n]));
}

std::vector<Vec2> nbody_drift(const NBodyState& state, int threads) {
  const auto pos = state.positions();
  const auto mass = state.masses();
  const auto& params = state.params();
  const std::size_t n = pos.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pos[i].x;
    ys[i] = pos[i].y;
  }
  std::vector<Vec2> drift(n);
  const double eps = params.eps;
  const double eps2 = eps * eps;

  if (params.kernel.form() == KernelForm::log2d) {
    // grad V = d / (2 pi max(r, eps) r)
    const double coef = -params.chi / (2.0 * kPi);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const double xi = xs[i];
        const double yi = ys[i];
        double ax = 0.0;
        double ay = 0.0;
        bool coincident = false;
        for (std::size_t j = 0; j < n; ++j) {
          const double dx = xi - xs[j];
          const double dy = yi - ys[j];
          const double r2 = dx * dx + dy * dy;
          if (r2 == 0.0) {
            coincident |= j != i;
            continue;
          }
          const double inv = r2 >= eps2 ? 1.0 / r2 : 1.0 / (eps * std::sqrt(r2));
          ax += mass[j] * inv * dx;
          ay += mass[j] * inv * dy;
        }
        if (coincident && !(eps > 0.0)) throw NumericalError("nbody: coincident particles with eps = 0");
        drift[i] = {coef * ax, coef * ay};
      }
    });
  } else {
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        Vec2 acc;
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) acc += mass[j] * params.kernel.gradient_regularized(pos[i], pos[j], eps);
        }
        drift[i] = -params.chi * acc;
      }
    });
  }
  return drift;
}

void nbody_step(NBodyState& state, double dtau, int threads) {
  if (!(dtau > 0.0)) throw NumericalError("nbody: step must be positive");
  const auto drift = nbody_drift(state, threads);
  const double sqrt_dt = std::sqrt(dtau);
  const std::size_t n = state.positions_.size();
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Vec2 x = state.positions_[i] + dtau * drift[i];
      if (state.params_.mu > 0.0) {
        StreamRng rng(state.seed_, state.ids_[i], state.step_);
        std::normal_distribution<double> normal;
        const double amp = state.diffusion_amplitude(i) * sqrt_dt;
        const double n1 = normal(rng);
        const double n2 = normal(rng);
        x += Vec2{amp * n1, amp * n2};
      }
      state.positions_[i] = x;
    }
  });
  ++state.step_;
  state.t_ += dtau;

  if (!state.params_.coalesce) return;
  const double r_merge = state.params_.merge_radius();
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < state.positions_.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < state.positions_.size() && !merged; ++j) {
        if (distance(state.positions_[i], state.positions_[j]) >= r_merge) continue;
        const double mi = state.masses_[i];
        const double mj = state.masses_[j];
        state.positions_[i] = (1.0 / (mi + mj)) * (mi * state.positions_[i] + mj * state.positions_[j]);
        state.masses_[i] = mi + mj;
        const auto jj = static_cast<std::ptrdiff_t>(j);
        state.positions_.erase(state.positions_.begin() + jj);
        state.masses_.erase(state.masses_.begin() + jj);
        state.ids_.erase(state.ids_.begin() + jj);
        ++state.merges_;
        merged = true;
      }
    }
  }
}

std::vector<double> radius_series(const std::vector<std::vector<Vec2>>& frames) {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(radius(f));
  return out;
}

double critical_mass(double mu, double chi) { return 8.0 * kPi * mu / chi; }
double sustaining_mass(double mu, double chi) { return 4.0 * kPi * mu / chi; }

double predicted_r2_slope(double mu, double chi, double mass, std::size_t n) {
  return (1.0 - 1.0 / static_cast<double>(n)) * (4.0 * mu - chi * mass / (2.0 * kPi));
}

namespace {

struct RunFrames {
  std::vector<double> t;
  std::vector<double> r2;
  double t_hit = kNaN;
};

double ls_slope(const std::vector<double>& t, const std::vector<double>& y, double t_max) {
  double st = 0.0, sy = 0.0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < t.size() && t[k] <= t_max + 1e-9; ++k, ++m) {
    st += t[k];
    sy += y[k];
  }
  if (m < 2) return kNaN;
  const double tm = st / m;
  const double ym = sy / m;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    num += (t[k] - tm) * (y[k] - ym);
    den += (t[k] - tm) * (t[k] - tm);
  }
  return num / den;
}

}  // namespace

RadiusLawReport radius_law_check(const RadiusLawConfig& cfg) {
  if (cfg.n_runs < 2 || cfg.n_particles < 2) throw NumericalError("radius law: need >= 2 runs and particles");
  if (!(cfg.dt > 0.0) || !(cfg.frame_dt >= cfg.dt)) throw NumericalError("radius law: need 0 < dt <= frame_dt");
  RadiusLawReport rep;
  rep.mass = cfg.mass;
  rep.critical_mass = critical_mass(cfg.mu, cfg.chi);
  rep.n_particles = cfg.n_particles;
  rep.runs = cfg.n_runs;
  rep.predicted_slope = predicted_r2_slope(cfg.mu, cfg.chi, cfg.mass, cfg.n_particles);
  rep.supercritical = cfg.mass > rep.critical_mass;
  const double gamma = 4.0 * cfg.mu * (cfg.mass / rep.critical_mass - 1.0);
  const double pull = cfg.chi * cfg.mass / (2.0 * kPi);
  const double sigma = cfg.r0 / std::sqrt(2.0);

  std::vector<RunFrames> runs(static_cast<std::size_t>(cfg.n_runs));
  double r0_sq_sum = 0.0;
  for (int run = 0; run < cfg.n_runs; ++run) {
    const std::uint64_t seed = run_seed(cfg.seed, static_cast<std::uint64_t>(run));
    std::vector<Vec2> pos(cfg.n_particles);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      StreamRng rng(seed, i, kInitStream);
      std::normal_distribution<double> normal(0.0, sigma);
      const double x = normal(rng);
      const double y = normal(rng);
      pos[i] = {x, y};
    }
    NBodyParams params{Kernel::log2d(), cfg.mu, cfg.chi, cfg.eps, false, 0.0};
    NBodyState state(std::move(pos), cfg.mass, params, seed);
    auto& fr = runs[static_cast<std::size_t>(run)];
    double r = radius(state.positions());
    r0_sq_sum += r * r;
    fr.t.push_back(0.0);
    fr.r2.push_back(r * r);
    const double t_blow = rep.supercritical ? r * r / gamma : kNaN;
    const double t_max = rep.supercritical ? std::max(cfg.t_fit, 1.5 * t_blow) : cfg.t_fit;
    const auto n_frames = static_cast<long long>(std::llround(t_max / cfg.frame_dt));
    bool stopped = false;
    for (long long f = 1; f <= n_frames && !stopped; ++f) {
      const double target = static_cast<double>(f) * cfg.frame_dt;
      while (state.time() < target - 1e-12) {
        double h = std::min(cfg.dt, target - state.time());
        if (pull > 0.0) h = std::min(h, std::max(cfg.adapt * r * r / pull, 1e-9));
        nbody_step(state, h, cfg.threads);
        r = radius(state.positions());
        if (rep.supercritical && r <= cfg.stop_radius) {
          fr.t_hit = state.time();
          stopped = true;
          break;
        }
      }
      if (!stopped) {
        fr.t.push_back(target);
        fr.r2.push_back(r * r);
      }
    }
  }
  rep.mean_r0_sq = r0_sq_sum / cfg.n_runs;
  rep.predicted_blowup = rep.supercritical ? rep.mean_r0_sq / gamma : kNaN;
  const double t_fit = rep.supercritical ? std::min(cfg.t_fit, 0.8 * rep.predicted_blowup) : cfg.t_fit;

  double sum = 0.0, sum_sq = 0.0, hit_sum = 0.0;
  for (const auto& fr : runs) {
    const double s = ls_slope(fr.t, fr.r2, t_fit);
    sum += s;
    sum_sq += s * s;
    if (std::isfinite(fr.t_hit)) {
      hit_sum += fr.t_hit;
      ++rep.runs_collapsed;
    }
  }
  const double n = cfg.n_runs;
  rep.fitted_slope = sum / n;
  const double var = std::max(0.0, (sum_sq - n * rep.fitted_slope * rep.fitted_slope) / (n - 1.0));
  rep.slope_stderr = std::sqrt(var / n);
  rep.ci_low = rep.fitted_slope - 3.0 * rep.slope_stderr;
  rep.ci_high = rep.fitted_slope + 3.0 * rep.slope_stderr;
  rep.relative_error = rep.predicted_slope != 0.0
                           ? std::abs(rep.fitted_slope - rep.predicted_slope) / std::abs(rep.predicted_slope)
                           : kNaN;
  rep.measured_blowup = rep.runs_collapsed > 0 ? hit_sum / rep.runs_collapsed : kNaN;

  std::size_t longest = 0;
  for (const auto& fr : runs) longest = std::max(longest, fr.t.size());
  for (std::size_t k = 0; k < longest; ++k) {
    double acc = 0.0;
    int count = 0;
    for (const auto& fr : runs) {
      if (k < fr.r2.size()) {
        acc += fr.r2[k];
        ++count;
      }
    }
    rep.times.push_back(static_cast<double>(k) * cfg.frame_dt);
    rep.mean_r2.push_back(acc / count);
  }
  rep.r2_at_blowup = kNaN;
  for (std::size_t k = 1; rep.supercritical && k < rep.times.size(); ++k) {
    if (rep.times[k] < rep.predicted_blowup) continue;
    const double w = (rep.predicted_blowup - rep.times[k - 1]) / (rep.times[k] - rep.times[k - 1]);
    rep.r2_at_blowup = (1.0 - w) * rep.mean_r2[k - 1] + w * rep.mean_r2[k];
    break;
  }
  return rep;
}

RadialProbeResult radial_probe(const RadialProbeConfig& cfg) {
  if (!(cfg.r0 > cfg.eps_hit) || !(cfg.r_max > cfg.r0) || !(cfg.dt > 0.0) || cfg.n_trials == 0) {
    throw NumericalError("radial probe: need eps_hit < r0 < r_max, dt > 0 and trials > 0");
  }
  const double pull = cfg.chi * cfg.mass / (2.0 * kPi);
  const double sigma = std::sqrt(2.0 * cfg.mu * cfg.dt);
  const auto n_steps = static_cast<long long>(std::llround(cfg.t_end / cfg.dt));
  const auto drift = [&](double r) {
    if (cfg.full_k0_drift) return cfg.mu / r - pull * cfg.k * bessel_k1(cfg.k * r);
    return (cfg.mu - pull) / r;
  };

  std::vector<double> hit(cfg.n_trials, kNaN);
  parallel_for(cfg.n_trials, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t trial = begin; trial < end; ++trial) {
      StreamRng rng(cfg.seed, trial, 0);
      std::normal_distribution<double> normal;
      double r = cfg.r0;
      for (long long s = 1; s <= n_steps; ++s) {
        r += drift(r) * cfg.dt + sigma * normal(rng);
        if (r <= cfg.eps_hit) {
          hit[trial] = static_cast<double>(s) * cfg.dt;
          break;
        }
        if (r > cfg.r_max) r = 2.0 * cfg.r_max - r;
      }
    }
  });

  RadialProbeResult res;
  res.mass = cfg.mass;
  res.trials = cfg.n_trials;
  double hit_sum = 0.0;
  for (double h : hit) {
    if (std::isfinite(h)) {
      ++res.absorbed;
      hit_sum += h;
    }
  }
  const double n = static_cast<double>(res.trials);
  res.absorbed_fraction = static_cast<double>(res.absorbed) / n;
  res.stderr_fraction = std::sqrt(res.absorbed_fraction * (1.0 - res.absorbed_fraction) / n);
  res.mean_hit_time = res.absorbed > 0 ? hit_sum / static_cast<double>(res.absorbed) : kNaN;
  return res;
}

HybridVsNBodyReport hybrid_vs_nbody(const HybridVsNBodyConfig& cfg) {
  if (!cfg.physics.elliptic()) throw NumericalError("hybrid vs nbody: elliptic physics required");
  if (cfg.frame_every < 1) throw NumericalError("hybrid vs nbody: frame_every must be >= 1");
  SimState hybrid = init_state(cfg.grid, cfg.physics, cfg.init, cfg.n_particles, cfg.seed);
  NBodyParams params{Kernel::bessel2d(cfg.physics.k), cfg.physics.mu, cfg.physics.chi, cfg.eps, false, 0.0};
  NBodyState nbody(std::vector<Vec2>(hybrid.ensemble.positions().begin(), hybrid.ensemble.positions().end()),
                   cfg.physics.mass, params, cfg.seed);

  HybridVsNBodyReport rep;
  rep.times.push_back(0.0);
  rep.r_hybrid.push_back(radius(hybrid.ensemble.positions()));
  rep.r_nbody.push_back(radius(nbody.positions()));

  StepPolicy policy;
  policy.dt = cfg.dt;
  OutputPolicy output;
  output.diag_every = std::numeric_limits<int>::max();
  output.snapshot_every = 0;
  const auto n_steps = static_cast<long long>(std::llround(cfg.t_end / cfg.dt));
  long long step = 0;
  run(hybrid, cfg.physics, policy, cfg.t_end, output,
      [&](const SimState& s) {
        ++step;
        nbody_step(nbody, cfg.dt, cfg.threads);
        if (step % cfg.frame_every == 0 || step == n_steps) {
          rep.times.push_back(s.t);
          rep.r_hybrid.push_back(radius(s.ensemble.positions()));
          rep.r_nbody.push_back(radius(nbody.positions()));
        }
      },
      cfg.threads);

  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    rep.max_r_discrepancy = std::max(rep.max_r_discrepancy, std::abs(rep.r_hybrid[k] - rep.r_nbody[k]));
  }
  rep.within_tolerance = rep.max_r_discrepancy <= cfg.r_tolerance;

  const auto detection = default_detection(cfg.physics.mu, cfg.physics.chi, cfg.grid.dx);
  rep.atoms_hybrid = detect_atoms(hybrid.ensemble.positions(), hybrid.ensemble.mass_per_particle(), cfg.grid, detection);
  const auto npos = nbody.positions();
  if (std::all_of(npos.begin(), npos.end(), [&](const Vec2& p) { return cfg.grid.contains(p); })) {
    rep.atoms_nbody = detect_atoms(npos, cfg.physics.mass / static_cast<double>(npos.size()), cfg.grid, detection);
  }
  return rep;
}

}  // namespace kspic
