#include "repcount/tfa.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <vector>

#include "repcount/parallel.hpp"

namespace repcount {

namespace {

using cd = std::complex<double>;

constexpr double kPiQuarterRoot = 0.7511255444649425;  // pi^(-1/4)

void validate_signal(const Signal& s) {
  if (s.size() < 2) throw SignalTooShort("signal too short: need at least 2 samples");
  if (!(s.dt > 0)) throw Error("signal: dt must be positive");
  if (!s.samples.allFinite()) throw NonFinite("signal: non-finite sample");
}

size_t next_pow2(size_t v) {
  size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

double fourier_factor(double omega0) {
  return 4.0 * std::numbers::pi / (omega0 + std::sqrt(2.0 + omega0 * omega0));
}

double scale_to_period(double scale, const RunConfig& cfg) {
  return cfg.fourier_factor_conversion ? fourier_factor(cfg.omega0) * scale : scale;
}

Signal detrend_and_smooth(const Signal& signal, int window) {
  validate_signal(signal);
  const Eigen::Index n = signal.size();
  if (window < 1 || window % 2 == 0)
    throw Error("detrend: window must be a positive odd integer");
  if (window > n) throw WindowTooLarge("detrend: window exceeds signal length");

  const int half = (window - 1) / 2;
  Eigen::VectorXd smoothed(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index h = std::min<Eigen::Index>({half, i, n - 1 - i});
    smoothed(i) = signal.samples.segment(i - h, 2 * h + 1).mean();
  }

  // Least-squares line over t = 0..n-1.
  const double tbar = 0.5 * static_cast<double>(n - 1);
  double sxy = 0.0, sxx = 0.0;
  const double ybar = smoothed.mean();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tc = static_cast<double>(i) - tbar;
    sxy += tc * (smoothed(i) - ybar);
    sxx += tc * tc;
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  Signal out;
  out.dt = signal.dt;
  out.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.samples(i) = smoothed(i) - (ybar + slope * (static_cast<double>(i) - tbar));
  return out;
}

std::complex<double> morlet_daughter(double eta, double omega0) {
  const double envelope = kPiQuarterRoot * std::exp(-0.5 * eta * eta);
  return cd(envelope * std::cos(omega0 * eta), envelope * std::sin(omega0 * eta));
}

ScaleGrid make_scale_grid(Eigen::Index n, double dt, const RunConfig& cfg) {
  if (n < 2 || !(dt > 0)) throw SignalTooShort("scale grid: need n >= 2 and dt > 0");
  const double s0 = cfg.s0_factor * dt;
  const double period_max =
      static_cast<double>(n) * dt / static_cast<double>(cfg.min_reps);
  const double ff = cfg.fourier_factor_conversion ? fourier_factor(cfg.omega0) : 1.0;
  const double s_max = period_max / ff;
  if (!(s_max > s0))
    throw SignalTooShort("scale grid: signal cannot host the minimum repetitions");
  ScaleGrid grid;
  grid.s0 = s0;
  grid.dj = cfg.dj;
  grid.J = static_cast<int>(std::floor(std::log2(s_max / s0) / cfg.dj));
  if (grid.J < 1) throw SignalTooShort("scale grid: fewer than two scales available");
  grid.scales.resize(grid.J + 1);
  for (int j = 0; j <= grid.J; ++j)
    grid.scales(j) = s0 * std::pow(2.0, j * cfg.dj);
  return grid;
}

namespace {

// Daughter taps sampled on signed offsets, sqrt(dt/s)-normalized so power is
// comparable across scales.
cd daughter_tap(double offset_samples, double dt, double s, double omega0) {
  const double eta = offset_samples * dt / s;
  const double norm = std::sqrt(dt / s);
  return norm * morlet_daughter(eta, omega0);
}

Eigen::VectorXd coi_seconds(Eigen::Index n, double dt) {
  Eigen::VectorXd coi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = static_cast<double>(std::min(i, n - 1 - i));
    coi(i) = std::numbers::sqrt2 * d * dt;
  }
  return coi;
}

}  // namespace

Scalogram cwt(const Signal& signal, const ScaleGrid& grid, const RunConfig& cfg,
              CwtRoute route) {
  validate_signal(signal);
  const Eigen::Index n = signal.size();
  const double dt = signal.dt;
  const int num_scales = grid.J + 1;
  if (grid.scales.size() != num_scales || grid.scales(0) <= 0)
    throw Error("cwt: malformed scale grid");

  Scalogram sc;
  sc.grid = grid;
  sc.dt = dt;
  sc.omega0 = cfg.omega0;
  sc.coi = coi_seconds(n, dt);
  sc.power.resize(n, num_scales);

  if (route == CwtRoute::DirectSummation) {
    parallel_for(num_scales, [&](int j) {
      const double s = grid.scales(j);
      for (Eigen::Index t = 0; t < n; ++t) {
        cd acc(0.0, 0.0);
        for (Eigen::Index tp = 0; tp < n; ++tp) {
          acc += signal.samples(tp) *
                 std::conj(daughter_tap(static_cast<double>(tp - t), dt, s, cfg.omega0));
        }
        sc.power(t, j) = std::norm(acc);
      }
    });
    return sc;
  }

  // Fourier route: circular convolution on a copy zero-padded far enough
  // that wrap-around stays below the daughter's numerical tail.
  const double widest_reach = 8.0 * grid.scales(num_scales - 1) / dt;
  const size_t padded =
      next_pow2(static_cast<size_t>(n) + static_cast<size_t>(std::ceil(widest_reach)));

  std::vector<cd> padded_signal(padded, cd(0.0, 0.0));
  for (Eigen::Index i = 0; i < n; ++i) padded_signal[static_cast<size_t>(i)] = signal.samples(i);
  std::vector<cd> signal_spectrum;
  {
    Eigen::FFT<double> fft;
    fft.fwd(signal_spectrum, padded_signal);
  }

  parallel_for(num_scales, [&](int j) {
    const double s = grid.scales(j);
    const long p = static_cast<long>(padded);
    std::vector<cd> daughter(padded);
    for (long m = 0; m < p; ++m) {
      const long signed_off = m <= p / 2 ? m : m - p;
      daughter[static_cast<size_t>(m)] =
          daughter_tap(static_cast<double>(signed_off), dt, s, cfg.omega0);
    }
    Eigen::FFT<double> fft;
    std::vector<cd> daughter_spectrum;
    fft.fwd(daughter_spectrum, daughter);
    std::vector<cd> product(padded);
    for (size_t k = 0; k < padded; ++k)
      product[k] = signal_spectrum[k] * daughter_spectrum[k];
    std::vector<cd> w;
    fft.inv(w, product);
    for (Eigen::Index t = 0; t < n; ++t)
      sc.power(t, j) = std::norm(w[static_cast<size_t>(t)]);
  });
  return sc;
}

double periodogram_count(const Signal& signal, const RunConfig& cfg) {
  validate_signal(signal);
  const Eigen::Index n = signal.size();
  if (n < 8) throw SignalTooShort("periodogram: need at least 8 samples");
  if (cfg.min_reps > n / 2)
    throw SignalTooShort("periodogram: no bin holds the minimum repetitions");

  const Signal flat = detrend_and_smooth(signal, 1);
  std::vector<double> x(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) x[static_cast<size_t>(i)] = flat.samples(i);
  Eigen::FFT<double> fft;
  std::vector<cd> spectrum;
  fft.fwd(spectrum, x);

  // Bin k carries exactly k cycles over the duration n*dt.
  long best_k = cfg.min_reps;
  double best_power = -1.0;
  for (long k = cfg.min_reps; k <= n / 2; ++k) {
    const double p = std::norm(spectrum[static_cast<size_t>(k)]);
    if (p > best_power) {
      best_power = p;
      best_k = k;
    }
  }
  return static_cast<double>(best_k);
}

// ---------------------------------------------------------------------------
// Export

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string scalogram_to_csv(const Scalogram& sc) {
  std::string out;
  for (Eigen::Index j = 0; j < sc.num_scales(); ++j) {
    if (j) out += ',';
    out += fmt_double(sc.grid.scales(j));
  }
  out += '\n';
  for (Eigen::Index t = 0; t < sc.timesteps(); ++t) {
    for (Eigen::Index j = 0; j < sc.num_scales(); ++j) {
      if (j) out += ',';
      out += fmt_double(sc.power(t, j));
    }
    out += '\n';
  }
  return out;
}

std::vector<uint8_t> scalogram_to_pgm(const Scalogram& sc) {
  const Eigen::Index n = sc.timesteps();
  const Eigen::Index js = sc.num_scales();
  const double maxp = sc.power.maxCoeff();
  std::string header = "P5\n" + std::to_string(n) + " " + std::to_string(js) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<size_t>(n * js));
  for (Eigen::Index j = 0; j < js; ++j) {
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = maxp > 0 ? sc.power(t, j) / maxp : 0.0;
      out.push_back(static_cast<uint8_t>(std::lround(255.0 * v)));
    }
  }
  return out;
}

}  // namespace repcount
