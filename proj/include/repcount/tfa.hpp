#ifndef REPCOUNT_TFA_HPP_
#define REPCOUNT_TFA_HPP_

#include <Eigen/Core>
#include <complex>
#include <string>

#include "repcount/config.hpp"
#include "repcount/errors.hpp"

namespace repcount {

/// Uniformly sampled real signal.
struct Signal {
  Eigen::VectorXd samples;
  double dt = 0.0;  // seconds

  Eigen::Index size() const { return samples.size(); }
};

/// Logarithmic scale grid s_j = s0 * 2^(j*dj), j = 0..J.
struct ScaleGrid {
  double s0 = 0.0;
  double dj = 0.0;
  int J = 0;
  Eigen::VectorXd scales;  // seconds, strictly increasing, size J+1
};

/// Wavelet power |W_n(s_j)|^2 as a time x scale surface.
struct Scalogram {
  Eigen::MatrixXd power;   // N x (J+1), row n, column j
  ScaleGrid grid;
  double dt = 0.0;
  Eigen::VectorXd coi;     // per-timestep maximum trustworthy scale, seconds
  double omega0 = 6.0;

  Eigen::Index timesteps() const { return power.rows(); }
  Eigen::Index num_scales() const { return power.cols(); }
};

/// Conversion between wavelet scale and equivalent Fourier period:
/// period = fourier_factor(omega0) * scale. With conversion disabled the
/// factor is 1 (raw scale used as period).
double fourier_factor(double omega0);
double scale_to_period(double scale, const RunConfig& cfg);

/// Centered moving average (window shrinks symmetrically at the ends)
/// followed by least-squares line removal. Raises WindowTooLarge; window
/// must be odd.
Signal detrend_and_smooth(const Signal& signal, int window = 7);

/// Morlet wavelet at non-dimensional time eta:
/// pi^(-1/4) * exp(i*omega0*eta) * exp(-eta^2/2).
std::complex<double> morlet_daughter(double eta, double omega0 = 6.0);

/// Builds the log scale grid from s0 = s0_factor*dt up to the scale whose
/// equivalent Fourier period is N*dt/min_reps. Raises SignalTooShort when
/// that range is empty.
ScaleGrid make_scale_grid(Eigen::Index n, double dt, const RunConfig& cfg = {});

enum class CwtRoute { FourierDomain, DirectSummation };

/// Continuous wavelet transform with per-scale sqrt(dt/s) daughter
/// normalization. The Fourier-domain route multiplies spectra on a copy
/// zero-padded to the next power of two covering the widest daughter
/// support; both routes agree to ~1e-12 on the unpadded support.
Scalogram cwt(const Signal& signal, const ScaleGrid& grid,
              const RunConfig& cfg = {},
              CwtRoute route = CwtRoute::FourierDomain);

/// Fourier baseline: maximum peak of the plain power spectrum of the
/// detrended signal among bins with at least min_reps cycles, converted to
/// a count via the duration. Raises SignalTooShort for N < 8 or when no
/// bin qualifies.
double periodogram_count(const Signal& signal, const RunConfig& cfg = {});

// ---------------------------------------------------------------------------
// Scalogram export.

/// CSV with a header row of scales in seconds and one row per timestep.
std::string scalogram_to_csv(const Scalogram& sc);

/// 8-bit PGM heatmap, power normalized to its maximum, time on the x-axis,
/// smallest scale on the top row.
std::vector<uint8_t> scalogram_to_pgm(const Scalogram& sc);

}  // namespace repcount

#endif  // REPCOUNT_TFA_HPP_
