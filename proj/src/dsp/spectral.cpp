// Copyright 2026 The Murmur Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "murmur/dsp/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/SparseCore>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"

namespace murmur::dsp {

namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* re = fftw_alloc_real(static_cast<std::size_t>(n));
  fftw_complex* cx = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
  Plans p;
  p.forward = fftw_plan_dft_r2c_1d(n, re, cx, FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_1d(n, cx, re, FFTW_ESTIMATE);
  fftw_free(re);
  fftw_free(cx);
  return cache.emplace(n, p).first->second;
}

struct FftwBuffers {
  explicit FftwBuffers(int n)
      : real(fftw_alloc_real(static_cast<std::size_t>(n))),
        complex(fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1))) {}
  ~FftwBuffers() {
    fftw_free(real);
    fftw_free(complex);
  }
  FftwBuffers(const FftwBuffers&) = delete;
  FftwBuffers& operator=(const FftwBuffers&) = delete;

  double* real;
  fftw_complex* complex;
};

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

void StftConfig::validate() const {
  if (hop_length <= 0 || window_length <= 0 || fft_size <= 0) {
    throw ArgumentError("STFT lengths must be positive");
  }
  if (hop_length > window_length || window_length > fft_size) {
    throw ArgumentError("STFT config requires hop <= window <= fft");
  }
}

std::vector<double> make_window(WindowKind kind, int length) {
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int n = 0; n < length; ++n) {
    const double phase = two_pi * n / length;
    switch (kind) {
      case WindowKind::kHann: w[n] = 0.5 - 0.5 * std::cos(phase); break;
      case WindowKind::kHamming: w[n] = 0.54 - 0.46 * std::cos(phase); break;
      case WindowKind::kRectangular: break;
    }
  }
  return w;
}

RealFft::RealFft(int n) : n_(n) {
  if (n <= 0) throw ArgumentError("FFT size must be positive");
  plans_for(n);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  const Plans& p = plans_for(n_);
  FftwBuffers buf(n_);
  std::copy(in.begin(), in.begin() + n_, buf.real);
  fftw_execute_dft_r2c(p.forward, buf.real, buf.complex);
  for (int k = 0; k <= n_ / 2; ++k) out[k] = {buf.complex[k][0], buf.complex[k][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
  const Plans& p = plans_for(n_);
  FftwBuffers buf(n_);
  for (int k = 0; k <= n_ / 2; ++k) {
    buf.complex[k][0] = in[k].real();
    buf.complex[k][1] = in[k].imag();
  }
  fftw_execute_dft_c2r(p.inverse, buf.complex, buf.real);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = buf.real[i] * scale;
}

Eigen::Index frame_count(std::size_t samples, const StftConfig& cfg) {
  if (samples < static_cast<std::size_t>(cfg.window_length)) return 0;
  return 1 + static_cast<Eigen::Index>((samples - cfg.window_length) / cfg.hop_length);
}

ComplexMatrix stft(std::span<const double> samples, const StftConfig& cfg) {
  cfg.validate();
  const Eigen::Index frames = frame_count(samples.size(), cfg);
  const auto window = make_window(cfg.window_kind, cfg.window_length);
  const RealFft fft(cfg.fft_size);
  ComplexMatrix out(frames, cfg.bins());
  std::vector<double> frame(static_cast<std::size_t>(cfg.fft_size), 0.0);
  std::vector<std::complex<double>> bins(static_cast<std::size_t>(cfg.bins()));
  for (Eigen::Index f = 0; f < frames; ++f) {
    const std::size_t start = static_cast<std::size_t>(f) * cfg.hop_length;
    for (int n = 0; n < cfg.window_length; ++n) frame[n] = samples[start + n] * window[n];
    fft.forward(frame, bins);
    for (int k = 0; k < cfg.bins(); ++k) out(f, k) = bins[k];
  }
  return out;
}

std::vector<double> istft(const ComplexMatrix& spec, const StftConfig& cfg) {
  cfg.validate();
  if (spec.cols() != cfg.bins()) throw ArgumentError("spectrogram bin count does not match fft size");
  const Eigen::Index frames = spec.rows();
  if (frames == 0) return {};
  const std::size_t length = static_cast<std::size_t>(frames - 1) * cfg.hop_length + cfg.window_length;
  const auto window = make_window(cfg.window_kind, cfg.window_length);
  const RealFft fft(cfg.fft_size);
  std::vector<double> out(length, 0.0);
  std::vector<double> norm(length, 0.0);
  std::vector<std::complex<double>> bins(static_cast<std::size_t>(cfg.bins()));
  std::vector<double> frame(static_cast<std::size_t>(cfg.fft_size));
  for (Eigen::Index f = 0; f < frames; ++f) {
    for (int k = 0; k < cfg.bins(); ++k) bins[k] = spec(f, k);
    fft.inverse(bins, frame);
    const std::size_t start = static_cast<std::size_t>(f) * cfg.hop_length;
    for (int n = 0; n < cfg.window_length; ++n) {
      out[start + n] += frame[n] * window[n];
      norm[start + n] += window[n] * window[n];
    }
  }
  // Samples no window touches carry no constraint; leave them at zero.
  for (std::size_t i = 0; i < length; ++i) out[i] = norm[i] > 1e-12 ? out[i] / norm[i] : 0.0;
  return out;
}

Matrix power_spectrogram(std::span<const double> samples, const StftConfig& cfg) {
  return stft(samples, cfg).cwiseAbs2();
}

std::vector<double> mel_center_frequencies(int mel_bins, int sample_rate) {
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> centers(static_cast<std::size_t>(mel_bins));
  for (int m = 0; m < mel_bins; ++m) centers[m] = mel_to_hz(mel_max * (m + 1) / (mel_bins + 1));
  return centers;
}

Matrix mel_filterbank(int mel_bins, int fft_size, int sample_rate) {
  if (mel_bins <= 0) throw ArgumentError("mel bin count must be positive");
  const int bins = fft_size / 2 + 1;
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<std::size_t>(mel_bins) + 2);
  for (int i = 0; i < mel_bins + 2; ++i) edges[i] = mel_to_hz(mel_max * i / (mel_bins + 1));
  Matrix fb = Matrix::Zero(mel_bins, bins);
  for (int m = 0; m < mel_bins; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      if (f > lo && f < mid) {
        fb(m, k) = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        fb(m, k) = (hi - f) / (hi - mid);
      }
    }
  }
  return fb;
}

MelSpectrogram mel_spectrogram(const Waveform& w, const StftConfig& cfg, int mel_bins, double epsilon) {
  cfg.validate();
  if (w.samples.size() < static_cast<std::size_t>(cfg.window_length)) {
    throw DegenerateInputError("waveform shorter than one analysis window");
  }
  const Matrix power = power_spectrogram(w.samples, cfg);
  const Matrix fb = mel_filterbank(mel_bins, cfg.fft_size, w.sample_rate);
  MelSpectrogram mel;
  mel.hop_length = cfg.hop_length;
  mel.sample_rate = w.sample_rate;
  mel.values = ((power * fb.transpose()).array() + epsilon).log().matrix();
  return mel;
}

MelSpectrogram mel_spectrogram(const Waveform& w, const MelConfig& cfg) {
  return mel_spectrogram(w, cfg.stft, cfg.mel_bins, cfg.epsilon);
}

double spectral_convergence(std::span<const double> samples, const Matrix& magnitude, const StftConfig& cfg) {
  const Matrix mag = stft(samples, cfg).cwiseAbs();
  const Eigen::Index frames = std::min(mag.rows(), magnitude.rows());
  const double ref = magnitude.topRows(frames).norm();
  const double diff = (mag.topRows(frames) - magnitude.topRows(frames)).norm();
  if (ref == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / ref;
}

Matrix phase_locked_phases(const Matrix& magnitude, const StftConfig& cfg) {
  const Eigen::Index frames = magnitude.rows();
  const Eigen::Index bins = magnitude.cols();
  const double n = cfg.fft_size;
  const double centre = 0.5 * (cfg.window_length - 1);
  Matrix phase = Matrix::Zero(frames, bins);
  std::vector<double> prev_theta(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> theta(static_cast<std::size_t>(bins), 0.0);
  std::vector<Eigen::Index> peaks;
  for (Eigen::Index f = 0; f < frames; ++f) {
    const auto row = magnitude.row(f);
    const double floor = 1e-8 * row.maxCoeff();
    peaks.clear();
    for (Eigen::Index k = 1; k + 1 < bins; ++k) {
      if (row(k) > floor && row(k) > row(k - 1) && row(k) >= row(k + 1)) peaks.push_back(k);
    }
    if (peaks.empty()) {
      phase.row(f).setZero();
      std::fill(prev_theta.begin(), prev_theta.end(), 0.0);
      continue;
    }
    Eigen::Index region_start = 0;
    for (std::size_t p = 0; p < peaks.size(); ++p) {
      const Eigen::Index k = peaks[p];
      Eigen::Index region_end = bins;
      if (p + 1 < peaks.size()) {
        // Split at the lowest bin between this peak and the next.
        region_end = k + 1;
        for (Eigen::Index j = k + 1; j < peaks[p + 1]; ++j) {
          if (row(j) < row(region_end)) region_end = j;
        }
      }
      const double a = std::log(row(k - 1) + 1e-300);
      const double b = std::log(row(k) + 1e-300);
      const double c = std::log(row(k + 1) + 1e-300);
      const double denom = a - 2.0 * b + c;
      const double delta = std::abs(denom) > 1e-12 ? std::clamp(0.5 * (a - c) / denom, -0.5, 0.5) : 0.0;
      const double omega = 2.0 * std::numbers::pi * (static_cast<double>(k) + delta) / n;
      const double th = std::remainder(prev_theta[static_cast<std::size_t>(k)] + omega * cfg.hop_length, 2.0 * std::numbers::pi);
      // A stationary sinusoid seen through a window spanning [0, L) has phase
      // theta - (2 pi j / N - omega) * (L - 1) / 2 across its main lobe.
      for (Eigen::Index j = region_start; j < region_end; ++j) {
        phase(f, j) = th - (2.0 * std::numbers::pi * static_cast<double>(j) / n - omega) * centre;
        theta[static_cast<std::size_t>(j)] = th;
      }
      region_start = region_end;
    }
    std::swap(prev_theta, theta);
  }
  return phase;
}

Waveform griffin_lim(const Matrix& magnitude, const StftConfig& cfg, int iterations, int sample_rate,
                     std::uint64_t seed, PhaseInit init) {
  cfg.validate();
  if (iterations < 1) throw ArgumentError("griffin_lim needs at least one iteration");
  if (magnitude.cols() != cfg.bins()) throw ArgumentError("magnitude bin count does not match fft size");
  if ((magnitude.array() < 0.0).any()) throw ArgumentError("negative magnitudes");
  if (!magnitude.allFinite()) throw ArgumentError("non-finite magnitudes");

  Matrix phase;
  if (init == PhaseInit::kPhaseLocked) {
    phase = phase_locked_phases(magnitude, cfg);
  } else {
    Rng rng("griffin_lim.phase", seed);
    phase.resize(magnitude.rows(), magnitude.cols());
    for (Eigen::Index i = 0; i < phase.size(); ++i) phase.data()[i] = 2.0 * std::numbers::pi * rng.uniform();
  }
  ComplexMatrix spec(magnitude.rows(), magnitude.cols());
  for (Eigen::Index i = 0; i < spec.size(); ++i) spec.data()[i] = std::polar(magnitude.data()[i], phase.data()[i]);

  std::vector<double> signal = istft(spec, cfg);
  for (int it = 1; it < iterations; ++it) {
    const ComplexMatrix rebuilt = stft(signal, cfg);
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
      const std::complex<double> z = rebuilt.data()[i];
      const double a = std::abs(z);
      const double m = magnitude.data()[i];
      spec.data()[i] = a > 0.0 ? m * (z / a) : std::complex<double>(m, 0.0);
    }
    signal = istft(spec, cfg);
  }
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples = std::move(signal);
  return out;
}

Matrix mel_to_power(const MelSpectrogram& mel, const MelConfig& cfg, int iterations) {
  const Matrix fb = mel_filterbank(static_cast<int>(mel.bins()), cfg.stft.fft_size, mel.sample_rate);
  const Matrix target = (mel.values.array().exp() - cfg.epsilon).cwiseMax(0.0).matrix();

  // The filterbank is banded (each linear bin touches at most two filters).
  Eigen::SparseMatrix<double, Eigen::RowMajor> m = fb.sparseView();
  const Eigen::SparseMatrix<double, Eigen::RowMajor> mt = m.transpose();

  // Lipschitz constant of the gradient: largest eigenvalue of M M^T by power iteration.
  Vector v = Vector::Ones(fb.rows());
  double lipschitz = 1.0;
  for (int i = 0; i < 50; ++i) {
    Vector next = m * (mt * v);
    lipschitz = next.norm() / std::max(v.norm(), 1e-300);
    v = next / std::max(next.norm(), 1e-300);
  }
  const double step = 1.0 / std::max(lipschitz, 1e-12);

  // Start by spreading each filter's energy over its support.
  RowVector row_sums = fb.rowwise().sum().transpose();
  Matrix spread = fb;
  for (Eigen::Index r = 0; r < fb.rows(); ++r) {
    if (row_sums(r) > 0) spread.row(r) /= row_sums(r) * row_sums(r);
  }
  Matrix p = (target * spread).cwiseMax(0.0);
  Matrix y = p;
  double momentum = 1.0;
  // FISTA on 0.5 ||P M^T - T||^2 subject to P >= 0.
  for (int it = 0; it < iterations; ++it) {
    const Matrix residual = y * mt - target;
    const Matrix next_p = (y - step * (residual * m)).cwiseMax(0.0);
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next_p + ((momentum - 1.0) / next_momentum) * (next_p - p);
    p = next_p;
    momentum = next_momentum;
  }
  return p;
}

Waveform invert_mel(const MelSpectrogram& mel, const MelConfig& cfg, int gl_iterations, std::uint64_t seed) {
  const Matrix magnitude = mel_to_power(mel, cfg).cwiseSqrt();
  return griffin_lim(magnitude, cfg.stft, gl_iterations, mel.sample_rate, seed);
}

}  // namespace murmur::dsp
