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


#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "murmur/common/matrix.hpp"
#include "murmur/dsp/waveform.hpp"

namespace murmur::dsp {

using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class WindowKind { kHann, kHamming, kRectangular };

struct StftConfig {
  int window_length = 400;  // 25 ms at 16 kHz
  int hop_length = 160;     // 10 ms
  int fft_size = 1024;
  WindowKind window_kind = WindowKind::kHann;

  int bins() const { return fft_size / 2 + 1; }
  /// Throws ArgumentError unless 0 < hop <= window <= fft.
  void validate() const;
};

/// Defaults for the log-mel frontend.
struct MelConfig {
  StftConfig stft;
  int mel_bins = 80;
  double epsilon = 1e-10;
};

struct MelSpectrogram {
  Matrix values;  // frames x bins, log(mel power + eps)
  int hop_length = 160;
  int sample_rate = kFeatureRate;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
};

/// Periodic window of the given kind.
std::vector<double> make_window(WindowKind kind, int length);

/// Real-to-complex FFT of size n (FFTW-backed). Thread-safe.
class RealFft {
 public:
  explicit RealFft(int n);
  int size() const { return n_; }
  /// `in` must hold n samples; returns n/2+1 bins.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Inverse of forward, including the 1/n normalization.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

 private:
  int n_;
};

/// Number of analysis frames: 1 + floor((len - window) / hop), or 0 when too short.
Eigen::Index frame_count(std::size_t samples, const StftConfig& cfg);

/// Windowed frames (window_length samples, zero-padded to fft_size) -> spectrum.
ComplexMatrix stft(std::span<const double> samples, const StftConfig& cfg);

/// Least-squares inverse of stft (weighted overlap-add). Length (frames-1)*hop + window.
std::vector<double> istft(const ComplexMatrix& spec, const StftConfig& cfg);

/// |stft|^2, frames x (fft/2+1).
Matrix power_spectrogram(std::span<const double> samples, const StftConfig& cfg);

/// Triangular HTK-scale filterbank, mel_bins x (fft/2+1), spanning 0..sample_rate/2.
Matrix mel_filterbank(int mel_bins, int fft_size, int sample_rate);
/// Centre frequency in Hz of each mel filter.
std::vector<double> mel_center_frequencies(int mel_bins, int sample_rate);

/// log(filterbank . |STFT|^2 + eps). Throws DegenerateInputError if the input
/// is shorter than one window.
MelSpectrogram mel_spectrogram(const Waveform& w, const MelConfig& cfg = {});
MelSpectrogram mel_spectrogram(const Waveform& w, const StftConfig& cfg, int mel_bins, double epsilon = 1e-10);

/// ||STFT(w)| - mag||_F / ||mag||_F over the frames both share.
double spectral_convergence(std::span<const double> samples, const Matrix& magnitude, const StftConfig& cfg);

enum class PhaseInit {
  kPhaseLocked,  // per-peak phase advance from the interpolated peak frequency
  kRandom,       // uniform phases drawn from the seed
};

/// Phase estimate that treats each spectral peak as a stationary sinusoid and
/// locks the bins of its lobe to it.
Matrix phase_locked_phases(const Matrix& magnitude, const StftConfig& cfg);

/// Griffin-Lim phase retrieval from a magnitude spectrogram (frames x fft/2+1).
Waveform griffin_lim(const Matrix& magnitude, const StftConfig& cfg, int iterations, int sample_rate = kFeatureRate,
                     std::uint64_t seed = 0, PhaseInit init = PhaseInit::kPhaseLocked);

/// Recovers a non-negative linear power spectrogram from a log-mel one by
/// per-frame non-negative least squares against the filterbank.
Matrix mel_to_power(const MelSpectrogram& mel, const MelConfig& cfg, int iterations = 200);

/// mel -> linear magnitude -> Griffin-Lim.
Waveform invert_mel(const MelSpectrogram& mel, const MelConfig& cfg, int gl_iterations = 32, std::uint64_t seed = 0);

}  // namespace murmur::dsp
