#pragma once

#include <optional>

#include "uwb/random.hpp"
#include "uwb/types.hpp"

namespace uwb {

enum class NoiseDistribution { None, Gaussian, Uniform };

/// White timestamping error added to every clock reading.
///
/// `scale` is the standard deviation for Gaussian noise and the half-width
/// for uniform noise (a uniform on [-a, a] has sigma = a / sqrt(3)).
/// Quantization to `tick` happens after the noise is added.
struct NoiseSpec {
  NoiseDistribution distribution = NoiseDistribution::None;
  double scale = 0.0;
  std::optional<double> tick;

  static NoiseSpec none() { return {}; }
  static NoiseSpec gaussian(double sigma) { return {NoiseDistribution::Gaussian, sigma, {}}; }
  static NoiseSpec uniform(double half_width) {
    return {NoiseDistribution::Uniform, half_width, {}};
  }

  /// Standard deviation of one draw, ignoring quantization.
  [[nodiscard]] double sigma() const;

  /// Throws InvalidArgument on negative scale or non-positive tick.
  void validate() const;

  double draw(RandomStream& rng) const;
};

/// Affine clock: reading = offset + rate * t, plus timestamping noise.
class ClockModel {
 public:
  static constexpr double kDefaultRateGuard = 1e-3;

  ClockModel() = default;
  ClockModel(Seconds offset, double rate, NoiseSpec noise = {},
             double rate_guard = kDefaultRateGuard);

  static ClockModel ideal() { return {}; }

  [[nodiscard]] Seconds offset() const { return offset_; }
  [[nodiscard]] double rate() const { return rate_; }
  [[nodiscard]] const NoiseSpec& noise() const { return noise_; }

  [[nodiscard]] ClockModel with_noise(NoiseSpec noise) const;

 private:
  Seconds offset_ = 0.0L;
  double rate_ = 1.0;
  NoiseSpec noise_;
};

/// o + nu * t, exact.
Seconds read_ideal(const ClockModel& clock, Seconds t);

/// read_ideal plus one independent noise draw, then tick quantization.
Seconds read_measured(const ClockModel& clock, Seconds t, RandomStream& rng);

/// Round to the nearest multiple of tick.
Seconds quantize(Seconds value, double tick);

}  // namespace uwb
