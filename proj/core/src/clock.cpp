#include "uwb/clock.hpp"

#include <cmath>
#include <string>

#include "uwb/error.hpp"

namespace uwb {

double NoiseSpec::sigma() const {
  switch (distribution) {
    case NoiseDistribution::None: return 0.0;
    case NoiseDistribution::Gaussian: return scale;
    case NoiseDistribution::Uniform: return scale / std::sqrt(3.0);
  }
  return 0.0;
}

void NoiseSpec::validate() const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::InvalidArgument, "noise scale must be finite and >= 0");
  }
  if (tick && !(*tick > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "quantization tick must be > 0");
  }
}

double NoiseSpec::draw(RandomStream& rng) const {
  if (scale == 0.0) return 0.0;
  switch (distribution) {
    case NoiseDistribution::None: return 0.0;
    case NoiseDistribution::Gaussian: return rng.normal(0.0, scale);
    case NoiseDistribution::Uniform: return rng.uniform(-scale, scale);
  }
  return 0.0;
}

ClockModel::ClockModel(Seconds offset, double rate, NoiseSpec noise, double rate_guard)
    : offset_(offset), rate_(rate), noise_(noise) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorCode::InvalidArgument, "clock rate must be > 0");
  }
  if (std::abs(rate - 1.0) > rate_guard) {
    throw Error(ErrorCode::InvalidArgument,
                "clock rate " + std::to_string(rate) + " outside 1 +- " + std::to_string(rate_guard));
  }
  if (!std::isfinite(static_cast<double>(offset))) {
    throw Error(ErrorCode::InvalidArgument, "clock offset must be finite");
  }
  noise_.validate();
}

ClockModel ClockModel::with_noise(NoiseSpec noise) const {
  ClockModel copy = *this;
  noise.validate();
  copy.noise_ = noise;
  return copy;
}

Seconds read_ideal(const ClockModel& clock, Seconds t) {
  return clock.offset() + static_cast<Seconds>(clock.rate()) * t;
}

Seconds quantize(Seconds value, double tick) {
  const auto q = static_cast<Seconds>(tick);
  return std::nearbyint(value / q) * q;
}

Seconds read_measured(const ClockModel& clock, Seconds t, RandomStream& rng) {
  const NoiseSpec& noise = clock.noise();
  Seconds value = read_ideal(clock, t) + static_cast<Seconds>(noise.draw(rng));
  if (noise.tick) value = quantize(value, *noise.tick);
  return value;
}

}  // namespace uwb
