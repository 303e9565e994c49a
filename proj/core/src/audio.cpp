#include "rearrange/audio.h"

namespace rearrange {

std::vector<float> AudioBuffer::mono() const {
  const std::size_t n = frames();
  if (channels == 1) return std::vector<float>(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<float> out(n);
  const auto ch = static_cast<std::size_t>(channels);
  for (std::size_t f = 0; f < n; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < ch; ++c) acc += samples[f * ch + c];
    out[f] = static_cast<float>(acc / static_cast<double>(ch));
  }
  return out;
}

}  // namespace rearrange
