#ifndef EARDYN_WAV_HPP
#define EARDYN_WAV_HPP

#include "eardyn/dsp.hpp"

#include <filesystem>

namespace eardyn {

// Mono PCM 16-bit little-endian only. Samples map to [-1, 1) by
// division by 32768; writes saturate out-of-range values.
Recording read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Recording& rec);

} // namespace eardyn

#endif
