#ifndef EARDYN_DATASET_HPP
#define EARDYN_DATASET_HPP

#include "eardyn/sim.hpp"
#include "eardyn/store.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace eardyn {

struct DatasetParams {
    int subjects = 20;
    std::uint64_t seed = 0;
    double snr_db = 30.0;
    int phonemes_per_session = 5;
    int enroll_speech_sessions = 3;
    int enroll_static_sessions = 3;
    int test_sessions = 5;
    ProbeConfig probe;
};

// One synthetic authentication window with its sidecar files.
struct GeneratedSession {
    Recording recording;
    std::string annotations_text;
    std::string imu_text;
};

// Speech window: the first `phonemes` categories in seeded random
// order, holds of 0.3-0.5 s separated by static gaps, annotated with a
// random phoneme label from each category's row.
GeneratedSession generate_speech_session(const SimSubject& subject, const ProbeConfig& probe,
                                         int phonemes, double snr_db,
                                         std::uint64_t session_seed);

// Static window: resting canal held for `duration_s`, empty annotations.
GeneratedSession generate_static_session(const SimSubject& subject, const ProbeConfig& probe,
                                         double duration_s, double snr_db,
                                         std::uint64_t session_seed);

// The advanced-attack twin: identical static geometry, all dynamic
// deformation and posture effects removed.
SimSubject static_replica(const SimSubject& subject);

// Samples the population, writes per-subject WAV/annotation/IMU trees
// under out_dir, and writes out_dir/manifest.json. Deterministic in
// params.seed, byte for byte.
DatasetManifest generate_dataset(const DatasetParams& params,
                                 const std::filesystem::path& out_dir);

} // namespace eardyn

#endif
