#ifndef EARDYN_STORE_HPP
#define EARDYN_STORE_HPP

#include "eardyn/auth.hpp"
#include "eardyn/dsp.hpp"
#include "eardyn/motion.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace eardyn {

// An enrolled template plus its optionally trained classifier, as
// persisted on disk.
struct TemplateFile {
    int format_version = 1;
    UserTemplate tmpl;
    std::optional<BoostedClassifier> classifier;
};

// Deterministic UTF-8 text format, 17 significant digits per float so
// doubles round-trip exactly:
//   EARDYN-TEMPLATE v1
//   user <id>
//   band <f_low> <f_high> <bin_hz>
//   entry <category> <posture> <n> <mu_w> <sigma_w>
//   <n_bins space-separated feature values>
//   boost <T>
//   round <category> <posture> <theta> <alpha> <eps>
std::string save_template(const TemplateFile& file);
TemplateFile load_template(std::string_view text);

struct SessionRef {
    std::string role; // "enroll" or "test"
    std::string recording;   // paths relative to the manifest directory
    std::string annotations;
    std::string imu;
};

struct SubjectRef {
    std::string id;
    std::uint64_t seed = 0;
    std::vector<SessionRef> sessions;
};

struct DatasetManifest {
    std::uint64_t population_seed = 0;
    double snr_db = 30.0;
    int phonemes_per_session = 5;
    ProbeConfig probe;
    std::vector<SubjectRef> subjects;
};

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path);

struct LoadedSession {
    SessionRef ref;
    Recording recording;
    std::string annotations_text;
    std::vector<ImuSample> imu;
};

struct LoadedSubject {
    std::string id;
    std::uint64_t seed = 0;
    std::vector<LoadedSession> sessions;
};

struct LoadedDataset {
    DatasetManifest manifest;
    std::vector<LoadedSubject> subjects;
};

// Loads every referenced file and cross-validates: sample rates must
// match the manifest probe, annotations must fit inside their
// recordings. Raises DataError listing the offending subject ids.
LoadedDataset load_dataset(const std::filesystem::path& manifest_path);

} // namespace eardyn

#endif
