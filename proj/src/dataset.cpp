#include "eardyn/dataset.hpp"
#include "eardyn/errors.hpp"
#include "eardyn/phoneme.hpp"
#include "eardyn/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

namespace eardyn {

namespace {

// Seed streams per session kind; keeps file regeneration independent of
// generation order.
constexpr std::uint64_t kStreamEnrollStatic = 1000;
constexpr std::uint64_t kStreamEnrollSpeech = 2000;
constexpr std::uint64_t kStreamTest = 3000;
constexpr std::uint64_t kStreamNoise = 7;
constexpr std::uint64_t kStreamImu = 8;

const std::vector<std::string_view>& labels_of(DeformationCategory c) {
    static const auto by_category = [] {
        std::array<std::vector<std::string_view>, kCategoryCount> m;
        for (const auto& [label, cat] : phoneme_table())
            m[static_cast<std::size_t>(cat)].push_back(label);
        return m;
    }();
    return by_category[static_cast<std::size_t>(c)];
}

std::string forward_imu_text(double duration_s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> accel_noise(0.0, 0.03);
    std::normal_distribution<double> gyro_noise(0.0, 0.01);
    std::ostringstream out;
    out << "# t\tax\tay\taz\tgx\tgy\tgz\n";
    const int n = std::max(10, static_cast<int>(std::lround(duration_s * 100.0)));
    char buf[160];
    for (int i = 0; i < n; ++i) {
        const double t = i / 100.0;
        std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\n", t,
                      accel_noise(rng), accel_noise(rng), 9.81 + accel_noise(rng),
                      gyro_noise(rng), gyro_noise(rng), gyro_noise(rng));
        out << buf;
    }
    return out.str();
}

} // namespace

GeneratedSession generate_speech_session(const SimSubject& subject, const ProbeConfig& probe_cfg,
                                         int phonemes, double snr_db,
                                         std::uint64_t session_seed) {
    if (phonemes < 1 || phonemes > kCategoryCount)
        throw ConfigError("generate_speech_session: phonemes must be in [1, 7]");
    std::mt19937_64 rng(session_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<DeformationCategory> categories;
    for (int c = 0; c < phonemes; ++c)
        categories.push_back(static_cast<DeformationCategory>(c));
    std::shuffle(categories.begin(), categories.end(), rng);

    std::vector<ScriptEntry> script;
    std::ostringstream annotations;
    annotations << "# start\tend\tlabel\n";
    double t = 0.12 + 0.08 * unit(rng);
    script.push_back(ScriptEntry{std::nullopt, t});
    char buf[96];
    for (const auto category : categories) {
        const double hold = 0.30 + 0.20 * unit(rng);
        const auto& labels = labels_of(category);
        const auto pick = static_cast<std::size_t>(unit(rng) * static_cast<double>(labels.size()));
        const auto label = labels[std::min(pick, labels.size() - 1)];
        std::snprintf(buf, sizeof buf, "%.3f\t%.3f\t", t, t + hold);
        annotations << buf << label << "\n";
        script.push_back(ScriptEntry{category, hold});
        t += hold;
        const double gap = 0.15 + 0.10 * unit(rng);
        script.push_back(ScriptEntry{std::nullopt, gap});
        t += gap;
    }

    GeneratedSession session;
    const ProbeSignal probe = synthesize_probe(probe_cfg);
    session.recording = synthesize_reflection(subject, probe, script, HeadPosture::Forward,
                                              snr_db, derive_seed(session_seed, kStreamNoise));
    session.annotations_text = annotations.str();
    session.imu_text = forward_imu_text(t, derive_seed(session_seed, kStreamImu));
    return session;
}

GeneratedSession generate_static_session(const SimSubject& subject, const ProbeConfig& probe_cfg,
                                         double duration_s, double snr_db,
                                         std::uint64_t session_seed) {
    GeneratedSession session;
    const ProbeSignal probe = synthesize_probe(probe_cfg);
    const ScriptEntry hold{std::nullopt, duration_s};
    session.recording = synthesize_reflection(subject, probe, {&hold, 1}, HeadPosture::Forward,
                                              snr_db, derive_seed(session_seed, kStreamNoise));
    session.annotations_text = "# static window\n";
    session.imu_text = forward_imu_text(duration_s, derive_seed(session_seed, kStreamImu));
    return session;
}

SimSubject static_replica(const SimSubject& subject) {
    SimSubject replica = subject;
    replica.id = subject.id + "-replica";
    replica.deformation.type = DeformationType::None;
    replica.deformation.volume_change_mm3 = 0.0;
    replica.deformation.shape_sign_scale = 0.0;
    for (auto& delta : replica.deformation.category_delta) delta.fill(0.0);
    for (auto& offset : replica.posture_offsets) offset.fill(0.0);
    return replica;
}

DatasetManifest generate_dataset(const DatasetParams& params,
                                 const std::filesystem::path& out_dir) {
    if (params.subjects < 2)
        throw ConfigError("generate_dataset: need at least 2 subjects for impostor data");
    if (params.enroll_speech_sessions < 1 || params.enroll_static_sessions < 1 ||
        params.test_sessions < 1)
        throw ConfigError("generate_dataset: session counts must be >= 1");
    params.probe.validate();

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("generate_dataset: cannot create " + out_dir.string());

    const auto population =
        sample_population(params.subjects, params.seed);

    DatasetManifest manifest;
    manifest.population_seed = params.seed;
    manifest.snr_db = params.snr_db;
    manifest.phonemes_per_session = params.phonemes_per_session;
    manifest.probe = params.probe;

    for (const auto& subject : population) {
        SubjectRef ref;
        ref.id = subject.id;
        ref.seed = subject.rng_seed;
        std::filesystem::create_directories(out_dir / subject.id, ec);
        if (ec) throw DataError("generate_dataset: cannot create subject directory");

        const auto emit = [&](const GeneratedSession& session, const std::string& stem,
                              const std::string& role) {
            SessionRef sref;
            sref.role = role;
            sref.recording = subject.id + "/" + stem + ".wav";
            sref.annotations = subject.id + "/" + stem + ".phn";
            sref.imu = subject.id + "/" + stem + ".imu";
            write_wav(out_dir / sref.recording, session.recording);
            std::ofstream(out_dir / sref.annotations, std::ios::binary | std::ios::trunc)
                << session.annotations_text;
            std::ofstream(out_dir / sref.imu, std::ios::binary | std::ios::trunc)
                << session.imu_text;
            ref.sessions.push_back(std::move(sref));
        };

        char stem[48];
        for (int s = 0; s < params.enroll_static_sessions; ++s) {
            const auto seed = derive_seed(subject.rng_seed, kStreamEnrollStatic + static_cast<std::uint64_t>(s));
            std::snprintf(stem, sizeof stem, "enroll-static-%02d", s);
            emit(generate_static_session(subject, params.probe, 1.2, params.snr_db, seed),
                 stem, "enroll");
        }
        for (int s = 0; s < params.enroll_speech_sessions; ++s) {
            const auto seed = derive_seed(subject.rng_seed, kStreamEnrollSpeech + static_cast<std::uint64_t>(s));
            std::snprintf(stem, sizeof stem, "enroll-speech-%02d", s);
            emit(generate_speech_session(subject, params.probe, params.phonemes_per_session,
                                         params.snr_db, seed),
                 stem, "enroll");
        }
        for (int s = 0; s < params.test_sessions; ++s) {
            const auto seed = derive_seed(subject.rng_seed, kStreamTest + static_cast<std::uint64_t>(s));
            std::snprintf(stem, sizeof stem, "test-%02d", s);
            emit(generate_speech_session(subject, params.probe, params.phonemes_per_session,
                                         params.snr_db, seed),
                 stem, "test");
        }
        manifest.subjects.push_back(std::move(ref));
    }

    save_manifest(out_dir / "manifest.json", manifest);
    return manifest;
}

} // namespace eardyn
