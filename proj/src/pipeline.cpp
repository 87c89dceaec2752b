#include "eardyn/pipeline.hpp"
#include "eardyn/errors.hpp"
#include "eardyn/phoneme.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace eardyn {

SessionFeatures extract_session(const Recording& mixed, std::string_view annotations_text,
                                std::span<const ImuSample> imu, const PipelineConfig& cfg) {
    SessionFeatures out;
    try {
        out.motion = classify_posture(imu);
    } catch (const InsufficientDataError&) {
        // No usable trace: assume the device is at rest facing forward.
        out.motion = MotionState{HeadPosture::Forward, false};
        out.posture_defaulted = true;
    }

    const ProbeSignal probe = synthesize_probe(cfg.probe);
    const BandSplit bands = split_bands(mixed, cfg.band);
    const auto frames = frame_chirp_periods(bands.inaudible, probe);

    std::vector<std::size_t> frame_starts(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) frame_starts[i] = frames[i].start;

    const auto feature_of = [&](std::size_t frame_index) -> std::optional<FeatureVector> {
        try {
            return to_feature(
                estimate_response(frames[frame_index].samples, probe, cfg.regularization));
        } catch (const DegenerateError&) {
            ++out.degenerate_frames;
            return std::nullopt;
        }
    };

    const auto segments = parse_annotations(annotations_text);
    if (segments.empty()) {
        // Static window: the whole recording reflects the resting canal.
        out.static_mode = true;
        const TemplateKey key = select_template_key(out.motion, false, std::nullopt);
        for (std::size_t i = 0; i < frames.size(); ++i)
            if (auto f = feature_of(i)) out.features.emplace_back(key, std::move(*f));
        return out;
    }

    const auto alignment =
        align_segments(segments, frame_starts, probe.samples.size(),
                       mixed.sample_rate_hz);
    out.excluded_segments = alignment.excluded_segments;
    out.empty_segments = alignment.empty_segments;
    for (const auto& cs : alignment.segments) {
        const TemplateKey key = select_template_key(out.motion, true, cs.category);
        if (std::find(out.category_order.begin(), out.category_order.end(), cs.category) ==
            out.category_order.end())
            out.category_order.push_back(cs.category);
        for (std::size_t frame_index : cs.frames)
            if (auto f = feature_of(frame_index)) out.features.emplace_back(key, std::move(*f));
    }
    return out;
}

std::vector<std::pair<TemplateKey, FeatureVector>> restrict_phonemes(
    const SessionFeatures& session, int phoneme_count) {
    if (phoneme_count < 1) throw ContractError("restrict_phonemes: count must be >= 1");
    std::set<DeformationCategory> keep;
    for (const auto c : session.category_order) {
        if (static_cast<int>(keep.size()) >= phoneme_count) break;
        keep.insert(c);
    }
    std::vector<std::pair<TemplateKey, FeatureVector>> out;
    for (const auto& [key, f] : session.features)
        if (!key.category || keep.count(*key.category)) out.emplace_back(key, f);
    return out;
}

namespace {

std::vector<std::pair<TemplateKey, FeatureVector>> collect_features(
    const LoadedSubject& subject, std::string_view role, const PipelineConfig& cfg) {
    std::vector<std::pair<TemplateKey, FeatureVector>> out;
    for (const auto& session : subject.sessions) {
        if (session.ref.role != role) continue;
        auto extracted =
            extract_session(session.recording, session.annotations_text, session.imu, cfg);
        for (auto& f : extracted.features) out.push_back(std::move(f));
    }
    return out;
}

} // namespace

EnrolledUser enroll_user(const LoadedDataset& dataset, const std::string& user_id,
                         const PipelineConfig& cfg) {
    const LoadedSubject* user = nullptr;
    for (const auto& s : dataset.subjects)
        if (s.id == user_id) user = &s;
    if (!user) throw DataError("enroll_user: no subject '" + user_id + "' in dataset");

    auto positives = collect_features(*user, "enroll", cfg);
    if (positives.empty())
        throw EnrollmentError("enroll_user: subject '" + user_id +
                              "' has no enrollment sessions");

    EnrolledUser enrolled;
    enrolled.tmpl = enroll(user_id, positives);

    // Impostor data: everyone else's enrollment features, restricted to
    // the keys this user actually enrolled.
    std::vector<std::pair<TemplateKey, FeatureVector>> negatives;
    for (const auto& other : dataset.subjects) {
        if (other.id == user_id) continue;
        for (auto& f : collect_features(other, "enroll", cfg))
            if (enrolled.tmpl.entries.count(f.first)) negatives.push_back(std::move(f));
    }
    if (negatives.empty())
        throw EnrollmentError("enroll_user: no impostor data for '" + user_id + "'");

    std::vector<std::pair<TemplateKey, FeatureVector>> filtered_positives;
    for (auto& f : positives)
        if (enrolled.tmpl.entries.count(f.first)) filtered_positives.push_back(std::move(f));

    const int keys = static_cast<int>(enrolled.tmpl.entries.size());
    enrolled.classifier = train_boosted(enrolled.tmpl, filtered_positives, negatives,
                                        std::max(kCategoryCount, keys));
    return enrolled;
}

EvaluationResult evaluate_dataset(const LoadedDataset& dataset, int sweep_min, int sweep_max,
                                  const PipelineConfig& cfg) {
    if (dataset.subjects.size() < 2)
        throw DataError("evaluate_dataset: need at least 2 subjects");
    if (sweep_min < 1 || sweep_max < sweep_min)
        throw ConfigError("evaluate_dataset: bad phoneme sweep range");

    // Extract every test session once; scoring reuses the features.
    struct TestSession {
        std::size_t subject_index;
        SessionFeatures features;
    };
    std::vector<TestSession> sessions;
    for (std::size_t si = 0; si < dataset.subjects.size(); ++si)
        for (const auto& session : dataset.subjects[si].sessions)
            if (session.ref.role == "test")
                sessions.push_back(TestSession{
                    si, extract_session(session.recording, session.annotations_text,
                                        session.imu, cfg)});
    if (sessions.empty()) throw DataError("evaluate_dataset: no test sessions");

    std::vector<EnrolledUser> users;
    users.reserve(dataset.subjects.size());
    for (const auto& subject : dataset.subjects)
        users.push_back(enroll_user(dataset, subject.id, cfg));

    EvaluationResult result;
    result.sessions_evaluated = static_cast<int>(sessions.size());
    for (int p = sweep_min; p <= sweep_max; ++p) {
        std::vector<double> genuine, impostor;
        for (std::size_t ui = 0; ui < users.size(); ++ui) {
            const auto& user = users[ui];
            double min_margin = 0.0; // definite-reject fallback: -sum alpha
            for (const auto& round : user.classifier.rounds) min_margin -= round.alpha;
            for (const auto& session : sessions) {
                const auto restricted = restrict_phonemes(session.features, p);
                double score = min_margin;
                if (!restricted.empty()) {
                    try {
                        score = authenticate(user.tmpl, user.classifier, restricted).score;
                    } catch (const NoEvidenceError&) {
                        // no key overlap at this phoneme count: reject outright
                    }
                }
                (session.subject_index == ui ? genuine : impostor).push_back(score);
            }
        }
        const EvalReport report = evaluate(genuine, impostor, 0.0);
        result.sweep.push_back(
            SweepPoint{p, report.accuracy, report.recall, report.precision, report.f1});
        if (p == sweep_max) result.report = report;
    }
    return result;
}

} // namespace eardyn
