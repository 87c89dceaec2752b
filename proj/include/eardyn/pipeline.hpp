#ifndef EARDYN_PIPELINE_HPP
#define EARDYN_PIPELINE_HPP

#include "eardyn/auth.hpp"
#include "eardyn/channel.hpp"
#include "eardyn/dsp.hpp"
#include "eardyn/motion.hpp"
#include "eardyn/store.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace eardyn {

struct PipelineConfig {
    ProbeConfig probe;
    BandSplitConfig band;
    double regularization = 1e-3;
};

// Keyed features of one authentication window, in segment order.
struct SessionFeatures {
    MotionState motion;
    bool posture_defaulted = false; // IMU unusable, Forward assumed
    bool static_mode = false;       // no annotated speech at all
    std::vector<std::pair<TemplateKey, FeatureVector>> features;
    // first-appearance order of categories, for phoneme-count restriction
    std::vector<DeformationCategory> category_order;
    int excluded_segments = 0;
    int empty_segments = 0;
    int degenerate_frames = 0;
};

// Full front half of the pipeline: band split, framing, per-frame
// response estimation, annotation alignment, posture classification,
// template-key selection.
//
// A session with any annotated segment is a speech session: only frames
// inside non-excluded segments produce features. A session with no
// segments at all is a static window: every frame produces a feature on
// the (STATIC, posture) key.
SessionFeatures extract_session(const Recording& mixed, std::string_view annotations_text,
                                std::span<const ImuSample> imu, const PipelineConfig& cfg);

// Keep only features whose category is among the first
// `phoneme_count` distinct categories of the session (static features
// pass through untouched).
std::vector<std::pair<TemplateKey, FeatureVector>> restrict_phonemes(
    const SessionFeatures& session, int phoneme_count);

// Enrollment sessions of `user_id` against everyone else's enrollment
// sessions as impostor data.
struct EnrolledUser {
    UserTemplate tmpl;
    BoostedClassifier classifier;
};
EnrolledUser enroll_user(const LoadedDataset& dataset, const std::string& user_id,
                         const PipelineConfig& cfg);

struct SweepPoint {
    int phoneme_count = 0;
    double accuracy = 0.0;
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

struct EvaluationResult {
    EvalReport report; // at the highest phoneme count
    std::vector<SweepPoint> sweep;
    int sessions_evaluated = 0;
};

// Leave-sessions-out protocol: per subject, enroll on the enrollment
// sessions and score the held-out test sessions (genuine) plus every
// other subject's test sessions (impostor). A session with no key
// overlap at some phoneme count scores as a definite rejection at the
// most negative reachable margin (-sum alpha).
EvaluationResult evaluate_dataset(const LoadedDataset& dataset, int sweep_min, int sweep_max,
                                  const PipelineConfig& cfg);

} // namespace eardyn

#endif
