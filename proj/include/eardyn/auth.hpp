#ifndef EARDYN_AUTH_HPP
#define EARDYN_AUTH_HPP

#include "eardyn/channel.hpp"
#include "eardyn/motion.hpp"
#include "eardyn/phoneme.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eardyn {

// Template slot: a deformation category (or the static marker when no
// speech is present) combined with the head posture.
struct TemplateKey {
    std::optional<DeformationCategory> category; // nullopt = STATIC
    HeadPosture posture = HeadPosture::Forward;

    bool is_static() const { return !category.has_value(); }
    friend bool operator==(const TemplateKey&, const TemplateKey&) = default;
};

// Categories order C1..C7, then STATIC; used for map order and for the
// deterministic stump tie-break.
int template_key_rank(const TemplateKey& key);
bool operator<(const TemplateKey& a, const TemplateKey& b);
std::string key_to_string(const TemplateKey& key);

struct TemplateEntry {
    FeatureVector mean;    // unit-norm, mean-zero
    int n_samples = 0;     // >= 3 for any entry used in authentication
    double mu_w = 0.0;     // within-class similarity mean vs the mean feature
    double sigma_w = 0.0;  // and its population standard deviation
};

struct UserTemplate {
    std::string user_id;
    std::map<TemplateKey, TemplateEntry> entries;
    int skipped_keys = 0; // enrollment keys dropped for having < 3 samples
};

// Per-key threshold stump with fixed polarity: accept iff
// similarity-to-template >= threshold.
struct WeakClassifier {
    TemplateKey key;
    double threshold = 0.0;
};

struct BoostRound {
    WeakClassifier stump;
    double alpha = 0.0;   // round weight, > 0
    double epsilon = 0.0; // clamped weighted training error, in (0, 0.5)
};

struct BoostedClassifier {
    std::vector<BoostRound> rounds;
    // Equivalent decision offset for a 0/1 vote convention; the +-1
    // convention used by authenticate() has offset zero.
    double decision_offset() const;
};

struct AuthDecision {
    bool accept = false;
    double score = 0.0; // boosted margin
    int segments_used = 0;
    std::vector<TemplateKey> template_keys_used;
};

struct RocPoint {
    double threshold = 0.0;
    double tar = 0.0;
    double far = 0.0;
};

struct EvalReport {
    double accuracy = 0.0;
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    std::vector<RocPoint> roc; // sorted by threshold ascending
    double auc = 0.0;
    int genuine_count = 0;
    int impostor_count = 0;
};

// One scored training point for the booster: the similarity of a sample
// to its own key's template entry, with label +1 genuine / -1 impostor.
struct TrainingSample {
    TemplateKey key;
    double similarity = 0.0;
    int label = 0;
};

// Decision tree for the template slot: speaking selects the category
// template, otherwise the static one; posture always comes from the
// motion state, which also covers the speaking-while-moving branch.
TemplateKey select_template_key(const MotionState& state, bool has_speech,
                                std::optional<DeformationCategory> category);

// Per-key mean feature (renormalized to unit norm) plus within-class
// similarity statistics. Keys with fewer than 3 samples are skipped and
// counted; if no key survives, EnrollmentError.
UserTemplate enroll(const std::string& user_id,
                    const std::vector<std::pair<TemplateKey, FeatureVector>>& samples);

// Discrete adaptive boosting over per-key threshold stumps, at most
// one round per key (the rounds partition the evidence by category).
//
// Candidate thresholds for a key are the midpoints of consecutive
// distinct observed similarities on that key. A stump abstains (h = 0)
// on samples of other keys; abstentions charge half their weight to the
// stump's error, so epsilon < 0.5 means better than chance. Each round
// picks the minimum-error stump among unused keys (ties: lowest
// category rank, then lowest threshold), clamps epsilon to
// [1e-6, 0.5 - 1e-6], sets alpha = 0.5 ln((1 - eps)/eps), and reweights
// multiplicatively. Training stops early on a perfect stump, when no
// remaining stump beats 0.5, or when keys run out.
BoostedClassifier train_boosted_on_scores(const std::vector<TrainingSample>& samples,
                                          int max_rounds = kCategoryCount);

// Convenience wrapper: scores features against the template of their
// own key and boosts on the resulting similarities. Every sample's key
// must exist in the template.
BoostedClassifier train_boosted(const UserTemplate& tmpl,
                                const std::vector<std::pair<TemplateKey, FeatureVector>>& positives,
                                const std::vector<std::pair<TemplateKey, FeatureVector>>& negatives,
                                int max_rounds = kCategoryCount);

// Scores each session feature with the stumps whose key matches,
// averages the +-1 margins per round, and accepts iff
// sum_t alpha_t * mean_margin_t >= 0.
AuthDecision authenticate(const UserTemplate& tmpl, const BoostedClassifier& classifier,
                          const std::vector<std::pair<TemplateKey, FeatureVector>>& session);

// Confusion metrics at the decision threshold (genuine = positive
// class, accept iff score >= threshold), an ROC swept over the union of
// scores with (1,1)/(0,0) endpoints, and trapezoid AUC over the
// FAR-sorted curve.
EvalReport evaluate(const std::vector<double>& genuine_scores,
                    const std::vector<double>& impostor_scores, double decision_threshold);

} // namespace eardyn

#endif
