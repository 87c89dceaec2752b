#include "eardyn/auth.hpp"
#include "eardyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace eardyn {

int template_key_rank(const TemplateKey& key) {
    const int cat = key.category ? static_cast<int>(*key.category) : kCategoryCount;
    return cat * kPostureCount + static_cast<int>(key.posture);
}

bool operator<(const TemplateKey& a, const TemplateKey& b) {
    return template_key_rank(a) < template_key_rank(b);
}

std::string key_to_string(const TemplateKey& key) {
    const std::string_view cat = key.category ? category_token(*key.category) : "STATIC";
    return std::string(cat) + "/" + std::string(posture_token(key.posture));
}

double BoostedClassifier::decision_offset() const {
    double sum = 0.0;
    for (const auto& r : rounds) sum += r.alpha;
    return 0.5 * sum;
}

TemplateKey select_template_key(const MotionState& state, bool has_speech,
                                std::optional<DeformationCategory> category) {
    if (has_speech != category.has_value())
        throw ContractError("select_template_key: category must be present iff speaking");
    if (category && *category == DeformationCategory::Excluded)
        throw ContractError("select_template_key: excluded phonemes carry no template");
    TemplateKey key;
    key.category = category;
    key.posture = state.posture;
    return key;
}

UserTemplate enroll(const std::string& user_id,
                    const std::vector<std::pair<TemplateKey, FeatureVector>>& samples) {
    std::map<TemplateKey, std::vector<const FeatureVector*>> by_key;
    for (const auto& [key, f] : samples) by_key[key].push_back(&f);

    UserTemplate tmpl;
    tmpl.user_id = user_id;
    for (const auto& [key, feats] : by_key) {
        if (feats.size() < 3) {
            ++tmpl.skipped_keys;
            continue;
        }
        const auto& first = *feats.front();
        TemplateEntry entry;
        entry.mean = first;
        std::fill(entry.mean.values.begin(), entry.mean.values.end(), 0.0);
        for (const auto* f : feats) {
            if (f->values.size() != first.values.size() ||
                std::abs(f->f_low_hz - first.f_low_hz) > 1e-6 ||
                std::abs(f->bin_hz - first.bin_hz) > 1e-6)
                throw ShapeError("enroll: features on key " + key_to_string(key) +
                                 " disagree on band");
            for (std::size_t i = 0; i < f->values.size(); ++i)
                entry.mean.values[i] += f->values[i];
        }
        double norm_sq = 0.0;
        for (double v : entry.mean.values) norm_sq += v * v;
        if (norm_sq < 1e-20)
            throw DegenerateError("enroll: samples on key " + key_to_string(key) +
                                  " cancel to a zero mean");
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& v : entry.mean.values) v *= inv;

        double mu = 0.0;
        std::vector<double> sims;
        sims.reserve(feats.size());
        for (const auto* f : feats) {
            sims.push_back(similarity(*f, entry.mean));
            mu += sims.back();
        }
        mu /= static_cast<double>(sims.size());
        double var = 0.0;
        for (double s : sims) var += (s - mu) * (s - mu);
        entry.mu_w = mu;
        entry.sigma_w = std::sqrt(var / static_cast<double>(sims.size()));
        entry.n_samples = static_cast<int>(feats.size());
        tmpl.entries.emplace(key, std::move(entry));
    }
    if (tmpl.entries.empty())
        throw EnrollmentError("enroll: no key reached the 3-sample minimum");
    return tmpl;
}

namespace {

struct KeyData {
    TemplateKey key;
    std::vector<std::size_t> order;     // sample indices sorted by similarity
    std::vector<double> candidates;     // midpoints of consecutive distinct sims
};

// Minimum-weighted-error stump over all keys and candidate thresholds.
// Non-matching samples abstain and charge half their weight. Iterating
// keys by rank and thresholds ascending makes strict < the tie-break.
struct StumpPick {
    std::size_t key_index = 0;
    double threshold = 0.0;
    double epsilon = 0.0;
    bool found = false;
};

StumpPick pick_stump(const std::vector<TrainingSample>& samples,
                     const std::vector<KeyData>& keys, const std::vector<double>& weights,
                     const std::vector<bool>& key_used) {
    StumpPick best;
    for (std::size_t ki = 0; ki < keys.size(); ++ki) {
        if (key_used[ki]) continue;
        const auto& kd = keys[ki];
        double matched_weight = 0.0;
        double err = 0.0; // start below the lowest sim: every match predicted +1
        for (std::size_t idx : kd.order) {
            matched_weight += weights[idx];
            if (samples[idx].label < 0) err += weights[idx];
        }
        const double abstain = 0.5 * (1.0 - matched_weight);
        std::size_t pos = 0;
        for (double theta : kd.candidates) {
            // move samples with sim < theta to the -1 side
            while (pos < kd.order.size() &&
                   samples[kd.order[pos]].similarity < theta) {
                const std::size_t idx = kd.order[pos];
                if (samples[idx].label > 0)
                    err += weights[idx];
                else
                    err -= weights[idx];
                ++pos;
            }
            const double eps = err + abstain;
            if (!best.found || eps < best.epsilon) {
                best.found = true;
                best.key_index = ki;
                best.threshold = theta;
                best.epsilon = eps;
            }
        }
    }
    return best;
}

} // namespace

BoostedClassifier train_boosted_on_scores(const std::vector<TrainingSample>& samples,
                                          int max_rounds) {
    if (max_rounds < 1) throw ContractError("train_boosted: max_rounds must be >= 1");
    bool has_pos = false, has_neg = false;
    for (const auto& s : samples) {
        if (s.label > 0) has_pos = true;
        if (s.label < 0) has_neg = true;
        if (s.label == 0 || !std::isfinite(s.similarity))
            throw ContractError("train_boosted: labels must be +-1 with finite similarity");
    }
    if (!has_pos || !has_neg)
        throw TrainError("train_boosted: need at least one positive and one negative sample");

    // Group samples per key, sorted by rank for the tie-break.
    std::vector<KeyData> keys;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto it = std::find_if(keys.begin(), keys.end(),
                               [&](const KeyData& k) { return k.key == samples[i].key; });
        if (it == keys.end()) {
            keys.push_back(KeyData{samples[i].key, {}, {}});
            it = std::prev(keys.end());
        }
        it->order.push_back(i);
    }
    std::sort(keys.begin(), keys.end(), [](const KeyData& a, const KeyData& b) {
        return template_key_rank(a.key) < template_key_rank(b.key);
    });
    for (auto& kd : keys) {
        std::sort(kd.order.begin(), kd.order.end(), [&](std::size_t a, std::size_t b) {
            return samples[a].similarity < samples[b].similarity;
        });
        for (std::size_t i = 1; i < kd.order.size(); ++i) {
            const double lo = samples[kd.order[i - 1]].similarity;
            const double hi = samples[kd.order[i]].similarity;
            if (hi > lo) kd.candidates.push_back(0.5 * (lo + hi));
        }
    }

    const double eps_floor = 1e-6;
    std::vector<double> weights(samples.size(), 1.0 / static_cast<double>(samples.size()));
    std::vector<bool> key_used(keys.size(), false);
    BoostedClassifier classifier;
    for (int t = 0; t < max_rounds; ++t) {
        const StumpPick pick = pick_stump(samples, keys, weights, key_used);
        if (!pick.found || pick.epsilon >= 0.5) break; // nothing beats chance
        key_used[pick.key_index] = true;
        const double eps = std::clamp(pick.epsilon, eps_floor, 0.5 - eps_floor);
        const double alpha = 0.5 * std::log((1.0 - eps) / eps);
        classifier.rounds.push_back(
            BoostRound{WeakClassifier{keys[pick.key_index].key, pick.threshold}, alpha, eps});
        if (pick.epsilon <= 0.0) break; // perfect separation, weights would degenerate

        double total = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (samples[i].key == keys[pick.key_index].key) {
                const int h = samples[i].similarity >= pick.threshold ? 1 : -1;
                weights[i] *= std::exp(-alpha * samples[i].label * h);
            }
            total += weights[i];
        }
        for (auto& w : weights) w /= total;
    }
    if (classifier.rounds.empty())
        throw TrainError("train_boosted: no stump beats chance on this data");
    return classifier;
}

BoostedClassifier train_boosted(const UserTemplate& tmpl,
                                const std::vector<std::pair<TemplateKey, FeatureVector>>& positives,
                                const std::vector<std::pair<TemplateKey, FeatureVector>>& negatives,
                                int max_rounds) {
    std::vector<TrainingSample> scored;
    scored.reserve(positives.size() + negatives.size());
    auto add = [&](const std::pair<TemplateKey, FeatureVector>& sample, int label) {
        const auto it = tmpl.entries.find(sample.first);
        if (it == tmpl.entries.end())
            throw ContractError("train_boosted: sample key " + key_to_string(sample.first) +
                                " not in template");
        scored.push_back(
            TrainingSample{sample.first, similarity(sample.second, it->second.mean), label});
    };
    for (const auto& p : positives) add(p, +1);
    for (const auto& n : negatives) add(n, -1);
    return train_boosted_on_scores(scored, max_rounds);
}

AuthDecision authenticate(const UserTemplate& tmpl, const BoostedClassifier& classifier,
                          const std::vector<std::pair<TemplateKey, FeatureVector>>& session) {
    if (session.empty()) throw ContractError("authenticate: empty session");
    if (classifier.rounds.empty()) throw ContractError("authenticate: untrained classifier");

    // Similarity of each feature to its own key's template entry.
    std::vector<double> sims(session.size());
    std::vector<bool> scored(session.size(), false);
    for (std::size_t i = 0; i < session.size(); ++i) {
        const auto it = tmpl.entries.find(session[i].first);
        if (it == tmpl.entries.end()) continue; // key never enrolled
        sims[i] = similarity(session[i].second, it->second.mean);
        scored[i] = true;
    }

    AuthDecision decision;
    std::set<TemplateKey> used_keys;
    std::vector<bool> contributed(session.size(), false);
    double score = 0.0;
    for (const auto& round : classifier.rounds) {
        double margin_sum = 0.0;
        int matches = 0;
        for (std::size_t i = 0; i < session.size(); ++i) {
            if (!scored[i] || !(session[i].first == round.stump.key)) continue;
            margin_sum += sims[i] >= round.stump.threshold ? 1.0 : -1.0;
            ++matches;
            contributed[i] = true;
            used_keys.insert(session[i].first);
        }
        if (matches > 0) score += round.alpha * margin_sum / matches;
        // rounds with no matching feature abstain
    }
    decision.segments_used =
        static_cast<int>(std::count(contributed.begin(), contributed.end(), true));
    if (decision.segments_used == 0)
        throw NoEvidenceError("authenticate: no session feature matches any trained key");
    decision.template_keys_used.assign(used_keys.begin(), used_keys.end());
    decision.score = score;
    decision.accept = score >= 0.0;
    return decision;
}

EvalReport evaluate(const std::vector<double>& genuine_scores,
                    const std::vector<double>& impostor_scores, double decision_threshold) {
    if (genuine_scores.empty() || impostor_scores.empty())
        throw ContractError("evaluate: score lists must be non-empty");

    const auto frac_at_least = [](const std::vector<double>& v, double threshold) {
        const auto n = std::count_if(v.begin(), v.end(),
                                     [&](double s) { return s >= threshold; });
        return static_cast<double>(n) / static_cast<double>(v.size());
    };

    EvalReport report;
    report.genuine_count = static_cast<int>(genuine_scores.size());
    report.impostor_count = static_cast<int>(impostor_scores.size());

    const double tp = frac_at_least(genuine_scores, decision_threshold) *
                      static_cast<double>(genuine_scores.size());
    const double fp = frac_at_least(impostor_scores, decision_threshold) *
                      static_cast<double>(impostor_scores.size());
    const double tn = static_cast<double>(impostor_scores.size()) - fp;
    report.accuracy = (tp + tn) / static_cast<double>(genuine_scores.size() +
                                                      impostor_scores.size());
    report.recall = tp / static_cast<double>(genuine_scores.size());
    report.precision = tp + fp > 0.0 ? tp / (tp + fp) : 1.0;
    report.f1 = report.precision + report.recall > 0.0
                    ? 2.0 * report.precision * report.recall /
                          (report.precision + report.recall)
                    : 0.0;

    // Threshold sweep over the union of scores plus sentinels for the
    // (1,1) and (0,0) endpoints.
    std::vector<double> thresholds(genuine_scores);
    thresholds.insert(thresholds.end(), impostor_scores.begin(), impostor_scores.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.insert(thresholds.begin(), thresholds.front() - 1.0);
    thresholds.push_back(thresholds.back() + 1.0);

    report.roc.reserve(thresholds.size());
    for (double threshold : thresholds)
        report.roc.push_back(RocPoint{threshold, frac_at_least(genuine_scores, threshold),
                                      frac_at_least(impostor_scores, threshold)});

    // Trapezoid over the FAR-ascending curve (reverse threshold order).
    double auc = 0.0;
    for (std::size_t i = report.roc.size(); i-- > 1;) {
        const auto& hi = report.roc[i];     // lower FAR
        const auto& lo = report.roc[i - 1]; // higher FAR
        auc += 0.5 * (hi.tar + lo.tar) * (lo.far - hi.far);
    }
    report.auc = auc;
    return report;
}

} // namespace eardyn
