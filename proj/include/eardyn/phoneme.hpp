#ifndef EARDYN_PHONEME_HPP
#define EARDYN_PHONEME_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eardyn {

// The seven articulator groups. Phonemes that barely move jaw or tongue
// carry no canal deformation and map to Excluded.
enum class DeformationCategory {
    C1_TongueForwardJawSlight,
    C2_TongueLowerJawWide,
    C3_TongueBackRaiseJawSlight,
    C4_TongueBackJawModerate,
    C5_TongueRaisedFricativeJawWide,
    C6_TongueRaisedJawSlight,
    C7_TongueFricativeJawSlight,
    Excluded,
};

inline constexpr int kCategoryCount = 7;

// Time-aligned phoneme annotation, bracketed label notation, e.g. "[i:]".
struct PhonemeSegment {
    std::string label;
    double start_s = 0.0;
    double end_s = 0.0;
};

// A phoneme segment with its category and the chirp frames that lie
// fully inside it.
struct CategorizedSegment {
    PhonemeSegment segment;
    DeformationCategory category = DeformationCategory::Excluded;
    std::vector<std::size_t> frames; // indices into the frame list
};

struct Alignment {
    std::vector<CategorizedSegment> segments;
    int excluded_segments = 0; // out-of-table phonemes, dropped
    int empty_segments = 0;    // too short to cover a whole frame, dropped
};

// Exact table lookup; unknown labels map to Excluded. Total function.
DeformationCategory categorize_phoneme(std::string_view label);

// The full label -> category table, for enumeration.
const std::vector<std::pair<std::string_view, DeformationCategory>>& phoneme_table();

// Short stable names: "C1".."C7", "EXCLUDED".
std::string_view category_token(DeformationCategory c);
DeformationCategory category_from_token(std::string_view token);

// Annotation text: one `start<TAB>end<TAB>label` per line, seconds,
// `#` lines ignored. Returns segments sorted by start; overlapping
// segments raise ValidationError.
std::vector<PhonemeSegment> parse_annotations(std::string_view text);

// Assign to each non-excluded segment every frame whose
// [start, start+period) interval lies fully inside it. Boundary frames
// mix two articulator states and are assigned to neither side.
Alignment align_segments(const std::vector<PhonemeSegment>& segments,
                         const std::vector<std::size_t>& frame_starts, std::size_t period,
                         double sample_rate_hz);

} // namespace eardyn

#endif
