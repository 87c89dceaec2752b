#include "eardyn/phoneme.hpp"
#include "eardyn/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace eardyn {

const std::vector<std::pair<std::string_view, DeformationCategory>>& phoneme_table() {
    using C = DeformationCategory;
    // Labels kept verbatim in the bracketed notation; no IPA normalization.
    static const std::vector<std::pair<std::string_view, C>> table = {
        // tongue forward, jaw open slightly
        {"[i:]", C::C1_TongueForwardJawSlight},
        {"[I]", C::C1_TongueForwardJawSlight},
        {"[I@]", C::C1_TongueForwardJawSlight},
        {"[eI]", C::C1_TongueForwardJawSlight},
        {"[@]", C::C1_TongueForwardJawSlight},
        {"[e@]", C::C1_TongueForwardJawSlight},
        {"[3:]", C::C1_TongueForwardJawSlight},
        // tongue lower, jaw open widely
        {"[æ]", C::C2_TongueLowerJawWide},
        {"[ai]", C::C2_TongueLowerJawWide},
        {"[6]", C::C2_TongueLowerJawWide},
        {"[A]", C::C2_TongueLowerJawWide},
        {"[O:]", C::C2_TongueLowerJawWide},
        {"[au]", C::C2_TongueLowerJawWide},
        // tongue back and raised, jaw open slightly
        {"[U]", C::C3_TongueBackRaiseJawSlight},
        {"[u:]", C::C3_TongueBackRaiseJawSlight},
        {"[U@]", C::C3_TongueBackRaiseJawSlight},
        // tongue back, jaw open moderately
        {"[oU]", C::C4_TongueBackJawModerate},
        {"[OI]", C::C4_TongueBackJawModerate},
        {"[e]", C::C4_TongueBackJawModerate},
        {"[2]", C::C4_TongueBackJawModerate},
        // tongue raised and fricative, jaw open widely
        {"[tS]", C::C5_TongueRaisedFricativeJawWide},
        {"[tr]", C::C5_TongueRaisedFricativeJawWide},
        {"[ts]", C::C5_TongueRaisedFricativeJawWide},
        {"[dZ]", C::C5_TongueRaisedFricativeJawWide},
        {"[dr]", C::C5_TongueRaisedFricativeJawWide},
        {"[dz]", C::C5_TongueRaisedFricativeJawWide},
        // tongue raised, jaw open slightly
        {"[f]", C::C6_TongueRaisedJawSlight},
        {"[s]", C::C6_TongueRaisedJawSlight},
        {"[S]", C::C6_TongueRaisedJawSlight},
        {"[h]", C::C6_TongueRaisedJawSlight},
        {"[v]", C::C6_TongueRaisedJawSlight},
        {"[z]", C::C6_TongueRaisedJawSlight},
        {"[Z]", C::C6_TongueRaisedJawSlight},
        {"[r]", C::C6_TongueRaisedJawSlight},
        // tongue fricative, jaw open slightly
        {"[T]", C::C7_TongueFricativeJawSlight},
        {"[D]", C::C7_TongueFricativeJawSlight},
        {"[l]", C::C7_TongueFricativeJawSlight},
    };
    return table;
}

DeformationCategory categorize_phoneme(std::string_view label) {
    static const std::unordered_map<std::string_view, DeformationCategory> lookup = [] {
        std::unordered_map<std::string_view, DeformationCategory> m;
        for (const auto& [l, c] : phoneme_table()) m.emplace(l, c);
        return m;
    }();
    const auto it = lookup.find(label);
    return it == lookup.end() ? DeformationCategory::Excluded : it->second;
}

std::string_view category_token(DeformationCategory c) {
    switch (c) {
        case DeformationCategory::C1_TongueForwardJawSlight: return "C1";
        case DeformationCategory::C2_TongueLowerJawWide: return "C2";
        case DeformationCategory::C3_TongueBackRaiseJawSlight: return "C3";
        case DeformationCategory::C4_TongueBackJawModerate: return "C4";
        case DeformationCategory::C5_TongueRaisedFricativeJawWide: return "C5";
        case DeformationCategory::C6_TongueRaisedJawSlight: return "C6";
        case DeformationCategory::C7_TongueFricativeJawSlight: return "C7";
        case DeformationCategory::Excluded: return "EXCLUDED";
    }
    throw ContractError("category_token: unknown category");
}

DeformationCategory category_from_token(std::string_view token) {
    for (int i = 0; i <= static_cast<int>(DeformationCategory::Excluded); ++i) {
        const auto c = static_cast<DeformationCategory>(i);
        if (category_token(c) == token) return c;
    }
    throw ParseError("unknown category token: " + std::string(token));
}

namespace {

double parse_seconds(std::string_view field, int line_no) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value))
        throw ParseError("annotation line " + std::to_string(line_no) + ": bad time field '" +
                         std::string(field) + "'");
    return value;
}

} // namespace

std::vector<PhonemeSegment> parse_annotations(std::string_view text) {
    std::vector<PhonemeSegment> segments;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        ++line_no;
        pos = eol + 1;
        if (eol == text.size() && line.empty()) break;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t1 == std::string_view::npos || t2 == std::string_view::npos)
            throw ParseError("annotation line " + std::to_string(line_no) +
                             ": expected start<TAB>end<TAB>label");
        PhonemeSegment seg;
        seg.start_s = parse_seconds(line.substr(0, t1), line_no);
        seg.end_s = parse_seconds(line.substr(t1 + 1, t2 - t1 - 1), line_no);
        seg.label = std::string(line.substr(t2 + 1));
        if (seg.label.empty())
            throw ParseError("annotation line " + std::to_string(line_no) + ": empty label");
        if (!(seg.start_s >= 0.0) || !(seg.start_s < seg.end_s))
            throw ParseError("annotation line " + std::to_string(line_no) +
                             ": need 0 <= start < end");
        segments.push_back(std::move(seg));
    }

    std::stable_sort(segments.begin(), segments.end(),
                     [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (segments[i].start_s < segments[i - 1].end_s - 1e-9) {
            std::ostringstream msg;
            msg << "annotations: segments overlap ('" << segments[i - 1].label << "' ending "
                << segments[i - 1].end_s << " vs '" << segments[i].label << "' starting "
                << segments[i].start_s << ")";
            throw ValidationError(msg.str());
        }
    }
    return segments;
}

Alignment align_segments(const std::vector<PhonemeSegment>& segments,
                         const std::vector<std::size_t>& frame_starts, std::size_t period,
                         double sample_rate_hz) {
    if (!std::is_sorted(frame_starts.begin(), frame_starts.end()))
        throw ContractError("align_segments: frame starts must be ascending");
    if (period == 0 || !(sample_rate_hz > 0.0))
        throw ContractError("align_segments: bad period or sample rate");

    Alignment out;
    const double eps = 1e-6; // samples; absorbs decimal-text rounding
    for (const auto& seg : segments) {
        const auto category = categorize_phoneme(seg.label);
        if (category == DeformationCategory::Excluded) {
            ++out.excluded_segments;
            continue;
        }
        const double lo = seg.start_s * sample_rate_hz - eps;
        const double hi = seg.end_s * sample_rate_hz + eps;
        CategorizedSegment cs;
        cs.segment = seg;
        cs.category = category;
        for (std::size_t i = 0; i < frame_starts.size(); ++i) {
            const double a = static_cast<double>(frame_starts[i]);
            if (a < lo) continue;
            if (a + static_cast<double>(period) > hi) break;
            cs.frames.push_back(i);
        }
        if (cs.frames.empty()) {
            ++out.empty_segments;
            continue;
        }
        out.segments.push_back(std::move(cs));
    }
    return out;
}

} // namespace eardyn
