#ifndef EARDYN_SIM_HPP
#define EARDYN_SIM_HPP

#include "eardyn/dsp.hpp"
#include "eardyn/motion.hpp"
#include "eardyn/phoneme.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eardyn {

inline constexpr int kSections = 8;          // cylindrical sections, outer to eardrum
inline constexpr double kSpeedOfSound = 343.0; // m/s

enum class DeformationType { Compress, Expand, None };

// Static canal geometry as a concatenated-tube model.
struct EarCanalModel {
    double length_m = 0.0;
    std::array<double, kSections> section_areas_m2{};
    double eardrum_reflection = 0.9; // termination coefficient, in (0, 1)
    double wall_loss = 0.98;         // per-section one-way amplitude factor, in (0, 1]
};

// Per-category fractional area changes for one subject. The shape part
// is volume-neutral (area-weighted projection) so the net volume change
// per utterance is exactly the jaw-openness-scaled volume term.
struct DeformationProfile {
    DeformationType type = DeformationType::None;
    double volume_change_mm3 = 0.0; // signed, at full jaw openness
    double shape_sign_scale = 0.0;  // signed fractional area modulation
    std::array<std::array<double, kSections>, kCategoryCount> category_delta{};
};

struct SimSubject {
    std::string id;
    std::uint64_t rng_seed = 0; // derived from (population seed, index)
    EarCanalModel canal;
    DeformationProfile deformation;
    // Small volume-neutral area perturbation per head posture; Forward is zero.
    std::array<std::array<double, kSections>, kPostureCount> posture_offsets{};
};

// One scripted articulation state: a deformation category held for the
// given duration, or a static hold when the category is absent.
struct ScriptEntry {
    std::optional<DeformationCategory> category;
    double duration_s = 0.0;
};

// Stable seed derivation for per-subject / per-session streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// n subjects satisfying all population constraints, deterministic in
// seed. Canal draws violating the volume range are resampled.
std::vector<SimSubject> sample_population(int n, std::uint64_t seed);

// Reflection coefficients at the K-1 interior junctions:
//   r_k = (A_k - A_{k+1}) / (A_k + A_{k+1})
std::vector<double> junction_coefficients(std::span<const double> areas);

// Reflection impulse response of the tube lattice, length n_taps.
//
// Computed on the DFT grid by the chain recursion from the eardrum
// outward: per section a round-trip factor wall_loss^2 e^{-j 2 w tau}
// with tau = (length/K)/c, at each junction the Moebius update
// (r + G)/(1 + r G), eardrum terminating with eardrum_reflection.
// Delays stay exact (fractional) in the phase factors; a per-section
// rounding at 48 kHz would collapse to zero samples. |G| <= 1 pointwise
// for a passive model, so tap energy <= 1 by Parseval.
//
// Tap 0 is the entrance reflection: the junction between the fixed
// earbud coupler (area = undeformed first section) and the current,
// possibly deformed, first section.
std::vector<double> impulse_response(const EarCanalModel& canal,
                                     std::span<const double> deformed_areas,
                                     double sample_rate_hz, int n_taps);

// Section areas for one articulation state:
//   base * (1 + category delta + posture offset)
std::array<double, kSections> deformed_section_areas(const SimSubject& subject,
                                                     std::optional<DeformationCategory> category,
                                                     HeadPosture posture);

// Reflection of the repeating probe off the scripted canal: area states
// cross-faded linearly over 20 ms at entry boundaries, one impulse
// response per chirp period (quasi-static), plus white noise at snr_db
// relative to the clean reflection. Deterministic in seed; pass
// snr_db = +inf for a noiseless reflection.
Recording synthesize_reflection(const SimSubject& subject, const ProbeSignal& probe,
                                std::span<const ScriptEntry> script, HeadPosture posture,
                                double snr_db, std::uint64_t seed);

} // namespace eardyn

#endif
