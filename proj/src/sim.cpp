#include "eardyn/sim.hpp"
#include "eardyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace eardyn {

namespace {

constexpr double kAreaMin = 25e-6;   // m^2
constexpr double kAreaMax = 70e-6;   // m^2
constexpr double kLengthMin = 14.20e-3;
constexpr double kLengthMax = 29.36e-3;
constexpr double kVolumeMin = 372e-9;  // m^3
constexpr double kVolumeMax = 1400e-9; // m^3
constexpr double kFadeSeconds = 0.020;
constexpr int kIrTaps = 256;
constexpr double kMaxDelta = 0.45; // fractional area change hard cap

// Rows 1..7 of the order-8 Hadamard matrix: mutually orthogonal +-1
// patterns, one per deformation category.
constexpr int kCategoryPattern[kCategoryCount][kSections] = {
    {1, -1, 1, -1, 1, -1, 1, -1},
    {1, 1, -1, -1, 1, 1, -1, -1},
    {1, -1, -1, 1, 1, -1, -1, 1},
    {1, 1, 1, 1, -1, -1, -1, -1},
    {1, -1, 1, -1, -1, 1, -1, 1},
    {1, 1, -1, -1, -1, -1, 1, 1},
    {1, -1, -1, 1, -1, 1, 1, -1},
};

// Relative jaw openness per category, scaling the net volume change.
constexpr double kCategoryOpenness[kCategoryCount] = {0.35, 1.0, 0.4, 0.65, 0.9, 0.45, 0.3};

// Remove the area-weighted mean so the perturbation is volume-neutral.
void project_volume_neutral(std::array<double, kSections>& delta,
                            const std::array<double, kSections>& areas) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < kSections; ++k) {
        num += areas[static_cast<std::size_t>(k)] * delta[static_cast<std::size_t>(k)];
        den += areas[static_cast<std::size_t>(k)];
    }
    const double shift = num / den;
    for (auto& d : delta) d -= shift;
}

std::complex<double> junction_update(double r, std::complex<double> g) {
    return (r + g) / (1.0 + r * g);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 step; decorrelates per-subject and per-session streams.
    std::uint64_t z = base + stream * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<SimSubject> sample_population(int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("sample_population: need n >= 1");

    std::vector<SimSubject> subjects;
    subjects.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        SimSubject subject;
        subject.rng_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "subject-%04d", i);
            subject.id = buf;
        }
        std::mt19937_64 rng(subject.rng_seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);

        // Geometry: smooth random area profile; resample while the
        // implied volume falls outside the population range.
        for (int attempt = 0;; ++attempt) {
            if (attempt > 10000)
                throw ModelError("sample_population: volume range unsatisfiable");
            subject.canal.length_m = kLengthMin + (kLengthMax - kLengthMin) * unit(rng);
            const double mean_area = 30e-6 + 32e-6 * unit(rng);
            const double tilt = -0.3 + 0.6 * unit(rng);
            const double curve = -0.25 + 0.5 * unit(rng);
            for (int k = 0; k < kSections; ++k) {
                const double x = 2.0 * k / (kSections - 1.0) - 1.0;
                const double shape =
                    1.0 + tilt * x + curve * (x * x - 1.0 / 3.0) + 0.06 * gauss(rng);
                subject.canal.section_areas_m2[static_cast<std::size_t>(k)] =
                    std::clamp(mean_area * shape, kAreaMin, kAreaMax);
            }
            double volume = 0.0;
            for (double a : subject.canal.section_areas_m2)
                volume += a * subject.canal.length_m / kSections;
            if (volume >= kVolumeMin && volume <= kVolumeMax) break;
        }
        subject.canal.eardrum_reflection = 0.70 + 0.25 * unit(rng);
        subject.canal.wall_loss = 0.94 + 0.055 * unit(rng);

        // Deformation typology: compress 25%, expand 67%, none 8%.
        const double u = unit(rng);
        auto& deform = subject.deformation;
        if (u < 0.25) {
            deform.type = DeformationType::Compress;
            deform.volume_change_mm3 = -(3.0 + 7.0 * unit(rng));
        } else if (u < 0.92) {
            deform.type = DeformationType::Expand;
            deform.volume_change_mm3 = 8.0 + 17.0 * unit(rng);
        } else {
            deform.type = DeformationType::None;
            deform.volume_change_mm3 = 0.0;
        }
        deform.shape_sign_scale = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.15 + 0.15 * unit(rng));

        double base_volume = 0.0;
        for (double a : subject.canal.section_areas_m2)
            base_volume += a * subject.canal.length_m / kSections;

        for (int c = 0; c < kCategoryCount; ++c) {
            auto& delta = deform.category_delta[static_cast<std::size_t>(c)];
            for (int k = 0; k < kSections; ++k)
                delta[static_cast<std::size_t>(k)] =
                    deform.shape_sign_scale *
                    (kCategoryPattern[c][k] + 0.25 * gauss(rng));
            project_volume_neutral(delta, subject.canal.section_areas_m2);
            // Net volume change rides on a uniform term; scaling all areas
            // by (1+u) scales the volume by (1+u).
            const double uniform =
                deform.volume_change_mm3 * 1e-9 * kCategoryOpenness[c] / base_volume;
            for (auto& d : delta) d = std::clamp(d + uniform, -kMaxDelta, kMaxDelta);
        }

        for (int p = 0; p < kPostureCount; ++p) {
            auto& offset = subject.posture_offsets[static_cast<std::size_t>(p)];
            if (static_cast<HeadPosture>(p) == HeadPosture::Forward) {
                offset.fill(0.0);
                continue;
            }
            for (auto& o : offset) o = 0.04 * gauss(rng);
            project_volume_neutral(offset, subject.canal.section_areas_m2);
        }
        subjects.push_back(std::move(subject));
    }
    return subjects;
}

std::vector<double> junction_coefficients(std::span<const double> areas) {
    if (areas.size() < 2) throw ModelError("junction_coefficients: need >= 2 sections");
    for (double a : areas)
        if (!(a > 0.0)) throw ModelError("junction_coefficients: non-positive area");
    std::vector<double> r(areas.size() - 1);
    for (std::size_t k = 0; k + 1 < areas.size(); ++k)
        r[k] = (areas[k] - areas[k + 1]) / (areas[k] + areas[k + 1]);
    return r;
}

std::vector<double> impulse_response(const EarCanalModel& canal,
                                     std::span<const double> deformed_areas,
                                     double sample_rate_hz, int n_taps) {
    if (deformed_areas.size() != kSections)
        throw ModelError("impulse_response: expected one area per section");
    for (double a : deformed_areas)
        if (!(a > 0.0)) throw ModelError("impulse_response: non-positive area");
    if (!(canal.length_m > 0.0)) throw ModelError("impulse_response: non-positive length");
    if (!(canal.eardrum_reflection > 0.0 && canal.eardrum_reflection < 1.0))
        throw ModelError("impulse_response: eardrum reflection must be in (0, 1)");
    if (!(canal.wall_loss > 0.0 && canal.wall_loss <= 1.0))
        throw ModelError("impulse_response: wall loss must be in (0, 1]");
    const int round_trip =
        2 * static_cast<int>(std::lround(canal.length_m / kSpeedOfSound * sample_rate_hz));
    if (n_taps < std::max(2, round_trip))
        throw ModelError("impulse_response: n_taps below the canal round trip");

    const auto r = junction_coefficients(deformed_areas);
    const double entrance_area = canal.section_areas_m2[0]; // fixed earbud coupler
    const double r_entrance = (entrance_area - deformed_areas[0]) /
                              (entrance_area + deformed_areas[0]);
    const double tau = canal.length_m / kSections / kSpeedOfSound;
    const double loss_sq = canal.wall_loss * canal.wall_loss;

    const std::size_t n = static_cast<std::size_t>(n_taps);
    std::vector<std::complex<double>> gamma(n);
    for (std::size_t m = 0; m <= n / 2; ++m) {
        const double omega = 2.0 * std::numbers::pi * static_cast<double>(m) *
                             sample_rate_hz / static_cast<double>(n_taps);
        const std::complex<double> z2 =
            loss_sq * std::exp(std::complex<double>(0.0, -2.0 * omega * tau));
        std::complex<double> g = canal.eardrum_reflection;
        for (int s = kSections; s >= 1; --s) {
            g = z2 * g;
            if (s >= 2) g = junction_update(r[static_cast<std::size_t>(s - 2)], g);
        }
        g = junction_update(r_entrance, g);
        gamma[m] = g;
    }
    if (n_taps % 2 == 0) gamma[n / 2] = gamma[n / 2].real();
    for (std::size_t m = 1; m < (n + 1) / 2; ++m) gamma[n - m] = std::conj(gamma[m]);
    return fft_inverse_real(gamma);
}

std::array<double, kSections> deformed_section_areas(const SimSubject& subject,
                                                     std::optional<DeformationCategory> category,
                                                     HeadPosture posture) {
    std::array<double, kSections> delta{};
    if (category) {
        if (*category == DeformationCategory::Excluded)
            throw ModelError("deformed_section_areas: excluded category has no deformation");
        delta = subject.deformation.category_delta[static_cast<std::size_t>(*category)];
    }
    const auto& offset = subject.posture_offsets[static_cast<std::size_t>(posture)];
    std::array<double, kSections> areas{};
    for (int k = 0; k < kSections; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        areas[ks] = subject.canal.section_areas_m2[ks] * (1.0 + delta[ks] + offset[ks]);
    }
    return areas;
}

Recording synthesize_reflection(const SimSubject& subject, const ProbeSignal& probe,
                                std::span<const ScriptEntry> script, HeadPosture posture,
                                double snr_db, std::uint64_t seed) {
    if (script.empty()) throw EmptyInputError("synthesize_reflection: empty script");
    for (const auto& entry : script) {
        if (!(entry.duration_s > 0.0))
            throw ModelError("synthesize_reflection: entry duration must be > 0");
        if (entry.category && *entry.category == DeformationCategory::Excluded)
            throw ModelError("synthesize_reflection: excluded category in script");
    }
    const double fs = probe.config.sample_rate_hz;
    const std::size_t period = probe.samples.size();
    if (period == 0) throw ConfigError("synthesize_reflection: empty probe");

    // Entry start times and per-entry area deltas (posture excluded; it
    // is constant over the whole recording).
    std::vector<double> entry_start(script.size());
    std::vector<std::array<double, kSections>> entry_delta(script.size());
    double total_s = 0.0;
    for (std::size_t i = 0; i < script.size(); ++i) {
        entry_start[i] = total_s;
        total_s += script[i].duration_s;
        entry_delta[i].fill(0.0);
        if (script[i].category)
            entry_delta[i] =
                subject.deformation.category_delta[static_cast<std::size_t>(*script[i].category)];
    }
    const auto& posture_offset = subject.posture_offsets[static_cast<std::size_t>(posture)];

    const auto delta_at = [&](double t) {
        std::size_t i = script.size() - 1;
        while (i > 0 && t < entry_start[i]) --i;
        std::array<double, kSections> d = entry_delta[i];
        const double into = t - entry_start[i];
        if (i > 0 && into < kFadeSeconds) {
            const double mix = into / kFadeSeconds;
            for (int k = 0; k < kSections; ++k) {
                const auto ks = static_cast<std::size_t>(k);
                d[ks] = (1.0 - mix) * entry_delta[i - 1][ks] + mix * d[ks];
            }
        }
        return d;
    };

    const std::size_t n_samples = static_cast<std::size_t>(std::lround(total_s * fs));
    if (n_samples < period)
        throw ModelError("synthesize_reflection: script shorter than one chirp period");
    const std::size_t n_periods = (n_samples + period - 1) / period;

    Recording rec;
    rec.sample_rate_hz = fs;
    rec.role = ChannelRole::Mixed;
    rec.samples.assign(n_samples, 0.0);
    for (std::size_t p = 0; p < n_periods; ++p) {
        const double t_mid =
            std::min((static_cast<double>(p) + 0.5) * period / fs, total_s - 1e-9);
        const auto delta = delta_at(t_mid);
        std::array<double, kSections> areas{};
        for (int k = 0; k < kSections; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            areas[ks] = subject.canal.section_areas_m2[ks] *
                        (1.0 + delta[ks] + posture_offset[ks]);
        }
        const auto ir = impulse_response(subject.canal, areas, fs, kIrTaps);
        const std::size_t base = p * period;
        for (std::size_t n = 0; n < period; ++n) {
            const double x = probe.samples[n];
            if (x == 0.0) continue;
            const std::size_t limit = std::min(ir.size(), n_samples - std::min(n_samples, base + n));
            for (std::size_t k = 0; k < limit; ++k)
                rec.samples[base + n + k] += x * ir[k];
        }
    }

    if (std::isfinite(snr_db)) {
        double energy = 0.0;
        for (double s : rec.samples) energy += s * s;
        const double rms = std::sqrt(energy / static_cast<double>(rec.samples.size()));
        const double sigma = rms * std::pow(10.0, -snr_db / 20.0);
        if (sigma > 0.0) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> gauss(0.0, sigma);
            for (auto& s : rec.samples) s += gauss(rng);
        }
    }
    return rec;
}

} // namespace eardyn
