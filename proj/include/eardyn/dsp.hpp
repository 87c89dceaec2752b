#ifndef EARDYN_DSP_HPP
#define EARDYN_DSP_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace eardyn {

// Which band(s) a recording carries relative to the band split.
enum class ChannelRole { Mixed, InaudibleOnly, AudibleOnly };

// Parameters of the inaudible probe chirp. Default band 16-23 kHz:
// above speech, below Nyquist at 48 kHz, sensitive to small canal changes.
struct ProbeConfig {
    double f_start_hz = 16000.0;
    double f_end_hz = 23000.0;
    double chirp_duration_s = 0.010;
    double guard_gap_s = 0.002;
    double sample_rate_hz = 48000.0;
    double amplitude = 0.8; // peak, in (0, 1]

    // Throws ConfigError naming the violated bound.
    void validate() const;

    int chirp_samples() const;
    int period_samples() const; // chirp + guard gap
};

// One chirp period: the swept sine followed by guard-gap silence.
struct ProbeSignal {
    ProbeConfig config;
    std::vector<double> samples;
};

struct Recording {
    double sample_rate_hz = 0.0;
    ChannelRole role = ChannelRole::Mixed;
    std::vector<double> samples;
};

// Linear-phase FIR split at `cutoff_hz`; group delay is compensated so
// both outputs stay time-aligned with the input.
struct BandSplitConfig {
    double cutoff_hz = 15000.0;
    double stopband_attenuation_db = 60.0;
    double transition_width_hz = 1000.0;
};

struct BandSplit {
    Recording inaudible; // high-pass branch
    Recording audible;   // complementary low-pass branch
};

// A one-chirp-period slice of the inaudible stream.
struct Frame {
    std::size_t start = 0; // sample index into the source recording
    std::vector<double> samples;
};

// Linear sweep f_start -> f_end over chirp_duration, phase-0 sine start,
// then guard_gap silence. Deterministic function of the config.
ProbeSignal synthesize_probe(const ProbeConfig& config);

// High-pass / complementary low-pass split of a mixed recording.
// The high-pass is delta-minus-lowpass of a Kaiser windowed-sinc design,
// so the two branches sum back to the input exactly.
BandSplit split_bands(const Recording& rec, const BandSplitConfig& cfg);

// Consecutive non-overlapping probe-period frames; trailing partial
// frame discarded. Throws EmptyInputError if not even one period fits.
std::vector<Frame> frame_chirp_periods(const Recording& rec, const ProbeSignal& probe);

// Kaiser high-pass taps used by split_bands, exposed for inspection.
std::vector<double> design_highpass(const BandSplitConfig& cfg, double sample_rate_hz);

// Full-length complex spectrum of a real signal (N bins for N samples).
std::vector<std::complex<double>> fft_forward(const std::vector<double>& x);

// Real inverse of a full-length conjugate-symmetric spectrum.
std::vector<double> fft_inverse_real(const std::vector<std::complex<double>>& spectrum);

} // namespace eardyn

#endif
