#include "eardyn/dsp.hpp"
#include "eardyn/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace eardyn {

namespace {

[[noreturn]] void config_fail(const std::string& what) {
    throw ConfigError("probe config: " + what);
}

// Zeroth-order modified Bessel function, power series.
double bessel_i0(double x) {
    double sum = 1.0, term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

} // namespace

void ProbeConfig::validate() const {
    if (!(f_start_hz > 0.0)) config_fail("f_start must be > 0");
    if (!(f_end_hz > f_start_hz)) config_fail("f_end must be > f_start");
    if (!(f_end_hz < sample_rate_hz / 2.0)) config_fail("f_end must be < sample_rate/2");
    if (!(chirp_duration_s > 0.0)) config_fail("chirp_duration must be > 0");
    if (!(guard_gap_s >= 0.0)) config_fail("guard_gap must be >= 0");
    if (!(amplitude > 0.0 && amplitude <= 1.0)) config_fail("amplitude must be in (0, 1]");
    if (chirp_samples() < 2) config_fail("chirp_duration too short for sample_rate");
}

int ProbeConfig::chirp_samples() const {
    return static_cast<int>(std::lround(chirp_duration_s * sample_rate_hz));
}

int ProbeConfig::period_samples() const {
    return static_cast<int>(std::lround((chirp_duration_s + guard_gap_s) * sample_rate_hz));
}

ProbeSignal synthesize_probe(const ProbeConfig& config) {
    config.validate();
    const int n_chirp = config.chirp_samples();
    const int n_total = config.period_samples();
    const double rate = (config.f_end_hz - config.f_start_hz) / config.chirp_duration_s;

    ProbeSignal probe;
    probe.config = config;
    probe.samples.assign(static_cast<std::size_t>(n_total), 0.0);
    for (int n = 0; n < n_chirp; ++n) {
        const double t = n / config.sample_rate_hz;
        const double phase =
            2.0 * std::numbers::pi * (config.f_start_hz * t + 0.5 * rate * t * t);
        probe.samples[static_cast<std::size_t>(n)] = config.amplitude * std::sin(phase);
    }
    return probe;
}

std::vector<double> design_highpass(const BandSplitConfig& cfg, double sample_rate_hz) {
    if (!(cfg.cutoff_hz > 0.0 && cfg.cutoff_hz < sample_rate_hz / 2.0))
        throw ConfigError("band split: cutoff must be in (0, sample_rate/2)");
    if (!(cfg.transition_width_hz > 0.0))
        throw ConfigError("band split: transition width must be > 0");
    if (!(cfg.stopband_attenuation_db >= 21.0))
        throw ConfigError("band split: attenuation below Kaiser design range");
    if (cfg.cutoff_hz + cfg.transition_width_hz / 2.0 >= sample_rate_hz / 2.0)
        throw ConfigError("band split: transition band exceeds Nyquist");

    // Kaiser window design for the low-pass prototype.
    const double a = cfg.stopband_attenuation_db;
    const double beta = a > 50.0 ? 0.1102 * (a - 8.7)
                                 : 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
    const double delta_omega =
        2.0 * std::numbers::pi * cfg.transition_width_hz / sample_rate_hz;
    int n_taps = static_cast<int>(std::ceil((a - 7.95) / (2.285 * delta_omega))) + 1;
    if (n_taps % 2 == 0) ++n_taps; // odd length keeps the group delay integral

    const int mid = (n_taps - 1) / 2;
    const double fc = cfg.cutoff_hz / sample_rate_hz; // normalized cutoff
    const double i0_beta = bessel_i0(beta);

    std::vector<double> taps(static_cast<std::size_t>(n_taps));
    for (int n = 0; n < n_taps; ++n) {
        const int m = n - mid;
        const double sinc = m == 0 ? 2.0 * fc
                                   : std::sin(2.0 * std::numbers::pi * fc * m) /
                                         (std::numbers::pi * m);
        const double r = 2.0 * n / (n_taps - 1.0) - 1.0;
        const double window = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
        taps[static_cast<std::size_t>(n)] = sinc * window;
    }
    // Spectral inversion: high-pass = delta - low-pass.
    for (auto& t : taps) t = -t;
    taps[static_cast<std::size_t>(mid)] += 1.0;
    return taps;
}

namespace {

// Delay-compensated FIR: y[n] = sum_k h[k] x[n + mid - k], zero outside.
std::vector<double> filter_aligned(const std::vector<double>& x, const std::vector<double>& h) {
    const int n = static_cast<int>(x.size());
    const int k = static_cast<int>(h.size());
    const int mid = (k - 1) / 2;
    std::vector<double> y(x.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const int j_lo = std::max(0, i + mid - n + 1);
        const int j_hi = std::min(k - 1, i + mid);
        for (int j = j_lo; j <= j_hi; ++j)
            acc += h[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(i + mid - j)];
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

} // namespace

BandSplit split_bands(const Recording& rec, const BandSplitConfig& cfg) {
    if (rec.role != ChannelRole::Mixed)
        throw ConfigError("band split: recording must carry the mixed stream");
    if (!(rec.sample_rate_hz > 0.0))
        throw ConfigError("band split: recording has no sample rate");
    if (!(cfg.cutoff_hz < rec.sample_rate_hz / 2.0))
        throw ConfigError("band split: cutoff at or above recording Nyquist");

    const std::vector<double> hp = design_highpass(cfg, rec.sample_rate_hz);

    BandSplit out;
    out.inaudible.sample_rate_hz = rec.sample_rate_hz;
    out.inaudible.role = ChannelRole::InaudibleOnly;
    out.inaudible.samples = filter_aligned(rec.samples, hp);

    // Complementary branch: input minus high-pass, exact by construction.
    out.audible.sample_rate_hz = rec.sample_rate_hz;
    out.audible.role = ChannelRole::AudibleOnly;
    out.audible.samples.resize(rec.samples.size());
    for (std::size_t i = 0; i < rec.samples.size(); ++i)
        out.audible.samples[i] = rec.samples[i] - out.inaudible.samples[i];
    return out;
}

std::vector<Frame> frame_chirp_periods(const Recording& rec, const ProbeSignal& probe) {
    if (rec.role != ChannelRole::InaudibleOnly)
        throw ConfigError("framing: recording must be the inaudible branch");
    if (rec.sample_rate_hz != probe.config.sample_rate_hz)
        throw ConfigError("framing: recording sample rate differs from probe");
    const std::size_t period = probe.samples.size();
    if (period == 0) throw ConfigError("framing: empty probe");
    if (rec.samples.size() < period)
        throw EmptyInputError("framing: recording shorter than one chirp period");

    std::vector<Frame> frames;
    frames.reserve(rec.samples.size() / period);
    for (std::size_t start = 0; start + period <= rec.samples.size(); start += period) {
        Frame f;
        f.start = start;
        f.samples.assign(rec.samples.begin() + static_cast<std::ptrdiff_t>(start),
                         rec.samples.begin() + static_cast<std::ptrdiff_t>(start + period));
        frames.push_back(std::move(f));
    }
    return frames;
}

std::vector<std::complex<double>> fft_forward(const std::vector<double>& x) {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, x);
    return spectrum;
}

std::vector<double> fft_inverse_real(const std::vector<std::complex<double>>& spectrum) {
    Eigen::FFT<double> fft;
    std::vector<double> x;
    fft.inv(x, spectrum);
    return x;
}

} // namespace eardyn
