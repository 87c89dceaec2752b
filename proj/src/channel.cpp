#include "eardyn/channel.hpp"
#include "eardyn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace eardyn {

ChannelResponse estimate_response(std::span<const double> frame, const ProbeSignal& probe,
                                  double regularization) {
    if (frame.size() != probe.samples.size())
        throw ShapeError("estimate_response: frame length differs from probe period");
    if (!(regularization > 0.0))
        throw ConfigError("estimate_response: regularization must be > 0");

    const std::size_t n = frame.size();
    const double fs = probe.config.sample_rate_hz;
    const double bin_hz = fs / static_cast<double>(n);

    const long k_low = std::lround(std::ceil(probe.config.f_start_hz / bin_hz - 1e-9));
    const long k_high = std::lround(std::floor(probe.config.f_end_hz / bin_hz + 1e-9));
    if (k_low > k_high || k_high >= static_cast<long>(n / 2 + 1))
        throw ConfigError("estimate_response: probe band covers no DFT bins");

    const auto reflection = fft_forward(std::vector<double>(frame.begin(), frame.end()));
    const auto incident = fft_forward(probe.samples);

    double peak_power = 0.0;
    for (long k = k_low; k <= k_high; ++k)
        peak_power = std::max(peak_power, std::norm(incident[static_cast<std::size_t>(k)]));
    if (peak_power <= 0.0)
        throw DegenerateError("estimate_response: probe has zero in-band energy");

    ChannelResponse h;
    h.bin_hz = bin_hz;
    h.f_low_hz = static_cast<double>(k_low) * bin_hz;
    h.f_high_hz = static_cast<double>(k_high) * bin_hz;
    h.values.resize(static_cast<std::size_t>(k_high - k_low + 1));
    for (long k = k_low; k <= k_high; ++k) {
        const auto& p = incident[static_cast<std::size_t>(k)];
        const auto& r = reflection[static_cast<std::size_t>(k)];
        h.values[static_cast<std::size_t>(k - k_low)] =
            r * std::conj(p) / (std::norm(p) + regularization * peak_power);
    }
    for (const auto& v : h.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DegenerateError("estimate_response: non-finite response value");
    return h;
}

FeatureVector to_feature(const ChannelResponse& h) {
    if (h.values.size() < 8)
        throw ShapeError("to_feature: need at least 8 bins");

    FeatureVector f;
    f.f_low_hz = h.f_low_hz;
    f.f_high_hz = h.f_high_hz;
    f.bin_hz = h.bin_hz;
    f.values.resize(h.values.size());

    // Floor at -12 keeps numerically silent bins out of -inf territory.
    double mean = 0.0;
    for (std::size_t i = 0; i < h.values.size(); ++i) {
        const double mag = std::abs(h.values[i]);
        if (!std::isfinite(mag)) throw ShapeError("to_feature: non-finite magnitude");
        f.values[i] = std::max(mag > 0.0 ? std::log10(mag) : -12.0, -12.0);
        mean += f.values[i];
    }
    mean /= static_cast<double>(f.values.size());

    double norm_sq = 0.0;
    for (auto& v : f.values) {
        v -= mean;
        norm_sq += v * v;
    }
    if (norm_sq < 1e-24)
        throw DegenerateError("to_feature: zero-variance log-magnitude");
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (auto& v : f.values) v *= inv_norm;
    return f;
}

double similarity(const FeatureVector& a, const FeatureVector& b) {
    if (a.values.size() != b.values.size())
        throw ShapeError("similarity: bin counts differ");
    if (std::abs(a.f_low_hz - b.f_low_hz) > 1e-6 || std::abs(a.bin_hz - b.bin_hz) > 1e-6)
        throw ShapeError("similarity: band mismatch");

    const std::size_t n = a.values.size();
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a.values[i];
        mean_b += b.values[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double dot = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.values[i] - mean_a;
        const double db = b.values[i] - mean_b;
        dot += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a < 1e-24 || var_b < 1e-24)
        throw DegenerateError("similarity: zero-variance feature");
    return std::clamp(dot / std::sqrt(var_a * var_b), -1.0, 1.0);
}

} // namespace eardyn
