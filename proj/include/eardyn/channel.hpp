#ifndef EARDYN_CHANNEL_HPP
#define EARDYN_CHANNEL_HPP

#include "eardyn/dsp.hpp"

#include <complex>
#include <span>
#include <vector>

namespace eardyn {

// Complex frequency response of the ear canal over the probe band.
// Bins run from f_low to f_high inclusive at spacing bin_hz.
struct ChannelResponse {
    double f_low_hz = 0.0;
    double f_high_hz = 0.0;
    double bin_hz = 0.0;
    std::vector<std::complex<double>> values;
};

// In-band log-magnitude of H, mean-removed and scaled to unit L2 norm.
// Band metadata is carried along for compatibility checks.
struct FeatureVector {
    double f_low_hz = 0.0;
    double f_high_hz = 0.0;
    double bin_hz = 0.0;
    std::vector<double> values;
};

// Regularized spectral division on the frame's own DFT grid:
//   H(f) = R(f) conj(P(f)) / (|P(f)|^2 + eps * max|P(f)|^2)
// restricted to bins inside the probe band. The frame must be exactly
// one probe period long; with back-to-back chirps a steady-state frame
// is the circular convolution of the period with the canal response,
// which this division inverts.
ChannelResponse estimate_response(std::span<const double> frame, const ProbeSignal& probe,
                                  double regularization);

// log10|H| floored at -12 per bin, mean removed, unit L2 norm.
// A flat magnitude (zero variance) has no shape to normalize and
// raises DegenerateError.
FeatureVector to_feature(const ChannelResponse& h);

// Pearson correlation coefficient in [-1, 1]. For the mean-zero
// unit-norm vectors produced by to_feature this equals the dot product.
double similarity(const FeatureVector& a, const FeatureVector& b);

} // namespace eardyn

#endif
