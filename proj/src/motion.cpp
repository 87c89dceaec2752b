#include "eardyn/motion.hpp"
#include "eardyn/errors.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace eardyn {

std::string_view posture_token(HeadPosture p) {
    switch (p) {
        case HeadPosture::Forward: return "FORWARD";
        case HeadPosture::Left: return "LEFT";
        case HeadPosture::Right: return "RIGHT";
        case HeadPosture::Up: return "UP";
        case HeadPosture::Down: return "DOWN";
    }
    throw ContractError("posture_token: unknown posture");
}

HeadPosture posture_from_token(std::string_view token) {
    for (int i = 0; i < kPostureCount; ++i) {
        const auto p = static_cast<HeadPosture>(i);
        if (posture_token(p) == token) return p;
    }
    throw ParseError("unknown posture token: " + std::string(token));
}

MotionState classify_posture(std::span<const ImuSample> trace) {
    if (trace.size() < 10)
        throw InsufficientDataError("classify_posture: need at least 10 samples");
    const double span = trace.back().t_s - trace.front().t_s;
    if (!(span >= 0.2))
        throw InsufficientDataError("classify_posture: trace must span at least 0.2 s");
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i].t_s < trace[i - 1].t_s)
            throw InvalidTraceError("classify_posture: samples not time-ordered");

    std::array<double, 3> mean_accel{};
    double gyro_sq_sum = 0.0;
    for (const auto& s : trace) {
        for (int a = 0; a < 3; ++a) mean_accel[static_cast<std::size_t>(a)] += s.accel_mps2[static_cast<std::size_t>(a)];
        gyro_sq_sum += s.gyro_rps[0] * s.gyro_rps[0] + s.gyro_rps[1] * s.gyro_rps[1] +
                       s.gyro_rps[2] * s.gyro_rps[2];
    }
    for (auto& a : mean_accel) a /= static_cast<double>(trace.size());
    const double accel_mag = std::sqrt(mean_accel[0] * mean_accel[0] +
                                       mean_accel[1] * mean_accel[1] +
                                       mean_accel[2] * mean_accel[2]);
    if (accel_mag < 2.0)
        throw InvalidTraceError("classify_posture: average accel below 2 m/s^2");

    // Only the gravity direction matters, so this is scale-invariant.
    const double pitch_deg =
        std::atan2(mean_accel[0], mean_accel[2]) * 180.0 / std::numbers::pi;

    // Per-trace yaw from a zero reference; no absolute heading available.
    double yaw_rad = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        yaw_rad += 0.5 * (trace[i].gyro_rps[2] + trace[i - 1].gyro_rps[2]) *
                   (trace[i].t_s - trace[i - 1].t_s);
    const double yaw_deg = yaw_rad * 180.0 / std::numbers::pi;

    MotionState state;
    state.moving = std::sqrt(gyro_sq_sum / static_cast<double>(trace.size())) > 0.3;
    if (pitch_deg > 30.0)
        state.posture = HeadPosture::Up;
    else if (pitch_deg < -30.0)
        state.posture = HeadPosture::Down;
    else if (yaw_deg > 30.0)
        state.posture = HeadPosture::Left;
    else if (yaw_deg < -30.0)
        state.posture = HeadPosture::Right;
    else
        state.posture = HeadPosture::Forward;
    return state;
}

namespace {

double parse_field(std::string_view field, int line_no) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value))
        throw ParseError("imu line " + std::to_string(line_no) + ": bad field '" +
                         std::string(field) + "'");
    return value;
}

} // namespace

std::vector<ImuSample> parse_imu(std::string_view text) {
    std::vector<ImuSample> samples;
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

        std::array<double, 7> fields{};
        std::size_t field_start = 0;
        for (int f = 0; f < 7; ++f) {
            std::size_t tab = f == 6 ? line.size() : line.find('\t', field_start);
            if (tab == std::string_view::npos)
                throw ParseError("imu line " + std::to_string(line_no) +
                                 ": expected 7 tab-separated fields");
            fields[static_cast<std::size_t>(f)] =
                parse_field(line.substr(field_start, tab - field_start), line_no);
            field_start = tab + 1;
        }
        ImuSample s;
        s.t_s = fields[0];
        s.accel_mps2 = {fields[1], fields[2], fields[3]};
        s.gyro_rps = {fields[4], fields[5], fields[6]};
        if (!samples.empty() && s.t_s < samples.back().t_s)
            throw ValidationError("imu line " + std::to_string(line_no) +
                                  ": timestamps not ordered");
        samples.push_back(s);
    }
    return samples;
}

} // namespace eardyn
