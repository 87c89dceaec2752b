#ifndef EARDYN_MOTION_HPP
#define EARDYN_MOTION_HPP

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eardyn {

// Six-axis inertial sample in the device frame: x forward, y left, z up.
struct ImuSample {
    double t_s = 0.0;
    std::array<double, 3> accel_mps2{}; // specific force
    std::array<double, 3> gyro_rps{};
};

enum class HeadPosture { Forward, Left, Right, Up, Down };

inline constexpr int kPostureCount = 5;

struct MotionState {
    HeadPosture posture = HeadPosture::Forward;
    bool moving = false;
};

std::string_view posture_token(HeadPosture p);
HeadPosture posture_from_token(std::string_view token);

// Pitch from the gravity direction of the time-averaged accelerometer,
// yaw from trapezoidal integration of the vertical-axis gyro, postures
// by +-30 degree thresholds (pitch first, then yaw). moving is true iff
// the RMS gyro magnitude exceeds 0.3 rad/s.
// Requires >= 10 samples spanning >= 0.2 s and a plausible gravity
// magnitude (mean accel >= 2 m/s^2).
MotionState classify_posture(std::span<const ImuSample> trace);

// Trace text: `t ax ay az gx gy gz` tab-separated per line, SI units,
// `#` lines ignored. Samples must be time-ordered.
std::vector<ImuSample> parse_imu(std::string_view text);

} // namespace eardyn

#endif
