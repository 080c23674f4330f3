#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcs {

// Admissible ranges for the bell-shaped tariff parameters. The ranges keep at
// least one affordable departure window available to every traveler.
struct TollBounds {
    static constexpr double min_amplitude = 0.0;
    static constexpr double max_amplitude = 7.0;
    static constexpr double min_center = 300.0;
    static constexpr double max_center = 540.0;
    static constexpr double min_width = 50.0;
    static constexpr double max_width = 70.0;
};

// Daily tariff in tokens as a bell curve over departure time:
// amplitude at `center`, decaying with standard deviation `width`.
struct TollProfile {
    double amplitude = 0.0;  // tokens at the peak
    double center = 420.0;   // minute-of-day of the peak
    double width = 60.0;     // spread in minutes

    // Tokens charged for departing at minute t.
    double at(double t) const {
        if (amplitude == 0.0) return 0.0;
        const double z = (t - center) / width;
        return amplitude * std::exp(-0.5 * z * z);
    }

    TollProfile clamped() const {
        return TollProfile{
            std::clamp(amplitude, TollBounds::min_amplitude, TollBounds::max_amplitude),
            std::clamp(center, TollBounds::min_center, TollBounds::max_center),
            std::clamp(width, TollBounds::min_width, TollBounds::max_width)};
    }

    bool in_bounds() const {
        return amplitude >= TollBounds::min_amplitude &&
               amplitude <= TollBounds::max_amplitude &&
               center >= TollBounds::min_center && center <= TollBounds::max_center &&
               width >= TollBounds::min_width && width <= TollBounds::max_width;
    }

    void validate() const {
        if (width <= 0.0) throw std::invalid_argument("toll profile width must be positive");
        if (!in_bounds()) throw std::invalid_argument("toll profile parameters out of bounds");
    }
};

inline double toll_at(const TollProfile& profile, double t) { return profile.at(t); }

}  // namespace tcs
