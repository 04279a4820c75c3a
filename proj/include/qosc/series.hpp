// series.hpp — sampled survival probabilities and their amplitude spectra

#pragma once

#include <string>
#include <vector>

namespace qosc {

struct TimeSeries {
    std::vector<double> times;   // uniformly spaced for spectral analysis
    std::vector<double> values;  // probabilities
};

enum class Window { rectangular, hann, blackman };

const char* to_string(Window w) noexcept;
Window window_from_string(const std::string& name);

struct Spectrum {
    std::vector<double> freqs;  // angular frequencies, ascending from 0
    std::vector<double> amps;   // amplitude of each cosine component
    Window window{Window::rectangular};
    double resolution{0.0};     // bin width 2 pi / (N dt)
};

} // namespace qosc
