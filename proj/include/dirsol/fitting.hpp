#pragma once

#include <stdexcept>
#include <vector>

namespace dirsol {

struct FitResult {
    double exponent = 0.0;
    double intercept = 0.0;  // log-space intercept: value ~ exp(intercept) t^exponent
    double t_min = 0.0;
    double t_max = 0.0;
    double rms_residual = 0.0;
    int samples = 0;
};

class FitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Least squares of log(value) against log(t) over t_min <= t <= t_max.
// Requires at least 10 samples in the window, all with t > 0 and value > 0.
FitResult fit_power_law(const std::vector<double>& t, const std::vector<double>& value, double t_min,
                        double t_max);

// Ordinary least-squares line y = a + b x; returns (a, b).
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dirsol
