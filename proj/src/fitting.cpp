#include "dirsol/fitting.hpp"

#include <cmath>

namespace dirsol {

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw FitError("line fit needs two or more paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double b = sxx > 0 ? sxy / sxx : 0.0;
    return {my - b * mx, b};
}

FitResult fit_power_law(const std::vector<double>& t, const std::vector<double>& value, double t_min,
                        double t_max) {
    if (t.size() != value.size()) throw FitError("time and value series differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_min || t[i] > t_max) continue;
        if (!(t[i] > 0.0) || !(value[i] > 0.0)) throw FitError("power-law fit needs positive t and values");
        lx.push_back(std::log(t[i]));
        ly.push_back(std::log(value[i]));
    }
    if (lx.size() < 10) throw FitError("power-law fit needs at least 10 samples in the window");
    const auto [a, b] = fit_line(lx, ly);
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) ss += std::pow(ly[i] - a - b * lx[i], 2);
    FitResult r;
    r.exponent = b;
    r.intercept = a;
    r.t_min = t_min;
    r.t_max = t_max;
    r.rms_residual = std::sqrt(ss / lx.size());
    r.samples = static_cast<int>(lx.size());
    return r;
}

}  // namespace dirsol
