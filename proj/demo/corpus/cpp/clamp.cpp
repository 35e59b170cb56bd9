#include <algorithm>

double clamp_unit(double x) {
    return std::clamp(x, 0.0, 1.0); // keep in [0, 1]
}

double mix(double a, double b, double t) {
    const double w = clamp_unit(t);
    return a * (1.0 - w) + b * w;
}
