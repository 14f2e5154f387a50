#include "rcns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcns {

Field::Field(std::vector<double> vals, std::string lbl)
    : values(std::move(vals)), label(std::move(lbl)) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument("Field '" + label + "': non-finite value at node " +
                                        std::to_string(i));
        }
    }
}

Field Field::zeros(std::size_t n, std::string lbl) {
    return Field(std::vector<double>(n, 0.0), std::move(lbl));
}

RadialGrid::RadialGrid(double a, double R, int N) : a_(a), R_(R), N_(N) {
    if (!(a > 0.0)) throw std::invalid_argument("RadialGrid: inner radius must satisfy a > 0");
    if (!(R > a)) throw std::invalid_argument("RadialGrid: truncation radius must satisfy R > a");
    if (N < 16) throw std::invalid_argument("RadialGrid: node count must be >= 16");
    dr_ = (R - a) / static_cast<double>(N - 1);
    r_.resize(N);
    for (int i = 0; i < N; ++i) r_[i] = a + i * dr_;
    r_.back() = R; // pin the endpoint against accumulated roundoff
}

Field ddr(const RadialGrid& g, const Field& f) {
    const int n = g.size();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("ddr: field length does not match grid");
    const double h = g.dr();
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return Field(std::move(d), "d/dr " + f.label);
}

Field d2dr2(const RadialGrid& g, const Field& f) {
    const int n = g.size();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("d2dr2: field length does not match grid");
    const double h2 = g.dr() * g.dr();
    std::vector<double> d(n);
    for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    d[0] = (f[2] - 2.0 * f[1] + f[0]) / h2;
    d[n - 1] = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / h2;
    return Field(std::move(d), "d2/dr2 " + f.label);
}

double weighted_integral(const RadialGrid& g, const Field& f, double k) {
    const int n = g.size();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("weighted_integral: field length does not match grid");
    double sum = 0.5 * (std::pow(g.node(0), k) * f[0] + std::pow(g.node(n - 1), k) * f[n - 1]);
    for (int i = 1; i < n - 1; ++i) sum += std::pow(g.node(i), k) * f[i];
    return sum * g.dr();
}

double weighted_norm(const RadialGrid& g, const Field& f, double k, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : f.values) m = std::max(m, std::abs(x));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("weighted_norm: p must be >= 1");
    std::vector<double> pw(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) pw[i] = std::pow(std::abs(f[i]), p);
    return std::pow(weighted_integral(g, Field(std::move(pw), f.label), k), 1.0 / p);
}

double interp_linear(const RadialGrid& g, const std::vector<double>& f, double r) {
    const int n = g.size();
    const double rc = std::clamp(r, g.a(), g.R());
    double s = (rc - g.a()) / g.dr();
    int i = static_cast<int>(s);
    if (i >= n - 1) return f[n - 1];
    if (i < 0) i = 0;
    const double w = s - i;
    return (1.0 - w) * f[i] + w * f[i + 1];
}

double interp_linear(const RadialGrid& g, const Field& f, double r) {
    return interp_linear(g, f.values, r);
}

} // namespace rcns
