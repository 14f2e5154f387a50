#include "rcns/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcns {

double velocity_bump(double r, double amplitude, double lo, double hi) {
    const double s = (2.0 * r - (lo + hi)) / (hi - lo);
    if (std::abs(s) >= 1.0) return 0.0;
    return amplitude * std::exp(-1.0 / (1.0 - s * s));
}

Field load_profile_csv(const std::string& path, const RadialGrid& g,
                       const std::string& label) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile table: " + path);
    std::vector<double> rs, vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
            throw std::runtime_error("profile table row needs two columns: " + line);
        rs.push_back(std::strtod(a.c_str(), nullptr));
        vals.push_back(std::strtod(b.c_str(), nullptr));
    }
    if (rs.size() < 2) throw std::runtime_error("profile table needs at least two rows");
    for (std::size_t i = 1; i < rs.size(); ++i)
        if (rs[i] <= rs[i - 1])
            throw std::runtime_error("profile table radii must increase");

    std::vector<double> out(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const double r = g.node(i);
        if (r <= rs.front()) {
            out[i] = vals.front();
        } else if (r >= rs.back()) {
            out[i] = vals.back();
        } else {
            auto it = std::upper_bound(rs.begin(), rs.end(), r);
            const std::size_t j = static_cast<std::size_t>(it - rs.begin()) - 1;
            const double w = (r - rs[j]) / (rs[j + 1] - rs[j]);
            out[i] = (1.0 - w) * vals[j] + w * vals[j + 1];
        }
    }
    return Field(std::move(out), label);
}

FluidState build(const InitSpec& spec, const RadialGrid& g, const ModelParams& p) {
    p.require_valid();
    const int n = g.size();

    if (spec.kind == InitKind::PowerLaw && spec.require_global_regime &&
        !(spec.sigma > 0.5 * p.d)) {
        throw std::invalid_argument(
            "initial data: power-law decay needs sigma > d/2 in the global regime");
    }
    const bool has_bump = spec.kind != InitKind::Custom || spec.u_file.empty();
    if (has_bump && spec.u_amplitude != 0.0) {
        if (!(spec.u_support_lo > g.a() && spec.u_support_hi < g.R() &&
              spec.u_support_hi > spec.u_support_lo))
            throw std::invalid_argument(
                "initial data: velocity support must lie strictly inside (a, R)");
    }

    std::vector<double> rho(n), u(n);
    switch (spec.kind) {
        case InitKind::PowerLaw:
            for (int i = 0; i < n; ++i)
                rho[i] = 1.0 / (1.0 + std::pow(g.node(i), 2.0 * spec.sigma));
            break;
        case InitKind::Exponential:
            for (int i = 0; i < n; ++i) rho[i] = std::exp(-g.node(i));
            break;
        case InitKind::Custom: {
            Field tbl = load_profile_csv(spec.rho_file, g, "rho0");
            rho = std::move(tbl.values);
            break;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!(rho[i] > 0.0))
            throw std::invalid_argument("initial data: rho0 must be strictly positive (node " +
                                        std::to_string(i) + ")");
    }

    if (spec.kind == InitKind::Custom && !spec.u_file.empty()) {
        Field tbl = load_profile_csv(spec.u_file, g, "u0");
        u = std::move(tbl.values);
        if (u.front() != 0.0)
            throw std::invalid_argument("initial data: u0(a) must vanish");
    } else {
        for (int i = 0; i < n; ++i)
            u[i] = velocity_bump(g.node(i), spec.u_amplitude, spec.u_support_lo,
                                 spec.u_support_hi);
        u[0] = 0.0; // support is interior, the wall value vanishes identically
    }

    FluidState s;
    s.t = 0.0;
    s.rho = Field(std::move(rho), "rho");
    s.u = Field(std::move(u), "u");
    refresh_derived(s, p, g, Formulation::Conservative);
    return s;
}

} // namespace rcns
