#include "rcns/reconstruct.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rcns {

namespace {

double radius(const Vec& x, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

void check_point(const Vec& x, const RadialGrid& g, int d) {
    const double r = radius(x, d);
    if (r < g.a()) throw std::invalid_argument("cartesian sample point with |x| < a");
    if (r > g.R() * (1.0 + 1e-12))
        throw std::invalid_argument("cartesian sample point beyond the truncation radius");
}

} // namespace

double GradientTensors::div_U(int d) const {
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += grad_U[i][i];
    return tr;
}

CartesianSample to_cartesian(const FluidState& s, const RadialGrid& g,
                             const std::vector<Vec>& points, int d) {
    if (d != 2 && d != 3) throw std::invalid_argument("to_cartesian: d must be 2 or 3");
    CartesianSample out;
    out.d = d;
    out.points = points;
    out.rho_values.reserve(points.size());
    out.U_vectors.reserve(points.size());
    for (const auto& x : points) {
        check_point(x, g, d);
        const double r = radius(x, d);
        const double rho = interp_linear(g, s.rho, r);
        const double u = interp_linear(g, s.u, r);
        Vec U{0.0, 0.0, 0.0};
        for (int i = 0; i < d; ++i) U[i] = u * x[i] / r;
        out.rho_values.push_back(rho);
        out.U_vectors.push_back(U);
    }
    return out;
}

CartesianSample cartesian_gradient(const FluidState& s, const RadialGrid& g,
                                   const std::vector<Vec>& points, int d) {
    CartesianSample out = to_cartesian(s, g, points, d);
    Field du = ddr(g, s.u);
    Field d2u = d2dr2(g, s.u);
    Field drho = ddr(g, s.rho);

    out.gradients.reserve(points.size());
    for (const auto& x : points) {
        const double r = radius(x, d);
        const double u = interp_linear(g, s.u, r);
        const double ur = interp_linear(g, du, r);
        const double urr = interp_linear(g, d2u, r);
        const double rhor = interp_linear(g, drho, r);

        GradientTensors t;
        const double r2 = r * r, r3 = r2 * r, r4 = r2 * r2, r5 = r4 * r;
        for (int i = 0; i < d; ++i) t.grad_rho[i] = rhor * x[i] / r;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const double dij = (i == j) ? 1.0 : 0.0;
                t.grad_U[i][j] = ur * x[i] * x[j] / r2 + u * (dij * r2 - x[i] * x[j]) / r3;
            }
        }
        for (int k = 0; k < d; ++k) {
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    const double dij = (i == j) ? 1.0 : 0.0;
                    const double dik = (i == k) ? 1.0 : 0.0;
                    const double djk = (j == k) ? 1.0 : 0.0;
                    t.hess_U[k][i][j] =
                        urr * x[i] * x[j] * x[k] / r3 +
                        ur * ((dij * x[k] + dik * x[j] + djk * x[i]) / r2 -
                              3.0 * x[i] * x[j] * x[k] / r4) +
                        u * (3.0 * x[i] * x[j] * x[k] / r5 -
                             (djk * x[i] + dij * x[k] + dik * x[j]) / r3);
                }
            }
        }
        out.gradients.push_back(t);
    }
    return out;
}

double rotation_equivariance_error(const FluidState& s, const RadialGrid& g, const Mat& H,
                                   const std::vector<Vec>& points, int d) {
    // orthogonality gate: ||H^T H - I||_max <= 1e-12
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double dot = 0.0;
            for (int k = 0; k < d; ++k) dot += H[k][i] * H[k][j];
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - target) > 1e-12)
                throw std::invalid_argument("rotation_equivariance_error: H is not orthogonal");
        }
    }

    std::vector<Vec> rotated(points.size());
    for (std::size_t n = 0; n < points.size(); ++n) {
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += H[i][j] * points[n][j];
            rotated[n][i] = acc;
        }
        for (int i = d; i < 3; ++i) rotated[n][i] = 0.0;
    }

    CartesianSample base = to_cartesian(s, g, points, d);
    CartesianSample rot = to_cartesian(s, g, rotated, d);

    double worst = 0.0;
    for (std::size_t n = 0; n < points.size(); ++n) {
        worst = std::max(worst, std::abs(rot.rho_values[n] - base.rho_values[n]));
        for (int i = 0; i < d; ++i) {
            double back = 0.0; // (H^T U(Hx))_i
            for (int j = 0; j < d; ++j) back += H[j][i] * rot.U_vectors[n][j];
            worst = std::max(worst, std::abs(back - base.U_vectors[n][i]));
        }
    }
    return worst;
}

void write_cartesian_csv(const CartesianSample& sample, std::ostream& sink) {
    for (int i = 0; i < sample.d; ++i) sink << "x" << (i + 1) << ",";
    sink << "rho";
    for (int i = 0; i < sample.d; ++i) sink << ",U" << (i + 1);
    sink << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        sink << buf;
    };
    for (std::size_t n = 0; n < sample.points.size(); ++n) {
        for (int i = 0; i < sample.d; ++i) {
            put(sample.points[n][i]);
            sink << ",";
        }
        put(sample.rho_values[n]);
        for (int i = 0; i < sample.d; ++i) {
            sink << ",";
            put(sample.U_vectors[n][i]);
        }
        sink << "\n";
    }
}

} // namespace rcns
