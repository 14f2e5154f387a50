#include "rcns/model.hpp"

#include <cmath>
#include <stdexcept>

namespace rcns {

std::vector<std::string> ModelParams::validate() const {
    std::vector<std::string> errs;
    // A = 0 switches the pressure off; admitted for dissipation-only runs
    if (!(A >= 0.0)) errs.push_back("entropy constant A must be non-negative");
    if (!(gamma > 1.0)) errs.push_back("adiabatic exponent gamma must exceed 1");
    if (!(alpha > 0.0)) errs.push_back("viscosity constant alpha must be positive");
    if (beta != 0.0) errs.push_back("bulk viscosity constant beta must be 0");
    if (d != 2 && d != 3) errs.push_back("spatial dimension d must be 2 or 3");
    if (m != d - 1) errs.push_back("weight exponent m must equal d - 1");
    return errs;
}

void ModelParams::require_valid() const {
    auto errs = validate();
    if (errs.empty()) return;
    std::string msg = "invalid model parameters:";
    for (const auto& e : errs) msg += " " + e + ";";
    throw std::invalid_argument(msg);
}

ModelParams variant_params(ShallowVariant variant) {
    // Height plays the role of density and the surface-pressure term grad h^2
    // fixes A = 1, gamma = 2 in every variant.
    ModelParams p;
    p.A = 1.0;
    p.gamma = 2.0;
    p.beta = 0.0;
    p.d = 2;
    p.m = 1;
    switch (variant) {
        case ShallowVariant::DivHD: p.alpha = 0.5; break;
        case ShallowVariant::Div2HD: p.alpha = 1.0; break;
        case ShallowVariant::DivHGrad: p.alpha = 0.5; break;
    }
    return p;
}

const char* to_string(ShallowVariant variant) {
    switch (variant) {
        case ShallowVariant::DivHD: return "div_h_d";
        case ShallowVariant::Div2HD: return "div_2h_d";
        case ShallowVariant::DivHGrad: return "div_h_grad";
    }
    return "?";
}

double pressure(const ModelParams& p, double rho) {
    if (rho < 0.0) throw std::domain_error("pressure: negative density");
    return p.A * std::pow(rho, p.gamma);
}

double phi_of_rho(const ModelParams& p, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("phi_of_rho: density must be positive");
    return p.A * p.gamma / (p.gamma - 1.0) * std::pow(rho, p.gamma - 1.0);
}

double rho_of_phi(const ModelParams& p, double phi) {
    if (!(phi > 0.0)) throw std::domain_error("rho_of_phi: phi must be positive");
    return std::pow((p.gamma - 1.0) * phi / (p.A * p.gamma), 1.0 / (p.gamma - 1.0));
}

double sound_speed(const ModelParams& p, double rho) {
    if (rho < 0.0) throw std::domain_error("sound_speed: negative density");
    return std::sqrt(p.A * p.gamma * std::pow(rho, p.gamma - 1.0));
}

Field effective_velocity(const ModelParams& p, const Field& rho, const Field& u,
                         const DerivOp& ddr_op) {
    if (rho.size() != u.size())
        throw std::invalid_argument("effective_velocity: rho/u length mismatch");
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] < kRhoPositivityGuard) {
            throw std::domain_error("effective_velocity: density below positivity guard at node " +
                                    std::to_string(i));
        }
    }
    Field drho = ddr_op(rho);
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        v[i] = u[i] + 2.0 * p.alpha * drho[i] / rho[i];
    return Field(std::move(v), "v");
}

} // namespace rcns
