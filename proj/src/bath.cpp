#include "qmpe/bath.hpp"

#include <cmath>
#include <stdexcept>

namespace qmpe {

namespace {

void check_mode(const PseudomodeMode& m, std::size_t i) {
    if (!(m.alpha >= 0.0))
        throw std::invalid_argument("mode " + std::to_string(i) +
                                    ": coupling alpha must be >= 0");
    if (!(m.gamma > 0.0))
        throw std::invalid_argument("mode " + std::to_string(i) +
                                    ": decay gamma must be > 0");
    if (!std::isfinite(m.alpha) || !std::isfinite(m.omega) || !std::isfinite(m.gamma))
        throw std::invalid_argument("mode " + std::to_string(i) +
                                    ": parameters must be finite");
}

}  // namespace

PseudomodeSpec::PseudomodeSpec(double omega0, std::vector<PseudomodeMode> modes)
    : omega0_(omega0), modes_(std::move(modes)) {
    if (!(omega0_ > 0.0) || !std::isfinite(omega0_))
        throw std::invalid_argument("system frequency omega0 must be positive");
    if (modes_.empty())
        throw std::invalid_argument("at least one pseudomode is required");
    for (std::size_t i = 0; i < modes_.size(); ++i) check_mode(modes_[i], i);
}

bool PseudomodeSpec::resonant() const {
    for (const auto& m : modes_)
        if (m.omega != omega0_) return false;
    return true;
}

LorentzianBath::LorentzianBath(double coupling, double width, double omega0)
    : coupling_(coupling), width_(width), omega0_(omega0) {
    if (!(coupling_ >= 0.0) || !std::isfinite(coupling_))
        throw std::invalid_argument("bath coupling must be >= 0");
    if (!(width_ > 0.0) || !std::isfinite(width_))
        throw std::invalid_argument("bath width must be > 0");
    if (!(omega0_ > 0.0) || !std::isfinite(omega0_))
        throw std::invalid_argument("bath centre frequency must be > 0");
}

PseudomodeSpec lorentzian_to_pseudomode(const LorentzianBath& bath) {
    // Lorentzian J(w) with strength Gamma and half-width Lambda maps to a
    // single mode at the line centre: alpha = sqrt(Gamma*Lambda/2),
    // gamma = 2*Lambda.
    PseudomodeMode m;
    m.alpha = std::sqrt(bath.coupling() * bath.width() / 2.0);
    m.omega = bath.omega0();
    m.gamma = 2.0 * bath.width();
    return PseudomodeSpec(bath.omega0(), {m});
}

std::complex<double> correlation_function(const PseudomodeSpec& spec, double t) {
    if (t < 0.0) throw std::invalid_argument("correlation time must be >= 0");
    std::complex<double> c{0.0, 0.0};
    for (const auto& m : spec.modes()) {
        const double amp = m.alpha * m.alpha;
        const double damp = std::exp(-0.5 * m.gamma * t);
        c += amp * damp * std::complex<double>(std::cos(m.omega * t),
                                               -std::sin(m.omega * t));
    }
    return c;
}

std::complex<double> correlation_function(const LorentzianBath& bath, double t) {
    return correlation_function(lorentzian_to_pseudomode(bath), t);
}

}  // namespace qmpe
