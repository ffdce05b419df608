#include "relaysim/analytics.hpp"

#include <string>

namespace relaysim::analytics {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

void check_probability(double p) { require(p > 0.0 && p <= 1.0, "p must lie in (0, 1]"); }

}  // namespace

double adversarial_proxy_probability(double S, double R) {
    require(R > 0.0, "R must be positive");
    require(S >= 0.0 && S <= R, "S must lie in [0, R]");
    return S / R;
}

double mixing_set_size(double g, double p, double O, double a) {
    check_probability(p);
    require(g >= 0.0, "g must be non-negative");
    require(O > 0.0, "O must be positive");
    require(a >= 0.0 && a <= O, "a must lie in [0, O]");
    return g * (1.0 - p) / p * (O - a) / O;
}

FlowRates flow_rates(double g, double p, double O) {
    check_probability(p);
    require(O > 0.0, "O must be positive");
    FlowRates f{};
    f.sigma_O = g / (O * p);
    f.rho_I = f.sigma_O;
    f.sigma_I = f.rho_I * (1.0 - p);
    f.rho_O = f.sigma_I;
    return f;
}

double d_proxy(double p, double O, double a) {
    check_probability(p);
    require(O > 0.0, "O must be positive");
    require(a >= 0.0 && a <= O, "a must lie in [0, O]");
    // 1 - a(1-p)/O, arranged so that a = 0 and a = O come out exact.
    const double denominator = (O - a) / O + (a / O) * p;
    require(denominator > 0.0, "degenerate d_proxy denominator");
    return p / denominator;
}

double d_overall(double S, double R) { return adversarial_proxy_probability(S, R); }

double expected_hops_empirical(double p) {
    check_probability(p);
    return (1.0 - p) / 0.15;
}

double expected_hops_geometric(double p) {
    check_probability(p);
    return 1.0 + 2.0 * (1.0 - p) / p;
}

}  // namespace relaysim::analytics
