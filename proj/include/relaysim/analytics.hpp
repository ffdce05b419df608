// Closed-form anonymity predictions for Clover against an eavesdropper using
// the first-spy estimator, plus the two proxy-hop models.
//
// Symbols: R reachable nodes, S adversarial reachable nodes, O outbound degree,
// a adversarial outbound peers of the focal node, p diffusion probability,
// g transactions generated per node.

#pragma once

#include <stdexcept>

namespace relaysim::analytics {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Chance that a new transaction's first proxy is adversarial: S/R.
double adversarial_proxy_probability(double S, double R);

// Average number of proxy transactions a node receives from honest outbound
// peers: g(1-p)/p * (O-a)/O.
double mixing_set_size(double g, double p, double O, double a);

struct FlowRates {
    double sigma_O;  // sent to each outbound peer
    double rho_O;    // received from each outbound peer
    double sigma_I;  // sent to each inbound peer
    double rho_I;    // received from each inbound peer
};

// Steady-state per-peer proxy flows, solved from the relay balance equations.
FlowRates flow_rates(double g, double p, double O);

// Precision against proxy transactions received from one node: p / (1 - a(1-p)/O).
double d_proxy(double p, double O, double a);

// Overall first-spy precision: S/R.
double d_overall(double S, double R);

// Fitted relation from measurements: (1-p)/0.15.
double expected_hops_empirical(double p);

// Untruncated chain: one creator hop, then a diffusion coin every second hop.
// 1 + 2(1-p)/p proxy transmissions.
double expected_hops_geometric(double p);

}  // namespace relaysim::analytics
