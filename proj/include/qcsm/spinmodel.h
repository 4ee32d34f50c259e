#ifndef QCSM_SPINMODEL_H
#define QCSM_SPINMODEL_H

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qcsm/gauge.h"

namespace qcsm {

// Single-qubit error channel, either general {P(I),P(X),P(Y),P(Z)} or an
// independent X-Z product channel.
struct NoiseChannel {
    bool independent_xz = true;
    double px = 0, pz = 0;        // independent_xz
    double p[4] = {1, 0, 0, 0};   // I,X,Y,Z (filled in both modes)

    static NoiseChannel independent(double px, double pz);
    static NoiseChannel general(double pi, double px, double py, double pz);
};

class DegenerateChannelError : public std::runtime_error {
   public:
    explicit DegenerateChannelError(const std::string &msg) : std::runtime_error(msg) {}
};

// Nishimori couplings K(alpha) = 1/4 sum_Q ln[P(Q)] <<alpha,Q>>.
// Throws DegenerateChannelError on zero probabilities unless allow_limits,
// in which case +-inf sentinels are returned.
struct NishimoriCouplings {
    double KI, KX, KY, KZ;  // indexed by alpha = I,X,Y,Z
};
NishimoriCouplings nishimori_couplings(const NoiseChannel &channel, bool allow_limits = false);

// Probability that an odd number of errors hits a component with x X-slots
// and z Z-slots: (1 - (1-2px)^x (1-2pz)^z) / 2.
double effective_probability(int x, int z, double px, double pz);
// K = ln((1-p_eff)/p_eff)/2; +inf when p_eff == 0, -inf when p_eff == 1.
double effective_coupling(int x, int z, double px, double pz);
double coupling_from_probability(double p_eff);

class UnsupportedDegreeError : public std::runtime_error {
   public:
    explicit UnsupportedDegreeError(const std::string &msg) : std::runtime_error(msg) {}
};

// Integrating one spin out of r touching interactions: r=1 removes the term,
// r=2 merges the pair with coupling ln[cosh(K1+K2)/cosh|K1-K2|]/2.
// r>=3 throws UnsupportedDegreeError.
std::vector<double> walsh_integrate(const std::vector<double> &couplings);

// One spacetime error slot grouped into an interaction. `test` is the Pauli
// (1=X,2=Z,3=Y) whose scalar commutator with the error realizes the slot's
// sign; under independent X-Z noise, test Z tracks X errors and vice versa.
struct Member {
    uint8_t test;
    int qubit;
    int layer;
    bool operator==(const Member &other) const = default;
};

struct Interaction {
    std::vector<int> spins;       // sorted spin indices; empty => constant term
    std::vector<Member> members;
    int wx = 0, wz = 0;           // error-flavor slot counts (independent X-Z)
    double p_eff = 0;             // odd-parity probability (independent X-Z)
    double coupling = 0;          // K; +-inf marks a hard constraint
    double lw_plus = 0;           // log-weight when eta * prod(sigma) = +1
    double lw_minus = 0;          // log-weight when eta * prod(sigma) = -1

    bool is_constant() const {
        return spins.empty();
    }
};

struct SpinModel {
    int num_spins = 0;
    std::vector<Interaction> interactions;
    NoiseChannel channel;
    bool independent_xz = true;
    double log_norm = 0;    // general channels: sites * K(I)
    double log_offset = 0;  // constant from integrated-out free spins
    // Spin k's generator index in the compiling basis (for symmetry lookups).
    std::vector<int> generator_of_spin;
    bool has_css_split = false;
    std::vector<int8_t> interaction_side;  // 0 = H_X, 1 = H_Z (css only)
    std::vector<int8_t> spin_side;         // css only

    // (flavor 'X'/'Z', qubit, layer) -> interaction index, from member slots.
    std::map<std::tuple<char, int, int>, int> location_index() const;
    int count_constant_terms() const;
    bool has_infinite_coupling() const;
};

// One spin per gauge generator, one weight-1 interaction per (flavor, site).
// General channels are supported without a CSS split.
SpinModel build_hamiltonian(const GaugeBasis &basis, const NoiseChannel &channel);

// Integrates out degree-1 and degree-2 spins until none remain, grouping
// gauge-equivalent error slots into weighted interactions. Partition-function
// ratios between disorder realizations are preserved exactly. Requires an
// independent X-Z channel.
SpinModel simplify(const SpinModel &model);

// -sum_c K_c eta_c prod_{k in Xi_c} sigma_k over all interactions (constants
// included). Violated infinite-coupling constraints give +inf.
double energy(const SpinModel &model, const std::vector<int8_t> &eta,
              const std::vector<int8_t> &sigma);

// Restriction of interaction sign flips to a spin subset surviving in
// `model`, given generator indices of a recorded gauge symmetry.
std::vector<int> symmetry_spins_in_model(const SpinModel &model, const std::vector<int> &generator_indices);

// All local Z2 gauge symmetries of a compiled model: a basis of spin subsets
// leaving every interaction product invariant (the kernel of the
// interaction-spin incidence matrix), preferring minimum-weight elements on
// small spacetime windows. Detector cells appear as local flip sets.
std::vector<std::vector<int>> model_symmetries(const SpinModel &model);

}  // namespace qcsm

#endif
