#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qkd/rng.hpp"

namespace qkd {

enum class Protocol { BB84, SARG };

// Measurement/preparation basis of the phase encoder: Z = {0, pi},
// X = {pi/2, 3pi/2}.
enum class Basis { Z, X };

// Receiver layout: one interferometer with an active basis switch (two
// detectors) or a passive splitter feeding one interferometer per basis
// (four detectors, two per basis).
enum class Receiver { TwoDetector, FourDetector };

// Output port of an interferometer.  D1 is the port a bit-0 state interferes
// into when the bases match; D2 the bit-1 port.
enum class DetectorId { D1, D2 };

enum class ClickOrigin { Signal, Dark, Afterpulse };

struct QubitState {
  Basis basis = Basis::Z;
  int bit = 0;  // 0 or 1
  auto operator<=>(const QubitState&) const = default;
};

Basis other_basis(Basis b);

// Relative phase Alice encodes between the two time bins.
double state_phase_rad(QubitState s);

// States are distinguishable only within a basis.
bool orthogonal(QubitState a, QubitState b);

// The bit value a SARG state contributes to the key: basis membership
// (Z -> 0, X -> 1).  In SARG the announced pair straddles both bases, so the
// basis of the inferred state -- not its encoding-bit index -- is the one bit
// of information the sifting actually pins down.
int sarg_key_bit(QubitState s);

struct Preparation {
  QubitState state;
  // SARG announcement: the decoy state paired with the sent one, always in
  // the opposite basis.  Unused for BB84.
  int sarg_partner_bit = 0;

  QubitState announced_partner() const {
    return {other_basis(state.basis), sarg_partner_bit};
  }
};

// Draw one preparation: uniform basis and bit, plus (for SARG) a uniform
// partner bit.  Consumes 2 or 3 Bernoulli draws in that order.
Preparation prepare(Protocol protocol, CounterRng& rng);

// Probability of a click in (D1, D2) when `prep` meets Bob's interferometer
// set to `measured`: p_D1 = (1 + V cos(phi_A - phi_B)) / 2 with visibility V.
std::pair<double, double> click_probabilities(QubitState prep, Basis measured,
                                              double visibility);

// One detection event after gating, as the protocol layer sees it.
struct Click {
  Basis basis = Basis::Z;  // interferometer the click came from
  DetectorId detector = DetectorId::D1;
  ClickOrigin origin = ClickOrigin::Signal;
  double time_ps = 0.0;  // relative to the slot centre
  auto operator<=>(const Click&) const = default;
};

// Squash a slot with multiple clicks to a single outcome: none for an empty
// slot, the click itself for one, a uniformly random one otherwise (consumes
// one draw only in the multi-click case).  Returns the index of the winner.
std::optional<std::size_t> resolve_slot(const std::vector<Click>& clicks,
                                        CounterRng& rng);

// BB84 sifting for one resolved outcome.  Kept only when the measured basis
// equals the prepared one; returns (alice_bit, bob_bit).
std::optional<std::pair<int, int>> sift_bb84(const Preparation& prep,
                                             Basis measured, DetectorId det);

// SARG inference from the announced pair alone: the outcome state excludes
// (is orthogonal to) at most one announced state; if it excludes one, the
// other is the inferred preparation.  Symmetric in (a, b) -- the inference
// must not depend on which announced state was actually sent.
std::optional<QubitState> sarg_infer(QubitState a, QubitState b,
                                     QubitState outcome);

// SARG sifting for one resolved outcome: conclusive iff the measured state
// excludes one announced state.  Returns (alice_bit, bob_bit) as basis bits;
// inferring the partner instead of the sent state is an error event.
std::optional<std::pair<int, int>> sift_sarg(const Preparation& prep,
                                             Basis measured, DetectorId det);

}  // namespace qkd
