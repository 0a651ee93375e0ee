#include "qkd/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "qkd/constants.hpp"

namespace qkd {

Basis other_basis(Basis b) { return b == Basis::Z ? Basis::X : Basis::Z; }

double state_phase_rad(QubitState s) {
  // Z: {0, pi}; X: {pi/2, 3pi/2}.
  const double base = s.basis == Basis::Z ? 0.0 : kPi / 2.0;
  return base + s.bit * kPi;
}

bool orthogonal(QubitState a, QubitState b) {
  return a.basis == b.basis && a.bit != b.bit;
}

int sarg_key_bit(QubitState s) { return s.basis == Basis::Z ? 0 : 1; }

Preparation prepare(Protocol protocol, CounterRng& rng) {
  Preparation prep;
  prep.state.basis = rng.bernoulli(0.5) ? Basis::X : Basis::Z;
  prep.state.bit = rng.bernoulli(0.5) ? 1 : 0;
  if (protocol == Protocol::SARG)
    prep.sarg_partner_bit = rng.bernoulli(0.5) ? 1 : 0;
  return prep;
}

std::pair<double, double> click_probabilities(QubitState prep, Basis measured,
                                              double visibility) {
  if (visibility < 0.0 || visibility > 1.0)
    throw std::invalid_argument("visibility must be in [0, 1]");
  const double phi_b = measured == Basis::Z ? 0.0 : kPi / 2.0;
  const double p1 =
      0.5 * (1.0 + visibility * std::cos(state_phase_rad(prep) - phi_b));
  return {p1, 1.0 - p1};
}

std::optional<std::size_t> resolve_slot(const std::vector<Click>& clicks,
                                        CounterRng& rng) {
  if (clicks.empty()) return std::nullopt;
  if (clicks.size() == 1) return 0;
  const auto n = clicks.size();
  auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
  if (idx >= n) idx = n - 1;  // guard the u -> 1 edge
  return idx;
}

std::optional<std::pair<int, int>> sift_bb84(const Preparation& prep,
                                             Basis measured, DetectorId det) {
  if (measured != prep.state.basis) return std::nullopt;
  const int bob_bit = det == DetectorId::D1 ? 0 : 1;
  return std::make_pair(prep.state.bit, bob_bit);
}

std::optional<QubitState> sarg_infer(QubitState a, QubitState b,
                                     QubitState outcome) {
  // The announced states sit in opposite bases, so the outcome can be
  // orthogonal to at most one of them.
  if (orthogonal(outcome, a)) return b;
  if (orthogonal(outcome, b)) return a;
  return std::nullopt;
}

std::optional<std::pair<int, int>> sift_sarg(const Preparation& prep,
                                             Basis measured, DetectorId det) {
  const QubitState outcome{measured, det == DetectorId::D1 ? 0 : 1};
  const auto inferred =
      sarg_infer(prep.state, prep.announced_partner(), outcome);
  if (!inferred) return std::nullopt;
  return std::make_pair(sarg_key_bit(prep.state), sarg_key_bit(*inferred));
}

}  // namespace qkd
