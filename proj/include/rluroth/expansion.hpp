#pragma once

#include "rluroth/core.hpp"
#include "rluroth/omega.hpp"

#include <vector>

namespace rluroth {

/// The data of a c-Luroth expansion. Entry i of every sequence belongs to
/// step i + 1; orbit[i] is the point after that step.
template <Scalar S>
struct ExpansionRecord {
  S start{};
  std::vector<int> omega_used;
  std::vector<SignDigit> digits;
  std::vector<Branch> branches;
  std::vector<S> orbit;
  std::vector<Convergent> convergents;
  std::vector<double> thetas;

  std::size_t size() const { return digits.size(); }
};

/// Iterates the skew product L_c for n_steps, one omega bit per step.
template <Scalar S>
ExpansionRecord<S> expand(OmegaSource& source, const S& x, const CutGeometry& geo,
                          std::size_t n_steps);

template <Scalar S>
ExpansionRecord<S> expand(OmegaSource& source, const S& x, const Params& params,
                          std::size_t n_steps) {
  return expand(source, x, CutGeometry(params.c), n_steps);
}

extern template ExpansionRecord<BigRational> expand(OmegaSource&, const BigRational&,
                                                    const CutGeometry&, std::size_t);
extern template ExpansionRecord<double> expand(OmegaSource&, const double&, const CutGeometry&,
                                               std::size_t);

}  // namespace rluroth
