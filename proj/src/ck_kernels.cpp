// Chapman-Kolmogorov residual kernels: a serial reference loop and the
// OpenMP version. Both reduce through reduce_ck in sampling order, so their
// reports are identical.

#include "cea/chain.hpp"

namespace cea {

namespace {

TripleOutcome check_triple(const ChainFamily& chain, const Triple& tr) {
  TripleOutcome o;
  o.triple = tr;
  o.regime = regime_label(chain.thresholds(), tr);
  try {
    const CkResidual r = ck_residuals(chain, tr);
    o.residual = r.relative;
    o.abs_residual = r.absolute;
  } catch (const DomainError& e) {
    o.error = e.what();
  }
  return o;
}

}  // namespace

CkReport verify_ck_serial(const ChainFamily& chain, const std::vector<Triple>& triples, double tol) {
  std::vector<TripleOutcome> outcomes;
  outcomes.reserve(triples.size());
  for (const auto& tr : triples) outcomes.push_back(check_triple(chain, tr));
  return reduce_ck(std::move(outcomes), tol);
}

CkReport verify_ck(const ChainFamily& chain, const std::vector<Triple>& triples, double tol) {
  std::vector<TripleOutcome> outcomes(triples.size());
  const auto count = static_cast<long>(triples.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) {
    outcomes[k] = check_triple(chain, triples[k]);
  }
  return reduce_ck(std::move(outcomes), tol);
}

}  // namespace cea
