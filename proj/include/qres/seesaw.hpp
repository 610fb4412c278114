#pragma once

#include "qres/robustness.hpp"

namespace qres {

// Alternating (bilinear) decomposition searches. Each returns a feasible
// free-model decomposition, hence an upper bound; restarts are seeded and the
// best value wins (ties to the lowest restart index).

RobustnessResult seesaw_teleport_choi(const Povm& ma, const HermitianOperator& rho, const RobustnessSettings& cfg);
RobustnessResult seesaw_buscemi(const DistributedPovm& mab, const RobustnessSettings& cfg);
RobustnessResult seesaw_incompat_generalised(const GeneralisedMeasurementSet& gset, const RobustnessSettings& cfg);
RobustnessResult seesaw_behaviour(const Behaviour& b, const RobustnessSettings& cfg);

} // namespace qres
