#pragma once

#include "nfvra/config.hpp"
#include "nfvra/embedding.hpp"
#include "nfvra/environment.hpp"
#include "nfvra/evaluation.hpp"
#include "nfvra/generators.hpp"
#include "nfvra/graph_metrics.hpp"
#include "nfvra/graphml.hpp"
#include "nfvra/metrics.hpp"
#include "nfvra/network.hpp"
#include "nfvra/protocol.hpp"
#include "nfvra/simulator.hpp"
#include "nfvra/solvers/registry.hpp"
#include "nfvra/topology.hpp"

namespace nfvra {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nfvra
