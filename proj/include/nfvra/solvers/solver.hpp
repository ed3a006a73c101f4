#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "nfvra/embedding.hpp"
#include "nfvra/network.hpp"

namespace nfvra {

// One embedding decision: a request against an immutable substrate snapshot.
// `seed` drives stochastic solvers; the simulator derives it from the run
// seed and the request id.
struct Instance {
  const VirtualNetworkRequest& vn;
  const PhysicalNetwork& pn;
  std::uint64_t seed = 0;
  std::size_t k_paths = kDefaultPathCount;
};

class Solver {
 public:
  virtual ~Solver() = default;
  virtual std::string name() const = 0;
  virtual Solution solve(const Instance& instance) const = 0;
};

// Routes a complete node mapping on a private copy of the snapshot.
inline Solution complete_mapping(const Instance& in, std::span<const NodeId> mapping,
                                 const EmbeddingOrder& order) {
  PhysicalNetwork scratch = in.pn;
  return embed_mapping(scratch, in.vn, mapping, order, in.k_paths);
}

inline Solution infeasible(const VirtualNetworkRequest& vn, FailureReason reason) {
  Solution s = Solution::empty_for(vn);
  s.fail(reason);
  finalize(vn, s);
  return s;
}

}  // namespace nfvra
