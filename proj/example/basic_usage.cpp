// Encode one stripe on six simulated devices, lose two, repair them jointly
// and read the data back from a different pair.

#include <cstdio>
#include <random>

#include "xmbcr/cluster.hpp"
#include "xmbcr/codec.hpp"
#include "xmbcr/repair.hpp"

int main() {
  using namespace xmbcr;

  const CodeParams params = derive_params(/*n=*/6, /*k=*/2, /*d=*/4, /*t=*/2);
  const CodeMatrices matrices = build_code_matrices(params);
  std::printf("alpha=%zu beta=%zu beta'=%zu M=%zu\n", params.alpha, params.beta, params.beta_prime,
              params.file_blocks);

  std::mt19937 rng(7);
  std::vector<Block> payload(params.file_blocks, Block(64));
  for (auto& block : payload)
    for (auto& byte : block) byte = static_cast<std::uint8_t>(rng());

  Cluster cluster = Cluster::create(encode_stripe(payload, matrices, params), params);
  cluster.fail({0, 1});

  const std::vector<DeviceId> failed{0, 1};
  const TransferLedger ledger = execute_repair(cluster, plan_repair(failed, params));
  for (DeviceId id : failed) std::printf("device %zu received %zu blocks\n", id, ledger.inbound(id));

  const std::vector<DeviceId> readers{3, 5};
  const bool ok = decode_from_cluster(cluster, readers) == payload;
  std::printf("decode from {3,5}: %s\n", ok ? "ok" : "MISMATCH");
  return ok ? 0 : 1;
}
