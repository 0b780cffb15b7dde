#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xmbcr/cluster.hpp"
#include "xmbcr/codec.hpp"
#include "xmbcr/error.hpp"
#include "xmbcr/matrix.hpp"
#include "xmbcr/params.hpp"

namespace xmbcr {

enum class TransferKind {
  StoredSecondary,  // a block read as stored
  Contribution,     // computed at the sender from its primary vector
};

struct PlannedTransfer {
  DeviceId from = 0;
  DeviceId to = 0;
  std::size_t slot = 0;
  TransferKind kind = TransferKind::StoredSecondary;
  Phase phase = Phase::Phase1;

  friend bool operator==(const PlannedTransfer&, const PlannedTransfer&) = default;
};

/// Two-phase schedule for repairing `failed` jointly.
///
/// Phase 1: each newcomer i reads, from each helper c, the stored slot
/// (i - c) mod n, i.e. c's image of w_i, and inverts d columns of phi.
/// Phase 2: for each slot m the owner of w_{(i+m) mod n} computes the image
/// and sends it. With |failed| == t that is every helper plus every other
/// newcomer. With fewer failures the remaining live devices (`spare`) own
/// the rest of the slots.
struct RepairPlan {
  std::vector<DeviceId> failed;
  std::vector<DeviceId> helpers;
  std::vector<DeviceId> spare;
  std::vector<PlannedTransfer> transfers;

  std::size_t count(DeviceId to, Phase phase) const {
    return static_cast<std::size_t>(std::count_if(transfers.begin(), transfers.end(), [&](const PlannedTransfer& x) {
      return x.to == to && x.phase == phase;
    }));
  }
};

inline RepairPlan plan_repair(std::span<const DeviceId> failed_ids, const CodeParams& p) {
  RepairPlan plan;
  plan.failed.assign(failed_ids.begin(), failed_ids.end());
  std::sort(plan.failed.begin(), plan.failed.end());
  plan.failed.erase(std::unique(plan.failed.begin(), plan.failed.end()), plan.failed.end());

  if (plan.failed.empty()) throw Error(Errc::NoFailures, "nothing to repair");
  for (DeviceId id : plan.failed)
    if (id >= p.n) throw Error(Errc::UnknownDevice, "device " + std::to_string(id));
  if (plan.failed.size() > p.t) {
    throw Error(Errc::TooManyFailures, std::to_string(plan.failed.size()) + " failures exceed t=" + std::to_string(p.t));
  }

  std::vector<bool> is_failed(p.n, false);
  for (DeviceId id : plan.failed) is_failed[id] = true;
  for (DeviceId id = 0; id < p.n; ++id) {
    if (is_failed[id]) continue;
    (plan.helpers.size() < p.d ? plan.helpers : plan.spare).push_back(id);
  }

  for (DeviceId i : plan.failed)
    for (DeviceId c : plan.helpers) plan.transfers.push_back({c, i, slot_for(c, i, p.n), TransferKind::StoredSecondary, Phase::Phase1});
  for (DeviceId i : plan.failed)
    for (std::size_t m = 1; m < p.n; ++m)
      plan.transfers.push_back({slot_owner(i, m, p.n), i, m, TransferKind::Contribution, Phase::Phase2});
  return plan;
}

struct SlotBlock {
  std::size_t slot = 0;
  Block block;
};

/// Rebuilds w_newcomer from d images phi_m^T w_newcomer with distinct slots m.
inline std::vector<Block> phase1_reconstruct_primary(DeviceId newcomer, std::span<const SlotBlock> fetched,
                                                     const CodeMatrices& mx, const CodeParams& p) {
  if (newcomer >= p.n) throw Error(Errc::UnknownDevice, "device " + std::to_string(newcomer));
  if (fetched.size() != p.d) {
    throw Error(Errc::WrongSlotCount, "need " + std::to_string(p.d) + " images, got " + std::to_string(fetched.size()));
  }
  std::vector<std::size_t> columns;
  std::vector<Block> observed;
  std::vector<bool> used(p.n, false);
  for (const SlotBlock& f : fetched) {
    if (f.slot < 1 || f.slot >= p.n) throw Error(Errc::BadSlot, "slot " + std::to_string(f.slot));
    if (used[f.slot]) throw Error(Errc::WrongSlotCount, "slot " + std::to_string(f.slot) + " supplied twice");
    used[f.slot] = true;
    columns.push_back(f.slot - 1);
    observed.push_back(f.block);
  }
  return mat_vec_blocks(invert(mx.phi.select_columns(columns).transposed()), observed);
}

/// Assembles the repaired share from the rebuilt primary vector and one
/// contribution per secondary slot (index m-1 holds slot m). When `reference`
/// is given every slot is cross-checked against it.
inline DeviceShare phase2_regenerate_secondary(DeviceId newcomer, std::vector<Block> own_w,
                                               std::span<const std::optional<Block>> contributions,
                                               const CodeParams& p, const DeviceShare* reference = nullptr) {
  if (contributions.size() != p.n - 1) {
    throw Error(Errc::MissingSlot, "expected " + std::to_string(p.n - 1) + " contributions, got " +
                                       std::to_string(contributions.size()));
  }
  DeviceShare share;
  share.device_id = newcomer;
  share.primary = std::move(own_w);
  for (std::size_t m = 1; m < p.n; ++m) {
    const auto& c = contributions[m - 1];
    if (!c) throw Error(Errc::MissingSlot, "slot " + std::to_string(m) + " of device " + std::to_string(newcomer));
    if (reference && reference->slot(m) != *c) {
      throw Error(Errc::InconsistentContribution, "slot " + std::to_string(m) + " of device " + std::to_string(newcomer));
    }
    share.secondary.push_back(*c);
  }
  check_share_shape(share, p);
  return share;
}

/// Runs `plan` against `cluster`, installs the repaired shares and returns the
/// ledger records produced by this repair.
inline TransferLedger execute_repair(Cluster& cluster, const RepairPlan& plan) {
  const CodeParams& p = cluster.params();
  const CodeMatrices& mx = cluster.matrices();
  for (DeviceId id : plan.failed)
    if (cluster.state(id) != DeviceState::Failed) throw Error(Errc::ShapeError, "device " + std::to_string(id) + " is not failed");
  for (DeviceId id : plan.helpers)
    if (cluster.state(id) != DeviceState::Alive) throw Error(Errc::DeviceFailed, "helper " + std::to_string(id));
  if (plan.helpers.size() != p.d) throw Error(Errc::ShapeError, "plan must name exactly d helpers");

  const std::size_t ledger_start = cluster.ledger().size();

  // Every newcomer finishes phase 1 before any phase 2 exchange.
  std::vector<std::vector<Block>> rebuilt;
  for (DeviceId i : plan.failed) {
    std::vector<SlotBlock> fetched;
    for (const PlannedTransfer& x : plan.transfers) {
      if (x.to != i || x.phase != Phase::Phase1) continue;
      fetched.push_back({x.slot, cluster.fetch_block(x.from, i, SecondarySlot{x.slot}, Phase::Phase1)});
    }
    rebuilt.push_back(phase1_reconstruct_primary(i, fetched, mx, p));
    cluster.begin_recovery(i, rebuilt.back());
  }

  std::vector<DeviceShare> repaired;
  for (std::size_t idx = 0; idx < plan.failed.size(); ++idx) {
    const DeviceId i = plan.failed[idx];
    std::vector<std::optional<Block>> contributions(p.n - 1);
    for (const PlannedTransfer& x : plan.transfers) {
      if (x.to != i || x.phase != Phase::Phase2) continue;
      contributions[x.slot - 1] = cluster.fetch_block(x.from, i, Contribution{x.slot}, Phase::Phase2);
    }
    repaired.push_back(phase2_regenerate_secondary(i, std::move(rebuilt[idx]), contributions, p));
  }
  for (DeviceShare& s : repaired) cluster.install(std::move(s));
  return cluster.ledger().since(ledger_start);
}

}  // namespace xmbcr
