#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <initializer_list>
#include <variant>
#include <vector>

#include "xmbcr/codec.hpp"
#include "xmbcr/error.hpp"
#include "xmbcr/matrix.hpp"
#include "xmbcr/params.hpp"

namespace xmbcr {

/// Receiver id for reads made by a client outside the cluster (decode).
inline constexpr DeviceId kClient = std::numeric_limits<DeviceId>::max();

enum class Phase { Phase1, Phase2, Decode };

inline constexpr std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Phase1: return "phase1";
    case Phase::Phase2: return "phase2";
    case Phase::Decode: return "decode";
  }
  return "?";
}

struct TransferRecord {
  DeviceId from = 0;
  DeviceId to = 0;
  std::size_t block_count = 0;
  Phase phase = Phase::Phase1;

  friend bool operator==(const TransferRecord&, const TransferRecord&) = default;
};

struct TransferKey {
  DeviceId from = 0;
  DeviceId to = 0;
  Phase phase = Phase::Phase1;

  friend auto operator<=>(const TransferKey&, const TransferKey&) = default;
};

/// Append-only log of every block moved between devices.
class TransferLedger {
 public:
  void append(const TransferRecord& r) {
    if (r.block_count < 1) throw Error(Errc::ShapeError, "transfer of zero blocks");
    records_.push_back(r);
  }

  std::span<const TransferRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  std::map<TransferKey, std::size_t> summary() const {
    std::map<TransferKey, std::size_t> out;
    for (const auto& r : records_) out[{r.from, r.to, r.phase}] += r.block_count;
    return out;
  }

  /// Blocks received by `to`, optionally restricted to one phase.
  std::size_t inbound(DeviceId to, std::optional<Phase> phase = std::nullopt) const {
    std::size_t total = 0;
    for (const auto& r : records_)
      if (r.to == to && (!phase || r.phase == *phase)) total += r.block_count;
    return total;
  }

  std::size_t between(DeviceId from, DeviceId to, std::optional<Phase> phase = std::nullopt) const {
    std::size_t total = 0;
    for (const auto& r : records_)
      if (r.from == from && r.to == to && (!phase || r.phase == *phase)) total += r.block_count;
    return total;
  }

  TransferLedger since(std::size_t first) const {
    TransferLedger out;
    for (std::size_t i = first; i < records_.size(); ++i) out.records_.push_back(records_[i]);
    return out;
  }

 private:
  std::vector<TransferRecord> records_;
};

struct PrimaryIndex {
  std::size_t index = 0;
};
struct SecondarySlot {
  std::size_t slot = 0;
};
/// Computed at the sender: phi column slot-1 applied to the sender's primary.
struct Contribution {
  std::size_t slot = 0;
};
using BlockRef = std::variant<PrimaryIndex, SecondarySlot, Contribution>;

enum class DeviceState { Alive, Failed, Recovering };

/// In-memory simulation of n devices. All block movement goes through
/// fetch_block, which meters it into the ledger.
class Cluster {
 public:
  static Cluster create(std::vector<DeviceShare> shares, const CodeParams& params) {
    if (shares.size() != params.n) {
      throw Error(Errc::ShapeError, "expected " + std::to_string(params.n) + " shares, got " +
                                        std::to_string(shares.size()));
    }
    std::vector<std::optional<DeviceShare>> slots;
    for (auto& s : shares) slots.emplace_back(std::move(s));
    return create_partial(std::move(slots), params);
  }

  /// Entries left empty start out Failed.
  static Cluster create_partial(std::vector<std::optional<DeviceShare>> shares, const CodeParams& params,
                                std::optional<MatrixPoints> points = std::nullopt) {
    if (shares.size() != params.n) throw Error(Errc::ShapeError, "share vector must have n entries");
    Cluster c(params, build_code_matrices(params, std::move(points)));
    std::optional<std::size_t> width;
    for (DeviceId i = 0; i < params.n; ++i) {
      if (!shares[i]) continue;
      check_share_shape(*shares[i], params);
      if (shares[i]->device_id != i) throw Error(Errc::ShapeError, "share for device " + std::to_string(i) + " is misplaced");
      const std::size_t w = shares[i]->primary.front().size();
      if (width && *width != w) throw Error(Errc::ShapeError, "block length differs between devices");
      width = w;
      c.devices_[i].state = DeviceState::Alive;
      c.devices_[i].share = std::move(*shares[i]);
    }
    return c;
  }

  const CodeParams& params() const noexcept { return params_; }
  const CodeMatrices& matrices() const noexcept { return matrices_; }
  const TransferLedger& ledger() const noexcept { return ledger_; }
  std::map<TransferKey, std::size_t> ledger_summary() const { return ledger_.summary(); }

  DeviceState state(DeviceId id) const { return slot(id).state; }

  std::vector<DeviceId> ids_in(DeviceState s) const {
    std::vector<DeviceId> out;
    for (DeviceId i = 0; i < params_.n; ++i)
      if (devices_[i].state == s) out.push_back(i);
    return out;
  }
  std::vector<DeviceId> alive_ids() const { return ids_in(DeviceState::Alive); }
  std::size_t alive_count() const { return alive_ids().size(); }

  /// Discards the shares of `ids`. Validates every id before changing anything.
  void fail(std::span<const DeviceId> ids) {
    for (DeviceId id : ids) {
      if (slot(id).state != DeviceState::Alive) throw Error(Errc::AlreadyFailed, "device " + std::to_string(id));
    }
    for (DeviceId id : ids) {
      devices_[id].state = DeviceState::Failed;
      devices_[id].share = DeviceShare{};
    }
  }
  void fail(std::initializer_list<DeviceId> ids) { fail(std::span<const DeviceId>(ids.begin(), ids.size())); }

  Block fetch_block(DeviceId from, DeviceId to, BlockRef which, Phase phase) {
    const Device& src = slot(from);
    if (to != kClient && to >= params_.n) throw Error(Errc::UnknownDevice, "receiver " + std::to_string(to));
    if (src.state == DeviceState::Failed) throw Error(Errc::DeviceFailed, "device " + std::to_string(from));

    Block out = std::visit(
        [&](const auto& ref) -> Block {
          using T = std::decay_t<decltype(ref)>;
          if constexpr (std::is_same_v<T, Contribution>) {
            if (ref.slot < 1 || ref.slot >= params_.n) throw Error(Errc::BadSlot, "slot " + std::to_string(ref.slot));
            return secondary_image(ref.slot, src.share.primary, matrices_);
          } else {
            // A newcomer mid-repair only serves computed contributions.
            if (src.state != DeviceState::Alive) {
              throw Error(Errc::DeviceFailed, "device " + std::to_string(from) + " has not finished repair");
            }
            if constexpr (std::is_same_v<T, PrimaryIndex>) {
              if (ref.index >= params_.d) throw Error(Errc::BadSlot, "primary index " + std::to_string(ref.index));
              return src.share.primary[ref.index];
            } else {
              if (ref.slot < 1 || ref.slot >= params_.n) throw Error(Errc::BadSlot, "slot " + std::to_string(ref.slot));
              return src.share.slot(ref.slot);
            }
          }
        },
        which);
    ledger_.append({from, to, 1, phase});
    return out;
  }

  /// Reads every block of a share; alpha ledger records.
  DeviceShare read_share(DeviceId from, DeviceId to, Phase phase) {
    DeviceShare s;
    s.device_id = from;
    for (std::size_t i = 0; i < params_.d; ++i) s.primary.push_back(fetch_block(from, to, PrimaryIndex{i}, phase));
    for (std::size_t m = 1; m < params_.n; ++m) s.secondary.push_back(fetch_block(from, to, SecondarySlot{m}, phase));
    return s;
  }

  /// A newcomer that has rebuilt its primary vector; it may now serve
  /// contributions to other newcomers.
  void begin_recovery(DeviceId id, std::vector<Block> primary) {
    Device& dev = slot(id);
    if (dev.state != DeviceState::Failed) throw Error(Errc::ShapeError, "device " + std::to_string(id) + " is not failed");
    if (primary.size() != params_.d) throw Error(Errc::ShapeError, "primary vector has wrong length");
    dev.state = DeviceState::Recovering;
    dev.share = DeviceShare{id, std::move(primary), {}};
  }

  void install(DeviceShare share) {
    check_share_shape(share, params_);
    Device& dev = slot(share.device_id);
    if (dev.state == DeviceState::Alive) {
      throw Error(Errc::ShapeError, "device " + std::to_string(share.device_id) + " is alive");
    }
    dev.state = DeviceState::Alive;
    dev.share = std::move(share);
  }

  /// Unmetered view of a stored share, for test harnesses and persistence.
  /// Protocol code must use fetch_block.
  const DeviceShare& inspect_share(DeviceId id) const {
    const Device& dev = slot(id);
    if (dev.state != DeviceState::Alive) throw Error(Errc::DeviceFailed, "device " + std::to_string(id));
    return dev.share;
  }

 private:
  struct Device {
    DeviceState state = DeviceState::Failed;
    DeviceShare share;
  };

  Cluster(const CodeParams& p, CodeMatrices m) : params_(p), matrices_(std::move(m)), devices_(p.n) {}

  Device& slot(DeviceId id) {
    if (id >= params_.n) throw Error(Errc::UnknownDevice, "device " + std::to_string(id));
    return devices_[id];
  }
  const Device& slot(DeviceId id) const {
    if (id >= params_.n) throw Error(Errc::UnknownDevice, "device " + std::to_string(id));
    return devices_[id];
  }

  CodeParams params_;
  CodeMatrices matrices_;
  std::vector<Device> devices_;
  TransferLedger ledger_;
};

/// Decode by reading whole shares of `ids` through the ledger.
inline std::vector<Block> decode_from_cluster(Cluster& cluster, std::span<const DeviceId> ids,
                                              DecodeStats* stats = nullptr) {
  std::vector<DeviceShare> shares;
  for (DeviceId id : ids) shares.push_back(cluster.read_share(id, kClient, Phase::Decode));
  return decode(shares, cluster.matrices(), cluster.params(), stats);
}

}  // namespace xmbcr
