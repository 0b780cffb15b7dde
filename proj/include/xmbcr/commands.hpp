#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xmbcr/cluster.hpp"
#include "xmbcr/codec.hpp"
#include "xmbcr/error.hpp"
#include "xmbcr/repair.hpp"
#include "xmbcr/storage.hpp"

/// File-level operations behind the xmbcr command-line tool.
namespace xmbcr::commands {

namespace fs = std::filesystem;
using storage::Manifest;

/// Stripes `input` into n share files plus manifest.json under `out_dir`.
/// The input is zero-padded to a whole number of stripes; the manifest
/// records the true length and the SHA-256 of the unpadded bytes.
inline Manifest encode_file(const fs::path& input, const fs::path& out_dir, const CodeParams& p,
                            std::size_t block_size = storage::kDefaultBlockSize) {
  if (block_size < 1) throw Error(Errc::InvalidParams, "block size must be at least 1");
  std::ifstream in(input, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + input.string());
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  const CodeMatrices mx = build_code_matrices(p);
  Manifest m;
  m.n = p.n;
  m.k = p.k;
  m.d = p.d;
  m.t = p.t;
  m.block_size = block_size;
  m.original_length = fs::file_size(input);
  m.stripe_count = storage::stripes_for(m.original_length, m.stripe_bytes());
  for (Element e : mx.points.psi) m.psi_points.push_back(e.value);
  for (Element e : mx.points.phi_x) m.phi_x_points.push_back(e.value);
  for (Element e : mx.points.phi_y) m.phi_y_points.push_back(e.value);

  std::vector<storage::ShareWriter> writers;
  for (DeviceId i = 0; i < p.n; ++i) writers.emplace_back(storage::share_path(out_dir, i), storage::header_for(m, i));

  storage::Sha256 hash;
  std::vector<std::uint8_t> buf(m.stripe_bytes());
  for (std::uint64_t s = 0; s < m.stripe_count; ++s) {
    std::fill(buf.begin(), buf.end(), 0);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    hash.update(std::span(buf).first(static_cast<std::size_t>(in.gcount())));

    std::vector<Block> payload;
    for (std::size_t b = 0; b < p.file_blocks; ++b) {
      const auto first = buf.begin() + static_cast<std::ptrdiff_t>(b * block_size);
      payload.emplace_back(first, first + static_cast<std::ptrdiff_t>(block_size));
    }
    const auto shares = encode_stripe(payload, mx, p);
    for (DeviceId i = 0; i < p.n; ++i) writers[i].append(shares[i]);
  }
  for (auto& w : writers) w.close();
  m.payload_checksum = hash.hex_digest();
  storage::write_manifest(out_dir, m);
  return m;
}

/// Per-stripe inbound traffic of one newcomer, split by sender role.
struct NewcomerTraffic {
  DeviceId id = 0;
  std::size_t from_helpers = 0;
  std::size_t from_newcomers = 0;
  std::size_t from_spare = 0;
  std::size_t total() const noexcept { return from_helpers + from_newcomers + from_spare; }
};

struct RepairReport {
  CodeParams params;
  RepairPlan plan;
  std::uint64_t stripe_count = 0;
  std::size_t block_size = 0;
  std::vector<NewcomerTraffic> newcomers;
  std::size_t ledger_blocks = 0;  // summed over all stripes
};

inline std::string describe(const RepairReport& r) {
  std::string out;
  out += "repaired " + std::to_string(r.plan.failed.size()) + " device(s) from " +
         std::to_string(r.plan.helpers.size()) + " helpers over " + std::to_string(r.stripe_count) + " stripe(s)\n";
  for (const auto& nc : r.newcomers) {
    out += "device " + std::to_string(nc.id) + ": " + std::to_string(nc.total()) + " blocks per stripe (2x" +
           std::to_string(r.plan.helpers.size()) + " helpers";
    if (nc.from_newcomers) out += " + " + std::to_string(nc.from_newcomers) + " coordination";
    if (nc.from_spare) out += " + " + std::to_string(nc.from_spare) + " from other live devices";
    out += ")" + std::string(nc.total() == r.params.alpha ? " = alpha" : " != alpha") + " (alpha=" +
           std::to_string(r.params.alpha) + ")\n";
  }
  out += "total transferred: " + std::to_string(r.ledger_blocks) + " blocks, " +
         std::to_string(static_cast<std::uint64_t>(r.ledger_blocks) * r.block_size) + " bytes\n";
  return out;
}

/// Regenerates the share files of `failed` in `dir` from the remaining ones.
inline RepairReport repair_files(const fs::path& dir, std::span<const DeviceId> failed) {
  const Manifest m = storage::read_manifest(dir);
  auto [p, mx] = storage::validate(m);
  RepairReport report;
  report.params = p;
  report.plan = plan_repair(failed, p);
  report.stripe_count = m.stripe_count;
  report.block_size = m.block_size;

  std::vector<bool> is_failed(p.n, false);
  for (DeviceId id : report.plan.failed) is_failed[id] = true;

  std::vector<std::optional<storage::ShareReader>> readers(p.n);
  for (DeviceId i = 0; i < p.n; ++i)
    if (!is_failed[i]) readers[i].emplace(storage::share_path(dir, i), m, i);

  std::vector<fs::path> tmp_paths;
  std::vector<storage::ShareWriter> writers;
  for (DeviceId id : report.plan.failed) {
    tmp_paths.push_back(storage::share_path(dir, id).string() + ".tmp");
    writers.emplace_back(tmp_paths.back(), storage::header_for(m, id));
  }

  for (std::uint64_t s = 0; s < m.stripe_count; ++s) {
    std::vector<std::optional<DeviceShare>> present(p.n);
    for (DeviceId i = 0; i < p.n; ++i)
      if (readers[i]) present[i] = readers[i]->read_stripe(s);
    Cluster cluster = Cluster::create_partial(std::move(present), p, mx.points);
    const TransferLedger ledger = execute_repair(cluster, report.plan);
    report.ledger_blocks += ledger.size();
    for (std::size_t n = 0; n < report.plan.failed.size(); ++n)
      writers[n].append(cluster.inspect_share(report.plan.failed[n]));
  }
  for (auto& w : writers) w.close();
  for (std::size_t n = 0; n < report.plan.failed.size(); ++n)
    fs::rename(tmp_paths[n], storage::share_path(dir, report.plan.failed[n]));

  auto role_of = [&](DeviceId id) {
    if (std::find(report.plan.helpers.begin(), report.plan.helpers.end(), id) != report.plan.helpers.end()) return 0;
    if (is_failed[id]) return 1;
    return 2;
  };
  for (DeviceId id : report.plan.failed) {
    NewcomerTraffic nc{id};
    for (const auto& x : report.plan.transfers) {
      if (x.to != id) continue;
      switch (role_of(x.from)) {
        case 0: ++nc.from_helpers; break;
        case 1: ++nc.from_newcomers; break;
        default: ++nc.from_spare; break;
      }
    }
    report.newcomers.push_back(nc);
  }
  return report;
}

struct DecodeReport {
  std::vector<DeviceId> devices;
  std::uint64_t bytes_written = 0;
  std::string checksum;
  bool checksum_ok = false;
};

/// Rebuilds the original file from the first k of `devices`.
/// Throws ChecksumMismatch (after writing the output) if the SHA-256 differs.
inline DecodeReport decode_files(const fs::path& dir, std::span<const DeviceId> devices, const fs::path& output) {
  const Manifest m = storage::read_manifest(dir);
  auto [p, mx] = storage::validate(m);
  if (devices.size() < p.k) {
    throw Error(Errc::NotEnoughShares, "need " + std::to_string(p.k) + " devices, got " + std::to_string(devices.size()));
  }
  DecodeReport report;
  report.devices.assign(devices.begin(), devices.begin() + static_cast<std::ptrdiff_t>(p.k));
  for (DeviceId id : report.devices) {
    if (id >= p.n) throw Error(Errc::UnknownDevice, "device " + std::to_string(id));
    if (std::count(report.devices.begin(), report.devices.end(), id) > 1) {
      throw Error(Errc::DuplicateDevice, "device " + std::to_string(id) + " given twice");
    }
  }

  std::vector<storage::ShareReader> readers;
  for (DeviceId id : report.devices) readers.emplace_back(storage::share_path(dir, id), m, id);

  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot create " + output.string());
  storage::Sha256 hash;
  std::uint64_t remaining = m.original_length;
  for (std::uint64_t s = 0; s < m.stripe_count; ++s) {
    std::vector<DeviceShare> shares;
    for (auto& r : readers) shares.push_back(r.read_stripe(s));
    for (const Block& b : decode(shares, mx, p)) {
      const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, b.size()));
      if (take == 0) break;
      out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(take));
      hash.update(std::span(b).first(take));
      remaining -= take;
      report.bytes_written += take;
    }
  }
  out.close();
  if (!out) throw Error(Errc::IoError, "write failed on " + output.string());

  report.checksum = hash.hex_digest();
  report.checksum_ok = report.checksum == m.payload_checksum;
  if (!report.checksum_ok) {
    throw Error(Errc::ChecksumMismatch, "decoded " + report.checksum + ", manifest says " + m.payload_checksum);
  }
  return report;
}

struct SlotMismatch {
  std::uint64_t stripe = 0;
  DeviceId holder = 0;
  std::size_t slot = 0;
  DeviceId owner = 0;
};

struct VerifyReport {
  std::vector<DeviceId> present;
  std::vector<DeviceId> missing;
  std::vector<std::string> problems;  // unreadable or inconsistent share files
  std::vector<SlotMismatch> mismatches;
  std::size_t slots_checked = 0;

  bool consistent() const noexcept { return problems.empty() && mismatches.empty(); }
};

/// Recomputes every secondary block whose owner's share is present and
/// compares it with the stored copy.
inline VerifyReport verify_files(const fs::path& dir) {
  const Manifest m = storage::read_manifest(dir);
  auto [p, mx] = storage::validate(m);
  VerifyReport report;

  std::vector<std::optional<storage::ShareReader>> readers(p.n);
  for (DeviceId i = 0; i < p.n; ++i) {
    const fs::path path = storage::share_path(dir, i);
    if (!fs::exists(path)) {
      report.missing.push_back(i);
      continue;
    }
    try {
      readers[i].emplace(path, m, i);
      report.present.push_back(i);
    } catch (const Error& e) {
      report.problems.push_back(e.what());
    }
  }

  for (std::uint64_t s = 0; s < m.stripe_count; ++s) {
    std::vector<std::optional<DeviceShare>> shares(p.n);
    for (DeviceId i = 0; i < p.n; ++i)
      if (readers[i]) shares[i] = readers[i]->read_stripe(s);
    for (DeviceId holder = 0; holder < p.n; ++holder) {
      if (!shares[holder]) continue;
      for (std::size_t slot = 1; slot < p.n; ++slot) {
        const DeviceId owner = slot_owner(holder, slot, p.n);
        if (!shares[owner]) continue;
        ++report.slots_checked;
        if (secondary_image(slot, shares[owner]->primary, mx) != shares[holder]->slot(slot)) {
          report.mismatches.push_back({s, holder, slot, owner});
        }
      }
    }
  }
  return report;
}

}  // namespace xmbcr::commands
