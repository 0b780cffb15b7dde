#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xmbcr/error.hpp"
#include "xmbcr/gf256.hpp"
#include "xmbcr/matrix.hpp"
#include "xmbcr/params.hpp"

namespace xmbcr {

using DeviceId = std::size_t;

/// One stripe's M payload blocks split into n a-sequences and d-k b-sequences,
/// each of k blocks. a_i is stored verbatim on device i; the b-sequences are
/// spread over all devices through psi.
struct SourceLayout {
  std::vector<std::vector<Block>> a;
  std::vector<std::vector<Block>> b;
};

/// The alpha blocks held by one device for one stripe.
///   primary[0..k)        = a_i
///   primary[k + j]       = sum_r psi(r, i) * b_j[r]
///   secondary[m - 1]     = phi column m-1 applied to primary of device (i + m) mod n
struct DeviceShare {
  DeviceId device_id = 0;
  std::vector<Block> primary;
  std::vector<Block> secondary;

  /// Secondary slot m in [1, n-1].
  const Block& slot(std::size_t m) const { return secondary.at(m - 1); }
  std::size_t block_count() const noexcept { return primary.size() + secondary.size(); }

  friend bool operator==(const DeviceShare&, const DeviceShare&) = default;
};

/// Device whose primary vector feeds slot m of `holder`.
inline DeviceId slot_owner(DeviceId holder, std::size_t m, std::size_t n) noexcept { return (holder + m) % n; }

/// Slot on `holder` that carries the image of `owner`'s primary vector.
inline std::size_t slot_for(DeviceId holder, DeviceId owner, std::size_t n) noexcept {
  return (owner + n - holder) % n;
}

/// Shape checks shared by every consumer of a share.
inline void check_share_shape(const DeviceShare& s, const CodeParams& p) {
  if (s.device_id >= p.n) throw Error(Errc::ShapeError, "device id " + std::to_string(s.device_id) + " out of range");
  if (s.primary.size() != p.d || s.secondary.size() != p.n - 1) {
    throw Error(Errc::ShapeError, "device " + std::to_string(s.device_id) + " holds " +
                                      std::to_string(s.primary.size()) + "+" + std::to_string(s.secondary.size()) +
                                      " blocks, expected " + std::to_string(p.d) + "+" + std::to_string(p.n - 1));
  }
  const std::size_t width = s.primary.front().size();
  if (width == 0) throw Error(Errc::ShapeError, "empty blocks");
  auto same = [&](const Block& b) { return b.size() == width; };
  if (!std::all_of(s.primary.begin(), s.primary.end(), same) ||
      !std::all_of(s.secondary.begin(), s.secondary.end(), same)) {
    throw Error(Errc::ShapeError, "device " + std::to_string(s.device_id) + " has blocks of unequal length");
  }
}

inline SourceLayout split_stripe(std::span<const Block> payload, const CodeParams& p) {
  if (payload.size() != p.file_blocks) {
    throw Error(Errc::WrongBlockCount, "stripe needs " + std::to_string(p.file_blocks) + " blocks, got " +
                                           std::to_string(payload.size()));
  }
  SourceLayout layout;
  auto it = payload.begin();
  for (std::size_t i = 0; i < p.n; ++i, it += static_cast<std::ptrdiff_t>(p.k)) layout.a.emplace_back(it, it + p.k);
  for (std::size_t j = 0; j < p.coded_sequences(); ++j, it += static_cast<std::ptrdiff_t>(p.k))
    layout.b.emplace_back(it, it + p.k);
  return layout;
}

/// phi column m-1 applied to a primary vector w: the block device `holder`
/// stores at slot m when w belongs to slot_owner(holder, m).
inline Block secondary_image(std::size_t m, std::span<const Block> w, const CodeMatrices& mx) {
  if (m < 1 || m > mx.phi.cols()) throw Error(Errc::BadSlot, "slot " + std::to_string(m) + " out of range");
  if (w.size() != mx.phi.rows()) throw Error(Errc::DimensionMismatch, "primary vector has wrong length");
  Block out(w.front().size(), 0);
  for (std::size_t r = 0; r < w.size(); ++r) gf256::axpy_inplace(out, mx.phi(r, m - 1), w[r]);
  return out;
}

/// w_i: a_i followed by the psi-coded blocks of each b-sequence.
inline std::vector<Block> primary_vector(DeviceId i, const SourceLayout& layout, const CodeMatrices& mx,
                                         const CodeParams& p) {
  std::vector<Block> w = layout.a.at(i);
  for (const auto& bj : layout.b) {
    Block coded(bj.front().size(), 0);
    for (std::size_t r = 0; r < p.k; ++r) gf256::axpy_inplace(coded, mx.psi(r, i), bj[r]);
    w.push_back(std::move(coded));
  }
  return w;
}

inline std::vector<DeviceShare> encode(const SourceLayout& layout, const CodeMatrices& mx, const CodeParams& p) {
  if (mx.psi.rows() != p.k || mx.psi.cols() != p.n || mx.phi.rows() != p.d || mx.phi.cols() != p.n - 1) {
    throw Error(Errc::DimensionMismatch, "code matrices do not match the parameters");
  }
  if (layout.a.size() != p.n || layout.b.size() != p.coded_sequences()) {
    throw Error(Errc::DimensionMismatch, "source layout does not match the parameters");
  }

  std::vector<std::vector<Block>> w(p.n);
  for (DeviceId i = 0; i < p.n; ++i) w[i] = primary_vector(i, layout, mx, p);

  std::vector<DeviceShare> shares(p.n);
  for (DeviceId i = 0; i < p.n; ++i) {
    shares[i].device_id = i;
    shares[i].primary = w[i];
    for (std::size_t m = 1; m < p.n; ++m) shares[i].secondary.push_back(secondary_image(m, w[slot_owner(i, m, p.n)], mx));
  }
  return shares;
}

inline std::vector<DeviceShare> encode_stripe(std::span<const Block> payload, const CodeMatrices& mx,
                                              const CodeParams& p) {
  return encode(split_stripe(payload, p), mx, p);
}

/// Block counts observed by one decode call.
struct DecodeStats {
  std::size_t step1_recovered = 0;  // a_c of contacted devices plus every b-sequence block
  std::size_t step2_rebuilt = 0;    // psi-coded primary positions of non-contacted devices
  std::size_t step3_recovered = 0;  // a_i of non-contacted devices
};

/// Recovers the stripe payload from the first k shares in `shares`.
inline std::vector<Block> decode(std::span<const DeviceShare> shares, const CodeMatrices& mx, const CodeParams& p,
                                 DecodeStats* stats = nullptr) {
  if (shares.size() < p.k) {
    throw Error(Errc::NotEnoughShares, "need " + std::to_string(p.k) + " shares, got " + std::to_string(shares.size()));
  }
  const auto contacted = shares.first(p.k);
  std::vector<bool> is_contacted(p.n, false);
  for (const DeviceShare& s : contacted) {
    check_share_shape(s, p);
    if (is_contacted[s.device_id]) throw Error(Errc::DuplicateDevice, "device " + std::to_string(s.device_id) + " given twice");
    is_contacted[s.device_id] = true;
  }
  const std::size_t width = contacted.front().primary.front().size();
  DecodeStats local;

  // Step 1: systematic a_c from each contacted device; b-sequences through the
  // inverse of psi restricted to the contacted columns.
  std::vector<std::vector<Block>> a(p.n);
  for (const DeviceShare& s : contacted) {
    a[s.device_id].assign(s.primary.begin(), s.primary.begin() + static_cast<std::ptrdiff_t>(p.k));
    local.step1_recovered += p.k;
  }
  std::vector<DeviceId> ids;
  for (const DeviceShare& s : contacted) ids.push_back(s.device_id);
  const Matrix psi_minor_inv = invert(mx.psi.select_columns(ids).transposed());

  std::vector<std::vector<Block>> b(p.coded_sequences());
  for (std::size_t j = 0; j < b.size(); ++j) {
    std::vector<Block> observed;
    for (const DeviceShare& s : contacted) observed.push_back(s.primary[p.k + j]);
    b[j] = mat_vec_blocks(psi_minor_inv, observed);
    local.step1_recovered += p.k;
  }

  // Step 2 and 3 per non-contacted device: rebuild its coded primary positions,
  // then solve for a_i from the k secondary images held by contacted devices.
  // Only the top k rows of phi multiply unknowns; the rest move to the right.
  for (DeviceId i = 0; i < p.n; ++i) {
    if (is_contacted[i]) continue;
    std::vector<Block> known(p.coded_sequences(), Block(width, 0));
    for (std::size_t j = 0; j < b.size(); ++j)
      for (std::size_t r = 0; r < p.k; ++r) gf256::axpy_inplace(known[j], mx.psi(r, i), b[j][r]);
    local.step2_rebuilt += known.size();

    std::vector<std::size_t> columns;
    std::vector<Block> rhs;
    for (const DeviceShare& s : contacted) {
      const std::size_t m = slot_for(s.device_id, i, p.n);
      Block y = s.slot(m);
      for (std::size_t j = 0; j < known.size(); ++j) gf256::axpy_inplace(y, mx.phi(p.k + j, m - 1), known[j]);
      columns.push_back(m - 1);
      rhs.push_back(std::move(y));
    }
    const Matrix system = mx.phi.top_rows(p.k).select_columns(columns).transposed();
    a[i] = mat_vec_blocks(invert(system), rhs);
    local.step3_recovered += p.k;
  }

  std::vector<Block> payload;
  payload.reserve(p.file_blocks);
  for (auto& ai : a)
    for (auto& x : ai) payload.push_back(std::move(x));
  for (auto& bj : b)
    for (auto& x : bj) payload.push_back(std::move(x));
  if (stats) *stats = local;
  return payload;
}

}  // namespace xmbcr
