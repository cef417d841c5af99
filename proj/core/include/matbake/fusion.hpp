#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "matbake/asset_io.hpp"
#include "matbake/labels.hpp"
#include "matbake/schedule.hpp"
#include "matbake/uv_bake.hpp"

namespace matbake {

struct FusionConfig {
  /// Vote weight of each manual view; automatic views weigh 1.
  double alpha = 2.0;
  /// Regions smaller than this fraction of all assigned texels get absorbed.
  double unify_min_region = 0.005;
  /// A UV chart whose observed texels carry one label at least this often
  /// fills its unobserved texels with that label instead of the nearest one.
  double unify_dominance = 0.8;

  /// Throws InvalidArgument when a field is outside its range.
  void validate() const;
};

/// Per-texel vote tallies. Counts are kept separately for manual and
/// automatic views, so weights alpha * manual + auto are exact and
/// independent of accumulation order.
class VoteHistogram {
 public:
  VoteHistogram() = default;
  VoteHistogram(int resolution, double alpha);

  int resolution() const noexcept { return resolution_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t texel_count() const noexcept { return std::size_t(resolution_) * resolution_; }

  std::uint16_t manual_count(std::size_t texel, std::uint8_t cls) const noexcept {
    return counts_[slot(texel, cls)];
  }
  std::uint16_t auto_count(std::size_t texel, std::uint8_t cls) const noexcept {
    return counts_[slot(texel, cls) + 1];
  }
  double weight(std::size_t texel, std::uint8_t cls) const noexcept {
    return alpha_ * manual_count(texel, cls) + auto_count(texel, cls);
  }
  double total(std::size_t texel) const noexcept;

  void add(std::size_t texel, std::uint8_t cls, bool manual) noexcept { ++counts_[slot(texel, cls) + (manual ? 0 : 1)]; }

  /// Flat little-endian uint16 dump, layout [texel][class][manual, auto].
  std::vector<std::uint8_t> serialize() const;

 private:
  static std::size_t slot(std::size_t texel, std::uint8_t cls) noexcept { return (texel * kClassCount + cls) * 2; }

  int resolution_ = 0;
  double alpha_ = 1.0;
  std::vector<std::uint16_t> counts_;
};

/// Tallies every non-255 texel of every view: manual views (schedule flag)
/// count with weight alpha, others with weight 1. Parallel over texel rows;
/// the result does not depend on `threads`.
VoteHistogram accumulate(std::span<const LabelUV> stack, const ViewSchedule& schedule, const FusionConfig& cfg,
                         std::size_t threads = 1);

/// Weighted argmax per texel, ties to the lowest class id; texels without any
/// vote stay 255.
LabelUV vote(const VoteHistogram& hist, const FusionConfig& cfg);

struct UnifyStats {
  std::size_t holes_filled = 0;
  std::size_t regions_absorbed = 0;
  std::size_t texels_relabeled = 0;
};

/// Per-face chart ids: faces sharing a UV-space edge (same UV coordinates at
/// both ends) belong to the same chart.
std::vector<int> uv_charts(const TriangleMesh& mesh);

/// Post-vote cleanup, in order:
///  1. unobserved texels take the nearest observed label of their UV chart
///     (or the chart's dominant label, see FusionConfig::unify_dominance);
///  2. each face takes the mode of its texels (ties to the lowest id);
///  3. faces sharing 3D edges and labels form regions; regions without a label
///     and regions under unify_min_region are relabeled to the neighbouring
///     label with the longest shared edge length, until none is left;
///  4. texels of relabeled faces are rewritten to the face's new label.
/// Faces covering no texel take no part in steps 2-4.
LabelUV region_unify(const LabelUV& fused, const TexelSampleTable& table, const TriangleMesh& mesh,
                     const FusionConfig& cfg, UnifyStats* stats = nullptr);

}  // namespace matbake
