#include "matbake/fusion.hpp"

#include <string>

#include "matbake/error.hpp"
#include "matbake/parallel.hpp"

namespace matbake {

void FusionConfig::validate() const {
  if (!(alpha >= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 1");
  if (!(unify_min_region > 0.0 && unify_min_region < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "unify_min_region must be within (0, 1)");
  }
  if (!(unify_dominance > 0.5 && unify_dominance <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "unify_dominance must be within (0.5, 1]");
  }
}

VoteHistogram::VoteHistogram(int resolution, double alpha)
    : resolution_(resolution), alpha_(alpha), counts_(std::size_t(resolution) * resolution * kClassCount * 2, 0) {}

double VoteHistogram::total(std::size_t texel) const noexcept {
  double sum = 0.0;
  for (std::uint8_t c = 0; c < kClassCount; ++c) sum += weight(texel, c);
  return sum;
}

std::vector<std::uint8_t> VoteHistogram::serialize() const {
  std::vector<std::uint8_t> out(counts_.size() * 2);
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out[2 * i] = static_cast<std::uint8_t>(counts_[i] & 0xFF);
    out[2 * i + 1] = static_cast<std::uint8_t>(counts_[i] >> 8);
  }
  return out;
}

VoteHistogram accumulate(std::span<const LabelUV> stack, const ViewSchedule& schedule, const FusionConfig& cfg,
                         std::size_t threads) {
  cfg.validate();
  if (stack.size() != schedule.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(stack.size()) + " label UVs for a schedule of " +
                                               std::to_string(schedule.size()) + " views");
  }
  if (stack.empty()) throw Error(ErrorCode::LengthMismatch, "empty view stack");
  if (stack.size() > 0xFFFF) throw Error(ErrorCode::LengthMismatch, "too many views for 16-bit tallies");
  const int res = stack.front().resolution;
  for (std::size_t v = 0; v < stack.size(); ++v) {
    if (stack[v].resolution != res || stack[v].labels.size() != std::size_t(res) * res) {
      throw Error(ErrorCode::ShapeMismatch, "label UV " + std::to_string(v) + " has resolution " +
                                                std::to_string(stack[v].resolution) + ", expected " +
                                                std::to_string(res));
    }
  }

  VoteHistogram hist(res, cfg.alpha);
  parallel_for(std::size_t(res), threads, [&](std::size_t row) {
    const std::size_t begin = row * std::size_t(res);
    const std::size_t end = begin + std::size_t(res);
    for (std::size_t v = 0; v < stack.size(); ++v) {
      const bool manual = schedule.poses[v].manual;
      const auto& labels = stack[v].labels;
      for (std::size_t t = begin; t < end; ++t) {
        const std::uint8_t label = labels[t];
        if (label == kBackgroundLabel) continue;
        if (label >= kClassCount) {
          throw Error(ErrorCode::ProtocolError, "label out of range in view " + std::to_string(v));
        }
        hist.add(t, label, manual);
      }
    }
  });
  return hist;
}

LabelUV vote(const VoteHistogram& hist, const FusionConfig&) {
  LabelUV out(hist.resolution(), LabelUV::kFused, kBackgroundLabel);
  for (std::size_t t = 0; t < hist.texel_count(); ++t) {
    double best = 0.0;
    std::uint8_t best_class = kBackgroundLabel;
    for (std::uint8_t c = 0; c < kClassCount; ++c) {
      const double w = hist.weight(t, c);
      if (w > best) {
        best = w;
        best_class = c;
      }
    }
    out.labels[t] = best_class;
  }
  return out;
}

}  // namespace matbake
