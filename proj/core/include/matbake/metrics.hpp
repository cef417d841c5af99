#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "matbake/image.hpp"
#include "matbake/labels.hpp"

namespace matbake {

struct ClassIoU {
  std::size_t intersection = 0;
  std::size_t union_count = 0;
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;
  std::optional<double> iou;  // empty when the class appears in neither input
};

struct IoUReport {
  std::array<ClassIoU, kClassCount> classes{};
  double mean_iou = 0.0;           // over classes with ground-truth support
  std::size_t classes_in_gt = 0;
  std::size_t evaluated_texels = 0;  // texels where gt != 255
};

/// Texels with gt = 255 are excluded; a pred of 255 elsewhere counts as a miss.
IoUReport miou(const LabelUV& pred, const LabelUV& gt);

/// 10 log10(255^2 / MSE) over the RGB channels; +inf for identical images.
double psnr(const TextureImage& a, const TextureImage& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Rec. 601 luma in [0, 255].
std::vector<double> luma(const TextureImage& image);

/// Mean SSIM over all fully-contained 11x11 Gaussian (sigma 1.5) windows of
/// the luma channel, K1 = 0.01, K2 = 0.03, L = 255.
double ssim(const TextureImage& a, const TextureImage& b);

}  // namespace matbake
