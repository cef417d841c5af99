#include "matbake/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "matbake/error.hpp"

namespace matbake {

IoUReport miou(const LabelUV& pred, const LabelUV& gt) {
  if (pred.resolution != gt.resolution || pred.labels.size() != gt.labels.size()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and ground truth differ in resolution");
  }
  IoUReport report;
  for (std::size_t t = 0; t < gt.labels.size(); ++t) {
    const std::uint8_t g = gt.labels[t];
    if (g == kBackgroundLabel) continue;
    const std::uint8_t p = pred.labels[t];
    ++report.evaluated_texels;
    ++report.classes[g].gt_count;
    if (p < kClassCount) ++report.classes[p].pred_count;
    if (p == g) ++report.classes[g].intersection;
  }
  if (report.evaluated_texels == 0) throw Error(ErrorCode::EmptyOverlap, "ground truth has no labelled texels");

  double sum = 0.0;
  for (auto& c : report.classes) {
    c.union_count = c.gt_count + c.pred_count - c.intersection;
    if (c.union_count > 0) c.iou = double(c.intersection) / double(c.union_count);
    if (c.gt_count > 0) {
      sum += *c.iou;
      ++report.classes_in_gt;
    }
  }
  report.mean_iou = sum / double(report.classes_in_gt);
  return report;
}

double psnr(const TextureImage& a, const TextureImage& b) {
  if (a.width != b.width || a.height != b.height || a.pixels.size() != b.pixels.size()) {
    throw Error(ErrorCode::ShapeMismatch, "images differ in size");
  }
  if (a.empty()) throw Error(ErrorCode::ShapeMismatch, "images are empty");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.texel_count(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double d = double(a.pixels[4 * i + c]) - double(b.pixels[4 * i + c]);
      sq += d * d;
    }
  }
  if (sq == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sq / (3.0 * double(a.texel_count()));
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

std::vector<double> luma(const TextureImage& image) {
  std::vector<double> y(image.texel_count());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto* p = image.pixels.data() + 4 * i;
    y[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return y;
}

namespace {

std::array<double, kSsimWindow> gaussian_kernel() {
  std::array<double, kSsimWindow> k{};
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double x = i - kSsimWindow / 2;
    k[i] = std::exp(-x * x / (2.0 * kSsimSigma * kSsimSigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable 'valid' filtering: output is (w - 10) x (h - 10).
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h, const std::array<double, kSsimWindow>& k) {
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> tmp(std::size_t(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kSsimWindow; ++i) s += k[i] * in[std::size_t(y) * w + x + i];
      tmp[std::size_t(y) * ow + x] = s;
    }
  }
  std::vector<double> out(std::size_t(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kSsimWindow; ++i) s += k[i] * tmp[std::size_t(y + i) * ow + x];
      out[std::size_t(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double ssim(const TextureImage& a, const TextureImage& b) {
  if (a.width != b.width || a.height != b.height) throw Error(ErrorCode::ShapeMismatch, "images differ in size");
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    throw Error(ErrorCode::TooSmall, "SSIM needs images of at least 11x11 pixels");
  }
  const int w = a.width;
  const int h = a.height;
  const auto x = luma(a);
  const auto y = luma(b);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto k = gaussian_kernel();
  const auto mu_x = filter_valid(x, w, h, k);
  const auto mu_y = filter_valid(y, w, h, k);
  const auto e_xx = filter_valid(xx, w, h, k);
  const auto e_yy = filter_valid(yy, w, h, k);
  const auto e_xy = filter_valid(xy, w, h, k);

  const double c1 = (kSsimK1 * 255.0) * (kSsimK1 * 255.0);
  const double c2 = (kSsimK2 * 255.0) * (kSsimK2 * 255.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double var_x = e_xx[i] - mx * mx;
    const double var_y = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    // written so that identical inputs give numerator == denominator bit for bit
    const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
    const double den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
    sum += num / den;
  }
  return sum / double(mu_x.size());
}

}  // namespace matbake
