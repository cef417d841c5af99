#include <httplib.h>

#include <cmath>
#include <thread>

#include "matbake/error.hpp"
#include "matbake/png_io.hpp"
#include "matbake/seg_backend.hpp"

namespace matbake {
namespace {

bool is_transient_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

bool is_png_content_type(const std::string& value) {
  const auto semi = value.find(';');
  std::string base = value.substr(0, semi);
  while (!base.empty() && base.back() == ' ') base.pop_back();
  for (auto& c : base) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return base == "image/png";
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& sem_;
};

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw Error(ErrorCode::InvalidArgument, "http backend needs an endpoint");
  if (options_.max_retries < 0) throw Error(ErrorCode::InvalidArgument, "max_retries must be >= 0");
  if (options_.max_concurrency < 1 || options_.max_concurrency > 1024) {
    throw Error(ErrorCode::InvalidArgument, "max_concurrency must be within [1, 1024]");
  }
  std::string endpoint = options_.endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  const auto scheme_end = endpoint.find("://");
  const auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  scheme_host_port_ = endpoint.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? std::string() : endpoint.substr(path_start);
  slots_ = std::make_unique<std::counting_semaphore<1024>>(options_.max_concurrency);
}

HttpBackend::~HttpBackend() = default;

HttpSegmentResult HttpBackend::http_segment(const TextureImage& image) {
  const auto body = encode_png(image);
  const std::string path = path_prefix_ + "/segment";
  SlotGuard slot(*slots_);

  HttpSegmentResult result;
  std::string last_failure;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 0) {
      const double scale = std::pow(options_.backoff_multiplier, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration_cast<std::chrono::milliseconds>(options_.initial_backoff * scale));
      ++result.retry_count;
      ++total_retries_;
    }

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(options_.connect_timeout);
    client.set_read_timeout(options_.read_timeout);
    client.set_write_timeout(options_.read_timeout);
    auto res = client.Post(path, reinterpret_cast<const char*>(body.data()), body.size(), "image/png");

    bool transient = false;
    if (!res) {
      last_failure = "request failed: " + httplib::to_string(res.error());
      transient = true;
    } else if (res->status != 200) {
      last_failure = "HTTP status " + std::to_string(res->status);
      transient = is_transient_status(res->status);
    } else {
      if (!is_png_content_type(res->get_header_value("Content-Type"))) {
        throw Error(ErrorCode::ProtocolError,
                    "wrong content type '" + res->get_header_value("Content-Type") + "', expected image/png");
      }
      GrayImage gray;
      try {
        const auto* data = reinterpret_cast<const std::uint8_t*>(res->body.data());
        gray = decode_gray8({data, res->body.size()});
      } catch (const Error& e) {
        throw Error(ErrorCode::ProtocolError, std::string("undecodable label PNG: ") + e.what());
      }
      if (gray.width != image.width || gray.height != image.height) {
        throw Error(ErrorCode::ProtocolError, "wrong dimensions: got " + std::to_string(gray.width) + "x" +
                                                  std::to_string(gray.height) + ", expected " +
                                                  std::to_string(image.width) + "x" + std::to_string(image.height));
      }
      validate_labels(gray.pixels);
      result.labels.width = gray.width;
      result.labels.height = gray.height;
      result.labels.labels = std::move(gray.pixels);
      return result;
    }

    if (!transient || attempt >= options_.max_retries) {
      throw Error(ErrorCode::BackendUnavailable, scheme_host_port_ + path + ": " + last_failure + " after " +
                                                     std::to_string(result.retry_count) + " retries");
    }
  }
}

LabelMap HttpBackend::infer(const TextureImage& image, std::size_t) { return http_segment(image).labels; }

}  // namespace matbake
