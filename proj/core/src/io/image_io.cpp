#include "sarfusion/io/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "sarfusion/errors.hpp"
#include "sarfusion/io/files.hpp"

namespace sarfusion::io {

namespace {

constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

enum class Container { kPng, kTiff };

Container sniff(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
  if (bytes.size() >= 8 && std::equal(kPngSignature, kPngSignature + 8, bytes.begin())) {
    // IHDR colour type 3 = palette
    if (bytes.size() > 25 && bytes[25] == 3) {
      throw UnsupportedFormat("palette PNG not supported: " + path.string());
    }
    return Container::kPng;
  }
  if (bytes.size() >= 4 && ((bytes[0] == 'I' && bytes[1] == 'I' && bytes[2] == 42 && bytes[3] == 0) ||
                            (bytes[0] == 'M' && bytes[1] == 'M' && bytes[2] == 0 && bytes[3] == 42))) {
    return Container::kTiff;
  }
  throw UnsupportedFormat("not a PNG or TIFF file: " + path.string());
}

std::string encoder_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") return ".png";
  if (ext == ".tif" || ext == ".tiff") return ".tiff";
  throw UnsupportedFormat("output extension must be .png, .tif or .tiff: " + path.string());
}

double full_scale(int depth) {
  if (depth == 8) return 255.0;
  if (depth == 16) return 65535.0;
  throw InvalidArgument("bit depth must be 8 or 16");
}

}  // namespace

MultiBandImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  sniff(bytes, path);
  const cv::Mat raw = cv::imdecode(cv::_InputArray(bytes.data(), static_cast<int>(bytes.size())),
                                   cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw UnsupportedFormat("cannot decode " + path.string());

  int depth = 0;
  if (raw.depth() == CV_8U) {
    depth = 8;
  } else if (raw.depth() == CV_16U) {
    depth = 16;
  } else {
    throw UnsupportedFormat("only 8- and 16-bit unsigned images are supported: " + path.string());
  }
  const int channels = raw.channels();
  if (channels != 1 && channels != 3) {
    throw UnsupportedFormat(std::to_string(channels) + "-channel images are not supported: " +
                            path.string());
  }
  const double scale = full_scale(depth);
  std::vector<Plane> planes(static_cast<std::size_t>(channels), Plane(raw.rows, raw.cols));
  for (int r = 0; r < raw.rows; ++r) {
    for (int c = 0; c < raw.cols; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const double level = depth == 8
                                 ? static_cast<double>(raw.ptr<std::uint8_t>(r)[c * channels + ch])
                                 : static_cast<double>(raw.ptr<std::uint16_t>(r)[c * channels + ch]);
        // OpenCV stores colour as BGR
        const int band = channels == 3 ? 2 - ch : 0;
        planes[static_cast<std::size_t>(band)](r, c) = level / scale;
      }
    }
  }
  return MultiBandImage(std::move(planes), depth);
}

MultiBandImage quantize(const MultiBandImage& image, int depth) {
  const double scale = full_scale(depth);
  std::vector<Plane> planes;
  for (const auto& p : image.planes()) {
    planes.push_back(p.unaryExpr([scale](double v) { return std::round(v * scale) / scale; }));
  }
  return MultiBandImage(std::move(planes), depth);
}

void save_image(const MultiBandImage& image, const std::filesystem::path& path, int depth) {
  const double scale = full_scale(depth);
  const std::string ext = encoder_extension(path);
  const int channels = image.bands();
  const int type = depth == 8 ? CV_MAKETYPE(CV_8U, channels) : CV_MAKETYPE(CV_16U, channels);
  cv::Mat mat(image.height(), image.width(), type);
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const int band = channels == 3 ? 2 - ch : 0;
        const double level = std::round(image.band(band)(r, c) * scale);
        if (depth == 8) {
          mat.ptr<std::uint8_t>(r)[c * channels + ch] = static_cast<std::uint8_t>(level);
        } else {
          mat.ptr<std::uint16_t>(r)[c * channels + ch] = static_cast<std::uint16_t>(level);
        }
      }
    }
  }
  std::vector<unsigned char> encoded;
  if (!cv::imencode(ext, mat, encoded)) throw IoError("encoding failed for " + path.string());
  write_atomically(path, encoded);
}

}  // namespace sarfusion::io
