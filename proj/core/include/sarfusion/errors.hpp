#pragma once

#include <stdexcept>
#include <string>

namespace sarfusion {

/// Base of every error raised by the library. Carries an optional pipeline
/// stage name that is prefixed to what() once set.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message)
      : std::runtime_error(message), message_(message), full_(message) {}

  const char* what() const noexcept override { return full_.c_str(); }

  const std::string& stage() const noexcept { return stage_; }
  const std::string& message() const noexcept { return message_; }

  void set_stage(std::string stage) {
    stage_ = std::move(stage);
    full_ = "[" + stage_ + "] " + message_;
  }

 private:
  std::string stage_;
  std::string message_;
  std::string full_;
};

#define SARFUSION_DEFINE_ERROR(Name)               \
  class Name : public Error {                      \
   public:                                         \
    explicit Name(const std::string& message)      \
        : Error(#Name ": " + message) {}           \
  }

SARFUSION_DEFINE_ERROR(DimensionError);
SARFUSION_DEFINE_ERROR(BandCountError);
SARFUSION_DEFINE_ERROR(InvalidArgument);
SARFUSION_DEFINE_ERROR(RankError);
SARFUSION_DEFINE_ERROR(NumericalError);
SARFUSION_DEFINE_ERROR(DataError);
SARFUSION_DEFINE_ERROR(DegenerateInput);
SARFUSION_DEFINE_ERROR(IoError);
SARFUSION_DEFINE_ERROR(UnsupportedFormat);
SARFUSION_DEFINE_ERROR(ChecksumError);
SARFUSION_DEFINE_ERROR(VersionError);
SARFUSION_DEFINE_ERROR(ConfigError);

#undef SARFUSION_DEFINE_ERROR

}  // namespace sarfusion
