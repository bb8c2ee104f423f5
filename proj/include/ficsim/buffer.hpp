#ifndef FICSIM_BUFFER_HPP
#define FICSIM_BUFFER_HPP

#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace ficsim {

// Exact one-period delay line: lookup(t - T) returns the value written
// exactly N steps earlier, bit-for-bit. No interpolation anywhere in the
// period-delay path (T = N*h exactly, all lookups on the h-grid).
template <typename T>
class PeriodBuffer {
 public:
  explicit PeriodBuffer(std::size_t N) : data_(N), written_(0) {
    if (N == 0) throw ConfigError("PeriodBuffer: N must be positive");
  }

  std::size_t size() const { return data_.size(); }

  // Value written N steps ago. Must only be called once a full period of
  // history exists (i.e. from step N onward).
  const T& delayed(std::size_t step) const {
    if (step < data_.size())
      throw BufferUnderflow("PeriodBuffer::delayed called before one full period");
    if (written_ + data_.size() <= step)
      throw BufferUnderflow("PeriodBuffer::delayed: value for this step was never written");
    return data_[step % data_.size()];
  }

  // Store the value for this step (overwrites the slot that just expired).
  void write(std::size_t step, T value) {
    data_[step % data_.size()] = std::move(value);
    if (step + 1 > written_) written_ = step + 1;
  }

 private:
  std::vector<T> data_;
  std::size_t written_;  // one past the highest step written
};

}  // namespace ficsim

#endif
