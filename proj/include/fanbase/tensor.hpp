#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fanbase/matrix.hpp"

namespace fanbase {

/// Tensor dimensions: time slots x fans x days.
struct Dims {
  std::size_t time = 0;
  std::size_t fans = 0;
  std::size_t days = 0;

  std::size_t count() const { return time * fans * days; }
  bool operator==(const Dims&) const = default;
};

/// Dense three-way array of power readings (kW), indexed (time slot, fan,
/// day). Storage is row-major by (time, fan, day): the day index varies
/// fastest. Immutable after construction; safe to share across threads.
class FanPowerTensor {
 public:
  /// Builds a tensor from a flat value list. Validates that the length is
  /// time*fans*days, every value is finite, and slot_minutes*time fits in a
  /// calendar day.
  static FanPowerTensor from_values(Dims dims, int slot_minutes, std::vector<double> values);

  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[flat_index(i, j, k)];
  }
  std::size_t flat_index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * dims_.fans + j) * dims_.days + k;
  }

  const Dims& dims() const { return dims_; }
  int slot_minutes() const { return slot_minutes_; }
  const std::vector<double>& values() const { return values_; }

 private:
  FanPowerTensor(Dims dims, int slot_minutes, std::vector<double> values)
      : dims_(dims), slot_minutes_(slot_minutes), values_(std::move(values)) {}

  Dims dims_;
  int slot_minutes_ = 1;
  std::vector<double> values_;
};

/// The set of known entries; the complement is what the completion imputes.
class ObservationMask {
 public:
  ObservationMask() = default;
  explicit ObservationMask(Dims dims, bool observed = true)
      : dims_(dims), flags_(dims.count(), observed ? 1 : 0) {}

  static ObservationMask all_observed(Dims dims) { return ObservationMask(dims, true); }

  bool observed(std::size_t i, std::size_t j, std::size_t k) const {
    return flags_[(i * dims_.fans + j) * dims_.days + k] != 0;
  }
  void set(std::size_t i, std::size_t j, std::size_t k, bool observed) {
    flags_[(i * dims_.fans + j) * dims_.days + k] = observed ? 1 : 0;
  }

  std::size_t observed_count() const;
  const Dims& dims() const { return dims_; }
  const std::vector<std::uint8_t>& flags() const { return flags_; }

 private:
  Dims dims_;
  std::vector<std::uint8_t> flags_;
};

/// Rank-r CP model: one factor vector per component along each mode, stored
/// as T x r, N x r and S x r matrices (component q = column q).
struct CpModel {
  std::size_t rank = 0;
  Matrix time_factors;  // T x r
  Matrix fan_factors;   // N x r
  Matrix day_factors;   // S x r

  Dims dims() const { return {time_factors.rows(), fan_factors.rows(), day_factors.rows()}; }
};

/// Model value at (i, j, k): the sum over components of the factor products.
/// Bounds-checked; throws IndexOutOfBounds.
double cp_eval(const CpModel& model, std::size_t i, std::size_t j, std::size_t k);

/// Densifies the model: every entry of the result equals cp_eval at that
/// index, bitwise (same summation order).
FanPowerTensor cp_full(const CpModel& model, int slot_minutes);

/// Mode-n unfolding in the Kolda-Bader convention. Mode 1 gives a
/// T x (N*S) matrix whose column for (fan j, day k) is j + k*N (0-based,
/// fan fastest); modes 2 and 3 analogous with the earlier modes fastest.
/// The gradient kernel depends on this ordering matching khatri_rao.
Matrix mode_unfold(const FanPowerTensor& tensor, int mode);

/// Inverse of mode_unfold; reproduces the tensor exactly.
FanPowerTensor refold(const Matrix& unfolded, int mode, Dims dims, int slot_minutes);

/// Column-wise Kronecker product: column q of the result at row a*n + b is
/// A(a,q) * B(b,q) (B's row index fastest). Requires equal column counts.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

}  // namespace fanbase
