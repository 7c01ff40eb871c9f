#include "fanbase/tensor.hpp"

#include <cmath>
#include <string>

#include "fanbase/errors.hpp"

namespace fanbase {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != m.cols()) fail(ErrorCode::LengthMismatch, "ragged row list");
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

FanPowerTensor FanPowerTensor::from_values(Dims dims, int slot_minutes,
                                           std::vector<double> values) {
  if (dims.time < 1 || dims.fans < 1 || dims.days < 1)
    fail(ErrorCode::DimensionMismatch, "all tensor dimensions must be >= 1");
  if (slot_minutes < 1) fail(ErrorCode::InvalidConfig, "slot_minutes must be >= 1");
  if (static_cast<std::size_t>(slot_minutes) * dims.time > 1440)
    fail(ErrorCode::InvalidConfig, "slot_minutes * time exceeds a calendar day");
  if (values.size() != dims.count())
    fail(ErrorCode::LengthMismatch, "expected " + std::to_string(dims.count()) +
                                        " values, got " + std::to_string(values.size()));
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (!std::isfinite(values[idx]))
      fail(ErrorCode::NonFiniteValue, "non-finite value at flat index " + std::to_string(idx));
  }
  return FanPowerTensor(dims, slot_minutes, std::move(values));
}

std::size_t ObservationMask::observed_count() const {
  std::size_t n = 0;
  for (auto f : flags_) n += f;
  return n;
}

double cp_eval(const CpModel& model, std::size_t i, std::size_t j, std::size_t k) {
  const Dims d = model.dims();
  if (i >= d.time || j >= d.fans || k >= d.days)
    fail(ErrorCode::IndexOutOfBounds, "cp_eval index outside model dimensions");
  const std::size_t r = model.rank;
  const double* a = model.time_factors.row(i);
  const double* b = model.fan_factors.row(j);
  const double* c = model.day_factors.row(k);
  double sum = 0.0;
  for (std::size_t q = 0; q < r; ++q) sum += a[q] * b[q] * c[q];
  return sum;
}

FanPowerTensor cp_full(const CpModel& model, int slot_minutes) {
  const Dims d = model.dims();
  std::vector<double> values(d.count());
  std::size_t idx = 0;
  for (std::size_t i = 0; i < d.time; ++i)
    for (std::size_t j = 0; j < d.fans; ++j)
      for (std::size_t k = 0; k < d.days; ++k) values[idx++] = cp_eval(model, i, j, k);
  return FanPowerTensor::from_values(d, slot_minutes, std::move(values));
}

namespace {

// Kolda-Bader column index of (i,j,k) for the given mode, 0-based.
inline std::size_t unfold_column(int mode, std::size_t i, std::size_t j, std::size_t k,
                                 const Dims& d) {
  switch (mode) {
    case 1: return j + k * d.fans;
    case 2: return i + k * d.time;
    default: return i + j * d.time;
  }
}

}  // namespace

Matrix mode_unfold(const FanPowerTensor& tensor, int mode) {
  if (mode < 1 || mode > 3) fail(ErrorCode::InvalidMode, "mode must be 1, 2 or 3");
  const Dims& d = tensor.dims();
  const std::size_t nrows = mode == 1 ? d.time : (mode == 2 ? d.fans : d.days);
  Matrix out(nrows, d.count() / nrows);
  for (std::size_t i = 0; i < d.time; ++i)
    for (std::size_t j = 0; j < d.fans; ++j)
      for (std::size_t k = 0; k < d.days; ++k) {
        const std::size_t row = mode == 1 ? i : (mode == 2 ? j : k);
        out(row, unfold_column(mode, i, j, k, d)) = tensor.at(i, j, k);
      }
  return out;
}

FanPowerTensor refold(const Matrix& unfolded, int mode, Dims dims, int slot_minutes) {
  if (mode < 1 || mode > 3) fail(ErrorCode::InvalidMode, "mode must be 1, 2 or 3");
  const std::size_t nrows = mode == 1 ? dims.time : (mode == 2 ? dims.fans : dims.days);
  if (unfolded.rows() != nrows || unfolded.size() != dims.count())
    fail(ErrorCode::DimensionMismatch, "unfolded matrix does not match target dimensions");
  std::vector<double> values(dims.count());
  for (std::size_t i = 0; i < dims.time; ++i)
    for (std::size_t j = 0; j < dims.fans; ++j)
      for (std::size_t k = 0; k < dims.days; ++k) {
        const std::size_t row = mode == 1 ? i : (mode == 2 ? j : k);
        values[(i * dims.fans + j) * dims.days + k] =
            unfolded(row, unfold_column(mode, i, j, k, dims));
      }
  return FanPowerTensor::from_values(dims, slot_minutes, std::move(values));
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    fail(ErrorCode::ColumnMismatch, "khatri_rao operands must have equal column counts");
  Matrix out(a.rows() * b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double* dst = out.row(i * b.rows() + j);
      const double* ra = a.row(i);
      const double* rb = b.row(j);
      for (std::size_t q = 0; q < a.cols(); ++q) dst[q] = ra[q] * rb[q];
    }
  return out;
}

}  // namespace fanbase
