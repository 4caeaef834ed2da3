#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wrcosim {

/// Strictly increasing sample times in seconds, at least one point.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  /// Uniform grid on [t0, t1] with ceil((t1 - t0) / dt) steps, so the
  /// effective step never exceeds dt.
  static TimeGrid uniform(double t0, double t1, double dt);

  std::size_t size() const { return times_.size(); }
  std::size_t steps() const { return times_.size() - 1; }
  double operator[](std::size_t n) const { return times_[n]; }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  std::span<const double> times() const { return times_; }

  /// Points first..last inclusive.
  TimeGrid slice(std::size_t first, std::size_t last) const;

 private:
  std::vector<double> times_;
};

/// Sampled signal with piecewise-linear interpolation between samples.
/// Evaluation outside [front, back] throws std::out_of_range.
class Waveform {
 public:
  Waveform(TimeGrid grid, std::vector<double> values);
  static Waveform constant(const TimeGrid& grid, double value);

  const TimeGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t n) const { return values_[n]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  double at(double t) const;
  /// Slope of the linear piece containing t; right-continuous except at the
  /// final sample, where the last piece is used.
  double slope(double t) const;

  Waveform operator+(const Waveform& other) const;
  Waveform operator-(const Waveform& other) const;

 private:
  std::size_t piece(double t) const;

  TimeGrid grid_;
  std::vector<double> values_;
};

/// Max-norm of the sample-wise difference; both waveforms must share a grid
/// of the same length.
double max_abs_diff(const Waveform& a, const Waveform& b);
double max_abs(const Waveform& w);

/// Joins consecutive waveforms whose end and start times coincide, dropping
/// the duplicated boundary sample.
Waveform concatenate(std::span<const Waveform> pieces);

}  // namespace wrcosim
