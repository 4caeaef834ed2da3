#include "wrcosim/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrcosim {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty()) throw std::invalid_argument("time grid needs at least one point");
  for (std::size_t n = 0; n < times_.size(); ++n) {
    if (!std::isfinite(times_[n])) throw std::invalid_argument("non-finite grid time");
    if (n > 0 && !(times_[n] > times_[n - 1]))
      throw std::invalid_argument("time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !(t1 >= t0)) throw std::invalid_argument("bad uniform grid parameters");
  const auto steps =
      static_cast<std::size_t>(std::max(0.0, std::ceil((t1 - t0) / dt - 1e-9)));
  std::vector<double> times(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n)
    times[n] = steps == 0 ? t0 : t0 + (t1 - t0) * static_cast<double>(n) / static_cast<double>(steps);
  times.back() = steps == 0 ? t0 : t1;
  return TimeGrid(std::move(times));
}

TimeGrid TimeGrid::slice(std::size_t first, std::size_t last) const {
  if (first > last || last >= times_.size()) throw std::out_of_range("bad grid slice");
  return TimeGrid(std::vector<double>(times_.begin() + static_cast<std::ptrdiff_t>(first),
                                      times_.begin() + static_cast<std::ptrdiff_t>(last) + 1));
}

Waveform::Waveform(TimeGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("waveform grid and values differ in length");
}

Waveform Waveform::constant(const TimeGrid& grid, double value) {
  return Waveform(grid, std::vector<double>(grid.size(), value));
}

std::size_t Waveform::piece(double t) const {
  const double t0 = grid_.front();
  const double t1 = grid_.back();
  const double slack = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)});
  if (t < t0 - slack || t > t1 + slack)
    throw std::out_of_range("waveform evaluated outside its span");
  if (grid_.size() == 1) return 0;
  const auto times = grid_.times();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  auto idx = static_cast<std::size_t>(std::distance(times.begin(), it));
  idx = std::clamp<std::size_t>(idx, 1, times.size() - 1);
  return idx - 1;
}

double Waveform::at(double t) const {
  const std::size_t k = piece(t);
  if (grid_.size() == 1) return values_[0];
  const double ta = grid_[k];
  const double tb = grid_[k + 1];
  if (t <= ta) return values_[k];
  if (t >= tb) return values_[k + 1];
  const double s = (t - ta) / (tb - ta);
  return values_[k] + s * (values_[k + 1] - values_[k]);
}

double Waveform::slope(double t) const {
  const std::size_t k = piece(t);
  if (grid_.size() == 1) return 0.0;
  return (values_[k + 1] - values_[k]) / (grid_[k + 1] - grid_[k]);
}

Waveform Waveform::operator+(const Waveform& other) const {
  if (other.size() != size()) throw std::invalid_argument("waveform size mismatch");
  std::vector<double> out(values_);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += other.values_[n];
  return Waveform(grid_, std::move(out));
}

Waveform Waveform::operator-(const Waveform& other) const {
  if (other.size() != size()) throw std::invalid_argument("waveform size mismatch");
  std::vector<double> out(values_);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] -= other.values_[n];
  return Waveform(grid_, std::move(out));
}

double max_abs_diff(const Waveform& a, const Waveform& b) {
  if (a.size() != b.size()) throw std::invalid_argument("waveform size mismatch");
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

double max_abs(const Waveform& w) {
  double m = 0.0;
  for (double v : w.values()) m = std::max(m, std::abs(v));
  return m;
}

Waveform concatenate(std::span<const Waveform> pieces) {
  if (pieces.empty()) throw std::invalid_argument("nothing to concatenate");
  std::vector<double> times;
  std::vector<double> values;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const auto t = pieces[p].grid().times();
    const auto v = pieces[p].values();
    std::size_t start = 0;
    if (p > 0) {
      if (std::abs(t.front() - times.back()) > 1e-12 * std::max(1.0, std::abs(t.front())))
        throw std::invalid_argument("waveform pieces are not contiguous");
      start = 1;
    }
    times.insert(times.end(), t.begin() + static_cast<std::ptrdiff_t>(start), t.end());
    values.insert(values.end(), v.begin() + static_cast<std::ptrdiff_t>(start), v.end());
  }
  return Waveform(TimeGrid(std::move(times)), std::move(values));
}

}  // namespace wrcosim
