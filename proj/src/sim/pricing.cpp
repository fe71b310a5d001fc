#include "gridflux/pricing.hpp"

#include <algorithm>

#include "gridflux/errors.hpp"

namespace gridflux::pricing {

PriceWindow::PriceWindow(std::size_t capacity) : buf_(capacity, 0.0) {
  if (capacity == 0) throw ConfigError("price_window must be >= 1");
}

void PriceWindow::push(double total_kwh) {
  buf_[head_] = total_kwh;
  head_ = (head_ + 1) % buf_.size();
  size_ = std::min(size_ + 1, buf_.size());
}

void PriceWindow::clear() {
  std::fill(buf_.begin(), buf_.end(), 0.0);
  head_ = 0;
  size_ = 0;
}

double PriceWindow::max() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    m = std::max(m, buf_[(head_ + buf_.size() - 1 - i) % buf_.size()]);
  }
  return m;
}

double PriceWindow::min() const {
  if (size_ == 0) return 0.0;
  double m = latest();
  for (std::size_t i = 0; i < size_; ++i) {
    m = std::min(m, buf_[(head_ + buf_.size() - 1 - i) % buf_.size()]);
  }
  return m;
}

double PriceWindow::sum() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    s += buf_[(head_ + buf_.size() - 1 - i) % buf_.size()];
  }
  return s;
}

double PriceWindow::latest() const {
  return buf_[(head_ + buf_.size() - 1) % buf_.size()];
}

double par_price(const PriceWindow& window, double step_hours) {
  const double total = window.sum();
  if (window.empty() || total <= 0.0) return step_hours;
  // A flat window has PAR exactly 1; the summed denominator may round.
  if (window.max() == window.min()) return step_hours;
  const double kappa = static_cast<double>(window.size());
  return kappa * step_hours * window.max() / total;
}

double par_price_current_step(const PriceWindow& window, double step_hours) {
  if (window.empty() || window.latest() <= 0.0) return step_hours;
  const double kappa = static_cast<double>(window.capacity());
  return kappa * step_hours * window.max() / window.latest();
}

double quadratic_price(double coeff, double energy_kwh) {
  return coeff * energy_kwh * energy_kwh;
}

double reward(double cost, double energy_kwh, double constraint_weight) {
  return -cost + constraint_weight * energy_kwh;
}

}  // namespace gridflux::pricing
