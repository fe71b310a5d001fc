#pragma once

#include <cstddef>
#include <vector>

namespace gridflux::pricing {

// Trailing window of the last `capacity` aggregate step energies (kWh).
class PriceWindow {
 public:
  explicit PriceWindow(std::size_t capacity);

  void push(double total_kwh);
  void clear();

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buf_.size(); }
  bool empty() const { return size_ == 0; }
  double max() const;
  double min() const;
  double sum() const;
  // Most recently pushed total.
  double latest() const;

 private:
  std::vector<double> buf_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
};

enum class ParDenominator { kWindowSum, kCurrentStep };

// T times the peak-to-average ratio over the window: kappa*T*max/sum with
// kappa the number of filled entries. A zero window yields T.
double par_price(const PriceWindow& window, double step_hours);

// Literal reading with the current step alone in the denominator:
// capacity*T*max/latest. Unbounded as the current total approaches zero;
// returns T when the latest total is zero.
double par_price_current_step(const PriceWindow& window, double step_hours);

double quadratic_price(double coeff, double energy_kwh);

// -cost + w * energy
double reward(double cost, double energy_kwh, double constraint_weight);

inline double linear_cost(double price, double energy_kwh) {
  return price * energy_kwh;
}

}  // namespace gridflux::pricing
