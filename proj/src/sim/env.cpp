#include "gridflux/env.hpp"

#include <stdexcept>

namespace gridflux {

void GridObservation::encode(double step_hours, int queue_cap,
                             std::span<double> out) const {
  const std::size_t m = op_flags.size();
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = op_flags[i];
    out[m + i] = times_to_free[i] / step_hours;
    out[2 * m + i] = head_durations[i] / step_hours;
    out[3 * m + i] = queue_lens[i] / queue_cap;
  }
  std::size_t k = 4 * m;
  if (flags.include_price) out[k++] = prev_price / step_hours;
  if (flags.include_time) out[k++] = time_of_day;
}

void encode_household_state(const sim::HouseholdState& h, double step_hours,
                            int queue_cap, std::span<double> out) {
  const std::size_t m = h.appliances.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = h.appliances[i];
    out[i] = a.operating() ? 1.0 : 0.0;
    out[m + i] = a.time_to_free() / step_hours;
    out[2 * m + i] = a.next_task_duration() / step_hours;
    out[3 * m + i] = static_cast<double>(a.queue_len()) / queue_cap;
  }
}

namespace {

EnvConfig finalized(EnvConfig c) {
  c.finalize();
  return c;
}

}  // namespace

GridEnv::GridEnv(EnvConfig config)
    : config_(finalized(std::move(config))),
      window_(static_cast<std::size_t>(config_.price_window)) {
  durations_ = {config_.step_hours, config_.fixed_durations};
  reset();
}

std::size_t GridEnv::obs_dim() const {
  return GridObservation::dimension(n_appliances(), flags());
}

StepResult GridEnv::reset() { return reset(config_.seed); }

StepResult GridEnv::reset(std::uint64_t seed) {
  config_.seed = seed;
  const int n = config_.n_households;
  const std::size_t m = n_appliances();
  households_.assign(n, sim::HouseholdState(m));
  streams_.clear();
  for (int i = 0; i < n; ++i) {
    const std::uint64_t owner = config_.shared_household_streams ? 0 : i;
    streams_.push_back(sim::HouseholdStreams::make(seed, owner, m));
  }
  window_.clear();
  prev_price_.assign(n, config_.step_hours);
  step_ = 0;
  StepResult r = observe();
  r.rewards.assign(n, 0.0);
  r.info.energy.assign(n, 0.0);
  r.info.cost.assign(n, 0.0);
  r.info.price = prev_price_;
  r.info.arrived.assign(n, 0);
  r.info.completed.assign(n, 0);
  r.info.started.assign(n * m, 0);
  return r;
}

StepResult GridEnv::step(std::span<const double> joint_action) {
  if (done()) throw std::logic_error("step() called on a finished episode");
  const int n = config_.n_households;
  const std::size_t m = n_appliances();
  if (joint_action.size() != n * m) {
    throw std::invalid_argument("joint action must hold N*M delays");
  }
  StepInfo info;
  info.interval = interval();
  info.energy.resize(n);
  info.cost.resize(n);
  info.price.resize(n);
  info.arrived.resize(n);
  info.completed.resize(n);
  info.started.assign(n * m, 0);

  for (int i = 0; i < n; ++i) {
    const auto& specs = config_.specs_for(i);
    info.arrived[i] = sim::sample_arrivals(households_[i], specs, info.interval,
                                           streams_[i], durations_);
    sim::apply_actions(households_[i], joint_action.subspan(i * m, m),
                       config_.step_hours,
                       std::span<std::uint8_t>(info.started).subspan(i * m, m));
    info.energy[i] = sim::advance_time(households_[i], specs,
                                       config_.step_hours, info.completed[i]);
    info.aggregate_energy += info.energy[i];
  }

  window_.push(info.aggregate_energy);
  std::vector<double> rewards(n);
  if (config_.price_mode == PriceMode::kParLinear) {
    info.grid_price =
        config_.par_current_step
            ? pricing::par_price_current_step(window_, config_.step_hours)
            : pricing::par_price(window_, config_.step_hours);
    for (int i = 0; i < n; ++i) {
      info.price[i] = info.grid_price;
      info.cost[i] = pricing::linear_cost(info.grid_price, info.energy[i]);
    }
  } else {
    const double b = config_.quad_coeff(info.interval);
    double total_cost = 0.0;
    for (int i = 0; i < n; ++i) {
      info.cost[i] = pricing::quadratic_price(b, info.energy[i]);
      // unit cost actually paid: b * E_n
      info.price[i] = b * info.energy[i];
      total_cost += info.cost[i];
    }
    info.grid_price = info.aggregate_energy > 0.0
                          ? total_cost / info.aggregate_energy
                          : 0.0;
  }
  for (int i = 0; i < n; ++i) {
    rewards[i] = pricing::reward(info.cost[i], info.energy[i],
                                 config_.constraint_weight);
  }
  prev_price_ = info.price;
  ++step_;

  StepResult r = observe();
  r.rewards = std::move(rewards);
  r.info = std::move(info);
  return r;
}

StepResult GridEnv::observe() const {
  const int n = config_.n_households;
  const std::size_t m = n_appliances();
  StepResult r;
  r.observations.resize(n);
  r.joint_state.resize(n * state_dim());
  const double tod = static_cast<double>(interval()) / config_.intervals_per_day;
  for (int i = 0; i < n; ++i) {
    const auto& h = households_[i];
    auto& o = r.observations[i];
    o.flags = flags();
    o.op_flags.resize(m);
    o.times_to_free.resize(m);
    o.head_durations.resize(m);
    o.queue_lens.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& a = h.appliances[j];
      o.op_flags[j] = a.operating() ? 1.0 : 0.0;
      o.times_to_free[j] = a.time_to_free();
      o.head_durations[j] = a.next_task_duration();
      o.queue_lens[j] = static_cast<double>(a.queue_len());
    }
    o.prev_price = prev_price_[i];
    o.time_of_day = tod;
    encode_household_state(
        h, config_.step_hours, config_.queue_cap,
        std::span<double>(r.joint_state).subspan(i * state_dim(), state_dim()));
  }
  r.done = done();
  return r;
}

}  // namespace gridflux
