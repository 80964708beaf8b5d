#include "rird/envelope.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace rird {
namespace {

constexpr double kEnvFloor = 1e-12;
constexpr double kLog10 = 2.302585092994045684;  // ln 10

double clamp3(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

struct Objective {
  std::span<const double> env;
  std::span<const double> pos;

  // Residuals r_n = log10(env_n^2) - log10(x1^2 e^{-2 x2 t_n} + x3^2) and the
  // Jacobian of the model part.
  double cost(const std::array<double, 3>& x) const {
    double s = 0.0;
    for (std::size_t n = 0; n < env.size(); ++n) {
      const double r = residual(x, n);
      s += r * r;
    }
    return s;
  }

  double residual(const std::array<double, 3>& x, std::size_t n) const {
    const double decay = x[0] * x[0] * std::exp(-2.0 * x[1] * pos[n]);
    const double f = std::max(decay + x[2] * x[2], 1e-280);
    return 2.0 * std::log10(env[n]) - std::log10(f);
  }

  void accumulate_normal(const std::array<double, 3>& x, Eigen::Matrix3d& jtj,
                         Eigen::Vector3d& jtr) const {
    jtj.setZero();
    jtr.setZero();
    for (std::size_t n = 0; n < env.size(); ++n) {
      const double e = std::exp(-2.0 * x[1] * pos[n]);
      const double decay = x[0] * x[0] * e;
      const double f = std::max(decay + x[2] * x[2], 1e-280);
      const double r = 2.0 * std::log10(env[n]) - std::log10(f);
      const double scale = 1.0 / (f * kLog10);
      Eigen::Vector3d j(2.0 * x[0] * e * scale,
                        -2.0 * pos[n] * decay * scale,
                        2.0 * x[2] * scale);
      jtj.noalias() += j * j.transpose();
      jtr.noalias() += j * r;
    }
  }
};

}  // namespace

EnvelopeInit default_envelope_init(std::span<const double> env,
                                   std::span<const double> pos) {
  EnvelopeInit start;
  const std::size_t n = env.size();
  // Head: max RMS over the first 5% of blocks (at least 3, so a silent
  // onset block cannot poison the level estimate). Tail: median over the
  // last 10%.
  const std::size_t head = std::min(n, std::max<std::size_t>(3, (n + 19) / 20));
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  start.x1 = *std::max_element(env.begin(), env.begin() + head);
  std::vector<double> tail_vals(env.end() - static_cast<std::ptrdiff_t>(tail),
                                env.end());
  std::nth_element(tail_vals.begin(), tail_vals.begin() + tail / 2,
                   tail_vals.end());
  start.x3 = tail_vals[tail / 2];

  // x2: least-squares slope of the log envelope across the decaying stretch
  // only. Including the floor-dominated blocks would flatten the slope and
  // start the optimizer inside the all-floor local minimum.
  const double knee_level = std::max(2.0 * start.x3, kEnvFloor);
  std::size_t decay_end = head;
  while (decay_end + tail < n && env[decay_end] > knee_level) ++decay_end;
  std::size_t from = 0, to = decay_end;
  if (to < from + 3) {  // no visible decay; fall back to the full middle
    from = head;
    to = n - std::min(tail, n - from);
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, count = 0.0;
  for (std::size_t b = from; b < to; ++b) {
    const double y = std::log(std::max(env[b], kEnvFloor));
    sx += pos[b];
    sy += y;
    sxx += pos[b] * pos[b];
    sxy += pos[b] * y;
    count += 1.0;
  }
  double slope = 0.0;
  if (count >= 2.0) {
    const double denom = count * sxx - sx * sx;
    if (denom > 0.0) slope = (count * sxy - sx * sy) / denom;
  }
  start.x2 = std::max(-slope, 1e-7);
  return start;
}

EnvelopeBounds EnvelopeBounds::defaults_for(std::span<const double> samples) {
  const double peak = std::max(peak_abs(samples), kEnvFloor);
  EnvelopeBounds b;
  b.lower = {1e-6 * peak, 1e-7, 0.0};
  b.upper = {1e3 * peak, 1.0, peak};
  return b;
}

std::vector<double> rms_envelope(std::span<const double> samples,
                                 std::size_t block) {
  if (block == 0) throw std::invalid_argument("rms_envelope: zero block");
  std::vector<double> env;
  env.reserve(samples.size() / block + 1);
  for (std::size_t start = 0; start < samples.size(); start += block) {
    const std::size_t count = std::min(block, samples.size() - start);
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = samples[start + i];
      acc += v * v;
    }
    env.push_back(std::max(std::sqrt(acc / static_cast<double>(count)),
                           kEnvFloor));
  }
  return env;
}

EnvelopeModel fit_decay_model(std::span<const double> env,
                              std::span<const double> positions,
                              const EnvelopeBounds& bounds,
                              const EnvelopeInit& init, double domain_rate,
                              std::vector<double>* objective_trace) {
  if (env.size() != positions.size() || env.empty()) {
    throw std::invalid_argument("fit_decay_model: envelope/position mismatch");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(bounds.lower[i] < bounds.upper[i]) ||
        !std::isfinite(bounds.lower[i]) || !std::isfinite(bounds.upper[i])) {
      throw std::invalid_argument("fit_decay_model: invalid bounds");
    }
  }

  Objective obj{env, positions};
  std::array<double, 3> x = {
      clamp3(init.x1, bounds.lower[0], bounds.upper[0]),
      clamp3(init.x2, bounds.lower[1], bounds.upper[1]),
      clamp3(init.x3, bounds.lower[2], bounds.upper[2])};

  double cost = obj.cost(x);
  if (objective_trace) objective_trace->push_back(cost);

  double lambda = 1e-3;
  Eigen::Matrix3d jtj;
  Eigen::Vector3d jtr;
  for (int iter = 0; iter < 200; ++iter) {
    obj.accumulate_normal(x, jtj, jtr);

    // Projected first-order stationarity: ignore gradient components that
    // push against an active bound. Gradient of the cost is -2 J^T r.
    double kkt = 0.0;
    for (int i = 0; i < 3; ++i) {
      double g = -2.0 * jtr(i);
      if (x[i] <= bounds.lower[i] && g > 0.0) g = 0.0;
      if (x[i] >= bounds.upper[i] && g < 0.0) g = 0.0;
      kkt = std::max(kkt, std::abs(g));
    }
    if (kkt < 1e-8) break;

    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::Matrix3d damped = jtj;
      for (int i = 0; i < 3; ++i) {
        damped(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      }
      const Eigen::Vector3d step = damped.ldlt().solve(jtr);
      std::array<double, 3> trial = {
          clamp3(x[0] + step(0), bounds.lower[0], bounds.upper[0]),
          clamp3(x[1] + step(1), bounds.lower[1], bounds.upper[1]),
          clamp3(x[2] + step(2), bounds.lower[2], bounds.upper[2])};
      const double trial_cost = obj.cost(trial);
      if (trial_cost < cost) {
        x = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (objective_trace) objective_trace->push_back(cost);
      } else {
        lambda *= 4.0;
        if (lambda > 1e14) break;
      }
    }
    if (!accepted) break;
  }

  EnvelopeModel model;
  model.x1 = x[0];
  model.x2 = x[1];
  model.x3 = x[2];
  model.fit_residual = cost;
  model.domain_rate = domain_rate;

  // No usable decay: either the floor dominates outright, or the fitted
  // decay is so slow it is indistinguishable from a constant over the
  // window (the (x1, x3) split is then a ridge; pin the floor to the
  // one-parameter optimum, the geometric mean).
  const double span = positions.back() - positions.front();
  if (x[2] >= x[0] || x[1] * span < 1e-2) {
    model.no_decay_detected = true;
    double log_mean = 0.0;
    for (double v : env) log_mean += std::log(std::max(v, kEnvFloor));
    log_mean /= static_cast<double>(env.size());
    model.x3 = clamp3(std::exp(log_mean), bounds.lower[2], bounds.upper[2]);
    model.x1 = bounds.lower[0];
    model.fit_residual = obj.cost({model.x1, model.x2, model.x3});
  }
  return model;
}

EnvelopeModel fit_envelope(const Signal& signal,
                           std::optional<EnvelopeBounds> bounds,
                           std::optional<EnvelopeInit> init) {
  validate(signal);
  if (signal.size() < 16) {
    throw std::invalid_argument("fit_envelope: need at least 16 samples");
  }
  if (peak_abs(signal.samples) == 0.0) {
    throw std::invalid_argument(
        "fit_envelope: all-zero signal has no envelope");
  }

  const std::vector<double> env = rms_envelope(signal.samples);
  std::vector<double> pos(env.size());
  for (std::size_t b = 0; b < env.size(); ++b) {
    const std::size_t start = b * kEnvelopeBlock;
    const std::size_t count =
        std::min(kEnvelopeBlock, signal.size() - start);
    pos[b] = static_cast<double>(start) + 0.5 * static_cast<double>(count - 1);
  }

  const EnvelopeBounds box =
      bounds ? *bounds : EnvelopeBounds::defaults_for(signal.samples);

  EnvelopeInit start = init ? *init
                            : default_envelope_init(env, pos);
  return fit_decay_model(env, pos, box, start, signal.sample_rate, nullptr);
}

double nsr(const EnvelopeModel& model) {
  if (!(model.x1 > 0.0)) {
    throw std::invalid_argument("nsr: x1 must be positive");
  }
  return model.x3 / model.x1;
}

double transition_time(const EnvelopeModel& model) {
  if (model.x3 <= 0.0) {
    throw NoTransition("no_transition: decay never meets a zero floor");
  }
  if (model.x3 >= model.x1) {
    throw NoTransition("no_transition: floor dominates from n = 0");
  }
  if (!(model.x2 > 0.0)) {
    throw NoTransition("no_transition: non-positive decay rate");
  }
  return std::log(model.x1 / model.x3) / model.x2;
}

double epsilon_at(const EnvelopeModel& model, double rate, double t_t,
                  std::ptrdiff_t n) {
  const std::ptrdiff_t knee = static_cast<std::ptrdiff_t>(std::floor(t_t));
  if (n <= knee) return kEpsilonFloor;
  const double c_nsr = model.x3 / model.x1;
  const double grown =
      1.0 - std::exp(-(model.x2 / rate) * static_cast<double>(n - knee) *
                     c_nsr);
  return std::max(grown, kEpsilonFloor);
}

ErrorSchedule error_schedule(const EnvelopeModel& model, double rate,
                             std::size_t length) {
  if (length == 0) {
    throw std::invalid_argument("error_schedule: length must be positive");
  }
  const double t_t = transition_time(model);
  ErrorSchedule schedule;
  schedule.transition_index = static_cast<std::ptrdiff_t>(std::floor(t_t));
  schedule.nsr = nsr(model);
  schedule.values.resize(length);
  for (std::size_t n = 0; n < length; ++n) {
    schedule.values[n] =
        epsilon_at(model, rate, t_t, static_cast<std::ptrdiff_t>(n));
  }
  return schedule;
}

ErrorSchedule constant_schedule(std::size_t length) {
  if (length == 0) {
    throw std::invalid_argument("constant_schedule: length must be positive");
  }
  ErrorSchedule schedule;
  schedule.transition_index = static_cast<std::ptrdiff_t>(length);
  schedule.nsr = 0.0;
  schedule.values.assign(length, kEpsilonFloor);
  return schedule;
}

}  // namespace rird
