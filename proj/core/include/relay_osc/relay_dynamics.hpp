#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "relay_osc/linalg.hpp"
#include "relay_osc/plant.hpp"

namespace relay_osc {

struct RelayState {
  Vector x;
  int relay_sign = 1;
  double t = 0.0;
};

struct SwitchEvent {
  double t = 0.0;
  Vector x;
  int incoming_sign = 1;
  double transversal_speed = 0.0;  // C (A x - incoming_sign B)
  bool grazing = false;
};

struct Segment {
  Vector start;
  double t_start = 0.0;
  double duration = 0.0;
  int sign = 1;
};

struct Trajectory {
  std::vector<Segment> segments;
  std::vector<SwitchEvent> events;
  std::vector<double> sample_times;
  std::vector<Vector> samples;
  std::vector<int> sample_signs;
  Vector final_state;
  double t_end = 0.0;
  bool certified = true;
};

struct SlidingReport {
  bool entered_sliding = false;
  double entry_time = 0.0;
  Vector entry_state;
};

struct SimulationResult {
  Trajectory trajectory;
  SlidingReport sliding;
};

struct ExitResult {
  double tau = 0.0;
  Vector x;
  double transversal_speed = 0.0;
  bool grazing = false;
};

struct KthExitResult {
  Vector image;
  std::vector<SwitchEvent> events;
};

struct RelayOptions {
  std::optional<double> step_hint;  // crossing search step
  std::optional<double> t_max;      // exit-time horizon
  double grazing_threshold = 1e-8;
  double plane_tolerance = 1e-10;
};

struct SimulateOptions {
  double sample_dt = 0.0;  // 0 disables the uniform sample grid
  std::size_t max_switches = 1'000'000;
  double t_start = 0.0;
};

// x' = A x - B sign(C x)
class RelaySystem {
 public:
  explicit RelaySystem(StateSpace ss, RelayOptions options = {});

  const StateSpace& state_space() const { return ss_; }
  int order() const { return ss_.order(); }
  double step_hint() const { return step_; }
  double default_t_max() const { return t_max_; }

  Vector field(const Vector& x, int sign) const;  // A x - sign B
  Vector propagate(const Vector& x, int sign, double t) const;
  double output(const Vector& x) const { return ss_.c.dot(x); }
  bool on_plane(const Vector& x) const;

  // Relay sign that departs transversally from a point on the plane: +1 if
  // C(Ax - B) >= 0, else -1 if C(Ax + B) < 0, else 0 (sliding set).
  int departure_sign(const Vector& x) const;

  ExitResult exit(const Vector& xi, int sign, std::optional<double> t_max = {}) const;
  double exit_time(const Vector& xi, int sign, std::optional<double> t_max = {}) const;
  Vector exit_map(const Vector& xi, int sign) const;
  KthExitResult kth_exit_map(const Vector& xi, int k) const;

  SimulationResult simulate(const Vector& x0, double t_end,
                            const SimulateOptions& options = {}) const;

 private:
  double signed_output_after(const Vector& x, int sign, double t) const;
  void check_start(const Vector& xi, int sign) const;

  StateSpace ss_;
  RelayOptions options_;
  double step_ = 0.0;
  double t_max_ = 0.0;
  AffineFlow step_flow_;
};

}  // namespace relay_osc
