#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revival/quasienergy.hpp"
#include "revival/spectrum.hpp"

namespace revival {

using cplx = std::complex<double>;

struct LevelWindow {
  int n_min = 1;
  int n_max = 1;

  int size() const { return n_max - n_min + 1; }
  bool contains(double n) const { return n >= n_min && n <= n_max; }
};

/// [max(1, round(c) - 8 dn - 2N), round(c) + 8 dn + 2N].
LevelWindow default_window(double center, double delta_n, int N);

/// Lab-frame amplitudes C_n for n = n_min .. n_min + amps.size() - 1.
struct WavePacketState {
  int n_min = 1;
  std::vector<cplx> amps;
  double t = 0.0;

  int n_max() const { return n_min + static_cast<int>(amps.size()) - 1; }
  double norm_sq() const;
};

/// C_n proportional to exp(-(n - center)^2 / (4 delta_n^2)), real, positive
/// and normalized. Throws WindowError unless the window holds
/// center +- 5 delta_n (a window starting at n = 1 always covers the low side).
WavePacketState init_gaussian(double center, double delta_n,
                              LevelWindow window);

enum class Frame { Bare, Rotating };
enum class Integrator { Rk4, ExpMidpoint };

struct EvolutionConfig {
  Frame frame = Frame::Bare;
  bool rwa = false;
  double dt = 2.0 * std::numbers::pi / 200.0;
  double t_max = 2.0 * std::numbers::pi;
  int sample_stride = 1;
  Integrator integrator = Integrator::ExpMidpoint;
  /// Drive is lambda V sin(t + drive_phase); zero launches the packet at
  /// field zero.
  double drive_phase = 0.0;
  double edge_population_limit = 1e-10;
  double norm_drift_limit = 1e-6;
};

/// Complex autocorrelation A(t) = <psi(0)|psi(t)>, sampled uniformly.
struct AutocorrTrace {
  std::vector<double> times;
  std::vector<cplx> values;
  std::vector<double> norm_drift;  // sum |C|^2 - 1 at each sample
  std::uint64_t fingerprint = 0;   // hash of every input of the run

  std::size_t size() const { return times.size(); }
  double abs2(std::size_t i) const { return std::norm(values[i]); }
};

struct EvolutionResult {
  AutocorrTrace trace;
  WavePacketState final_state;
  double max_norm_drift = 0.0;
  double max_edge_population = 0.0;
};

/// Fixed-step integrator for i hbar dc/dt = H(t) c on a level window.
///
/// The working-frame amplitudes c relate to lab amplitudes by
/// C_n = c_n exp(-i phi_n t), phi_n = (E_r + (n - r) hbar / N) / hbar, in the
/// rotating frame and C = c in the bare frame. The RWA system only exists in
/// the rotating frame.
class Propagator {
 public:
  /// H(t) = diag(E_n) + lambda sin(t + phase) V.
  static Propagator full(const SpectrumModel& model,
                         const Eigen::MatrixXd& coupling,
                         const ResonanceParams& params, LevelWindow window,
                         Frame frame, Integrator integrator,
                         double drive_phase = 0.0);

  /// Decoupled N-block system with couplings (lambda V / 2i)(c_{m+N} - c_{m-N}).
  static Propagator rwa(const SpectrumModel& model,
                        const ResonanceParams& params, LevelWindow window,
                        Integrator integrator);

  /// Advances working-frame amplitudes from t to t + dt (dt may be negative).
  void step(Eigen::VectorXcd& c, double t, double dt) const;

  Eigen::VectorXcd to_frame(const Eigen::VectorXcd& lab, double t) const;
  Eigen::VectorXcd to_lab(const Eigen::VectorXcd& c, double t) const;

  const LevelWindow& window() const { return window_; }
  Frame frame() const { return frame_; }

 private:
  struct Block {
    std::vector<int> index;      // rows of the window in this block
    Eigen::VectorXd diag;        // working-frame diagonal energies
    Eigen::VectorXd omega;       // coupling phase rates, P(t) = diag(e^{i omega t})
    Eigen::MatrixXcd coupling;   // K, so H = diag + f(t) P K P^dagger
    Eigen::MatrixXcd modes;      // eigenvectors of K
    Eigen::VectorXd mode_energy; // eigenvalues of K
  };

  Propagator() = default;
  void add_block(Block block);
  double drive(double t) const;
  void step_block(const Block& b, Eigen::VectorXcd& c, double t,
                  double dt) const;

  LevelWindow window_;
  Frame frame_ = Frame::Bare;
  Integrator integrator_ = Integrator::ExpMidpoint;
  bool driven_ = true;  // false: f(t) = 1 (RWA)
  double lambda_ = 0.0;
  double drive_phase_ = 0.0;
  double hbar_ = 1.0;
  Eigen::VectorXd phi_;  // lab phase rates (rotating frame)
  std::vector<Block> blocks_;
};

/// Integrates the full coupled system. Never renormalizes; throws
/// IntegrationAccuracyError on norm drift or truncation-edge leakage.
EvolutionResult evolve(const WavePacketState& initial,
                       const SpectrumModel& model,
                       const Eigen::MatrixXd& coupling,
                       const ResonanceParams& params,
                       const EvolutionConfig& config);

/// Integrates the rotating-wave system; the N residue classes of m mod N are
/// independent blocks. config.frame is ignored.
EvolutionResult evolve_rwa(const WavePacketState& initial,
                           const SpectrumModel& model,
                           const ResonanceParams& params,
                           const EvolutionConfig& config);

/// sum_n |xi_n|^2 exp(-i eps_n t / hbar), evaluated directly. Same phase
/// convention as the propagator, so eps_n = E_n reproduces an undriven run.
AutocorrTrace predicted_autocorrelation(std::span<const cplx> xi,
                                        std::span<const double> eps,
                                        std::span<const double> times,
                                        double hbar_eff);

/// Writes "t,re_A,im_A,abs_A2,norm_drift" rows under the provenance line and
/// a "# trace=<fingerprint>" line.
void write_trace_csv(std::ostream& out, const AutocorrTrace& trace,
                     std::uint64_t config_hash);

/// Reads a trace CSV written by write_trace_csv ('#' lines are skipped).
/// Throws TraceTooShort on fewer than 3 samples.
AutocorrTrace read_trace_csv(std::istream& in);

}  // namespace revival
