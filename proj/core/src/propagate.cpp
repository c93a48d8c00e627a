#include "revival/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "revival/errors.hpp"
#include "revival/fingerprint.hpp"

namespace revival {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kI{0.0, 1.0};

void append(std::string& s, double x) {
  s += format_number(x);
  s += ',';
}

std::uint64_t run_fingerprint(std::string_view kind,
                              const WavePacketState& initial,
                              const SpectrumModel& model,
                              const Eigen::MatrixXd* coupling,
                              const ResonanceParams& params,
                              const EvolutionConfig& config) {
  std::string s(kind);
  s += '|';
  append(s, static_cast<double>(model.kind == SpectrumModel::Kind::Box));
  append(s, model.hbar_eff);
  append(s, model.c);
  append(s, model.k);
  s += '|';
  append(s, params.N);
  append(s, params.r);
  append(s, params.lambda);
  append(s, params.V);
  append(s, params.hbar_eff);
  s += '|';
  append(s, static_cast<double>(config.frame == Frame::Rotating));
  append(s, static_cast<double>(config.rwa));
  append(s, config.dt);
  append(s, config.t_max);
  append(s, config.sample_stride);
  append(s, static_cast<double>(config.integrator == Integrator::Rk4));
  append(s, config.drive_phase);
  append(s, config.edge_population_limit);
  append(s, config.norm_drift_limit);
  s += '|';
  append(s, initial.n_min);
  append(s, initial.t);
  for (const auto& a : initial.amps) {
    append(s, a.real());
    append(s, a.imag());
  }
  if (coupling != nullptr) {
    s += '|';
    for (Eigen::Index i = 0; i < coupling->rows(); ++i) {
      for (Eigen::Index j = 0; j < coupling->cols(); ++j) {
        append(s, (*coupling)(i, j));
      }
    }
  }
  return fnv1a64(s);
}

void validate(const WavePacketState& initial, const EvolutionConfig& config) {
  if (initial.amps.empty()) throw DomainError("empty initial state");
  if (initial.n_min < 1) throw DomainError("level window must start at n >= 1");
  if (!(config.dt > 0.0)) throw DomainError("dt must be positive");
  if (config.dt > kTwoPi / 100.0 * (1.0 + 1e-12)) {
    throw DomainError("dt must not exceed 2 pi / 100 (100 steps per period)");
  }
  if (!(config.t_max > 0.0)) throw DomainError("t_max must be positive");
  if (config.sample_stride < 1) throw DomainError("sample_stride must be >= 1");
}

// Largest population among the outermost N levels on each truncated side.
double edge_population(const Eigen::VectorXcd& c, int n_min, int N) {
  const int size = static_cast<int>(c.size());
  const int width = std::min(std::max(N, 1), size);
  double worst = 0.0;
  for (int i = size - width; i < size; ++i) worst = std::max(worst, std::norm(c[i]));
  if (n_min > 1) {
    for (int i = 0; i < width; ++i) worst = std::max(worst, std::norm(c[i]));
  }
  return worst;
}

EvolutionResult run(const Propagator& prop, const WavePacketState& initial,
                    int N, const EvolutionConfig& config,
                    std::uint64_t fingerprint) {
  const int size = static_cast<int>(initial.amps.size());
  Eigen::VectorXcd psi0(size);
  for (int i = 0; i < size; ++i) psi0[i] = initial.amps[i];

  Eigen::VectorXcd c = prop.to_frame(psi0, 0.0);
  const double norm0 = c.squaredNorm();
  const long long steps = std::llround(config.t_max / config.dt);

  EvolutionResult res;
  res.trace.fingerprint = fingerprint;
  res.trace.times.reserve(static_cast<std::size_t>(steps / config.sample_stride + 1));
  res.trace.times.push_back(0.0);
  res.trace.values.push_back(cplx{1.0, 0.0});
  res.trace.norm_drift.push_back(norm0 - 1.0);
  res.max_norm_drift = std::abs(norm0 - 1.0);

  for (long long k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k - 1) * config.dt;
    prop.step(c, t, config.dt);
    const double tk = static_cast<double>(k) * config.dt;

    const double norm = c.squaredNorm();
    const double drift = std::abs(norm - norm0);
    res.max_norm_drift = std::max(res.max_norm_drift, std::abs(norm - 1.0));
    if (!(drift <= config.norm_drift_limit)) {
      std::ostringstream msg;
      msg << "norm drift " << drift << " exceeds " << config.norm_drift_limit
          << " at t = " << tk << "; try dt = " << config.dt / 2.0;
      throw IntegrationAccuracyError(msg.str(), config.dt / 2.0);
    }
    const double edge = edge_population(c, initial.n_min, N);
    res.max_edge_population = std::max(res.max_edge_population, edge);
    if (edge > config.edge_population_limit) {
      std::ostringstream msg;
      msg << "population " << edge << " reached the truncation edge of ["
          << initial.n_min << ", " << initial.n_max() << "] at t = " << tk
          << "; widen the level window";
      throw IntegrationAccuracyError(msg.str(), config.dt);
    }

    if (k % config.sample_stride == 0) {
      const Eigen::VectorXcd lab = prop.to_lab(c, tk);
      res.trace.times.push_back(tk);
      res.trace.values.push_back(psi0.dot(lab));
      res.trace.norm_drift.push_back(norm - 1.0);
    }
  }

  const double t_end = static_cast<double>(steps) * config.dt;
  const Eigen::VectorXcd lab = prop.to_lab(c, t_end);
  res.final_state.n_min = initial.n_min;
  res.final_state.t = t_end;
  res.final_state.amps.assign(lab.data(), lab.data() + lab.size());
  return res;
}

}  // namespace

LevelWindow default_window(double center, double delta_n, int N) {
  const long long c = std::llround(center);
  const long long pad = static_cast<long long>(std::ceil(8.0 * delta_n)) + 2LL * N;
  return LevelWindow{static_cast<int>(std::max(1LL, c - pad)),
                     static_cast<int>(c + pad)};
}

double WavePacketState::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amps) s += std::norm(a);
  return s;
}

WavePacketState init_gaussian(double center, double delta_n,
                              LevelWindow window) {
  if (!(delta_n > 0.0)) throw DomainError("delta_n must be positive");
  if (window.n_min < 1 || window.n_max < window.n_min) {
    throw WindowError("invalid level window");
  }
  // There are no levels below n = 1, so a window starting there is never
  // short on the low side.
  const bool low_ok = window.n_min == 1 || window.contains(center - 5.0 * delta_n);
  if (!low_ok || !window.contains(center + 5.0 * delta_n)) {
    std::ostringstream msg;
    msg << "window [" << window.n_min << ", " << window.n_max
        << "] does not contain center +- 5 delta_n = [" << center - 5.0 * delta_n
        << ", " << center + 5.0 * delta_n << "]";
    throw WindowError(msg.str());
  }

  WavePacketState s;
  s.n_min = window.n_min;
  s.amps.resize(static_cast<std::size_t>(window.size()));
  double total = 0.0;
  for (int i = 0; i < window.size(); ++i) {
    const double x = (window.n_min + i - center) / delta_n;
    const double w = std::exp(-0.25 * x * x);
    s.amps[i] = w;
    total += w * w;
  }
  if (!(total > 0.0)) throw WindowError("packet has no weight inside the window");
  const double scale = 1.0 / std::sqrt(total);
  for (auto& a : s.amps) a *= scale;
  return s;
}

Propagator Propagator::full(const SpectrumModel& model,
                            const Eigen::MatrixXd& coupling,
                            const ResonanceParams& params, LevelWindow window,
                            Frame frame, Integrator integrator,
                            double drive_phase) {
  const int size = window.size();
  if (coupling.rows() != size || coupling.cols() != size) {
    throw DomainError("coupling matrix does not match the level window");
  }
  Propagator p;
  p.window_ = window;
  p.frame_ = frame;
  p.integrator_ = integrator;
  p.driven_ = true;
  p.lambda_ = params.lambda;
  p.drive_phase_ = drive_phase;
  p.hbar_ = params.hbar_eff;

  const double e_r = energy(model, params.r);
  p.phi_.resize(size);
  Block b;
  b.index.resize(size);
  b.diag.resize(size);
  b.omega = Eigen::VectorXd::Zero(size);
  for (int i = 0; i < size; ++i) {
    const double n = window.n_min + i;
    const double rel = (n - params.r) / params.N;
    p.phi_[i] = (e_r + rel * params.hbar_eff) / params.hbar_eff;
    b.index[i] = i;
    const double e_n = energy(model, n);
    if (frame == Frame::Bare) {
      b.diag[i] = e_n;
    } else {
      b.diag[i] = e_n - e_r - rel * params.hbar_eff;
      b.omega[i] = rel;
    }
  }
  b.coupling = coupling.cast<cplx>();
  p.add_block(std::move(b));
  return p;
}

Propagator Propagator::rwa(const SpectrumModel& model,
                           const ResonanceParams& params, LevelWindow window,
                           Integrator integrator) {
  const int size = window.size();
  const int N = params.N;
  Propagator p;
  p.window_ = window;
  p.frame_ = Frame::Rotating;
  p.integrator_ = integrator;
  p.driven_ = false;
  p.lambda_ = params.lambda;
  p.hbar_ = params.hbar_eff;

  const double e_r = energy(model, params.r);
  p.phi_.resize(size);
  for (int i = 0; i < size; ++i) {
    const double rel = (window.n_min + i - params.r) / N;
    p.phi_[i] = (e_r + rel * params.hbar_eff) / params.hbar_eff;
  }

  // lambda V / (2i) on (m, m+N), its conjugate on (m+N, m).
  const cplx hop = params.lambda * params.V / (2.0 * kI);
  for (int residue = 0; residue < std::min(N, size); ++residue) {
    Block b;
    for (int i = residue; i < size; i += N) b.index.push_back(i);
    const int m = static_cast<int>(b.index.size());
    b.diag.resize(m);
    b.omega = Eigen::VectorXd::Zero(m);
    b.coupling = Eigen::MatrixXcd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      const double n = window.n_min + b.index[j];
      const double rel = (n - params.r) / N;
      b.diag[j] = energy(model, n) - e_r - rel * params.hbar_eff;
      if (j + 1 < m) {
        b.coupling(j, j + 1) = hop;
        b.coupling(j + 1, j) = std::conj(hop);
      }
    }
    p.add_block(std::move(b));
  }
  return p;
}

void Propagator::add_block(Block block) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(block.coupling);
  if (eig.info() != Eigen::Success) {
    throw ConvergenceError("coupling eigendecomposition failed");
  }
  block.modes = eig.eigenvectors();
  block.mode_energy = eig.eigenvalues();
  blocks_.push_back(std::move(block));
}

double Propagator::drive(double t) const {
  return driven_ ? lambda_ * std::sin(t + drive_phase_) : 1.0;
}

void Propagator::step(Eigen::VectorXcd& c, double t, double dt) const {
  for (const auto& b : blocks_) step_block(b, c, t, dt);
}

void Propagator::step_block(const Block& b, Eigen::VectorXcd& c, double t,
                            double dt) const {
  const int m = static_cast<int>(b.index.size());
  Eigen::VectorXcd y(m);
  for (int j = 0; j < m; ++j) y[j] = c[b.index[j]];

  if (integrator_ == Integrator::ExpMidpoint) {
    // Strang splitting: exact diagonal half steps around the coupling
    // exponential frozen at the midpoint.
    const double tm = t + 0.5 * dt;
    const double s = drive(tm) * dt / hbar_;
    Eigen::VectorXcd half(m);
    for (int j = 0; j < m; ++j) half[j] = std::exp(-kI * (b.diag[j] * 0.5 * dt / hbar_));

    y = y.cwiseProduct(half);
    for (int j = 0; j < m; ++j) y[j] *= std::exp(-kI * (b.omega[j] * tm));
    Eigen::VectorXcd modal = b.modes.adjoint() * y;
    for (int j = 0; j < m; ++j) modal[j] *= std::exp(-kI * (s * b.mode_energy[j]));
    y = b.modes * modal;
    for (int j = 0; j < m; ++j) y[j] *= std::exp(kI * (b.omega[j] * tm));
    y = y.cwiseProduct(half);
  } else {
    auto rhs = [&](double tau, const Eigen::VectorXcd& v) {
      Eigen::VectorXcd w(m);
      for (int j = 0; j < m; ++j) w[j] = std::exp(-kI * (b.omega[j] * tau)) * v[j];
      Eigen::VectorXcd kv = b.coupling * w;
      for (int j = 0; j < m; ++j) kv[j] *= std::exp(kI * (b.omega[j] * tau));
      Eigen::VectorXcd out = b.diag.cast<cplx>().cwiseProduct(v) + drive(tau) * kv;
      return Eigen::VectorXcd((-kI / hbar_) * out);
    };
    const Eigen::VectorXcd k1 = rhs(t, y);
    const Eigen::VectorXcd k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
    const Eigen::VectorXcd k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
    const Eigen::VectorXcd k4 = rhs(t + dt, y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  for (int j = 0; j < m; ++j) c[b.index[j]] = y[j];
}

Eigen::VectorXcd Propagator::to_frame(const Eigen::VectorXcd& lab,
                                      double t) const {
  if (frame_ == Frame::Bare) return lab;
  Eigen::VectorXcd c(lab.size());
  for (Eigen::Index i = 0; i < lab.size(); ++i) {
    c[i] = lab[i] * std::exp(kI * (phi_[i] * t));
  }
  return c;
}

Eigen::VectorXcd Propagator::to_lab(const Eigen::VectorXcd& c,
                                    double t) const {
  if (frame_ == Frame::Bare) return c;
  Eigen::VectorXcd lab(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    lab[i] = c[i] * std::exp(-kI * (phi_[i] * t));
  }
  return lab;
}

EvolutionResult evolve(const WavePacketState& initial,
                       const SpectrumModel& model,
                       const Eigen::MatrixXd& coupling,
                       const ResonanceParams& params,
                       const EvolutionConfig& config) {
  validate(initial, config);
  const LevelWindow window{initial.n_min, initial.n_max()};
  const auto prop = Propagator::full(model, coupling, params, window,
                                     config.frame, config.integrator,
                                     config.drive_phase);
  const auto fp =
      run_fingerprint("full", initial, model, &coupling, params, config);
  return run(prop, initial, params.N, config, fp);
}

EvolutionResult evolve_rwa(const WavePacketState& initial,
                           const SpectrumModel& model,
                           const ResonanceParams& params,
                           const EvolutionConfig& config) {
  validate(initial, config);
  const LevelWindow window{initial.n_min, initial.n_max()};
  const auto prop = Propagator::rwa(model, params, window, config.integrator);
  const auto fp =
      run_fingerprint("rwa", initial, model, nullptr, params, config);
  return run(prop, initial, params.N, config, fp);
}

AutocorrTrace predicted_autocorrelation(std::span<const cplx> xi,
                                        std::span<const double> eps,
                                        std::span<const double> times,
                                        double hbar_eff) {
  if (xi.size() != eps.size()) {
    throw DomainError("xi and eps sequences must be aligned");
  }
  if (!(hbar_eff > 0.0)) throw DomainError("hbar_eff must be positive");

  AutocorrTrace out;
  out.times.assign(times.begin(), times.end());
  out.values.reserve(times.size());
  out.norm_drift.assign(times.size(), 0.0);

  std::string key = "predicted|";
  append(key, hbar_eff);
  for (std::size_t n = 0; n < xi.size(); ++n) {
    append(key, xi[n].real());
    append(key, xi[n].imag());
    append(key, eps[n]);
  }
  for (double t : times) {
    append(key, t);
    cplx sum{0.0, 0.0};
    for (std::size_t n = 0; n < xi.size(); ++n) {
      sum += std::norm(xi[n]) * std::exp(-kI * (eps[n] * t / hbar_eff));
    }
    out.values.push_back(sum);
  }
  out.fingerprint = fnv1a64(key);
  return out;
}

void write_trace_csv(std::ostream& out, const AutocorrTrace& trace,
                     std::uint64_t config_hash) {
  out << provenance_line(config_hash) << '\n';
  out << "# trace=" << hex64(trace.fingerprint) << '\n';
  out << "t,re_A,im_A,abs_A2,norm_drift\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const cplx a = trace.values[i];
    out << format_number(trace.times[i]) << ',' << format_number(a.real())
        << ',' << format_number(a.imag()) << ',' << format_number(std::norm(a))
        << ',' << format_number(trace.norm_drift[i]) << '\n';
  }
}

AutocorrTrace read_trace_csv(std::istream& in) {
  AutocorrTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("trace=");
      if (pos != std::string::npos) {
        trace.fingerprint = std::stoull(line.substr(pos + 6), nullptr, 16);
      }
      continue;
    }
    if (line.rfind("t,", 0) == 0) continue;

    std::istringstream row(line);
    std::string field;
    double v[5] = {0, 0, 0, 0, 0};
    int col = 0;
    while (col < 5 && std::getline(row, field, ',')) {
      try {
        v[col++] = std::stod(field);
      } catch (const std::exception&) {
        throw AnalysisInputError("malformed trace row: " + line);
      }
    }
    if (col < 3) throw AnalysisInputError("malformed trace row: " + line);
    trace.times.push_back(v[0]);
    trace.values.emplace_back(v[1], v[2]);
    trace.norm_drift.push_back(col >= 5 ? v[4] : 0.0);
  }
  if (trace.size() < 3) {
    throw TraceTooShort("trace has " + std::to_string(trace.size()) +
                        " samples; at least 3 are required");
  }
  return trace;
}

}  // namespace revival
