#include "lrphase/spectroscopy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lrphase/errors.hpp"

namespace lrphase {

namespace {

SpinProjection projection_at(int basis_index) {
  return basis_index == 0 ? SpinProjection::up() : SpinProjection::down();
}

std::string label_str(StateLabel s) { return fmt::format("({}, {:+})", s.n, s.sigma.value()); }

// H'_{to,from}(t) exp(-i phi_tot(t)) / hbar on the auxiliary grid, without
// the time profile.
std::vector<Complex> base_integrand(const PerturbationModel& pert, std::span<const EnergyLevel> levels,
                                    StateLabel from, StateLabel to, const TransitionContext& ctx) {
  if (!ctx.aux || !ctx.phases_up || !ctx.phases_down) {
    throw InvalidArgument("transition context incomplete");
  }
  const AuxiliarySeries& aux = *ctx.aux;
  const PhaseSeries& pf = ctx.phases(from.sigma);
  const PhaseSeries& pt = ctx.phases(to.sigma);
  if (pf.records.size() != aux.samples.size() || pt.records.size() != aux.samples.size()) {
    throw InvalidArgument("phase series do not match the auxiliary grid");
  }
  std::vector<Complex> g(aux.samples.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const InvariantParams& p = aux.samples[i];
    const Complex h = pert.frame() == PerturbationFrame::Lab ? pert.dressed_element_ev(to, from, transform_V(p))
                                                             : pert.element_ev(to, from);
    const double phi = total_phase(to, from, pf.records[i], pt.records[i], levels, p.t);
    g[i] = ev_to_angular(1.0) * h * std::polar(1.0, -phi);
  }
  return g;
}

AmplitudeResult integrate_amplitude(const std::vector<Complex>& g, double h) {
  std::vector<double> re(g.size()), im(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    re[i] = g[i].real();
    im[i] = g[i].imag();
  }
  const auto cre = cumulative_simpson(re, h);
  const auto cim = cumulative_simpson(im, h);
  AmplitudeResult r;
  for (std::size_t i = 0; i < g.size(); ++i) {
    // a = -i * integral
    const Complex a(cim[i], -cre[i]);
    r.max_abs_amplitude = std::max(r.max_abs_amplitude, std::abs(a));
  }
  r.amplitude = Complex(cim.back(), -cre.back());
  r.probability = std::norm(r.amplitude);
  r.first_order_valid = r.max_abs_amplitude <= 0.1;
  return r;
}

}  // namespace

bool operator<(const StateLabel& a, const StateLabel& b) {
  if (a.n != b.n) return a.n < b.n;
  return a.sigma.sign() > b.sigma.sign();
}

void validate_levels(std::span<const EnergyLevel> levels) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i].epsilon_ev)) {
      throw InvalidArgument(fmt::format("level {} has non-finite energy", label_str(levels[i].label)));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (levels[i].label == levels[j].label) {
        throw InvalidArgument(fmt::format("duplicate level {}", label_str(levels[i].label)));
      }
    }
  }
}

double level_energy_ev(std::span<const EnergyLevel> levels, StateLabel label) {
  for (const auto& l : levels) {
    if (l.label == label) return l.epsilon_ev;
  }
  throw InvalidArgument(fmt::format("no energy level {}", label_str(label)));
}

PerturbationModel::PerturbationModel(std::vector<MatrixElement> elements, TimeProfile profile,
                                     double drive_frequency, PerturbationFrame frame)
    : elements_(std::move(elements)), profile_(profile), drive_frequency_(drive_frequency), frame_(frame) {
  if (!std::isfinite(drive_frequency_)) throw InvalidArgument("drive frequency must be finite");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const MatrixElement& a = elements_[i];
    if (!std::isfinite(a.value_ev.real()) || !std::isfinite(a.value_ev.imag())) {
      throw InvalidArgument("non-finite perturbation matrix element");
    }
    const double tol = 1e-12 * std::max(1e-300, std::abs(a.value_ev));
    if (a.to == a.from && std::abs(a.value_ev.imag()) > tol) {
      throw InvalidArgument(fmt::format("non-Hermitian perturbation: diagonal element {} is complex", label_str(a.to)));
    }
    for (std::size_t j = 0; j < i; ++j) {
      const MatrixElement& b = elements_[j];
      if (a.to == b.to && a.from == b.from) {
        throw InvalidArgument(fmt::format("duplicate perturbation element {} <- {}", label_str(a.to), label_str(a.from)));
      }
      if (a.to == b.from && a.from == b.to && std::abs(a.value_ev - std::conj(b.value_ev)) > tol) {
        throw InvalidArgument(fmt::format("non-Hermitian perturbation: elements {} <- {} and its transpose are not conjugate",
                                          label_str(a.to), label_str(a.from)));
      }
    }
  }
}

Complex PerturbationModel::element_ev(StateLabel to, StateLabel from) const {
  for (const auto& e : elements_) {
    if (e.to == to && e.from == from) return e.value_ev;
  }
  for (const auto& e : elements_) {
    if (e.to == from && e.from == to) return std::conj(e.value_ev);
  }
  return {0.0, 0.0};
}

double PerturbationModel::profile(double t) const {
  return profile_ == TimeProfile::Constant ? 1.0 : std::cos(drive_frequency_ * t);
}

PerturbationModel PerturbationModel::with_drive_frequency(double nu) const {
  PerturbationModel copy = *this;
  copy.drive_frequency_ = nu;
  return copy;
}

Complex PerturbationModel::dressed_element_ev(StateLabel to, StateLabel from, const Mat2& V) const {
  if (frame_ == PerturbationFrame::Invariant) return element_ev(to, from);
  Complex sum{0.0, 0.0};
  const int ct = to.sigma.basis_index(), cf = from.sigma.basis_index();
  for (int sp = 0; sp < 2; ++sp) {
    for (int s = 0; s < 2; ++s) {
      const Complex w = element_ev({to.n, projection_at(sp)}, {from.n, projection_at(s)});
      if (w == Complex(0.0, 0.0)) continue;
      sum += std::conj(V(sp, ct)) * w * V(s, cf);
    }
  }
  return sum;
}

double total_phase(StateLabel to, StateLabel from, const PhaseRecord& from_phases,
                   const PhaseRecord& to_phases, std::span<const EnergyLevel> levels, double t) {
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  if (!(from_phases.sigma == from.sigma) || std::abs(from_phases.t - t) > tol) {
    throw InvalidArgument(fmt::format("missing phase record for sigma = {:+} at t = {}", from.sigma.value(), t));
  }
  if (!(to_phases.sigma == to.sigma) || std::abs(to_phases.t - t) > tol) {
    throw InvalidArgument(fmt::format("missing phase record for sigma = {:+} at t = {}", to.sigma.value(), t));
  }
  const double eps_from = ev_to_angular(level_energy_ev(levels, from));
  const double eps_to = ev_to_angular(level_energy_ev(levels, to));
  return (from_phases.phi_total() + eps_from * t) - (to_phases.phi_total() + eps_to * t);
}

double spectral_shift_rate(SpinProjection sigma, SpinProjection sigma_p, double omega0,
                           double Omega, double theta) {
  const double lambda = solve_precession_lambda(omega0, Omega, theta);
  const double ds = sigma.value() - sigma_p.value();
  if (ds == 0.0) return 0.0;
  return ds * (omega0 * std::cos(lambda - theta) + Omega * (1.0 - std::cos(lambda)));
}

double spectral_shift(SpinProjection sigma, SpinProjection sigma_p, double omega0, double Omega,
                      double theta) {
  return angular_to_ev(spectral_shift_rate(sigma, sigma_p, omega0, Omega, theta));
}

AmplitudeResult transition_amplitude(const PerturbationModel& pert, std::span<const EnergyLevel> levels,
                                     StateLabel from, StateLabel to, const TransitionContext& ctx) {
  auto g = base_integrand(pert, levels, from, to, ctx);
  if (pert.time_profile() != TimeProfile::Constant) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= pert.profile(ctx.aux->samples[i].t);
  }
  return integrate_amplitude(g, ctx.aux->step);
}

std::vector<ScanPoint> detuning_scan(const PerturbationModel& pert, std::span<const EnergyLevel> levels,
                                     StateLabel from, StateLabel to, const TransitionContext& ctx,
                                     std::span<const double> frequencies, Execution exec) {
  if (pert.time_profile() != TimeProfile::MonochromaticDrive) {
    throw InvalidArgument("detuning scan needs a monochromatic drive");
  }
  const auto base = base_integrand(pert, levels, from, to, ctx);
  std::vector<ScanPoint> out(frequencies.size());
  for_each_index(frequencies.size(), exec, [&](std::size_t k) {
    const double nu = frequencies[k];
    std::vector<Complex> g(base.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = base[i] * std::cos(nu * ctx.aux->samples[i].t);
    out[k] = {nu, integrate_amplitude(g, ctx.aux->step).probability};
  });
  return out;
}

double locate_peak(std::span<const ScanPoint> scan) {
  if (scan.empty()) throw InvalidArgument("empty scan");
  std::size_t k = 0;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    if (scan[i].probability > scan[k].probability) k = i;
  }
  if (k == 0 || k + 1 == scan.size()) return scan[k].drive_frequency;
  const double x0 = scan[k - 1].drive_frequency, x1 = scan[k].drive_frequency, x2 = scan[k + 1].drive_frequency;
  const double y0 = scan[k - 1].probability, y1 = scan[k].probability, y2 = scan[k + 1].probability;
  const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  if (den == 0.0) return x1;
  return x1 - 0.5 * num / den;
}

std::vector<SpectralLine> line_table(std::span<const EnergyLevel> levels, const PerturbationModel& pert,
                                     const RotationParams& rotation) {
  validate_levels(levels);
  std::vector<EnergyLevel> sorted(levels.begin(), levels.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const EnergyLevel& a, const EnergyLevel& b) { return a.label < b.label; });

  std::vector<SpectralLine> lines;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const StateLabel from = sorted[i].label, to = sorted[j].label;
      const Complex c = pert.element_ev(to, from);
      if (c == Complex(0.0, 0.0)) continue;
      SpectralLine line;
      line.from = from;
      line.to = to;
      line.bare_gap_ev = sorted[i].epsilon_ev - sorted[j].epsilon_ev;
      line.shift_ev = spectral_shift(from.sigma, to.sigma, rotation.omega0, rotation.Omega, rotation.theta);
      line.shifted_position_ev = line.bare_gap_ev + line.shift_ev;
      line.coupling_ev = c;
      lines.push_back(line);
    }
  }
  std::stable_sort(lines.begin(), lines.end(), [](const SpectralLine& a, const SpectralLine& b) {
    if (a.shifted_position_ev != b.shifted_position_ev) return a.shifted_position_ev < b.shifted_position_ev;
    if (!(a.from == b.from)) return a.from < b.from;
    return a.to < b.to;
  });
  return lines;
}

}  // namespace lrphase
