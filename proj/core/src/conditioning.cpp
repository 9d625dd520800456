#include "nmsse/conditioning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "nmsse/error.hpp"
#include "nmsse/oscillator.hpp"

namespace nmsse {

NodeEncountered::NodeEncountered(double weight)
    : Error("conditioned-state weight " + std::to_string(weight) + " is below the node floor"),
      weight_(weight) {}

std::string_view to_string(Unraveling u) {
  switch (u) {
    case Unraveling::Position: return "position";
    case Unraveling::Quadrature: return "quadrature";
    case Unraveling::Coherent: return "coherent";
  }
  return "unknown";
}

Unraveling parse_unraveling(std::string_view name) {
  if (name == "position") return Unraveling::Position;
  if (name == "quadrature") return Unraveling::Quadrature;
  if (name == "coherent") return Unraveling::Coherent;
  throw ModelError("unknown unraveling '" + std::string(name) + "'");
}

Unraveling kind_of(const HiddenVars& hv) {
  return static_cast<Unraveling>(hv.index());
}

std::size_t coordinate_count(Unraveling kind, std::size_t modes) {
  // Quadrature: one (X+, Y-) per pair, i.e. one coordinate per mode as well.
  return kind == Unraveling::Coherent ? 2 * modes : modes;
}

std::vector<double> flatten(const HiddenVars& hv) {
  struct Visitor {
    std::vector<double> operator()(const PositionVars& v) const { return v.x; }
    std::vector<double> operator()(const QuadratureVars& v) const {
      std::vector<double> out(v.xplus);
      out.insert(out.end(), v.yminus.begin(), v.yminus.end());
      return out;
    }
    std::vector<double> operator()(const CoherentVars& v) const {
      std::vector<double> out;
      out.reserve(2 * v.a.size());
      for (const auto& a : v.a) out.push_back(a.real());
      for (const auto& a : v.a) out.push_back(a.imag());
      return out;
    }
  };
  return std::visit(Visitor{}, hv);
}

HiddenVars unflatten(Unraveling kind, const std::vector<double>& coords) {
  switch (kind) {
    case Unraveling::Position:
      return PositionVars{coords};
    case Unraveling::Quadrature: {
      if (coords.size() % 2 != 0) throw DimensionError("quadrature coordinates come in (X+, Y-) blocks");
      const auto half = static_cast<std::ptrdiff_t>(coords.size() / 2);
      return QuadratureVars{{coords.begin(), coords.begin() + half}, {coords.begin() + half, coords.end()}};
    }
    case Unraveling::Coherent: {
      if (coords.size() % 2 != 0) throw DimensionError("coherent coordinates come in (Re, Im) blocks");
      const std::size_t k = coords.size() / 2;
      CoherentVars v;
      v.a.resize(k);
      for (std::size_t i = 0; i < k; ++i) v.a[i] = {coords[i], coords[k + i]};
      return v;
    }
  }
  throw ModelError("unknown unraveling");
}

// ---------------------------------------------------------------------------
// EPR kernel

EprKernel::EprKernel(std::size_t n_max, std::size_t panels)
    : cutoff_(std::sqrt(2.0 * (2.0 * static_cast<double>(n_max) + 1.0)) + 6.0), panels_(panels) {
  if (panels == 0) throw ModelError("EPR rule needs at least one panel");
  using Rule = boost::math::quadrature::gauss<double, kNodesPerPanel>;
  // Boost stores the non-negative half of the symmetric rule.
  std::vector<double> xi;
  std::vector<double> wi;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  for (std::size_t i = abscissa.size(); i-- > 0;) {
    if (abscissa[i] == 0.0) continue;
    xi.push_back(-abscissa[i]);
    wi.push_back(weights[i]);
  }
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    xi.push_back(abscissa[i]);
    wi.push_back(weights[i]);
  }

  panel_width_ = 2.0 * cutoff_ / static_cast<double>(panels_);
  const double half = 0.5 * panel_width_;
  for (double x : xi) local_offsets_.push_back(half * x);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t p = 0; p < panels_; ++p) {
    const double centre = -cutoff_ + (static_cast<double>(p) + 0.5) * panel_width_;
    for (std::size_t i = 0; i < xi.size(); ++i) {
      const double x = centre + local_offsets_[i];
      nodes_.push_back(x);
      weights_.push_back(half * wi[i] * std::exp(-0.5 * x * x) * norm);
    }
  }
}

const EprKernel& EprKernel::shared(std::size_t n_max, std::size_t panels) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<EprKernel>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n_max, panels}];
  if (!slot) slot = std::make_unique<EprKernel>(n_max, panels);
  return *slot;
}

void EprKernel::overlap_table(double xplus, double yminus, std::size_t levels_neg, std::size_t levels_pos,
                              std::vector<Complex>& out) const {
  const std::size_t cols = levels_pos + 1;
  out.assign((levels_neg + 1) * cols, Complex{});
  const std::size_t per_panel = local_offsets_.size();

  thread_local std::vector<Complex> local_phase;
  thread_local std::vector<double> hu;
  thread_local std::vector<double> hw;
  local_phase.resize(per_panel);
  hu.resize(levels_neg + 1);
  hw.resize(levels_pos + 1);
  for (std::size_t i = 0; i < per_panel; ++i) local_phase[i] = std::polar(1.0, -yminus * local_offsets_[i]);
  const Complex panel_step = std::polar(1.0, -yminus * panel_width_);
  Complex panel_phase = std::polar(1.0, -yminus * (-cutoff_ + 0.5 * panel_width_));

  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  std::size_t j = 0;
  for (std::size_t p = 0; p < panels_; ++p, panel_phase *= panel_step) {
    for (std::size_t i = 0; i < per_panel; ++i, ++j) {
      const double x = nodes_[j];
      hermite_function_polynomials((xplus - x) * inv_sqrt2, hu);
      hermite_function_polynomials((xplus + x) * inv_sqrt2, hw);
      const Complex wp = weights_[j] * panel_phase * local_phase[i];
      for (std::size_t m = 0; m <= levels_neg; ++m) {
        const Complex wm = wp * hu[m];
        Complex* row = out.data() + m * cols;
        for (std::size_t n = 0; n <= levels_pos; ++n) row[n] += wm * hw[n];
      }
    }
  }
  const double envelope = std::exp(-0.5 * xplus * xplus);
  for (auto& v : out) v *= envelope;
}

std::array<Complex, 3> epr_single_quantum(double xplus, double yminus) {
  const double w00 = std::exp(-0.5 * (xplus * xplus + yminus * yminus)) / std::sqrt(std::numbers::pi);
  return {Complex{w00, 0.0}, w00 * Complex{xplus, -yminus}, w00 * Complex{xplus, yminus}};
}

// ---------------------------------------------------------------------------
// Overlaps

namespace {

// Bra factors per mode (beta_k(n) = <q_k|n>) contracted against the state.
CVector contract_product(const StateVector& state, const std::vector<std::vector<Complex>>& beta) {
  const BasisDescriptor& basis = state.basis;
  const std::size_t bath = basis.bath_dim();
  const std::size_t modes = basis.mode_count();
  std::vector<Complex> f(bath);

  if (basis.layout() == BathLayout::SingleExcitation) {
    // prefix/suffix products of beta_j(0) avoid dividing by a vanishing factor
    std::vector<Complex> prefix(modes + 1, Complex{1.0, 0.0});
    std::vector<Complex> suffix(modes + 1, Complex{1.0, 0.0});
    for (std::size_t k = 0; k < modes; ++k) prefix[k + 1] = prefix[k] * beta[k][0];
    for (std::size_t k = modes; k-- > 0;) suffix[k] = suffix[k + 1] * beta[k][0];
    f[0] = prefix[modes];
    for (std::size_t k = 0; k < modes; ++k) f[k + 1] = prefix[k] * beta[k][1] * suffix[k + 1];
  } else {
    f[0] = Complex{1.0, 0.0};
    std::size_t filled = 1;
    for (std::size_t k = 0; k < modes; ++k) {
      const std::size_t levels = beta[k].size();
      // expand in place, mode k becoming the fastest index
      for (std::size_t idx = filled; idx-- > 0;) {
        const Complex base = f[idx];
        for (std::size_t n = levels; n-- > 0;) f[idx * levels + n] = base * beta[k][n];
      }
      filled *= levels;
    }
  }

  const auto sys = static_cast<Eigen::Index>(basis.system_dim());
  Eigen::Map<const CMatrix> view(state.amplitudes.data(), static_cast<Eigen::Index>(bath), sys);
  Eigen::Map<const CVector> fv(f.data(), static_cast<Eigen::Index>(bath));
  return view.transpose() * fv;
}

// Highest occupied Fock level per mode among nonzero amplitudes.
std::vector<std::size_t> occupied_levels(const StateVector& state) {
  const BasisDescriptor& basis = state.basis;
  std::vector<std::size_t> top(basis.mode_count(), 0);
  for (std::size_t b = 0; b < basis.bath_dim(); ++b) {
    bool occupied = false;
    for (std::size_t s = 0; s < basis.system_dim() && !occupied; ++s) {
      occupied = state.amplitudes(static_cast<Eigen::Index>(basis.index(s, b))) != Complex{};
    }
    if (!occupied) continue;
    for (std::size_t k = 0; k < basis.mode_count(); ++k) top[k] = std::max(top[k], basis.occupation(b, k));
  }
  return top;
}

void require_arity(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + " arity " + std::to_string(got) + " does not match " +
                         std::to_string(want));
  }
}

}  // namespace

CVector bath_overlap_position(const StateVector& state, const PositionVars& hv) {
  const std::size_t modes = state.basis.mode_count();
  require_arity(hv.x.size(), modes, "position hidden variables");
  std::vector<std::vector<Complex>> beta(modes);
  std::vector<double> psi(state.basis.n_max() + 1);
  for (std::size_t k = 0; k < modes; ++k) {
    fock_position_amplitudes(hv.x[k], psi);
    beta[k].assign(psi.begin(), psi.end());
  }
  return contract_product(state, beta);
}

CVector bath_overlap_coherent(const StateVector& state, const CoherentVars& hv) {
  const std::size_t modes = state.basis.mode_count();
  require_arity(hv.a.size(), modes, "coherent hidden variables");
  std::vector<std::vector<Complex>> beta(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    auto overlap = coherent_overlap_vector(hv.a[k], state.basis.n_max());
    for (auto& c : overlap.amplitudes) c = std::conj(c);
    beta[k] = std::move(overlap.amplitudes);
  }
  return contract_product(state, beta);
}

CVector bath_overlap_quadrature(const StateVector& state, const QuadratureVars& hv,
                                const PairingMap& pairing) {
  const BasisDescriptor& basis = state.basis;
  const std::size_t modes = basis.mode_count();
  const std::size_t pairs = pairing.size();
  if (2 * pairs != modes) throw ModelError("quadrature unraveling needs every mode in a symmetric pair");
  require_arity(hv.xplus.size(), pairs, "X+ hidden variables");
  require_arity(hv.yminus.size(), pairs, "Y- hidden variables");
  for (const auto& p : pairing.pairs) {
    if (p.positive >= modes || p.negative >= modes) throw DimensionError("pairing refers to a missing mode");
  }

  const std::size_t bath = basis.bath_dim();
  std::vector<Complex> f(bath);

  if (basis.layout() == BathLayout::SingleExcitation) {
    // table entries: [0] = W_00, [1] = W_01 (quantum in +k), [2] = W_10 (quantum in -k)
    std::vector<std::array<Complex, 3>> w(pairs);
    for (std::size_t p = 0; p < pairs; ++p) w[p] = epr_single_quantum(hv.xplus[p], hv.yminus[p]);
    std::vector<Complex> prefix(pairs + 1, Complex{1.0, 0.0});
    std::vector<Complex> suffix(pairs + 1, Complex{1.0, 0.0});
    for (std::size_t p = 0; p < pairs; ++p) prefix[p + 1] = prefix[p] * w[p][0];
    for (std::size_t p = pairs; p-- > 0;) suffix[p] = suffix[p + 1] * w[p][0];
    f[0] = prefix[pairs];
    for (std::size_t p = 0; p < pairs; ++p) {
      const Complex rest = prefix[p] * suffix[p + 1];
      f[pairing.pairs[p].positive + 1] = rest * w[p][1];
      f[pairing.pairs[p].negative + 1] = rest * w[p][2];
    }
  } else {
    const EprKernel& kernel = EprKernel::shared(basis.n_max());
    const auto top = occupied_levels(state);
    std::vector<std::vector<Complex>> tables(pairs);
    std::vector<std::size_t> cols(pairs);
    for (std::size_t p = 0; p < pairs; ++p) {
      const auto& pr = pairing.pairs[p];
      cols[p] = top[pr.positive] + 1;
      kernel.overlap_table(hv.xplus[p], hv.yminus[p], top[pr.negative], top[pr.positive], tables[p]);
    }
    for (std::size_t b = 0; b < bath; ++b) {
      Complex value{1.0, 0.0};
      for (std::size_t p = 0; p < pairs && value != Complex{}; ++p) {
        const auto& pr = pairing.pairs[p];
        const std::size_t m = basis.occupation(b, pr.negative);
        const std::size_t n = basis.occupation(b, pr.positive);
        value = (m > top[pr.negative] || n > top[pr.positive]) ? Complex{} : value * tables[p][m * cols[p] + n];
      }
      f[b] = value;
    }
  }

  const auto sys = static_cast<Eigen::Index>(basis.system_dim());
  Eigen::Map<const CMatrix> view(state.amplitudes.data(), static_cast<Eigen::Index>(bath), sys);
  Eigen::Map<const CVector> fv(f.data(), static_cast<Eigen::Index>(bath));
  return view.transpose() * fv;
}

namespace {

ConditionedState normalize(CVector overlap, double density_scale) {
  const double norm2 = overlap.squaredNorm();
  const double weight = norm2 * density_scale;
  if (!(weight >= kNodeFloor) || !std::isfinite(weight)) throw NodeEncountered(weight);
  overlap /= std::sqrt(norm2);
  return ConditionedState{std::move(overlap), weight};
}

}  // namespace

ConditionedState condition_position(const StateVector& state, const PositionVars& hv) {
  return normalize(bath_overlap_position(state, hv), 1.0);
}

ConditionedState condition_quadrature(const StateVector& state, const QuadratureVars& hv,
                                      const PairingMap& pairing) {
  return normalize(bath_overlap_quadrature(state, hv, pairing), 1.0);
}

ConditionedState condition_coherent(const StateVector& state, const CoherentVars& hv) {
  const double husimi = std::pow(std::numbers::pi, -static_cast<double>(state.basis.mode_count()));
  return normalize(bath_overlap_coherent(state, hv), husimi);
}

CVector bath_overlap(const StateVector& state, const HiddenVars& hv, const PairingMap* pairing) {
  if (const auto* p = std::get_if<PositionVars>(&hv)) return bath_overlap_position(state, *p);
  if (const auto* c = std::get_if<CoherentVars>(&hv)) return bath_overlap_coherent(state, *c);
  if (pairing == nullptr) throw ModelError("quadrature conditioning requires a pairing map");
  return bath_overlap_quadrature(state, std::get<QuadratureVars>(hv), *pairing);
}

ConditionedState condition(const StateVector& state, const HiddenVars& hv, const PairingMap* pairing) {
  if (const auto* p = std::get_if<PositionVars>(&hv)) return condition_position(state, *p);
  if (const auto* c = std::get_if<CoherentVars>(&hv)) return condition_coherent(state, *c);
  if (pairing == nullptr) throw ModelError("quadrature conditioning requires a pairing map");
  return condition_quadrature(state, std::get<QuadratureVars>(hv), *pairing);
}

}  // namespace nmsse
