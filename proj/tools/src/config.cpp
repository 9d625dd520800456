#include "nmsse/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "nmsse/error.hpp"

namespace nmsse::cli {

using Json = nlohmann::ordered_json;

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error((path.empty() ? std::string("config") : path) + ": " + message), path_(std::move(path)) {}

namespace {

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string element(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const char* type_name(const Json& j) {
  return j.type_name();
}

void expect_object(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, std::string("expected an object, found ") + type_name(j));
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError(child(path, key), "unknown key");
  }
}

const Json& required(const Json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(child(path, key), "missing required field");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, std::string("expected a number, found ") + type_name(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double as_positive(const Json& j, const std::string& path) {
  const double v = as_double(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

std::uint64_t as_u64(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) {
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    throw ConfigError(path, std::string("expected a nonnegative integer, found ") + type_name(j));
  }
  return j.get<std::uint64_t>();
}

std::size_t as_count(const Json& j, const std::string& path) {
  const std::uint64_t v = as_u64(j, path);
  if (v == 0) throw ConfigError(path, "must be a positive integer");
  return static_cast<std::size_t>(v);
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, std::string("expected a boolean, found ") + type_name(j));
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, std::string("expected a string, found ") + type_name(j));
  return j.get<std::string>();
}

const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, std::string("expected an array, found ") + type_name(j));
  return j;
}

// A complex number is [re, im] or a bare real.
Complex as_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return Complex{as_double(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected a complex number as [re, im]");
  return Complex{as_double(j[0], element(path, 0)), as_double(j[1], element(path, 1))};
}

std::vector<double> as_doubles(const Json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_double(j[i], element(path, i)));
  return out;
}

CVector as_cvector(const Json& j, const std::string& path) {
  const std::size_t n = as_array(j, path).size();
  if (n == 0) throw ConfigError(path, "expected a nonempty vector");
  CVector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = as_complex(j[i], element(path, i));
  return v;
}

CMatrix as_cmatrix(const Json& j, const std::string& path) {
  const std::size_t rows = as_array(j, path).size();
  if (rows == 0) throw ConfigError(path, "expected a nonempty square matrix (rows of [re, im] pairs)");
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_path = element(path, r);
    if (as_array(j[r], row_path).size() != rows) {
      throw ConfigError(row_path, "row length " + std::to_string(j[r].size()) + " differs from row count " +
                                      std::to_string(rows));
    }
    for (std::size_t c = 0; c < rows; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = as_complex(j[r][c], element(row_path, c));
    }
  }
  return m;
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json cvector_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

Json cmatrix_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> checked_checkpoints(const Json& j, const std::string& path) {
  std::vector<double> cps = as_doubles(j, path);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] < 0.0) throw ConfigError(element(path, i), "checkpoint times must be nonnegative");
  }
  return cps;
}

SystemSpec parse_system(const Json& j, const std::string& path) {
  expect_object(j, path, {"h_int", "lowering", "initial_state"});
  SystemSpec s;
  s.h_int = as_cmatrix(required(j, path, "h_int"), child(path, "h_int"));
  s.lowering = as_cmatrix(required(j, path, "lowering"), child(path, "lowering"));
  s.initial_state = as_cvector(required(j, path, "initial_state"), child(path, "initial_state"));
  return s;
}

void parse_bath(const Json& j, const std::string& path, RunConfig& cfg) {
  expect_object(j, path, {"modes", "flat_band"});
  const Json* modes = optional_field(j, "modes");
  const Json* band = optional_field(j, "flat_band");
  if ((modes == nullptr) == (band == nullptr)) {
    throw ConfigError(path, "give exactly one of 'modes' or 'flat_band'");
  }
  if (modes) {
    const std::string mp = child(path, "modes");
    std::vector<ModeSpec> out;
    for (std::size_t i = 0; i < as_array(*modes, mp).size(); ++i) {
      const std::string ep = element(mp, i);
      expect_object((*modes)[i], ep, {"detuning", "coupling"});
      ModeSpec m;
      m.detuning = as_double(required((*modes)[i], ep, "detuning"), child(ep, "detuning"));
      m.coupling = as_double(required((*modes)[i], ep, "coupling"), child(ep, "coupling"));
      if (m.coupling < 0.0) throw ConfigError(child(ep, "coupling"), "must be >= 0");
      out.push_back(m);
    }
    if (out.empty()) throw ConfigError(mp, "bath needs at least one mode");
    cfg.modes = std::move(out);
  } else {
    const std::string bp = child(path, "flat_band");
    expect_object(*band, bp, {"min", "max", "spacing", "gamma", "cell_centred"});
    FlatBandSpec f;
    f.min = as_double(required(*band, bp, "min"), child(bp, "min"));
    f.max = as_double(required(*band, bp, "max"), child(bp, "max"));
    f.spacing = as_positive(required(*band, bp, "spacing"), child(bp, "spacing"));
    f.gamma = as_positive(required(*band, bp, "gamma"), child(bp, "gamma"));
    if (const Json* c = optional_field(*band, "cell_centred")) f.cell_centred = as_bool(*c, child(bp, "cell_centred"));
    if (!(f.max > f.min)) throw ConfigError(child(bp, "max"), "must exceed min");
    cfg.flat_band = f;
  }
}

BackendSpec parse_backend(const Json& j, const std::string& path) {
  expect_object(j, path, {"type", "n_max"});
  const std::string type = as_string(required(j, path, "type"), child(path, "type"));
  BackendSpec b;
  if (type == "dense_fock") {
    b.layout = BathLayout::DenseFock;
    b.n_max = as_count(required(j, path, "n_max"), child(path, "n_max"));
  } else if (type == "single_excitation") {
    b.layout = BathLayout::SingleExcitation;
    b.n_max = 1;
    if (j.contains("n_max")) throw ConfigError(child(path, "n_max"), "not used by the single_excitation backend");
  } else {
    throw ConfigError(child(path, "type"), "expected 'dense_fock' or 'single_excitation', found '" + type + "'");
  }
  return b;
}

IntegratorConfig parse_integrator(const Json& j, const std::string& path) {
  expect_object(j, path, {"dt", "t_final", "checkpoint_stride"});
  IntegratorConfig c;
  c.dt = as_positive(required(j, path, "dt"), child(path, "dt"));
  c.t_final = as_positive(required(j, path, "t_final"), child(path, "t_final"));
  if (const Json* s = optional_field(j, "checkpoint_stride")) c.checkpoint_stride = as_count(*s, child(path, "checkpoint_stride"));
  return c;
}

std::vector<ObservableSpec> parse_observables(const Json& j, const std::string& path) {
  std::vector<ObservableSpec> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) {
    const std::string ep = element(path, i);
    expect_object(j[i], ep, {"name", "operator"});
    ObservableSpec o;
    o.name = as_string(required(j[i], ep, "name"), child(ep, "name"));
    o.op = as_cmatrix(required(j[i], ep, "operator"), child(ep, "operator"));
    if (!is_hermitian(o.op, 1e-12)) throw ConfigError(child(ep, "operator"), "observable must be Hermitian");
    out.push_back(std::move(o));
  }
  return out;
}

EnsembleSpec parse_ensemble(const Json& j, const std::string& path) {
  expect_object(j, path, {"n_traj", "master_seed", "workers", "checkpoints", "observables"});
  EnsembleSpec e;
  e.n_traj = as_count(required(j, path, "n_traj"), child(path, "n_traj"));
  e.master_seed = as_u64(required(j, path, "master_seed"), child(path, "master_seed"));
  if (const Json* w = optional_field(j, "workers")) e.workers = as_count(*w, child(path, "workers"));
  if (const Json* c = optional_field(j, "checkpoints")) e.checkpoints = checked_checkpoints(*c, child(path, "checkpoints"));
  if (const Json* o = optional_field(j, "observables")) e.observables = parse_observables(*o, child(path, "observables"));
  return e;
}

BellSpec parse_bell(const Json& j, const std::string& path) {
  expect_object(j, path, {"hamiltonian", "initial_state", "projectors", "values", "null_index", "dt", "t_final",
                          "runs", "master_seed", "checkpoints"});
  BellSpec b;
  b.hamiltonian = as_cmatrix(required(j, path, "hamiltonian"), child(path, "hamiltonian"));
  b.initial_state = as_cvector(required(j, path, "initial_state"), child(path, "initial_state"));
  const std::string pp = child(path, "projectors");
  const Json& projectors = required(j, path, "projectors");
  for (std::size_t i = 0; i < as_array(projectors, pp).size(); ++i) {
    b.projectors.push_back(as_cmatrix(projectors[i], element(pp, i)));
  }
  if (const Json* v = optional_field(j, "values")) b.values = as_doubles(*v, child(path, "values"));
  if (const Json* n = optional_field(j, "null_index")) b.null_index = static_cast<std::size_t>(as_u64(*n, child(path, "null_index")));
  b.dt = as_positive(required(j, path, "dt"), child(path, "dt"));
  b.t_final = as_positive(required(j, path, "t_final"), child(path, "t_final"));
  b.runs = as_count(required(j, path, "runs"), child(path, "runs"));
  b.master_seed = as_u64(required(j, path, "master_seed"), child(path, "master_seed"));
  b.checkpoints = checked_checkpoints(required(j, path, "checkpoints"), child(path, "checkpoints"));
  return b;
}

OutputSpec parse_outputs(const Json& j, const std::string& path) {
  expect_object(j, path, {"trajectory", "ensemble", "bell"});
  OutputSpec o;
  if (const Json* v = optional_field(j, "trajectory")) o.trajectory = as_string(*v, child(path, "trajectory"));
  if (const Json* v = optional_field(j, "ensemble")) o.ensemble = as_string(*v, child(path, "ensemble"));
  if (const Json* v = optional_field(j, "bell")) o.bell = as_string(*v, child(path, "bell"));
  return o;
}

bool same_system(const SystemSpec& a, const SystemSpec& b) {
  return a.h_int == b.h_int && a.lowering == b.lowering && a.initial_state == b.initial_state;
}

bool same_observables(const std::vector<ObservableSpec>& a, const std::vector<ObservableSpec>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].op != b[i].op) return false;
  }
  return true;
}

bool same_bell(const BellSpec& a, const BellSpec& b) {
  if (a.projectors.size() != b.projectors.size()) return false;
  for (std::size_t i = 0; i < a.projectors.size(); ++i) {
    if (a.projectors[i] != b.projectors[i]) return false;
  }
  return a.hamiltonian == b.hamiltonian && a.initial_state == b.initial_state && a.values == b.values &&
         a.null_index == b.null_index && a.dt == b.dt && a.t_final == b.t_final && a.runs == b.runs &&
         a.master_seed == b.master_seed && a.checkpoints == b.checkpoints;
}

template <class T, class Eq>
bool same_optional(const std::optional<T>& a, const std::optional<T>& b, Eq eq) {
  if (a.has_value() != b.has_value()) return false;
  return !a || eq(*a, *b);
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto same_modes = [](const std::vector<ModeSpec>& x, const std::vector<ModeSpec>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].detuning != y[i].detuning || x[i].coupling != y[i].coupling) return false;
    }
    return true;
  };
  const auto same_integrator = [](const IntegratorConfig& x, const IntegratorConfig& y) {
    return x.dt == y.dt && x.t_final == y.t_final && x.checkpoint_stride == y.checkpoint_stride;
  };
  const auto same_ensemble = [](const EnsembleSpec& x, const EnsembleSpec& y) {
    return x.n_traj == y.n_traj && x.master_seed == y.master_seed && x.workers == y.workers &&
           x.checkpoints == y.checkpoints && same_observables(x.observables, y.observables);
  };
  return same_optional(a.system, b.system, same_system) && same_optional(a.modes, b.modes, same_modes) &&
         a.flat_band == b.flat_band && a.backend == b.backend && a.unraveling == b.unraveling &&
         same_optional(a.integrator, b.integrator, same_integrator) &&
         same_optional(a.ensemble, b.ensemble, same_ensemble) && same_optional(a.bell, b.bell, same_bell) &&
         a.outputs == b.outputs;
}

RunConfig parse_config(const Json& tree) {
  expect_object(tree, "", {"model", "backend", "unraveling", "integrator", "ensemble", "bell", "outputs"});
  RunConfig cfg;
  if (const Json* model = optional_field(tree, "model")) {
    expect_object(*model, "model", {"system", "bath"});
    cfg.system = parse_system(required(*model, "model", "system"), "model.system");
    parse_bath(required(*model, "model", "bath"), "model.bath", cfg);
  }
  if (const Json* b = optional_field(tree, "backend")) cfg.backend = parse_backend(*b, "backend");
  if (const Json* u = optional_field(tree, "unraveling")) {
    const std::string name = as_string(*u, "unraveling");
    try {
      cfg.unraveling = parse_unraveling(name);
    } catch (const nmsse::Error&) {
      throw ConfigError("unraveling", "expected 'position', 'quadrature' or 'coherent', found '" + name + "'");
    }
  }
  if (const Json* i = optional_field(tree, "integrator")) cfg.integrator = parse_integrator(*i, "integrator");
  if (const Json* e = optional_field(tree, "ensemble")) cfg.ensemble = parse_ensemble(*e, "ensemble");
  if (const Json* b = optional_field(tree, "bell")) cfg.bell = parse_bell(*b, "bell");
  if (const Json* o = optional_field(tree, "outputs")) cfg.outputs = parse_outputs(*o, "outputs");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  Json tree;
  try {
    tree = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(tree);
}

Json serialize_config(const RunConfig& cfg) {
  Json out = Json::object();
  if (cfg.system) {
    Json bath = Json::object();
    if (cfg.modes) {
      Json modes = Json::array();
      for (const auto& m : *cfg.modes) modes.push_back(Json{{"detuning", m.detuning}, {"coupling", m.coupling}});
      bath["modes"] = std::move(modes);
    } else if (cfg.flat_band) {
      const auto& f = *cfg.flat_band;
      bath["flat_band"] = Json{{"min", f.min}, {"max", f.max}, {"spacing", f.spacing}, {"gamma", f.gamma},
                               {"cell_centred", f.cell_centred}};
    }
    out["model"] = Json{{"system",
                         Json{{"h_int", cmatrix_json(cfg.system->h_int)},
                              {"lowering", cmatrix_json(cfg.system->lowering)},
                              {"initial_state", cvector_json(cfg.system->initial_state)}}},
                        {"bath", std::move(bath)}};
  }
  if (cfg.backend) {
    if (cfg.backend->layout == BathLayout::DenseFock) {
      out["backend"] = Json{{"type", "dense_fock"}, {"n_max", cfg.backend->n_max}};
    } else {
      out["backend"] = Json{{"type", "single_excitation"}};
    }
  }
  if (cfg.unraveling) out["unraveling"] = std::string(to_string(*cfg.unraveling));
  if (cfg.integrator) {
    out["integrator"] = Json{{"dt", cfg.integrator->dt},
                             {"t_final", cfg.integrator->t_final},
                             {"checkpoint_stride", cfg.integrator->checkpoint_stride}};
  }
  if (cfg.ensemble) {
    const auto& e = *cfg.ensemble;
    Json obs = Json::array();
    for (const auto& o : e.observables) obs.push_back(Json{{"name", o.name}, {"operator", cmatrix_json(o.op)}});
    out["ensemble"] = Json{{"n_traj", e.n_traj},     {"master_seed", e.master_seed}, {"workers", e.workers},
                           {"checkpoints", e.checkpoints}, {"observables", std::move(obs)}};
  }
  if (cfg.bell) {
    const auto& b = *cfg.bell;
    Json projectors = Json::array();
    for (const auto& p : b.projectors) projectors.push_back(cmatrix_json(p));
    Json bell{{"hamiltonian", cmatrix_json(b.hamiltonian)},
              {"initial_state", cvector_json(b.initial_state)},
              {"projectors", std::move(projectors)},
              {"values", b.values}};
    if (b.null_index) bell["null_index"] = *b.null_index;
    bell["dt"] = b.dt;
    bell["t_final"] = b.t_final;
    bell["runs"] = b.runs;
    bell["master_seed"] = b.master_seed;
    bell["checkpoints"] = b.checkpoints;
    out["bell"] = std::move(bell);
  }
  out["outputs"] = Json{{"trajectory", cfg.outputs.trajectory},
                        {"ensemble", cfg.outputs.ensemble},
                        {"bell", cfg.outputs.bell}};
  return out;
}

void require_sections(const RunConfig& cfg, Command command) {
  if (command == Command::Bell) {
    if (!cfg.bell) throw ConfigError("bell", "missing required section for the bell command");
    return;
  }
  if (!cfg.system) throw ConfigError("model", "missing required section");
  if (!cfg.backend) throw ConfigError("backend", "missing required section");
  if (!cfg.unraveling) throw ConfigError("unraveling", "missing required field");
  if (!cfg.integrator) throw ConfigError("integrator", "missing required section");
  if (!cfg.ensemble) throw ConfigError("ensemble", "missing required section");
  if (cfg.integrator->checkpoint_stride != 1) {
    throw ConfigError("integrator.checkpoint_stride", "trajectory integration needs checkpoint_stride 1");
  }
}

BathSpec build_bath(const RunConfig& cfg) {
  if (cfg.modes) return BathSpec{*cfg.modes};
  if (!cfg.flat_band) throw ConfigError("model.bath", "missing bath description");
  const auto& f = *cfg.flat_band;
  const double cells = (f.max - f.min) / f.spacing;
  const auto count = static_cast<long long>(std::llround(cells));
  if (std::abs(cells - static_cast<double>(count)) > 1e-9 * std::max(1.0, cells)) {
    throw ConfigError("model.bath.flat_band.spacing", "must divide max - min");
  }
  std::vector<double> detunings;
  if (f.cell_centred) {
    for (long long j = 0; j < count; ++j) detunings.push_back(f.min + (static_cast<double>(j) + 0.5) * f.spacing);
  } else {
    for (long long j = 0; j <= count; ++j) detunings.push_back(f.min + static_cast<double>(j) * f.spacing);
  }
  return flat_band(detunings, f.gamma);
}

Model build_model(const RunConfig& cfg) {
  const BathSpec bath = build_bath(cfg);
  const std::size_t dim = cfg.system->dim();
  const BasisDescriptor basis = cfg.backend->layout == BathLayout::DenseFock
                                    ? BasisDescriptor::dense_fock(dim, bath.size(), cfg.backend->n_max)
                                    : BasisDescriptor::single_excitation(dim, bath.size());
  try {
    cfg.integrator->validate(bath.max_abs_detuning());
  } catch (const ModelError& e) {
    throw ConfigError("integrator", e.what());
  }
  try {
    return Model(*cfg.system, bath, basis);
  } catch (const ModelError& e) {
    throw ConfigError("model", e.what());
  }
}

EnsembleConfig build_ensemble_config(const RunConfig& cfg) {
  EnsembleConfig out;
  const auto& e = *cfg.ensemble;
  out.n_traj = e.n_traj;
  out.master_seed = e.master_seed;
  out.workers = e.workers;
  out.checkpoints = e.checkpoints;
  for (const auto& o : e.observables) {
    if (static_cast<std::size_t>(o.op.rows()) != cfg.system->dim()) {
      throw ConfigError("ensemble.observables", "observable '" + o.name + "' does not match the system dimension");
    }
    out.observables.push_back(NamedObservable{o.name, o.op});
  }
  return out;
}

Decomposition build_decomposition(const BellSpec& bell) {
  Decomposition dec;
  dec.projectors = bell.projectors;
  dec.values = bell.values;
  if (dec.values.empty()) {
    for (std::size_t n = 0; n < dec.projectors.size(); ++n) dec.values.push_back(static_cast<double>(n));
  }
  dec.null_index = bell.null_index;
  try {
    dec.validate();
  } catch (const nmsse::Error& e) {
    throw ConfigError("bell.projectors", e.what());
  }
  if (static_cast<std::size_t>(bell.hamiltonian.rows()) != dec.dim() ||
      static_cast<std::size_t>(bell.initial_state.size()) != dec.dim()) {
    throw ConfigError("bell", "hamiltonian, initial_state and projectors must share one dimension");
  }
  if (!is_hermitian(bell.hamiltonian, 1e-12)) throw ConfigError("bell.hamiltonian", "must be Hermitian");
  return dec;
}

}  // namespace nmsse::cli
