#include "dqc/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dqc {

namespace {

std::vector<int> qubit_dims(int n) { return std::vector<int>(n, 2); }

Mat diag4(cplx a, cplx b, cplx c, cplx d) {
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  return m;
}

void expect_arity(const std::string& name, size_t nt, size_t nc, size_t want_t, size_t want_c) {
  if (nt != want_t || nc != want_c) throw Error("gate " + name + ": wrong number of targets/controls");
}

double param_at(const std::string& name, const std::vector<double>& p, size_t i) {
  if (i >= p.size()) throw Error("gate " + name + ": missing parameter");
  return p[i];
}

std::string join_ints(const std::vector<int>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::string body = s;
  if (!body.empty() && body.front() == '[') body = body.substr(1);
  if (!body.empty() && body.back() == ']') body.pop_back();
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string gate_to_text(const Gate& g) {
  std::string s = "GATE " + g.name + " targets=" + join_ints(g.targets);
  if (!g.controls.empty()) s += " controls=" + join_ints(g.controls);
  if (!g.params.empty()) {
    s += " param=";
    for (size_t i = 0; i < g.params.size(); ++i) s += (i ? "," : "") + fmt_double(g.params[i]);
  }
  return s;
}

Gate gate_from_tokens(const std::vector<std::string>& tok, size_t start) {
  if (tok.size() <= start + 1 || tok[start] != "GATE") throw Error("circuit text: malformed GATE line");
  std::string name = tok[start + 1];
  std::vector<int> targets, controls;
  std::vector<double> params;
  for (size_t i = start + 2; i < tok.size(); ++i) {
    auto eq = tok[i].find('=');
    if (eq == std::string::npos) throw Error("circuit text: bad field '" + tok[i] + "'");
    std::string key = tok[i].substr(0, eq), val = tok[i].substr(eq + 1);
    if (key == "targets") {
      targets = parse_ints(val);
    } else if (key == "controls") {
      controls = parse_ints(val);
    } else if (key == "param") {
      std::stringstream ss(val);
      std::string p;
      while (std::getline(ss, p, ',')) params.push_back(std::stod(p));
    } else {
      throw Error("circuit text: unknown field '" + key + "'");
    }
  }
  return make_gate(name, targets, controls, params);
}

}  // namespace

std::vector<int> Gate::sites() const {
  std::vector<int> s = controls;
  s.insert(s.end(), targets.begin(), targets.end());
  return s;
}

Gate make_gate(const std::string& name, std::vector<int> targets, std::vector<int> controls,
               std::vector<double> params) {
  Gate g{name, std::move(targets), std::move(controls), std::move(params), Mat()};
  const size_t nt = g.targets.size(), nc = g.controls.size();
  const double s2 = 1.0 / std::sqrt(2.0);
  if (name == "H") {
    expect_arity(name, nt, nc, 1, 0);
    g.matrix = Mat(2, 2);
    g.matrix << s2, s2, s2, -s2;
  } else if (name == "X") {
    expect_arity(name, nt, nc, 1, 0);
    g.matrix = ops::sigma_x();
  } else if (name == "Y") {
    expect_arity(name, nt, nc, 1, 0);
    g.matrix = ops::sigma_y();
  } else if (name == "Z") {
    expect_arity(name, nt, nc, 1, 0);
    g.matrix = ops::sigma_z();
  } else if (name == "RZ") {
    expect_arity(name, nt, nc, 1, 0);
    double l = param_at(name, g.params, 0);
    g.matrix = Mat::Zero(2, 2);
    g.matrix(0, 0) = std::exp(-kI * l / 2.0);
    g.matrix(1, 1) = std::exp(kI * l / 2.0);
  } else if (name == "U") {
    expect_arity(name, nt, nc, 1, 0);
    double th = param_at(name, g.params, 0), ph = param_at(name, g.params, 1), ga = param_at(name, g.params, 2);
    g.matrix = Mat(2, 2);
    g.matrix << std::cos(th / 2), -std::exp(kI * ga) * std::sin(th / 2), std::exp(kI * ph) * std::sin(th / 2),
        std::exp(kI * (ph + ga)) * std::cos(th / 2);
  } else if (name == "CNOT") {
    expect_arity(name, nt, nc, 1, 1);
    g.matrix = Mat::Zero(4, 4);
    g.matrix(0, 0) = g.matrix(1, 1) = g.matrix(2, 3) = g.matrix(3, 2) = 1.0;
  } else if (name == "CZ") {
    expect_arity(name, nt, nc, 1, 1);
    g.matrix = diag4(1, 1, 1, -1);
  } else if (name == "CPHASE") {
    expect_arity(name, nt, nc, 1, 1);
    g.matrix = diag4(1, 1, 1, std::exp(kI * param_at(name, g.params, 0)));
  } else if (name == "R" || name == "RINV") {
    expect_arity(name, nt, nc, 1, 1);
    double n = param_at(name, g.params, 0);
    double th = kTwoPi / std::pow(2.0, n) * (name == "R" ? 1.0 : -1.0);
    g.matrix = diag4(1, std::exp(-kI * th), 1, std::exp(kI * th));
  } else if (name == "SWAP") {
    expect_arity(name, nt, nc, 2, 0);
    g.matrix = Mat::Zero(4, 4);
    g.matrix(0, 0) = g.matrix(1, 2) = g.matrix(2, 1) = g.matrix(3, 3) = 1.0;
  } else {
    throw Error("unknown gate '" + name + "'");
  }
  auto s = g.sites();
  std::vector<int> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("gate " + name + ": targets and controls overlap");
  for (int q : s)
    if (q < 0) throw Error("gate " + name + ": negative qubit index");
  return g;
}

std::vector<Gate> cphase_decomposition(int control, int target, double phi) {
  if (control == target) throw Error("cphase_decomposition: control equals target");
  return {make_gate("RZ", {target}, {}, {phi / 2}), make_gate("RZ", {control}, {}, {phi / 2}),
          make_gate("CNOT", {target}, {control}), make_gate("RZ", {target}, {}, {-phi / 2}),
          make_gate("CNOT", {target}, {control})};
}

QubitCircuit::QubitCircuit(int n_qubits, std::vector<std::string> systems) : n_(n_qubits), systems_(std::move(systems)) {
  if (n_ < 1) throw Error("circuit needs at least one qubit");
  if (systems_.empty()) systems_.assign(n_, "");
  if (static_cast<int>(systems_.size()) != n_) throw Error("system tag count must equal qubit count");
}

void QubitCircuit::check_sites(const Gate& g) const {
  for (int q : g.sites())
    if (q >= n_) throw Error("gate " + g.name + ": qubit index out of range");
}

void QubitCircuit::add(Gate g) {
  check_sites(g);
  items_.emplace_back(std::move(g));
}

void QubitCircuit::add(const std::vector<Gate>& gates) {
  for (const auto& g : gates) add(g);
}

int QubitCircuit::measure(int qubit) {
  if (qubit < 0 || qubit >= n_) throw Error("measurement qubit out of range");
  items_.emplace_back(Measurement{qubit});
  return n_bits_++;
}

void QubitCircuit::add_conditional(Gate g, int bit) {
  check_sites(g);
  if (bit < 0 || bit >= n_bits_) throw Error("condition bit does not reference an earlier measurement");
  items_.emplace_back(Conditional{std::move(g), bit});
}

void QubitCircuit::reset(std::vector<int> qubits) {
  for (int q : qubits)
    if (q < 0 || q >= n_) throw Error("reset qubit out of range");
  items_.emplace_back(Reset{std::move(qubits)});
}

void QubitCircuit::append(const QubitCircuit& other) {
  if (other.n_ != n_) throw Error("append: qubit count mismatch");
  const int offset = n_bits_;
  for (const auto& it : other.items_) {
    if (auto* c = std::get_if<Conditional>(&it)) {
      items_.emplace_back(Conditional{c->gate, c->bit + offset});
    } else {
      items_.push_back(it);
    }
  }
  n_bits_ += other.n_bits_;
}

std::string QubitCircuit::to_text() const {
  std::ostringstream os;
  os << "QUBITS " << n_;
  bool tagged = std::any_of(systems_.begin(), systems_.end(), [](const std::string& s) { return !s.empty(); });
  if (tagged) {
    os << " systems=";
    for (int i = 0; i < n_; ++i) os << (i ? "," : "") << systems_[i];
  }
  os << "\n";
  for (const auto& it : items_) {
    if (auto* g = std::get_if<Gate>(&it)) {
      os << gate_to_text(*g) << "\n";
    } else if (auto* m = std::get_if<Measurement>(&it)) {
      os << "MEASURE " << m->qubit << "\n";
    } else if (auto* c = std::get_if<Conditional>(&it)) {
      os << "COND " << c->bit << " " << gate_to_text(c->gate) << "\n";
    } else if (auto* r = std::get_if<Reset>(&it)) {
      os << "RESET targets=" << join_ints(r->qubits) << "\n";
    }
  }
  return os.str();
}

QubitCircuit QubitCircuit::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::optional<QubitCircuit> c;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "QUBITS") {
        if (c) throw Error("duplicate QUBITS header");
        if (tok.size() < 2) throw Error("QUBITS needs a count");
        std::vector<std::string> systems;
        if (tok.size() > 2) {
          if (tok[2].rfind("systems=", 0) != 0) throw Error("unexpected QUBITS field");
          std::stringstream ss(tok[2].substr(8));
          for (std::string s; std::getline(ss, s, ',');) systems.push_back(s);
        }
        c.emplace(std::stoi(tok[1]), systems);
        continue;
      }
      if (!c) throw Error("missing QUBITS header");
      if (tok[0] == "GATE") {
        c->add(gate_from_tokens(tok, 0));
      } else if (tok[0] == "MEASURE") {
        if (tok.size() != 2) throw Error("MEASURE takes one qubit");
        c->measure(std::stoi(tok[1]));
      } else if (tok[0] == "COND") {
        if (tok.size() < 3) throw Error("COND needs a bit and a gate");
        c->add_conditional(gate_from_tokens(tok, 2), std::stoi(tok[1]));
      } else if (tok[0] == "RESET") {
        if (tok.size() != 2 || tok[1].rfind("targets=", 0) != 0) throw Error("RESET needs targets=[..]");
        c->reset(parse_ints(tok[1].substr(8)));
      } else {
        throw Error("unknown directive '" + tok[0] + "'");
      }
    } catch (const std::invalid_argument&) {
      throw Error("circuit text line " + std::to_string(lineno) + ": bad number");
    } catch (const Error& e) {
      throw Error("circuit text line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!c) throw Error("circuit text: missing QUBITS header");
  return *c;
}

std::string dictionary_key(const std::string& gate, const std::string& system) { return gate + "_" + system; }

void apply_gate(Mat& rho, const Gate& g, int n_qubits, const Mat* replacement) {
  const auto dims = qubit_dims(n_qubits);
  const auto sites = g.sites();
  if (!replacement) {
    apply_local_operator(rho, g.matrix, dims, sites);
    return;
  }
  const Eigen::Index dl = g.matrix.rows();
  if (replacement->rows() == dl * dl) {
    apply_local_superop(rho, *replacement, dims, sites);
  } else if (replacement->rows() == dl) {
    apply_local_operator(rho, *replacement, dims, sites);
  } else {
    throw Error("dictionary entry for " + g.name + " has wrong size");
  }
  double tr = rho.trace().real();
  if (!(tr > 1e-12)) throw Error("dictionary gate " + g.name + " annihilated the state");
  rho /= tr;
}

void apply_gate(Vec& psi, const Gate& g, int n_qubits) { apply_local_ket(psi, g.matrix, qubit_dims(n_qubits), g.sites()); }

double probability_one(const Mat& rho, int n_qubits, int qubit) {
  SiteSplit split(qubit_dims(n_qubits), {qubit});
  double p1 = 0.0;
  for (int r : split.rest_offset) p1 += rho(split.local_offset[1] + r, split.local_offset[1] + r).real();
  return p1;
}

MeasurementRecord measure_in_place(Mat& rho, int n_qubits, int qubit, Rng& rng) {
  if (qubit < 0 || qubit >= n_qubits) throw Error("measurement qubit out of range");
  const double tr = rho.trace().real();
  double p1 = std::clamp(probability_one(rho, n_qubits, qubit) / tr, 0.0, 1.0);
  MeasurementRecord rec{qubit, rng.uniform() < p1 ? 1 : 0, 1.0 - p1, p1};
  Mat proj = ops::projector(2, rec.outcome, rec.outcome);
  apply_local_operator(rho, proj, qubit_dims(n_qubits), {qubit});
  double norm = rho.trace().real();
  if (norm < 1e-12) throw Error("measurement produced a degenerate post-state");
  rho /= norm;
  return rec;
}

MeasurementRecord measure_in_place(Vec& psi, int n_qubits, int qubit, Rng& rng) {
  if (qubit < 0 || qubit >= n_qubits) throw Error("measurement qubit out of range");
  SiteSplit split(qubit_dims(n_qubits), {qubit});
  double p1 = 0.0;
  for (int r : split.rest_offset) p1 += std::norm(psi(split.local_offset[1] + r));
  p1 = std::clamp(p1 / psi.squaredNorm(), 0.0, 1.0);
  MeasurementRecord rec{qubit, rng.uniform() < p1 ? 1 : 0, 1.0 - p1, p1};
  for (int r : split.rest_offset) psi(split.local_offset[1 - rec.outcome] + r) = 0.0;
  double norm = psi.norm();
  if (norm < 1e-12) throw Error("measurement produced a degenerate post-state");
  psi /= norm;
  return rec;
}

std::pair<MeasurementRecord, QuantumState> measure_qubit_povm(const QuantumState& state, int qubit, Rng& rng) {
  const int n = static_cast<int>(state.dims().size());
  for (int d : state.dims())
    if (d != 2) throw Error("measure_qubit_povm: register must consist of qubits");
  if (state.is_ket()) {
    Vec psi = state.ket_vector();
    auto rec = measure_in_place(psi, n, qubit, rng);
    return {rec, QuantumState::ket(psi, state.dims())};
  }
  Mat rho = state.data();
  auto rec = measure_in_place(rho, n, qubit, rng);
  return {rec, QuantumState::density(0.5 * (rho + rho.adjoint()), state.dims())};
}

CircuitRun apply_circuit(const QubitCircuit& circuit, const QuantumState& state, DictionaryMode mode,
                         std::uint64_t rng_seed) {
  const int n = circuit.n_qubits();
  if (state.dims() != qubit_dims(n)) throw Error("apply_circuit: state dims do not match circuit");
  Rng rng(rng_seed);
  std::vector<MeasurementRecord> records;
  std::vector<int> bits;

  const bool use_density = !state.is_ket() || mode.dict != nullptr ||
                           std::any_of(circuit.items().begin(), circuit.items().end(),
                                       [](const CircuitItem& it) { return std::holds_alternative<Reset>(it); });
  Mat rho;
  Vec psi;
  if (use_density)
    rho = state.density_matrix();
  else
    psi = state.ket_vector();

  auto lookup = [&](const Gate& g) -> const Mat* {
    if (!mode.dict) return nullptr;
    const auto sites = g.sites();
    const std::string& sys = circuit.system(sites.front());
    for (int q : sites)
      if (circuit.system(q) != sys) throw Error("gate " + g.name + " spans machines with different system tags");
    auto it = mode.dict->find(dictionary_key(g.name, sys));
    if (it != mode.dict->end()) return &it->second;
    if (mode.strict) throw Error("no dictionary entry for " + dictionary_key(g.name, sys));
    return nullptr;
  };
  auto run_gate = [&](const Gate& g) {
    if (use_density)
      apply_gate(rho, g, n, lookup(g));
    else
      apply_gate(psi, g, n);
  };

  for (const auto& it : circuit.items()) {
    if (auto* g = std::get_if<Gate>(&it)) {
      run_gate(*g);
    } else if (auto* m = std::get_if<Measurement>(&it)) {
      auto rec = use_density ? measure_in_place(rho, n, m->qubit, rng) : measure_in_place(psi, n, m->qubit, rng);
      records.push_back(rec);
      bits.push_back(rec.outcome);
    } else if (auto* c = std::get_if<Conditional>(&it)) {
      if (bits.at(c->bit) == 1) run_gate(c->gate);
    } else if (auto* r = std::get_if<Reset>(&it)) {
      reset_sites(rho, qubit_dims(n), r->qubits);
    }
  }
  if (use_density) {
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    return {QuantumState::density(rho, state.dims()), records};
  }
  return {QuantumState::ket(psi / psi.norm(), state.dims()), records};
}

QubitCircuit qft_circuit(int n) {
  QubitCircuit c(n);
  for (int j = 0; j < n; ++j) {
    c.add(make_gate("H", {j}));
    for (int k = j + 1; k < n; ++k) c.add(make_gate("CPHASE", {j}, {k}, {kTwoPi / std::pow(2.0, k - j + 1)}));
  }
  for (int j = 0; j < n / 2; ++j) c.add(make_gate("SWAP", {j, n - 1 - j}));
  return c;
}

QubitCircuit inverse_qft_circuit(int n) {
  QubitCircuit c(n);
  for (int j = 0; j < n / 2; ++j) c.add(make_gate("SWAP", {j, n - 1 - j}));
  for (int j = n - 1; j >= 0; --j) {
    for (int k = n - 1; k > j; --k) c.add(make_gate("CPHASE", {j}, {k}, {-kTwoPi / std::pow(2.0, k - j + 1)}));
    c.add(make_gate("H", {j}));
  }
  return c;
}

Mat circuit_unitary(const QubitCircuit& circuit) {
  const int n = circuit.n_qubits();
  const int d = 1 << n;
  Mat u = Mat::Identity(d, d);
  for (const auto& it : circuit.items()) {
    auto* g = std::get_if<Gate>(&it);
    if (!g) throw Error("circuit_unitary: circuit contains non-unitary items");
    for (int col = 0; col < d; ++col) {
      Vec v = u.col(col);
      apply_gate(v, *g, n);
      u.col(col) = v;
    }
  }
  return u;
}

Mat dft_matrix(int n_qubits, bool inverse) {
  const int d = 1 << n_qubits;
  const double sign = inverse ? -1.0 : 1.0;
  Mat f(d, d);
  for (int k = 0; k < d; ++k)
    for (int j = 0; j < d; ++j)
      f(k, j) = std::exp(sign * kI * kTwoPi * static_cast<double>((static_cast<long long>(j) * k) % d) / static_cast<double>(d)) /
                std::sqrt(static_cast<double>(d));
  return f;
}

}  // namespace dqc
