#include "spinproj/ansatz.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace spinproj {

std::string_view to_string(AnsatzStrategy s) {
  switch (s) {
    case AnsatzStrategy::kNearestNeighbor: return "nearest-neighbor";
    case AnsatzStrategy::kAllToAll: return "all-to-all";
    case AnsatzStrategy::kSymmetryTied: return "symmetry-tied";
  }
  return "unknown";
}

AnsatzStrategy parse_strategy(std::string_view name) {
  if (name == "nearest-neighbor") return AnsatzStrategy::kNearestNeighbor;
  if (name == "all-to-all") return AnsatzStrategy::kAllToAll;
  if (name == "symmetry-tied") return AnsatzStrategy::kSymmetryTied;
  throw std::invalid_argument("unknown ansatz strategy '" + std::string(name) + "'");
}

std::vector<double> AnsatzProgram::initial_parameters() const {
  std::vector<double> out;
  out.reserve(classes.size());
  for (const auto& c : classes) out.push_back(c.initial_value);
  return out;
}

void AnsatzProgram::validate() const {
  for (const auto& g : gates) {
    if (g.i == g.j) throw std::invalid_argument("AnsatzProgram: gate on identical qubits");
    if (g.i >= n_qubits || g.j >= n_qubits)
      throw std::invalid_argument("AnsatzProgram: gate qubit out of range");
    if (g.parameter_class >= classes.size())
      throw std::invalid_argument("AnsatzProgram: gate references unknown parameter class");
  }
}

nlohmann::json AnsatzProgram::to_json() const {
  nlohmann::json j;
  j["n_qubits"] = n_qubits;
  j["strategy"] = std::string(to_string(strategy));
  auto& cls = j["classes"] = nlohmann::json::array();
  for (const auto& c : classes) cls.push_back({{"name", c.name}, {"initial_value", c.initial_value}});
  auto& gs = j["gates"] = nlohmann::json::array();
  for (const auto& g : gates) gs.push_back({g.i, g.j, g.parameter_class});
  return j;
}

AnsatzProgram AnsatzProgram::from_json(const nlohmann::json& j) {
  AnsatzProgram p;
  p.n_qubits = j.at("n_qubits").get<std::size_t>();
  p.strategy = parse_strategy(j.at("strategy").get<std::string>());
  for (const auto& c : j.at("classes"))
    p.classes.push_back({c.at("name").get<std::string>(), c.at("initial_value").get<double>()});
  for (const auto& g : j.at("gates"))
    p.gates.push_back({g.at(0).get<std::size_t>(), g.at(1).get<std::size_t>(),
                       g.at(2).get<std::size_t>()});
  p.validate();
  return p;
}

Matrix4 swap_exponential_matrix(double theta) {
  const Complex phase = std::polar(1.0, theta);
  const Complex c = std::cos(theta);
  const Complex is = Complex{0.0, std::sin(theta)};
  return {phase, 0.0, 0.0, 0.0,
          0.0,   c,   is,  0.0,
          0.0,   is,  c,   0.0,
          0.0,   0.0, 0.0, phase};
}

TwoQubitUnitary swap_exponential_gate(double theta, std::size_t i, std::size_t j) {
  return TwoQubitUnitary(swap_exponential_matrix(theta), i, j);
}

namespace {

void push(GateSequence& seq, PrimitiveKind kind, std::size_t q, std::size_t t = 0,
          double angle = 0.0) {
  seq.gates.push_back({kind, q, t, angle});
}

// H^Y = S H Z S as an operator product; application order is reversed.
void push_hy(GateSequence& seq, std::size_t q) {
  push(seq, PrimitiveKind::kS, q);
  push(seq, PrimitiveKind::kZ, q);
  push(seq, PrimitiveKind::kH, q);
  push(seq, PrimitiveKind::kS, q);
}

// H^Y dagger = Z S Z H Z S as an operator product.
void push_hy_dagger(GateSequence& seq, std::size_t q) {
  push(seq, PrimitiveKind::kS, q);
  push(seq, PrimitiveKind::kZ, q);
  push(seq, PrimitiveKind::kH, q);
  push(seq, PrimitiveKind::kZ, q);
  push(seq, PrimitiveKind::kS, q);
  push(seq, PrimitiveKind::kZ, q);
}

void append(GateSequence& dst, const GateSequence& src) {
  dst.gates.insert(dst.gates.end(), src.gates.begin(), src.gates.end());
  dst.global_phase *= src.global_phase;
}

}  // namespace

GateSequence pauli_exponential_decomposed(PauliAxis axis, double phi, std::size_t i,
                                          std::size_t j) {
  if (i == j) throw std::invalid_argument("pauli_exponential_decomposed: i == j");
  GateSequence seq;
  if (axis == PauliAxis::kX) {
    push(seq, PrimitiveKind::kH, i);
    push(seq, PrimitiveKind::kH, j);
  } else if (axis == PauliAxis::kY) {
    push_hy_dagger(seq, i);
    push_hy_dagger(seq, j);
  }
  // CNOT carries the parity of (i, j) onto j, where R_z(-2 phi) imprints exp(i phi Z Z).
  push(seq, PrimitiveKind::kCnot, i, j);
  push(seq, PrimitiveKind::kRz, j, 0, -2.0 * phi);
  push(seq, PrimitiveKind::kCnot, i, j);
  if (axis == PauliAxis::kX) {
    push(seq, PrimitiveKind::kH, i);
    push(seq, PrimitiveKind::kH, j);
  } else if (axis == PauliAxis::kY) {
    push_hy(seq, i);
    push_hy(seq, j);
  }
  return seq;
}

GateSequence swap_exponential_decomposed(double theta, std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("swap_exponential_decomposed: i == j");
  GateSequence seq;
  seq.global_phase = std::polar(1.0, theta / 2.0);
  // The three factors commute; ZZ is applied first, matching the rightmost factor.
  append(seq, pauli_exponential_decomposed(PauliAxis::kZ, theta / 2.0, i, j));
  append(seq, pauli_exponential_decomposed(PauliAxis::kY, theta / 2.0, i, j));
  append(seq, pauli_exponential_decomposed(PauliAxis::kX, theta / 2.0, i, j));
  return seq;
}

void apply_sequence(Statevector& state, const GateSequence& seq) {
  for (const auto& g : seq.gates) {
    switch (g.kind) {
      case PrimitiveKind::kH: state.apply_single_qubit(g.qubit, gates::hadamard()); break;
      case PrimitiveKind::kS: state.apply_single_qubit(g.qubit, gates::phase_s()); break;
      case PrimitiveKind::kZ: state.apply_single_qubit(g.qubit, gates::pauli_z()); break;
      case PrimitiveKind::kCnot: state.apply_cnot(g.qubit, g.target); break;
      case PrimitiveKind::kRz: state.apply_single_qubit(g.qubit, gates::rz(g.angle)); break;
    }
  }
  state.scale(seq.global_phase);
}

Matrix4 sequence_matrix(const GateSequence& seq, std::size_t first, std::size_t second) {
  if (first == second) throw std::invalid_argument("sequence_matrix: first == second");
  // Map first -> qubit 1, second -> qubit 0 so the basis index equals the local index.
  GateSequence local = seq;
  auto remap = [&](std::size_t q) -> std::size_t {
    if (q == first) return 1;
    if (q == second) return 0;
    throw std::invalid_argument("sequence_matrix: sequence touches other qubits");
  };
  for (auto& g : local.gates) {
    g.qubit = remap(g.qubit);
    if (g.kind == PrimitiveKind::kCnot) g.target = remap(g.target);
  }
  Matrix4 m{};
  for (std::uint64_t c = 0; c < 4; ++c) {
    Statevector s = Statevector::basis_state(2, c);
    apply_sequence(s, local);
    for (std::size_t r = 0; r < 4; ++r) m[4 * r + c] = s[r];
  }
  return m;
}

AnsatzProgram build_nearest_neighbor_ansatz(const Lattice2D& lattice, std::uint64_t seed,
                                            std::size_t layers, double initial_value) {
  if (!lattice.periodic())
    throw std::invalid_argument("build_nearest_neighbor_ansatz: lattice must be periodic");
  AnsatzProgram p;
  p.n_qubits = lattice.num_sites();
  p.strategy = AnsatzStrategy::kNearestNeighbor;
  std::mt19937_64 rng(seed);
  const auto bonds = lattice.nearest_neighbor_bonds();
  for (std::size_t layer = 0; layer < layers; ++layer) {
    auto order = bonds;
    std::shuffle(order.begin(), order.end(), rng);
    for (const auto& [i, j] : order) {
      p.gates.push_back({i, j, p.classes.size()});
      p.classes.push_back({"nn" + std::to_string(p.classes.size()), initial_value});
    }
  }
  return p;
}

AnsatzProgram build_all_to_all_ansatz(std::size_t n, std::uint64_t seed, std::size_t n_gates,
                                      double initial_value) {
  if (n < 2) throw std::invalid_argument("build_all_to_all_ansatz: need n >= 2");
  AnsatzProgram p;
  p.n_qubits = n;
  p.strategy = AnsatzStrategy::kAllToAll;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> sweep;
  std::size_t cursor = 0;
  while (p.gates.size() < n_gates) {
    if (cursor == sweep.size()) {
      sweep = pairs;
      std::shuffle(sweep.begin(), sweep.end(), rng);
      cursor = 0;
    }
    const auto [i, j] = sweep[cursor++];
    p.gates.push_back({i, j, p.classes.size()});
    p.classes.push_back({"pair" + std::to_string(p.classes.size()), initial_value});
  }
  return p;
}

AnsatzProgram build_symmetry_tied_ansatz(const Lattice2D& lattice, std::size_t layers) {
  if (!lattice.periodic())
    throw std::invalid_argument("build_symmetry_tied_ansatz: lattice must be periodic");
  struct ClassDef {
    const char* name;
    double initial;
    std::vector<std::pair<long, long>> displacements;
  };
  std::vector<ClassDef> defs = {
      {"nearest", 0.01, {{1, 0}, {0, 1}}},
      {"diagonal", 0.15, {{1, 1}, {1, -1}}},
      {"second", 0.01, {}},
  };
  // A length-2 hop is only a distinct shell when it does not wrap back onto
  // a nearest neighbour (or the site itself).
  if (lattice.nx() >= 4) defs[2].displacements.emplace_back(2, 0);
  if (lattice.ny() >= 4) defs[2].displacements.emplace_back(0, 2);

  AnsatzProgram p;
  p.n_qubits = lattice.num_sites();
  p.strategy = AnsatzStrategy::kSymmetryTied;
  for (std::size_t layer = 0; layer < layers; ++layer) {
    for (const auto& def : defs) {
      std::set<std::pair<std::size_t, std::size_t>> seen;
      std::vector<SwapGateSpec> cls_gates;
      const std::size_t cls = p.classes.size();
      for (std::size_t s = 0; s < lattice.num_sites(); ++s) {
        for (const auto& [dx, dy] : def.displacements) {
          const std::size_t t = lattice.shifted(s, dx, dy);
          if (t == s) continue;
          if (!seen.insert(std::minmax(s, t)).second) continue;
          cls_gates.push_back({s, t, cls});
        }
      }
      if (cls_gates.empty()) continue;
      std::string name = def.name;
      if (layers > 1) name += "_" + std::to_string(layer);
      p.classes.push_back({name, def.initial});
      p.gates.insert(p.gates.end(), cls_gates.begin(), cls_gates.end());
    }
  }
  return p;
}

void apply_ansatz(Statevector& state, const AnsatzProgram& program,
                  std::span<const double> params) {
  if (params.size() != program.num_parameters())
    throw std::invalid_argument("apply_ansatz: expected " +
                                std::to_string(program.num_parameters()) + " parameters, got " +
                                std::to_string(params.size()));
  if (program.n_qubits != state.num_qubits())
    throw std::invalid_argument("apply_ansatz: program/state qubit count mismatch");
  for (const auto& g : program.gates)
    state.apply_swap_exponential(g.i, g.j, params[g.parameter_class]);
}

}  // namespace spinproj
