#include "mtp/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mtp::circuit {

int Circuit::evaluate(const std::vector<int>& inputs) const {
  if (static_cast<int>(inputs.size()) != num_inputs)
    throw std::invalid_argument("Circuit::evaluate: input size mismatch");
  std::vector<int> values(inputs);
  values.reserve(inputs.size() + gates.size());
  for (const Gate& g : gates) {
    switch (g.op) {
      case GateOp::and_gate: values.push_back(values[g.a] & values[g.b]); break;
      case GateOp::or_gate: values.push_back(values[g.a] | values[g.b]); break;
      case GateOp::not_gate: values.push_back(values[g.a] ^ 1); break;
    }
  }
  return values.back();
}

int Circuit::count(GateOp op) const {
  return static_cast<int>(std::count_if(gates.begin(), gates.end(),
                                        [op](const Gate& g) { return g.op == op; }));
}

int min_combiners_per_circuit(int k) {
  int m = 0;
  while ((1 << m) < k) ++m;  // ceil(log2(k))
  return m;
}

std::vector<GateTotals> distribute_gates(Rng& rng, const GateTotals& totals, int num_circuits,
                                         int k) {
  if (num_circuits < 1 || k < 2) throw std::invalid_argument("distribute_gates: bad shape");
  const int floor_per_circuit = min_combiners_per_circuit(k);
  const int combiners = totals.and_count + totals.or_count;
  if (combiners < num_circuits * floor_per_circuit)
    throw std::invalid_argument("distribute_gates: not enough AND/OR gates for " +
                                std::to_string(num_circuits) + " circuits");

  // How many combiners each circuit gets: the floor, plus randomly placed
  // extras.
  std::vector<int> combiner_counts(num_circuits, floor_per_circuit);
  for (int extra = combiners - num_circuits * floor_per_circuit; extra > 0; --extra)
    ++combiner_counts[static_cast<std::size_t>(rng.below(num_circuits))];

  // Which of those slots are AND vs OR: shuffle the exact label multiset.
  std::vector<GateOp> labels;
  labels.insert(labels.end(), totals.and_count, GateOp::and_gate);
  labels.insert(labels.end(), totals.or_count, GateOp::or_gate);
  rng.shuffle(labels);

  std::vector<GateTotals> out(num_circuits);
  std::size_t next = 0;
  for (int c = 0; c < num_circuits; ++c) {
    for (int i = 0; i < combiner_counts[static_cast<std::size_t>(c)]; ++i) {
      if (labels[next++] == GateOp::and_gate)
        ++out[static_cast<std::size_t>(c)].and_count;
      else
        ++out[static_cast<std::size_t>(c)].or_count;
    }
  }
  for (int i = 0; i < totals.not_count; ++i)
    ++out[static_cast<std::size_t>(rng.below(num_circuits))].not_count;
  return out;
}

Circuit build_circuit(Rng& rng, const GateTotals& allocation, int k,
                      bool allow_self_combination) {
  const int combiners = allocation.and_count + allocation.or_count;
  // Each two-signal merge reduces the signal pool by one, so exactly k-1
  // merges take distinct operands; any surplus must merge a signal with
  // itself.
  if (combiners < k - 1)
    throw std::invalid_argument("build_circuit: cannot merge inputs with fewer than k-1 gates");
  if (!allow_self_combination && combiners != k - 1)
    throw std::invalid_argument(
        "build_circuit: surplus AND/OR gates need self-combination enabled");

  std::vector<GateOp> tokens;
  tokens.insert(tokens.end(), allocation.and_count, GateOp::and_gate);
  tokens.insert(tokens.end(), allocation.or_count, GateOp::or_gate);
  tokens.insert(tokens.end(), allocation.not_count, GateOp::not_gate);
  rng.shuffle(tokens);

  // Choose which combiner applications take two distinct signals.
  std::vector<std::size_t> combiner_positions;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] != GateOp::not_gate) combiner_positions.push_back(i);
  std::vector<std::size_t> merge_positions = rng.sample(combiner_positions,
                                                        static_cast<std::size_t>(k - 1));
  std::vector<bool> is_distinct_merge(tokens.size(), false);
  for (std::size_t pos : merge_positions) is_distinct_merge[pos] = true;

  Circuit circuit;
  circuit.num_inputs = k;
  std::vector<int> pool(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pool[static_cast<std::size_t>(i)] = i;
  int next_node = k;

  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const GateOp op = tokens[t];
    if (op == GateOp::not_gate) {
      const std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
      circuit.gates.push_back({GateOp::not_gate, pool[i], -1});
      pool[i] = next_node++;
    } else if (is_distinct_merge[t]) {
      const std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
      std::size_t j = static_cast<std::size_t>(rng.below(pool.size() - 1));
      if (j >= i) ++j;
      circuit.gates.push_back({op, pool[i], pool[j]});
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
      pool.push_back(next_node++);
    } else {
      const std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
      circuit.gates.push_back({op, pool[i], pool[i]});
      pool[i] = next_node++;
    }
  }
  if (pool.size() != 1)
    throw std::logic_error("build_circuit: construction left more than one output signal");
  return circuit;
}

std::vector<std::string> joint_truth_table(const std::vector<Circuit>& circuits) {
  if (circuits.empty()) return {};
  const int k = circuits.front().num_inputs;
  std::vector<std::string> rows;
  rows.reserve(static_cast<std::size_t>(1) << k);
  for (int r = 0; r < (1 << k); ++r) {
    std::vector<int> input(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) input[static_cast<std::size_t>(i)] = (r >> (k - 1 - i)) & 1;
    std::string row;
    for (const Circuit& c : circuits) row.push_back(c.evaluate(input) ? '1' : '0');
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<int> probe(const std::vector<Circuit>& circuits, const std::vector<int>& input) {
  std::vector<int> out;
  out.reserve(circuits.size());
  for (const Circuit& c : circuits) out.push_back(c.evaluate(input));
  return out;
}

double score_prediction(const std::vector<std::string>& predicted,
                        const std::vector<std::string>& truth) {
  if (predicted.size() != truth.size() || truth.empty())
    throw std::invalid_argument("score_prediction: table shape mismatch");
  const std::size_t num_circuits = truth.front().size();
  for (const auto& row : predicted)
    if (row.size() != num_circuits) throw std::invalid_argument("score_prediction: ragged table");
  int credit = 0;
  for (std::size_t c = 0; c < num_circuits; ++c) {
    bool all_match = true;
    for (std::size_t r = 0; r < truth.size(); ++r)
      if (predicted[r][c] != truth[r][c]) {
        all_match = false;
        break;
      }
    if (all_match) ++credit;
  }
  return static_cast<double>(credit) / static_cast<double>(num_circuits);
}

std::vector<Instance> generate_instances(std::uint64_t master_seed, int count, const Params& p) {
  if (p.num_circuits * (1 << p.num_inputs) != kTableCells)
    throw std::invalid_argument("circuit: C * 2^k must equal 24");
  const std::uint64_t inst_base = derive_seed(master_seed, "circuit.instance");
  const std::uint64_t sim_base = derive_seed(master_seed, "circuit.sim");

  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = derive_seed(inst_base, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    Instance inst;
    inst.id = static_cast<std::uint64_t>(i);
    inst.instance_seed = seed;
    inst.sim_seed = derive_seed(sim_base, static_cast<std::uint64_t>(i));
    inst.num_circuits = p.num_circuits;
    inst.num_inputs = p.num_inputs;
    inst.totals.and_count = static_cast<int>(rng.below(p.total_combiners + 1));
    inst.totals.or_count = p.total_combiners - inst.totals.and_count;
    inst.totals.not_count = p.total_nots;
    const auto allocations = distribute_gates(rng, inst.totals, p.num_circuits, p.num_inputs);
    for (const auto& alloc : allocations)
      inst.circuits.push_back(build_circuit(rng, alloc, p.num_inputs, p.allow_self_combination));
    inst.truth_table = joint_truth_table(inst.circuits);
    out.push_back(std::move(inst));
  }
  return out;
}

namespace {

const char* op_name(GateOp op) {
  switch (op) {
    case GateOp::and_gate: return "and";
    case GateOp::or_gate: return "or";
    case GateOp::not_gate: return "not";
  }
  throw std::logic_error("unknown gate op");
}

GateOp op_from_name(const std::string& s) {
  if (s == "and") return GateOp::and_gate;
  if (s == "or") return GateOp::or_gate;
  if (s == "not") return GateOp::not_gate;
  throw std::runtime_error("unknown gate op: " + s);
}

}  // namespace

Json Instance::to_json() const {
  Json j;
  j["task"] = task_name(TaskId::circuit_dec);
  j["id"] = id;
  j["instance_seed"] = instance_seed;
  j["sim_seed"] = sim_seed;
  j["num_circuits"] = num_circuits;
  j["num_inputs"] = num_inputs;
  j["gate_totals"] = Json{{"and", totals.and_count}, {"or", totals.or_count},
                          {"not", totals.not_count}};
  Json circ = Json::array();
  for (const Circuit& c : circuits) {
    Json gates = Json::array();
    for (const Gate& g : c.gates)
      gates.push_back(Json{{"op", op_name(g.op)}, {"a", g.a}, {"b", g.b}});
    circ.push_back(Json{{"gates", std::move(gates)}});
  }
  j["circuits"] = std::move(circ);
  j["truth_table"] = truth_table;
  return j;
}

Instance Instance::from_json(const Json& j) {
  Instance inst;
  inst.id = j.at("id").get<std::uint64_t>();
  inst.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  inst.sim_seed = j.at("sim_seed").get<std::uint64_t>();
  inst.num_circuits = j.at("num_circuits").get<int>();
  inst.num_inputs = j.at("num_inputs").get<int>();
  inst.totals.and_count = j.at("gate_totals").at("and").get<int>();
  inst.totals.or_count = j.at("gate_totals").at("or").get<int>();
  inst.totals.not_count = j.at("gate_totals").at("not").get<int>();
  for (const auto& cj : j.at("circuits")) {
    Circuit c;
    c.num_inputs = inst.num_inputs;
    for (const auto& gj : cj.at("gates"))
      c.gates.push_back({op_from_name(gj.at("op").get<std::string>()), gj.at("a").get<int>(),
                         gj.at("b").get<int>()});
    inst.circuits.push_back(std::move(c));
  }
  inst.truth_table = j.at("truth_table").get<std::vector<std::string>>();
  return inst;
}

Env::Env(Instance instance) : instance_(std::move(instance)) {}

Observation Env::reset() {
  std::ostringstream out;
  const int k = instance_.num_inputs;
  const int c = instance_.num_circuits;
  out << "You must decode hidden boolean circuits.\n"
      << "CIRCUITS: " << c << "\n"
      << "INPUTS: " << k << "\n"
      << "Each circuit takes the same " << k << " input bits and produces one output bit.\n"
      << "Across all circuits exactly " << instance_.totals.and_count << " AND, "
      << instance_.totals.or_count << " OR and " << instance_.totals.not_count
      << " NOT gates are used (the split between circuits is hidden).\n"
      << "You may probe the circuits up to " << kMaxProbes << " times:\n"
      << "  PROBE: <" << k << " bits>          e.g. PROBE: " << std::string(k, '1') << "\n"
      << "and each probe answers with OUTPUTS: <" << c << " bits>, one bit per circuit.\n"
      << "Finish by predicting the joint truth table within " << kMaxTurns << " total turns:\n"
      << "  TABLE:\n"
      << "  ROW <" << k << " input bits>: <" << c << " output bits>   (one line per input, all "
      << (1 << k) << " inputs)\n"
      << "Input bit order is x1..x" << k << "; rows may be listed in any order.";
  Observation obs;
  obs.text = out.str();
  return obs;
}

StepResult Env::step(const std::string& agent_text) {
  clear_parsed();
  ++turns_used_;
  StepResult r = step_inner(agent_text);
  if (!r.terminal && turns_used_ >= kMaxTurns) {
    r.obs.text += "\nNo turns remain and no table was submitted.";
    return finish(Outcome::turn_limit, 0.0, std::move(r.obs));
  }
  return r;
}

StepResult Env::step_inner(const std::string& agent_text) {
  const int k = instance_.num_inputs;
  const int rows_expected = 1 << k;

  if (parse::keyword_line(agent_text, "TABLE:")) {
    // Collect ROW lines keyed by input bits.
    std::map<std::string, std::string> rows;
    std::istringstream in(agent_text);
    std::string line;
    bool malformed = false;
    while (std::getline(in, line)) {
      const std::string t = parse::trim(line);
      if (t.rfind("ROW", 0) != 0) continue;
      const auto colon = t.find(':');
      if (colon == std::string::npos) {
        malformed = true;
        break;
      }
      const std::string input_bits = parse::trim(t.substr(3, colon - 3));
      const std::string output_bits = parse::trim(t.substr(colon + 1));
      const auto is_bits = [](const std::string& s, int n) {
        return static_cast<int>(s.size()) == n &&
               std::all_of(s.begin(), s.end(), [](char ch) { return ch == '0' || ch == '1'; });
      };
      if (!is_bits(input_bits, k) || !is_bits(output_bits, instance_.num_circuits)) {
        malformed = true;
        break;
      }
      rows[input_bits] = output_bits;
    }
    if (malformed || static_cast<int>(rows.size()) != rows_expected) {
      if (turns_used_ < kMaxTurns)
        return reject_malformed("Submit TABLE: followed by all " + std::to_string(rows_expected) +
                                " lines ROW <input bits>: <output bits>.");
      Observation obs;
      obs.text = "The submitted table is malformed or incomplete; the episode ends.";
      return finish(Outcome::parse_failure, 0.0, std::move(obs));
    }
    std::vector<std::string> predicted;
    predicted.reserve(static_cast<std::size_t>(rows_expected));
    for (int r = 0; r < rows_expected; ++r) {
      std::string bits;
      for (int i = 0; i < k; ++i) bits.push_back(((r >> (k - 1 - i)) & 1) ? '1' : '0');
      predicted.push_back(rows.at(bits));
    }
    set_parsed("table");
    const double score = score_prediction(predicted, instance_.truth_table);
    Observation obs;
    obs.text = "Table received; per-circuit accuracy " + std::to_string(score) + ".";
    return finish(score == 1.0 ? Outcome::solved : Outcome::failed, score, std::move(obs));
  }

  if (const auto probe_field = parse::keyword_line(agent_text, "PROBE:")) {
    const std::string bits = parse::trim(*probe_field);
    const bool valid = static_cast<int>(bits.size()) == k &&
                       std::all_of(bits.begin(), bits.end(),
                                   [](char ch) { return ch == '0' || ch == '1'; });
    if (!valid)
      return reject_malformed("Probe with one line: PROBE: <" + std::to_string(k) + " bits>");
    if (probes_used_ >= kMaxProbes) {
      Observation obs;
      obs.text = "Probe refused: the probe budget (" + std::to_string(kMaxProbes) +
                 ") is exhausted. Submit your TABLE. The turn is spent.";
      set_parsed("probe(refused):" + bits);
      return proceed(std::move(obs));
    }
    ++probes_used_;
    std::vector<int> input(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) input[static_cast<std::size_t>(i)] = bits[static_cast<std::size_t>(i)] == '1';
    const std::vector<int> outputs = probe(instance_.circuits, input);
    std::string out_bits;
    for (int b : outputs) out_bits.push_back(b ? '1' : '0');
    set_parsed("probe:" + bits);
    Observation obs;
    obs.text = "OUTPUTS: " + out_bits + "\nProbes remaining: " +
               std::to_string(kMaxProbes - probes_used_);
    if (probes_used_ == kMaxProbes || turns_used_ == kMaxTurns - 1) obs.final_turn = true;
    return proceed(std::move(obs));
  }

  return reject_malformed("Use PROBE: <bits> or TABLE: with ROW lines.");
}

}  // namespace mtp::circuit
