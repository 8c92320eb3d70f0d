#pragma once

#include <string>
#include <vector>

#include "mtp/env.hpp"
#include "mtp/rng.hpp"
#include "mtp/types.hpp"

namespace mtp::circuit {

inline constexpr int kTableCells = 24;  // C * 2^k is fixed
inline constexpr int kMaxProbes = 18;
inline constexpr int kMaxTurns = 19;  // 18 probes + 1 table

enum class GateOp { and_gate, or_gate, not_gate };

struct Gate {
  GateOp op = GateOp::and_gate;
  int a = 0;       // operand node index
  int b = -1;      // second operand; -1 for NOT
};

// Layered DAG over nodes: 0..k-1 are the inputs, then one node per gate in
// construction order; the last node is the circuit output.
struct Circuit {
  int num_inputs = 0;
  std::vector<Gate> gates;

  int evaluate(const std::vector<int>& inputs) const;  // iterative, in node order
  int count(GateOp op) const;
};

struct GateTotals {
  int and_count = 0;
  int or_count = 0;
  int not_count = 0;
};

struct Params {
  int num_circuits = 3;  // C
  int num_inputs = 3;    // k; C * 2^k must equal 24
  int total_combiners = 8;  // AND + OR budget across all circuits
  int total_nots = 3;
  bool allow_self_combination = true;
};

struct Instance {
  std::uint64_t id = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t sim_seed = 0;
  int num_circuits = 3;
  int num_inputs = 3;
  GateTotals totals;
  std::vector<Circuit> circuits;
  std::vector<std::string> truth_table;  // 2^k rows of C chars, inputs ascending

  Json to_json() const;
  static Instance from_json(const Json& j);
};

// Minimum AND+OR gates per circuit so k inputs can merge to one output.
int min_combiners_per_circuit(int k);

// Random allocation of the exact gate totals, every circuit receiving at
// least min_combiners_per_circuit(k) AND+OR gates. Throws on infeasible
// totals.
std::vector<GateTotals> distribute_gates(Rng& rng, const GateTotals& totals, int num_circuits,
                                         int k);

// Layer-by-layer construction: one gate application per layer (combine two
// signals with AND/OR, or invert one with NOT), remaining signals carried
// forward, until every allocated gate is used and one signal remains.
Circuit build_circuit(Rng& rng, const GateTotals& allocation, int k,
                      bool allow_self_combination = true);

// Input bit i of the string is circuit input i ("101" -> x1=1, x2=0, x3=1).
// Row r of the joint table is the input whose bits spell r in binary.
std::vector<std::string> joint_truth_table(const std::vector<Circuit>& circuits);

std::vector<int> probe(const std::vector<Circuit>& circuits, const std::vector<int>& input);

// Per-circuit credit: 1 when the whole predicted column matches, 0 otherwise;
// returns mean credit. Tables must have the same shape.
double score_prediction(const std::vector<std::string>& predicted,
                        const std::vector<std::string>& truth);

std::vector<Instance> generate_instances(std::uint64_t master_seed, int count = 300,
                                         const Params& p = {});

class Env : public EnvBase {
 public:
  // The default probe budget (18) never binds against exhaustive probing of
  // the supported shapes (2^k <= 8); it is a constructor knob so tighter
  // budgets can be studied.
  explicit Env(Instance instance, int max_probes = kMaxProbes, int max_turns = kMaxTurns);

  TaskId task() const override { return TaskId::circuit_dec; }
  Observation reset() override;
  StepResult step(const std::string& agent_text) override;

 private:
  StepResult step_inner(const std::string& agent_text);

  Instance instance_;
  int max_probes_;
  int max_turns_;
  int turns_used_ = 0;
  int probes_used_ = 0;
};

}  // namespace mtp::circuit
