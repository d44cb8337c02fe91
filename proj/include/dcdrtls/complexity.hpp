#pragma once

// Per-iteration operation counts of the RTLS family and a unit-gate hardware
// cost model.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dcdrtls/op_counts.hpp"

namespace dcdrtls {

enum class Algorithm { DcdRtls, Aip, XRtls, KRtls };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view name);
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::DcdRtls, Algorithm::Aip, Algorithm::XRtls, Algorithm::KRtls};

/// Closed-form per-iteration counts. N and M only matter for DCD-RTLS.
OpCounts predicted_ops(Algorithm algo, int dim, int dcd_n, int dcd_m, bool shift_structured);

/// One row of the DCD-RTLS algorithm table and its cost.
struct CostRow {
    std::string_view step;
    OpCounts cost;
};

/// The DCD-RTLS per-step rows whose sum is predicted_ops(DcdRtls, ...).
std::vector<CostRow> dcd_rtls_cost_rows(int dim, int dcd_n, int dcd_m, bool shift_structured);

struct GateModel {
    std::uint64_t adder_gates = 204;
    std::uint64_t multiplier_gates = 2336;
    int word_bits = 16;
};

/// Additions cost an adder; multiplications, divisions and square roots a multiplier each.
std::uint64_t gate_cost(const OpCounts& c, const GateModel& g = {});

struct FieldCheck {
    std::uint64_t measured = 0;
    std::uint64_t predicted = 0;
    bool ok = false;
};

struct CounterReport {
    FieldCheck mul;
    FieldCheck add;  // ok when measured <= predicted (the DCD part is a worst-case budget)
    FieldCheck div;
    FieldCheck sqrt;
    std::uint64_t dcd_add_budget = 0;
    std::uint64_t dcd_add_measured = 0;

    bool ok() const { return mul.ok && add.ok && div.ok && sqrt.ok; }
};

/// Compare instrumented counts of one DCD-RTLS step with the closed form.
/// mul, div and sqrt must match exactly; additions must stay within budget.
CounterReport verify_counters(const OpCounts& measured, const OpCounts& predicted, std::uint64_t dcd_add_measured = 0,
                              std::uint64_t dcd_add_budget = 0);

std::ostream& operator<<(std::ostream& os, const CounterReport& r);

/// CSV with columns algo,L,structured,mul,add,div,sqrt,gates.
void write_complexity_csv(std::ostream& os, const std::vector<int>& dims, int dcd_n, int dcd_m,
                          const GateModel& gates = {});

}  // namespace dcdrtls
