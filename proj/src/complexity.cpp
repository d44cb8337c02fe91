#include "dcdrtls/complexity.hpp"

#include <stdexcept>

#include "dcdrtls/error.hpp"

namespace dcdrtls {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::DcdRtls: return "DCD-RTLS";
        case Algorithm::Aip: return "AIP";
        case Algorithm::XRtls: return "xRTLS";
        case Algorithm::KRtls: return "kRTLS";
    }
    return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
    for (auto a : kAllAlgorithms)
        if (to_string(a) == name) return a;
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

namespace {

// Coefficients are held doubled so half-integral table entries stay exact:
// value = (q2 L^2 + q1 L + q0) / 2.
struct Poly2 {
    std::int64_t q2 = 0;
    std::int64_t q1 = 0;
    std::int64_t q0 = 0;

    std::uint64_t at(std::int64_t dim) const {
        const std::int64_t twice = q2 * dim * dim + q1 * dim + q0;
        if (twice < 0 || twice % 2 != 0) throw std::logic_error("operation count is not a nonnegative integer");
        return static_cast<std::uint64_t>(twice / 2);
    }
};

struct TableRow {
    Poly2 mul, add;
    std::uint64_t div, sqrt;
};

TableRow table_row(Algorithm algo, std::int64_t n, std::int64_t m, bool shift) {
    if (shift) {
        switch (algo) {
            case Algorithm::DcdRtls: return {{0, 20, 4}, {0, 2 * (4 * n + 17), 2 * (2 * n + 2 * m)}, 1, 0};
            case Algorithm::Aip: return {{0, 30, 22}, {0, 24, 10}, 1, 0};
            case Algorithm::XRtls: return {{0, 32, 38}, {0, 26, 10}, 2, 1};
            case Algorithm::KRtls: return {{0, 44, 186}, {0, 38, 94}, 8, 2};
        }
    } else {
        switch (algo) {
            case Algorithm::DcdRtls: return {{1, 19, 4}, {2, 2 * (4 * n + 16), 2 * (2 * n + 2 * m)}, 1, 0};
            case Algorithm::Aip: return {{4, 18, 18}, {3, 13, 10}, 1, 0};
            case Algorithm::XRtls: return {{4, 20, 34}, {3, 15, 10}, 2, 1};
            case Algorithm::KRtls: return {{6, 20, 62}, {4, 12, 26}, 6, 2};
        }
    }
    throw std::logic_error("unhandled algorithm");
}

}  // namespace

OpCounts predicted_ops(Algorithm algo, int dim, int dcd_n, int dcd_m, bool shift_structured) {
    if (dim < 1) throw InvalidInput("predicted_ops: L must be positive");
    if (algo == Algorithm::DcdRtls && (dcd_n < 1 || dcd_m < 1))
        throw InvalidInput("predicted_ops: N and M must be positive");
    const auto row = table_row(algo, dcd_n, dcd_m, shift_structured);
    return {row.mul.at(dim), row.add.at(dim), row.div, row.sqrt};
}

std::vector<CostRow> dcd_rtls_cost_rows(int dim, int dcd_n, int dcd_m, bool shift_structured) {
    const std::uint64_t l = static_cast<std::uint64_t>(dim);
    const std::uint64_t n = static_cast<std::uint64_t>(dcd_n);
    const std::uint64_t m = static_cast<std::uint64_t>(dcd_m);
    const OpCounts phi = shift_structured ? OpCounts{l, 2 * l, 0, 0} : OpCounts{l * (l + 1) / 2, l * l + l, 0, 0};
    const OpCounts solve{0, 2 * n * l + n + m, 0, 0};
    return {
        {"Phi_n = lambda Phi_{n-1} + x x^T", phi},
        {"z_n = lambda z_{n-1} + y x", {l, 2 * l, 0, 0}},
        {"tau_n = lambda tau_{n-1} + y^2", {1, 2, 0, 0}},
        {"p_1", {2 * l, 3 * l, 0, 0}},
        {"p_2", {2 * l, 5 * l - 1, 0, 0}},
        {"solve Phi d_1 = p_1", solve},
        {"solve Phi d_2 = p_2", solve},
        {"m_1 += d_1", {0, l, 0, 0}},
        {"m_2 += d_2", {0, l, 0, 0}},
        {"k_n", {l + 1, l, 0, 0}},
        {"w_n", {3 * l, 2 * l - 1, 1, 0}},
    };
}

std::uint64_t gate_cost(const OpCounts& c, const GateModel& g) {
    return c.add * g.adder_gates + (c.mul + c.div + c.sqrt) * g.multiplier_gates;
}

CounterReport verify_counters(const OpCounts& measured, const OpCounts& predicted, std::uint64_t dcd_add_measured,
                              std::uint64_t dcd_add_budget) {
    CounterReport r;
    r.mul = {measured.mul, predicted.mul, measured.mul == predicted.mul};
    r.add = {measured.add, predicted.add, measured.add <= predicted.add};
    r.div = {measured.div, predicted.div, measured.div == predicted.div};
    r.sqrt = {measured.sqrt, predicted.sqrt, measured.sqrt == predicted.sqrt};
    r.dcd_add_measured = dcd_add_measured;
    r.dcd_add_budget = dcd_add_budget;
    return r;
}

std::ostream& operator<<(std::ostream& os, const CounterReport& r) {
    auto field = [&](const char* name, const FieldCheck& f) {
        os << name << ": measured " << f.measured << ", predicted " << f.predicted << (f.ok ? " ok" : " MISMATCH")
           << '\n';
    };
    field("mul", r.mul);
    field("add", r.add);
    field("div", r.div);
    field("sqrt", r.sqrt);
    os << "dcd add: measured " << r.dcd_add_measured << " of budget " << r.dcd_add_budget << '\n';
    return os;
}

void write_complexity_csv(std::ostream& os, const std::vector<int>& dims, int dcd_n, int dcd_m,
                          const GateModel& gates) {
    os << "algo,L,structured,mul,add,div,sqrt,gates\n";
    for (bool shift : {true, false})
        for (int dim : dims)
            for (auto algo : kAllAlgorithms) {
                const auto c = predicted_ops(algo, dim, dcd_n, dcd_m, shift);
                os << to_string(algo) << ',' << dim << ',' << (shift ? 1 : 0) << ',' << c.mul << ',' << c.add << ','
                   << c.div << ',' << c.sqrt << ',' << gate_cost(c, gates) << '\n';
            }
}

}  // namespace dcdrtls
