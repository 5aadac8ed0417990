// tasks.hpp — benchmark input sequences and targets (STM and XOR).

#pragma once

#include "lskin/rng.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace lskin {

enum class TaskKind { Stm, Xor };

inline const char* task_name(TaskKind k) { return k == TaskKind::Stm ? "stm" : "xor"; }

inline TaskKind task_from_name(const std::string& name) {
    if (name == "stm") return TaskKind::Stm;
    if (name == "xor") return TaskKind::Xor;
    throw std::invalid_argument("task: expected \"stm\" or \"xor\", got \"" + name + "\"");
}

struct TaskSpec {
    TaskKind kind{TaskKind::Stm};
    int tau{1};  // STM delay; XOR always looks back 2 steps
    int washout{1000};
    int train{1000};
    int test{1000};
    std::uint64_t seed{0};

    int total_steps() const { return washout + train + test; }

    int history_depth() const { return kind == TaskKind::Stm ? tau : 2; }

    void validate() const {
        if (washout <= 0 || train <= 0 || test <= 0) {
            throw std::invalid_argument("task lengths: washout/train/test must all be positive");
        }
        if (kind == TaskKind::Stm) {
            if (tau < 0) throw std::invalid_argument("task.tau: must be >= 0");
            if (tau >= train) throw std::invalid_argument("task.tau: must be < train length");
        }
        if (history_depth() > washout) {
            throw std::invalid_argument("task: washout shorter than the target lookback; prefix insufficient");
        }
    }
};

// i.i.d. inputs: uniform on [0,1] for STM, fair bits for XOR.
inline std::vector<double> generate_inputs(const TaskSpec& spec, Rng& rng) {
    spec.validate();
    std::vector<double> s(static_cast<std::size_t>(spec.total_steps()));
    if (spec.kind == TaskKind::Stm) {
        for (auto& v : s) v = rng.uniform();
    } else {
        for (auto& v : s) v = static_cast<double>(rng.coin());
    }
    return s;
}

inline std::vector<double> generate_inputs(const TaskSpec& spec) {
    Rng rng(spec.seed);
    return generate_inputs(spec, rng);
}

// Target aligned to the inputs: y_k = s_{k-tau} (STM) or
// y_k = (s_{k-1} + s_{k-2}) mod 2 (XOR). Entries inside the washout prefix
// whose lookback would leave the series are filled with 0; they are never
// scored.
inline std::vector<double> target_series(const TaskSpec& spec, const std::vector<double>& inputs) {
    spec.validate();
    if (static_cast<int>(inputs.size()) < spec.total_steps()) {
        throw std::invalid_argument("target_series: inputs shorter than washout+train+test");
    }
    std::vector<double> y(inputs.size(), 0.0);
    if (spec.kind == TaskKind::Stm) {
        for (std::size_t k = static_cast<std::size_t>(spec.tau); k < inputs.size(); ++k) {
            y[k] = inputs[k - static_cast<std::size_t>(spec.tau)];
        }
    } else {
        for (std::size_t k = 2; k < inputs.size(); ++k) {
            const int b1 = inputs[k - 1] >= 0.5 ? 1 : 0;
            const int b2 = inputs[k - 2] >= 0.5 ? 1 : 0;
            y[k] = static_cast<double>((b1 + b2) % 2);
        }
    }
    return y;
}

// Min-max rescale hook for user-supplied series; generators already emit [0,1].
inline std::vector<double> rescale_to_unit(const std::vector<double>& series) {
    if (series.empty()) return {};
    double lo = series.front(), hi = series.front();
    for (double v : series) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<double> out(series.size(), 0.0);
    if (hi > lo) {
        for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - lo) / (hi - lo);
    }
    return out;
}

}  // namespace lskin
