// reservoir.hpp — the full reservoir-computing pipeline: washout, feature
// extraction, shot noise, least-squares readout, capacity, and
// multi-realization statistics.

#pragma once

#include "lskin/dynamics.hpp"
#include "lskin/parallel.hpp"
#include "lskin/tasks.hpp"

#include <iostream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace lskin {

inline constexpr double kIdealSamples = std::numeric_limits<double>::infinity();

struct ReservoirConfig {
    NetworkSpec network;        // sampling template; resampled per realization
                                // unless it already carries realized arrays
    DissipatorSpec dissipator;  // s is driven per step; epsilon/gamma fixed
    int bosons{1};
    double dt{1.0};
    double samples{kIdealSamples};  // N_s; infinity = ideal readout
    bool noise_on_train{true};      // false = inject shot noise on test only
    int realizations{100};
    std::uint64_t seed{0};  // master seed, fanned out per realization
    double svd_cutoff{1e-10};
    double ridge{0.0};

    void validate() const {
        network.validate();
        dissipator.validate();
        if (bosons < 0) throw std::invalid_argument("reservoir.bosons: must be >= 0");
        if (!(dt > 0.0)) throw std::invalid_argument("reservoir.dt: must be > 0");
        if (!(samples >= 1.0)) throw std::invalid_argument("reservoir.samples: must be >= 1 (or infinity)");
        if (realizations < 1) throw std::invalid_argument("reservoir.realizations: must be >= 1");
    }
};

// ------------------------------ feature map ----------------------------------

// A Hermitian d x d state has exactly d^2 real degrees of freedom. Layout:
// Re(rho_ij) for i <= j in row-major upper-triangle order, then Im(rho_ij)
// for i < j in the same order.
inline int feature_dim(int d) { return d * d; }

inline Eigen::VectorXd features_from_state(const Matrix& rho) {
    const int d = static_cast<int>(rho.rows());
    Eigen::VectorXd f(feature_dim(d));
    int idx = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) f[idx++] = rho(i, j).real();
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) f[idx++] = rho(i, j).imag();
    }
    return f;
}

inline Matrix state_from_features(const Eigen::VectorXd& f, int d) {
    if (f.size() != feature_dim(d)) throw std::invalid_argument("state_from_features: length mismatch");
    Matrix rho(d, d);
    int idx = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            rho(i, j) = f[idx];
            rho(j, i) = f[idx];
            ++idx;
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            rho(i, j) += Complex(0.0, f[idx]);
            rho(j, i) -= Complex(0.0, f[idx]);
            ++idx;
        }
    }
    return rho;
}

// ------------------------------ pipeline steps --------------------------------

// Random pure state |psi><psi| with psi a normalized complex Gaussian vector.
inline DensityMatrix random_pure_state(const BasisPtr& basis, Rng& rng) {
    const int d = basis->size();
    Vector psi(d);
    for (int i = 0; i < d; ++i) psi[i] = Complex(rng.gaussian(), rng.gaussian());
    psi /= psi.norm();
    return {basis, psi * psi.adjoint()};
}

// Drive the state through all inputs; returns one feature row per step at and
// beyond the washout mark. Washout features are never materialized.
inline Eigen::MatrixXd evolve_sequence(StepEvolver& evolver, const DensityMatrix& initial,
                                       const std::vector<double>& inputs, int washout) {
    const int d = evolver.basis()->size();
    const int total = static_cast<int>(inputs.size());
    if (washout < 0 || washout > total) throw std::invalid_argument("evolve_sequence: bad washout length");
    Eigen::MatrixXd features(total - washout, feature_dim(d));
    Vector v = vec(initial.rho);
    for (int k = 0; k < total; ++k) {
        evolver.step(inputs[static_cast<std::size_t>(k)], v);
        if (!v.allFinite()) {
            throw std::runtime_error("evolve_sequence: propagation blow-up at step " + std::to_string(k));
        }
        if (k >= washout) features.row(k - washout) = features_from_state(unvec(v, d));
    }
    return features;
}

// i.i.d. Gaussian measurement noise with sigma = 1/sqrt(N_s) on every feature.
inline void add_shot_noise(Eigen::MatrixXd& features, double n_samples, Rng& rng) {
    if (std::isinf(n_samples)) return;
    if (!(n_samples >= 1.0)) throw std::invalid_argument("add_shot_noise: N_s must be >= 1");
    const double sigma = 1.0 / std::sqrt(n_samples);
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        for (Eigen::Index c = 0; c < features.cols(); ++c) features(r, c) += sigma * rng.gaussian();
    }
}

// ------------------------------- readout --------------------------------------

struct ReadoutWeights {
    Eigen::VectorXd alpha;  // one weight per feature
    double alpha0{0.0};     // bias
    Eigen::Index rank{0};
};

// Least squares for x_k = alpha0 + f_k . alpha via SVD pseudoinverse with a
// relative singular-value cutoff; optional ridge term for conditioning
// studies. cutoff = 0 demands full rank and throws otherwise.
inline ReadoutWeights train_readout(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                    double ridge = 0.0, double cutoff = 1e-10) {
    if (features.rows() != targets.size()) throw std::invalid_argument("train_readout: row/target mismatch");
    if (features.rows() < 2) throw std::invalid_argument("train_readout: need at least two rows");
    const Eigen::Index cols = features.cols() + 1;
    if (features.rows() < cols) {
        std::cerr << "[lskin] train_readout: " << features.rows() << " rows for " << cols
                  << " unknowns; fit is underdetermined\n";
    }
    Eigen::MatrixXd design(features.rows(), cols);
    design.leftCols(features.cols()) = features;
    design.col(cols - 1).setOnes();

    Eigen::VectorXd w;
    Eigen::Index rank = 0;
    if (ridge > 0.0) {
        Eigen::MatrixXd gram = design.transpose() * design;
        gram.diagonal().array() += ridge;
        w = gram.ldlt().solve(design.transpose() * targets);
        rank = cols;
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (cutoff > 0.0) {
            svd.setThreshold(cutoff);
        } else {
            svd.setThreshold(Eigen::NumTraits<double>::epsilon());
            if (svd.rank() < cols) {
                throw std::runtime_error("train_readout: rank-deficient design matrix and no cutoff");
            }
        }
        w = svd.solve(targets);
        rank = svd.rank();
    }

    ReadoutWeights out;
    out.alpha = w.head(features.cols());
    out.alpha0 = w[cols - 1];
    out.rank = rank;
    return out;
}

inline Eigen::VectorXd predict(const ReadoutWeights& w, const Eigen::MatrixXd& features) {
    return (features * w.alpha).array() + w.alpha0;
}

// C = cov^2(y, yhat) / (var(y) var(yhat)), in [0, 1]. Numerically constant
// predictions are scored 0; constant targets are rejected.
inline double capacity(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
    if (predictions.size() != targets.size()) throw std::invalid_argument("capacity: length mismatch");
    const auto n = static_cast<double>(targets.size());
    if (n < 2) throw std::invalid_argument("capacity: need at least two points");
    const double my = targets.mean();
    const double mx = predictions.mean();
    const double var_y = (targets.array() - my).square().sum() / n;
    const double var_x = (predictions.array() - mx).square().sum() / n;
    if (var_y <= 0.0) throw std::invalid_argument("capacity: constant target series");
    if (var_x <= 1e-20 * std::max(1.0, mx * mx)) return 0.0;
    const double cov = ((targets.array() - my) * (predictions.array() - mx)).sum() / n;
    return cov * cov / (var_y * var_x);
}

// ------------------------- experiment orchestration ---------------------------

struct RunResult {
    ReadoutWeights weights;        // from the first successful realization
    Eigen::VectorXd predictions;   // its test-segment predictions
    std::vector<double> capacities;  // one per successful realization
    double mean_capacity{0.0};
    double std_capacity{0.0};  // sample standard deviation over realizations
    std::vector<std::string> failures;
};

inline void finalize_statistics(RunResult& result) {
    const auto n = static_cast<double>(result.capacities.size());
    if (n == 0) return;
    result.mean_capacity =
        std::accumulate(result.capacities.begin(), result.capacities.end(), 0.0) / n;
    if (n > 1) {
        double ss = 0.0;
        for (double c : result.capacities) ss += (c - result.mean_capacity) * (c - result.mean_capacity);
        result.std_capacity = std::sqrt(ss / (n - 1.0));
    }
}

// Everything one realization needs before noise/training: clean features and
// the aligned targets. Reused across noise levels and delays.
struct RealizationData {
    Eigen::MatrixXd features;  // (train + test) x d^2, clean
    std::vector<double> inputs;
    int train{0};
    int test{0};
};

inline NetworkSpec realize_network(const ReservoirConfig& config, std::uint64_t realization) {
    if (config.network.realized()) return config.network;
    return sample_network(config.network.sites, config.network.topology, config.network.J, config.network.W,
                          config.network.epsilon, config.network.edge_count,
                          derive_seed(config.seed, realization, Stream::Disorder));
}

inline RealizationData realize_features(const ReservoirConfig& config, const TaskSpec& task,
                                        std::uint64_t realization, const BasisPtr& basis) {
    const NetworkSpec net = realize_network(config, realization);
    TaskSpec seeded = task;
    seeded.seed = derive_seed(config.seed, realization, Stream::Inputs);
    RealizationData data;
    data.inputs = generate_inputs(seeded);
    data.train = task.train;
    data.test = task.test;

    Rng init_rng(derive_seed(config.seed, realization, Stream::InitialState));
    const DensityMatrix initial = random_pure_state(basis, init_rng);

    StepEvolver evolver(net, config.dissipator, basis, config.dt);
    data.features = evolve_sequence(evolver, initial, data.inputs, task.washout);
    return data;
}

// Noise + train + score for one realization at one noise level. The noise
// stream is salted with N_s so different levels draw independent noise.
inline double evaluate_realization(const RealizationData& data, const TaskSpec& task,
                                   const ReservoirConfig& config, double n_samples,
                                   std::uint64_t realization, ReadoutWeights* weights_out = nullptr,
                                   Eigen::VectorXd* predictions_out = nullptr) {
    Eigen::MatrixXd noisy = data.features;
    if (!std::isinf(n_samples)) {
        Rng noise_rng(derive_seed(config.seed ^ detail::fnv1a_value(0xcbf29ce484222325ULL, n_samples),
                                  realization, Stream::ShotNoise));
        if (config.noise_on_train) {
            add_shot_noise(noisy, n_samples, noise_rng);
        } else {
            Eigen::MatrixXd test_block = noisy.bottomRows(data.test);
            add_shot_noise(test_block, n_samples, noise_rng);
            noisy.bottomRows(data.test) = test_block;
        }
    }

    const std::vector<double> targets = target_series(task, data.inputs);
    Eigen::VectorXd y_train(data.train), y_test(data.test);
    for (int k = 0; k < data.train; ++k) y_train[k] = targets[static_cast<std::size_t>(task.washout + k)];
    for (int k = 0; k < data.test; ++k) {
        y_test[k] = targets[static_cast<std::size_t>(task.washout + data.train + k)];
    }

    const ReadoutWeights w =
        train_readout(noisy.topRows(data.train), y_train, config.ridge, config.svd_cutoff);
    const Eigen::VectorXd pred = predict(w, noisy.bottomRows(data.test));
    if (weights_out) *weights_out = w;
    if (predictions_out) *predictions_out = pred;
    return capacity(pred, y_test);
}

// Full experiment: fresh disorder, inputs, and initial state per realization;
// washout -> train -> test; capacity statistics over all realizations.
// Failed realizations are reported in RunResult::failures and excluded.
inline RunResult run_experiment(const ReservoirConfig& config, const TaskSpec& task, int jobs = 1) {
    config.validate();
    task.validate();
    const BasisPtr basis = enumerate_sector(config.network.sites, config.bosons);

    struct Outcome {
        bool ok{false};
        double capacity{0.0};
        std::string error;
        ReadoutWeights weights;
        Eigen::VectorXd predictions;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(config.realizations));

    parallel_for(config.realizations, jobs, [&](int r) {
        auto& out = outcomes[static_cast<std::size_t>(r)];
        try {
            const RealizationData data =
                realize_features(config, task, static_cast<std::uint64_t>(r), basis);
            out.capacity = evaluate_realization(data, task, config, config.samples,
                                                static_cast<std::uint64_t>(r), &out.weights,
                                                &out.predictions);
            out.ok = true;
        } catch (const std::exception& ex) {
            out.error = ex.what();
        }
    });

    RunResult result;
    bool first = true;
    for (int r = 0; r < config.realizations; ++r) {
        const auto& out = outcomes[static_cast<std::size_t>(r)];
        if (!out.ok) {
            result.failures.push_back("realization " + std::to_string(r) + ": " + out.error);
            std::cerr << "[lskin] run_experiment: " << result.failures.back() << "\n";
            continue;
        }
        result.capacities.push_back(out.capacity);
        if (first) {
            result.weights = out.weights;
            result.predictions = out.predictions;
            first = false;
        }
    }
    finalize_statistics(result);
    return result;
}

}  // namespace lskin
