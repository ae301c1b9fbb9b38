#pragma once

#include "hsiga/matrix.hpp"
#include "hsiga/random.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hsiga {

enum class Activation { sigmoid, tanh, relu };

std::string_view to_string(Activation a);

struct MlpSpec {
    std::vector<std::size_t> hidden{30};
    double dropout = 0.0;          // applied to hidden activations during training only
    double learning_rate = 0.01;
    std::size_t batch_size = 50;
    std::size_t iterations = 100;  // passes over the training set
    std::uint64_t seed = 0;
    Activation activation = Activation::sigmoid;

    void validate() const;
    friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct DenseLayer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
};

/// Fully connected network with softmax output.
struct MlpNetwork {
    std::vector<DenseLayer> layers;
    Activation activation = Activation::sigmoid;

    std::size_t parameter_count() const;
    Eigen::VectorXd flatten() const;
    void unflatten(const Eigen::VectorXd& params);
};

/// Glorot-uniform weights, zero biases. sizes = {inputs, hidden..., outputs}.
MlpNetwork init_network(std::span<const std::size_t> sizes, Activation activation, Rng& rng);

/// Mean softmax cross-entropy over the rows of x (no dropout). When `grad`
/// is non-null it receives dLoss/dParams with the network's layout.
double mlp_loss(const MlpNetwork& net, const FeatureMatrix& x, std::span<const std::size_t> targets,
                MlpNetwork* grad = nullptr);

/// Row-wise class probabilities.
Eigen::MatrixXd mlp_forward(const MlpNetwork& net, const FeatureMatrix& x);

struct MlpModel {
    MlpSpec spec;
    std::vector<int> classes;  // ascending; output unit k predicts classes[k]
    std::size_t input_dims = 0;
    std::vector<std::size_t> feature_indices;
    Eigen::RowVectorXd mean;   // input standardization
    Eigen::RowVectorXd scale;
    MlpNetwork net;
    std::vector<double> loss_history;  // mean training loss per pass
};

/// Seeded mini-batch gradient descent on cross-entropy. Inputs are
/// standardized with training-set statistics. Throws DivergenceError when the
/// loss becomes non-finite.
MlpModel train_mlp(const MlpSpec& spec, const FeatureMatrix& x, std::span<const int> labels,
                   std::span<const std::size_t> feature_indices = {});

std::vector<int> predict(const MlpModel& model, const FeatureMatrix& x);

}  // namespace hsiga
