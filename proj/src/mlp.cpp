#include "hsiga/mlp.hpp"

#include "hsiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace hsiga {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
    }
    return "?";
}

void MlpSpec::validate() const {
    if (hidden.empty()) throw InvalidArgument("MLP needs at least one hidden layer");
    for (auto h : hidden)
        if (h == 0) throw InvalidArgument("MLP layer sizes must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("dropout must lie in [0, 1)");
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
    if (batch_size == 0 || iterations == 0) throw InvalidArgument("batch size and iteration count must be positive");
}

std::size_t MlpNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

Eigen::VectorXd MlpNetwork::flatten() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    for (const auto& l : layers) {
        out.segment(at, l.weights.size()) = l.weights.reshaped();
        at += l.weights.size();
        out.segment(at, l.bias.size()) = l.bias;
        at += l.bias.size();
    }
    return out;
}

void MlpNetwork::unflatten(const Eigen::VectorXd& params) {
    if (params.size() != static_cast<Eigen::Index>(parameter_count())) throw InvalidArgument("parameter count mismatch");
    Eigen::Index at = 0;
    for (auto& l : layers) {
        l.weights.reshaped() = params.segment(at, l.weights.size());
        at += l.weights.size();
        l.bias = params.segment(at, l.bias.size());
        at += l.bias.size();
    }
}

MlpNetwork init_network(std::span<const std::size_t> sizes, Activation activation, Rng& rng) {
    if (sizes.size() < 2) throw InvalidArgument("network needs input and output sizes");
    MlpNetwork net;
    net.activation = activation;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(sizes[l - 1]), out = static_cast<Eigen::Index>(sizes[l]);
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
        for (Eigen::Index j = 0; j < in; ++j)
            for (Eigen::Index i = 0; i < out; ++i) layer.weights(i, j) = uniform_real(rng, -limit, limit);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void activate(Activation a, Eigen::MatrixXd& z) {
    switch (a) {
        case Activation::sigmoid: z = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); }); break;
        case Activation::tanh: z = z.array().tanh().matrix(); break;
        case Activation::relu: z = z.cwiseMax(0.0); break;
    }
}

// Derivative expressed through the activation output.
Eigen::MatrixXd activation_slope(Activation a, const Eigen::MatrixXd& out) {
    switch (a) {
        case Activation::sigmoid: return (out.array() * (1.0 - out.array())).matrix();
        case Activation::tanh: return (1.0 - out.array().square()).matrix();
        case Activation::relu: return (out.array() > 0.0).cast<double>().matrix();
    }
    return out;
}

void softmax_rows(Eigen::MatrixXd& z) {
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double m = z.row(r).maxCoeff();
        z.row(r) = (z.row(r).array() - m).exp().matrix();
        z.row(r) /= z.row(r).sum();
    }
}

struct Pass {
    std::vector<Eigen::MatrixXd> acts;  // acts[0] = input, acts[l] = output of layer l (post dropout)
    std::vector<Eigen::MatrixXd> masks;
};

// Forward pass; dropout masks are drawn when rng is non-null.
double forward_backward(const MlpNetwork& net, const Eigen::MatrixXd& x, std::span<const std::size_t> targets,
                        double dropout, Rng* rng, MlpNetwork* grad) {
    const auto m = x.rows();
    const auto depth = net.layers.size();
    Pass pass;
    pass.acts.reserve(depth + 1);
    pass.acts.push_back(x);
    pass.masks.resize(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        const auto& layer = net.layers[l];
        Eigen::MatrixXd z = pass.acts.back() * layer.weights.transpose();
        z.rowwise() += layer.bias.transpose();
        if (l + 1 < depth) {
            activate(net.activation, z);
            if (rng && dropout > 0.0) {
                Eigen::MatrixXd mask(z.rows(), z.cols());
                for (Eigen::Index j = 0; j < mask.cols(); ++j)
                    for (Eigen::Index i = 0; i < mask.rows(); ++i)
                        mask(i, j) = uniform01(*rng) < dropout ? 0.0 : 1.0 / (1.0 - dropout);
                z = z.cwiseProduct(mask);
                pass.masks[l] = std::move(mask);
            }
        } else {
            softmax_rows(z);
        }
        pass.acts.push_back(std::move(z));
    }
    const Eigen::MatrixXd& prob = pass.acts.back();
    double loss = 0.0;
    for (Eigen::Index r = 0; r < m; ++r)
        loss -= std::log(std::max(prob(r, static_cast<Eigen::Index>(targets[static_cast<std::size_t>(r)])), 1e-300));
    loss /= static_cast<double>(m);
    if (!grad) return loss;

    grad->activation = net.activation;
    grad->layers.resize(depth);
    Eigen::MatrixXd delta = prob;
    for (Eigen::Index r = 0; r < m; ++r) delta(r, static_cast<Eigen::Index>(targets[static_cast<std::size_t>(r)])) -= 1.0;
    delta /= static_cast<double>(m);
    for (std::size_t l = depth; l-- > 0;) {
        grad->layers[l].weights = delta.transpose() * pass.acts[l];
        grad->layers[l].bias = delta.colwise().sum().transpose();
        if (l == 0) break;
        Eigen::MatrixXd upstream = delta * net.layers[l].weights;
        const Eigen::MatrixXd& out = pass.acts[l];
        if (pass.masks[l - 1].size()) {
            // out = act * mask, so act' must be evaluated on the unmasked value.
            const Eigen::MatrixXd& mask = pass.masks[l - 1];
            Eigen::MatrixXd raw = out;
            for (Eigen::Index k = 0; k < raw.size(); ++k)
                raw.data()[k] = mask.data()[k] > 0.0 ? out.data()[k] / mask.data()[k] : 0.0;
            delta = upstream.cwiseProduct(activation_slope(net.activation, raw)).cwiseProduct(mask);
        } else {
            delta = upstream.cwiseProduct(activation_slope(net.activation, out));
        }
    }
    return loss;
}

}  // namespace

double mlp_loss(const MlpNetwork& net, const FeatureMatrix& x, std::span<const std::size_t> targets, MlpNetwork* grad) {
    if (static_cast<std::size_t>(x.rows()) != targets.size()) throw InvalidArgument("mlp_loss: target count mismatch");
    return forward_backward(net, Eigen::MatrixXd(x), targets, 0.0, nullptr, grad);
}

Eigen::MatrixXd mlp_forward(const MlpNetwork& net, const FeatureMatrix& x) {
    Eigen::MatrixXd a = x;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Eigen::MatrixXd z = a * net.layers[l].weights.transpose();
        z.rowwise() += net.layers[l].bias.transpose();
        if (l + 1 < net.layers.size()) activate(net.activation, z);
        else softmax_rows(z);
        a = std::move(z);
    }
    return a;
}

MlpModel train_mlp(const MlpSpec& spec, const FeatureMatrix& x, std::span<const int> labels,
                   std::span<const std::size_t> feature_indices) {
    spec.validate();
    if (labels.empty()) throw InvalidArgument("train_mlp: empty training set");
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw InvalidArgument("train_mlp: label count mismatch");
    for (auto f : feature_indices)
        if (f >= static_cast<std::size_t>(x.cols())) throw InvalidArgument("train_mlp: feature index out of range");

    MlpModel model;
    model.spec = spec;
    const std::set<int> class_set(labels.begin(), labels.end());
    model.classes.assign(class_set.begin(), class_set.end());
    model.input_dims = static_cast<std::size_t>(x.cols());
    model.feature_indices.assign(feature_indices.begin(), feature_indices.end());

    Eigen::MatrixXd xs = select_columns(x, feature_indices);
    if (!xs.allFinite()) throw InvalidArgument("train_mlp: features must be finite");
    model.mean = xs.colwise().mean();
    model.scale = ((xs.rowwise() - model.mean).array().square().colwise().mean()).sqrt().matrix();
    for (Eigen::Index j = 0; j < model.scale.size(); ++j)
        if (!(model.scale(j) > 0.0)) model.scale(j) = 1.0;
    xs = ((xs.rowwise() - model.mean).array().rowwise() / model.scale.array()).matrix();

    std::vector<std::size_t> targets(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        targets[i] = static_cast<std::size_t>(std::lower_bound(model.classes.begin(), model.classes.end(), labels[i])
                                              - model.classes.begin());

    std::vector<std::size_t> sizes{static_cast<std::size_t>(xs.cols())};
    sizes.insert(sizes.end(), spec.hidden.begin(), spec.hidden.end());
    sizes.push_back(model.classes.size());
    Rng rng(derive_seed(spec.seed, {0x6d6c70}));
    model.net = init_network(sizes, spec.activation, rng);

    const auto n = labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    MlpNetwork grad;
    for (std::size_t epoch = 0; epoch < spec.iterations; ++epoch) {
        shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (std::size_t start = 0; start < n; start += spec.batch_size) {
            const auto len = std::min(spec.batch_size, n - start);
            Eigen::MatrixXd batch(static_cast<Eigen::Index>(len), xs.cols());
            std::vector<std::size_t> bt(len);
            for (std::size_t k = 0; k < len; ++k) {
                batch.row(static_cast<Eigen::Index>(k)) = xs.row(static_cast<Eigen::Index>(order[start + k]));
                bt[k] = targets[order[start + k]];
            }
            const double loss = forward_backward(model.net, batch, bt, spec.dropout, &rng, &grad);
            if (!std::isfinite(loss)) {
                std::ostringstream msg;
                msg << "MLP training diverged (non-finite loss) with learning rate " << spec.learning_rate;
                throw DivergenceError(msg.str());
            }
            total += loss * static_cast<double>(len);
            for (std::size_t l = 0; l < model.net.layers.size(); ++l) {
                model.net.layers[l].weights -= spec.learning_rate * grad.layers[l].weights;
                model.net.layers[l].bias -= spec.learning_rate * grad.layers[l].bias;
            }
        }
        model.loss_history.push_back(total / static_cast<double>(n));
    }
    if (!model.net.flatten().allFinite()) {
        std::ostringstream msg;
        msg << "MLP training diverged (non-finite weights) with learning rate " << spec.learning_rate;
        throw DivergenceError(msg.str());
    }
    return model;
}

std::vector<int> predict(const MlpModel& model, const FeatureMatrix& x) {
    if (static_cast<std::size_t>(x.cols()) != model.input_dims)
        throw InvalidArgument("predict: query has " + std::to_string(x.cols()) + " features, model expects "
                              + std::to_string(model.input_dims));
    FeatureMatrix xs = select_columns(x, model.feature_indices);
    xs = ((xs.rowwise() - model.mean).array().rowwise() / model.scale.array()).matrix();
    const Eigen::MatrixXd prob = mlp_forward(model.net, xs);
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < prob.rows(); ++r) {
        Eigen::Index best = 0;
        prob.row(r).maxCoeff(&best);
        out[static_cast<std::size_t>(r)] = model.classes[static_cast<std::size_t>(best)];
    }
    return out;
}

}  // namespace hsiga
