#include "hsiga/classifier.hpp"

#include "hsiga/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

namespace hsiga {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string family_name(const ModelSpec& spec) {
    return std::visit(overloaded{[](const SvmSpec& s) { return std::string(to_string(s.family)); },
                                 [](const KnnSpec&) { return std::string("knn"); },
                                 [](const MlpSpec&) { return std::string("mlp"); }},
                      spec);
}

std::string describe(const ModelSpec& spec) {
    std::ostringstream os;
    std::visit(overloaded{[&](const SvmSpec& s) {
                              os << to_string(s.family);
                              if (s.family == SvmFamily::linear_c) {
                                  os << " loss=" << to_string(s.loss) << " C=" << s.c;
                                  return;
                              }
                              os << " kernel=" << to_string(s.kernel.kind);
                              if (s.family == SvmFamily::nu) os << " nu=" << s.nu;
                              else os << " C=" << s.c;
                              if (s.kernel.kind != KernelKind::linear) os << " gamma=" << s.kernel.gamma;
                              if (s.kernel.kind == KernelKind::polynomial || s.kernel.kind == KernelKind::sigmoid)
                                  os << " coef0=" << s.kernel.coef0;
                              if (s.kernel.kind == KernelKind::polynomial) os << " degree=" << s.kernel.degree;
                          },
                          [&](const KnnSpec& s) {
                              os << "knn metric=" << to_string(s.metric) << " weights=" << to_string(s.weighting)
                                 << " k=" << s.k;
                          },
                          [&](const MlpSpec& s) {
                              os << "mlp hidden=";
                              for (std::size_t i = 0; i < s.hidden.size(); ++i) os << (i ? "x" : "") << s.hidden[i];
                              os << " dropout=" << s.dropout << " lr=" << s.learning_rate << " batch=" << s.batch_size
                                 << " iterations=" << s.iterations;
                          }},
               spec);
    return os.str();
}

TrainedModel train_model(const ModelSpec& spec, const FeatureMatrix& x, std::span<const int> labels,
                         std::span<const std::size_t> feature_indices) {
    return std::visit(
        overloaded{[&](const SvmSpec& s) -> TrainedModel { return train_svm(s, x, labels, feature_indices); },
                   [&](const KnnSpec& s) -> TrainedModel { return train_knn(s, x, labels, feature_indices); },
                   [&](const MlpSpec& s) -> TrainedModel { return train_mlp(s, x, labels, feature_indices); }},
        spec);
}

std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& x) {
    return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

// ---------------------------------------------------------------------------
// Binary record

namespace {

constexpr char kMagic[8] = {'H', 'S', 'M', 'O', 'D', 'E', 'L', '1'};
enum : std::uint8_t { kTagSvm = 1, kTagKnn = 2, kTagMlp = 3 };

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <class T>
        requires std::is_arithmetic_v<T>
    void put(T v) {
        if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
            auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
            std::reverse(bytes.begin(), bytes.end());
            out_.write(bytes.data(), sizeof(T));
        } else {
            out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
        }
    }
    void size(std::size_t v) { put<std::uint64_t>(v); }
    template <class T>
    void vec(const std::vector<T>& v) {
        size(v.size());
        for (const auto& x : v) put(static_cast<std::conditional_t<std::is_same_v<T, std::size_t>, std::uint64_t, T>>(x));
    }
    template <class M>
    void matrix(const M& m) {
        size(static_cast<std::size_t>(m.rows()));
        size(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) put<double>(m(i, j));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    template <class T>
        requires std::is_arithmetic_v<T>
    T get() {
        std::array<char, sizeof(T)> bytes{};
        in_.read(bytes.data(), sizeof(T));
        if (in_.gcount() != static_cast<std::streamsize>(sizeof(T))) throw TruncationError("model record truncated");
        if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    std::size_t size() {
        const auto v = get<std::uint64_t>();
        if (v > (std::uint64_t{1} << 40)) throw FormatError("model record: implausible length");
        return static_cast<std::size_t>(v);
    }
    template <class T>
    std::vector<T> vec() {
        std::vector<T> out(size());
        for (auto& x : out) {
            if constexpr (std::is_same_v<T, std::size_t>) x = static_cast<std::size_t>(get<std::uint64_t>());
            else x = get<T>();
        }
        return out;
    }
    template <class M>
    M matrix() {
        const auto r = static_cast<Eigen::Index>(size()), c = static_cast<Eigen::Index>(size());
        M m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = get<double>();
        return m;
    }

private:
    std::istream& in_;
};

void write_svm(Writer& w, const SvmModel& m) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.spec.family));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.spec.kernel.kind));
    w.put<double>(m.spec.kernel.gamma);
    w.put<double>(m.spec.kernel.coef0);
    w.put<std::int32_t>(m.spec.kernel.degree);
    w.put<double>(m.spec.nu);
    w.put<double>(m.spec.c);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.spec.loss));
    w.put<double>(m.spec.solver.eps);
    w.vec(m.classes);
    w.size(m.input_dims);
    w.vec(m.feature_indices);
    w.matrix(m.support_vectors);
    w.size(m.pairs.size());
    for (const auto& p : m.pairs) {
        w.put<std::int32_t>(p.positive);
        w.put<std::int32_t>(p.negative);
        w.vec(p.sv);
        w.vec(p.beta);
        w.vec(p.coef);
        w.put<double>(p.rho);
        w.put<double>(p.objective);
    }
}

SvmModel read_svm(Reader& r) {
    SvmModel m;
    m.spec.family = static_cast<SvmFamily>(r.get<std::uint8_t>());
    m.spec.kernel.kind = static_cast<KernelKind>(r.get<std::uint8_t>());
    m.spec.kernel.gamma = r.get<double>();
    m.spec.kernel.coef0 = r.get<double>();
    m.spec.kernel.degree = r.get<std::int32_t>();
    m.spec.nu = r.get<double>();
    m.spec.c = r.get<double>();
    m.spec.loss = static_cast<LinearLoss>(r.get<std::uint8_t>());
    m.spec.solver.eps = r.get<double>();
    m.classes = r.vec<int>();
    m.input_dims = r.size();
    m.feature_indices = r.vec<std::size_t>();
    m.support_vectors = r.matrix<FeatureMatrix>();
    m.pairs.resize(r.size());
    for (auto& p : m.pairs) {
        p.positive = r.get<std::int32_t>();
        p.negative = r.get<std::int32_t>();
        p.sv = r.vec<std::size_t>();
        p.beta = r.vec<double>();
        p.coef = r.vec<double>();
        p.rho = r.get<double>();
        p.objective = r.get<double>();
        for (auto s : p.sv)
            if (s >= m.support_vector_count()) throw FormatError("model record: support vector index out of range");
    }
    return m;
}

void write_knn(Writer& w, const KnnModel& m) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.spec.metric));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.spec.weighting));
    w.size(m.spec.k);
    w.size(m.input_dims);
    w.vec(m.feature_indices);
    w.matrix(m.samples);
    w.vec(m.labels);
}

KnnModel read_knn(Reader& r) {
    KnnModel m;
    m.spec.metric = static_cast<DistanceMetric>(r.get<std::uint8_t>());
    m.spec.weighting = static_cast<KnnWeighting>(r.get<std::uint8_t>());
    m.spec.k = r.size();
    m.input_dims = r.size();
    m.feature_indices = r.vec<std::size_t>();
    m.samples = r.matrix<FeatureMatrix>();
    m.labels = r.vec<int>();
    return m;
}

void write_mlp(Writer& w, const MlpModel& m) {
    w.vec(m.spec.hidden);
    w.put<double>(m.spec.dropout);
    w.put<double>(m.spec.learning_rate);
    w.size(m.spec.batch_size);
    w.size(m.spec.iterations);
    w.put<std::uint64_t>(m.spec.seed);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.spec.activation));
    w.vec(m.classes);
    w.size(m.input_dims);
    w.vec(m.feature_indices);
    w.matrix(m.mean);
    w.matrix(m.scale);
    w.size(m.net.layers.size());
    for (const auto& l : m.net.layers) {
        w.matrix(l.weights);
        w.matrix(Eigen::MatrixXd(l.bias));
    }
}

MlpModel read_mlp(Reader& r) {
    MlpModel m;
    m.spec.hidden = r.vec<std::size_t>();
    m.spec.dropout = r.get<double>();
    m.spec.learning_rate = r.get<double>();
    m.spec.batch_size = r.size();
    m.spec.iterations = r.size();
    m.spec.seed = r.get<std::uint64_t>();
    m.spec.activation = static_cast<Activation>(r.get<std::uint8_t>());
    m.net.activation = m.spec.activation;
    m.classes = r.vec<int>();
    m.input_dims = r.size();
    m.feature_indices = r.vec<std::size_t>();
    m.mean = r.matrix<Eigen::RowVectorXd>();
    m.scale = r.matrix<Eigen::RowVectorXd>();
    m.net.layers.resize(r.size());
    for (auto& l : m.net.layers) {
        l.weights = r.matrix<Eigen::MatrixXd>();
        l.bias = r.matrix<Eigen::MatrixXd>();
    }
    return m;
}

}  // namespace

void write_model(std::ostream& out, const TrainedModel& model) {
    out.write(kMagic, sizeof kMagic);
    Writer w(out);
    std::visit(overloaded{[&](const SvmModel& m) {
                              w.put<std::uint8_t>(kTagSvm);
                              write_svm(w, m);
                          },
                          [&](const KnnModel& m) {
                              w.put<std::uint8_t>(kTagKnn);
                              write_knn(w, m);
                          },
                          [&](const MlpModel& m) {
                              w.put<std::uint8_t>(kTagMlp);
                              write_mlp(w, m);
                          }},
               model);
    if (!out) throw Error("failed to write model record");
}

TrainedModel read_model(std::istream& in) {
    char magic[sizeof kMagic] = {};
    in.read(magic, sizeof magic);
    if (in.gcount() != sizeof magic || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw FormatError("not a model record (bad magic or version)");
    Reader r(in);
    switch (r.get<std::uint8_t>()) {
        case kTagSvm: return read_svm(r);
        case kTagKnn: return read_knn(r);
        case kTagMlp: return read_mlp(r);
        default: throw FormatError("model record: unknown family tag");
    }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    write_model(out, model);
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_model(in);
}

}  // namespace hsiga
