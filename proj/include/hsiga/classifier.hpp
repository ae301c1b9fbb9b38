#pragma once

#include "hsiga/knn.hpp"
#include "hsiga/mlp.hpp"
#include "hsiga/svm.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace hsiga {

/// Decoded classifier configuration: any of the supported families.
using ModelSpec = std::variant<SvmSpec, KnnSpec, MlpSpec>;
using TrainedModel = std::variant<SvmModel, KnnModel, MlpModel>;

/// Short family tag: nu-svm, svc, lsvc, knn or mlp.
std::string family_name(const ModelSpec& spec);
/// One-line human-readable description of every parameter.
std::string describe(const ModelSpec& spec);

TrainedModel train_model(const ModelSpec& spec, const FeatureMatrix& x, std::span<const int> labels,
                         std::span<const std::size_t> feature_indices = {});
std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& x);

/// Versioned little-endian binary record: magic "HSMODEL1", family tag,
/// spec, then the family's coefficients.
void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace hsiga
