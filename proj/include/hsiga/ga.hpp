#pragma once

#include "hsiga/classifier.hpp"
#include "hsiga/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace hsiga {

/// A classifier configuration plus the feature columns it sees.
struct Candidate {
    ModelSpec model;
    std::vector<std::size_t> features;
};

/// Accuracy percentage of a candidate; must be a pure function of
/// (candidate, seed).
using FitnessFn = std::function<double(const Candidate&, std::uint64_t seed)>;

/// Allowed values of the parameter genes.
struct GeneRanges {
    std::pair<double, double> nu{0.001, 0.4};
    std::pair<int, int> degree{1, 5};
    std::pair<double, double> gamma{0.001, 5.0};
    std::pair<double, double> coef0{0.01, 10.0};
};

/// Five model genes followed by one selection bit per feature band.
struct Chromosome {
    static constexpr std::size_t kModelGenes = 5;  // kernel, nu, degree, gamma, coef0

    KernelKind kernel = KernelKind::rbf;  // rbf, polynomial or sigmoid
    double nu = 0.2;
    int degree = 3;
    double gamma = 1.0;
    double coef0 = 1.0;
    std::vector<std::uint8_t> bands;  // 0/1 per feature

    std::size_t gene_count() const noexcept { return kModelGenes + bands.size(); }
    std::size_t band_count() const noexcept;
    std::vector<std::size_t> selected() const;
    bool is_valid(const GeneRanges& ranges) const;

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// nu-SVM spec and selected feature indices encoded by the chromosome.
Candidate decode(const Chromosome& c);
/// Selected features mapped to original band coordinates through `origin`.
std::vector<std::size_t> original_bands(const Chromosome& c, std::span<const std::size_t> origin);

Chromosome random_chromosome(std::size_t bands, const GeneRanges& ranges, Rng& rng);

/// Sets one uniformly chosen bit when no band is selected.
void repair(Chromosome& c, Rng& rng);

/// Alters exactly one uniformly chosen gene: a parameter gene is redrawn
/// from its range (to a different value for the discrete genes), a band gene
/// is flipped. Repairs an emptied mask.
void mutate(Chromosome& c, const GeneRanges& ranges, Rng& rng);
/// Alters each gene independently with probability p.
void mutate_per_gene(Chromosome& c, double p, const GeneRanges& ranges, Rng& rng);

enum class CrossoverKind { uniform, one_point };

/// Uniform: every gene position swapped with probability 1/2. One-point:
/// every gene at position >= a cut drawn from [1, genes) is swapped.
void crossover(Chromosome& a, Chromosome& b, CrossoverKind kind, Rng& rng);
/// One-point crossover at an explicit cut; cut 0 swaps everything.
void one_point_crossover(Chromosome& a, Chromosome& b, std::size_t cut);

enum class MutationMode { per_individual, per_gene };

struct GaConfig {
    std::size_t population = 200;
    std::size_t epochs = 100;
    std::size_t tournament = 3;
    CrossoverKind crossover = CrossoverKind::uniform;
    double crossover_probability = 0.8;
    double mutation_probability = 0.8;
    MutationMode mutation_mode = MutationMode::per_individual;
    std::size_t elite = 1;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    GeneRanges ranges;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;
    double best = 0.0;
    double mean = 0.0;
    std::size_t best_band_count = 0;
};

struct GaResult {
    Chromosome best;
    double best_fitness = 0.0;
    std::vector<EpochStats> history;  // one entry per epoch
    std::size_t evaluations = 0;
};

/// Index of the tournament winner among `size` uniform draws (with
/// replacement); earlier draws win ties.
std::size_t tournament_select(std::span<const double> fitness, std::size_t size, Rng& rng);

/// Generational GA with elitism. Elites carry their fitness forward, so the
/// per-epoch best is non-decreasing. Fitness calls for individual i of epoch
/// t receive seed derive_seed(config.seed, {t, i}) and may run in parallel.
GaResult ga_optimize(const GaConfig& config, std::size_t bands, const FitnessFn& fitness);

}  // namespace hsiga
