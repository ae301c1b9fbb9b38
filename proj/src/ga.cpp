#include "hsiga/ga.hpp"

#include "hsiga/error.hpp"
#include "hsiga/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace hsiga {
namespace {

constexpr KernelKind kGaKernels[] = {KernelKind::rbf, KernelKind::polynomial, KernelKind::sigmoid};

int random_degree(const GeneRanges& r, Rng& rng) {
    return r.degree.first + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(r.degree.second - r.degree.first + 1)));
}

void redraw_parameter(Chromosome& c, std::size_t gene, const GeneRanges& r, Rng& rng) {
    switch (gene) {
        case 0: {
            // pick one of the two other kernels
            std::vector<KernelKind> others;
            for (auto k : kGaKernels)
                if (k != c.kernel) others.push_back(k);
            c.kernel = others[uniform_index(rng, others.size())];
            break;
        }
        case 1: c.nu = uniform_real(rng, r.nu.first, r.nu.second); break;
        case 2: {
            const int span = r.degree.second - r.degree.first;
            if (span == 0) break;
            int d = r.degree.first + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(span)));
            if (d >= c.degree) ++d;
            c.degree = d;
            break;
        }
        case 3: c.gamma = uniform_real(rng, r.gamma.first, r.gamma.second); break;
        case 4: c.coef0 = uniform_real(rng, r.coef0.first, r.coef0.second); break;
        default: break;
    }
}

void swap_gene(Chromosome& a, Chromosome& b, std::size_t gene) {
    switch (gene) {
        case 0: std::swap(a.kernel, b.kernel); break;
        case 1: std::swap(a.nu, b.nu); break;
        case 2: std::swap(a.degree, b.degree); break;
        case 3: std::swap(a.gamma, b.gamma); break;
        case 4: std::swap(a.coef0, b.coef0); break;
        default: std::swap(a.bands[gene - Chromosome::kModelGenes], b.bands[gene - Chromosome::kModelGenes]);
    }
}

}  // namespace

std::size_t Chromosome::band_count() const noexcept {
    return static_cast<std::size_t>(std::count(bands.begin(), bands.end(), std::uint8_t{1}));
}

std::vector<std::size_t> Chromosome::selected() const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < bands.size(); ++b)
        if (bands[b]) out.push_back(b);
    return out;
}

bool Chromosome::is_valid(const GeneRanges& r) const {
    const bool kernel_ok = kernel == KernelKind::rbf || kernel == KernelKind::polynomial || kernel == KernelKind::sigmoid;
    return kernel_ok && nu >= r.nu.first && nu <= r.nu.second && degree >= r.degree.first
           && degree <= r.degree.second && gamma >= r.gamma.first && gamma <= r.gamma.second
           && coef0 >= r.coef0.first && coef0 <= r.coef0.second && band_count() >= 1
           && std::all_of(bands.begin(), bands.end(), [](std::uint8_t v) { return v <= 1; });
}

Candidate decode(const Chromosome& c) {
    SvmSpec spec;
    spec.family = SvmFamily::nu;
    spec.nu = c.nu;
    spec.kernel = KernelSpec{c.kernel, c.gamma, c.coef0, c.degree};
    return Candidate{spec, c.selected()};
}

std::vector<std::size_t> original_bands(const Chromosome& c, std::span<const std::size_t> origin) {
    if (origin.size() != c.bands.size()) throw InvalidArgument("band origin table does not match chromosome length");
    std::vector<std::size_t> out;
    for (auto b : c.selected()) out.push_back(origin[b]);
    return out;
}

Chromosome random_chromosome(std::size_t bands, const GeneRanges& ranges, Rng& rng) {
    if (bands == 0) throw InvalidArgument("chromosome needs at least one band gene");
    Chromosome c;
    c.kernel = kGaKernels[uniform_index(rng, 3)];
    c.nu = uniform_real(rng, ranges.nu.first, ranges.nu.second);
    c.degree = random_degree(ranges, rng);
    c.gamma = uniform_real(rng, ranges.gamma.first, ranges.gamma.second);
    c.coef0 = uniform_real(rng, ranges.coef0.first, ranges.coef0.second);
    c.bands.resize(bands);
    for (auto& b : c.bands) b = static_cast<std::uint8_t>(rng() >> 63);
    repair(c, rng);
    return c;
}

void repair(Chromosome& c, Rng& rng) {
    if (c.bands.empty() || c.band_count() > 0) return;
    c.bands[uniform_index(rng, c.bands.size())] = 1;
}

void mutate(Chromosome& c, const GeneRanges& ranges, Rng& rng) {
    const auto gene = uniform_index(rng, c.gene_count());
    if (gene < Chromosome::kModelGenes) {
        redraw_parameter(c, gene, ranges, rng);
    } else {
        auto& bit = c.bands[gene - Chromosome::kModelGenes];
        bit ^= 1;
    }
    repair(c, rng);
}

void mutate_per_gene(Chromosome& c, double p, const GeneRanges& ranges, Rng& rng) {
    for (std::size_t g = 0; g < c.gene_count(); ++g) {
        if (!(uniform01(rng) < p)) continue;
        if (g < Chromosome::kModelGenes) redraw_parameter(c, g, ranges, rng);
        else c.bands[g - Chromosome::kModelGenes] ^= 1;
    }
    repair(c, rng);
}

void crossover(Chromosome& a, Chromosome& b, CrossoverKind kind, Rng& rng) {
    if (a.gene_count() != b.gene_count()) throw InvalidArgument("crossover of chromosomes with different lengths");
    const auto genes = a.gene_count();
    if (kind == CrossoverKind::uniform) {
        for (std::size_t g = 0; g < genes; ++g)
            if (rng() >> 63) swap_gene(a, b, g);
        return;
    }
    one_point_crossover(a, b, 1 + uniform_index(rng, genes - 1));
}

void one_point_crossover(Chromosome& a, Chromosome& b, std::size_t cut) {
    if (a.gene_count() != b.gene_count()) throw InvalidArgument("crossover of chromosomes with different lengths");
    for (std::size_t g = cut; g < a.gene_count(); ++g) swap_gene(a, b, g);
}

void GaConfig::validate() const {
    if (population < 2) throw InvalidArgument("GA population must be at least 2");
    if (epochs < 1) throw InvalidArgument("GA needs at least one epoch");
    if (tournament < 1) throw InvalidArgument("tournament size must be at least 1");
    if (elite >= population) throw InvalidArgument("elite count must be smaller than the population");
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(crossover_probability) || !prob(mutation_probability))
        throw InvalidArgument("GA probabilities must lie in [0, 1]");
    if (ranges.nu.first <= 0.0 || ranges.nu.second > 1.0 || ranges.nu.first > ranges.nu.second)
        throw InvalidArgument("nu range must lie in (0, 1]");
}

std::size_t tournament_select(std::span<const double> fitness, std::size_t size, Rng& rng) {
    std::size_t best = uniform_index(rng, fitness.size());
    for (std::size_t k = 1; k < size; ++k) {
        const auto cand = uniform_index(rng, fitness.size());
        if (fitness[cand] > fitness[best]) best = cand;
    }
    return best;
}

GaResult ga_optimize(const GaConfig& config, std::size_t bands, const FitnessFn& fitness) {
    config.validate();
    Rng rng(derive_seed(config.seed, {0x6761}));
    std::vector<Chromosome> pop;
    pop.reserve(config.population);
    for (std::size_t i = 0; i < config.population; ++i) pop.push_back(random_chromosome(bands, config.ranges, rng));
    std::vector<double> fit(config.population, 0.0);
    std::vector<char> known(config.population, 0);

    GaResult result;
    result.best_fitness = -std::numeric_limits<double>::infinity();
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> pending;
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (!known[i]) pending.push_back(i);
        parallel_for(pending.size(), config.workers, [&](std::size_t k) {
            const auto i = pending[k];
            try {
                fit[i] = fitness(decode(pop[i]), derive_seed(config.seed, {epoch, i}));
            } catch (const std::exception& e) {
                throw FitnessError(epoch, i, e.what());
            }
        });
        result.evaluations += pending.size();

        const auto best_idx = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
        const double mean = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(fit.size());
        result.history.push_back({epoch, fit[best_idx], mean, pop[best_idx].band_count()});
        if (fit[best_idx] > result.best_fitness) {
            result.best_fitness = fit[best_idx];
            result.best = pop[best_idx];
        }
        if (epoch + 1 == config.epochs) break;

        std::vector<std::size_t> rank(pop.size());
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });

        std::vector<Chromosome> next;
        std::vector<double> next_fit;
        std::vector<char> next_known;
        next.reserve(pop.size());
        for (std::size_t e = 0; e < config.elite; ++e) {
            next.push_back(pop[rank[e]]);
            next_fit.push_back(fit[rank[e]]);
            next_known.push_back(1);
        }
        auto maybe_mutate = [&](Chromosome& c) {
            if (config.mutation_mode == MutationMode::per_gene) {
                mutate_per_gene(c, config.mutation_probability, config.ranges, rng);
            } else if (uniform01(rng) < config.mutation_probability) {
                mutate(c, config.ranges, rng);
            }
        };
        while (next.size() < pop.size()) {
            Chromosome a = pop[tournament_select(fit, config.tournament, rng)];
            Chromosome b = pop[tournament_select(fit, config.tournament, rng)];
            if (uniform01(rng) < config.crossover_probability) crossover(a, b, config.crossover, rng);
            maybe_mutate(a);
            maybe_mutate(b);
            for (auto* child : {&a, &b}) {
                if (next.size() == pop.size()) break;
                next.push_back(std::move(*child));
                next_fit.push_back(0.0);
                next_known.push_back(0);
            }
        }
        pop = std::move(next);
        fit = std::move(next_fit);
        known = std::move(next_known);
    }
    return result;
}

}  // namespace hsiga
